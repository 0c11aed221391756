use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::args::Format;
use crate::Failure;

#[derive(Clone, Debug)]
pub enum Cell {
    Index(u64),
    Real(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Index(i) => i.to_string(),
            Cell::Real(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Index(i) => (*i).into(),
            Cell::Real(v) => (*v).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Flag(b) => (*b).into(),
        }
    }
}

/// Named columns; CSV with a header row, or a JSON array of row objects.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<(), Failure> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers).map_err(Failure::io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.text())).map_err(Failure::io)?;
                }
                w.flush().map_err(Failure::io)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .headers
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                write_json(&Value::Array(rows), out)
            }
        }
    }
}

pub fn write_json<W: Write>(value: &Value, mut out: W) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut out, value).map_err(Failure::io)?;
    out.write_all(b"\n").map_err(Failure::io)?;
    out.flush().map_err(Failure::io)
}

/// The `--out` file, or standard output.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::usage(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
