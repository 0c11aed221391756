//! Trajectories on a fixed time grid.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::process::{transition, BesqParams};
use crate::scalar::Scalar;

/// One trajectory: strictly increasing times from 0 and nonnegative values.
#[derive(Clone, Debug, PartialEq)]
pub struct PathGrid<T> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> PathGrid<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_grid(&times)?;
        if times.len() != values.len() {
            return Err(Error::InvalidGrid(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= T::zero())) {
            return Err(Error::InvalidGrid(format!("negative or NaN value {v}")));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes `t,value` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"]).map_err(csv_err)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            w.write_record([t.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let cols = read_columns(input, &["t", "value"])?;
        let mut it = cols.into_iter();
        let times = it.next().unwrap_or_default();
        let values = it.next().unwrap_or_default();
        Self::new(
            times.into_iter().map(T::lit).collect(),
            values.into_iter().map(T::lit).collect(),
        )
    }
}

pub(crate) fn check_grid<T: Scalar>(times: &[T]) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidGrid("empty grid".into())),
        Some(t) if *t != T::zero() => {
            return Err(Error::InvalidGrid(format!("grid must start at 0, starts at {t}")))
        }
        _ => {}
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidGrid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Exact finite-dimensional draw of BESQ on `grid`, started at `p.x0()`.
pub fn simulate_path<T: Scalar, R: Rng + ?Sized>(grid: &[T], p: &BesqParams<T>, rng: &mut R) -> Result<PathGrid<T>> {
    check_grid(grid)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut v = p.x0();
    values.push(v);
    for w in grid.windows(2) {
        v = transition(v, w[1] - w[0], p, rng);
        values.push(v);
    }
    Ok(PathGrid {
        times: grid.to_vec(),
        values,
    })
}

/// First time the path touches or crosses `y`, linearly interpolated between
/// the bracketing grid points. Zero if the path starts at `y`.
pub fn first_hitting_on_path<T: Scalar>(path: &PathGrid<T>, y: T) -> Option<T> {
    let (t, v) = (&path.times, &path.values);
    let start = v[0] - y;
    if start == T::zero() {
        return Some(t[0]);
    }
    for i in 1..v.len() {
        let d = v[i] - y;
        if d == T::zero() || (d > T::zero()) != (start > T::zero()) {
            let frac = (v[i - 1] - y) / (v[i - 1] - v[i]);
            return Some(t[i - 1] + (t[i] - t[i - 1]) * frac);
        }
    }
    None
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Reads the named columns of a headed CSV as `f64`.
pub(crate) fn read_columns<R: Read>(input: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Parse(format!("missing column `{n}`")))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("");
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{field}` in column `{}`", names[c])))?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}
