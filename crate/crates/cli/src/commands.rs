use std::io::Write;
use std::path::{Path, PathBuf};

use besq_core::bessel_time::{bessel_time_sample, correlated_pair_sample, post_hit_sample};
use besq_core::hitting::{
    conditional_hitting_cdf, default_anchor, hitting_probability_total, mc_hitting_cdf,
    solve_hitting_density_direct, solve_hitting_density_kernel, solve_hitting_density_laplace,
};
use besq_core::mc::try_draws;
use besq_core::process::{bessel_transition_density, besq_transition_density, sample_besq_transition};
use besq_core::suite::DEFAULT_SEED;
use besq_core::{run_identity_suite, HittingDensity, Method, Params, SuiteConfig};
use serde_json::{Map, Value};

use crate::args::{
    Cli, Command, CondArgs, DensityArgs, DensityKind, Format, HittingArgs, SampleArgs, SampleKind, VerifyArgs,
};
use crate::config;
use crate::output::{sink, write_json, Cell, Table};
use crate::Failure;

/// Resolved common flags.
struct Ctx {
    mu: f64,
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
}

impl Ctx {
    fn params(&self, x0: f64) -> Result<Params, Failure> {
        Ok(Params::from_mu(self.mu, x0)?)
    }

    fn sink(&self) -> Result<Box<dyn Write>, Failure> {
        sink(self.out.as_deref())
    }
}

pub fn run(cli: Cli) -> Result<u8, Failure> {
    let file = config::load(cli.common.config.as_deref())?;
    let common = config::overlay(&cli.common, &file)?;
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be >= 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(Failure::io)?;
    }
    let ctx = Ctx {
        mu: resolve_mu(common.mu, common.delta)?,
        seed: common.seed.unwrap_or(DEFAULT_SEED),
        format: common.format.unwrap_or(Format::Csv),
        out: common.out_path,
    };
    match cli.command {
        Command::Density(a) => density(&ctx, &config::overlay(&a, &file)?),
        Command::Sample { kind } => {
            let (name, a) = match &kind {
                SampleKind::Besq(a) => ("besq", a),
                SampleKind::Xta(a) => ("xta", a),
                SampleKind::Pair(a) => ("pair", a),
                SampleKind::Posthit(a) => ("posthit", a),
            };
            sample(&ctx, name, &config::overlay(a, &file)?)
        }
        Command::Hitting(a) => hitting(&ctx, &config::overlay(&a, &file)?),
        Command::Cond(a) => cond(&ctx, &config::overlay(&a, &file)?),
        Command::Verify(a) => verify(&ctx, &config::overlay(&a, &file)?, &file),
    }
}

/// `mu` from `--mu` or `--delta`; both may be given only if they agree.
fn resolve_mu(mu: Option<f64>, delta: Option<f64>) -> Result<f64, Failure> {
    let mu = match (mu, delta) {
        (None, None) => 0.0,
        (Some(m), None) => m,
        (None, Some(d)) => Params::from_delta(d, 1.0)?.mu(),
        (Some(m), Some(d)) => {
            let implied = 2.0 * (m + 1.0);
            if (implied - d).abs() > 1e-12 * d.abs().max(1.0) {
                return Err(Failure::usage(format!(
                    "--mu {m} and --delta {d} disagree (mu = {m} means delta = {implied})"
                )));
            }
            m
        }
    };
    Params::from_mu(mu, 1.0)?;
    Ok(mu)
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("missing --{flag}")))
}

fn positive(v: f64, flag: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{flag} must be a positive number, got {v}")))
    }
}

fn nonnegative(v: f64, flag: &str) -> Result<f64, Failure> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::usage(format!("--{flag} must be >= 0, got {v}")))
    }
}

/// `lo:hi:step` as `lo, lo + step, ...`, stopping before `hi`.
pub(crate) fn parse_grid(spec: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::usage(format!("--{flag} `{spec}`: {why} (expected lo:hi:step)"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("not three numbers"))?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad("not three numbers"));
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || !(step > 0.0) || !(hi > lo) {
        return Err(bad("need finite lo < hi and step > 0"));
    }
    let n = ((hi - lo) / step - 1e-9).ceil();
    if n > 1e7 {
        return Err(bad("more than 10^7 points"));
    }
    Ok((0..n as usize).map(|k| lo + k as f64 * step).collect())
}

fn density(ctx: &Ctx, a: &DensityArgs) -> Result<u8, Failure> {
    let t = positive(need(a.t, "t")?, "t")?;
    let x0 = nonnegative(a.x0.unwrap_or(1.0), "x0")?;
    let grid = parse_grid(need(a.grid.as_deref(), "grid")?, "grid")?;
    let p = ctx.params(x0)?;
    let table = match a.kind.unwrap_or(DensityKind::Besq) {
        DensityKind::Besq => {
            let mut table = Table::new(&["y", "q"]);
            for y in grid {
                let q = besq_transition_density(x0, nonnegative(y, "grid")?, t, &p)?;
                table.push(vec![Cell::Real(y), Cell::Real(q)]);
            }
            table
        }
        DensityKind::Bessel => {
            let v = positive(x0, "x0")?;
            let mut table = Table::new(&["x", "p"]);
            for x in grid {
                let d = if nonnegative(x, "grid")? == 0.0 {
                    0.0
                } else {
                    bessel_transition_density(v, x, t, &p)?
                };
                table.push(vec![Cell::Real(x), Cell::Real(d)]);
            }
            table
        }
    };
    table.write(ctx.format, ctx.sink()?)?;
    Ok(0)
}

fn sample(ctx: &Ctx, kind: &str, a: &SampleArgs) -> Result<u8, Failure> {
    let n = a.n_samples.unwrap_or(1000);
    if n == 0 {
        return Err(Failure::usage("-n must be >= 1"));
    }
    let unit = ctx.params(1.0)?;
    let table = match kind {
        "besq" => {
            let t = positive(need(a.t, "t")?, "t")?;
            let p = ctx.params(nonnegative(a.x0.unwrap_or(1.0), "x0")?)?;
            let v = try_draws(ctx.seed, n, |rng| sample_besq_transition(p.x0(), t, &p, rng))?;
            indexed(&["draw_index", "value"], v.into_iter().map(|x| vec![Cell::Real(x)]))
        }
        "xta" => {
            let t = nonnegative(need(a.t, "t")?, "t")?;
            let s = nonnegative(need(a.a, "a")?, "a")?;
            let v = try_draws(ctx.seed, n, |rng| bessel_time_sample(t, &[0.0, s], &unit, rng))?;
            indexed(&["draw_index", "value"], v.into_iter().map(|x| vec![Cell::Real(x.x_values[1])]))
        }
        "pair" => {
            let t = nonnegative(need(a.t, "t")?, "t")?;
            let s = nonnegative(need(a.a, "a")?, "a")?;
            let v = try_draws(ctx.seed, n, |rng| correlated_pair_sample(t, s, &unit, rng))?;
            indexed(
                &["draw_index", "check_r", "u"],
                v.into_iter().map(|x| vec![Cell::Real(x.check_r), Cell::Real(x.u)]),
            )
        }
        _ => {
            let y = positive(need(a.y, "y")?, "y")?;
            let eps = positive(need(a.eps, "eps")?, "eps")?;
            let step = positive(a.step.unwrap_or(1e-4), "step")?;
            let cap = positive(a.cap.unwrap_or(1e4), "cap")?;
            let p = ctx.params(nonnegative(a.x0.unwrap_or(1.0), "x0")?)?;
            let v = try_draws(ctx.seed, n, |rng| post_hit_sample(y, eps, &p, step, cap, rng))?;
            let missed = v.iter().filter(|h| h.is_none()).count();
            if missed > 0 {
                eprintln!("{missed} of {n} paths did not reach {y} before time {cap}; their rows are omitted");
            }
            let mut table = Table::new(&["draw_index", "value"]);
            for (i, h) in v.into_iter().enumerate() {
                if let Some(h) = h {
                    table.push(vec![Cell::Index(i as u64), Cell::Real(h.value)]);
                }
            }
            table
        }
    };
    table.write(ctx.format, ctx.sink()?)?;
    Ok(0)
}

fn indexed(headers: &[&'static str], rows: impl Iterator<Item = Vec<Cell>>) -> Table {
    let mut table = Table::new(headers);
    for (i, mut row) in rows.enumerate() {
        row.insert(0, Cell::Index(i as u64));
        table.push(row);
    }
    table
}

fn hitting(ctx: &Ctx, a: &HittingArgs) -> Result<u8, Failure> {
    let y = positive(need(a.y, "y")?, "y")?;
    let t_max = positive(a.t_max.unwrap_or(10.0), "t-max")?;
    let n_steps = a.n_steps.unwrap_or(512);
    let anchor = positive(a.x.unwrap_or_else(|| default_anchor(y)), "x")?;
    let method: Method = a.method.as_deref().unwrap_or("direct").parse()?;
    let mass_tol = positive(a.mass_tol.unwrap_or(1e-2), "mass-tol")?;
    let residual_tol = positive(a.residual_tol.unwrap_or(1e-3), "residual-tol")?;
    let mu = ctx.mu;

    let grid: Vec<f64> = (1..=n_steps).map(|k| t_max * k as f64 / n_steps as f64).collect();
    let d = match method {
        Method::VolterraDirect => solve_hitting_density_direct(y, mu, t_max, n_steps, anchor)?,
        Method::Laplace => solve_hitting_density_laplace(y, mu, &grid, anchor)?,
        Method::LaplaceKernel => {
            let reference = solve_hitting_density_direct(y, mu, t_max, n_steps, anchor)?;
            solve_hitting_density_kernel(y, mu, &grid, anchor, &reference)?
        }
    };

    let total = hitting_probability_total(y, mu)?;
    let mass_error = (d.mass + d.diagnostics.tail_estimate - total).abs();
    let mut sidecar: Map<String, Value> = serde_json::from_str(&d.sidecar_json()?).map_err(Failure::io)?;
    sidecar.insert("hitting_probability_total".into(), total.into());
    sidecar.insert("mass_error".into(), mass_error.into());

    let mut problems = Vec::new();
    if mass_error > mass_tol {
        problems.push(format!(
            "mass {:.6} + tail {:.6} is {mass_error:.3e} from {total} (tolerance {mass_tol})",
            d.mass, d.diagnostics.tail_estimate
        ));
    }
    if let Some(r) = d.diagnostics.residual_max.filter(|r| *r > residual_tol) {
        problems.push(format!("relative residual {r:.3e} exceeds {residual_tol}"));
    }
    if d.diagnostics.clipped_mass > residual_tol {
        problems.push(format!("clipped mass {:.3e} exceeds {residual_tol}", d.diagnostics.clipped_mass));
    }
    if !d.diagnostics.gs_unstable_times.is_empty() {
        eprintln!(
            "Gaver-Stehfest 12/14-term difference above 1e-3 at {} of {} grid times (see sidecar)",
            d.diagnostics.gs_unstable_times.len(),
            d.t_grid.len()
        );
    }
    if a.check {
        let (distance, check) = mc_check(ctx, &d, a)?;
        sidecar.insert("mc_check".into(), check);
        eprintln!("Kolmogorov distance to Monte Carlo CDF: {distance:.5}");
        let tol = a.mc_tol.unwrap_or(0.02);
        if distance > tol {
            problems.push(format!("Kolmogorov distance {distance:.4} to Monte Carlo exceeds {tol}"));
        }
    }

    write_density(ctx, &d, sidecar)?;
    eprintln!(
        "{}: mass {:.6} + tail {:.2e} (total hitting probability {total})",
        method.as_str(),
        d.mass,
        d.diagnostics.tail_estimate
    );
    if problems.is_empty() {
        Ok(0)
    } else {
        for p in &problems {
            eprintln!("diagnostic over threshold: {p}");
        }
        Ok(Failure::THRESHOLD)
    }
}

fn mc_check(ctx: &Ctx, d: &HittingDensity, a: &HittingArgs) -> Result<(f64, Value), Failure> {
    let n = a.mc_n.unwrap_or(10_000);
    let step = positive(a.mc_step.unwrap_or(1e-4), "mc-step")?;
    if n < 1 {
        return Err(Failure::usage("--mc-n must be >= 1"));
    }
    let mc = mc_hitting_cdf(d.y, d.mu, d.t_max(), step, n, ctx.seed)?;
    let distance = mc.kolmogorov_distance(|t| d.cdf(t));
    let check = serde_json::json!({
        "n": n,
        "step": step,
        "seed": ctx.seed,
        "kolmogorov_distance": distance,
        "censored_fraction": mc.censored_fraction(),
    });
    Ok((distance, check))
}

/// CSV `t,g` plus a sidecar next to it (or on standard error), or one JSON
/// object holding both.
fn write_density(ctx: &Ctx, d: &HittingDensity, mut sidecar: Map<String, Value>) -> Result<(), Failure> {
    match ctx.format {
        Format::Csv => {
            let mut out = ctx.sink()?;
            d.write_csv(&mut out)?;
            out.flush().map_err(Failure::io)?;
            match &ctx.out {
                Some(path) => write_json(&Value::Object(sidecar), sink(Some(&sidecar_path(path)))?),
                None => write_json(&Value::Object(sidecar), std::io::stderr().lock()),
            }
        }
        Format::Json => {
            sidecar.insert("t".into(), d.t_grid.clone().into());
            sidecar.insert("g".into(), d.g_values.clone().into());
            write_json(&Value::Object(sidecar), ctx.sink()?)
        }
    }
}

/// `density.csv` -> `density.sidecar.json`.
pub(crate) fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("sidecar.json")
}

fn cond(ctx: &Ctx, a: &CondArgs) -> Result<u8, Failure> {
    let y = positive(need(a.y, "y")?, "y")?;
    let big_t = positive(need(a.big_t, "T")?, "T")?;
    let x = positive(need(a.x, "x")?, "x")?;
    let times = match (a.t, a.t_grid.as_deref()) {
        (Some(t), None) => vec![t],
        (None, Some(spec)) => parse_grid(spec, "t-grid")?,
        (Some(_), Some(_)) => return Err(Failure::usage("give --t or --t-grid, not both")),
        (None, None) => return Err(Failure::usage("missing --t or --t-grid")),
    };
    if let Some(bad) = times.iter().find(|t| !(**t > 0.0 && **t <= big_t)) {
        return Err(Failure::usage(format!("every t must satisfy 0 < t <= T = {big_t}, got {bad}")));
    }
    let n_steps = a.n_steps.unwrap_or(400);
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let g = solve_hitting_density_direct(y, ctx.mu, t_max, n_steps, default_anchor(y))?;
    let mut table = Table::new(&["t", "cdf"]);
    let mut clipped = 0.0f64;
    for t in times {
        let c = conditional_hitting_cdf(y, t, big_t, x, &g, ctx.mu)?;
        clipped = clipped.max(c.clipped);
        table.push(vec![Cell::Real(t), Cell::Real(c.value)]);
    }
    if clipped > 0.0 {
        eprintln!("largest clip into [0, 1]: {clipped:.3e}");
    }
    table.write(ctx.format, ctx.sink()?)?;
    Ok(0)
}

fn verify(ctx: &Ctx, a: &VerifyArgs, file: &Map<String, Value>) -> Result<u8, Failure> {
    let mut cfg: SuiteConfig = match file.get("suite") {
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| Failure::usage(format!("config suite: {e}")))?,
        None => SuiteConfig::default(),
    };
    if !a.only.is_empty() {
        cfg.only = a.only.clone();
    }
    for s in &a.skip {
        if !cfg.skip.contains(s) {
            cfg.skip.push(s.clone());
        }
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.n_samples {
        cfg.n_samples = v;
    }
    if let Some(v) = a.n_moment {
        cfg.n_moment = v;
    }
    if let Some(v) = a.n_hitting {
        cfg.n_hitting = v;
    }
    if let Some(v) = a.hitting_step {
        cfg.hitting_step = v;
    }
    if let Some(v) = a.solver_steps {
        cfg.solver_steps = v;
    }
    cfg.validate()?;
    let report = run_identity_suite(&cfg, ctx.seed)?;
    match ctx.format {
        Format::Json => {
            let mut out = ctx.sink()?;
            out.write_all(report.to_json().map_err(Failure::io)?.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .and_then(|_| out.flush())
                .map_err(Failure::io)?;
        }
        Format::Csv => {
            let mut table = Table::new(&["identity_id", "statistic", "critical_value", "n", "seed", "passed"]);
            for r in &report.results {
                table.push(vec![
                    Cell::Text(r.identity_id.clone()),
                    Cell::Real(r.statistic),
                    Cell::Real(r.critical_value),
                    Cell::Index(r.n),
                    Cell::Index(r.seed),
                    Cell::Flag(r.passed),
                ]);
            }
            table.write(Format::Csv, ctx.sink()?)?;
        }
    }
    if ctx.out.is_some() {
        print!("{}", report.table());
    } else {
        eprint!("{}", report.table());
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_half_open() {
        let g = parse_grid("0:5:0.01", "grid").unwrap();
        assert_eq!(g.len(), 500);
        assert_eq!(g[0], 0.0);
        assert!((g[499] - 4.99).abs() < 1e-12);
        assert_eq!(parse_grid("0:1:0.25", "grid").unwrap(), vec![0.0, 0.25, 0.5, 0.75]);
        for bad in ["0:1", "1:0:0.1", "0:1:0", "a:b:c", "0:1:-1"] {
            assert!(parse_grid(bad, "grid").is_err(), "{bad}");
        }
    }

    #[test]
    fn mu_and_delta() {
        assert_eq!(resolve_mu(None, None).unwrap(), 0.0);
        assert_eq!(resolve_mu(None, Some(3.0)).unwrap(), 0.5);
        assert_eq!(resolve_mu(Some(0.5), Some(3.0)).unwrap(), 0.5);
        assert!(resolve_mu(Some(1.0), Some(3.0)).is_err());
        assert!(resolve_mu(Some(-0.5), None).is_err());
        assert!(resolve_mu(None, Some(1.0)).is_err());
    }

    #[test]
    fn sidecar_sits_next_to_output() {
        assert_eq!(sidecar_path(Path::new("out/g.csv")), PathBuf::from("out/g.sidecar.json"));
    }
}
