use statrs::distribution::{ContinuousCDF, LogNormal};

use super::Ctx;
use crate::bessel_time::{
    bessel_time_sample, correlated_pair_sample, lamperti_identity_samples, pair_covariance_formula,
    post_hit_sample, scaled_stop_time_sample, stopped_bessel_time_sample, time_inversion_samples,
    triple_identity_check, TestFn,
};
use crate::error::{Error, Result};
use crate::hitting::{
    conditional_hitting_cdf, default_anchor, hitting_probability_total, solve_hitting_density_direct,
    solve_hitting_density_laplace, volterra_residual, HittingDensity,
};
use crate::mc::{draws, try_draws};
use crate::process::{clock_decomposition_error, scan_for_hit, simulate_gbm_clock, transition, BesqParams};
use crate::stats::{
    chi_square_independence, combine, estimates_agree, ks_one_sample, ks_two_sample, mean_and_se, mean_within_se,
    TestResult,
};

pub(super) fn run(id: &str, ctx: &Ctx) -> Result<TestResult> {
    match id {
        "pms" => pms(ctx),
        "cor1" => cor1(ctx),
        "post_hit" => post_hit(ctx, None),
        "post_hit_cond" => post_hit(ctx, Some(0.25)),
        "escape" => escape(ctx),
        "besa" => besa(ctx),
        "besa_m" => besa_m(ctx),
        "refprinc" => refprinc(ctx),
        "stop_time" => stop_time(ctx),
        "plus" => plus(ctx),
        "cond_moment" => cond_moment(ctx),
        "pair_cov" => pair_cov(ctx),
        "triple" => triple(ctx),
        "time_inversion" => time_inversion(ctx, 1.0, 1.0),
        "time_inversion_cor" => time_inversion(ctx, 2.0, 0.5),
        "gbm_decomp" => gbm_decomp(ctx),
        "lamperti_s0" => lamperti_s0(ctx),
        "lamperti" => lamperti(ctx),
        "distr" => distr(ctx),
        "final_cor" => final_cor(ctx),
        other => Err(Error::Config(format!("unknown identity `{other}`"))),
    }
}

/// `n` exact draws of BESQ at time `t` from `x`.
pub(crate) fn besq_draws(seed: u64, n: usize, x: f64, t: f64, p: &BesqParams<f64>) -> Vec<f64> {
    draws(seed, n, |rng| transition(x, t, p, rng))
}

/// Marginal law: `X(t, a) ~ R(a)`.
pub(crate) fn marginal_check(ctx: &Ctx, t: f64, a: f64, mu: f64) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let n = ctx.cfg.n_samples;
    let x = try_draws(ctx.seed("lhs"), n, |rng| {
        bessel_time_sample(t, &[0.0, a], &p, rng).map(|s| s.x_values[1])
    })?;
    let r = besq_draws(ctx.seed("rhs"), n, 1.0, a, &truth);
    Ok(ks_two_sample(&x, &r, ctx.cfg.alpha)?
        .with_detail("t", t)
        .with_detail("a", a)
        .with_detail("mu", mu))
}

fn pms(ctx: &Ctx) -> Result<TestResult> {
    marginal_check(ctx, 0.7, 0.5, 0.0)
}

/// `X(t, a)` is independent of `R(t)`.
pub(crate) fn independence_check(ctx: &Ctx, t: f64, a: f64, mu: f64, seed: u64) -> Result<TestResult> {
    let p = ctx.tested(mu)?;
    let pairs = try_draws(seed, ctx.cfg.n_samples, |rng| {
        bessel_time_sample(t, &[0.0, a], &p, rng).map(|s| (s.r_t, s.x_values[1]))
    })?;
    let (r, x): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(chi_square_independence(&r, &x, 5, ctx.cfg.alpha)?
        .with_detail("t", t)
        .with_detail("a", a)
        .with_detail("mu", mu))
}

fn cor1(ctx: &Ctx) -> Result<TestResult> {
    independence_check(ctx, 1.0, 1.0, 0.0, ctx.seed("pairs"))
}

/// `R(tau_y + eps y) / y ~ R(eps)`, optionally on the event `tau_y > t0`.
fn post_hit(ctx: &Ctx, condition: Option<f64>) -> Result<TestResult> {
    let (y, eps, mu) = (2.0, 0.3, 0.0);
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let c = ctx.cfg;
    let hits = try_draws(ctx.seed("lhs"), c.n_hitting, |rng| {
        post_hit_sample(y, eps, &p, c.hitting_step, c.hitting_cap, rng)
    })?;
    let missing = hits.iter().filter(|h| h.is_none()).count();
    let kept: Vec<f64> = hits
        .iter()
        .flatten()
        .filter(|h| condition.is_none_or(|t0| h.tau > t0))
        .map(|h| h.value / y)
        .collect();
    if kept.len() < 100 {
        return Err(Error::TestInput(format!("only {} paths satisfy the condition", kept.len())));
    }
    let reference = besq_draws(ctx.seed("rhs"), c.n_hitting, 1.0, eps, &truth);
    let mut r = ks_two_sample(&kept, &reference, c.alpha)?
        .with_detail("y", y)
        .with_detail("eps", eps)
        .with_detail("step", c.hitting_step)
        .with_detail("not_hit_by_cap", missing);
    if let Some(t0) = condition {
        r = r.with_detail("condition_tau_greater_than", t0);
    }
    Ok(r)
}

/// `P(|R(tau_y + eps y) - y| <= 0.1 y)` along decreasing `eps`; passes only
/// if it strictly decreases.
pub(crate) fn escape_check(ctx: &Ctx, y: f64, mu: f64, n: usize) -> Result<TestResult> {
    let p = ctx.tested(mu)?;
    let c = ctx.cfg;
    let eps_list = [0.1, 0.01, 0.001];
    let mut probs = Vec::new();
    for (k, eps) in eps_list.iter().enumerate() {
        let hits = try_draws(ctx.seed(&format!("eps{k}")), n, |rng| {
            post_hit_sample(y, *eps, &p, c.hitting_step, c.hitting_cap, rng)
        })?;
        let near: Vec<f64> = hits
            .iter()
            .flatten()
            .map(|h| f64::from(u8::from((h.value - y).abs() <= 0.1 * y)))
            .collect();
        probs.push(mean_and_se(&near));
    }
    let worst = probs.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::NEG_INFINITY, f64::max);
    let mut r = TestResult::new("strictly_decreasing", worst, 0.0, n as u64, worst < 0.0)
        .with_detail("y", y)
        .with_detail("mu", mu);
    for (eps, (pr, se)) in eps_list.iter().zip(&probs) {
        r = r.with_detail(&format!("p_eps_{eps}"), serde_json::json!({ "p": pr, "se": se }));
    }
    Ok(r)
}

fn escape(ctx: &Ctx) -> Result<TestResult> {
    escape_check(ctx, 2.0, 0.0, ctx.cfg.n_hitting)
}

/// Finite-dimensional law of `a -> X(t, a)`: `X(t, a1)` against `R(a1)` and
/// the increment ratio `X(t, a2) / X(t, a1)` against `R(a2) / R(a1)`.
pub(crate) fn process_law_check(ctx: &Ctx, t: f64, a1: f64, a2: f64, mu: f64) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let n = ctx.cfg.n_samples;
    let lhs = try_draws(ctx.seed("lhs"), n, |rng| {
        bessel_time_sample(t, &[0.0, a1, a2], &p, rng).map(|s| (s.x_values[1], s.x_values[2] / s.x_values[1]))
    })?;
    let rhs = draws(ctx.seed("rhs"), n, |rng| {
        let r1 = transition(1.0, a1, &truth, rng);
        let r2 = transition(r1, a2 - a1, &truth, rng);
        (r1, r2 / r1)
    });
    let (l1, l2): (Vec<f64>, Vec<f64>) = lhs.into_iter().unzip();
    let (r1, r2): (Vec<f64>, Vec<f64>) = rhs.into_iter().unzip();
    Ok(combine(vec![
        ("first", ks_two_sample(&l1, &r1, ctx.cfg.alpha)?),
        ("ratio", ks_two_sample(&l2, &r2, ctx.cfg.alpha)?),
    ])
    .with_detail("t", t)
    .with_detail("a1", a1)
    .with_detail("a2", a2)
    .with_detail("mu", mu))
}

fn besa(ctx: &Ctx) -> Result<TestResult> {
    process_law_check(ctx, 1.0, 0.3, 0.9, 0.0)
}

/// At the stopping time `tau_y`: `X(tau_y, a) ~ R(a)`, independent of `tau_y`.
fn besa_m(ctx: &Ctx) -> Result<TestResult> {
    let (y, a, mu) = (2.0, 0.5, 0.0);
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let c = ctx.cfg;
    let hits: Vec<_> = draws(ctx.seed("lhs"), c.n_hitting, |rng| {
        stopped_bessel_time_sample(y, a, &p, c.hitting_step, c.hitting_cap, rng)
    })
    .into_iter()
    .flatten()
    .collect();
    let taus: Vec<f64> = hits.iter().map(|h| h.tau).collect();
    let xs: Vec<f64> = hits.iter().map(|h| h.value).collect();
    let reference = besq_draws(ctx.seed("rhs"), c.n_hitting, 1.0, a, &truth);
    Ok(combine(vec![
        ("marginal", ks_two_sample(&xs, &reference, c.alpha)?),
        ("independence", chi_square_independence(&taus, &xs, 5, c.alpha)?),
    ])
    .with_detail("y", y)
    .with_detail("a", a)
    .with_detail("step", c.hitting_step))
}

/// `P(R(t) >= b) = P(R'((t - tau_y) / y) >= b / y, tau_y <= t)` with `R'`
/// independent, at grid steps `h` and `h / 2`.
pub(crate) fn reflection_check(ctx: &Ctx, y: f64, b: f64, t: f64, mu: f64, n: usize) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let k = ctx.cfg.se_multiple;
    let direct: Vec<f64> = besq_draws(ctx.seed("direct"), n, 1.0, t, &p)
        .into_iter()
        .map(|v| f64::from(u8::from(v >= b)))
        .collect();
    let via_hit = |step: f64, label: &str| {
        let v = draws(ctx.seed(label), n, |rng| {
            let scan = scan_for_hit(1.0, y, &truth, step, t, rng);
            match scan.time {
                Some(tau) if tau <= t => f64::from(u8::from(transition(1.0, (t - tau) / y, &truth, rng) >= b / y)),
                _ => 0.0,
            }
        });
        mean_and_se(&v)
    };
    let h = ctx.cfg.hitting_step;
    let (pd, sd) = mean_and_se(&direct);
    let (p1, s1) = via_hit(h, "step");
    let (p2, s2) = via_hit(h / 2.0, "half_step");
    Ok(combine(vec![
        ("identity", estimates_agree(pd, sd, p1, s1, n as u64, k)),
        ("half_step", estimates_agree(p1, s1, p2, s2, n as u64, k)),
    ])
    .with_detail("y", y)
    .with_detail("b", b)
    .with_detail("t", t)
    .with_detail("step", h))
}

fn refprinc(ctx: &Ctx) -> Result<TestResult> {
    reflection_check(ctx, 1.5, 2.5, 1.0, 0.0, ctx.cfg.n_hitting)
}

/// `R(alpha tau_y) / y ~ R'(tau'_y (alpha - 1) / y)` with `R'` and `tau'`
/// independent.
fn stop_time(ctx: &Ctx) -> Result<TestResult> {
    let (y, alpha, mu) = (2.0, 1.5, 0.0);
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let c = ctx.cfg;
    let lhs: Vec<f64> = draws(ctx.seed("lhs"), c.n_hitting, |rng| {
        scaled_stop_time_sample(y, alpha, &p, c.hitting_step, c.hitting_cap, rng)
    })
    .into_iter()
    .flatten()
    .map(|h| h.value / y)
    .collect();
    let rhs: Vec<f64> = draws(ctx.seed("rhs"), c.n_hitting, |rng| {
        let scan = scan_for_hit(1.0, y, &truth, c.hitting_step, c.hitting_cap, rng);
        scan.time.map(|tau| transition(1.0, tau * (alpha - 1.0) / y, &truth, rng))
    })
    .into_iter()
    .flatten()
    .collect();
    Ok(ks_two_sample(&lhs, &rhs, c.alpha)?
        .with_detail("y", y)
        .with_detail("alpha_scale", alpha)
        .with_detail("step", c.hitting_step))
}

/// `R(t + s)` equals a BESQ run for `s` from `R(t)`.
fn plus(ctx: &Ctx) -> Result<TestResult> {
    let (t, s, mu) = (0.7, 0.5, 0.0);
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let n = ctx.cfg.n_samples;
    let lhs = draws(ctx.seed("lhs"), n, |rng| {
        let r = transition(1.0, t, &p, rng);
        transition(r, s, &p, rng)
    });
    let rhs = besq_draws(ctx.seed("rhs"), n, 1.0, t + s, &truth);
    Ok(ks_two_sample(&lhs, &rhs, ctx.cfg.alpha)?.with_detail("t", t).with_detail("s", s))
}

/// `E R(t + a R(t)) = (1 + delta a)(1 + delta t)`, and per quantile bin of
/// `R(t)`, `E[R(t + a R(t)) - (1 + delta a) R(t) | bin] = 0`.
pub(crate) fn cond_moment_check(ctx: &Ctx, t: f64, a: f64, mu: f64, n: usize) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let delta = truth.delta();
    let k = ctx.cfg.se_multiple;
    let pairs = try_draws(ctx.seed("pairs"), n, |rng| {
        bessel_time_sample(t, &[0.0, a], &p, rng).map(|s| (s.r_t, s.x_values[1] * s.r_t))
    })?;
    let late: Vec<f64> = pairs.iter().map(|(_, v)| *v).collect();
    let target = (1.0 + delta * a) * (1.0 + delta * t);
    let mut parts = vec![("overall".to_string(), mean_within_se(&late, target, k)?)];
    let mut r_sorted: Vec<f64> = pairs.iter().map(|(r, _)| *r).collect();
    r_sorted.sort_by(f64::total_cmp);
    let bins = 5;
    let cuts: Vec<f64> = (1..bins).map(|j| r_sorted[j * n / bins]).collect();
    for b in 0..bins {
        let diffs: Vec<f64> = pairs
            .iter()
            .filter(|(r, _)| cuts.partition_point(|c| c <= r) == b)
            .map(|(r, v)| v - (1.0 + delta * a) * r)
            .collect();
        parts.push((format!("bin{b}"), mean_within_se(&diffs, 0.0, k)?));
    }
    let named: Vec<(&str, TestResult)> = parts.iter().map(|(s, r)| (s.as_str(), r.clone())).collect();
    Ok(combine(named)
        .with_detail("t", t)
        .with_detail("a", a)
        .with_detail("delta", delta)
        .with_detail("target", target))
}

fn cond_moment(ctx: &Ctx) -> Result<TestResult> {
    cond_moment_check(ctx, 1.0, 0.5, 0.0, ctx.cfg.n_moment)
}

/// Monte Carlo `Cov(X(t, a), R(t + a))` against the quadrature formula.
pub(crate) fn covariance_check(ctx: &Ctx, t: f64, a: f64, mu: f64, n: usize) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let pairs = try_draws(ctx.seed("pairs"), n, |rng| correlated_pair_sample(t, a, &p, rng))?;
    let nf = n as f64;
    let mc = pairs.iter().map(|s| s.check_r).sum::<f64>() / nf;
    let mu_ = pairs.iter().map(|s| s.u).sum::<f64>() / nf;
    let products: Vec<f64> = pairs.iter().map(|s| (s.check_r - mc) * (s.u - mu_)).collect();
    let (cov, se) = mean_and_se(&products);
    let cov = cov * nf / (nf - 1.0);
    let formula = pair_covariance_formula(t, a, &truth)?;
    Ok(estimates_agree(cov, se, formula, 0.0, n as u64, ctx.cfg.se_multiple)
        .with_detail("t", t)
        .with_detail("a", a)
        .with_detail("delta", truth.delta()))
}

fn pair_cov(ctx: &Ctx) -> Result<TestResult> {
    covariance_check(ctx, 1.0, 1.0, 0.0, ctx.cfg.n_moment)
}

/// Joint-law identity for `f = g = exp(-x)`.
pub(crate) fn triple_check(ctx: &Ctx, t: f64, a: f64, mu: f64, n: usize) -> Result<TestResult> {
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let (f, g) = (TestFn::Exp, TestFn::Exp);
    let tested = triple_identity_check(f, g, t, a, &p, n, ctx.seed("triple"))?;
    let reference = if ctx.mutated() {
        triple_identity_check(f, g, t, a, &truth, n, ctx.seed("triple"))?
    } else {
        tested
    };
    Ok(estimates_agree(tested.lhs, tested.se, reference.rhs, 0.0, n as u64, ctx.cfg.se_multiple)
        .with_detail("t", t)
        .with_detail("a", a)
        .with_detail("mu", mu)
        .with_detail("f", "exp(-x)")
        .with_detail("g", "exp(-x)"))
}

fn triple(ctx: &Ctx) -> Result<TestResult> {
    triple_check(ctx, 1.0, 1.0, 0.0, ctx.cfg.n_moment)
}

pub(crate) fn time_inversion(ctx: &Ctx, t: f64, a: f64) -> Result<TestResult> {
    let mu = 0.0;
    let (p, truth) = (ctx.tested(mu)?, ctx.truth(mu)?);
    let n = ctx.cfg.n_samples;
    let (lhs, _) = time_inversion_samples(t, a, &p, n, ctx.seed("inv"))?;
    let (_, rhs) = time_inversion_samples(t, a, &truth, n, ctx.seed("inv"))?;
    Ok(ks_two_sample(&lhs, &rhs, ctx.cfg.alpha)?.with_detail("t", t).with_detail("a", a))
}

/// `A_{h+s} = A_h + exp(2 B_h + 2 mu h) A^_s` on simulated clock paths.
fn gbm_decomp(ctx: &Ctx) -> Result<TestResult> {
    let (mu, step, horizon) = (0.3, 1e-3, 1.0);
    let worst = try_draws(ctx.seed("paths"), 200, |rng| {
        let path = simulate_gbm_clock(mu, step, horizon, rng)?;
        [250, 500, 750]
            .iter()
            .map(|&h| clock_decomposition_error(&path, h))
            .try_fold(0.0f64, |m, e| e.map(|e| m.max(e)))
    })?
    .into_iter()
    .fold(0.0, f64::max);
    let tol = 1e-10;
    Ok(TestResult::new("max_relative_gap", worst, tol, 200, worst < tol)
        .with_detail("mu", mu)
        .with_detail("step", step))
}

/// `s = 0`: `exp(2 B_t + 2 mu t)` from the clock construction is lognormal.
pub(crate) fn lamperti_s0_check(ctx: &Ctx, t: f64, mu: f64) -> Result<TestResult> {
    let c = ctx.cfg;
    let out = lamperti_identity_samples(t, 0.0, mu + ctx.delta_shift / 2.0, c.clock_step, c.n_samples, ctx.seed("clock"))?;
    let law = LogNormal::new(2.0 * mu * t, 2.0 * t.sqrt()).map_err(|e| Error::TestInput(e.to_string()))?;
    Ok(ks_one_sample(&out.lhs, |x| law.cdf(x), c.alpha)?
        .with_detail("t", t)
        .with_detail("mu", mu))
}

fn lamperti_s0(ctx: &Ctx) -> Result<TestResult> {
    lamperti_s0_check(ctx, 0.5, 0.0)
}

/// `R(A_t + s) ~ R'^{W'}(s)` with an independent lognormal start `W'`.
pub(crate) fn lamperti_check(ctx: &Ctx, t: f64, s: f64, mu: f64) -> Result<TestResult> {
    let c = ctx.cfg;
    let seed = ctx.seed("clock");
    let tested = lamperti_identity_samples(t, s, mu + ctx.delta_shift / 2.0, c.clock_step, c.n_samples, seed)?;
    let rhs = if ctx.mutated() {
        lamperti_identity_samples(t, s, mu, c.clock_step, c.n_samples, seed)?.rhs
    } else {
        tested.rhs.clone()
    };
    Ok(ks_two_sample(&tested.lhs, &rhs, c.alpha)?
        .with_detail("t", t)
        .with_detail("s", s)
        .with_detail("mu", mu)
        .with_detail("clock_capped", tested.fallbacks))
}

fn lamperti(ctx: &Ctx) -> Result<TestResult> {
    lamperti_check(ctx, 0.5, 0.5, 0.0)
}

fn sup_check(kind: &str, value: f64, tol: f64, n: usize) -> TestResult {
    TestResult::new(kind, value, tol, n as u64, value < tol)
}

/// Hitting-density checks at `(y, mu) = (1.5, 0)`: equation residual off the
/// collocation points, anchor invariance, agreement with the Laplace route,
/// and total mass (also at `(0.25, 1)`).
pub(crate) fn distr_check(n_steps: usize) -> Result<TestResult> {
    let (y, mu, t_max) = (1.5, 0.0, 6.0);
    let main = solve_hitting_density_direct(y, mu, t_max, n_steps, default_anchor(y))?;
    let off_grid: Vec<f64> = (0..500).map(|i| 0.0123 + i as f64 * 0.01187).collect();
    let residual = volterra_residual(&main, &off_grid)?.into_iter().fold(0.0, f64::max);

    let near = solve_hitting_density_direct(y, mu, t_max, n_steps, 1.5 * y)?;
    let far = solve_hitting_density_direct(y, mu, t_max, n_steps, 2.5 * y)?;
    let fine: Vec<f64> = (0..=6000).map(|i| i as f64 * 1e-3).collect();
    let anchor = sup_distance(&near, &far, &fine);

    let log_grid: Vec<f64> = (0..=80).map(|i| 0.05 * 100f64.powf(i as f64 / 80.0)).collect();
    let lap = solve_hitting_density_laplace(y, mu, &log_grid, default_anchor(y))?;
    let laplace = log_grid
        .iter()
        .zip(&lap.g_values)
        .map(|(t, g)| (main.value_at(*t) - g).abs())
        .fold(0.0, f64::max);

    let mass = (main.mass + main.diagnostics.tail_estimate - hitting_probability_total(y, mu)?).abs();
    let low = solve_hitting_density_direct(0.25, 1.0, 50.0, n_steps, default_anchor(0.25))?;
    let low_mass = (low.mass + low.diagnostics.tail_estimate - hitting_probability_total(0.25, 1.0)?).abs();

    Ok(combine(vec![
        ("residual", sup_check("relative_residual", residual, 1e-3, off_grid.len())),
        ("anchor_invariance", sup_check("sup_norm", anchor, 1e-2, fine.len())),
        ("laplace_agreement", sup_check("sup_norm", laplace, 1e-2, log_grid.len())),
        ("mass", sup_check("abs_error", mass, 1e-2, 1)),
        ("mass_transient", sup_check("abs_error", low_mass, 1e-2, 1)),
    ])
    .with_detail("n_steps", n_steps))
}

fn sup_distance(a: &HittingDensity, b: &HittingDensity, times: &[f64]) -> f64 {
    times
        .iter()
        .map(|t| (a.value_at(*t) - b.value_at(*t)).abs())
        .fold(0.0, f64::max)
}

fn distr(ctx: &Ctx) -> Result<TestResult> {
    distr_check(ctx.cfg.solver_steps)
}

/// Started at the level itself, the level is reached by any time `t`:
/// `P(tau_1 <= t | R(t) = x) = 1`.
pub(crate) fn final_cor_check(xs: &[f64], ts: &[f64]) -> Result<TestResult> {
    let t_max = ts.iter().copied().fold(0.0, f64::max) * 2.0;
    let d = solve_hitting_density_direct(1.0, 0.0, t_max, 200, default_anchor(1.0))?;
    let mut worst = 0.0f64;
    for &x in xs {
        for &t in ts {
            let c = conditional_hitting_cdf(1.0, t, t, x, &d, 0.0)?;
            worst = worst.max((c.value - 1.0).abs());
        }
    }
    Ok(sup_check("max_abs_error", worst, 1e-3, xs.len() * ts.len())
        .with_detail("x", xs.to_vec())
        .with_detail("t", ts.to_vec()))
}

fn final_cor(_ctx: &Ctx) -> Result<TestResult> {
    final_cor_check(&[1.0, 2.0, 5.0], &[0.5, 1.0])
}
