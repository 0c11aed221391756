//! Prints one PASS/FAIL line per acceptance criterion. Exits nonzero if any
//! criterion fails other than those listed in `KNOWN_FALSE`.

use std::process::Command;
use std::time::Instant;

use besq_core::bessel_time::{
    bessel_time_sample, correlated_pair_sample, lamperti_identity_samples, pair_covariance_formula, post_hit_sample,
    time_inversion_samples, triple_identity_check, TestFn,
};
use besq_core::hitting::{
    conditional_hitting_cdf, default_anchor, hitting_probability_total, mc_conditional_hitting_cdf, mc_hitting_cdf,
    solve_hitting_density_direct, solve_hitting_density_laplace, volterra_residual,
};
use besq_core::mc::draws;
use besq_core::process::{sample_besq_transition, scan_for_hit};
use besq_core::stats::{chi_square_independence, estimates_agree, ks_one_sample, ks_two_sample, mean_and_se, mean_within_se};
use besq_core::{HittingDensity, Params, Result};
use statrs::distribution::{ContinuousCDF, LogNormal};

/// Criteria whose statement does not hold for the process; they are run and
/// reported but do not fail the target.
const KNOWN_FALSE: &[usize] = &[11];

type Check = fn() -> Result<(bool, String)>;

const ALPHA: f64 = 0.01;
const N: usize = 100_000;

fn params(mu: f64) -> Params {
    Params::from_mu(mu, 1.0).unwrap()
}

fn besq(seed: u64, n: usize, x: f64, t: f64, mu: f64) -> Vec<f64> {
    let p = params(mu);
    draws(seed, n, |rng| sample_besq_transition(x, t, &p, rng).unwrap())
}

fn x_at(seed: u64, n: usize, t: f64, a: &[f64], mu: f64) -> Vec<Vec<f64>> {
    let p = params(mu);
    draws(seed, n, |rng| {
        let s = bessel_time_sample(t, a, &p, rng).unwrap();
        let mut v = s.x_values;
        v.push(s.r_t);
        v
    })
}

fn c1() -> Result<(bool, String)> {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, (t, a, mu)) in [(0.7, 0.5, 0.0), (2.0, 1.0, 1.0), (1.0, 0.25, 0.5)].into_iter().enumerate() {
        let k = k as u64;
        let x: Vec<f64> = x_at(100 + k, N, t, &[0.0, a], mu).into_iter().map(|v| v[1]).collect();
        let r = ks_two_sample(&x, &besq(200 + k, N, 1.0, a, mu), ALPHA)?;
        ok &= r.passed;
        notes.push(format!("({t},{a},{mu}) D={:.4}/{:.4}", r.statistic, r.critical_value));
    }
    Ok((ok, notes.join(" ")))
}

fn c2() -> Result<(bool, String)> {
    let mut rejections = 0;
    let mut first = 0.0;
    for seed in 0..20u64 {
        let v = x_at(300 + seed, N, 1.0, &[0.0, 1.0], 0.0);
        let r: Vec<f64> = v.iter().map(|s| s[2]).collect();
        let x: Vec<f64> = v.iter().map(|s| s[1]).collect();
        let res = chi_square_independence(&r, &x, 5, ALPHA)?;
        if seed == 0 {
            first = res.statistic;
        }
        rejections += usize::from(!res.passed);
    }
    let rate = rejections as f64 / 20.0;
    Ok((rate <= 0.05, format!("rejections {rejections}/20, first chi2={first:.2}")))
}

fn c3() -> Result<(bool, String)> {
    let (t, a1, a2) = (1.0, 0.3, 0.9);
    let v = x_at(400, N, t, &[0.0, a1, a2], 0.0);
    let first: Vec<f64> = v.iter().map(|s| s[1]).collect();
    let ratio: Vec<f64> = v.iter().map(|s| s[2] / s[1]).collect();
    let p = params(0.0);
    let reference = draws(401, N, |rng| {
        let r1 = sample_besq_transition(1.0, a1, &p, rng).unwrap();
        let r2 = sample_besq_transition(r1, a2 - a1, &p, rng).unwrap();
        (r1, r2 / r1)
    });
    let (r1, rr): (Vec<f64>, Vec<f64>) = reference.into_iter().unzip();
    let k1 = ks_two_sample(&first, &r1, ALPHA)?;
    let k2 = ks_two_sample(&ratio, &rr, ALPHA)?;
    Ok((
        k1.passed && k2.passed,
        format!("X(1,0.3) D={:.4}, ratio D={:.4}, critical {:.4}", k1.statistic, k2.statistic, k1.critical_value),
    ))
}

fn c4() -> Result<(bool, String)> {
    let late: Vec<f64> = x_at(500, 1_000_000, 1.0, &[0.0, 0.5], 0.0)
        .into_iter()
        .map(|s| s[1] * s[2])
        .collect();
    let r = mean_within_se(&late, 6.0, 3.0)?;
    Ok((r.passed, format!("mean {:.4} vs 6, |z|={:.2}", r.details["mean"].as_f64().unwrap_or(f64::NAN), r.statistic)))
}

fn c5() -> Result<(bool, String)> {
    let (t, a, n) = (1.0, 1.0, 1_000_000);
    let p = params(0.0);
    let pairs = draws(600, n, |rng| correlated_pair_sample(t, a, &p, rng).unwrap());
    let nf = n as f64;
    let mc = pairs.iter().map(|s| s.check_r).sum::<f64>() / nf;
    let mu = pairs.iter().map(|s| s.u).sum::<f64>() / nf;
    let prods: Vec<f64> = pairs.iter().map(|s| (s.check_r - mc) * (s.u - mu)).collect();
    let (cov, se) = mean_and_se(&prods);
    let formula = pair_covariance_formula(t, a, &p)?;
    let c = estimates_agree(cov * nf / (nf - 1.0), se, formula, 0.0, n as u64, 3.0);
    let tr = triple_identity_check(TestFn::Exp, TestFn::Exp, t, a, &p, n, 601)?;
    let ok = c.passed && (tr.lhs - tr.rhs).abs() <= 3.0 * tr.se;
    Ok((
        ok,
        format!(
            "cov {cov:.4} vs {formula:.4} (|z|={:.2}); triple {:.5} vs {:.5} (|z|={:.2})",
            c.statistic,
            tr.lhs,
            tr.rhs,
            (tr.lhs - tr.rhs).abs() / tr.se
        ),
    ))
}

fn c6() -> Result<(bool, String)> {
    let (y, b, t, h) = (1.5, 2.5, 1.0, 1e-4);
    let p = params(0.0);
    let direct: Vec<f64> = besq(700, N, 1.0, t, 0.0).iter().map(|v| f64::from(u8::from(*v >= b))).collect();
    let via = |step: f64, seed: u64| {
        let v = draws(seed, N, |rng| {
            match scan_for_hit(1.0, y, &p, step, t, rng).time {
                Some(tau) if tau <= t => {
                    let r = if tau < t { sample_besq_transition(1.0, (t - tau) / y, &p, rng).unwrap() } else { 1.0 };
                    f64::from(u8::from(r >= b / y))
                }
                _ => 0.0,
            }
        });
        mean_and_se(&v)
    };
    let (pd, sd) = mean_and_se(&direct);
    let (p1, s1) = via(h, 701);
    let (p2, s2) = via(h / 2.0, 702);
    let e1 = estimates_agree(pd, sd, p1, s1, N as u64, 3.0);
    let e2 = estimates_agree(p1, s1, p2, s2, N as u64, 3.0);
    Ok((
        e1.passed && e2.passed,
        format!("P(R(1)>=2.5)={pd:.4}, via tau at h: {p1:.4} (|z|={:.2}), at h/2: {p2:.4} (|z|={:.2})", e1.statistic, e2.statistic),
    ))
}

fn c7() -> Result<(bool, String)> {
    let p = params(0.0);
    let (l, r) = time_inversion_samples(1.0, 1.0, &p, N, 800)?;
    let k1 = ks_two_sample(&l, &r, ALPHA)?;
    let t = 2.0;
    let (l, r) = time_inversion_samples(t, 1.0 / t, &p, N, 801)?;
    let k2 = ks_two_sample(&l, &r, ALPHA)?;
    Ok((
        k1.passed && k2.passed,
        format!("(1,1) D={:.4}, a=1/t at t=2 D={:.4}, critical {:.4}", k1.statistic, k2.statistic, k1.critical_value),
    ))
}

fn c8() -> Result<(bool, String)> {
    let (t, mu) = (0.5f64, 0.0);
    let s0 = lamperti_identity_samples(t, 0.0, mu, 1e-3, N, 900)?;
    let law = LogNormal::new(2.0 * mu * t, 2.0 * t.sqrt()).unwrap();
    let k0 = ks_one_sample(&s0.lhs, |x| law.cdf(x), ALPHA)?;
    let s = lamperti_identity_samples(t, 0.5, mu, 1e-3, N, 901)?;
    let k1 = ks_two_sample(&s.lhs, &s.rhs, ALPHA)?;
    Ok((
        k0.passed && k1.passed,
        format!(
            "s=0 vs lognormal D={:.4}/{:.4}; s=0.5 D={:.4}/{:.4} ({} capped clocks)",
            k0.statistic, k0.critical_value, k1.statistic, k1.critical_value, s.fallbacks
        ),
    ))
}

fn sup_on(a: &HittingDensity, b: &HittingDensity, times: impl Iterator<Item = f64>) -> f64 {
    times.map(|t| (a.value_at(t) - b.value_at(t)).abs()).fold(0.0, f64::max)
}

fn c9() -> Result<(bool, String)> {
    let (y, mu, t_max, n) = (1.5, 0.0, 6.0, 512);
    let d = solve_hitting_density_direct(y, mu, t_max, n, default_anchor(y))?;
    let mids: Vec<f64> = d.t_grid.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let residual = volterra_residual(&d, &mids)?.into_iter().fold(0.0, f64::max);

    let near = solve_hitting_density_direct(y, mu, t_max, n, 1.5 * y)?;
    let far = solve_hitting_density_direct(y, mu, t_max, n, 2.5 * y)?;
    let anchor = sup_on(&near, &far, (0..=6000).map(|i| i as f64 * 1e-3));

    let grid: Vec<f64> = (0..=200).map(|i| 0.05 + 4.95 * i as f64 / 200.0).collect();
    let lap = solve_hitting_density_laplace(y, mu, &grid, default_anchor(y))?;
    let laplace = sup_on(&d, &lap, grid.iter().copied());

    let mass_hi = (d.mass + d.diagnostics.tail_estimate - hitting_probability_total(y, mu)?).abs();
    let low = solve_hitting_density_direct(0.25, 1.0, 50.0, 400, default_anchor(0.25))?;
    let mass_lo = (low.mass + low.diagnostics.tail_estimate - hitting_probability_total(0.25, 1.0)?).abs();

    let mc = mc_hitting_cdf(y, mu, t_max, 1e-4, N, 902)?;
    let ks = mc.kolmogorov_distance(|t| d.cdf(t));

    let ok = residual <= 1e-3 && anchor <= 1e-2 && laplace <= 1e-2 && mass_hi <= 1e-2 && mass_lo <= 1e-2 && ks <= 0.02;
    Ok((
        ok,
        format!(
            "(a) residual {residual:.2e} (b) anchor {anchor:.2e} (c) laplace {laplace:.2e} \
             (d) mass error {mass_hi:.2e} at y=1.5, {mass_lo:.2e} at (0.25, mu=1) (e) Kolmogorov {ks:.4}"
        ),
    ))
}

fn c10() -> Result<(bool, String)> {
    let one = solve_hitting_density_direct(1.0, 0.0, 2.0, 200, default_anchor(1.0))?;
    let mut worst = 0.0f64;
    for x in [1.0, 2.0, 5.0] {
        for t in [0.5, 1.0] {
            worst = worst.max((conditional_hitting_cdf(1.0, t, t, x, &one, 0.0)?.value - 1.0).abs());
        }
    }
    let g = solve_hitting_density_direct(1.5, 0.0, 2.0, 400, default_anchor(1.5))?;
    let mut monotone = true;
    for (big_t, x) in [(1.0, 2.0), (2.0, 0.5), (1.5, 4.0)] {
        let mut prev = 0.0;
        for i in 1..=100 {
            let v = conditional_hitting_cdf(1.5, big_t * i as f64 / 100.0, big_t, x, &g, 0.0)?.value;
            monotone &= v >= prev;
            prev = v;
        }
    }
    let value = conditional_hitting_cdf(1.5, 0.5, 1.0, 2.0, &g, 0.0)?.value;
    let mc = mc_conditional_hitting_cdf(1.5, 0.5, 1.0, 2.0, 0.0, 2.5e-4, N, 903)?;
    let gap = (value - mc.estimate).abs();
    Ok((
        worst <= 1e-3 && monotone && gap <= 0.02,
        format!(
            "y=1 max |P-1| {worst:.2e}; monotone {monotone}; (1.5,0.5,1,2): {value:.4} vs MC {:.4} +- {:.4}",
            mc.estimate, mc.se
        ),
    ))
}

fn c11() -> Result<(bool, String)> {
    let (y, p) = (2.0, params(0.0));
    let mut probs = Vec::new();
    for (k, eps) in [0.1, 0.01, 0.001].into_iter().enumerate() {
        let hits = draws(1000 + k as u64, N, |rng| post_hit_sample(y, eps, &p, 1e-4, 50.0, rng).unwrap());
        let near: Vec<f64> = hits.iter().flatten().map(|h| f64::from(u8::from((h.value - y).abs() <= 0.1 * y))).collect();
        probs.push(mean_and_se(&near).0);
    }
    let decreasing = probs.windows(2).all(|w| w[1] < w[0]);
    Ok((
        decreasing,
        format!(
            "P at eps 0.1, 0.01, 0.001: {:.4}, {:.4}, {:.4} (restarting at y, the law is that of |R(eps) - 1| <= 0.1, which tends to 1)",
            probs[0], probs[1], probs[2]
        ),
    ))
}

fn c12() -> Result<(bool, String)> {
    let dir = tempfile::tempdir()?;
    let mut files = Vec::new();
    let mut codes = Vec::new();
    for k in 0..2 {
        let path = dir.path().join(format!("report{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_besq"))
            .args(["verify", "--format", "json", "--out", path.to_str().unwrap()])
            .output()?
            .status;
        codes.push(status.code().unwrap_or(-1));
        files.push(std::fs::read(&path)?);
    }
    let same = files[0] == files[1];
    Ok((
        same && codes == [0, 0],
        format!("identical {same}, exit codes {codes:?}, {} bytes", files[0].len()),
    ))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("marginal law of X(t,a)", c1),
        ("independence of X(t,a) and R(t)", c2),
        ("process law in a", c3),
        ("mean of R(t + a R(t))", c4),
        ("pair covariance and triple identity", c5),
        ("reflection principle", c6),
        ("time inversion", c7),
        ("Lamperti relation", c8),
        ("hitting density", c9),
        ("conditional hitting CDF", c10),
        ("escape after hitting", c11),
        ("verify determinism", c12),
    ];
    let mut unexpected = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let k = i + 1;
        let start = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let status = if passed { "PASS" } else { "FAIL" };
        let tag = if !passed && KNOWN_FALSE.contains(&k) { " (known false)" } else { "" };
        println!("criterion {k:>2} {status}{tag}: {name}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
        if !passed && !KNOWN_FALSE.contains(&k) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
