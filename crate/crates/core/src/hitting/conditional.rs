use serde::{Deserialize, Serialize};

use super::{q, HittingDensity};
use crate::error::{domain, Error, Result};
use crate::mc::draws;
use crate::process::{scan_for_hit, BesqParams};
use crate::quad::{integrate, Tolerance};
use crate::stats::mean_and_se;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCdf {
    /// Probability after clipping to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    /// `|raw - value|`.
    pub clipped: f64,
}

/// `P(tau_y <= t | R(T) = x) = (1/q_T(1,x)) int_0^t q_{T-z}(y, x) g(z) dz`
/// for the piecewise-linear interpolant of `g` plus its atom at 0.
pub fn conditional_hitting_cdf(
    y: f64,
    t: f64,
    big_t: f64,
    x: f64,
    g: &HittingDensity,
    mu: f64,
) -> Result<ConditionalCdf> {
    if !(t > 0.0) || !(t <= big_t) || !big_t.is_finite() {
        return Err(domain("need 0 < t <= T", t));
    }
    if !(x > 0.0) {
        return Err(domain("conditioning value x must be > 0", x));
    }
    if y != g.y || mu != g.mu {
        return Err(Error::Config(format!(
            "density was solved for (y, mu) = ({}, {}), not ({y}, {mu})",
            g.y, g.mu
        )));
    }
    if t > g.t_max() * (1.0 + 1e-12) {
        return Err(Error::GridCoverage {
            needed: t,
            ends_at: g.t_max(),
        });
    }
    let p = BesqParams::from_mu(mu, 1.0)?;
    let (ts, gs) = g.with_origin();
    let tol = Tolerance::new(1e-15, 1e-10);
    let mut acc = g.atom * q(big_t, y, x, &p);
    for e in 1..ts.len() {
        let (lo, hi) = (ts[e - 1], ts[e]);
        if lo >= t {
            break;
        }
        let top = hi.min(t);
        let interp = |z: f64| gs[e - 1] + (gs[e] - gs[e - 1]) * (z - lo) / (hi - lo);
        let piece = if top >= big_t {
            // z = T - (T - lo) v^2 absorbs the 1/sqrt(T - z) spike of
            // q_{T-z}(y, y).
            let w = big_t - lo;
            integrate(
                |v: f64| {
                    let z = big_t - w * v * v;
                    2.0 * w * v * q(big_t - z, y, x, &p) * interp(z)
                },
                0.0,
                1.0,
                tol,
            )?
        } else {
            integrate(|z| q(big_t - z, y, x, &p) * interp(z), lo, top, tol)?
        };
        acc += piece.value;
    }
    let raw = acc / q(big_t, 1.0, x, &p);
    let value = raw.clamp(0.0, 1.0);
    Ok(ConditionalCdf {
        value,
        raw,
        clipped: (raw - value).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEstimate {
    pub estimate: f64,
    pub se: f64,
    pub n: usize,
}

/// Monte Carlo estimate of `P(tau_y <= t | R(T) = x)`.
///
/// Paths from 1 run on the grid `k * step` until the crossing is detected or
/// `t` is reached. Each is weighted by the exact density of reaching `x` at
/// `T` from where it stopped, and the estimate is the weighted hit fraction.
#[allow(clippy::too_many_arguments)]
pub fn mc_conditional_hitting_cdf(
    y: f64,
    t: f64,
    big_t: f64,
    x: f64,
    mu: f64,
    step: f64,
    n: usize,
    seed: u64,
) -> Result<ConditionalEstimate> {
    if !(t > 0.0) || !(t < big_t) || !big_t.is_finite() {
        return Err(domain("need 0 < t < T", t));
    }
    if !(x > 0.0) || !(y > 0.0) {
        return Err(domain("levels must be > 0", x.min(y)));
    }
    if !(step > 0.0) {
        return Err(domain("step must be > 0", step));
    }
    if n < 2 {
        return Err(Error::TestInput("need at least 2 paths".into()));
    }
    let p = BesqParams::from_mu(mu, 1.0)?;
    let pairs = draws(seed, n, |rng| {
        let scan = scan_for_hit(1.0, y, &p, step, t, rng);
        let w = q(big_t - scan.stop_time, scan.stop_value, x, &p);
        (w, if scan.time.is_some() { w } else { 0.0 })
    });
    let den: f64 = pairs.iter().map(|(w, _)| w).sum();
    let num: f64 = pairs.iter().map(|(_, h)| h).sum();
    if !(den > 0.0) {
        return Err(Error::TestInput("all conditioning weights vanished".into()));
    }
    let r = num / den;
    let mean_w = den / n as f64;
    let resid: Vec<f64> = pairs.iter().map(|(w, h)| (h - r * w) / mean_w).collect();
    let (_, se) = mean_and_se(&resid);
    Ok(ConditionalEstimate { estimate: r, se, n })
}
