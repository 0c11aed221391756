use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::mc::draws;
use crate::process::{scan_for_hit, BesqParams};

/// Empirical law of grid-detected hitting times of `y` from 1, censored at
/// `t_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McHittingCdf {
    pub y: f64,
    pub mu: f64,
    pub t_max: f64,
    pub step: f64,
    pub n: usize,
    /// Sorted crossing times of the paths that hit by `t_max`.
    pub hit_times: Vec<f64>,
}

impl McHittingCdf {
    pub fn cdf(&self, t: f64) -> f64 {
        self.hit_times.partition_point(|v| *v <= t) as f64 / self.n as f64
    }

    /// Fraction of paths that had not hit by `t_max`.
    pub fn censored_fraction(&self) -> f64 {
        1.0 - self.hit_times.len() as f64 / self.n as f64
    }

    /// `sup_t |F_n(t) - F(t)|` over `[0, t_max]`, checked on both sides of
    /// every jump and at `t_max`.
    pub fn kolmogorov_distance<F: FnMut(f64) -> f64>(&self, mut cdf: F) -> f64 {
        let n = self.n as f64;
        let mut d = 0.0f64;
        for (i, &t) in self.hit_times.iter().enumerate() {
            let f = cdf(t);
            d = d.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
        }
        d.max((cdf(self.t_max) - self.cdf(self.t_max)).abs())
    }
}

/// Simulates `n` paths from 1 on the grid `k * step` up to `t_max`.
pub fn mc_hitting_cdf(y: f64, mu: f64, t_max: f64, step: f64, n: usize, seed: u64) -> Result<McHittingCdf> {
    if !(y > 0.0) {
        return Err(domain("level y must be > 0", y));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(domain("t_max must be finite and > 0", t_max));
    }
    if !(step > 0.0 && step <= t_max) {
        return Err(domain("step must be in (0, t_max]", step));
    }
    if n == 0 {
        return Err(Error::TestInput("need at least one path".into()));
    }
    let p = BesqParams::from_mu(mu, 1.0)?;
    let mut hit_times: Vec<f64> = draws(seed, n, |rng| scan_for_hit(1.0, y, &p, step, t_max, rng).time)
        .into_iter()
        .flatten()
        .collect();
    hit_times.sort_by(f64::total_cmp);
    Ok(McHittingCdf {
        y,
        mu,
        t_max,
        step,
        n,
        hit_times,
    })
}
