#![allow(dead_code)]

use besq_core::quad::{integrate, GaussLegendre, Tolerance};

/// One-sample KS distance between `samples` and the distribution with the
/// given density on `[0, inf)`. The CDF is accumulated by quadrature between
/// consecutive sorted samples.
pub fn ks_one_sample_density<F: Fn(f64) -> f64>(samples: &[f64], density: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let rule = GaussLegendre::new(8);
    let tol = Tolerance::new(1e-12, 1e-10);
    let mut cdf = integrate(&density, 0.0, s[0], tol).unwrap().value;
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for i in 0..s.len() {
        if i > 0 {
            cdf += rule.integrate(&density, s[i - 1], s[i]);
        }
        d = d.max((cdf - i as f64 / n).abs()).max(((i + 1) as f64 / n - cdf).abs());
    }
    d
}

/// One-sample KS distance against an explicit CDF.
pub fn ks_one_sample_cdf<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0f64, |d, (i, x)| {
        let c = cdf(*x);
        d.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs())
    })
}

/// `c(0.01) / sqrt(n)`.
pub fn ks_critical_one_sample(n: usize) -> f64 {
    1.627_624 / (n as f64).sqrt()
}

/// Thirty-term ascending series for `I_mu(z)`, with `Gamma` from the
/// recurrence; valid for integer and half-integer orders.
pub fn bessel_i_series(mu: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..30 {
        let k = k as f64;
        sum += (z / 2.0).powf(2.0 * k + mu) / (gamma(k + 1.0) * gamma(k + mu + 1.0));
    }
    sum
}

pub fn gamma(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        1.0
    } else if x == 0.5 {
        std::f64::consts::PI.sqrt()
    } else if x > 2.0 || x == 1.5 {
        (x - 1.0) * gamma(x - 1.0)
    } else {
        panic!("gamma oracle covers integers and half-integers only: {x}")
    }
}
