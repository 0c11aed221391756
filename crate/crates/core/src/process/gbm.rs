//! Brownian motion with drift, its exponential and the additive clock
//! `A_t = int_0^t exp(2 B_u + 2 mu u) du`.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::process::path::{csv_err, read_columns};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct GbmClockPath<T> {
    pub mu: T,
    pub times: Vec<T>,
    pub b_values: Vec<T>,
    pub a_values: Vec<T>,
    pub exp_values: Vec<T>,
}

/// Exact Brownian increments on the grid `k * step` (the last step is cut at
/// `horizon`); `A` by the trapezoid rule.
pub fn simulate_gbm_clock<T: Scalar, R: Rng + ?Sized>(
    mu: T,
    step: T,
    horizon: T,
    rng: &mut R,
) -> Result<GbmClockPath<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(domain("step must be > 0", step));
    }
    if !(horizon >= step) || !horizon.is_finite() {
        return Err(domain("horizon must be >= step", horizon));
    }
    if !mu.is_finite() {
        return Err(domain("mu must be finite", mu));
    }
    // Snap to the grid when horizon is a multiple of step up to rounding.
    let ratio = horizon / step;
    let n = if (ratio - ratio.round()).abs() < T::lit(1e-9) * ratio {
        ratio.round()
    } else {
        ratio.ceil()
    };
    let n = n.to_usize().ok_or_else(|| domain("too many steps", ratio))?;
    let mut times = Vec::with_capacity(n + 1);
    let mut b_values = Vec::with_capacity(n + 1);
    let mut a_values = Vec::with_capacity(n + 1);
    let mut exp_values = Vec::with_capacity(n + 1);
    let two = T::lit(2.0);
    let (mut t, mut b, mut a, mut e) = (T::zero(), T::zero(), T::zero(), T::one());
    times.push(t);
    b_values.push(b);
    a_values.push(a);
    exp_values.push(e);
    for k in 1..=n {
        let next_t = if k == n { horizon } else { T::lit(k as f64) * step };
        let dt = next_t - t;
        b = b + dt.sqrt() * T::sample_standard_normal(rng);
        let next_e = (two * b + two * mu * next_t).exp();
        a = a + dt * (e + next_e) / two;
        t = next_t;
        e = next_e;
        times.push(t);
        b_values.push(b);
        a_values.push(a);
        exp_values.push(e);
    }
    Ok(GbmClockPath {
        mu,
        times,
        b_values,
        a_values,
        exp_values,
    })
}

/// Largest relative gap in `A_{h+s} = A_h + exp(2 B_h + 2 mu h) * A^_s`, where
/// `A^` is the clock of the shifted motion `B_{h+u} - B_h`, rebuilt from
/// scratch by the same trapezoid rule. `h` is the grid time at index `h_index`.
pub fn clock_decomposition_error<T: Scalar>(path: &GbmClockPath<T>, h_index: usize) -> Result<T> {
    if h_index >= path.times.len() {
        return Err(Error::InvalidGrid(format!(
            "index {h_index} outside a path of {} points",
            path.times.len()
        )));
    }
    let two = T::lit(2.0);
    let h = path.times[h_index];
    let b_h = path.b_values[h_index];
    let e_h = (two * b_h + two * path.mu * h).exp();
    let mut a_hat = T::zero();
    let mut prev = T::one();
    let mut worst = T::zero();
    for k in h_index + 1..path.times.len() {
        let u = path.times[k] - h;
        let du = path.times[k] - path.times[k - 1];
        let cur = (two * (path.b_values[k] - b_h) + two * path.mu * u).exp();
        a_hat = a_hat + du * (prev + cur) / two;
        prev = cur;
        let lhs = path.a_values[k];
        let rhs = path.a_values[h_index] + e_h * a_hat;
        worst = worst.max((lhs - rhs).abs() / lhs);
    }
    Ok(worst)
}

impl<T: Scalar> GbmClockPath<T> {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "b", "a", "exp"]).map_err(csv_err)?;
        for i in 0..self.times.len() {
            w.write_record([
                self.times[i].to_string(),
                self.b_values[i].to_string(),
                self.a_values[i].to_string(),
                self.exp_values[i].to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `t,b,a,exp`; the drift is not stored in the file and must be given.
    pub fn read_csv<R: Read>(input: R, mu: T) -> Result<Self> {
        let cols = read_columns(input, &["t", "b", "a", "exp"])?;
        let conv = |c: &Vec<f64>| c.iter().map(|v| T::lit(*v)).collect::<Vec<T>>();
        Ok(Self {
            mu,
            times: conv(&cols[0]),
            b_values: conv(&cols[1]),
            a_values: conv(&cols[2]),
            exp_values: conv(&cols[3]),
        })
    }
}
