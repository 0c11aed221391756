//! First-hitting-time density of BESQ(mu) started at 1.
//!
//! For a level `y` and an anchor `x` on the far side of `y` from the start,
//! every path to `x` passes through `y`, so by the strong Markov property and
//! scaling
//!
//! ```text
//! q_t(1, x) = (1/y) int_0^t q_{(t-z)/y}(1, x/y) g_y(z) dz .
//! ```
//!
//! This is a first-kind convolution equation for `g_y`. Two solvers are
//! provided: direct collocation in the time domain and division in the
//! Laplace domain followed by Gaver–Stehfest inversion.

mod conditional;
mod direct;
mod laplace;
mod montecarlo;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::process::density::log_q_unchecked;
use crate::process::path::{csv_err, read_columns};
use crate::process::BesqParams;

pub use conditional::{conditional_hitting_cdf, mc_conditional_hitting_cdf, ConditionalCdf, ConditionalEstimate};
pub use direct::{solve_hitting_density_direct, volterra_residual, DirectOptions};
pub use laplace::{
    gaver_stehfest_coefficients, gaver_stehfest_invert, laplace_transform_numeric, solve_hitting_density_kernel,
    solve_hitting_density_laplace, LaplaceKernel, DEFAULT_GS_TERMS,
};
pub use montecarlo::{mc_hitting_cdf, McHittingCdf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    VolterraDirect,
    Laplace,
    /// The resolvent-kernel formula `g = dq/dt + K * dq/dt`, rescaled by a
    /// constant fitted against the direct solver.
    LaplaceKernel,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::VolterraDirect => "volterra-direct",
            Method::Laplace => "laplace",
            Method::LaplaceKernel => "laplace-kernel",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" | "volterra-direct" => Ok(Method::VolterraDirect),
            "laplace" => Ok(Method::Laplace),
            "kernel" | "laplace-kernel" => Ok(Method::LaplaceKernel),
            other => Err(Error::Config(format!(
                "unknown method `{other}` (expected direct, laplace or kernel)"
            ))),
        }
    }
}

/// Solver diagnostics, carried into the JSON sidecar.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Mass removed by clipping negative density values to zero.
    pub clipped_mass: f64,
    /// Most negative raw value before clipping.
    pub min_raw: f64,
    /// Estimated mass beyond the last grid time.
    pub tail_estimate: f64,
    /// Largest relative Volterra residual between collocation points.
    pub residual_max: Option<f64>,
    /// Numerical rank of the collocation matrix, and its column count.
    pub rank: Option<usize>,
    pub unknowns: Option<usize>,
    /// Largest relative 12-vs-14-term Gaver–Stehfest difference.
    pub gs_sensitivity_max: Option<f64>,
    /// Grid times where that difference exceeds 1e-3.
    pub gs_unstable_times: Vec<f64>,
    /// Constant by which the kernel formula was rescaled.
    pub fitted_constant: Option<f64>,
    /// Sup-distance between the rescaled kernel formula and the direct solution.
    pub kernel_discrepancy: Option<f64>,
    pub notes: Vec<String>,
}

/// `g_y` on a time grid, with the solver's metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingDensity {
    pub y: f64,
    pub mu: f64,
    pub anchor_x: f64,
    pub method: Method,
    pub t_grid: Vec<f64>,
    pub g_values: Vec<f64>,
    /// Probability mass at `t = 0`, nonzero only when the level is the
    /// starting point.
    #[serde(default)]
    pub atom: f64,
    /// Mean grid spacing.
    pub step: f64,
    /// `atom + int g` over the grid.
    pub mass: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    y: f64,
    mu: f64,
    anchor_x: f64,
    method: &'a str,
    atom: f64,
    step: f64,
    mass: f64,
    diagnostics: &'a Diagnostics,
}

impl HittingDensity {
    /// Piecewise-linear value; zero outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let (ts, gs) = self.with_origin();
        if ts.len() < 2 || t < ts[0] || t > ts[ts.len() - 1] {
            return 0.0;
        }
        let j = ts.partition_point(|v| *v <= t).clamp(1, ts.len() - 1);
        let (a, b) = (ts[j - 1], ts[j]);
        let w = (t - a) / (b - a);
        gs[j - 1] * (1.0 - w) + gs[j] * w
    }

    /// `atom + int_0^t g` for the piecewise-linear density, linear from
    /// `(0, 0)` to the first grid point.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let (ts, gs) = self.with_origin();
        let mut acc = self.atom;
        for j in 1..ts.len() {
            let (a, b) = (ts[j - 1], ts[j]);
            if t <= a {
                break;
            }
            if t >= b {
                acc += 0.5 * (gs[j - 1] + gs[j]) * (b - a);
            } else {
                let gt = gs[j - 1] + (gs[j] - gs[j - 1]) * (t - a) / (b - a);
                acc += 0.5 * (gs[j - 1] + gt) * (t - a);
            }
        }
        acc
    }

    pub(crate) fn with_origin(&self) -> (Vec<f64>, Vec<f64>) {
        if self.t_grid.first().is_some_and(|t| *t > 0.0) {
            let mut ts = vec![0.0];
            ts.extend_from_slice(&self.t_grid);
            let mut gs = vec![0.0];
            gs.extend_from_slice(&self.g_values);
            (ts, gs)
        } else {
            (self.t_grid.clone(), self.g_values.clone())
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_grid.last().copied().unwrap_or(0.0)
    }

    /// CSV `t,g`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "g"]).map_err(csv_err)?;
        for (t, g) in self.t_grid.iter().zip(&self.g_values) {
            w.write_record([t.to_string(), g.to_string()]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `t,g` columns back; metadata comes from the caller.
    pub fn read_csv_values<R: Read>(input: R) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut cols = read_columns(input, &["t", "g"])?;
        let g = cols.pop().unwrap_or_default();
        let t = cols.pop().unwrap_or_default();
        Ok((t, g))
    }

    /// JSON sidecar `{y, mu, anchor_x, method, atom, step, mass, diagnostics}`.
    pub fn sidecar_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&Sidecar {
            y: self.y,
            mu: self.mu,
            anchor_x: self.anchor_x,
            method: self.method.as_str(),
            atom: self.atom,
            step: self.step,
            mass: self.mass,
            diagnostics: &self.diagnostics,
        })?)
    }
}

/// `(1/y) q_{s/y}(1, x/y)`, the convolution kernel of the hitting equation.
pub fn volterra_kernel(s: f64, y: f64, anchor_x: f64, mu: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(domain("kernel time s must be > 0", s));
    }
    check_level(y)?;
    if !(anchor_x > 0.0) {
        return Err(domain("anchor x must be > 0", anchor_x));
    }
    let p = BesqParams::from_mu(mu, 1.0)?;
    Ok(kernel_unchecked(s, y, anchor_x, &p))
}

#[inline]
pub(crate) fn kernel_unchecked(s: f64, y: f64, anchor_x: f64, p: &BesqParams<f64>) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    log_q_unchecked(1.0, anchor_x / y, s / y, p).exp() / y
}

/// `q_t(x, y)` without argument checks; zero for `t <= 0`.
#[inline]
pub(crate) fn q(t: f64, from: f64, to: f64, p: &BesqParams<f64>) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    log_q_unchecked(from, to, t, p).exp()
}

/// `P_1(tau_y < inf)`: `y^mu` below the start when `mu > 0`, else 1.
pub fn hitting_probability_total(y: f64, mu: f64) -> Result<f64> {
    check_level(y)?;
    if !(mu >= 0.0) {
        return Err(domain("index mu must be >= 0", mu));
    }
    Ok(if y >= 1.0 || mu == 0.0 { 1.0 } else { y.powf(mu) })
}

/// Default anchor: `2y` above the start, `y/2` below it.
pub fn default_anchor(y: f64) -> f64 {
    if y >= 1.0 {
        2.0 * y
    } else {
        0.5 * y
    }
}

/// The anchor must lie strictly beyond `y` as seen from the start at 1, so
/// that every path from 1 to the anchor crosses `y`.
pub fn check_anchor(y: f64, anchor_x: f64) -> Result<()> {
    check_level(y)?;
    if !(anchor_x > 0.0) || !anchor_x.is_finite() {
        return Err(domain("anchor x must be finite and > 0", anchor_x));
    }
    let beyond = if y > 1.0 {
        anchor_x > y
    } else if y < 1.0 {
        anchor_x < y
    } else {
        anchor_x != y
    };
    if beyond {
        Ok(())
    } else if y >= 1.0 {
        Err(domain("anchor x must be strictly greater than y for y >= 1", anchor_x))
    } else {
        Err(domain("anchor x must be strictly less than y for y < 1", anchor_x))
    }
}

fn check_level(y: f64) -> Result<()> {
    if y > 0.0 && y.is_finite() {
        Ok(())
    } else {
        Err(domain("level y must be finite and > 0", y))
    }
}

/// Clips negative values, returning the clipped mass (trapezoid) and the
/// most negative value.
pub(crate) fn clip_negative(ts: &[f64], gs: &mut [f64]) -> (f64, f64) {
    let min_raw = gs.iter().copied().fold(0.0, f64::min);
    let neg: Vec<f64> = gs.iter().map(|g| (-g).max(0.0)).collect();
    let mut clipped = 0.0;
    for j in 1..ts.len() {
        clipped += 0.5 * (neg[j - 1] + neg[j]) * (ts[j] - ts[j - 1]);
    }
    for g in gs.iter_mut() {
        *g = g.max(0.0);
    }
    (clipped, min_raw)
}

pub(crate) fn trapezoid(ts: &[f64], gs: &[f64]) -> f64 {
    (1..ts.len())
        .map(|j| 0.5 * (gs[j - 1] + gs[j]) * (ts[j] - ts[j - 1]))
        .sum()
}

/// Mass beyond the grid, extrapolating the decay over the last tenth of the
/// grid both exponentially and as a power law and keeping the larger.
pub(crate) fn tail_estimate(ts: &[f64], gs: &[f64]) -> f64 {
    let n = ts.len();
    if n < 4 {
        return 0.0;
    }
    let m = n - 1 - (n / 10).max(1);
    let (t0, t1, g0, g1) = (ts[m], ts[n - 1], gs[m], gs[n - 1]);
    if !(g0 > 0.0 && g1 > 0.0) || g1 >= g0 {
        return 0.0;
    }
    let rate = (g0 / g1).ln() / (t1 - t0);
    let exponential = g1 / rate;
    // Power law g ~ t^-(1+k): tail = g1 t1 / k.
    let k = (g0 / g1).ln() / (t1 / t0).ln() - 1.0;
    let power = if k > 0.0 { g1 * t1 / k } else { exponential };
    exponential.max(power)
}
