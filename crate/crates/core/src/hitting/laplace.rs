use serde::{Deserialize, Serialize};

use super::{
    check_anchor, clip_negative, q, tail_estimate, trapezoid, Diagnostics, HittingDensity, Method,
};
use crate::error::{domain, Error, Result};
use crate::process::{besq_density_time_derivative, BesqParams};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};

pub const DEFAULT_GS_TERMS: usize = 14;
const CHECK_TERMS: usize = 12;
const SENSITIVITY_LIMIT: f64 = 1e-3;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Gaver–Stehfest weights `V_1..V_n` for even `n`.
pub fn gaver_stehfest_coefficients(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n % 2 == 1 || n > 30 {
        return Err(Error::Config(format!(
            "Gaver-Stehfest term count must be even and in 2..=30, got {n}"
        )));
    }
    let half = n / 2;
    Ok((1..=n)
        .map(|k| {
            let sum: f64 = (k.div_ceil(2)..=k.min(half))
                .map(|j| {
                    (j as f64).powi(half as i32) * factorial(2 * j)
                        / (factorial(half - j)
                            * factorial(j)
                            * factorial(j - 1)
                            * factorial(k - j)
                            * factorial(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect())
}

/// `f(t) ~ (ln 2 / t) sum_k V_k F(k ln 2 / t)`.
pub fn gaver_stehfest_invert<F: FnMut(f64) -> Result<f64>>(mut transform: F, t: f64, terms: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("inversion time must be > 0", t));
    }
    let v = gaver_stehfest_coefficients(terms)?;
    let a = std::f64::consts::LN_2 / t;
    let mut acc = 0.0;
    for (k, vk) in v.iter().enumerate() {
        acc += vk * transform(a * (k + 1) as f64)?;
    }
    Ok(a * acc)
}

/// `int_0^inf e^{-lambda s} f(s) ds`, split on a geometric grid so that the
/// `e^{-c/s}` onset and the exponential cut-off are both resolved.
fn laplace_integral<F: FnMut(f64) -> f64>(mut f: F, lambda: f64) -> Result<f64> {
    let tol = Tolerance {
        abs: f64::MIN_POSITIVE,
        rel: 1e-13,
        max_intervals: 2000,
    };
    let end = (700.0 / lambda).min(1e4);
    let mut points = vec![0.0];
    let mut s = 1e-4;
    while s < end {
        points.push(s);
        s *= 2.0;
    }
    points.push(end);
    let mut g = |s: f64| {
        let v = f(s);
        if v == 0.0 {
            0.0
        } else {
            (-lambda * s).exp() * v
        }
    };
    let mut total = 0.0;
    for w in points.windows(2) {
        total += integrate(&mut g, w[0], w[1], tol)?.value;
    }
    total += integrate_to_infinity(&mut g, end, tol)?.value;
    Ok(total)
}

/// `G(lambda) = int_0^inf e^{-lambda s} q_{s/y}(1, x/y) ds`.
pub fn laplace_transform_numeric(y: f64, anchor_x: f64, mu: f64, lambda: f64) -> Result<f64> {
    check_anchor(y, anchor_x)?;
    if !(lambda > 0.0) {
        return Err(domain("lambda must be > 0", lambda));
    }
    let p = BesqParams::from_mu(mu, 1.0)?;
    Transforms { y, anchor_x, p }.big_g(lambda)
}

/// Tabulated `G` at a set of transform nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplaceKernel {
    pub lambda_nodes: Vec<f64>,
    pub g_hat: Vec<f64>,
}

impl LaplaceKernel {
    pub fn tabulate(y: f64, anchor_x: f64, mu: f64, lambda_nodes: &[f64]) -> Result<Self> {
        let g_hat = lambda_nodes
            .iter()
            .map(|&l| laplace_transform_numeric(y, anchor_x, mu, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            lambda_nodes: lambda_nodes.to_vec(),
            g_hat,
        })
    }

    /// `1 / (lambda G(lambda))`, the transform of the resolvent kernel `K`.
    pub fn resolvent_hat(&self) -> Vec<f64> {
        self.lambda_nodes
            .iter()
            .zip(&self.g_hat)
            .map(|(l, g)| 1.0 / (l * g))
            .collect()
    }
}

struct Transforms {
    y: f64,
    anchor_x: f64,
    p: BesqParams<f64>,
}

impl Transforms {
    fn big_g(&self, lambda: f64) -> Result<f64> {
        let (y, x) = (self.y, self.anchor_x / self.y);
        laplace_integral(|s| q(s / y, 1.0, x, &self.p), lambda)
    }

    /// Transform of `t -> q_t(1, x)`.
    fn big_q(&self, lambda: f64) -> Result<f64> {
        laplace_integral(|t| q(t, 1.0, self.anchor_x, &self.p), lambda)
    }

    fn g_hat(&self, lambda: f64) -> Result<f64> {
        let big_g = self.big_g(lambda)?;
        if !(big_g > 0.0) {
            return Err(Error::Quadrature(format!("G({lambda}) underflowed to {big_g:e}")));
        }
        Ok(self.y * self.big_q(lambda)? / big_g)
    }

    /// Transform of `K * dq/dt`, which is `(1/(lambda G)) lambda Q = Q / G`.
    fn resolvent_term_hat(&self, lambda: f64) -> Result<f64> {
        Ok(self.g_hat(lambda)? / self.y)
    }
}

fn check_time_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidGrid("empty time grid".into()));
    }
    if !(t_grid[0] > 0.0) {
        return Err(Error::InvalidGrid(format!("grid times must be > 0, got {}", t_grid[0])));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !t_grid.iter().all(|t| t.is_finite()) {
        return Err(Error::InvalidGrid("grid times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Inverts `F` at 14 and 12 terms from the same transform samples.
fn invert_pair<F: FnMut(f64) -> Result<f64>>(mut transform: F, t: f64) -> Result<(f64, f64)> {
    let v14 = gaver_stehfest_coefficients(DEFAULT_GS_TERMS)?;
    let v12 = gaver_stehfest_coefficients(CHECK_TERMS)?;
    let a = std::f64::consts::LN_2 / t;
    let (mut s14, mut s12) = (0.0, 0.0);
    for k in 0..DEFAULT_GS_TERMS {
        let f = transform(a * (k + 1) as f64)?;
        s14 += v14[k] * f;
        if k < CHECK_TERMS {
            s12 += v12[k] * f;
        }
    }
    Ok((a * s14, a * s12))
}

fn finish(
    y: f64,
    mu: f64,
    anchor_x: f64,
    method: Method,
    t_grid: &[f64],
    raw: Vec<(f64, f64)>,
    mut diagnostics: Diagnostics,
) -> HittingDensity {
    let scale = raw.iter().map(|(g, _)| g.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (t, (g14, g12)) in t_grid.iter().zip(&raw) {
        let rel = (g14 - g12).abs() / g14.abs().max(1e-6 * scale).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > SENSITIVITY_LIMIT {
            diagnostics.gs_unstable_times.push(*t);
        }
    }
    diagnostics.gs_sensitivity_max = Some(worst);
    let mut g: Vec<f64> = raw.iter().map(|(g, _)| *g).collect();
    let mut ts = vec![0.0];
    ts.extend_from_slice(t_grid);
    let mut gs = vec![0.0];
    gs.extend_from_slice(&g);
    let (clipped_mass, min_raw) = clip_negative(&ts, &mut gs);
    g.copy_from_slice(&gs[1..]);
    diagnostics.clipped_mass = clipped_mass;
    diagnostics.min_raw = min_raw;
    diagnostics.tail_estimate = tail_estimate(&ts, &gs);
    let t_max = *t_grid.last().expect("checked non-empty");
    HittingDensity {
        y,
        mu,
        anchor_x,
        method,
        t_grid: t_grid.to_vec(),
        step: t_max / t_grid.len() as f64,
        mass: trapezoid(&ts, &gs),
        g_values: g,
        atom: 0.0,
        diagnostics,
    }
}

/// Inverts `g_hat = y Q / G` by Gaver–Stehfest at every grid time. The mass
/// is the trapezoid integral from `(0, 0)` through the grid.
pub fn solve_hitting_density_laplace(y: f64, mu: f64, t_grid: &[f64], anchor_x: f64) -> Result<HittingDensity> {
    check_anchor(y, anchor_x)?;
    check_time_grid(t_grid)?;
    let p = BesqParams::from_mu(mu, 1.0)?;
    let tr = Transforms { y, anchor_x, p };
    let raw = t_grid
        .iter()
        .map(|&t| invert_pair(|l| tr.g_hat(l), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(y, mu, anchor_x, Method::Laplace, t_grid, raw, Diagnostics::default()))
}

/// Evaluates the resolvent-kernel display
/// `g(t) = dq_t(1,x)/dt + int_0^t K(t - z) dq_z(1,x)/dz dz`, with the
/// convolution inverted from its transform, then rescales it by the constant
/// that matches `reference` at its peak. The fitted constant and the
/// remaining sup-distance to `reference` are reported.
pub fn solve_hitting_density_kernel(
    y: f64,
    mu: f64,
    t_grid: &[f64],
    anchor_x: f64,
    reference: &HittingDensity,
) -> Result<HittingDensity> {
    check_anchor(y, anchor_x)?;
    check_time_grid(t_grid)?;
    let p = BesqParams::from_mu(mu, 1.0)?;
    let tr = Transforms { y, anchor_x, p };
    let mut raw = Vec::with_capacity(t_grid.len());
    let mut conv_only = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (c14, c12) = invert_pair(|l| tr.resolvent_term_hat(l), t)?;
        let dq = besq_density_time_derivative(1.0, anchor_x, t, &tr.p)?;
        raw.push((dq + c14, dq + c12));
        conv_only.push(c14);
    }
    let covered: Vec<usize> = (0..t_grid.len())
        .filter(|&i| t_grid[i] <= reference.t_max())
        .collect();
    let &peak = covered
        .iter()
        .max_by(|&&a, &&b| reference.value_at(t_grid[a]).total_cmp(&reference.value_at(t_grid[b])))
        .ok_or(Error::GridCoverage {
            needed: t_grid[0],
            ends_at: reference.t_max(),
        })?;
    let target = reference.value_at(t_grid[peak]);
    let c = target / raw[peak].0;
    let c_conv = target / conv_only[peak];
    let discrepancy = covered
        .iter()
        .map(|&i| (c * raw[i].0 - reference.value_at(t_grid[i])).abs())
        .fold(0.0, f64::max);
    let scaled = raw.iter().map(|(a, b)| (c * a, c * b)).collect();
    let diagnostics = Diagnostics {
        fitted_constant: Some(c),
        kernel_discrepancy: Some(discrepancy),
        notes: vec![format!(
            "constant fitted at t = {}; without the dq/dt term the fitted constant is {c_conv}",
            t_grid[peak]
        )],
        ..Diagnostics::default()
    };
    Ok(finish(y, mu, anchor_x, Method::LaplaceKernel, t_grid, scaled, diagnostics))
}
