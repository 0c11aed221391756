use nalgebra::{DMatrix, DVector};

use super::{
    check_anchor, clip_negative, kernel_unchecked, q, tail_estimate, trapezoid, Diagnostics, HittingDensity, Method,
};
use crate::error::{domain, Error, Result};
use crate::process::BesqParams;
use crate::quad::GaussLegendre;

const RULE_POINTS: usize = 12;

/// Discretisation settings for [`solve_hitting_density_direct`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectOptions {
    /// Mesh nodes sit at `t_max (j/n)^grading`.
    pub grading: f64,
    /// Collocation points per unknown.
    pub oversample: usize,
    /// Singular values below `rcond * s_max` are dropped.
    pub rcond: Option<f64>,
    /// The solve fails if fewer than this fraction of singular values survive.
    pub min_rank_fraction: f64,
    /// Rows are weighted by `1 / max(q_t, row_floor * max q)`, so the fit
    /// targets the relative residual.
    pub row_floor: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            grading: 2.0,
            oversample: 2,
            rcond: None,
            min_rank_fraction: 0.5,
            row_floor: 1e-8,
        }
    }
}

/// Solves the hitting equation for `g_y` on `[0, t_max]`.
///
/// `g` is expanded in hat functions on a mesh graded towards 0, vanishing at
/// 0, plus an atom at 0, and fitted by least squares to the equation at
/// `oversample * n_steps` points with a truncated SVD. The kernel vanishes
/// to all orders at 0, so the square triangular system is hopelessly
/// ill-conditioned; overdetermination plus truncation keeps the solution
/// stable. The atom carries the point mass that appears when `y = 1`.
pub fn solve_hitting_density_direct(
    y: f64,
    mu: f64,
    t_max: f64,
    n_steps: usize,
    anchor_x: f64,
) -> Result<HittingDensity> {
    DirectOptions::default().solve(y, mu, t_max, n_steps, anchor_x)
}

impl DirectOptions {
    pub fn solve(&self, y: f64, mu: f64, t_max: f64, n_steps: usize, anchor_x: f64) -> Result<HittingDensity> {
        check_anchor(y, anchor_x)?;
        let p = BesqParams::from_mu(mu, 1.0)?;
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(domain("t_max must be finite and > 0", t_max));
        }
        if n_steps < 16 {
            return Err(Error::InvalidGrid(format!("n_steps must be >= 16, got {n_steps}")));
        }
        if !(self.grading >= 1.0) || self.oversample == 0 {
            return Err(Error::Config("grading must be >= 1 and oversample >= 1".into()));
        }
        let n = n_steps;
        let mesh: Vec<f64> = (0..=n)
            .map(|j| t_max * (j as f64 / n as f64).powf(self.grading))
            .collect();
        let m = self.oversample * n;
        let colloc: Vec<f64> = (1..=m)
            .map(|i| t_max * (i as f64 / m as f64).powf(self.grading))
            .collect();
        let rule = GaussLegendre::new(RULE_POINTS);
        let mut a = collocation_matrix(&colloc, &mesh, y, anchor_x, &p, &rule);
        let mut b = DVector::from_iterator(m, colloc.iter().map(|&t| q(t, 1.0, anchor_x, &p)));
        let floor = self.row_floor * b.max();
        for i in 0..m {
            let w = 1.0 / b[i].max(floor);
            a.row_mut(i).scale_mut(w);
            b[i] *= w;
        }

        let svd = a.svd(true, true);
        let s_max = svd.singular_values.max();
        if !(s_max > 0.0) {
            return Err(Error::IllConditioned("collocation matrix is zero".into()));
        }
        let rcond = self.rcond.unwrap_or(1e-15 * m.max(n + 1) as f64);
        let cutoff = rcond * s_max;
        let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
        if (rank as f64) < self.min_rank_fraction * (n + 1) as f64 {
            return Err(Error::IllConditioned(format!(
                "numerical rank {rank} of {} unknowns; refine t_max or n_steps",
                n + 1
            )));
        }
        let sol = svd
            .solve(&b, cutoff)
            .map_err(|e| Error::IllConditioned(e.to_string()))?;
        let mut atom = sol[0];
        let mut g: Vec<f64> = sol.iter().skip(1).copied().collect();
        let grid = mesh[1..].to_vec();

        let mids: Vec<f64> = (1..=m)
            .map(|i| t_max * ((i as f64 - 0.5) / m as f64).powf(self.grading))
            .collect();
        let residual_max = relative_residuals(&mids, &mesh, &with_zero(&g), atom, y, anchor_x, &p, &rule)
            .into_iter()
            .fold(0.0, f64::max);

        let mut gz = with_zero(&g);
        let (mut clipped_mass, min_raw) = clip_negative(&mesh, &mut gz);
        g.copy_from_slice(&gz[1..]);
        if atom < 0.0 {
            clipped_mass -= atom;
            atom = 0.0;
        }
        let mass = atom + trapezoid(&mesh, &gz);
        let diagnostics = Diagnostics {
            clipped_mass,
            min_raw: min_raw.min(atom),
            tail_estimate: tail_estimate(&mesh, &gz),
            residual_max: Some(residual_max),
            rank: Some(rank),
            unknowns: Some(n + 1),
            notes: vec![format!(
                "mesh t_max*(j/n)^{}; {m} collocation points; rcond {rcond:e}",
                self.grading
            )],
            ..Diagnostics::default()
        };
        Ok(HittingDensity {
            y,
            mu,
            anchor_x,
            method: Method::VolterraDirect,
            t_grid: grid,
            g_values: g,
            atom,
            step: t_max / n as f64,
            mass,
            diagnostics,
        })
    }
}

fn collocation_matrix(
    colloc: &[f64],
    mesh: &[f64],
    y: f64,
    anchor_x: f64,
    p: &BesqParams<f64>,
    rule: &GaussLegendre,
) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(colloc.len(), mesh.len());
    for (i, &t) in colloc.iter().enumerate() {
        a[(i, 0)] = kernel_unchecked(t, y, anchor_x, p);
        for e in 0..mesh.len() - 1 {
            let (lo, hi) = (mesh[e], mesh[e + 1]);
            if lo >= t {
                break;
            }
            let (left, right) = element_weights(t, lo, hi, y, anchor_x, p, rule);
            if e > 0 {
                a[(i, e)] += left;
            }
            a[(i, e + 1)] += right;
        }
    }
    a
}

/// `int k(t - z) phi(z) dz` over `[lo, min(hi, t)]` for the two hat halves on
/// the element `[lo, hi]`.
fn element_weights(
    t: f64,
    lo: f64,
    hi: f64,
    y: f64,
    anchor_x: f64,
    p: &BesqParams<f64>,
    rule: &GaussLegendre,
) -> (f64, f64) {
    let top = hi.min(t);
    let c = 0.5 * (lo + top);
    let h = 0.5 * (top - lo);
    let width = hi - lo;
    let (mut left, mut right) = (0.0, 0.0);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let z = c + h * x;
        let k = w * h * kernel_unchecked(t - z, y, anchor_x, p);
        let lam = (z - lo) / width;
        left += k * (1.0 - lam);
        right += k * lam;
    }
    (left, right)
}

/// `atom k(t) + int_0^t k(t - z) g(z) dz` for piecewise-linear `g` on `grid`.
#[allow(clippy::too_many_arguments)]
fn convolve(
    t: f64,
    grid: &[f64],
    g: &[f64],
    atom: f64,
    y: f64,
    anchor_x: f64,
    p: &BesqParams<f64>,
    rule: &GaussLegendre,
) -> f64 {
    let mut acc = atom * kernel_unchecked(t, y, anchor_x, p);
    for e in 0..grid.len() - 1 {
        if grid[e] >= t {
            break;
        }
        let (l, r) = element_weights(t, grid[e], grid[e + 1], y, anchor_x, p, rule);
        acc += l * g[e] + r * g[e + 1];
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn relative_residuals(
    times: &[f64],
    grid: &[f64],
    g: &[f64],
    atom: f64,
    y: f64,
    anchor_x: f64,
    p: &BesqParams<f64>,
    rule: &GaussLegendre,
) -> Vec<f64> {
    let f: Vec<f64> = times.iter().map(|&t| q(t, 1.0, anchor_x, p)).collect();
    let floor = 1e-3 * f.iter().copied().fold(0.0, f64::max);
    times
        .iter()
        .zip(&f)
        .map(|(&t, &ft)| (convolve(t, grid, g, atom, y, anchor_x, p, rule) - ft).abs() / ft.max(floor))
        .collect()
}

/// Relative residual of the hitting equation at `times` for the
/// piecewise-linear interpolant of `density`, measured against
/// `max(q_t(1, x), 1e-3 max q)` so that the near-zero head of `q` does not
/// dominate.
pub fn volterra_residual(density: &HittingDensity, times: &[f64]) -> Result<Vec<f64>> {
    let p = BesqParams::from_mu(density.mu, 1.0)?;
    check_anchor(density.y, density.anchor_x)?;
    if let Some(t) = times.iter().find(|t| !(**t >= 0.0) || **t > density.t_max()) {
        return Err(Error::GridCoverage {
            needed: *t,
            ends_at: density.t_max(),
        });
    }
    let (grid, g) = density.with_origin();
    let rule = GaussLegendre::new(RULE_POINTS);
    Ok(relative_residuals(
        times,
        &grid,
        &g,
        density.atom,
        density.y,
        density.anchor_x,
        &p,
        &rule,
    ))
}

fn with_zero(g: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(g.len() + 1);
    out.push(0.0);
    out.extend_from_slice(g);
    out
}
