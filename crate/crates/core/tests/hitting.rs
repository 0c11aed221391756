#![allow(clippy::excessive_precision)]

mod common;

use std::sync::OnceLock;

use besq_core::hitting::*;
use besq_core::Error;
use proptest::prelude::*;

use common::bessel_i_series;

// g_{1.5} for mu = 0, from Talbot inversion of the closed-form transform at
// 40 digits.
const REF_MU0: [(f64, f64); 16] = [
    (0.002, 0.003639867117),
    (0.003, 0.1333585878),
    (0.004, 0.7106765298),
    (0.005, 1.797880941),
    (0.006, 3.174246352),
    (0.008, 5.906531165),
    (0.01, 7.94814758),
    (0.017, 10.1522421),
    (0.03, 8.25655042),
    (0.05, 5.38732616),
    (0.1, 2.47007698),
    (0.2, 1.01071588),
    (0.5, 0.310043249),
    (1.0, 0.110186146),
    (2.0, 0.0160102260),
    (5.0, 4.929e-05),
];

fn reference_solution() -> &'static HittingDensity {
    static CELL: OnceLock<HittingDensity> = OnceLock::new();
    CELL.get_or_init(|| solve_hitting_density_direct(1.5, 0.0, 6.0, 800, 3.0).unwrap())
}

/// E_1 exp(-lambda tau_y) for y > 1.
fn closed_form_transform(y: f64, mu: f64, lambda: f64) -> f64 {
    y.powf(mu / 2.0) * bessel_i_series(mu, (2.0 * lambda).sqrt()) / bessel_i_series(mu, (2.0 * lambda * y).sqrt())
}

#[test]
fn kernel_matches_closed_form() {
    let direct = 0.5 * (-1.5f64).exp() * bessel_i_series(0.0, 2f64.sqrt());
    let k = volterra_kernel(1.0, 1.0, 2.0, 0.0).unwrap();
    assert!((k - direct).abs() < 1e-12 * direct, "{k} vs {direct}");
    assert!(volterra_kernel(1e-3, 2.0, 4.0, 0.0).unwrap() < 1e-50);
}

#[test]
fn direct_solution_matches_reference() {
    let d = reference_solution();
    for (t, g) in REF_MU0 {
        let err = (d.value_at(t) - g).abs();
        assert!(err < 5e-3, "t={t}: {} vs {g}", d.value_at(t));
    }
    assert!(d.atom.abs() < 1e-4);
    assert!(d.diagnostics.residual_max.unwrap() < 1e-3);
    assert!(d.g_values.iter().all(|g| *g >= 0.0));
}

#[test]
fn residual_small_off_grid() {
    let d = reference_solution();
    let times: Vec<f64> = (1..200).map(|i| 0.0137 + 0.0291 * i as f64).collect();
    let res = volterra_residual(d, &times).unwrap();
    assert!(res.iter().all(|r| *r < 1e-3), "{:?}", res.iter().copied().fold(0.0, f64::max));
    assert!(matches!(
        volterra_residual(d, &[7.0]),
        Err(Error::GridCoverage { .. })
    ));
}

#[test]
fn anchor_invariance() {
    let a = solve_hitting_density_direct(1.5, 0.0, 6.0, 800, 2.25).unwrap();
    let b = solve_hitting_density_direct(1.5, 0.0, 6.0, 800, 3.75).unwrap();
    let sup = (0..=6000)
        .map(|i| i as f64 * 1e-3)
        .map(|t| (a.value_at(t) - b.value_at(t)).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-2, "{sup}");
}

#[test]
fn mass_matches_hitting_probability() {
    let d = reference_solution();
    assert!((d.mass + d.diagnostics.tail_estimate - 1.0).abs() < 1e-2);
    let low = solve_hitting_density_direct(0.25, 1.0, 50.0, 400, 0.125).unwrap();
    let target = hitting_probability_total(0.25, 1.0).unwrap();
    assert!(
        (low.mass + low.diagnostics.tail_estimate - target).abs() < 1e-2,
        "{} + {}",
        low.mass,
        low.diagnostics.tail_estimate
    );
}

#[test]
fn start_level_is_an_atom() {
    let d = solve_hitting_density_direct(1.0, 0.0, 2.0, 200, 2.0).unwrap();
    assert!((d.atom - 1.0).abs() < 1e-6, "{}", d.atom);
    assert!((d.cdf(0.0) - 1.0).abs() < 1e-6);
}

#[test]
fn laplace_route_reproduces_closed_form_inversion() {
    let grid = [0.05, 0.1, 0.3, 1.0];
    for mu in [0.0, 1.5] {
        let l = solve_hitting_density_laplace(1.5, mu, &grid, 3.0).unwrap();
        for (t, g) in grid.iter().zip(&l.g_values) {
            let oracle = gaver_stehfest_invert(|lam| Ok(closed_form_transform(1.5, mu, lam)), *t, 14).unwrap();
            assert!((g - oracle).abs() < 1e-5 * oracle.abs().max(1.0), "mu={mu} t={t}: {g} vs {oracle}");
        }
    }
}

#[test]
fn laplace_route_against_references() {
    let grid: Vec<f64> = REF_MU0.iter().map(|r| r.0).filter(|t| *t >= 0.05).collect();
    let l = solve_hitting_density_laplace(1.5, 0.0, &grid, 3.0).unwrap();
    for ((t, g), v) in REF_MU0.iter().filter(|r| r.0 >= 0.05).zip(&l.g_values) {
        assert!((v - g).abs() < 1e-2, "t={t}: {v} vs {g}");
    }
    let l15 = solve_hitting_density_laplace(1.5, 1.5, &[0.05, 0.2, 1.0], 3.0).unwrap();
    for (v, g) in l15.g_values.iter().zip([6.92352168409, 1.01987538751, 0.00399693863361]) {
        assert!((v - g).abs() < 1e-2 * g.max(1.0), "{v} vs {g}");
    }
}

#[test]
fn direct_and_laplace_agree() {
    let d = reference_solution();
    let grid: Vec<f64> = (0..=100).map(|i| 0.05 * (100f64).powf(i as f64 / 100.0)).collect();
    let l = solve_hitting_density_laplace(1.5, 0.0, &grid, 3.0).unwrap();
    let sup = grid
        .iter()
        .zip(&l.g_values)
        .map(|(t, g)| (d.value_at(*t) - g).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-2, "{sup}");
    assert!(l.g_values.iter().all(|g| *g >= 0.0));
}

#[test]
fn laplace_density_vanishes_at_zero() {
    let l = solve_hitting_density_laplace(1.5, 0.0, &[1e-3, 2e-3], 3.0).unwrap();
    assert!(l.g_values[0] < 1e-6 && l.g_values[1] < 1e-2, "{:?}", l.g_values);
}

#[test]
fn transform_regressions() {
    // Quadrature oracle at 30 digits.
    let g1 = laplace_transform_numeric(1.0, 2.0, 0.0, 1.0).unwrap();
    assert!((g1 - 0.17836724991688629814).abs() < 1e-9, "{g1}");
    let g0 = laplace_transform_numeric(1.5, 3.0, 1.0, 1e-4).unwrap();
    assert!((g0 - 0.74905482826456645904).abs() < 1e-8, "{g0}");
    let k = LaplaceKernel::tabulate(1.5, 3.0, 0.0, &[0.5, 1.0, 4.0, 16.0]).unwrap();
    assert!(k.g_hat.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
    assert!(k.resolvent_hat().iter().all(|v| v.is_finite() && *v > 0.0));
}

#[test]
fn kernel_route_reports_fitted_constant() {
    let d = reference_solution();
    let grid = [0.017, 0.05, 0.2, 1.0];
    let k = solve_hitting_density_kernel(1.5, 0.0, &grid, 3.0, d).unwrap();
    let c = k.diagnostics.fitted_constant.unwrap();
    assert!(c.is_finite() && c > 0.0);
    assert!((k.g_values[0] - d.value_at(0.017)).abs() < 1e-9);
    assert!(k.diagnostics.kernel_discrepancy.is_some());
    assert_eq!(k.method, Method::LaplaceKernel);
}

#[test]
fn conditional_cdf_start_level_corollary() {
    let d = solve_hitting_density_direct(1.0, 0.0, 2.0, 200, 2.0).unwrap();
    for x in [1.0, 2.0, 5.0] {
        for t in [0.5, 1.0] {
            let c = conditional_hitting_cdf(1.0, t, t, x, &d, 0.0).unwrap();
            assert!((c.value - 1.0).abs() < 1e-3, "x={x} t={t}: {c:?}");
        }
    }
}

#[test]
fn conditional_cdf_monotone_and_bounded() {
    let d = reference_solution();
    let mut prev = 0.0;
    for i in 1..=40 {
        let t = 0.025 * i as f64;
        let c = conditional_hitting_cdf(1.5, t, 1.0, 2.0, d, 0.0).unwrap();
        assert!(c.value >= prev - 1e-12 && c.value <= 1.0);
        prev = c.value;
    }
    let tiny = conditional_hitting_cdf(1.5, 1e-4, 1.0, 2.0, d, 0.0).unwrap();
    assert!(tiny.value < 1e-5, "{tiny:?}");
}

#[test]
fn conditional_cdf_matches_conditioned_simulation() {
    let d = reference_solution();
    let c = conditional_hitting_cdf(1.5, 0.5, 1.0, 2.0, d, 0.0).unwrap();
    let mc = mc_conditional_hitting_cdf(1.5, 0.5, 1.0, 2.0, 0.0, 2.5e-4, 100_000, 11).unwrap();
    assert!((c.value - mc.estimate).abs() < 0.02, "{c:?} vs {mc:?}");
}

#[test]
fn conditional_cdf_errors() {
    let d = reference_solution();
    assert!(conditional_hitting_cdf(1.5, 2.0, 1.0, 2.0, d, 0.0).is_err());
    assert!(matches!(
        conditional_hitting_cdf(1.5, 7.0, 8.0, 2.0, d, 0.0),
        Err(Error::GridCoverage { .. })
    ));
    assert!(conditional_hitting_cdf(1.5, 0.5, 1.0, 2.0, d, 1.0).is_err());
    assert!(conditional_hitting_cdf(1.5, 0.5, 1.0, 0.0, d, 0.0).is_err());
}

#[test]
fn solver_input_validation() {
    assert!(solve_hitting_density_direct(1.5, 0.0, 1.0, 64, 1.5).is_err());
    assert!(solve_hitting_density_direct(1.5, 0.0, 1.0, 64, 1.0).is_err());
    assert!(solve_hitting_density_direct(0.5, 0.0, 1.0, 64, 0.7).is_err());
    assert!(matches!(
        solve_hitting_density_direct(1.5, 0.0, 1.0, 15, 3.0),
        Err(Error::InvalidGrid(_))
    ));
    assert!(solve_hitting_density_direct(1.5, -1.0, 1.0, 64, 3.0).is_err());
    assert!(solve_hitting_density_laplace(1.5, 0.0, &[0.5, 0.2], 3.0).is_err());
    assert!(solve_hitting_density_laplace(1.5, 0.0, &[0.0, 0.2], 3.0).is_err());
}

#[test]
fn mc_cdf_close_to_solver() {
    let d = reference_solution();
    // KS noise at this size is about 0.014; grid detection adds a few 1e-3.
    let mc = mc_hitting_cdf(1.5, 0.0, 5.0, 1e-4, 10_000, 3).unwrap();
    let dist = mc.kolmogorov_distance(|t| d.cdf(t));
    assert!(dist < 0.03, "{dist}");
    assert!(mc.censored_fraction() < 1e-3);
}

#[test]
fn mc_censored_mass_for_transient_level() {
    let d = solve_hitting_density_direct(0.25, 1.0, 50.0, 400, 0.125).unwrap();
    let mc = mc_hitting_cdf(0.25, 1.0, 10.0, 5e-4, 4000, 5).unwrap();
    let never = 1.0 - hitting_probability_total(0.25, 1.0).unwrap();
    let censored = mc.censored_fraction();
    assert!(censored > never - 0.02, "{censored}");
    assert!((censored - (1.0 - d.cdf(10.0))).abs() < 0.03, "{censored}");
}

#[test]
fn mc_first_return_is_positive() {
    let mc = mc_hitting_cdf(1.0, 0.0, 1.0, 1e-3, 2000, 9).unwrap();
    assert_eq!(mc.cdf(0.0), 0.0);
    assert!(mc.hit_times.iter().all(|t| *t > 0.0));
    assert!(mc.censored_fraction() < 0.05);
}

#[test]
fn csv_and_sidecar() {
    let d = solve_hitting_density_direct(1.5, 0.0, 2.0, 32, 3.0).unwrap();
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    assert!(buf.starts_with(b"t,g\n"));
    let (t, g) = HittingDensity::read_csv_values(&buf[..]).unwrap();
    assert_eq!(t, d.t_grid);
    assert_eq!(g, d.g_values);
    let side: serde_json::Value = serde_json::from_str(&d.sidecar_json().unwrap()).unwrap();
    for key in ["y", "mu", "anchor_x", "method", "step", "mass", "diagnostics"] {
        assert!(side.get(key).is_some(), "{key}");
    }
    assert_eq!(side["method"], "volterra-direct");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conditional_cdf_in_unit_interval(x in 0.2f64..6.0, big_t in 0.3f64..4.0, frac in 0.01f64..1.0) {
        let d = reference_solution();
        let t = big_t * frac;
        let c = conditional_hitting_cdf(1.5, t, big_t, x, d, 0.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&c.value));
        let c2 = conditional_hitting_cdf(1.5, (t * 1.2).min(big_t), big_t, x, d, 0.0).unwrap();
        prop_assert!(c2.value >= c.value - 1e-9);
    }

    #[test]
    fn stehfest_inverts_shifted_powers(a in 0.1f64..3.0, t in 0.2f64..3.0) {
        let f = gaver_stehfest_invert(|l| Ok(1.0 / ((l + a) * (l + a))), t, 14).unwrap();
        let exact = t * (-a * t).exp();
        let peak = 1.0 / (a * std::f64::consts::E);
        prop_assert!((f - exact).abs() < 1e-3 * peak, "{} vs {}", f, exact);
    }

    #[test]
    fn kernel_scaling(s in 0.01f64..5.0, y in 0.3f64..3.0, r in 1.1f64..3.0, mu in 0.0f64..3.0) {
        let x = r * y;
        let p = besq_core::BesqParams::from_mu(mu, 1.0).unwrap();
        let q = besq_core::process::besq_transition_density(1.0, x / y, s / y, &p).unwrap();
        let k = volterra_kernel(s, y, x, mu).unwrap();
        prop_assert!((k - q / y).abs() <= 1e-12 * k.abs().max(1e-300));
    }
}
