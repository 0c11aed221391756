//! The Bessel time process `X(t, a) = R(t + a R(t)) / R(t)` and the
//! constructions built on it: correlated pairs, post-hitting laws, time
//! inversion and the Lamperti clock.
//!
//! Nothing here builds a fine global path. Each construction chains exact
//! transitions through the (random) time points it needs, so the only
//! discretisation error left is in first-passage detection.

mod identities;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::process::{scan_for_hit, transition, BesqParams};
use crate::quad::{integrate, integrate_to_infinity, Tolerance};
use crate::scalar::Scalar;

pub use identities::{
    lamperti_identity_samples, time_inversion_samples, triple_identity_check, LampertiSamples, TestFn, TripleCheck,
    LAMPERTI_CLOCK_CAP,
};

/// One draw of `a -> X(t, a)` on a grid of `a` values.
#[derive(Clone, Debug, PartialEq)]
pub struct BesselTimeSample<T> {
    pub base_time: T,
    pub a_grid: Vec<T>,
    pub x_values: Vec<T>,
    /// `R(t)`, the value the construction divides by.
    pub r_t: T,
}

/// Joint draw of `(X(t, a), R(t + a))` from one underlying path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelatedPairSample<T> {
    pub a: T,
    pub check_r: T,
    pub u: T,
}

fn require_unit_start<T: Scalar>(p: &BesqParams<T>) -> Result<()> {
    if p.x0() != T::one() {
        return Err(domain("the Bessel time process needs x0 = 1", p.x0()));
    }
    Ok(())
}

fn require_nonnegative<T: Scalar>(what: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(what, v))
    }
}

/// Draws `R(t)` from 1, then chains transitions through `t + a_k R(t)`.
pub fn bessel_time_sample<T: Scalar, R: Rng + ?Sized>(
    t: T,
    a_grid: &[T],
    p: &BesqParams<T>,
    rng: &mut R,
) -> Result<BesselTimeSample<T>> {
    require_unit_start(p)?;
    require_nonnegative("base time t must be >= 0", t)?;
    match a_grid.first() {
        Some(a) if *a == T::zero() => {}
        _ => return Err(Error::InvalidGrid("a grid must start at 0".into())),
    }
    if a_grid.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidGrid("a grid must be nondecreasing".into()));
    }
    let r_t = transition(T::one(), t, p, rng);
    let mut x_values = Vec::with_capacity(a_grid.len());
    x_values.push(T::one());
    let mut v = r_t;
    for w in a_grid.windows(2) {
        v = transition(v, (w[1] - w[0]) * r_t, p, rng);
        x_values.push(v / r_t);
    }
    Ok(BesselTimeSample {
        base_time: t,
        a_grid: a_grid.to_vec(),
        x_values,
        r_t,
    })
}

/// `(X(t, a), R(t + a))`: the three times `t`, `t + a`, `t + a R(t)` are
/// visited in increasing order, which depends on whether `R(t) >= 1`.
pub fn correlated_pair_sample<T: Scalar, R: Rng + ?Sized>(
    t: T,
    a: T,
    p: &BesqParams<T>,
    rng: &mut R,
) -> Result<CorrelatedPairSample<T>> {
    require_unit_start(p)?;
    require_nonnegative("base time t must be >= 0", t)?;
    require_nonnegative("a must be >= 0", a)?;
    Ok(pair_unchecked(t, a, p, rng))
}

pub(crate) fn pair_unchecked<T: Scalar, R: Rng + ?Sized>(
    t: T,
    a: T,
    p: &BesqParams<T>,
    rng: &mut R,
) -> CorrelatedPairSample<T> {
    let r = transition(T::one(), t, p, rng);
    let (check_r, u) = if r >= T::one() {
        let u = transition(r, a, p, rng);
        let late = transition(u, a * r - a, p, rng);
        (late / r, u)
    } else {
        let early = transition(r, a * r, p, rng);
        let u = transition(early, a - a * r, p, rng);
        (early / r, u)
    };
    CorrelatedPairSample { a, check_r, u }
}

/// `H(s, t, delta) = E R(s) R(t)` for BESQ from 1:
/// `1 + m (delta + 4) + 2 delta m^2 + delta M (1 + delta m)`, `m = s ^ t`, `M = s v t`.
pub fn h_moment<T: Scalar>(s: T, t: T, delta: T) -> T {
    let m = s.min(t);
    let big = s.max(t);
    T::one() + m * (delta + T::lit(4.0)) + T::lit(2.0) * delta * m * m + delta * big * (T::one() + delta * m)
}

/// `Cov(X(t, a), R(t + a)) = E[R(t) H(a, a / R(t), delta)] - (1 + delta a)(1 + delta t + delta a)`,
/// with the expectation integrated against `q_t(1, .)`.
pub fn pair_covariance_formula(t: f64, a: f64, p: &BesqParams<f64>) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t must be > 0", t));
    }
    require_nonnegative("a must be >= 0", a)?;
    let delta = p.delta();
    let unit = p.with_x0(1.0)?;
    let integrand = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        let q = crate::process::density::log_q_unchecked(1.0, r, t, &unit).exp();
        r * h_moment(a, a / r, delta) * q
    };
    let tol = Tolerance::new(1e-14, 1e-9);
    // Break at the kink of H (r = 1) and around the bulk of R(t), which is
    // narrow for small t and invisible to a coarse first pass.
    let mean = 1.0 + delta * t;
    let sd = (4.0 * t + 2.0 * delta * t * t).sqrt();
    let mut points = vec![0.0, 1.0, (mean - 10.0 * sd).max(0.0), mean, mean + 10.0 * sd];
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = integrate_to_infinity(integrand, *points.last().expect("nonempty"), tol)?.value;
    for w in points.windows(2) {
        total += integrate(integrand, w[0], w[1], tol)?.value;
    }
    Ok(total - (1.0 + delta * a) * (1.0 + delta * t + delta * a))
}

/// Result of running BESQ from `p.x0()` until it reaches `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostHit<T> {
    pub tau: T,
    pub value: T,
}

/// `R(tau_y + eps y)`: simulate on the grid `step` until `y` is reached (at
/// most `cap` time units), then one exact transition of length `eps y` from `y`.
pub fn post_hit_sample<T: Scalar, R: Rng + ?Sized>(
    y: T,
    eps: T,
    p: &BesqParams<T>,
    step: T,
    cap: T,
    rng: &mut R,
) -> Result<Option<PostHit<T>>> {
    if !(y > T::zero()) {
        return Err(domain("level y must be > 0", y));
    }
    if !(eps > T::zero()) {
        return Err(domain("eps must be > 0", eps));
    }
    if !(step > T::zero()) || !(cap >= step) {
        return Err(domain("need 0 < step <= cap", step));
    }
    let scan = scan_for_hit(p.x0(), y, p, step, cap, rng);
    Ok(scan.time.map(|tau| PostHit {
        tau,
        value: transition(y, eps * y, p, rng),
    }))
}

/// `X(tau_y, a) = R(tau_y + a y) / y`, with the path continued from the grid
/// point where the crossing was detected.
pub fn stopped_bessel_time_sample<T: Scalar, R: Rng + ?Sized>(
    y: T,
    a: T,
    p: &BesqParams<T>,
    step: T,
    cap: T,
    rng: &mut R,
) -> Option<PostHit<T>> {
    let scan = scan_for_hit(p.x0(), y, p, step, cap, rng);
    let tau = scan.time?;
    let remaining = (tau + a * y - scan.stop_time).max(T::zero());
    Some(PostHit {
        tau,
        value: transition(scan.stop_value, remaining, p, rng) / y,
    })
}

/// `R(alpha tau_y)` continued from the detection point of the same path.
pub fn scaled_stop_time_sample<T: Scalar, R: Rng + ?Sized>(
    y: T,
    alpha: T,
    p: &BesqParams<T>,
    step: T,
    cap: T,
    rng: &mut R,
) -> Option<PostHit<T>> {
    let scan = scan_for_hit(p.x0(), y, p, step, cap, rng);
    let tau = scan.time?;
    let remaining = (alpha * tau - scan.stop_time).max(T::zero());
    Some(PostHit {
        tau,
        value: transition(scan.stop_value, remaining, p, rng),
    })
}
