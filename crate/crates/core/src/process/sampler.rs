//! Exact BESQ transitions: a Poisson mixture of Gamma laws.

use rand::Rng;

use crate::error::{domain, Result};
use crate::process::BesqParams;
use crate::scalar::Scalar;

/// One draw from `q_t(x, .)`: `N ~ Poisson(x / 2t)`, then
/// `2t * Gamma(delta/2 + N, 1)`.
pub fn sample_besq_transition<T: Scalar, R: Rng + ?Sized>(
    x: T,
    t: T,
    p: &BesqParams<T>,
    rng: &mut R,
) -> Result<T> {
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(domain("start x must be >= 0", x));
    }
    if !(t > T::zero()) || !t.is_finite() {
        return Err(domain("time t must be > 0", t));
    }
    Ok(transition(x, t, p, rng))
}

/// Unchecked transition; `t = 0` returns `x`.
#[inline]
pub(crate) fn transition<T: Scalar, R: Rng + ?Sized>(x: T, t: T, p: &BesqParams<T>, rng: &mut R) -> T {
    if t <= T::zero() {
        return x;
    }
    let two_t = T::lit(2.0) * t;
    let n = if x > T::zero() {
        T::sample_poisson(x / two_t, rng)
    } else {
        T::zero()
    };
    two_t * T::sample_gamma(p.mu() + T::one() + n, rng)
}

/// Outcome of scanning a grid path for the first passage through a level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitScan<T> {
    /// Interpolated crossing time, absent when the horizon was reached first.
    pub time: Option<T>,
    /// Grid time at which the scan stopped (crossing detected or horizon).
    pub stop_time: T,
    /// Process value at `stop_time`.
    pub stop_value: T,
}

/// Simulates BESQ from `x0` on the grid `k * step` up to `horizon` and stops
/// at the first grid point on the far side of `y` (or touching it). The
/// crossing time is linearly interpolated between the bracketing points.
///
/// When `x0 == y` the scan measures the first return: the side is taken from
/// the value after the first step.
pub fn scan_for_hit<T: Scalar, R: Rng + ?Sized>(
    x0: T,
    y: T,
    p: &BesqParams<T>,
    step: T,
    horizon: T,
    rng: &mut R,
) -> HitScan<T> {
    let mut prev_t = T::zero();
    let mut prev = x0;
    let mut k = 0u64;
    let mut side = sign(x0 - y);
    loop {
        k += 1;
        let t = (T::lit(k as f64) * step).min(horizon);
        let v = transition(prev, t - prev_t, p, rng);
        if side == T::zero() {
            side = sign(v - y);
        } else if (v - y) * side <= T::zero() {
            let frac = (prev - y) / (prev - v);
            return HitScan {
                time: Some(prev_t + (t - prev_t) * frac),
                stop_time: t,
                stop_value: v,
            };
        }
        if t >= horizon {
            return HitScan {
                time: None,
                stop_time: t,
                stop_value: v,
            };
        }
        prev_t = t;
        prev = v;
    }
}

#[inline]
fn sign<T: Scalar>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}
