use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::mc::draws;
use crate::process::{transition, BesqParams};
use crate::rng::derive_seed;
use crate::scalar::Scalar;
use crate::stats::mean_and_se;

use super::{pair_unchecked, require_nonnegative, require_unit_start};

/// Bounded test functions for the joint-law identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "c", rename_all = "snake_case")]
pub enum TestFn {
    /// `x -> exp(-x)`
    Exp,
    /// `x -> min(1, x)`
    MinOne,
    /// `x -> 1{x <= c}`
    Indicator(f64),
    /// `x -> 1`
    One,
}

impl TestFn {
    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        match self {
            TestFn::Exp => (-x).exp(),
            TestFn::MinOne => x.min(1.0),
            TestFn::Indicator(c) => f64::from(u8::from(x <= c)),
            TestFn::One => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Pooled standard error of `lhs - rhs`.
    pub se: f64,
}

/// Monte Carlo of both sides of
/// `E f(X(t,a)) g(R(t+a)) = E 1{R1_t >= 1} f(R2_{a/R1_t} R3_{a(R1_t-1)/(R1_t R2_{a/R1_t})}) g(R1_t R2_{a/R1_t})
///                        + E 1{R1_t < 1} f(R2_a) g(R1_t R2_a R3_{(1-R1_t)a/(R1_t R2_a)})`
/// where `R1, R2, R3` are independent BESQ from 1.
pub fn triple_identity_check(
    f: TestFn,
    g: TestFn,
    t: f64,
    a: f64,
    p: &BesqParams<f64>,
    n: usize,
    seed: u64,
) -> Result<TripleCheck> {
    require_unit_start(p)?;
    require_nonnegative("base time t must be >= 0", t)?;
    require_nonnegative("a must be >= 0", a)?;
    if n < 2 {
        return Err(domain("need at least two draws", n as f64));
    }
    let lhs = draws(derive_seed(seed, "lhs"), n, |rng| {
        let s = pair_unchecked(t, a, p, rng);
        f.eval(s.check_r) * g.eval(s.u)
    });
    let rhs = draws(derive_seed(seed, "rhs"), n, |rng| {
        let (fv, gv) = three_process_arguments(t, a, p, rng);
        f.eval(fv) * g.eval(gv)
    });
    let (l, se_l) = mean_and_se(&lhs);
    let (r, se_r) = mean_and_se(&rhs);
    Ok(TripleCheck {
        lhs: l,
        rhs: r,
        se: (se_l * se_l + se_r * se_r).sqrt(),
    })
}

/// Arguments of `f` and `g` on the right-hand side, from three independent
/// processes started at 1.
fn three_process_arguments<R: Rng + ?Sized>(t: f64, a: f64, p: &BesqParams<f64>, rng: &mut R) -> (f64, f64) {
    let r1 = transition(1.0, t, p, rng);
    if r1 >= 1.0 {
        let r2 = transition(1.0, a / r1, p, rng);
        let r3 = transition(1.0, a * (r1 - 1.0) / (r1 * r2), p, rng);
        (r2 * r3, r1 * r2)
    } else {
        let r2 = transition(1.0, a, p, rng);
        let r3 = transition(1.0, (1.0 - r1) * a / (r1 * r2), p, rng);
        (r2, r1 * r2 * r3)
    }
}

/// Both sides of `t^2 R(1/t + a) = S(t^2 a)` in law, with `S` a BESQ started
/// at `t^2 R'(1/t)` for an independent copy `R'`.
pub fn time_inversion_samples<T: Scalar>(
    t: T,
    a: T,
    p: &BesqParams<T>,
    n: usize,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    require_unit_start(p)?;
    if !(t > T::zero()) || !t.is_finite() {
        return Err(domain("t must be > 0", t));
    }
    require_nonnegative("a must be >= 0", a)?;
    let t2 = t * t;
    let lhs = draws(derive_seed(seed, "lhs"), n, |rng| {
        let r = transition(T::one(), t.recip(), p, rng);
        t2 * transition(r, a, p, rng)
    });
    let rhs = draws(derive_seed(seed, "rhs"), n, |rng| {
        let hat = t2 * transition(T::one(), t.recip(), p, rng);
        transition(hat, t2 * a, p, rng)
    });
    Ok((lhs, rhs))
}

/// Draws for both sides of `R(A_t + s) = R'^W(s)`, `W = exp(2 B_t + 2 mu t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LampertiSamples<T> {
    pub lhs: Vec<T>,
    pub rhs: Vec<T>,
    /// Left-hand draws whose clock had not reached `A_t + s` after
    /// [`LAMPERTI_CLOCK_CAP`] extra time units.
    pub fallbacks: usize,
}

/// Brownian time allowed for the clock to gain `s` after `t`. The time needed
/// has tail `P(T > u) ~ u^(-1/2)`, so an uncapped walk has unbounded cost.
pub const LAMPERTI_CLOCK_CAP: f64 = 20.0;

/// Left: Brownian motion with step `step` drives the clock `A` (trapezoid
/// rule) past `A_t + s`; the crossing time `k` is interpolated within the
/// step and `B_k` drawn from the Brownian bridge, giving
/// `R(A_t + s) = exp(2 B_k + 2 mu k)`. A walk still short of the target after
/// the cap finishes with an exact BESQ transition over the clock time left.
/// Right: an independent lognormal `W'` followed by one exact BESQ transition
/// of length `s`.
pub fn lamperti_identity_samples<T: Scalar>(
    t: T,
    s: T,
    mu: T,
    step: T,
    n: usize,
    seed: u64,
) -> Result<LampertiSamples<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(domain("t must be > 0", t));
    }
    require_nonnegative("s must be >= 0", s)?;
    if !(step > T::zero()) || step > t {
        return Err(domain("need 0 < step <= t", step));
    }
    let p = BesqParams::from_mu(mu, T::one())?;
    let left = draws(derive_seed(seed, "lhs"), n, |rng| lamperti_clock_value(t, s, &p, step, rng));
    let rhs = draws(derive_seed(seed, "rhs"), n, |rng| {
        let two = T::lit(2.0);
        let w = (two * t.sqrt() * T::sample_standard_normal(rng) + two * mu * t).exp();
        transition(w, s, &p, rng)
    });
    Ok(LampertiSamples {
        fallbacks: left.iter().filter(|(_, capped)| *capped).count(),
        lhs: left.into_iter().map(|(v, _)| v).collect(),
        rhs,
    })
}

fn lamperti_clock_value<T: Scalar, R: Rng + ?Sized>(
    t: T,
    s: T,
    p: &BesqParams<T>,
    step: T,
    rng: &mut R,
) -> (T, bool) {
    let two = T::lit(2.0);
    let mu = p.mu();
    let expo = |b: T, u: T| (two * b + two * mu * u).exp();
    let (mut u, mut b, mut a) = (T::zero(), T::zero(), T::zero());
    let mut e = T::one();
    let mut k = 0u64;
    // Up to t on the grid, with a shorter last step if t is off-grid.
    while u < t {
        k += 1;
        let next = (T::lit(k as f64) * step).min(t);
        let dt = next - u;
        b = b + dt.sqrt() * T::sample_standard_normal(rng);
        let next_e = expo(b, next);
        a = a + dt * (e + next_e) / two;
        u = next;
        e = next_e;
    }
    if s == T::zero() {
        return (e, false);
    }
    let target = a + s;
    let give_up = u + T::lit(LAMPERTI_CLOCK_CAP);
    while u < give_up {
        let nb = b + step.sqrt() * T::sample_standard_normal(rng);
        let nu = u + step;
        let ne = expo(nb, nu);
        let na = a + step * (e + ne) / two;
        if na >= target {
            let theta = (target - a) / (na - a);
            let bridge_sd = (theta * (T::one() - theta) * step).sqrt();
            let bk = b + theta * (nb - b) + bridge_sd * T::sample_standard_normal(rng);
            return (expo(bk, u + theta * step), false);
        }
        u = nu;
        b = nb;
        a = na;
        e = ne;
    }
    (transition(e, target - a, p, rng), true)
}
