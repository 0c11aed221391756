//! Transition densities in the log domain.

use crate::error::{domain, Result};
use crate::process::BesqParams;
use crate::scalar::Scalar;
use crate::special::{bessel_i_ratio, log_bessel_i_scaled, log_gamma};

/// Density of the Bessel process (the square root of BESQ) at `x` after time
/// `t` from `v`:
/// `p_t(v, x) = (1/t) (x/v)^mu x exp(-(x^2 + v^2) / 2t) I_mu(x v / t)`.
pub fn bessel_transition_density<T: Scalar>(v: T, x: T, t: T, p: &BesqParams<T>) -> Result<T> {
    positive("start v must be > 0", v)?;
    positive("end point x must be > 0", x)?;
    positive("time t must be > 0", t)?;
    let mu = p.mu();
    let z = x * v / t;
    let d = x - v;
    let log_p = -t.ln() + mu * (x / v).ln() + x.ln() - d * d / (T::lit(2.0) * t)
        + log_bessel_i_scaled(p.order(), z)?;
    Ok(log_p.exp())
}

/// Density of BESQ(mu) at `y` after time `t` from `x`.
///
/// For `x > 0`
/// `q_t(x, y) = (1/2t) (y/x)^(mu/2) exp(-(x + y) / 2t) I_mu(sqrt(x y) / t)`;
/// at `x = 0` the Gamma limit `y^mu exp(-y/2t) / ((2t)^(mu+1) Gamma(mu+1))`.
/// At `y = 0` the continuous extension is returned (zero unless `mu = 0`).
pub fn besq_transition_density<T: Scalar>(x: T, y: T, t: T, p: &BesqParams<T>) -> Result<T> {
    log_besq_transition_density(x, y, t, p).map(T::exp)
}

/// `log q_t(x, y)`; `-inf` where the density vanishes.
pub fn log_besq_transition_density<T: Scalar>(x: T, y: T, t: T, p: &BesqParams<T>) -> Result<T> {
    nonnegative("start x must be >= 0", x)?;
    nonnegative("end point y must be >= 0", y)?;
    positive("time t must be > 0", t)?;
    Ok(log_q_unchecked(x, y, t, p))
}

pub(crate) fn log_q_unchecked<T: Scalar>(x: T, y: T, t: T, p: &BesqParams<T>) -> T {
    let mu = p.mu();
    let two_t = T::lit(2.0) * t;
    if x == T::zero() {
        if y == T::zero() {
            return if mu == T::zero() { -two_t.ln() } else { T::neg_infinity() };
        }
        return mu * y.ln() - y / two_t - (mu + T::one()) * two_t.ln()
            - log_gamma(mu + T::one()).expect("mu + 1 > 0");
    }
    if y == T::zero() {
        return if mu == T::zero() { -two_t.ln() - x / two_t } else { T::neg_infinity() };
    }
    let z = (x * y).sqrt() / t;
    let d = x.sqrt() - y.sqrt();
    -two_t.ln() + T::lit(0.5) * mu * (y / x).ln() - d * d / two_t
        + log_bessel_i_scaled(p.order(), z).expect("z > 0")
}

/// `d q_t(x, y) / dt` from the closed form. With `z = sqrt(x y) / t` and
/// `I_mu' = I_{mu+1} + (mu/z) I_mu`,
/// `dq/dt = q [ (x + y)/(2 t^2) - (mu + 1)/t - (z/t) I_{mu+1}(z)/I_mu(z) ]`.
pub fn besq_density_time_derivative<T: Scalar>(x: T, y: T, t: T, p: &BesqParams<T>) -> Result<T> {
    let log_q = log_besq_transition_density(x, y, t, p)?;
    if log_q == T::neg_infinity() {
        return Ok(T::zero());
    }
    let q = log_q.exp();
    let mu = p.mu();
    let t2 = t * t;
    let z = (x * y).sqrt() / t;
    let ratio_term = if z > T::zero() {
        z / t * bessel_i_ratio(p.order(), z)?
    } else {
        T::zero()
    };
    Ok(q * ((x + y) / (T::lit(2.0) * t2) - (mu + T::one()) / t - ratio_term))
}

fn positive<T: Scalar>(what: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(what, v))
    }
}

fn nonnegative<T: Scalar>(what: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(what, v))
    }
}
