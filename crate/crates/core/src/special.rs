//! Modified Bessel function of the first kind in the log domain, and log-gamma.
//!
//! The transition densities multiply `I_mu(z)` by `exp(-z)`-sized factors with
//! `z` as large as `sqrt(x y) / t`, which overflows long before the product
//! does. Everything here therefore returns logarithms (or the exponentially
//! scaled value), and callers combine exponents before calling `exp`.
//!
//! Two evaluation branches share the work:
//!
//! * below `z* = max(30, 10 mu)` the ascending series
//!   `(z/2)^mu sum_k (z^2/4)^k / (k! Gamma(mu + k + 1))`, whose terms are all
//!   positive and so lose no precision to cancellation;
//! * above `z*` the large-argument (Hankel) expansion
//!   `e^z / sqrt(2 pi z) sum_k (-1)^k a_k(mu) / z^k`, truncated at the smallest
//!   term.

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Order `mu` of `I_mu`. Finite and nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselOrder<T>(T);

impl<T: Scalar> BesselOrder<T> {
    pub fn new(mu: T) -> Result<Self> {
        if !mu.is_finite() || mu < T::zero() {
            return Err(domain("Bessel order must be finite and >= 0", mu));
        }
        Ok(Self(mu))
    }

    #[inline]
    pub fn mu(self) -> T {
        self.0
    }
}

/// Argument at which evaluation switches from the series to the asymptotic expansion.
#[inline]
pub fn series_threshold<T: Scalar>(order: BesselOrder<T>) -> T {
    T::lit(30.0).max(T::lit(10.0) * order.mu())
}

/// `log I_mu(z)` for `z >= 0`. Returns `-inf` for `z = 0, mu > 0`.
pub fn log_bessel_i<T: Scalar>(order: BesselOrder<T>, z: T) -> Result<T> {
    check_argument(z)?;
    if z == T::zero() {
        return Ok(at_zero(order));
    }
    if z < series_threshold(order) {
        Ok(log_series(order, z))
    } else {
        Ok(z + log_asymptotic_scaled(order, z))
    }
}

/// `exp(-z) I_mu(z)`, computed without forming `I_mu(z)`.
pub fn bessel_i_scaled<T: Scalar>(order: BesselOrder<T>, z: T) -> Result<T> {
    log_bessel_i_scaled(order, z).map(T::exp)
}

/// `log(exp(-z) I_mu(z))`. Exact cancellation of the `z` term on the
/// asymptotic branch keeps this accurate for very large arguments.
pub fn log_bessel_i_scaled<T: Scalar>(order: BesselOrder<T>, z: T) -> Result<T> {
    check_argument(z)?;
    if z == T::zero() {
        return Ok(at_zero(order));
    }
    if z < series_threshold(order) {
        Ok(log_series(order, z) - z)
    } else {
        Ok(log_asymptotic_scaled(order, z))
    }
}

/// `log Gamma(x)` for `x > 0` (Lanczos, g = 7, nine terms).
pub fn log_gamma<T: Scalar>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(domain("log_gamma needs a finite positive argument", x));
    }
    Ok(lanczos_log_gamma(x))
}

/// Ratio `I_{mu+1}(z) / I_mu(z)` for `z > 0`.
pub fn bessel_i_ratio<T: Scalar>(order: BesselOrder<T>, z: T) -> Result<T> {
    let next = BesselOrder::new(order.mu() + T::one())?;
    Ok((log_bessel_i_scaled(next, z)? - log_bessel_i_scaled(order, z)?).exp())
}

fn check_argument<T: Scalar>(z: T) -> Result<()> {
    if z.is_nan() || z < T::zero() {
        return Err(domain("Bessel argument must be >= 0", z));
    }
    Ok(())
}

fn at_zero<T: Scalar>(order: BesselOrder<T>) -> T {
    if order.mu() == T::zero() {
        T::zero()
    } else {
        T::neg_infinity()
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_log_gamma<T: Scalar>(x: T) -> T {
    if x < T::lit(0.5) {
        // Gamma(x) = Gamma(x + 1) / x keeps the series in its accurate range.
        return lanczos_log_gamma(x + T::one()) - x.ln();
    }
    let xm1 = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (xm1 + T::lit(i as f64));
    }
    let t = xm1 + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::TAU()).ln() + (xm1 + T::lit(0.5)) * t.ln() - t + acc.ln()
}

fn log_series<T: Scalar>(order: BesselOrder<T>, z: T) -> T {
    let mu = order.mu();
    let half = z * T::lit(0.5);
    let lead = mu * half.ln() - lanczos_log_gamma(mu + T::one());
    let q = half * half;
    let eps = T::epsilon() * T::lit(0.08); // about 1e-17 for f64
    // Rescale before the running sum can overflow; `offset` collects the log of
    // the scale factors removed.
    let ceiling = T::max_value().sqrt();
    let mut offset = T::zero();
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * q / (k * (mu + k));
        sum = sum + term;
        if term <= eps * sum {
            break;
        }
        if sum > ceiling {
            sum = sum / ceiling;
            term = term / ceiling;
            offset = offset + ceiling.ln();
        }
    }
    lead + sum.ln() + offset
}

/// `log(exp(-z) I_mu(z))` from the Hankel expansion; valid for `z >= z*`.
fn log_asymptotic_scaled<T: Scalar>(order: BesselOrder<T>, z: T) -> T {
    let mu = order.mu();
    let four_mu2 = T::lit(4.0) * mu * mu;
    let eps = T::epsilon() * T::lit(0.08);
    let mut term = T::one();
    let mut sum = T::one();
    let mut prev_abs = T::infinity();
    let mut k = T::zero();
    loop {
        k = k + T::one();
        let odd = T::lit(2.0) * k - T::one();
        let factor = -(four_mu2 - odd * odd) / (T::lit(8.0) * k * z);
        if factor == T::zero() {
            // Half-integer order: the expansion terminates and is exact.
            break;
        }
        let next = term * factor;
        let next_abs = next.abs();
        // Past 2k - 1 > 2 mu the terms shrink until the asymptotic divergence
        // sets in; stop at the smallest one.
        if odd > T::lit(2.0) * mu && next_abs > prev_abs {
            break;
        }
        sum = sum + next;
        term = next;
        prev_abs = next_abs;
        if next_abs <= eps * sum.abs() {
            break;
        }
    }
    sum.ln() - T::lit(0.5) * (T::TAU() * z).ln()
}
