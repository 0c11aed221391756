use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::special::BesselOrder;

/// Index, dimension and starting point of a BESQ process.
///
/// `delta = 2 (mu + 1)` holds exactly because `delta` is always derived from
/// `mu` (or `mu` from `delta`) at construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesqParams<T> {
    mu: T,
    delta: T,
    x0: T,
}

impl<T: Scalar> BesqParams<T> {
    pub fn from_mu(mu: T, x0: T) -> Result<Self> {
        if !mu.is_finite() || mu < T::zero() {
            return Err(domain("index mu must be finite and >= 0", mu));
        }
        Self::checked_start(Self {
            mu,
            delta: T::lit(2.0) * (mu + T::one()),
            x0,
        })
    }

    pub fn from_delta(delta: T, x0: T) -> Result<Self> {
        if !delta.is_finite() || delta < T::lit(2.0) {
            return Err(domain("dimension delta must be finite and >= 2", delta));
        }
        Self::checked_start(Self {
            mu: delta / T::lit(2.0) - T::one(),
            delta,
            x0,
        })
    }

    fn checked_start(p: Self) -> Result<Self> {
        if !p.x0.is_finite() || p.x0 < T::zero() {
            return Err(domain("starting point must be finite and >= 0", p.x0));
        }
        Ok(p)
    }

    /// Same index, new starting point.
    pub fn with_x0(self, x0: T) -> Result<Self> {
        Self::checked_start(Self { x0, ..self })
    }

    #[inline]
    pub fn mu(&self) -> T {
        self.mu
    }

    #[inline]
    pub fn delta(&self) -> T {
        self.delta
    }

    #[inline]
    pub fn x0(&self) -> T {
        self.x0
    }

    #[inline]
    pub fn order(&self) -> BesselOrder<T> {
        BesselOrder::new(self.mu).expect("mu validated at construction")
    }
}
