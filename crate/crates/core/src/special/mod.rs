//! Complex elementary and special functions in log-space: `k^{-z}`, log Γ and
//! the factor χ of the functional equation ζ(z) = χ(z) ζ(1 − z).
//!
//! Values are carried as [`LogMagPhase`] because the factors inside χ reach
//! magnitudes like e^{±π y / 2} at heights y up to 10¹¹, far outside what an
//! `f64` complex number can hold.

mod chi;
pub mod dd;
mod gamma;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chi::chi;
pub use dd::reduce_phase;
pub use gamma::log_gamma;

/// A point `re + im·i` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    /// Builds a point, rejecting NaN and infinite components.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite(format!("{re} + {im}i")));
        }
        Ok(ComplexPoint { re, im })
    }

    pub fn conj(self) -> Self {
        ComplexPoint {
            re: self.re,
            im: -self.im,
        }
    }

    /// The reflected point `1 − z`.
    pub fn reflect(self) -> Self {
        ComplexPoint {
            re: 1.0 - self.re,
            im: -self.im,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub(crate) fn check_finite(self) -> Result<Self> {
        ComplexPoint::new(self.re, self.im)
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(z: ComplexPoint) -> Self {
        z.to_complex()
    }
}

/// Largest `|log_mag|` for which [`LogMagPhase::to_complex`] is allowed.
pub const MAX_CONVERTIBLE_LOG_MAG: f64 = 700.0;

/// A complex number `exp(log_mag) · exp(i·phase)` with `phase` in `(−π, π]`.
///
/// `log_mag == -inf` encodes an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMagPhase {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogMagPhase {
    pub const ONE: LogMagPhase = LogMagPhase {
        log_mag: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        LogMagPhase {
            log_mag,
            phase: reduce_phase(phase),
        }
    }

    pub fn from_complex(c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return LogMagPhase {
                log_mag: f64::NEG_INFINITY,
                phase: 0.0,
            };
        }
        LogMagPhase::new(c.norm().ln(), c.arg())
    }

    /// Converts back to an ordinary complex number.
    ///
    /// Fails when `|log_mag| >= 700`, where `exp` would overflow or flush
    /// to zero.
    pub fn to_complex(self) -> Result<Complex64> {
        if self.log_mag == f64::NEG_INFINITY {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if !(self.log_mag.abs() < MAX_CONVERTIBLE_LOG_MAG) {
            return Err(Error::Domain(format!(
                "log-magnitude {} is outside the convertible range",
                self.log_mag
            )));
        }
        Ok(Complex64::from_polar(self.log_mag.exp(), self.phase))
    }

    pub fn modulus(self) -> f64 {
        self.log_mag.exp()
    }

    pub fn mul(self, other: Self) -> Self {
        LogMagPhase::new(self.log_mag + other.log_mag, self.phase + other.phase)
    }

    pub fn div(self, other: Self) -> Self {
        LogMagPhase::new(self.log_mag - other.log_mag, self.phase - other.phase)
    }

    pub fn inv(self) -> Self {
        LogMagPhase::new(-self.log_mag, -self.phase)
    }
}

/// Above this `|Im(z) · ln k|` the phase of `k^{-z}` is formed in
/// double-double before reduction.
pub(crate) const DD_PHASE_THRESHOLD: f64 = 1e8;

/// `k^{-z}` for a positive integer `k`.
///
/// # Panics
///
/// If `k == 0`.
pub fn complex_pow_k(k: u64, z: ComplexPoint) -> LogMagPhase {
    assert!(k >= 1, "complex_pow_k needs k >= 1");
    if k == 1 {
        return LogMagPhase::ONE;
    }
    let ln_k = (k as f64).ln();
    let log_mag = -z.re * ln_k;
    let raw = z.im * ln_k;
    let phase = if raw.abs() <= DD_PHASE_THRESHOLD {
        reduce_phase(-raw)
    } else {
        dd::mul_mod_two_pi(-z.im, dd::DoubleDouble::ln(k as f64))
    };
    LogMagPhase { log_mag, phase }
}
