//! ζ(z) and its truncations.
//!
//! Heights up to [`EvalConfig::em_height_cutoff`] use Euler–Maclaurin
//! summation; above that the Riemann–Siegel expansion takes over.

mod euler_maclaurin;
pub(crate) mod kernel;
mod partial;
mod riemann_siegel;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{chi, ComplexPoint};
use crate::{Error, Result};

pub use partial::{
    core, core_a, eta_prefactor, head_length, partial_sums, zeta_alpha, PartialSumSeries, CORE_ALPHA,
};
pub(crate) use partial::{core_a_inner, shifted_head};
pub use riemann_siegel::{zeta_riemann_siegel, MIN_HEIGHT as RS_MIN_HEIGHT};

/// Largest |Im z| accepted by [`zeta`].
pub const MAX_HEIGHT: f64 = 1e11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Height above which Riemann–Siegel replaces Euler–Maclaurin.
    pub em_height_cutoff: f64,
    /// Euler–Maclaurin main-sum length is `max(30, ⌈factor·|Im z|⌉)`.
    pub em_terms_factor: f64,
    pub target_rel_err: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            em_height_cutoff: 1e6,
            em_terms_factor: 1.0,
            target_rel_err: 1e-9,
        }
    }
}

impl EvalConfig {
    /// Builds a checked configuration.
    pub fn new(em_height_cutoff: f64, em_terms_factor: f64, target_rel_err: f64) -> Result<Self> {
        let cfg = EvalConfig {
            em_height_cutoff,
            em_terms_factor,
            target_rel_err,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.em_height_cutoff > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "em_height_cutoff must be positive, got {}",
                self.em_height_cutoff
            )));
        }
        if !(self.em_terms_factor >= 0.5) || !self.em_terms_factor.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "em_terms_factor must be at least 0.5, got {}",
                self.em_terms_factor
            )));
        }
        if !(self.target_rel_err > 0.0 && self.target_rel_err < 1e-3) {
            return Err(Error::InvalidSpec(format!(
                "target_rel_err must lie in (0, 1e-3), got {}",
                self.target_rel_err
            )));
        }
        Ok(())
    }

    pub fn route(&self, height: f64) -> Route {
        if height.abs() <= self.em_height_cutoff {
            Route::EulerMaclaurin
        } else {
            Route::RiemannSiegel
        }
    }

    pub(crate) fn em_length(&self, height: f64) -> usize {
        euler_maclaurin::main_sum_length(height, self.em_terms_factor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Route {
    EulerMaclaurin,
    RiemannSiegel,
}

fn check_height(z: ComplexPoint) -> Result<ComplexPoint> {
    let z = z.check_finite()?;
    if z.im.abs() > MAX_HEIGHT {
        return Err(Error::HeightOverflow {
            height: z.im.abs(),
            max: MAX_HEIGHT,
        });
    }
    if z.re == 1.0 && z.im == 0.0 {
        return Err(Error::Pole("zeta has a pole at z = 1".into()));
    }
    Ok(z)
}

/// ζ(z).
///
/// Real parts below −1 go through the functional equation so the
/// Dirichlet terms never grow; everything else is summed directly.
///
/// ```
/// use zeta_lab::special::ComplexPoint;
/// use zeta_lab::zeta::{zeta, EvalConfig};
///
/// let v = zeta(ComplexPoint::new(2.0, 0.0)?, &EvalConfig::default())?;
/// assert!((v.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
/// # Ok::<(), zeta_lab::Error>(())
/// ```
pub fn zeta(z: ComplexPoint, cfg: &EvalConfig) -> Result<Complex64> {
    let z = check_height(z)?;
    if z.re < -1.0 {
        let reflected = zeta(z.reflect(), cfg)?;
        let c = chi(z)?;
        let v = crate::special::LogMagPhase::from_complex(reflected).mul(c);
        return v.to_complex();
    }
    match cfg.route(z.im) {
        Route::EulerMaclaurin => Ok(zeta_euler_maclaurin(z, cfg)),
        Route::RiemannSiegel => zeta_riemann_siegel(z, cfg.target_rel_err),
    }
}

/// ζ(z) by Euler–Maclaurin regardless of height; `z` must not be 1.
pub fn zeta_euler_maclaurin(z: ComplexPoint, cfg: &EvalConfig) -> Complex64 {
    euler_maclaurin::zeta_em(z.re, z.im, cfg.em_length(z.im))
}

/// ζ(σ + iy) for every σ in `sigmas`, sharing work across the row.
pub fn zeta_row(sigmas: &[f64], y: f64, cfg: &EvalConfig) -> Result<Vec<Complex64>> {
    let probe = check_height(ComplexPoint::new(0.0, y)?)?;
    for &s in sigmas {
        check_height(ComplexPoint::new(s, y)?)?;
    }
    if cfg.route(probe.im) == Route::EulerMaclaurin && sigmas.iter().all(|&s| s >= -1.0) {
        return Ok(euler_maclaurin::zeta_em_row(sigmas, y, cfg.em_length(y)));
    }
    sigmas.iter().map(|&s| zeta(ComplexPoint { re: s, im: y }, cfg)).collect()
}

/// Values at `right` and `right − δ`, with their difference kept accurate
/// when the two values nearly coincide.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ShiftedPair {
    pub right: Complex64,
    /// `left − right`.
    pub diff: Complex64,
}

impl ShiftedPair {
    pub fn left(&self) -> Complex64 {
        self.right + self.diff
    }

    /// `|left| − |right|` without cancellation.
    pub fn modulus_gap(&self) -> f64 {
        let (l, r) = (self.left().norm(), self.right.norm());
        let num = 2.0 * (self.diff * self.right.conj()).re + self.diff.norm_sqr();
        if l + r == 0.0 {
            0.0
        } else {
            num / (l + r)
        }
    }
}

impl std::ops::Sub for ShiftedPair {
    type Output = ShiftedPair;
    fn sub(self, o: ShiftedPair) -> ShiftedPair {
        ShiftedPair {
            right: self.right - o.right,
            diff: self.diff - o.diff,
        }
    }
}

impl std::ops::Mul<f64> for ShiftedPair {
    type Output = ShiftedPair;
    fn mul(self, k: f64) -> ShiftedPair {
        ShiftedPair {
            right: self.right * k,
            diff: self.diff * k,
        }
    }
}

/// ζ at `right` and at `right − delta` (a real shift).
pub(crate) fn zeta_shifted(right: ComplexPoint, delta: f64, cfg: &EvalConfig) -> Result<ShiftedPair> {
    let right = check_height(right)?;
    let left = check_height(ComplexPoint::new(right.re - delta, right.im)?)?;
    let em = cfg.route(right.im) == Route::EulerMaclaurin && left.re >= -1.0;
    if em && !(right.re == 1.0 && right.im == 0.0) && !(left.re == 1.0 && left.im == 0.0) {
        let (r, d) = euler_maclaurin::zeta_em_shifted(right.re, right.im, delta, cfg.em_length(right.im));
        return Ok(ShiftedPair { right: r, diff: d });
    }
    let r = zeta(right, cfg)?;
    let l = zeta(left, cfg)?;
    Ok(ShiftedPair { right: r, diff: l - r })
}
