use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::for_each_term;
use super::{zeta, EvalConfig, ShiftedPair};
use crate::special::{complex_pow_k, ComplexPoint};
use crate::{Error, Result};

/// The α of the core function C(z) = |ζ_α(z)|.
pub const CORE_ALPHA: f64 = 0.8;

const PREFACTOR_GUARD: f64 = 1e-12;

/// Raw partial sums of the eta series for ζ.
///
/// `values[n]` is S_n(z) for `n = 0..=n_max`, with `values[0] = S_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSumSeries {
    pub z: ComplexPoint,
    pub values: Vec<Complex64>,
    pub prefactor: Complex64,
}

impl PartialSumSeries {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// |S_n| for n = 1..=n_max.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values[1..].iter().map(|v| v.norm()).collect()
    }
}

fn two_pow_one_minus(z: ComplexPoint) -> Complex64 {
    // 2^{1−z} = 2^{−(z−1)}
    let v = complex_pow_k(2, ComplexPoint { re: z.re - 1.0, im: z.im });
    Complex64::from_polar(v.log_mag.exp(), v.phase)
}

/// 1 / (1 − 2^{1−z}).
pub fn eta_prefactor(z: ComplexPoint) -> Result<Complex64> {
    let z = z.check_finite()?;
    let denom = 1.0 - two_pow_one_minus(z);
    if denom.norm() < PREFACTOR_GUARD {
        return Err(Error::PrefactorSingularity { re: z.re, im: z.im });
    }
    Ok(1.0 / denom)
}

/// Σ_{k=1}^{m} (−1)^{k+1} k^{−z}, without the prefactor.
pub(crate) fn alternating_head(z: ComplexPoint, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_term(z.im, 1, m, |k, l, c, s| {
        let mag = (-z.re * l).exp();
        let term = Complex64::new(mag * c, -mag * s);
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    });
    acc
}

/// S_1(z), …, S_{n_max}(z) exactly as the alternating series defines them.
pub fn partial_sums(z: ComplexPoint, n_max: usize) -> Result<PartialSumSeries> {
    if n_max == 0 {
        return Err(Error::Domain("partial_sums needs n_max >= 1".into()));
    }
    let prefactor = eta_prefactor(z)?;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(Complex64::new(0.0, 0.0));
    let mut raw = Complex64::new(0.0, 0.0);
    for_each_term(z.im, 1, n_max, |k, l, c, s| {
        let mag = (-z.re * l).exp();
        let term = Complex64::new(mag * c, -mag * s);
        if k % 2 == 1 {
            raw += term;
        } else {
            raw -= term;
        }
        values.push(prefactor * raw);
    });
    Ok(PartialSumSeries { z, values, prefactor })
}

/// ⌊(1−α)·y⌋, snapping products that land within rounding noise of an
/// integer (1 − 0.8 is not exactly 0.2 in binary).
pub fn head_length(alpha: f64, y: f64) -> usize {
    let v = (1.0 - alpha) * y;
    if v <= 0.0 {
        return 0;
    }
    let r = v.round();
    if (v - r).abs() <= 8.0 * f64::EPSILON * v.max(1.0) {
        r as usize
    } else {
        v.floor() as usize
    }
}

fn check_alpha(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn check_upper(z: ComplexPoint) -> Result<ComplexPoint> {
    let z = z.check_finite()?;
    if z.im < 0.0 {
        return Err(Error::Domain(format!("truncations need Im(z) >= 0, got {}", z.im)));
    }
    Ok(z)
}

/// prefactor · Σ_{k≤m} (−1)^{k+1} k^{−z}; zero when `m = 0`.
fn scaled_head(z: ComplexPoint, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(eta_prefactor(z)? * alternating_head(z, m))
}

/// ζ_α(z): the eta series with its first ⌊(1−α)·Im z⌋ terms removed,
/// evaluated as ζ(z) − S_{K−1}(z).
pub fn zeta_alpha(z: ComplexPoint, alpha: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_alpha("alpha", alpha)?;
    let z = check_upper(z)?;
    let head = scaled_head(z, head_length(alpha, z.im))?;
    Ok(zeta(z, cfg)? - head)
}

/// ζ_{0.8}(z) + a · S_{⌊0.2·Im z⌋}(z), the value inside C_a.
pub(crate) fn core_a_inner(z: ComplexPoint, a: f64, cfg: &EvalConfig) -> Result<Complex64> {
    check_alpha("a", a)?;
    let z = check_upper(z)?;
    let head = scaled_head(z, head_length(CORE_ALPHA, z.im))?;
    Ok(zeta(z, cfg)? - head + a * head)
}

/// The core C(z) = |ζ_{0.8}(z)|.
pub fn core(z: ComplexPoint, cfg: &EvalConfig) -> Result<f64> {
    Ok(zeta_alpha(z, CORE_ALPHA, cfg)?.norm())
}

/// C_a(z), interpolating between the core (a = 0) and |ζ(z)| (a = 1).
pub fn core_a(z: ComplexPoint, a: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(core_a_inner(z, a, cfg)?.norm())
}

/// prefactor·head at `right` and at `right − delta`, both with `m` terms.
pub(crate) fn shifted_head(right: ComplexPoint, delta: f64, m: usize) -> Result<ShiftedPair> {
    let zero = Complex64::new(0.0, 0.0);
    if m == 0 {
        return Ok(ShiftedPair { right: zero, diff: zero });
    }
    let left = ComplexPoint::new(right.re - delta, right.im)?;
    let pb = eta_prefactor(right)?;
    let pa = eta_prefactor(left)?;
    let mut sum_b = zero;
    let mut sum_d = zero;
    for_each_term(right.im, 1, m, |k, l, c, s| {
        let mag = (-right.re * l).exp();
        let mut term = Complex64::new(mag * c, -mag * s);
        if k % 2 == 0 {
            term = -term;
        }
        sum_b += term;
        sum_d += term * (delta * l).exp_m1();
    });
    // pa − pb = 2^{1−b} (2^δ − 1) pa pb
    let pref_diff = two_pow_one_minus(right) * (delta * std::f64::consts::LN_2).exp_m1() * pa * pb;
    Ok(ShiftedPair {
        right: pb * sum_b,
        diff: pref_diff * (sum_b + sum_d) + pb * sum_d,
    })
}
