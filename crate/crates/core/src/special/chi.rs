use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use super::dd::{self, LN_2PI, LN_PI};
use super::gamma::{half_pi_abs, log_gamma_parts};
use super::{ComplexPoint, LogMagPhase};
use crate::error::{Error, Result};

/// Above this |Im z| the trigonometric factor is taken from its dominant
/// exponential.
const DOMINANT_EXP_HEIGHT: f64 = 30.0;

/// log of sin(w) or cos(w) at w = πz/2, split as `big + rest` with
/// `big = (π/2)|Im z|`.
struct TrigLog {
    big: f64,
    rest: f64,
    phase: f64,
}

fn trig_log(z: ComplexPoint, cosine: bool) -> TrigLog {
    let u = FRAC_PI_2 * z.re;
    if z.im.abs() > DOMINANT_EXP_HEIGHT {
        // sin w = (e^{iw} - e^{-iw}) / 2i, cos w = (e^{iw} + e^{-iw}) / 2
        let upper = z.im > 0.0;
        // remainder factor (1 ∓ e^{±2iw}), |e^{±2iw}| = e^{-π|y|}
        let small = Complex64::from_polar((-PI * z.im.abs()).exp(), if upper { 2.0 * u } else { -2.0 * u });
        let corr = if cosine { small } else { -small };
        let corr = (Complex64::new(1.0, 0.0) + corr).ln();
        let base_phase = match (cosine, upper) {
            (false, true) => FRAC_PI_2 - u,
            (false, false) => u - FRAC_PI_2,
            (true, true) => -u,
            (true, false) => u,
        };
        TrigLog {
            big: half_pi_abs(z.im),
            rest: -LN_2 + corr.re,
            phase: base_phase + corr.im,
        }
    } else {
        let w = Complex64::new(u, FRAC_PI_2 * z.im);
        let v = if cosine { w.cos() } else { w.sin() };
        TrigLog {
            big: 0.0,
            rest: v.norm().ln(),
            phase: v.arg(),
        }
    }
}

fn is_odd_positive_integer(z: ComplexPoint) -> bool {
    z.im == 0.0 && z.re >= 1.0 && z.re.fract() == 0.0 && (z.re % 2.0) == 1.0
}

fn is_nonpositive_even_integer(z: ComplexPoint) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 && (z.re % 2.0) == 0.0
}

/// χ(z) = 2^z π^{z−1} sin(πz/2) Γ(1−z), the factor in ζ(z) = χ(z) ζ(1−z).
///
/// Computed entirely in log-space. Left of `Re z = 1/2` the defining product
/// is used; to the right the equivalent `(2π)^z / (2 cos(πz/2) Γ(z))`, so that
/// neither form meets a removable singularity. The exponential growth of the
/// trigonometric factor and the decay of Γ cancel exactly.
///
/// χ has poles at z = 1, 3, 5, … (reported as domain errors) and zeros at
/// z = 0, −2, −4, … (returned with `log_mag = −∞`).
pub fn chi(z: ComplexPoint) -> Result<LogMagPhase> {
    let z = z.check_finite()?;
    if is_odd_positive_integer(z) {
        return Err(Error::Domain(format!("chi has a pole at z = {}", z.re)));
    }
    if is_nonpositive_even_integer(z) {
        return Ok(LogMagPhase {
            log_mag: f64::NEG_INFINITY,
            phase: 0.0,
        });
    }
    // the phase contributed by 2^z π^z, i.e. y ln(2π)
    let power_phase = if (z.im * LN_2PI.hi).abs() > 1e3 {
        dd::mul_mod_two_pi(z.im, LN_2PI)
    } else {
        z.im * LN_2PI.hi
    };

    if z.re <= 0.5 {
        let trig = trig_log(z, false);
        let gamma = log_gamma_parts(z.reflect())?;
        let log_mag = z.re * LN_2 + (z.re - 1.0) * LN_PI.hi + (trig.big + gamma.big) + trig.rest
            + gamma.rest;
        let phase = power_phase + dd::reduce_phase(trig.phase) + gamma.phase;
        Ok(LogMagPhase::new(log_mag, phase))
    } else {
        let trig = trig_log(z, true);
        let gamma = log_gamma_parts(z)?;
        let log_mag = z.re * LN_2PI.hi - LN_2 - (trig.big + gamma.big) - trig.rest - gamma.rest;
        let phase = power_phase - dd::reduce_phase(trig.phase) - gamma.phase;
        Ok(LogMagPhase::new(log_mag, phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im).unwrap()
    }

    #[test]
    fn chi_half_is_one() {
        let v = chi(pt(0.5, 0.0)).unwrap();
        assert!(v.log_mag.abs() < 1e-14);
        assert!(v.phase.abs() < 1e-14);
    }

    #[test]
    fn modulus_one_on_critical_line() {
        for y in [10.0, 100.0, 1e4, 14.1347, 2.5e6, 1e9, 1e11] {
            let v = chi(pt(0.5, y)).unwrap();
            assert!(v.log_mag.abs() < 1e-9, "{y}: {}", v.log_mag);
        }
    }

    #[test]
    fn off_line_reference_value() {
        // 50-digit reference for χ(0.05 + 1000i)
        let v = chi(pt(0.05, 1000.0)).unwrap();
        assert!((v.log_mag - 2.2814451920952558).abs() < 1e-10);
        assert!(dd::reduce_phase(v.phase - 2.41132422631384).abs() < 1e-10);
        // |χ(σ+it)| ≈ (t/2π)^{1/2-σ}
        let asym = 0.45 * (1000.0 / (2.0 * PI)).ln();
        assert!((v.log_mag - asym).abs() < 1e-3);
    }

    #[test]
    fn special_integers() {
        assert!(matches!(chi(pt(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(chi(pt(3.0, 0.0)).is_err());
        assert_eq!(chi(pt(0.0, 0.0)).unwrap().log_mag, f64::NEG_INFINITY);
        // χ(2) = ζ(2)/ζ(-1) = -2π²
        let v = chi(pt(2.0, 0.0)).unwrap();
        assert!((v.log_mag - (2.0 * PI * PI).ln()).abs() < 1e-13);
        assert!((v.phase.abs() - PI).abs() < 1e-13);
    }

    #[test]
    fn involution_on_random_strip_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let z = pt(rng.gen_range(0.0..1.0), rng.gen_range(-1e4..1e4));
            let a = chi(z).unwrap();
            let b = chi(z.reflect()).unwrap();
            assert!((a.log_mag + b.log_mag).abs() < 1e-8, "{z:?}");
            assert!(dd::reduce_phase(a.phase + b.phase).abs() < 1e-8, "{z:?}");
        }
    }

    #[test]
    fn both_forms_agree_across_the_seam() {
        // just left and right of Re z = 1/2 the two formulas must be continuous
        for y in [0.7, 25.0, 31.0, 5000.0] {
            let l = chi(pt(0.5 - 1e-9, y)).unwrap();
            let r = chi(pt(0.5 + 1e-9, y)).unwrap();
            assert!((l.log_mag - r.log_mag).abs() < 1e-7, "{y}");
            assert!(dd::reduce_phase(l.phase - r.phase).abs() < 1e-7, "{y}");
        }
    }
}
