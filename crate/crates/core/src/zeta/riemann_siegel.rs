//! General-σ Riemann–Siegel expansion (Arias de Reyna's form):
//! ζ(s) = R(s) + χ(s) · conj(R(1 − conj s)), each R a main sum of ⌊√(t/2π)⌋
//! terms plus an asymptotic correction in powers of `a = √(t/2π)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernel::for_each_term;
use crate::special::dd::{self, DoubleDouble};
use crate::special::{chi, ComplexPoint};
use crate::{Error, Result};

/// Taylor coefficients c_{2n}, n = 0..=40, of
/// `F(p) = (e^{iπ(p²/2 + 3/8)} − i√2 cos(πp/2)) / (2 cos(πp))`; odd ones vanish.
const F_TAYLOR: [(f64, f64); 41] = [
    (1.9134171618254489e-1, -2.4516701493090415e-1),
    (2.1862023403876022e-1, -3.6933834884962953e-2),
    (6.6188287740171762e-2, 6.3534393856146029e-2),
    (-6.8025130238370943e-3, 2.7223912663570067e-2),
    (-6.7838109850517904e-3, 1.385760877106652e-3),
    (-8.1186266157223264e-4, -1.189449446101378e-3),
    (1.4852676866689845e-4, -2.1269820192893324e-4),
    (3.9716504397607348e-5, 1.1171327401990151e-5),
    (2.3278062307252253e-7, 5.8728583986520697e-6),
    (-7.1636258154775529e-7, 2.4982125529235179e-7),
    (-5.177423556156473e-8, -7.3087003051015519e-8),
    (6.178963541930869e-9, -7.5367914481640208e-9),
    (8.9405419289774525e-10, 4.1044257973312286e-10),
    (-1.695707194963518e-11, 9.1065595502940845e-11),
    (-8.1633169512829526e-12, 4.3480990952496189e-13),
    (-1.8925546592706102e-13, -6.52091326154013e-13),
    (4.6637116296008624e-14, -2.5746988391948219e-14),
    (2.6109215079890684e-15, 2.9783351960862872e-15),
    (-1.6753365363721319e-16, 2.2417569641965171e-16),
    (-1.7062132614058632e-17, -7.9936613787734565e-18),
    (2.8756016707161996e-19, -1.1768943516467545e-18),
    (7.4476506816057527e-20, 3.424141569957982e-21),
    (6.2826863585107084e-22, 4.3544324656780059e-21),
    (-2.3606476250717128e-22, 8.0426770108750665e-23),
    (-6.63453468151981e-24, -1.187404814328495e-23),
    (5.5267199975607092e-25, -4.5338735224994205e-25),
    (2.7498231887637328e-26, 2.3622132419636894e-26),
    (-9.1156882511590131e-28, 1.524413235942887e-27),
    (-7.8447018688604401e-29, -3.0537676963256186e-29),
    (7.9198175441190058e-31, -3.7815907075540573e-30),
    (1.717310362718602e-31, 7.6366798425535924e-33),
    (8.5105167501585089e-34, 7.3723979435893409e-33),
    (-2.9975596524789084e-34, 8.3535607351450638e-35),
    (-5.2438413770472262e-36, -1.1548379716377025e-35),
    (4.2110675891746605e-37, -2.7493469328542347e-37),
    (1.2923519298859779e-38, 1.4488435963406571e-38),
    (-4.6738196874449926e-40, 5.6106598232391619e-40),
    (-2.2847096126218506e-41, -1.3966922082756918e-41),
    (3.7727986973826953e-43, -8.8058190314645544e-43),
    (3.2309079427925238e-44, 8.6892654803196412e-45),
    (-1.3941164374371832e-46, 1.1327617267522243e-45),
];

/// Correction orders kept; further ones fall below 1e-16 once a ≥ 20.
pub(crate) const MAX_ORDER: usize = 6;

/// Smallest height accepted: the main sums need at least two terms.
pub const MIN_HEIGHT: f64 = 8.0 * PI;

/// `F^{(m)}(p)` for `m = 0..=max_order`.
fn f_derivatives(p: f64, max_order: usize) -> Vec<Complex64> {
    let mut coeffs: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); 2 * F_TAYLOR.len() - 1];
    for (n, &(re, im)) in F_TAYLOR.iter().enumerate() {
        coeffs[2 * n] = Complex64::new(re, im);
    }
    let mut out = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        let len = coeffs.len() - m;
        out.push(coeffs[..len].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * p + c));
        for k in 0..coeffs.len() - 1 {
            coeffs[k] = coeffs[k + 1] * (k + 1) as f64;
        }
        let last = coeffs.len() - 1;
        coeffs[last] = Complex64::new(0.0, 0.0);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// The coefficients `d[n][k]`, `0 ≤ k ≤ ⌊3n/2⌋`, for real part σ.
fn d_coefficients(sigma: f64, orders: usize) -> Vec<Vec<f64>> {
    let ps = 1.0 - 2.0 * sigma;
    let mut d: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 1..orders {
        let prev = &d[n - 1];
        let get = |k: isize| -> f64 {
            if k < 0 {
                0.0
            } else {
                prev.get(k as usize).copied().unwrap_or(0.0)
            }
        };
        let mut row = Vec::with_capacity(3 * n / 2 + 1);
        for k in 0..=3 * n / 2 {
            let m = 3 * n as isize - 2 * k as isize;
            let ki = k as isize;
            let v = if m != 0 {
                let mf = m as f64;
                -(mf + 1.0) * get(ki - 2) + get(ki) / (4.0 * mf) + ps * get(ki - 1) / (2.0 * mf)
            } else {
                let mut acc = 0.0;
                for (r, &dr) in row.iter().enumerate() {
                    let sign = if (k - r) % 2 == 0 { 1.0 } else { -1.0 };
                    acc -= sign * dr * factorial(2 * (k - r)) / factorial(k - r);
                }
                acc
            };
            row.push(v);
        }
        d.push(row);
    }
    d
}

fn correction(sigma: f64, a: f64, fd: &[Complex64], tol: f64) -> Complex64 {
    let d = d_coefficients(sigma, MAX_ORDER);
    let two_i = Complex64::new(0.0, 2.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (n, row) in d.iter().enumerate() {
        let mut term = Complex64::new(0.0, 0.0);
        for (l, &dnl) in row.iter().enumerate() {
            term += dnl * fd[3 * n - 2 * l] / PI.powi((2 * n - l) as i32) / two_i.powi(l as i32);
        }
        term *= a.powi(-(n as i32));
        total += term;
        if n > 0 && term.norm() < tol {
            break;
        }
    }
    total
}

/// ζ(σ + it) by the Riemann–Siegel expansion, for `t ≥ 8π`.
///
/// Negative heights are handled through ζ(conj s) = conj ζ(s).
pub fn zeta_riemann_siegel(z: ComplexPoint, target_rel_err: f64) -> Result<Complex64> {
    let z = z.check_finite()?;
    if z.im < 0.0 {
        return zeta_riemann_siegel(z.conj(), target_rel_err).map(|v| v.conj());
    }
    let (sigma, t) = (z.re, z.im);
    if t < MIN_HEIGHT {
        return Err(Error::Domain(format!(
            "Riemann-Siegel needs Im(z) >= {MIN_HEIGHT:.3}, got {t}"
        )));
    }
    let a = (t / (2.0 * PI)).sqrt();
    let n = a.floor() as usize;
    let p = 1.0 - 2.0 * (a - n as f64);

    let mut x = Complex64::new(0.0, 0.0);
    let mut y = Complex64::new(0.0, 0.0);
    for_each_term(t, 1, n, |_, l, c, s| {
        let mx = (-sigma * l).exp();
        let my = ((sigma - 1.0) * l).exp();
        x += Complex64::new(mx * c, -mx * s);
        y += Complex64::new(my * c, my * s);
    });

    // θ₀ = (t/2) ln(t/2π) − t/2 − π/8
    let base = DoubleDouble::ln(t).sub(dd::LN_2PI).sub(DoubleDouble::from_f64(1.0));
    let theta0 = dd::reduce_phase(dd::mul_mod_two_pi(0.5 * t, base) - PI / 8.0);
    let u = Complex64::from_polar(1.0, -theta0);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };

    let fd = f_derivatives(p, 3 * (MAX_ORDER - 1));
    let tol = 1e-3 * target_rel_err;
    let s3x = sign * a.powf(-sigma) * u;
    let s3y = sign * a.powf(sigma - 1.0) * u;
    let rx = x + correction(sigma, a, &fd, tol) * s3x;
    let ry = y + (correction(1.0 - sigma, a, &fd, tol) * s3y).conj();
    let chi = chi(z)?.to_complex()?;
    Ok(rx + chi * ry)
}
