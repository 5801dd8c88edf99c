use num_complex::Complex64;

use super::kernel::{for_each_term, ln_n};

/// `B_{2k} / (2k)!` for k = 1..=8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

const MIN_TERMS: usize = 30;

/// Main-sum length `N = max(30, ⌈factor·|t|⌉)`.
pub(crate) fn main_sum_length(t: f64, factor: f64) -> usize {
    ((factor * t.abs()).ceil() as usize).max(MIN_TERMS)
}

#[inline]
fn pow_minus_s(sigma: f64, l: f64, c: f64, s: f64) -> Complex64 {
    let m = (-sigma * l).exp();
    Complex64::new(m * c, -m * s)
}

/// The endpoint corrections: `N^{-s}/2 + N^{1-s}/(s-1) + Σ_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}`.
fn tail(s: Complex64, n: usize, n_pow: Complex64) -> Complex64 {
    let nf = n as f64;
    let mut total = 0.5 * n_pow + n_pow * nf / (s - 1.0);
    let inv_n2 = 1.0 / (nf * nf);
    // (s)_1 N^{-s-1}
    let mut poch = s;
    let mut power = n_pow / nf;
    for (k, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        total += b * poch * power;
        let j = 2.0 * k as f64 + 1.0;
        poch *= (s + j) * (s + j + 1.0);
        power *= inv_n2;
    }
    total
}

fn trig_at(t: f64, n: usize) -> (f64, f64, f64) {
    let mut out = (0.0, 0.0, 0.0);
    for_each_term(t, n, n, |_, l, c, s| out = (l, c, s));
    out
}

/// ζ(σ + it) by Euler–Maclaurin summation with `n` main terms.
pub(crate) fn zeta_em(sigma: f64, t: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_term(t, 1, n - 1, |_, l, c, s| acc += pow_minus_s(sigma, l, c, s));
    let (l, c, s) = trig_at(t, n);
    acc + tail(Complex64::new(sigma, t), n, pow_minus_s(sigma, l, c, s))
}

/// ζ(σ_j + it) for several real parts at one height, sharing the
/// trigonometric work of the main sum.
pub(crate) fn zeta_em_row(sigmas: &[f64], t: f64, n: usize) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); sigmas.len()];
    for_each_term(t, 1, n - 1, |_, l, c, s| {
        for (a, &sigma) in acc.iter_mut().zip(sigmas) {
            *a += pow_minus_s(sigma, l, c, s);
        }
    });
    let (l, c, s) = trig_at(t, n);
    acc.iter()
        .zip(sigmas)
        .map(|(a, &sigma)| a + tail(Complex64::new(sigma, t), n, pow_minus_s(sigma, l, c, s)))
        .collect()
}

/// ζ at `right = σ + it` and `left = σ − δ + it`, plus `left − right`
/// formed term by term through `expm1(δ ln n)` so the difference keeps full
/// relative accuracy even when δ is tiny.
pub(crate) fn zeta_em_shifted(sigma: f64, t: f64, delta: f64, n: usize) -> (Complex64, Complex64) {
    let mut right = Complex64::new(0.0, 0.0);
    let mut diff = Complex64::new(0.0, 0.0);
    for_each_term(t, 1, n - 1, |_, l, c, s| {
        let term = pow_minus_s(sigma, l, c, s);
        right += term;
        diff += term * (delta * l).exp_m1();
    });

    let (l, c, s) = trig_at(t, n);
    let nf = n as f64;
    let b = Complex64::new(sigma, t);
    let a = Complex64::new(sigma - delta, t);
    let pb = pow_minus_s(sigma, l, c, s);
    // N^{-a} = N^{-b} N^δ
    let grow = (delta * ln_n(n)).exp_m1();
    right += tail(b, n, pb);

    diff += 0.5 * pb * grow;
    // N^{1-a}/(a-1) - N^{1-b}/(b-1)
    diff += pb * nf * (grow / (a - 1.0) + delta / ((a - 1.0) * (b - 1.0)));
    // Bernoulli terms: c_k N^{-b-2k+1} [P_k(a) N^δ - P_k(b)]
    let inv_n2 = 1.0 / (nf * nf);
    let mut poch_a = a;
    let mut poch_b = b;
    let mut poch_diff = Complex64::new(-delta, 0.0);
    let mut power = pb / nf;
    for (k, &coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        diff += coef * power * (poch_a * grow + poch_diff);
        let j = 2.0 * k as f64 + 1.0;
        for m in [j, j + 1.0] {
            // D_{m+1} = D_m (a + m) - δ P_b,m
            poch_diff = poch_diff * (a + m) - delta * poch_b;
            poch_a *= a + m;
            poch_b *= b + m;
        }
        power *= inv_n2;
    }
    (right, diff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_and_zero() {
        let z2 = zeta_em(2.0, 0.0, 30);
        assert!((z2.re - PI * PI / 6.0).abs() < 1e-14);
        let z0 = zeta_em(0.0, 0.0, 30);
        assert!((z0.re + 0.5).abs() < 1e-14);
        let zm1 = zeta_em(-1.0, 0.0, 30);
        assert!((zm1.re + 1.0 / 12.0).abs() < 1e-13);
    }

    #[test]
    fn row_matches_single_evaluations() {
        let sig = [0.0, 0.25, 0.5];
        let row = zeta_em_row(&sig, 321.5, 322);
        for (v, &s) in row.iter().zip(&sig) {
            assert_eq!(*v, zeta_em(s, 321.5, 322));
        }
    }

    #[test]
    fn shifted_difference_matches_direct_difference() {
        for (sigma, t, delta) in [(0.5, 20.0, 0.5), (0.5, 140.0, 0.25), (0.3, 1000.0, 0.1)] {
            let n = main_sum_length(t, 1.0);
            let (right, diff) = zeta_em_shifted(sigma, t, delta, n);
            let direct = zeta_em(sigma - delta, t, n) - zeta_em(sigma, t, n);
            assert!((right - zeta_em(sigma, t, n)).norm() < 1e-13);
            assert!((diff - direct).norm() < 1e-12 * direct.norm().max(1.0), "{t}");
        }
    }

    #[test]
    fn shifted_difference_is_linear_in_tiny_delta() {
        // at δ = 1e-12 the difference must be δ·(-ζ'(s)) to many digits
        let n = main_sum_length(50.0, 1.0);
        let (_, d1) = zeta_em_shifted(0.5, 50.0, 1e-12, n);
        let (_, d2) = zeta_em_shifted(0.5, 50.0, 2e-12, n);
        assert!((d2 - 2.0 * d1).norm() < 1e-9 * d1.norm());
    }
}
