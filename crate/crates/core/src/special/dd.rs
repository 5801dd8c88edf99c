//! Double-double ("two-term") arithmetic, just enough to carry `log k` and
//! products such as `y * log k` with ~106 bits before a mod-2π reduction.

use std::f64::consts::PI;

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

pub const LN2: DoubleDouble = DoubleDouble::new(0.6931471805599453, 2.3190468138462996e-17);
pub const TWO_PI: DoubleDouble = DoubleDouble::new(6.283185307179586, 2.4492935982947064e-16);
pub const LN_2PI: DoubleDouble = DoubleDouble::new(1.8378770664093456, -7.756588316134483e-17);
pub const LN_PI: DoubleDouble = DoubleDouble::new(1.1447298858494002, 1.0265951162707826e-17);

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Self {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    pub fn div(self, other: Self) -> Self {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(DoubleDouble::from_f64(q3))
    }

    /// Natural logarithm of a positive finite double, to roughly 2^-104
    /// relative accuracy.
    pub fn ln(x: f64) -> Self {
        debug_assert!(x > 0.0 && x.is_finite());
        let (mut m, mut e) = frexp(x);
        if m < std::f64::consts::FRAC_1_SQRT_2 {
            m *= 2.0;
            e -= 1;
        }
        // ln m = 2 atanh(u), u = (m - 1) / (m + 1), |u| < 0.172
        let num = DoubleDouble::from_f64(m - 1.0);
        let (dh, dl) = two_sum(m, 1.0);
        let u = num.div(DoubleDouble::new(dh, dl));
        let u2 = u.mul(u);
        let mut term = u;
        let mut sum = u;
        let mut k = 1.0;
        while term.hi.abs() > 1e-34 * sum.hi.abs().max(f64::MIN_POSITIVE) {
            term = term.mul(u2);
            sum = sum.add(term.div(DoubleDouble::from_f64(2.0 * k + 1.0)));
            k += 1.0;
        }
        sum.mul_f64(2.0).add(LN2.mul_f64(e as f64))
    }
}

/// Splits a positive finite `x` into `m * 2^e` with `m` in `[0.5, 1)`.
fn frexp(x: f64) -> (f64, i32) {
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32 - 1022;
    let mant = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
    (mant, exp + bias)
}

/// Reduces an angle to `(-π, π]`.
#[inline]
pub fn reduce_phase(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x - TWO_PI.hi * (x / TWO_PI.hi).round();
    let r = r - TWO_PI.lo * (x / TWO_PI.hi).round();
    if r > PI {
        r - TWO_PI.hi
    } else if r <= -PI {
        r + TWO_PI.hi
    } else {
        r
    }
}

/// `y * v` reduced to `(-π, π]`, carrying the product in double-double so
/// the phase stays accurate when `|y * v|` is far beyond 2^53 ulp territory.
pub fn mul_mod_two_pi(y: f64, v: DoubleDouble) -> f64 {
    let (p, e) = two_prod(y, v.hi);
    let e = e + y * v.lo;
    let q = (p / TWO_PI.hi).round();
    let (qh, qe) = two_prod(q, TWO_PI.hi);
    let r = (p - qh) - qe - q * TWO_PI.lo + e;
    reduce_phase(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_two_matches_constant() {
        let l = DoubleDouble::ln(2.0);
        assert_eq!(l.hi, LN2.hi);
        assert!((l.lo - LN2.lo).abs() < 1e-32);
    }

    #[test]
    fn ln_pi_matches_constant() {
        let l = DoubleDouble::ln(std::f64::consts::PI);
        // pi as an f64 is not pi; ln(pi_f64) = ln(pi) + (pi_f64 - pi)/pi
        let shift = -1.2246467991473532e-16 / std::f64::consts::PI;
        let expected = LN_PI.add(DoubleDouble::from_f64(shift));
        assert!((l.sub(expected)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn ln_is_additive_on_integers() {
        for (a, b) in [(3.0, 7.0), (99991.0, 12.0), (1e6, 1e5)] {
            let lhs = DoubleDouble::ln(a).add(DoubleDouble::ln(b));
            let rhs = DoubleDouble::ln(a * b);
            assert!(lhs.sub(rhs).to_f64().abs() < 1e-30, "{a} {b}");
        }
    }

    #[test]
    fn frexp_splits() {
        assert_eq!(frexp(1.0), (0.5, 1));
        assert_eq!(frexp(0.75), (0.75, 0));
        assert_eq!(frexp(1e-310).1, -1029);
    }

    #[test]
    fn reduce_phase_range() {
        assert_eq!(reduce_phase(PI), PI);
        let r = reduce_phase(-PI);
        assert!(r > -PI && r <= PI);
        assert!((r.sin() - (-PI).sin()).abs() < 1e-15 && (r.cos() + 1.0).abs() < 1e-15);
        assert!((reduce_phase(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn mul_mod_two_pi_at_large_height() {
        // arg(99991^{-(0.25 + 1e11 i)}) from a 50-digit reference
        let phase = mul_mod_two_pi(-1e11, DoubleDouble::ln(99991.0));
        assert!((phase - 0.58126701210331891).abs() < 1e-9, "{phase}");
    }
}
