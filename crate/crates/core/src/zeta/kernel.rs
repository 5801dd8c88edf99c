//! The Dirichlet-term loop shared by every evaluator: for each n it supplies
//! `ln n` and `(cos, sin)(t ln n)`, switching to a double-double phase when
//! `t ln n` is too large for a plain product to keep its fractional turns.

use std::sync::OnceLock;

use crate::special::dd::{self, DoubleDouble};
use crate::special::DD_PHASE_THRESHOLD;

const LN_TABLE_LEN: usize = 1 << 20;

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(LN_TABLE_LEN);
        v.push(f64::NEG_INFINITY);
        v.extend((1..LN_TABLE_LEN).map(|n| (n as f64).ln()));
        v
    })
}

#[inline]
pub(crate) fn ln_n(n: usize) -> f64 {
    if n < LN_TABLE_LEN {
        ln_table()[n]
    } else {
        (n as f64).ln()
    }
}

/// Calls `f(n, ln n, cos(t ln n), sin(t ln n))` for `n = first..=last`.
#[inline]
pub(crate) fn for_each_term(t: f64, first: usize, last: usize, mut f: impl FnMut(usize, f64, f64, f64)) {
    if last < first {
        return;
    }
    let table = ln_table();
    let extended = (t * ln_n(last.max(1))).abs() > DD_PHASE_THRESHOLD;
    if !extended && last < LN_TABLE_LEN {
        for (n, &l) in table.iter().enumerate().take(last + 1).skip(first) {
            let (s, c) = (t * l).sin_cos();
            f(n, l, c, s);
        }
        return;
    }
    for n in first..=last {
        let l = ln_n(n);
        let phase = if extended {
            dd::mul_mod_two_pi(t, DoubleDouble::ln(n as f64))
        } else {
            t * l
        };
        let (s, c) = phase.sin_cos();
        f(n, l, c, s);
    }
}
