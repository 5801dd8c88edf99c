//! Diagnostics of the decrease of |ζ(x+yi)| toward the critical line.
//!
//! Points left of the line are parameterized by t ≥ 0 through
//! x = ½(1 − e^{−t}); every diagnostic compares such a point with its
//! projection ½ + yi and rescales the difference by e^t.

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grid::{self, check_cap, par_map};
use crate::special::{chi, ComplexPoint};
use crate::zeta::{head_length, shifted_head, zeta, zeta_row, zeta_shifted, EvalConfig, ShiftedPair, CORE_ALPHA};
use crate::{Error, Result};

/// Denominators below this are refused by [`eta_tilde`] and [`eta_tilde_a`].
pub const NEAR_ZERO: f64 = 1e-12;

/// The floor e^{−20} applied by [`theta_resolved`].
pub fn theta_floor() -> f64 {
    (-20.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticPoint {
    pub y: f64,
    pub t: f64,
    pub value: f64,
}

/// x = ½(1 − e^{−t}).
pub fn x_of_t(t: f64) -> f64 {
    0.5 * (1.0 - (-t).exp())
}

fn check_yt(y: f64, t: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("height must be positive, got {y}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    Ok(())
}

fn critical(y: f64) -> Result<ComplexPoint> {
    ComplexPoint::new(0.5, y)
}

/// ζ at ½ + yi and at x(t) + yi.
fn zeta_pair(y: f64, t: f64, cfg: &EvalConfig) -> Result<ShiftedPair> {
    check_yt(y, t)?;
    zeta_shifted(critical(y)?, 0.5 * (-t).exp(), cfg)
}

/// η(y,t) = e^t (|ζ(x(t)+yi)| − |ζ(½+yi)|).
pub fn eta(y: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(t.exp() * zeta_pair(y, t, cfg)?.modulus_gap())
}

/// η̃(y,t) = e^t (|ζ(x(t)+yi)| / |ζ(½+yi)| − 1).
pub fn eta_tilde(y: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
    let pair = zeta_pair(y, t, cfg)?;
    ratio_gap(&pair, t, "zeta(1/2+yi)")
}

fn ratio_gap(pair: &ShiftedPair, t: f64, what: &'static str) -> Result<f64> {
    let den = pair.right.norm();
    if den <= NEAR_ZERO {
        return Err(Error::NearZeroDenominator {
            what,
            value: den,
            threshold: NEAR_ZERO,
        });
    }
    Ok(t.exp() * pair.modulus_gap() / den)
}

/// X(y,t) = e^t (|χ(x(t)+yi)| − 1), the lower comparison curve for η̃.
pub fn x_lower(y: f64, t: f64) -> Result<f64> {
    check_yt(y, t)?;
    let c = chi(ComplexPoint::new(x_of_t(t), y)?)?;
    Ok(t.exp() * c.log_mag.exp_m1())
}

/// η̃_a(y,t) = e^t (C_a(x(t)+yi) / C_a(½+yi) − 1).
pub fn eta_tilde_a(y: f64, t: f64, a: f64, cfg: &EvalConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("a must lie in [0, 1], got {a}")));
    }
    let pair = zeta_pair(y, t, cfg)?;
    let head = shifted_head(critical(y)?, 0.5 * (-t).exp(), head_length(CORE_ALPHA, y))?;
    ratio_gap(&(pair - head * (1.0 - a)), t, "C_a(1/2+yi)")
}

/// θ(y) = |ζ(½+yi)|.
pub fn theta(y: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(zeta(critical(y)?, cfg)?.norm())
}

/// θ̃(y) = max(θ(y), e^{−20}).
pub fn theta_resolved(y: f64, cfg: &EvalConfig) -> Result<f64> {
    Ok(theta(y, cfg)?.max(theta_floor()))
}

/// η(y,t) / θ̃(y): the pole-resolved ratio, defined at critical-line zeros too.
pub fn eta_resolved(y: f64, t: f64, cfg: &EvalConfig) -> Result<f64> {
    let pair = zeta_pair(y, t, cfg)?;
    Ok(t.exp() * pair.modulus_gap() / pair.right.norm().max(theta_floor()))
}

/// Running minimum of `values` over the trailing window `[y − width, y]`.
///
/// `ys` must be non-decreasing.
pub fn envelope(ys: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    assert_eq!(ys.len(), values.len());
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut out = Vec::with_capacity(ys.len());
    for i in 0..ys.len() {
        while window.back().is_some_and(|&k| values[k] >= values[i]) {
            window.pop_back();
        }
        window.push_back(i);
        while window.front().is_some_and(|&k| ys[k] < ys[i] - width) {
            window.pop_front();
        }
        out.push(values[window[0]]);
    }
    out
}

/// Trailing-window width used for reported envelopes.
pub const ENVELOPE_WIDTH: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub y: f64,
    pub x1: f64,
    pub x2: f64,
    /// |ζ(x2+yi)|
    pub lhs: f64,
    /// |ζ(x1+yi)|
    pub rhs: f64,
    /// rhs − lhs; positive when the pair decreases as required.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub y_min: f64,
    pub y_max: f64,
    pub y_step: f64,
    pub x_set: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub evaluations: u64,
    pub min_value: f64,
    pub argmin: (f64, f64),
    pub max_value: f64,
    pub argmax: (f64, f64),
    /// Smallest adjacent-pair margin seen, and where.
    pub min_margin: f64,
    pub argmin_margin: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub ys: Vec<f64>,
    /// `values[row][column]` = |ζ(x_set[column] + ys[row]·i)|.
    pub values: Vec<Vec<f64>>,
    pub violations: Vec<ViolationRecord>,
    pub summary: ScanSummary,
}

/// Default tolerance for a strict decrease.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Evaluates |ζ(x+yi)| over the grid and records every adjacent pair
/// x1 < x2 with |ζ(x1+yi)| − |ζ(x2+yi)| ≤ −tolerance.
pub fn scan_monotonicity(
    grid: &ScanGrid,
    cap: u64,
    workers: Option<usize>,
    cfg: &EvalConfig,
) -> Result<ScanResult> {
    if grid.x_set.is_empty() {
        return Err(Error::InvalidSpec("x_set is empty".into()));
    }
    if grid.x_set.windows(2).any(|w| !(w[0] < w[1])) || grid.x_set[grid.x_set.len() - 1] > 0.5 {
        return Err(Error::InvalidSpec(
            "x_set must be strictly increasing and at most 0.5".into(),
        ));
    }
    if !(grid.tolerance >= 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance must be >= 0, got {}", grid.tolerance)));
    }
    let ys = grid::linspace_step(grid.y_min, grid.y_max, grid.y_step)?;
    let evaluations = ys.len() as u64 * grid.x_set.len() as u64;
    check_cap(evaluations, cap)?;

    let values: Vec<Vec<f64>> = par_map(&ys, workers, |y| {
        Ok(zeta_row(&grid.x_set, y, cfg)?.iter().map(|v| v.norm()).collect())
    })?;

    let mut violations = Vec::new();
    let mut summary = ScanSummary {
        rows: ys.len(),
        evaluations,
        min_value: f64::INFINITY,
        argmin: (f64::NAN, f64::NAN),
        max_value: f64::NEG_INFINITY,
        argmax: (f64::NAN, f64::NAN),
        min_margin: f64::INFINITY,
        argmin_margin: (f64::NAN, f64::NAN),
    };
    for (&y, row) in ys.iter().zip(&values) {
        for (&x, &v) in grid.x_set.iter().zip(row) {
            if v < summary.min_value {
                summary.min_value = v;
                summary.argmin = (y, x);
            }
            if v > summary.max_value {
                summary.max_value = v;
                summary.argmax = (y, x);
            }
        }
        for k in 1..row.len() {
            let margin = row[k - 1] - row[k];
            if margin < summary.min_margin {
                summary.min_margin = margin;
                summary.argmin_margin = (y, grid.x_set[k - 1]);
            }
            if margin <= -grid.tolerance {
                violations.push(ViolationRecord {
                    y,
                    x1: grid.x_set[k - 1],
                    x2: grid.x_set[k],
                    lhs: row[k],
                    rhs: row[k - 1],
                    margin,
                });
            }
        }
    }
    Ok(ScanResult {
        grid: grid.clone(),
        ys,
        values,
        violations,
        summary,
    })
}

impl ScanResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per grid point: `y,x,value`.
    pub fn write_values_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "y,x,value")?;
        for (&y, row) in self.ys.iter().zip(&self.values) {
            for (&x, &v) in self.grid.x_set.iter().zip(row) {
                writeln!(out, "{y:.16e},{x:.16e},{v:.16e}")?;
            }
        }
        Ok(())
    }

    pub fn write_violations_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "y,x1,x2,lhs,rhs,margin")?;
        for v in &self.violations {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                v.y, v.x1, v.x2, v.lhs, v.rhs, v.margin
            )?;
        }
        Ok(())
    }

    /// Writes `values.csv`, `violations.csv` and `scan.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
            let path = dir.join(name);
            let mut buf = Vec::new();
            f(&mut buf).map_err(|e| Error::io(&path, e))?;
            std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))
        };
        write("values.csv", &|b| self.write_values_csv(b))?;
        write("violations.csv", &|b| self.write_violations_csv(b))?;
        write("scan.json", &|b| b.write_all(self.to_json().map_err(std::io::Error::other)?.as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CrossingOutcome {
    Found { y: f64 },
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    pub s: f64,
    pub x: f64,
    pub outcome: CrossingOutcome,
    /// The range actually marched.
    pub scanned: (f64, f64),
    pub evaluations: u64,
    pub min_log_abs: f64,
    pub max_log_abs: f64,
}

impl CrossingResult {
    pub fn found(&self) -> Option<f64> {
        match self.outcome {
            CrossingOutcome::Found { y } => Some(y),
            CrossingOutcome::NotFound => None,
        }
    }
}

/// The smallest y ≥ y_start with log|ζ(x+yi)| = s, searched by a geometric
/// march y ← y(1 + 1/64) (step at least 1/64) and refined by bisection to
/// |Δy| < 1e-6·y.
pub fn first_crossing_y(s: f64, x: f64, y_start: f64, y_cap: f64, cfg: &EvalConfig) -> Result<CrossingResult> {
    if !(0.5..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0.5, 1], got {x}")));
    }
    if !(y_start >= 0.0 && y_start < y_cap && y_cap <= crate::zeta::MAX_HEIGHT) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "need 0 <= y_start < y_cap <= 1e11, got [{y_start}, {y_cap}]"
        )));
    }
    let mut evaluations = 0u64;
    let (mut lo_log, mut hi_log) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut eval = |y: f64| -> Result<f64> {
        evaluations += 1;
        let v = zeta(ComplexPoint::new(x, y)?, cfg)?.norm().ln();
        lo_log = lo_log.min(v);
        hi_log = hi_log.max(v);
        Ok(v - s)
    };
    let mut y0 = y_start;
    let mut f0 = eval(y0)?;
    let mut outcome = CrossingOutcome::NotFound;
    if f0 == 0.0 {
        outcome = CrossingOutcome::Found { y: y0 };
    } else {
        while y0 < y_cap {
            let y1 = (y0 + (y0 / 64.0).max(1.0 / 64.0)).min(y_cap);
            let f1 = eval(y1)?;
            if f1 == 0.0 || f1.signum() != f0.signum() {
                let (mut a, mut b, mut fa) = (y0, y1, f0);
                while b - a >= 1e-6 * a.max(1e-6) {
                    let m = 0.5 * (a + b);
                    let fm = eval(m)?;
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                outcome = CrossingOutcome::Found { y: 0.5 * (a + b) };
                y0 = y1;
                break;
            }
            y0 = y1;
            f0 = f1;
        }
    }
    Ok(CrossingResult {
        s,
        x,
        outcome,
        scanned: (y_start, y0),
        evaluations,
        min_log_abs: lo_log,
        max_log_abs: hi_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn oracle_values() {
        let c = cfg();
        assert!((eta(20.0, 0.0, &c).unwrap() - 0.58365693515488527).abs() < 1e-10);
        assert!((eta_tilde(50.0, 5.0, &c).unwrap() - 0.536382623505079).abs() < 1e-9);
        assert!((x_lower(100.0, 2.0).unwrap() - 1.5216717066895953).abs() < 1e-10);
        assert!((eta_tilde_a(50.0, 5.0, 0.5, &c).unwrap() - 2.3923030917726537).abs() < 1e-9);
        assert!((theta(1000.0, &c).unwrap() - 0.99779463752158661).abs() < 1e-10);
    }

    #[test]
    fn x_lower_at_t_zero() {
        let c = chi(ComplexPoint::new(0.0, 30.0).unwrap()).unwrap();
        assert!((x_lower(30.0, 0.0).unwrap() - (c.modulus() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn theta_at_first_zero() {
        let y = 14.1347;
        assert!(theta(y, &cfg()).unwrap() < 1e-3);
        assert!(theta_resolved(y, &cfg()).unwrap() >= theta_floor());
        let z = 14.134725141734694;
        assert!(matches!(
            eta_tilde(z, 1.0, &cfg()),
            Err(Error::NearZeroDenominator { .. }) | Ok(_)
        ));
        assert!(eta_resolved(z, 20.0, &cfg()).unwrap() > 0.0);
    }

    #[test]
    fn a_endpoint_identity() {
        let c = cfg();
        for (y, t) in [(50.0, 5.0), (123.4, 1.0), (3.0, 2.0)] {
            let a1 = eta_tilde_a(y, t, 1.0, &c).unwrap();
            let e = eta_tilde(y, t, &c).unwrap();
            assert!((a1 - e).abs() <= 1e-10 * e.abs());
            // below Im = 5 the head is empty for every a
            if y < 5.0 {
                assert!((eta_tilde_a(y, t, 0.3, &c).unwrap() - e).abs() <= 1e-12 * e.abs());
            }
        }
    }

    #[test]
    fn envelope_is_trailing_minimum() {
        let ys = [0.0, 10.0, 20.0, 60.0, 70.0, 200.0];
        let vs = [5.0, 3.0, 4.0, 6.0, 7.0, 8.0];
        assert_eq!(envelope(&ys, &vs, 50.0), vec![5.0, 3.0, 3.0, 3.0, 4.0, 8.0]);
    }

    #[test]
    fn single_column_scan_is_vacuous() {
        let grid = ScanGrid { y_min: 1.0, y_max: 6.0, y_step: 0.5, x_set: vec![0.3], tolerance: 1e-10 };
        let r = scan_monotonicity(&grid, grid::DEFAULT_CAP, Some(1), &cfg()).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.summary.rows, 11);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        let mut grid = ScanGrid { y_min: 10.0, y_max: 20.0, y_step: 0.1, x_set: vec![], tolerance: 1e-10 };
        assert!(matches!(scan_monotonicity(&grid, 100, None, &cfg()), Err(Error::InvalidSpec(_))));
        grid.x_set = vec![0.0, 0.5];
        assert!(matches!(scan_monotonicity(&grid, 100, None, &cfg()), Err(Error::GridTooLarge { .. })));
        grid.x_set = vec![0.3, 0.2];
        assert!(scan_monotonicity(&grid, 1000, None, &cfg()).is_err());
        grid.x_set = vec![0.3, 0.6];
        assert!(scan_monotonicity(&grid, 1000, None, &cfg()).is_err());
    }

    #[test]
    fn crossing_at_left_endpoint() {
        let c = cfg();
        let s = zeta(ComplexPoint::new(0.95, 3.0).unwrap(), &c).unwrap().norm().ln();
        let r = first_crossing_y(s, 0.95, 3.0, 100.0, &c).unwrap();
        assert_eq!(r.found(), Some(3.0));
    }

    #[test]
    fn crossing_is_refined() {
        let c = cfg();
        let r = first_crossing_y(0.5, 0.95, 1.0, 1e3, &c).unwrap();
        let y = r.found().expect("log|zeta| reaches 0.5 early");
        let v = zeta(ComplexPoint::new(0.95, y).unwrap(), &c).unwrap().norm().ln();
        assert!((v - 0.5).abs() < 1e-3, "{y} {v}");
        assert!(first_crossing_y(0.5, 0.3, 1.0, 10.0, &c).is_err());
    }
}
