//! The acceptance suite: each criterion reports a measured value against
//! its threshold.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::experiment::{run_experiment, ExperimentSpec, Kind, FIRST_ZERO};
use crate::grid::{self, linspace_step, par_map};
use crate::monotonicity::{
    envelope, eta, eta_resolved, eta_tilde, eta_tilde_a, first_crossing_y, scan_monotonicity, theta, x_lower,
    x_of_t, ScanGrid, DEFAULT_TOLERANCE, ENVELOPE_WIDTH,
};
use crate::special::{chi, ComplexPoint};
use crate::spectrum::detect_spectrum;
use crate::zeta::{
    core, core_a, core_a_inner, partial_sums, zeta, zeta_euler_maclaurin, zeta_riemann_siegel, EvalConfig,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    /// Wall-clock limit, when the criterion has one.
    pub time_limit_s: Option<f64>,
    pub seconds: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        write!(
            f,
            "[{}] {:>2} {}: measured {:.6e} (need {} {:.6e}) in {:.1} s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            rel,
            self.threshold,
            self.seconds
        )?;
        if let Some(limit) = self.time_limit_s {
            write!(f, " (limit {limit:.0} s)")?;
        }
        if !self.detail.is_empty() {
            write!(f, "; {}", self.detail)?;
        }
        Ok(())
    }
}

struct Check {
    id: u8,
    name: &'static str,
    relation: Relation,
    threshold: f64,
    time_limit_s: Option<f64>,
}

impl Check {
    fn finish(self, start: Instant, measured: f64, extra_ok: bool, detail: String) -> CriterionReport {
        let seconds = start.elapsed().as_secs_f64();
        let value_ok = match self.relation {
            Relation::AtMost => measured <= self.threshold,
            Relation::AtLeast => measured >= self.threshold,
        };
        let time_ok = self.time_limit_s.map_or(true, |l| seconds < l);
        CriterionReport {
            id: self.id,
            name: self.name.to_string(),
            measured,
            relation: self.relation,
            threshold: self.threshold,
            time_limit_s: self.time_limit_s,
            seconds,
            passed: value_ok && extra_ok && time_ok,
            detail,
        }
    }
}

fn p(re: f64, im: f64) -> Result<ComplexPoint> {
    ComplexPoint::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Classical values, the first zero, and the functional-equation residual.
pub fn criterion_1(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 1,
        name: "evaluator correctness",
        relation: Relation::AtMost,
        threshold: 1e-6,
        time_limit_s: Some(10.0),
    };
    let pi = std::f64::consts::PI;
    let z2 = rel(zeta(p(2.0, 0.0)?, cfg)?.re, pi * pi / 6.0);
    let z0 = rel(zeta(p(0.0, 0.0)?, cfg)?.re, -0.5);
    let first = zeta(p(0.5, 14.1347)?, cfg)?.norm();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < 200 {
        let z = p(rng.gen_range(0.0..=1.0), rng.gen_range(10.0..=1e4))?;
        let v = zeta(z, cfg)?;
        if v.norm() <= 1e-3 {
            continue;
        }
        let other = chi(z)?.to_complex()? * zeta(z.reflect(), cfg)?;
        worst = worst.max((v - other).norm() / v.norm());
        used += 1;
    }
    let extra = z2 <= 1e-10 && z0 <= 1e-10 && first < 1e-3;
    let detail = format!(
        "rel err zeta(2) {z2:.1e}, zeta(0) {z0:.1e} (<= 1e-10); |zeta(0.5+14.1347i)| = {first:.2e} (< 1e-3); worst FE residual over 200 points"
    );
    Ok(check.finish(start, worst, extra, detail))
}

/// Euler–Maclaurin against Riemann–Siegel on 10³ ≤ y ≤ 10⁴.
pub fn criterion_2(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 2,
        name: "route agreement",
        relation: Relation::AtMost,
        threshold: 1e-6,
        time_limit_s: Some(30.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < 100 {
        let z = p(rng.gen_range(0.0..=1.0), rng.gen_range(1e3..=1e4))?;
        let rs = zeta_riemann_siegel(z, cfg.target_rel_err)?;
        // relative agreement is meaningless right at a zero
        if rs.norm() <= 1e-3 {
            continue;
        }
        let em = zeta_euler_maclaurin(z, cfg);
        worst = worst.max((em - rs).norm() / rs.norm());
        used += 1;
    }
    Ok(check.finish(start, worst, true, "worst relative difference over 100 points".into()))
}

/// The grid scan for strict decrease of |ζ| in x.
pub fn criterion_3(cfg: &EvalConfig, workers: Option<usize>) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 3,
        name: "monotonicity scan",
        relation: Relation::AtMost,
        threshold: 0.0,
        time_limit_s: Some(300.0),
    };
    let grid = ScanGrid {
        y_min: 6.29,
        y_max: 2000.0,
        y_step: 0.1,
        x_set: (0..=10).map(|k| k as f64 * 0.05).collect(),
        tolerance: DEFAULT_TOLERANCE,
    };
    let r = scan_monotonicity(&grid, grid::DEFAULT_CAP, workers, cfg)?;
    let detail = format!(
        "{} evaluations; smallest margin {:.3e} at y = {:.2}",
        r.summary.evaluations, r.summary.min_margin, r.summary.argmin_margin.0
    );
    Ok(check.finish(start, r.violations.len() as f64, true, detail))
}

/// log η(y,10) ≥ log θ(y) − 3 on [6.29, 50].
pub fn criterion_4(cfg: &EvalConfig, workers: Option<usize>) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 4,
        name: "eta(y,10) vs theta(y) - 3",
        relation: Relation::AtLeast,
        threshold: 0.0,
        time_limit_s: None,
    };
    let ys = linspace_step(6.29, 50.0, 0.01)?;
    let margins = par_map(&ys, workers, |y| {
        let th = theta(y, cfg)?;
        if th <= 1e-6 {
            return Ok(None);
        }
        let e = eta(y, 10.0, cfg)?;
        Ok(Some(if e > 0.0 { e.ln() - (th.ln() - 3.0) } else { f64::NEG_INFINITY }))
    })?;
    let (mut worst, mut at, mut bad, mut used) = (f64::INFINITY, f64::NAN, 0usize, 0usize);
    for (&y, m) in ys.iter().zip(&margins) {
        if let Some(m) = *m {
            used += 1;
            if m < 0.0 {
                bad += 1;
            }
            if m < worst {
                worst = m;
                at = y;
            }
        }
    }
    let detail = format!("smallest margin at y = {at:.2}; {bad} of {used} grid points below");
    Ok(check.finish(start, worst, true, detail))
}

/// log η̃(y,10) ≥ log X(y,10) − 0.75 on ≥ 99.9 % of [10, 10⁴].
pub fn criterion_5(cfg: &EvalConfig, workers: Option<usize>) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 5,
        name: "eta_tilde(y,10) vs X(y,10) - 0.75",
        relation: Relation::AtLeast,
        threshold: 0.999,
        time_limit_s: None,
    };
    let ys = linspace_step(10.0, 1e4, 0.1)?;
    let ok = par_map(&ys, workers, |y| {
        let lhs = match eta_tilde(y, 10.0, cfg) {
            Ok(v) if v > 0.0 => v.ln(),
            Ok(_) => return Ok(false),
            Err(Error::NearZeroDenominator { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(lhs >= x_lower(y, 10.0)?.ln() - 0.75)
    })?;
    let good = ok.iter().filter(|&&b| b).count();
    let detail = format!("{good} of {} grid points satisfy the bound", ys.len());
    Ok(check.finish(start, good as f64 / ys.len() as f64, true, detail))
}

/// 0.6|χ(yi)| ≤ C(yi) ≤ 2.2|χ(yi)| on ≥ 99 % of [10, 2·10⁴].
pub fn criterion_6(cfg: &EvalConfig, workers: Option<usize>) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 6,
        name: "core band around |chi(yi)|",
        relation: Relation::AtLeast,
        threshold: 0.99,
        time_limit_s: None,
    };
    let ys = linspace_step(10.0, 2e4, 1.0)?;
    let ratios = par_map(&ys, workers, |y| {
        let z = p(0.0, y)?;
        Ok(core(z, cfg)? / chi(z)?.modulus())
    })?;
    let good = ratios.iter().filter(|&&r| (0.6..=2.2).contains(&r)).count();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let detail = format!("{good} of {} inside; C/|chi| ranges over [{lo:.3}, {hi:.3}]", ys.len());
    Ok(check.finish(start, good as f64 / ys.len() as f64, true, detail))
}

/// Spectrum at z = ½(1−e⁻²) + 2·10⁴i.
pub fn criterion_7(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let y = 2e4;
    let check = Check {
        id: 7,
        name: "spectrum final surge",
        relation: Relation::AtMost,
        threshold: 0.05 * y,
        time_limit_s: None,
    };
    let z = p(x_of_t(2.0), y)?;
    let series = partial_sums(z, y as usize)?;
    let report = detect_spectrum(&series, zeta(z, cfg)?)?;
    let dev = report.last_plateau_deviation().unwrap_or(f64::INFINITY);
    let miss = (report.final_surge_n as f64 - y / 3.0).abs();
    let detail = format!(
        "n_count {} (>= 2), final_surge_n {} vs Im(z)/3 = {:.0}, last plateau {:.2} spreads from |zeta| (<= 3)",
        report.n_count,
        report.final_surge_n,
        y / 3.0,
        dev
    );
    Ok(check.finish(start, miss, report.n_count >= 2 && dev <= 3.0, detail))
}

/// Endpoint identities of C_a and η̃_a.
pub fn criterion_8(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 8,
        name: "interpolation identities",
        relation: Relation::AtMost,
        threshold: 1e-10,
        time_limit_s: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut c0, mut c1, mut et, mut mid): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..100 {
        let z = p(rng.gen_range(0.0..=0.5), rng.gen_range(10.0..=1000.0))?;
        let core0 = core(z, cfg)?;
        c0 = c0.max(rel(core_a(z, 0.0, cfg)?, core0));
        c1 = c1.max(rel(core_a(z, 1.0, cfg)?, zeta(z, cfg)?.norm()));
        let inner = core_a_inner(z, 0.5, cfg)?;
        let avg = 0.5 * (core_a_inner(z, 0.0, cfg)? + core_a_inner(z, 1.0, cfg)?);
        mid = mid.max((inner - avg).norm() / inner.norm());
        let (y, t) = (rng.gen_range(10.0..=1000.0), rng.gen_range(0.0..=10.0));
        let e = eta_tilde(y, t, cfg)?;
        et = et.max(rel(eta_tilde_a(y, t, 1.0, cfg)?, e));
    }
    let worst = c0.max(c1).max(et);
    let detail = format!(
        "C_0 vs C {c0:.1e}, C_1 vs |zeta| {c1:.1e}, eta_tilde_1 vs eta_tilde {et:.1e}, midpoint affinity {mid:.1e} (<= 1e-12)"
    );
    Ok(check.finish(start, worst, mid <= 1e-12, detail))
}

/// η > 0 and the resolved ratio above its envelope around the first zero.
pub fn criterion_9(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 9,
        name: "pole resolution near the first zero",
        relation: Relation::AtLeast,
        threshold: 0.0,
        time_limit_s: None,
    };
    let eps: Vec<f64> = (-100..=100).map(|k| k as f64 * 1e-6).collect();
    let ts: Vec<f64> = (0..=40).map(|k| k as f64 * 0.5).collect();
    let lead = linspace_step((FIRST_ZERO - ENVELOPE_WIDTH).max(6.29), FIRST_ZERO - 1e-4 - 0.005, 0.01)?;
    let mut min_eta = f64::INFINITY;
    let mut min_gap = f64::INFINITY;
    for &t in &ts {
        let mut ys: Vec<f64> = lead.clone();
        ys.extend(eps.iter().map(|e| FIRST_ZERO + e));
        let vals = ys.iter().map(|&y| eta_resolved(y, t, cfg)).collect::<Result<Vec<_>>>()?;
        let env = envelope(&ys, &vals, ENVELOPE_WIDTH);
        let boundary = env[lead.len()];
        for &e in &eps {
            min_eta = min_eta.min(eta(FIRST_ZERO + e, t, cfg)?);
        }
        for v in &vals[lead.len()..] {
            min_gap = min_gap.min(v - boundary);
        }
    }
    let detail = format!("min eta over the grid {min_eta:.3e} (> 0); min of eta/theta_resolved minus envelope at the lower boundary");
    Ok(check.finish(start, min_gap, min_eta > 0.0, detail))
}

/// |log|ζ(0.95+yi)|| < 2 up to e¹².
pub fn criterion_10(cfg: &EvalConfig) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 10,
        name: "no crossing of log|zeta(0.95+yi)| = +-2 below e^12",
        relation: Relation::AtMost,
        threshold: 0.0,
        time_limit_s: Some(600.0),
    };
    let cap = 12f64.exp();
    let mut found = 0;
    let mut detail = String::new();
    for s in [-2.0, 2.0] {
        let r = first_crossing_y(s, 0.95, 1.0, cap, cfg)?;
        if r.found().is_some() {
            found += 1;
        }
        detail.push_str(&format!(
            "s = {s}: {:?}, log|zeta| in [{:.3}, {:.3}] over {} evaluations; ",
            r.outcome, r.min_log_abs, r.max_log_abs, r.evaluations
        ));
    }
    detail.push_str("desk-scale cap e^12 instead of e^25");
    Ok(check.finish(start, found as f64, true, detail))
}

fn digests(spec: &ExperimentSpec) -> Result<Vec<String>> {
    let m = run_experiment(spec)?;
    Ok(m.outputs.into_iter().map(|o| format!("{} {}", o.file, o.sha256)).collect())
}

/// Byte-identical fig1 and scan outputs across runs and worker counts.
pub fn criterion_11(cfg: &EvalConfig, scratch: &Path) -> Result<CriterionReport> {
    let start = Instant::now();
    let check = Check {
        id: 11,
        name: "determinism across runs and worker counts",
        relation: Relation::AtMost,
        threshold: 0.0,
        time_limit_s: None,
    };
    let mut mismatches = 0;
    let mut compared = 0;
    for kind in [Kind::Fig1, Kind::Scan] {
        let mut base = ExperimentSpec::new(kind, scratch);
        base.eval = *cfg;
        // desk-sized ranges; the code paths are those of the full defaults
        base.params.y_min = Some(if kind == Kind::Fig1 { 0.0 } else { 6.29 });
        base.params.y_max = Some(300.0);
        base.params.y_step = Some(if kind == Kind::Fig1 { 0.05 } else { 0.1 });
        let mut runs = Vec::new();
        for (i, workers) in [1usize, 4, 1, 4].into_iter().enumerate() {
            let mut spec = base.clone();
            spec.workers = Some(workers);
            spec.out = scratch.join(format!("{kind}-{i}-w{workers}"));
            runs.push(digests(&spec)?);
        }
        for r in &runs[1..] {
            compared += 1;
            if *r != runs[0] {
                mismatches += 1;
            }
        }
    }
    let detail = format!("{compared} digest comparisons over fig1 and scan with workers {{1, 4}}");
    Ok(check.finish(start, mismatches as f64, true, detail))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// Runs one criterion by number (1–11).
pub fn run_criterion(id: u8, cfg: &EvalConfig, workers: Option<usize>, scratch: &Path) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg, workers),
        4 => criterion_4(cfg, workers),
        5 => criterion_5(cfg, workers),
        6 => criterion_6(cfg, workers),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        10 => criterion_10(cfg),
        11 => criterion_11(cfg, scratch),
        _ => Err(Error::InvalidSpec(format!("no criterion {id}"))),
    }
}

/// Runs every criterion, calling `each` as soon as one finishes. Errors are
/// reported as failures of that criterion.
pub fn validate_suite(
    cfg: &EvalConfig,
    workers: Option<usize>,
    scratch: &Path,
    only: &[u8],
    mut each: impl FnMut(&CriterionReport),
) -> SuiteReport {
    let ids: Vec<u8> = if only.is_empty() { (1..=11).collect() } else { only.to_vec() };
    let mut criteria = Vec::new();
    for id in ids {
        let report = run_criterion(id, cfg, workers, scratch).unwrap_or_else(|e| CriterionReport {
            id,
            name: format!("criterion {id}"),
            measured: f64::NAN,
            relation: Relation::AtMost,
            threshold: f64::NAN,
            time_limit_s: None,
            seconds: 0.0,
            passed: false,
            detail: format!("error: {e}"),
        });
        each(&report);
        criteria.push(report);
    }
    SuiteReport { criteria }
}
