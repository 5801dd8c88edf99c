//! Declarative experiment runs: one spec in, CSV datasets plus a manifest out.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::write::GzEncoder;
use flate2::{Compression, GzBuilder};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::grid::{self, par_map};
use crate::monotonicity::{
    eta, eta_resolved, eta_tilde, eta_tilde_a, first_crossing_y, scan_monotonicity, theta, theta_resolved, x_lower,
    x_of_t, CrossingResult, ScanGrid,
};
use crate::special::{chi, ComplexPoint};
use crate::spectrum::detect_spectrum;
use crate::zeta::{core, head_length, partial_sums, zeta, EvalConfig};
use crate::{Error, Result};

/// First nontrivial zero height on the critical line.
pub const FIRST_ZERO: f64 = 14.134725141734694;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Scan,
    Spectrum,
    Crossing,
}

impl Kind {
    pub const ALL: [Kind; 15] = [
        Kind::Fig1,
        Kind::Fig2,
        Kind::Fig3,
        Kind::Fig4,
        Kind::Fig5,
        Kind::Fig6,
        Kind::Fig7,
        Kind::Fig8,
        Kind::Fig9,
        Kind::Fig10,
        Kind::Fig11,
        Kind::Fig12,
        Kind::Scan,
        Kind::Spectrum,
        Kind::Crossing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Fig1 => "fig1",
            Kind::Fig2 => "fig2",
            Kind::Fig3 => "fig3",
            Kind::Fig4 => "fig4",
            Kind::Fig5 => "fig5",
            Kind::Fig6 => "fig6",
            Kind::Fig7 => "fig7",
            Kind::Fig8 => "fig8",
            Kind::Fig9 => "fig9",
            Kind::Fig10 => "fig10",
            Kind::Fig11 => "fig11",
            Kind::Fig12 => "fig12",
            Kind::Scan => "scan",
            Kind::Spectrum => "spectrum",
            Kind::Crossing => "crossing",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown experiment kind {s:?}")))
    }
}

/// Tunable parameters; unset fields take the kind's defaults.
///
/// For `fig12` the y grid is geometric: `y_step` is the step in ln y.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_step: Option<f64>,
    /// Deformation parameters; x = ½(1 − e^{−t}).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_set: Option<Vec<f64>>,
    /// Height of the single point used by fig6, fig7 and spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    /// Target levels of log|ζ| for crossing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    /// Real part for crossing and fig12.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Largest height marched by fig12 and crossing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_cap: Option<f64>,
    /// Evaluations allowed before outputs are truncated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_cap: Option<u64>,
}

impl Params {
    /// Fields of `self` override those of `base`.
    fn over(self, base: Params) -> Params {
        Params {
            y_min: self.y_min.or(base.y_min),
            y_max: self.y_max.or(base.y_max),
            y_step: self.y_step.or(base.y_step),
            t: self.t.or(base.t),
            alpha: self.alpha.or(base.alpha),
            a: self.a.or(base.a),
            x_set: self.x_set.or(base.x_set),
            height: self.height.or(base.height),
            s: self.s.or(base.s),
            x: self.x.or(base.x),
            tolerance: self.tolerance.or(base.tolerance),
            height_cap: self.height_cap.or(base.height_cap),
            eval_cap: self.eval_cap.or(base.eval_cap),
        }
    }
}

fn fig_range(y_min: f64, y_max: f64, y_step: f64) -> Params {
    Params {
        y_min: Some(y_min),
        y_max: Some(y_max),
        y_step: Some(y_step),
        ..Params::default()
    }
}

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|k| from + k as f64 * step).collect()
}

/// Default parameters of each kind, taken from the figure captions.
///
/// Grids for η-type diagnostics start one step above 0 because they need y > 0.
pub fn defaults(kind: Kind) -> Params {
    let base = Params {
        eval_cap: Some(grid::DEFAULT_CAP),
        ..Params::default()
    };
    let p = match kind {
        Kind::Fig1 => Params {
            x_set: Some(vec![0.05, 0.5]),
            ..fig_range(0.0, 1e4, 0.01)
        },
        Kind::Fig2 => Params {
            t: Some(vec![0.0, 10.0]),
            ..fig_range(6.29, 2e3, 0.1)
        },
        Kind::Fig3 => Params {
            t: Some(vec![10.0]),
            ..fig_range(0.01, 50.0, 0.01)
        },
        Kind::Fig4 => Params {
            t: Some(vec![0.0, 1.0, 2.0, 3.0]),
            ..fig_range(0.1, 1e4, 0.1)
        },
        Kind::Fig5 => Params {
            t: Some(vec![10.0]),
            ..fig_range(0.1, 1e4, 0.1)
        },
        Kind::Fig6 | Kind::Fig7 | Kind::Spectrum => Params {
            height: Some(2e4),
            t: Some(vec![2.0]),
            ..Params::default()
        },
        Kind::Fig8 | Kind::Fig9 => fig_range(0.0, 2e4, 1.0),
        Kind::Fig10 => Params {
            t: Some(vec![5.0]),
            a: Some(steps(0.0, 1.0, 0.1)),
            ..fig_range(15.0, 60.0, 0.05)
        },
        Kind::Fig11 => Params {
            t: Some(steps(0.0, 20.0, 2.0)),
            ..fig_range(FIRST_ZERO - 1e-4, FIRST_ZERO + 1e-4, 1e-6)
        },
        Kind::Fig12 => Params {
            x: Some(0.95),
            height_cap: Some(12f64.exp()),
            ..fig_range(1.0, 25f64.exp(), 1e-4)
        },
        Kind::Scan => Params {
            x_set: Some(steps(0.0, 0.5, 0.05)),
            tolerance: Some(crate::monotonicity::DEFAULT_TOLERANCE),
            ..fig_range(6.29, 2e3, 0.1)
        },
        Kind::Crossing => Params {
            s: Some(vec![-2.0, 2.0]),
            x: Some(0.95),
            y_min: Some(1.0),
            height_cap: Some(12f64.exp()),
            ..Params::default()
        },
    };
    p.over(base)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: Kind,
    #[serde(default)]
    pub params: Params,
    pub out: PathBuf,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub gzip: bool,
    #[serde(default)]
    pub eval: EvalConfig,
}

impl ExperimentSpec {
    pub fn new(kind: Kind, out: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            kind,
            params: Params::default(),
            out: out.into(),
            workers: None,
            gzip: false,
            eval: EvalConfig::default(),
        }
    }

    /// Defaults filled in and every value range-checked.
    pub fn resolved(&self) -> Result<ExperimentSpec> {
        self.eval.validate()?;
        if self.workers == Some(0) {
            return Err(invalid("workers must be at least 1"));
        }
        let params = self.params.clone().over(defaults(self.kind));
        check_params(self.kind, &params)?;
        Ok(ExperimentSpec {
            params,
            ..self.clone()
        })
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

fn check_params(kind: Kind, p: &Params) -> Result<()> {
    let max_h = crate::zeta::MAX_HEIGHT;
    if let (Some(lo), Some(hi), Some(step)) = (p.y_min, p.y_max, p.y_step) {
        if !(lo >= 0.0 && hi <= max_h && lo <= hi && step > 0.0 && step.is_finite()) {
            return Err(invalid(format!("y range [{lo}, {hi}] step {step} is outside [0, 1e11]")));
        }
        let needs_positive = matches!(kind, Kind::Fig2 | Kind::Fig3 | Kind::Fig4 | Kind::Fig5 | Kind::Fig10 | Kind::Fig11);
        if needs_positive && lo <= 0.0 {
            return Err(invalid(format!("{kind} needs y_min > 0")));
        }
        if kind == Kind::Fig12 && lo <= 0.0 {
            return Err(invalid("fig12 uses a geometric grid and needs y_min > 0"));
        }
    }
    if let Some(ts) = &p.t {
        if ts.is_empty() || ts.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(invalid("t values must be finite and >= 0"));
        }
    }
    for (name, list) in [("alpha", &p.alpha), ("a", &p.a)] {
        if let Some(v) = list {
            if v.is_empty() || v.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(invalid(format!("{name} values must lie in [0, 1]")));
            }
        }
    }
    if let Some(xs) = &p.x_set {
        if xs.is_empty() {
            return Err(invalid("x_set is empty"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) || xs.iter().any(|x| !(*x <= 0.5 && *x >= -1.0)) {
            return Err(invalid("x_set must be strictly increasing within [-1, 0.5]"));
        }
    }
    if let Some(h) = p.height {
        if !(100.0..=1e7).contains(&h) {
            return Err(invalid(format!("height {h} must lie in [100, 1e7]")));
        }
    }
    if let Some(x) = p.x {
        if !(0.5..=1.0).contains(&x) {
            return Err(invalid(format!("x = {x} must lie in [0.5, 1]")));
        }
    }
    if let Some(s) = &p.s {
        if s.is_empty() || s.iter().any(|v| !v.is_finite()) {
            return Err(invalid("s levels must be finite"));
        }
    }
    if let Some(c) = p.height_cap {
        if !(c > 1.0 && c <= max_h) {
            return Err(invalid(format!("height cap {c} must lie in (1, 1e11]")));
        }
    }
    if let Some(tol) = p.tolerance {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(invalid("tolerance must be finite and >= 0"));
        }
    }
    if p.eval_cap == Some(0) {
        return Err(invalid("eval_cap must be positive"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub columns: Vec<String>,
    pub rows: u64,
    /// Diagnostic values computed for this file.
    pub evaluations: u64,
    /// Points whose value was undefined (written as NaN).
    pub undefined_points: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub evaluations: u64,
    pub outputs: Vec<OutputRecord>,
    pub truncated: bool,
    /// Set when the run substitutes a smaller range than the figure's full range.
    pub desk_scale: Option<String>,
}

/// Version string embedded at build time.
pub fn version() -> &'static str {
    env!("ZETA_LAB_VERSION")
}

/// One CSV: an axis column (or two) followed by value columns.
struct Table {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    evaluations: u64,
    undefined: u64,
}

struct Budget {
    left: u64,
    truncated: bool,
}

impl Budget {
    /// Shortens `points` (each costing `per_point` evaluations) to what is left.
    fn take(&mut self, points: &mut Vec<f64>, per_point: u64) {
        let fit = (self.left / per_point.max(1)) as usize;
        if points.len() > fit {
            points.truncate(fit);
            self.truncated = true;
        }
        self.left -= points.len() as u64 * per_point;
    }
}

struct Runner<'a> {
    spec: &'a ExperimentSpec,
    p: &'a Params,
    cfg: &'a EvalConfig,
    budget: Budget,
    tables: Vec<Table>,
}

fn is_undefined(e: &Error) -> bool {
    matches!(e, Error::NearZeroDenominator { .. })
}

impl Runner<'_> {
    fn y_grid(&self) -> Result<Vec<f64>> {
        grid::linspace_step(self.p.y_min.unwrap(), self.p.y_max.unwrap(), self.p.y_step.unwrap())
    }

    fn curve<F>(&mut self, name: String, axis: &str, mut points: Vec<f64>, f: F) -> Result<()>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        self.budget.take(&mut points, 1);
        let values = par_map(&points, self.spec.workers, |p| match f(p) {
            Ok(v) => Ok(v),
            Err(e) if is_undefined(&e) => Ok(f64::NAN),
            Err(e) => Err(e),
        })?;
        let undefined = values.iter().filter(|v| v.is_nan()).count() as u64;
        self.tables.push(Table {
            columns: vec![axis.to_string(), name.clone()],
            name,
            rows: points.iter().zip(&values).map(|(&p, &v)| vec![p, v]).collect(),
            evaluations: points.len() as u64,
            undefined,
        });
        Ok(())
    }

    fn t_list(&self) -> Vec<f64> {
        self.p.t.clone().unwrap_or_default()
    }

    fn run(&mut self) -> Result<Option<String>> {
        let cfg = *self.cfg;
        let kind = self.spec.kind;
        let mut desk = None;
        match kind {
            Kind::Fig1 | Kind::Fig8 | Kind::Fig9 => {
                let ys = self.y_grid()?;
                match kind {
                    Kind::Fig1 => {
                        for x in self.p.x_set.clone().unwrap() {
                            self.curve(format!("abs_zeta_re{x}"), "y", ys.clone(), |y| {
                                Ok(zeta(ComplexPoint::new(x, y)?, &cfg)?.norm())
                            })?;
                        }
                    }
                    Kind::Fig8 => {
                        self.curve("log_core".into(), "y", ys.clone(), |y| Ok(core(ComplexPoint::new(0.0, y)?, &cfg)?.ln()))?;
                        self.curve("log_abs_zeta".into(), "y", ys, |y| {
                            Ok(zeta(ComplexPoint::new(0.0, y)?, &cfg)?.norm().ln())
                        })?;
                        let zoom = grid::linspace_step(500.0, 550.0, 0.01)?;
                        self.curve("log_core_zoom".into(), "y", zoom.clone(), |y| {
                            Ok(core(ComplexPoint::new(0.0, y)?, &cfg)?.ln())
                        })?;
                        self.curve("log_abs_zeta_zoom".into(), "y", zoom, |y| {
                            Ok(zeta(ComplexPoint::new(0.0, y)?, &cfg)?.norm().ln())
                        })?;
                    }
                    _ => {
                        self.curve("log_core".into(), "y", ys.clone(), |y| Ok(core(ComplexPoint::new(0.0, y)?, &cfg)?.ln()))?;
                        for (name, k) in [("log_chi_upper", 2.2f64), ("log_chi_lower", 0.6)] {
                            self.curve(name.into(), "y", ys.clone(), |y| {
                                Ok(k.ln() + chi(ComplexPoint::new(0.0, y)?)?.log_mag)
                            })?;
                        }
                    }
                }
            }
            Kind::Fig2 => {
                let ys = self.y_grid()?;
                for t in self.t_list() {
                    self.curve(format!("log_eta_t{t}"), "y", ys.clone(), |y| Ok(eta(y, t, &cfg)?.ln()))?;
                }
            }
            Kind::Fig3 => {
                let ys = self.y_grid()?;
                for t in self.t_list() {
                    self.curve(format!("log_eta_t{t}"), "y", ys.clone(), |y| Ok(eta(y, t, &cfg)?.ln()))?;
                }
                self.curve("log_theta_minus_3".into(), "y", ys, |y| Ok(theta(y, &cfg)?.ln() - 3.0))?;
            }
            Kind::Fig4 => {
                let near = grid::linspace_step(0.05, 75.0, 0.05)?;
                let ts = self.t_list();
                for &t in &ts {
                    self.curve(format!("eta_tilde_t{t}"), "y", near.clone(), |y| eta_tilde(y, t, &cfg))?;
                }
                let t = *ts.last().unwrap();
                self.curve(format!("eta_tilde_t{t}_wide"), "y", self.y_grid()?, |y| eta_tilde(y, t, &cfg))?;
            }
            Kind::Fig5 => {
                let ys = self.y_grid()?;
                for t in self.t_list() {
                    self.curve(format!("log_eta_tilde_t{t}"), "y", ys.clone(), |y| Ok(eta_tilde(y, t, &cfg)?.ln()))?;
                    self.curve(format!("log_x_lower_t{t}_minus_0.75"), "y", ys.clone(), |y| {
                        Ok(x_lower(y, t)?.ln() - 0.75)
                    })?;
                }
            }
            Kind::Fig6 | Kind::Spectrum => {
                let z = ComplexPoint::new(x_of_t(self.t_list()[0]), self.p.height.unwrap())?;
                let mut ns: Vec<f64> = (1..=head_length(0.0, z.im)).map(|n| n as f64).collect();
                self.budget.take(&mut ns, 1);
                if ns.is_empty() {
                    return Ok(None);
                }
                let series = partial_sums(z, ns.len())?;
                let zv = zeta(z, &cfg)?;
                let mags = series.magnitudes();
                self.tables.push(Table {
                    name: "abs_partial_sum".into(),
                    columns: vec!["n".into(), "abs_partial_sum".into()],
                    rows: ns.iter().zip(&mags).map(|(&n, &m)| vec![n, m]).collect(),
                    evaluations: ns.len() as u64,
                    undefined: 0,
                });
                if kind == Kind::Fig6 {
                    self.tables.push(Table {
                        name: "abs_zeta".into(),
                        columns: vec!["n".into(), "abs_zeta".into()],
                        rows: ns.iter().map(|&n| vec![n, zv.norm()]).collect(),
                        evaluations: ns.len() as u64,
                        undefined: 0,
                    });
                } else {
                    let report = detect_spectrum(&series, zv)?;
                    self.write_json("spectrum.json", &report)?;
                }
            }
            Kind::Fig7 => {
                let z = ComplexPoint::new(x_of_t(self.t_list()[0]), self.p.height.unwrap())?;
                let mut alphas = self.p.alpha.clone().unwrap_or_else(|| steps(0.0, 1.0, 0.001));
                self.budget.take(&mut alphas, 1);
                let zv = zeta(z, &cfg)?;
                let sums = partial_sums(z, head_length(0.0, z.im).max(1))?;
                self.tables.push(Table {
                    name: "abs_zeta_alpha".into(),
                    columns: vec!["alpha".into(), "abs_zeta_alpha".into()],
                    rows: alphas
                        .iter()
                        .map(|&a| vec![a, (zv - sums.values[head_length(a, z.im)]).norm()])
                        .collect(),
                    evaluations: alphas.len() as u64,
                    undefined: 0,
                });
            }
            Kind::Fig10 => {
                let ys = self.y_grid()?;
                let t = self.t_list()[0];
                for a in self.p.a.clone().unwrap() {
                    self.curve(format!("eta_tilde_a{a:.2}_t{t}"), "y", ys.clone(), |y| eta_tilde_a(y, t, a, &cfg))?;
                }
                self.surface(t)?;
            }
            Kind::Fig11 => {
                let ys = self.y_grid()?;
                self.curve("log_theta".into(), "y", ys.clone(), |y| Ok(theta(y, &cfg)?.ln()))?;
                self.curve("log_theta_resolved".into(), "y", ys.clone(), |y| Ok(theta_resolved(y, &cfg)?.ln()))?;
                for t in self.t_list() {
                    self.curve(format!("log_eta_t{t}"), "y", ys.clone(), |y| Ok(eta(y, t, &cfg)?.ln()))?;
                    self.curve(format!("log_eta_resolved_t{t}"), "y", ys.clone(), |y| {
                        Ok(eta_resolved(y, t, &cfg)?.ln())
                    })?;
                }
            }
            Kind::Fig12 => {
                let (lo, hi, step) = (self.p.y_min.unwrap(), self.p.y_max.unwrap(), self.p.y_step.unwrap());
                let cap = self.p.height_cap.unwrap();
                let top = hi.min(cap);
                if cap < hi {
                    desk = Some(format!("heights capped at {cap:.6e} instead of {hi:.6e}"));
                }
                let count = ((top / lo).ln() / step + 1e-9).floor() as usize + 1;
                let ys: Vec<f64> = (0..count).map(|k| lo * (k as f64 * step).exp()).collect();
                let x = self.p.x.unwrap();
                self.curve(format!("log_abs_zeta_re{x}"), "y", ys, |y| {
                    Ok(zeta(ComplexPoint::new(x, y)?, &cfg)?.norm().ln())
                })?;
            }
            Kind::Scan => {
                let mut ys = self.y_grid()?;
                let xs = self.p.x_set.clone().unwrap();
                self.budget.take(&mut ys, xs.len() as u64);
                if ys.is_empty() {
                    return Ok(None);
                }
                let grid = ScanGrid {
                    y_min: ys[0],
                    y_max: ys[ys.len() - 1],
                    y_step: self.p.y_step.unwrap(),
                    x_set: xs,
                    tolerance: self.p.tolerance.unwrap(),
                };
                let result = scan_monotonicity(&grid, u64::MAX, self.spec.workers, &cfg)?;
                let mut values = Vec::new();
                for (&y, row) in result.ys.iter().zip(&result.values) {
                    for (&x, &v) in grid.x_set.iter().zip(row) {
                        values.push(vec![y, x, v]);
                    }
                }
                self.tables.push(Table {
                    name: "values".into(),
                    columns: vec!["y".into(), "x".into(), "abs_zeta".into()],
                    evaluations: values.len() as u64,
                    rows: values,
                    undefined: 0,
                });
                self.tables.push(Table {
                    name: "violations".into(),
                    columns: ["y", "x1", "x2", "lhs", "rhs", "margin"].map(String::from).to_vec(),
                    rows: result
                        .violations
                        .iter()
                        .map(|v| vec![v.y, v.x1, v.x2, v.lhs, v.rhs, v.margin])
                        .collect(),
                    evaluations: 0,
                    undefined: 0,
                });
                let mut summary = result.clone();
                summary.values.clear();
                summary.ys.clear();
                self.write_json("scan.json", &summary)?;
            }
            Kind::Crossing => {
                let x = self.p.x.unwrap();
                let cap = self.p.height_cap.unwrap();
                let start = self.p.y_min.unwrap();
                let results: Vec<CrossingResult> = self
                    .p
                    .s
                    .clone()
                    .unwrap()
                    .into_iter()
                    .map(|s| first_crossing_y(s, x, start, cap, &cfg))
                    .collect::<Result<_>>()?;
                self.tables.push(Table {
                    name: "first_y".into(),
                    columns: vec!["s".into(), "first_y".into()],
                    rows: results.iter().map(|r| vec![r.s, r.found().unwrap_or(f64::NAN)]).collect(),
                    // every step of every march, not one per row
                    evaluations: results.iter().map(|r| r.evaluations).sum(),
                    undefined: 0,
                });
                self.write_json("crossing.json", &results)?;
            }
        }
        Ok(desk)
    }

    fn surface(&mut self, t: f64) -> Result<()> {
        let mut ys = grid::linspace_step(43.0, 57.0, 0.1)?;
        let a_grid = steps(0.0, 1.0, 0.05);
        self.budget.take(&mut ys, a_grid.len() as u64);
        let cfg = *self.cfg;
        let rows = par_map(&ys, self.spec.workers, |y| {
            a_grid
                .iter()
                .map(|&a| match eta_tilde_a(y, t, a, &cfg) {
                    Ok(v) => Ok(vec![y, a, v]),
                    Err(e) if is_undefined(&e) => Ok(vec![y, a, f64::NAN]),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let rows: Vec<Vec<f64>> = rows.into_iter().flatten().collect();
        self.tables.push(Table {
            name: format!("eta_tilde_a_surface_t{t}"),
            columns: vec!["y".into(), "a".into(), format!("eta_tilde_a_t{t}")],
            undefined: rows.iter().filter(|r| r[2].is_nan()).count() as u64,
            evaluations: rows.len() as u64,
            rows,
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, file: &str, value: &T) -> Result<()> {
        let path = self.spec.out.join(format!("{}_{file}", self.spec.kind));
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Formats a table as CSV text (17 significant digits per value).
fn csv_bytes(table: &Table) -> Vec<u8> {
    let mut buf = Vec::with_capacity(table.rows.len() * 48);
    buf.extend_from_slice(table.columns.join(",").as_bytes());
    buf.push(b'\n');
    for row in &table.rows {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                buf.push(b',');
            }
            write!(buf, "{v:.16e}").expect("write to vec");
        }
        buf.push(b'\n');
    }
    buf
}

fn gzip_bytes(data: &[u8]) -> Vec<u8> {
    let mut enc: GzEncoder<Vec<u8>> = GzBuilder::new().mtime(0).write(Vec::new(), Compression::default());
    enc.write_all(data).expect("write to vec");
    enc.finish().expect("finish gzip in memory")
}

/// Runs one experiment and writes its CSVs and `manifest.json` into `spec.out`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunManifest> {
    let spec = spec.resolved()?;
    let started = chrono::Utc::now().to_rfc3339();
    std::fs::create_dir_all(&spec.out).map_err(|e| Error::io(&spec.out, e))?;
    let mut runner = Runner {
        spec: &spec,
        p: &spec.params,
        cfg: &spec.eval,
        budget: Budget {
            left: spec.params.eval_cap.unwrap(),
            truncated: false,
        },
        tables: Vec::new(),
    };
    let desk_scale = runner.run()?;
    let truncated = runner.budget.truncated;
    let mut outputs = Vec::new();
    for table in &runner.tables {
        let mut bytes = csv_bytes(table);
        let mut file = format!("{}_{}.csv", spec.kind, table.name);
        if spec.gzip {
            bytes = gzip_bytes(&bytes);
            file.push_str(".gz");
        }
        let path = spec.out.join(&file);
        std::fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
        outputs.push(OutputRecord {
            file,
            columns: table.columns.clone(),
            rows: table.rows.len() as u64,
            evaluations: table.evaluations,
            undefined_points: table.undefined,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
    }
    let manifest = RunManifest {
        evaluations: outputs.iter().map(|o| o.evaluations).sum(),
        spec: spec.clone(),
        version: version().to_string(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        outputs,
        truncated,
        desk_scale,
    };
    let path = spec.out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Reads a spec from JSON.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_names() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert!("fig13".parse::<Kind>().is_err());
    }

    #[test]
    fn every_kind_resolves_with_defaults() {
        for k in Kind::ALL {
            ExperimentSpec::new(k, "/tmp/unused").resolved().unwrap();
        }
    }

    #[test]
    fn overrides_are_range_checked() {
        let mut s = ExperimentSpec::new(Kind::Scan, "/tmp/unused");
        s.params.x_set = Some(vec![]);
        assert!(matches!(s.resolved(), Err(Error::InvalidSpec(_))));
        s.params.x_set = Some(vec![0.1, 0.7]);
        assert!(s.resolved().is_err());
        let mut s = ExperimentSpec::new(Kind::Fig10, "/tmp/unused");
        s.params.a = Some(vec![1.5]);
        assert!(s.resolved().is_err());
        let mut s = ExperimentSpec::new(Kind::Fig1, "/tmp/unused");
        s.params.y_max = Some(2e11);
        assert!(s.resolved().is_err());
        let mut s = ExperimentSpec::new(Kind::Fig2, "/tmp/unused");
        s.params.t = Some(vec![-1.0]);
        assert!(s.resolved().is_err());
        s.params.t = Some(vec![1.0]);
        s.workers = Some(0);
        assert!(s.resolved().is_err());
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let t = Table {
            name: "c".into(),
            columns: vec!["y".into(), "c".into()],
            rows: vec![vec![0.1, 1.0 / 3.0]],
            evaluations: 1,
            undefined: 0,
        };
        let text = String::from_utf8(csv_bytes(&t)).unwrap();
        assert_eq!(text, "y,c\n1.0000000000000001e-1,3.3333333333333331e-1\n");
    }

    #[test]
    fn gzip_is_reproducible() {
        let a = gzip_bytes(b"y,v\n1,2\n");
        assert_eq!(a, gzip_bytes(b"y,v\n1,2\n"));
    }

    #[test]
    fn budget_truncates() {
        let mut b = Budget { left: 10, truncated: false };
        let mut pts = vec![0.0; 4];
        b.take(&mut pts, 3);
        assert_eq!(pts.len(), 3);
        assert!(b.truncated);
        assert_eq!(b.left, 1);
    }
}
