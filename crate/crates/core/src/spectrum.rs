//! Plateau ("semi-limit") detection on |S_n(z)| and on α-profiles.
//!
//! A centred moving median smooths the sign-alternating oscillation; runs of
//! the median that stay inside a relative band become plateaus, and abrupt
//! changes of the median over one window mark surges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::ComplexPoint;
use crate::zeta::{head_length, partial_sums, zeta, EvalConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub n_start: usize,
    pub n_end: usize,
    /// Median of the raw signal over the plateau.
    pub value: f64,
    /// Half the 5–95 % interquantile range of the raw signal.
    pub spread: f64,
}

/// Detector thresholds; recorded in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Relative half-width of a plateau band.
    pub band: f64,
    /// Relative change of the median over one window that marks a surge.
    pub surge_threshold: f64,
    pub min_window: usize,
    /// Window is `max(min_window, 2⌊fraction·Im z⌋ + 1)`.
    pub window_fraction: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            band: 0.15,
            surge_threshold: 0.3,
            min_window: 21,
            window_fraction: 0.005,
        }
    }
}

impl DetectorParams {
    pub fn window_for_height(&self, height: f64) -> usize {
        let w = 2 * (self.window_fraction * height).floor() as usize + 1;
        w.max(self.min_window)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub z: ComplexPoint,
    pub plateaus: Vec<Plateau>,
    /// One index per gap between consecutive plateaus: the steepest point of the median there.
    pub surges: Vec<usize>,
    pub n_count: usize,
    pub final_surge_n: usize,
    pub zeta_modulus: f64,
    pub window: usize,
    pub params: DetectorParams,
}

impl SpectrumReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Distance of the last semi-limit from |ζ(z)| in units of its spread.
    pub fn last_plateau_deviation(&self) -> Option<f64> {
        let last = self.plateaus.last()?;
        Some((last.value - self.zeta_modulus).abs() / last.spread.max(f64::MIN_POSITIVE))
    }
}

/// Centred moving median; the window shrinks symmetrically at the ends.
pub fn moving_median(signal: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let len = signal.len();
    let mut sorted: Vec<f64> = Vec::with_capacity(window);
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let h = half.min(i).min(len - 1 - i);
        let (want_lo, want_hi) = (i - h, i + h + 1);
        while hi < want_hi {
            let v = signal[hi];
            let pos = sorted.partition_point(|&x| x < v);
            sorted.insert(pos, v);
            hi += 1;
        }
        while lo < want_lo {
            let v = signal[lo];
            let pos = sorted.partition_point(|&x| x < v);
            sorted.remove(pos);
            lo += 1;
        }
        // the window can also shrink on the right near the end
        while hi > want_hi {
            hi -= 1;
            let v = signal[hi];
            let pos = sorted.partition_point(|&x| x < v);
            sorted.remove(pos);
        }
        out.push(median_sorted(&sorted));
    }
    out
}

fn median_sorted(s: &[f64]) -> f64 {
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn quantile_sorted(s: &[f64], q: f64) -> f64 {
    let pos = q * (s.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < s.len() {
        s[i] + frac * (s[i + 1] - s[i])
    } else {
        s[i]
    }
}

fn sorted_copy(s: &[f64]) -> Vec<f64> {
    let mut v = s.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn surge_mask(m: &[f64], window: usize, threshold: f64) -> Vec<bool> {
    let mut mask = vec![false; m.len()];
    for n in 0..m.len().saturating_sub(window) {
        if (m[n + window] - m[n]).abs() / m[n].max(1e-6) > threshold {
            for flag in &mut mask[n..=n + window] {
                *flag = true;
            }
        }
    }
    mask
}

fn mean(s: &[f64]) -> f64 {
    s.iter().sum::<f64>() / s.len() as f64
}

/// Plateaus of `signal` (indices reported 1-based) for a given window.
pub fn detect_plateaus(signal: &[f64], window: usize, params: &DetectorParams) -> Vec<Plateau> {
    let m = moving_median(signal, window);
    let mask = surge_mask(&m, window, params.surge_threshold);
    let min_len = 2 * window;
    let mut prefix = Vec::with_capacity(m.len() + 1);
    prefix.push(0.0);
    for &v in &m {
        prefix.push(prefix[prefix.len() - 1] + v);
    }
    let drift = 0.5 * params.band;
    let mut out = Vec::new();
    let mut i = 0;
    while i < m.len() {
        if mask[i] {
            i += 1;
            continue;
        }
        let mut run: Vec<f64> = vec![m[i]];
        let (mut lo, mut hi) = (m[i], m[i]);
        let mut j = i + 1;
        let mut drifted = false;
        while j < m.len() && !mask[j] {
            let v = m[j];
            let nlo = lo.min(v);
            let nhi = hi.max(v);
            let pos = run.partition_point(|&x| x < v);
            run.insert(pos, v);
            let med = median_sorted(&run);
            if nhi - med > params.band * med || med - nlo > params.band * med {
                break;
            }
            if j + 1 - i >= window {
                let trailing = (prefix[j + 1] - prefix[j + 1 - window]) / window as f64;
                if (trailing - med).abs() > drift * med {
                    drifted = true;
                    break;
                }
            }
            lo = nlo;
            hi = nhi;
            j += 1;
        }
        if drifted {
            // a small step inside the band: cut the run at its steepest point
            let from = (j + 1 - window).max(i + 1);
            j = steepest_in_gap(&m, from, j + 1);
        }
        let len = j - i;
        if len >= min_len {
            let med = median_sorted(&sorted_copy(&m[i..j]));
            let head = mean(&m[i..i + window]);
            let tail = mean(&m[j - window..j]);
            if (head - tail).abs() <= drift * med && !is_drifting(&signal[i..j]) {
                let raw = sorted_copy(&signal[i..j]);
                out.push(Plateau {
                    n_start: i + 1,
                    n_end: j,
                    value: median_sorted(&raw),
                    spread: 0.5 * (quantile_sorted(&raw, 0.95) - quantile_sorted(&raw, 0.05)),
                });
            }
        }
        i = j;
    }
    out
}

/// Monotone and not constant: a ramp, not a fluctuation around a level.
fn is_drifting(s: &[f64]) -> bool {
    let up = s.windows(2).all(|w| w[1] >= w[0]);
    let down = s.windows(2).all(|w| w[1] <= w[0]);
    (up || down) && s[0] != s[s.len() - 1]
}

fn steepest_in_gap(m: &[f64], from: usize, to: usize) -> usize {
    // from/to are 1-based plateau ends/starts
    let mut best = (from, -1.0);
    for n in from..to.min(m.len()) {
        let d = (m[n] - m[n - 1]).abs();
        if d > best.1 {
            best = (n, d);
        }
    }
    best.0
}

/// Segments |S_n(z)| into plateaus and locates the surge toward ζ(z).
pub fn detect_spectrum(series: &crate::zeta::PartialSumSeries, zeta_value: Complex64) -> Result<SpectrumReport> {
    detect_spectrum_with(series, zeta_value, &DetectorParams::default())
}

pub fn detect_spectrum_with(
    series: &crate::zeta::PartialSumSeries,
    zeta_value: Complex64,
    params: &DetectorParams,
) -> Result<SpectrumReport> {
    let height = series.z.im;
    if height < 100.0 {
        return Err(Error::Domain(format!(
            "plateaus are not resolvable below Im(z) = 100, got {height}"
        )));
    }
    let needed = (0.6 * height).ceil() as usize;
    if series.n_max() < needed {
        return Err(Error::InsufficientLength {
            len: series.n_max(),
            needed,
        });
    }
    let signal = series.magnitudes();
    let window = params.window_for_height(height);
    let plateaus = detect_plateaus(&signal, window, params);
    if plateaus.is_empty() {
        return Err(Error::DegenerateSignal("no plateau found in |S_n|".into()));
    }
    let m = moving_median(&signal, window);
    let surges = plateaus
        .windows(2)
        .map(|p| steepest_in_gap(&m, p[0].n_end, p[1].n_start))
        .collect();
    let final_surge_n = final_surge(&m, &plateaus, params.band);
    Ok(SpectrumReport {
        z: series.z,
        n_count: plateaus.len(),
        plateaus,
        surges,
        final_surge_n,
        zeta_modulus: zeta_value.norm(),
        window,
        params: *params,
    })
}

/// First n after the penultimate plateau from which the median stays
/// outside that plateau's band until the last plateau begins.
fn final_surge(m: &[f64], plateaus: &[Plateau], band: f64) -> usize {
    let last = plateaus[plateaus.len() - 1];
    if plateaus.len() < 2 {
        return last.n_start;
    }
    let prev = plateaus[plateaus.len() - 2];
    let inside = |n: usize| (m[n - 1] - prev.value).abs() <= band * prev.value;
    let mut onset = last.n_start;
    for n in (prev.n_end + 1..last.n_start).rev() {
        if inside(n) {
            break;
        }
        onset = n;
    }
    onset
}

/// Onset α of the first semi-limit of an ascending α-profile: the steepest
/// point of the largest upward jump into a plateau, measured from the level
/// the profile starts at.
pub fn first_semilimit_from_profile(alphas: &[f64], values: &[f64]) -> Result<f64> {
    let params = DetectorParams::default();
    let window = params.min_window;
    if values.len() != alphas.len() || values.len() < 4 * window {
        return Err(Error::InsufficientLength {
            len: values.len(),
            needed: 4 * window,
        });
    }
    let plateaus = detect_plateaus(values, window, &params);
    if plateaus.is_empty() {
        return Err(Error::DegenerateSignal("alpha profile has no plateau".into()));
    }
    let m = moving_median(values, window);
    let mut prev_level = median_sorted(&sorted_copy(&values[..window]));
    let mut prev_end = 1;
    let mut best: Option<(f64, f64)> = None;
    for p in &plateaus {
        let jump = p.value / prev_level.max(1e-300);
        if best.map_or(true, |(j, _)| jump > j) {
            // the transition sits at the steepest point before the plateau
            let edge = if p.n_start > prev_end {
                steepest_in_gap(&m, prev_end, p.n_start)
            } else {
                p.n_start - 1
            };
            best = Some((jump, alphas[edge]));
        }
        prev_level = p.value;
        prev_end = p.n_end;
    }
    Ok(best.expect("nonempty").1)
}

/// Number of α samples in the profile used by [`first_semilimit_alpha`].
pub const ALPHA_GRID: usize = 1000;

/// |ζ_α(z)| on the uniform grid α_i = i/(ALPHA_GRID − 1).
pub fn alpha_profile(z: ComplexPoint, cfg: &EvalConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let z = z.check_finite()?;
    let full = zeta(z, cfg)?;
    let longest = head_length(0.0, z.im).max(1);
    let sums = partial_sums(z, longest)?;
    let alphas: Vec<f64> = (0..ALPHA_GRID).map(|i| i as f64 / (ALPHA_GRID - 1) as f64).collect();
    let values = alphas
        .iter()
        .map(|&a| (full - sums.values[head_length(a, z.im)]).norm())
        .collect();
    Ok((alphas, values))
}

/// The α at which |ζ_α(z)| settles onto its first semi-limit.
pub fn first_semilimit_alpha(z: ComplexPoint, cfg: &EvalConfig) -> Result<f64> {
    if z.im < 100.0 {
        return Err(Error::Domain(format!("needs Im(z) >= 100, got {}", z.im)));
    }
    let (alphas, values) = alpha_profile(z, cfg)?;
    first_semilimit_from_profile(&alphas, &values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn levels_signal(levels: &[f64], seg: usize, amp: f64) -> Vec<f64> {
        let mut v = Vec::new();
        for &l in levels {
            for k in 0..seg {
                v.push(l + amp * (0.9 * k as f64).sin());
            }
        }
        v
    }

    #[test]
    fn moving_median_of_constant_and_ramp() {
        let c = vec![2.0; 50];
        assert!(moving_median(&c, 21).iter().all(|&x| x == 2.0));
        let ramp: Vec<f64> = (0..30).map(|i| i as f64).collect();
        assert_eq!(moving_median(&ramp, 7), ramp);
    }

    #[test]
    fn moving_median_matches_naive() {
        let s: Vec<f64> = (0..200).map(|i| ((i * 37) % 101) as f64).collect();
        let w = 15;
        let m = moving_median(&s, w);
        for i in 0..s.len() {
            let h = (w / 2).min(i).min(s.len() - 1 - i);
            let naive = median_sorted(&sorted_copy(&s[i - h..=i + h]));
            assert_eq!(m[i], naive);
        }
    }

    #[test]
    fn three_levels_are_recovered() {
        let sig = levels_signal(&[3.0, 1.0, 2.0], 1000, 0.1);
        let p = detect_plateaus(&sig, 21, &DetectorParams::default());
        assert_eq!(p.len(), 3, "{p:?}");
        for (pl, want) in p.iter().zip([3.0, 1.0, 2.0]) {
            assert!((pl.value - want).abs() < 0.05);
        }
    }

    #[test]
    fn ramp_is_not_a_plateau() {
        // relative growth of 0.4 % per sample drifts 17 % over two windows
        let ramp: Vec<f64> = (0..3000).map(|i| (i as f64 * 4e-3).exp()).collect();
        let found = detect_plateaus(&ramp, 21, &DetectorParams::default());
        assert!(found.is_empty(), "{found:?}");
        let alphas: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let mono: Vec<f64> = alphas.iter().map(|a| 0.1 + 3.0 * a).collect();
        assert!(matches!(
            first_semilimit_from_profile(&alphas, &mono),
            Err(Error::DegenerateSignal(_))
        ));
    }

    #[test]
    fn profile_jump_picks_the_right_level() {
        let alphas: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let vals: Vec<f64> = alphas
            .iter()
            .map(|&a| if a < 0.3 { 0.2 } else if a < 0.6 { 0.5 } else { 2.0 })
            .collect();
        let got = first_semilimit_from_profile(&alphas, &vals).unwrap();
        assert!((got - 0.6).abs() < 0.02, "{got}");
    }

    #[test]
    fn short_or_low_series_is_rejected() {
        let z = ComplexPoint::new(0.3, 500.0).unwrap();
        let s = partial_sums(z, 100).unwrap();
        assert!(matches!(
            detect_spectrum(&s, Complex64::new(1.0, 0.0)),
            Err(Error::InsufficientLength { .. })
        ));
        let z = ComplexPoint::new(0.3, 50.0).unwrap();
        let s = partial_sums(z, 100).unwrap();
        assert!(detect_spectrum(&s, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn window_rule() {
        let p = DetectorParams::default();
        assert_eq!(p.window_for_height(100.0), 21);
        assert_eq!(p.window_for_height(20000.0), 201);
    }
}
