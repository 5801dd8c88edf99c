use proptest::prelude::*;
use zeta_lab::monotonicity::x_of_t;
use zeta_lab::special::ComplexPoint;
use zeta_lab::spectrum::{detect_plateaus, detect_spectrum, DetectorParams, SpectrumReport};
use zeta_lab::zeta::{partial_sums, zeta, EvalConfig};

fn report_at(height: f64) -> SpectrumReport {
    let z = ComplexPoint::new(x_of_t(2.0), height).unwrap();
    let series = partial_sums(z, height.ceil() as usize).unwrap();
    detect_spectrum(&series, zeta(z, &EvalConfig::default()).unwrap()).unwrap()
}

fn check_layout(r: &SpectrumReport, n_max: usize) {
    let p = &r.plateaus;
    assert_eq!(r.n_count, p.len());
    assert_eq!(r.surges.len(), p.len().saturating_sub(1));
    for (i, pl) in p.iter().enumerate() {
        assert!(pl.n_start <= pl.n_end && pl.n_end <= n_max, "{pl:?}");
        if let Some(next) = p.get(i + 1) {
            assert!(pl.n_end < next.n_start, "overlap {pl:?} {next:?}");
            let s = r.surges[i];
            assert!(pl.n_end <= s && s <= next.n_start, "surge {s} outside gap");
        }
    }
}

#[test]
fn layout_and_last_plateau_consistency() {
    for height in [5e3, 1e4, 2e4] {
        let r = report_at(height);
        check_layout(&r, height.ceil() as usize);
        assert!(r.n_count >= 2, "{height}: {:?}", r.plateaus);
        let dev = r.last_plateau_deviation().unwrap();
        assert!(dev <= 3.0, "{height}: deviation {dev}");
    }
}

#[test]
fn reports_are_deterministic() {
    let a = report_at(8e3).to_json().unwrap();
    let b = report_at(8e3).to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_round_trips_through_json() {
    let r = report_at(3e3);
    let back: SpectrumReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

// Measured with the default detector at x = 0.5(1 − e⁻²): three plateaus at
// 1e4, four at 2e4, three at 4e4. The 4e4 signal has two nearby levels that
// sit inside one ±15 % band and merge.
#[test]
#[ignore = "plateau count drops from 4 to 3 between Im z = 2e4 and 4e4"]
fn plateau_count_does_not_fall_with_height() {
    let counts: Vec<usize> = [1e4, 2e4, 4e4].iter().map(|&h| report_at(h).n_count).collect();
    assert!(counts.windows(2).all(|w| w[1] >= w[0]), "{counts:?}");
}

fn synthetic(levels: &[f64], lens: &[usize], amps: &[f64], phase: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for ((&lv, &len), &amp) in levels.iter().zip(lens).zip(amps) {
        for _ in 0..len {
            let i = out.len() as f64;
            let sign = if out.len() % 2 == 0 { 1.0 } else { -1.0 };
            out.push(lv + amp * (sign * 0.7 + 0.3 * (0.37 * i + phase).sin()));
        }
    }
    out
}

fn cases() -> impl Strategy<Value = (Vec<f64>, Vec<usize>, Vec<f64>, f64)> {
    (2usize..=5)
        .prop_flat_map(|k| {
            (
                0.2f64..5.0,
                prop::collection::vec((1.5f64..3.0, any::<bool>()), k - 1),
                prop::collection::vec(200usize..800, k),
                prop::collection::vec(0.0f64..=1.0, k),
                0.0f64..6.28,
            )
        })
        .prop_map(|(first, steps, lens, amp_fracs, phase)| {
            let mut levels = vec![first];
            for (ratio, up) in steps {
                let last = *levels.last().unwrap();
                levels.push(if up { last * ratio } else { last / ratio });
            }
            let amps = levels
                .iter()
                .enumerate()
                .zip(&amp_fracs)
                .map(|((i, &lv), &f)| {
                    let gap = |j: usize| (levels[j] - lv).abs();
                    let mut g = f64::INFINITY;
                    if i > 0 {
                        g = g.min(gap(i - 1));
                    }
                    if i + 1 < levels.len() {
                        g = g.min(gap(i + 1));
                    }
                    f * (g / 4.0).min(0.08 * lv)
                })
                .collect();
            (levels, lens, amps, phase)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn synthetic_levels_are_recovered((levels, lens, amps, phase) in cases()) {
        let sig = synthetic(&levels, &lens, &amps, phase);
        let found = detect_plateaus(&sig, 21, &DetectorParams::default());
        prop_assert_eq!(found.len(), levels.len(), "{:?}", found);
        for (p, lv) in found.iter().zip(&levels) {
            prop_assert!((p.value - lv).abs() <= 0.1 * lv);
        }
    }
}
