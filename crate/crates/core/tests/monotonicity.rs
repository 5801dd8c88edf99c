use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeta_lab::monotonicity::{
    eta, eta_tilde, eta_tilde_a, first_crossing_y, scan_monotonicity, theta, ScanGrid, DEFAULT_TOLERANCE,
};
use zeta_lab::zeta::EvalConfig;
use zeta_lab::Error;

fn cfg() -> EvalConfig {
    EvalConfig::default()
}

#[test]
fn eta_and_eta_tilde_agree_in_sign_and_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    for _ in 0..1000 {
        let y = rng.gen_range(6.3..5000.0);
        let t = rng.gen_range(0.0..12.0);
        let th = theta(y, &cfg()).unwrap();
        if th <= 1e-6 {
            continue;
        }
        let e = eta(y, t, &cfg()).unwrap();
        let et = eta_tilde(y, t, &cfg()).unwrap();
        assert_eq!(e.signum(), et.signum(), "y = {y}, t = {t}");
        assert!((e - et * th).abs() <= 1e-10 * e.abs(), "y = {y}, t = {t}");
        checked += 1;
    }
    assert!(checked > 990);
}

#[test]
fn empty_head_makes_eta_tilde_a_independent_of_a() {
    for &y in &[1.0, 2.5, 4.9] {
        let base = eta_tilde(y, 3.0, &cfg()).unwrap();
        for &a in &[0.0, 0.3, 1.0] {
            assert_eq!(eta_tilde_a(y, 3.0, a, &cfg()).unwrap(), base);
        }
    }
}

#[test]
fn scan_is_identical_across_worker_counts() {
    let grid = ScanGrid {
        y_min: 6.29,
        y_max: 400.0,
        y_step: 0.1,
        x_set: vec![0.0, 0.1, 0.25, 0.4, 0.5],
        tolerance: DEFAULT_TOLERANCE,
    };
    let one = scan_monotonicity(&grid, 1e8 as u64, Some(1), &cfg()).unwrap();
    assert!(one.violations.is_empty(), "{:?}", &one.violations[..1]);
    let one = one.to_json().unwrap();
    for w in [2, 3, 7] {
        let other = scan_monotonicity(&grid, 1e8 as u64, Some(w), &cfg()).unwrap();
        assert_eq!(other.to_json().unwrap(), one, "workers = {w}");
    }
}

#[test]
fn scan_refuses_grids_over_the_cap() {
    let grid = ScanGrid {
        y_min: 10.0,
        y_max: 1e4,
        y_step: 0.01,
        x_set: vec![0.1, 0.5],
        tolerance: DEFAULT_TOLERANCE,
    };
    assert!(matches!(
        scan_monotonicity(&grid, 1000, None, &cfg()),
        Err(Error::GridTooLarge { .. })
    ));
}

#[test]
fn summary_margin_matches_the_values() {
    let grid = ScanGrid {
        y_min: 20.0,
        y_max: 30.0,
        y_step: 0.5,
        x_set: vec![-0.5, 0.2, 0.5],
        tolerance: 0.0,
    };
    let r = scan_monotonicity(&grid, 1e8 as u64, None, &cfg()).unwrap();
    assert!(r.violations.is_empty());
    let mut worst = f64::INFINITY;
    for row in &r.values {
        for c in 0..2 {
            worst = worst.min(row[c] - row[c + 1]);
        }
    }
    assert!(worst > 0.0);
    assert!((r.summary.min_margin - worst).abs() <= 1e-12 * worst.max(1.0));
    assert_eq!(r.summary.evaluations, (r.ys.len() * 3) as u64);
}

#[test]
fn crossing_finds_a_level_that_is_reached() {
    // log|ζ(0.95+yi)| climbs above 1 near the first large peak.
    let r = first_crossing_y(1.0, 0.95, 1.0, 200.0, &cfg()).unwrap();
    let y = r.found().expect("level 1 is reached below 200");
    let v = zeta_lab::zeta::zeta(zeta_lab::special::ComplexPoint::new(0.95, y).unwrap(), &cfg()).unwrap();
    assert!((v.norm().ln() - 1.0).abs() < 1e-4, "y = {y}");
    let again = first_crossing_y(1.0, 0.95, 1.0, 200.0, &cfg()).unwrap();
    assert_eq!(again, r);
}

#[test]
fn crossing_rejects_bad_ranges() {
    assert!(first_crossing_y(1.0, 0.4, 1.0, 10.0, &cfg()).is_err());
    assert!(first_crossing_y(1.0, 0.95, 10.0, 1.0, &cfg()).is_err());
    assert!(first_crossing_y(f64::NAN, 0.95, 1.0, 10.0, &cfg()).is_err());
}
