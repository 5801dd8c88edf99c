use std::collections::BTreeMap;
use std::fs;
use std::io::Read;

use zeta_lab::experiment::{defaults, run_experiment, ExperimentSpec, Kind, Params, FIRST_ZERO};

/// Small ranges that still exercise every code path of a kind.
fn small(kind: Kind) -> Params {
    let r = |y_min: f64, y_max: f64, y_step: f64| Params {
        y_min: Some(y_min),
        y_max: Some(y_max),
        y_step: Some(y_step),
        ..Params::default()
    };
    match kind {
        Kind::Fig1 => r(0.0, 20.0, 0.5),
        Kind::Fig2 | Kind::Scan => r(6.29, 30.0, 0.5),
        Kind::Fig3 => r(0.01, 5.0, 0.1),
        Kind::Fig4 | Kind::Fig5 => r(0.1, 30.0, 0.5),
        Kind::Fig6 | Kind::Fig7 | Kind::Spectrum => Params {
            height: Some(3000.0),
            ..Params::default()
        },
        Kind::Fig8 | Kind::Fig9 => r(0.0, 200.0, 1.0),
        Kind::Fig10 => r(15.0, 20.0, 0.5),
        Kind::Fig11 => Params::default(),
        Kind::Fig12 => Params {
            y_step: Some(1e-2),
            height_cap: Some(5f64.exp()),
            ..Params::default()
        },
        Kind::Crossing => Params {
            height_cap: Some(200.0),
            ..Params::default()
        },
    }
}

fn run(kind: Kind, workers: usize, gzip: bool) -> (tempfile::TempDir, zeta_lab::experiment::RunManifest) {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(kind, dir.path());
    spec.params = small(kind);
    spec.workers = Some(workers);
    spec.gzip = gzip;
    let m = run_experiment(&spec).unwrap();
    (dir, m)
}

fn files(dir: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
        .collect()
}

#[test]
fn every_kind_is_byte_identical_across_worker_counts() {
    for kind in Kind::ALL {
        let (da, a) = run(kind, 1, false);
        let (db, b) = run(kind, 3, false);
        assert_eq!(a.outputs, b.outputs, "{kind}");
        let (fa, fb) = (files(da.path()), files(db.path()));
        assert!(!fa.is_empty(), "{kind}");
        assert_eq!(fa, fb, "{kind}");
    }
}

#[test]
fn manifest_counts_match_the_files() {
    for kind in Kind::ALL {
        let (dir, m) = run(kind, 2, false);
        let on_disk: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(on_disk["evaluations"], m.evaluations, "{kind}");
        assert_eq!(m.evaluations, m.outputs.iter().map(|o| o.evaluations).sum::<u64>());
        for o in &m.outputs {
            let text = fs::read_to_string(dir.path().join(&o.file)).unwrap();
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap().split(',').collect();
            assert_eq!(header, o.columns, "{}", o.file);
            assert_eq!(lines.count() as u64, o.rows, "{}", o.file);
            // one curve per file; the violations list costs nothing extra and
            // each crossing row is a whole march
            match o.file.as_str() {
                "scan_violations.csv" => assert_eq!(o.evaluations, 0),
                "crossing_first_y.csv" => assert!(o.evaluations > 2 * o.rows),
                _ => assert_eq!(o.evaluations, o.rows, "{}", o.file),
            }
        }
        assert!(!m.truncated, "{kind}");
    }
}

#[test]
fn gzip_outputs_decompress_to_the_plain_csv() {
    let (plain_dir, plain) = run(Kind::Fig2, 1, false);
    let (gz_dir, gz) = run(Kind::Fig2, 1, true);
    for (p, g) in plain.outputs.iter().zip(&gz.outputs) {
        assert_eq!(format!("{}.gz", p.file), g.file);
        let mut out = Vec::new();
        flate2::read::GzDecoder::new(fs::File::open(gz_dir.path().join(&g.file)).unwrap())
            .read_to_end(&mut out)
            .unwrap();
        assert_eq!(out, fs::read(plain_dir.path().join(&p.file)).unwrap());
    }
}

struct Caption {
    kind: Kind,
    y: Option<(f64, f64)>,
    t: Option<Vec<f64>>,
}

#[test]
fn defaults_follow_the_figure_captions() {
    let t = |v: &[f64]| Some(v.to_vec());
    let table = [
        Caption { kind: Kind::Fig1, y: Some((0.0, 1e4)), t: None },
        Caption { kind: Kind::Fig2, y: Some((6.29, 2e3)), t: t(&[0.0, 10.0]) },
        Caption { kind: Kind::Fig3, y: Some((0.0, 50.0)), t: t(&[10.0]) },
        Caption { kind: Kind::Fig4, y: Some((0.0, 1e4)), t: t(&[0.0, 1.0, 2.0, 3.0]) },
        Caption { kind: Kind::Fig5, y: Some((0.0, 1e4)), t: t(&[10.0]) },
        Caption { kind: Kind::Fig6, y: None, t: t(&[2.0]) },
        Caption { kind: Kind::Fig7, y: None, t: t(&[2.0]) },
        Caption { kind: Kind::Fig8, y: Some((0.0, 2e4)), t: None },
        Caption { kind: Kind::Fig9, y: Some((0.0, 2e4)), t: None },
        Caption { kind: Kind::Fig10, y: Some((15.0, 60.0)), t: t(&[5.0]) },
        Caption {
            kind: Kind::Fig11,
            y: Some((FIRST_ZERO - 1e-4, FIRST_ZERO + 1e-4)),
            t: t(&[0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0]),
        },
        Caption { kind: Kind::Fig12, y: Some((1.0, 25f64.exp())), t: None },
    ];
    for row in &table {
        let d = defaults(row.kind);
        if let Some((lo, hi)) = row.y {
            let (y_min, step) = (d.y_min.unwrap(), d.y_step.unwrap());
            // η-type grids start one step above a caption bound of 0
            assert!(y_min == lo || (lo == 0.0 && y_min == step && row.t.is_some()), "{}", row.kind);
            assert_eq!(d.y_max.unwrap(), hi, "{}", row.kind);
        }
        assert_eq!(d.t, row.t, "{}", row.kind);
    }
    assert_eq!(defaults(Kind::Fig1).x_set, Some(vec![0.05, 0.5]));
    assert_eq!(defaults(Kind::Fig6).height, Some(2e4));
    assert_eq!(defaults(Kind::Fig7).height, Some(2e4));
    assert_eq!(defaults(Kind::Fig12).x, Some(0.95));
    assert_eq!(defaults(Kind::Fig12).y_step, Some(1e-4));
    let a = defaults(Kind::Fig10).a.unwrap();
    assert_eq!(a.len(), 11);
    for (k, v) in a.iter().enumerate() {
        assert!((v - k as f64 / 10.0).abs() < 1e-15);
    }
}

#[test]
fn desk_scale_substitution_is_recorded() {
    let (_d, m) = run(Kind::Fig12, 1, false);
    assert!(m.desk_scale.is_some());
    let (_d, m) = run(Kind::Fig1, 1, false);
    assert!(m.desk_scale.is_none());
}

#[test]
fn eval_cap_truncates_and_says_so() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new(Kind::Fig1, dir.path());
    spec.params = small(Kind::Fig1);
    spec.params.eval_cap = Some(50);
    let m = run_experiment(&spec).unwrap();
    assert!(m.truncated);
    assert!(m.evaluations <= 50);
}
