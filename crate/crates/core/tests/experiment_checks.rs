// SPDX-License-Identifier: Apache-2.0

use planted::detect::TestKind;
use planted::experiments::{
    emit_csv, emit_svg_heatmap, format_csv, run_trials, run_trials_with, sweep, sweep_with, Detector, PlantFamily,
    Reconstructor, SweepBase, TrialConfig,
};
use planted::par::Exec;
use planted::PlantSpec;

fn base() -> SweepBase {
    SweepBase {
        n: 2000,
        family: PlantFamily::Line,
        test: TestKind::KPath,
        reconstructor: Some(Reconstructor::Line),
        master_seed: 99,
        trials: 12,
    }
}

#[test]
fn sweep_is_schedule_independent() {
    let a = sweep(&[0.3, 0.7], &[5, 12], &base()).unwrap();
    let b = sweep_with(&[0.3, 0.7], &[5, 12], &base(), Exec::Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(format_csv(&a), format_csv(&b));
    for c in &a.cells {
        assert!(c.false_positives <= c.trials);
        assert!((0.0..=1.0).contains(&c.fpr));
        assert_eq!(c.fnr, Some(0.0));
        let m = c.mean_overlap_fraction.unwrap();
        assert!((0.0..=1.0).contains(&m));
    }
}

#[test]
fn distinct_cells_get_distinct_streams() {
    let t = sweep(&[0.9], &[6, 6], &base()).unwrap();
    assert_ne!(t.cells[0].overlaps, t.cells[1].overlaps);
}

#[test]
fn files_are_written() {
    let t = sweep(&[0.5], &[4, 8], &base()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    emit_csv(&t, &csv).unwrap();
    emit_svg_heatmap(&t, "fpr", &svg).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(std::fs::read_to_string(&svg).unwrap().matches("<rect").count() == 2);
    assert!(emit_csv(&t, dir.path().join("missing/t.csv")).is_err());
}

#[test]
fn star_cells() {
    let cfg = TrialConfig {
        n: 3000,
        lambda: 1.0,
        spec: Some(PlantSpec::Star { k: 12 }),
        detector: Detector::Star { k: 12 },
        reconstructor: Some(Reconstructor::Star),
        master_seed: 5,
        trials: 20,
        cell_id: 0,
    };
    let s = run_trials(&cfg).unwrap();
    assert_eq!(s.fnr, Some(0.0));
    assert_eq!(s, run_trials_with(&cfg, Exec::Sequential).unwrap());
}

#[test]
fn null_only_config() {
    let cfg = TrialConfig {
        n: 500,
        lambda: 0.5,
        spec: None,
        detector: Detector::Components { k: 10 },
        reconstructor: None,
        master_seed: 1,
        trials: 5,
        cell_id: 0,
    };
    let s = run_trials(&cfg).unwrap();
    assert_eq!(s.fnr, None);
    assert_eq!(s.size, 10);
    assert!(run_trials(&TrialConfig { trials: 0, ..cfg }).is_err());
}
