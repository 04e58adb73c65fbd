//! Sweep plumbing checked against direct library calls.

use cc_miso::harness::{run_sweep, trial_seed, SweepSpec};
use cc_miso::table::{emit_csv, parse_csv};
use cc_miso::db_to_linear;
use cc_miso_core::channel::sample_channel;
use cc_miso_core::rates::{symrate_complex, symrate_finite, symrate_maxmin};
use cc_miso_core::{BeamSolver, Scheme, SystemConfig};

fn example() -> SystemConfig {
    SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap()
}

#[test]
fn single_trial_equals_direct_calls() {
    let cfg = example();
    let spec = SweepSpec::new(cfg.clone(), vec![0.0, 10.0, 25.0], 1, 99);
    let result = run_sweep(&spec).unwrap();
    let h = sample_channel(&cfg, trial_seed(99, 0, 0));
    for &db in &[0.0, 10.0, 25.0] {
        let c = cfg.clone().with_snr(db_to_linear(db)).unwrap();
        let direct = [
            (Scheme::MaxMinMulticast, symrate_maxmin(&h, &c, BeamSolver::default()).unwrap().symmetric_rate),
            (Scheme::ZeroForcingComplex, symrate_complex(&h, &c).unwrap().symmetric_rate),
            (Scheme::ZeroForcingFinite, symrate_finite(&h, &c).unwrap().symmetric_rate),
        ];
        for (scheme, rate) in direct {
            let row = result.row(db, scheme).unwrap();
            assert!((row.mean - rate).abs() < 1e-12, "{scheme:?} at {db} dB");
            assert_eq!(row.trials, 1);
            assert_eq!(row.stderr, 0.0);
        }
    }
}

#[test]
fn sweeps_are_reproducible() {
    let spec = SweepSpec::new(example(), vec![5.0, 20.0], 40, 7);
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    assert_eq!(a.rows, b.rows);
    let other = run_sweep(&SweepSpec::new(example(), vec![5.0, 20.0], 40, 8)).unwrap();
    assert_ne!(a.rows, other.rows);
}

#[test]
fn mean_matches_per_trial_average() {
    let cfg = example();
    let trials = 25;
    let spec = SweepSpec { schemes: vec![Scheme::ZeroForcingComplex], ..SweepSpec::new(cfg.clone(), vec![15.0], trials, 3) };
    let result = run_sweep(&spec).unwrap();
    let c = cfg.with_snr(db_to_linear(15.0)).unwrap();
    let rates: Vec<f64> = (0..trials)
        .map(|i| symrate_complex(&sample_channel(&c, trial_seed(3, i, 0)), &c).unwrap().symmetric_rate)
        .collect();
    let mean = rates.iter().sum::<f64>() / trials as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
    let row = &result.rows[0];
    assert!((row.mean - mean).abs() < 1e-12);
    assert!((row.stderr - (var / trials as f64).sqrt()).abs() < 1e-12);
}

#[test]
fn csv_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let result = run_sweep(&SweepSpec::new(example(), vec![0.0, 12.5], 10, 1)).unwrap();
    emit_csv(&result, &path).unwrap();
    let back = parse_csv(&path).unwrap();
    assert_eq!(back.rows.len(), result.rows.len());
    for (a, b) in back.rows.iter().zip(&result.rows) {
        assert_eq!((a.snr_db, a.scheme, a.trials), (b.snr_db, b.scheme, b.trials));
        assert!((a.mean - b.mean).abs() <= 1e-12 * b.mean.abs().max(1.0));
    }
    assert_eq!(back.base_seed, 1);
    assert_eq!(back.cfg, result.cfg);
}
