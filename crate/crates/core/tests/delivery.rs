//! End-to-end delivery runs over a grid of system sizes.

use cc_miso_core::channel::{block_power, sample_channel};
use cc_miso_core::delivery::{
    assign_sigmas, build_unitary, run_delivery_complex, run_delivery_finite, verify_delivery, DeliveryOutcome,
    DemandVector, Library,
};
use cc_miso_core::linalg::CMatrix;
use cc_miso_core::{binomial, enumerate_subsets, ChannelMatrix, Error, SystemConfig};

fn grid() -> Vec<SystemConfig> {
    let mut out = Vec::new();
    for k in 3..=5usize {
        for l in 2..=3usize {
            for t in 1..=2usize {
                if t + l <= k {
                    out.push(SystemConfig::with_integer_cache(k, l, k, t as u64).unwrap());
                }
            }
        }
    }
    out
}

fn check(cfg: &SystemConfig, lib: &Library, out: &DeliveryOutcome) {
    let report = verify_delivery(cfg, lib, &out.transcript, &out.decoded).unwrap_or_else(|v| panic!("{v}"));
    for (k, file) in out.files.iter().enumerate() {
        assert_eq!(file.as_deref(), Some(lib.file(out.transcript.demand.file(k))));
    }
    assert!(report.max_block_power <= cfg.snr() * (1.0 + 1e-9));
    let groups = binomial(cfg.users(), cfg.group_size()) as usize;
    assert_eq!(out.transcript.groups.len(), groups);
    assert!(out.transcript.counters.iter().all(|(_, _, n)| n == cfg.minis_per_subfile() + 1));
}

#[test]
fn both_algorithms_deliver_on_the_grid() {
    for cfg in grid() {
        let cfg = cfg.with_snr(1e3).unwrap();
        for seed in 0..20u64 {
            let h = sample_channel(&cfg, seed);
            let d = DemandVector::random(cfg.users(), cfg.files(), seed);
            let lib = Library::synthetic(&cfg, seed).unwrap();
            let complex = run_delivery_complex(&cfg, &h, &d, &lib).unwrap();
            check(&cfg, &lib, &complex);
            assert_eq!(complex.transcript.block_count(), complex.transcript.groups.len() * cfg.targets_per_user() as usize);
            let finite = run_delivery_finite(&cfg, &h, &d, &lib).unwrap();
            check(&cfg, &lib, &finite);
            assert_eq!(finite.transcript.block_count(), finite.transcript.groups.len());
            assert_eq!(finite.transcript.chunk_count(), finite.transcript.groups.len() * cfg.targets_per_group() as usize);
        }
    }
}

#[test]
fn decomposition_holds_on_the_grid() {
    for cfg in grid() {
        let v = cfg.targets_per_user() as usize;
        let u = build_unitary(v);
        assert!(u.adjoint().mul(&u).max_abs_diff(&CMatrix::identity(v)) < 1e-12);
        for seed in 0..20u64 {
            let h = sample_channel(&cfg, seed);
            for group in enumerate_subsets(cfg.users(), cfg.group_size()) {
                let sig = assign_sigmas(&group, &cfg).unwrap();
                assert_eq!(sig.sigma_modulus_sqr(), sig.power_bound());
                let gains = cc_miso_core::rates::GroupGains::compute(&h, &cfg, &group).unwrap();
                for (r, g) in &gains.user_gains {
                    assert!(sig.decomposition_residual(*r, g).unwrap() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn identical_demands_are_served() {
    let cfg = SystemConfig::with_integer_cache(4, 2, 4, 1).unwrap();
    let h = sample_channel(&cfg, 5);
    let lib = Library::synthetic(&cfg, 5).unwrap();
    let d = DemandVector::new(vec![2; 4], 4).unwrap();
    check(&cfg, &lib, &run_delivery_complex(&cfg, &h, &d, &lib).unwrap());
    check(&cfg, &lib, &run_delivery_finite(&cfg, &h, &d, &lib).unwrap());
}

#[test]
fn every_version_is_read_once() {
    let cfg = SystemConfig::with_integer_cache(5, 2, 5, 1).unwrap();
    let h = sample_channel(&cfg, 17);
    let lib = Library::synthetic(&cfg, 1).unwrap();
    let d = DemandVector::random(5, 5, 2);
    let out = run_delivery_finite(&cfg, &h, &d, &lib).unwrap();
    let mut reads = std::collections::BTreeMap::new();
    for tx in &out.transcript.groups {
        for (r, tau, n) in &tx.versions {
            assert!(reads.insert((*r, tau.clone(), *n), tx.group.clone()).is_none());
        }
    }
    // each (r, tau) is read for versions 1..=C(K-t-1, L-1)
    assert_eq!(reads.len(), out.transcript.counters.len() * cfg.minis_per_subfile() as usize);
}

#[test]
fn power_is_split_evenly_across_antennas() {
    let cfg = SystemConfig::with_integer_cache(5, 3, 5, 2).unwrap().with_snr(40.0).unwrap();
    let h = sample_channel(&cfg, 2);
    let lib = Library::synthetic(&cfg, 2).unwrap();
    let d = DemandVector::random(5, 5, 2);
    for out in [run_delivery_complex(&cfg, &h, &d, &lib).unwrap(), run_delivery_finite(&cfg, &h, &d, &lib).unwrap()] {
        for tx in &out.transcript.groups {
            for block in &tx.blocks {
                // orthogonal codes make the empirical power equal its expectation snr / L
                assert!((block_power(block) - 40.0 / 3.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn collinear_users_abort_the_run() {
    let cfg = SystemConfig::with_integer_cache(3, 2, 3, 1).unwrap();
    let row = vec![cc_miso_core::Complex64::new(1.0, 0.5), cc_miso_core::Complex64::new(-0.3, 0.2)];
    let h = ChannelMatrix::from_rows(vec![row.clone(), row.iter().map(|z| z * 2.0).collect(), vec![
        cc_miso_core::Complex64::new(0.1, 0.0),
        cc_miso_core::Complex64::new(1.0, 0.0),
    ]])
    .unwrap();
    let lib = Library::synthetic(&cfg, 0).unwrap();
    let d = DemandVector::random(3, 3, 0);
    // users 1 and 2 share a direction, so the beam nulling user 2 also nulls user 1
    match run_delivery_complex(&cfg, &h, &d, &lib) {
        Err(Error::SingularGain { user, .. }) => assert!(user == 0 || user == 1),
        other => panic!("expected a singular gain, got {other:?}"),
    }
    assert!(matches!(run_delivery_finite(&cfg, &h, &d, &lib), Err(Error::SingularGain { .. })));
}
