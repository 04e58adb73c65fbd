use cc_miso_core::channel::{received_signal, sample_channel};
use cc_miso_core::linalg::CMatrix;
use cc_miso_core::rates::{dof, mn_transmission_length, symrate_complex, symrate_finite, symrate_maxmin};
use cc_miso_core::{binomial, BeamSolver, ChannelMatrix, Complex64, Scheme, SignalBlock, SystemConfig};
use num_rational::Ratio;
use proptest::prelude::*;

fn configs() -> impl Strategy<Value = SystemConfig> {
    prop_oneof![
        Just((3, 2, 1)),
        Just((4, 2, 1)),
        Just((4, 2, 2)),
        Just((4, 3, 1)),
        Just((5, 2, 1)),
        Just((5, 3, 2)),
    ]
    .prop_map(|(k, l, t)| SystemConfig::with_integer_cache(k, l, k, t).unwrap())
}

fn rates(h: &ChannelMatrix, cfg: &SystemConfig) -> [f64; 3] {
    [
        symrate_maxmin(h, cfg, BeamSolver::default()).unwrap().symmetric_rate,
        symrate_complex(h, cfg).unwrap().symmetric_rate,
        symrate_finite(h, cfg).unwrap().symmetric_rate,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn received_signal_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let h = ChannelMatrix::rayleigh(3, 2, seed);
        let x1 = CMatrix::from_fn(2, 4, |i, j| Complex64::new((i + j) as f64, (seed % 7) as f64 - j as f64));
        let x2 = CMatrix::from_fn(2, 4, |i, j| Complex64::new(1.0 - (i * j) as f64, 0.5));
        let mix = CMatrix::from_fn(2, 4, |i, j| x1[(i, j)] * a + x2[(i, j)] * b);
        let z: Vec<Complex64> = (0..4).map(|j| Complex64::new(0.1 * j as f64, -0.2)).collect();
        for k in 0..3 {
            let y1 = received_signal(&h, &SignalBlock::from_matrix(x1.clone()), k, None).unwrap();
            let y2 = received_signal(&h, &SignalBlock::from_matrix(x2.clone()), k, None).unwrap();
            let y = received_signal(&h, &SignalBlock::from_matrix(mix.clone()), k, Some(&z)).unwrap();
            for j in 0..4 {
                prop_assert!((y[j] - (y1[j] * a + y2[j] * b + z[j])).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn rates_are_invariant_to_channel_scaling(cfg in configs(), seed in 0u64..1000, scale in 0.1f64..10.0, snr_db in 0.0f64..40.0) {
        let snr = 10f64.powf(snr_db / 10.0);
        let h = sample_channel(&cfg, seed);
        let base = rates(&h, &cfg.clone().with_snr(snr).unwrap());
        let scaled = rates(&h.scaled(scale), &cfg.with_snr(snr / (scale * scale)).unwrap());
        for (a, b) in base.iter().zip(&scaled) {
            prop_assert!((a - b).abs() < 1e-6 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn rates_grow_with_snr(cfg in configs(), seed in 0u64..1000) {
        let h = sample_channel(&cfg, seed);
        let mut previous = [0.0; 3];
        for db in [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
            let now = rates(&h, &cfg.clone().with_snr(10f64.powf(db / 10.0)).unwrap());
            for i in 0..3 {
                prop_assert!(now[i] >= previous[i] - 1e-12);
            }
            previous = now;
        }
    }

    #[test]
    fn reports_recompute_from_group_rates(cfg in configs(), seed in 0u64..1000) {
        let cfg = cfg.with_snr(200.0).unwrap();
        let h = sample_channel(&cfg, seed);
        for report in [
            symrate_maxmin(&h, &cfg, BeamSolver::default()).unwrap(),
            symrate_complex(&h, &cfg).unwrap(),
            symrate_finite(&h, &cfg).unwrap(),
        ] {
            prop_assert!((report.recompute(&cfg) - report.symmetric_rate).abs() < 1e-12);
            prop_assert!(report.group_rates.iter().all(|(_, r)| *r >= 0.0));
        }
    }
}

#[test]
fn degrees_of_freedom_examples() {
    let m1 = Ratio::from_integer(1);
    assert_eq!(dof(Scheme::MaxMinMulticast, 3, 2, 3, m1).unwrap(), Ratio::from_integer(1));
    assert_eq!(dof(Scheme::ZeroForcingComplex, 3, 2, 3, m1).unwrap(), Ratio::new(3, 2));
    assert_eq!(dof(Scheme::ZeroForcingFinite, 3, 2, 3, m1).unwrap(), Ratio::new(3, 2));
    assert_eq!(dof(Scheme::ZeroForcingComplex, 6, 1, 4, Ratio::new(3, 2)).unwrap(), dof(Scheme::MaxMinMulticast, 6, 1, 4, Ratio::new(3, 2)).unwrap());
    assert_eq!(dof(Scheme::MaxMinMulticast, 5, 1, 5, Ratio::from_integer(0)).unwrap(), Ratio::new(1, 5));
    assert!(dof(Scheme::MaxMinMulticast, 3, 2, 3, Ratio::from_integer(3)).is_err());
}

#[test]
fn shared_link_length() {
    assert_eq!(mn_transmission_length(3, 3, Ratio::from_integer(1)), Ratio::from_integer(1));
    assert_eq!(mn_transmission_length(4, 4, Ratio::from_integer(4)), Ratio::from_integer(0));
    for k in 2..=9u64 {
        for t in 0..k {
            // N = K so that M = t
            let expect = Ratio::new(binomial(k as usize, t as usize + 1), binomial(k as usize, t as usize));
            assert_eq!(mn_transmission_length(k, k, Ratio::from_integer(t)), expect);
        }
    }
}
