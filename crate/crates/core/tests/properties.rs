mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use vibronic::fock::{fock_amplitudes, Lattice};
use vibronic::gauss::{bogoliubov_from_duschinsky, compose_chain, doktorov_factorize, BlochMessiahForm};
use vibronic::linalg::{c, CMat, CVec, RMat};

fn uniforms(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..=1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn duschinsky_transforms_round_trip(m in 1usize..=6, vals in uniforms(128)) {
        let mut d = Draw::new(vals);
        let (j, delta) = random_duschinsky(&mut d, m);
        let t = bogoliubov_from_duschinsky(&j, &delta).unwrap();
        let (res, round) = bloch_messiah_check(&t).unwrap();
        prop_assert!(res <= 1e-10, "residual {res:e}");
        prop_assert!(round <= 1e-10, "round trip {round:e}");
        let dok = doktorov_factorize(&j, &delta).unwrap();
        prop_assert!((dok.duschinsky() - &j).norm() <= 1e-10);
        prop_assert!(transform_distance(&dok.transform(), &t) <= 1e-10);
    }

    #[test]
    fn complex_transforms_round_trip(m in 1usize..=6, vals in uniforms(128)) {
        let mut d = Draw::new(vals);
        let t = random_complex_transform(&mut d, m);
        let (res, round) = bloch_messiah_check(&t).unwrap();
        prop_assert!(res <= 1e-10, "residual {res:e}");
        prop_assert!(round <= 1e-10, "round trip {round:e}");
    }

    #[test]
    fn degenerate_transforms_round_trip(m in 2usize..=6, vals in uniforms(128)) {
        let mut d = Draw::new(vals);
        let t = degenerate_transform(&mut d, m);
        let (res, round) = bloch_messiah_check(&t).unwrap();
        prop_assert!(res <= 1e-10, "residual {res:e}");
        prop_assert!(round <= 1e-10, "round trip {round:e}");
    }

    #[test]
    fn chain_without_ht_is_doktorov(m in 1usize..=5, vals in uniforms(64)) {
        let mut d = Draw::new(vals);
        let (j, delta) = random_duschinsky(&mut d, m);
        let dok = doktorov_factorize(&j, &delta).unwrap();
        let chain = compose_chain(&dok, &RMat::identity(m, m), &vec![c(0.0); m], &vec![c(0.0); m]).unwrap();
        prop_assert_eq!(chain, dok.transform());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_mode_factors_match_oracle(
        rho in 0.0f64..0.6,
        phase in -std::f64::consts::PI..std::f64::consts::PI,
        b in -1.5f64..1.5,
        dd in -0.6f64..0.6,
    ) {
        let kappa = Complex64::from_polar(rho, phase);
        prop_assume!((kappa * dd).norm() <= 0.3);
        let err = single_mode_discrepancy(kappa, b, dd).unwrap();
        prop_assert!(err <= 1e-9, "discrepancy {err:e}");
    }

    #[test]
    fn normalization_matches_oracle(m in 1usize..=4, vals in uniforms(40)) {
        let mut d = Draw::new(vals);
        let tdm = random_tdm(&mut d, m);
        prop_assert!(normalization_discrepancy(&tdm).unwrap() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn evaluators_agree(m in 1usize..=3, vals in uniforms(64)) {
        let mut d = Draw::new(vals);
        let form = random_form(&mut d, m);
        let err = dual_evaluator_discrepancy(&form, 6).unwrap();
        prop_assert!(err <= 1e-8, "discrepancy {err:e}");
    }

    #[test]
    fn mass_is_bounded_and_grows_with_cutoff(m in 1usize..=3, vals in uniforms(64)) {
        let mut d = Draw::new(vals);
        let form = random_form(&mut d, m);
        let mut last = 0.0;
        for cutoff in [2usize, 4, 8] {
            let lattice = Lattice::per_mode(m, cutoff).unwrap();
            let mass: f64 = fock_amplitudes(&form, &lattice).iter().map(|a| a.norm_sqr()).sum();
            prop_assert!(mass <= 1.0 + 1e-9);
            prop_assert!(mass >= last - 1e-15);
            last = mass;
        }
    }

    #[test]
    fn squeezed_vacuum_parity(m in 1usize..=3, vals in uniforms(16)) {
        let mut d = Draw::new(vals);
        let phases: Vec<Complex64> = (0..m).map(|_| Complex64::from_polar(1.0, 3.0 * d.unit())).collect();
        let v = CMat::from_diagonal(&CVec::from_vec(phases));
        let form = BlochMessiahForm {
            v: v.clone(),
            sigma: (0..m).map(|_| d.range(0.0, 1.0)).collect(),
            w: v,
            gamma: CVec::zeros(m),
        };
        let lattice = Lattice::per_mode(m, 5).unwrap();
        let amps = fock_amplitudes(&form, &lattice);
        for (pos, a) in amps.iter().enumerate() {
            if lattice.total_photons(pos) % 2 == 1 {
                prop_assert_eq!(*a, c(0.0));
            }
        }
    }
}
