//! Algebraic properties of the quantum and classical backends.

use optcausal_core::classical::{
    self, c_coarse_grain, c_compose_par, c_compose_seq, embed_matrix, embed_state, CState,
};
use optcausal_core::linalg::{self, CMatrix};
use optcausal_core::quantum::library::{random_channel, random_state, random_test};
use optcausal_core::quantum::{apply, coarse_grain, compose_par, compose_seq, probability, KrausMap, QEffect, QState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: &QState, b: &QState, tol: f64) -> bool {
    linalg::max_abs_diff(a.matrix(), b.matrix()) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sequential_composition_is_associative(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_channel(d, d + 1, 2, &mut rng);
        let g = random_channel(d + 1, d, 1, &mut rng);
        let h = random_channel(d, 2, 2, &mut rng);
        let rho = random_state(d, &mut rng);
        let left = compose_seq(&compose_seq(&f, &g).unwrap(), &h).unwrap();
        let right = compose_seq(&f, &compose_seq(&g, &h).unwrap()).unwrap();
        prop_assert!(close(&apply(&left, &rho).unwrap(), &apply(&right, &rho).unwrap(), 1e-12));
    }

    #[test]
    fn parallel_composition_acts_on_product_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_channel(2, 3, 2, &mut rng);
        let g = random_channel(3, 2, 2, &mut rng);
        let (r1, r2) = (random_state(2, &mut rng), random_state(3, &mut rng));
        let joint = apply(&compose_par(&f, &g), &r1.tensor(&r2)).unwrap();
        let separate = apply(&f, &r1).unwrap().tensor(&apply(&g, &r2).unwrap());
        prop_assert!(close(&joint, &separate, 1e-12));
    }

    #[test]
    fn random_tests_are_complete_and_cp(seed in any::<u64>(), d_in in 1usize..4, d_out in 1usize..4, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let test = random_test(d_in, d_out, k, &mut rng);
        prop_assert_eq!(test.len(), k);
        prop_assert!(coarse_grain(&test).unwrap().is_deterministic_within(1e-10));
        for e in &test {
            prop_assert!(e.is_completely_positive());
            let rebuilt = KrausMap::from_choi(&e.choi(), d_in, d_out).unwrap();
            prop_assert!(linalg::max_abs_diff(&rebuilt.choi(), &e.choi()) <= 1e-10);
        }
    }

    #[test]
    fn probabilities_lie_in_the_unit_interval(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(d, &mut rng);
        let e = random_test(d, 1, 2, &mut rng);
        let effects: Vec<QEffect> = e.iter().map(|k| QEffect::new(k.gram()).unwrap()).collect();
        let ps: Vec<f64> = effects.iter().map(|e| probability(e, &rho).unwrap()).collect();
        prop_assert!(ps.iter().all(|p| (0.0..=1.0).contains(p)));
        prop_assert!((ps.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn classical_embedding_commutes_with_composition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = classical::random_test(2, 3, 2, &mut rng).remove(0);
        let g = classical::random_test(3, 2, 2, &mut rng).remove(1);
        let h = classical::random_stochastic(2, 2, &mut rng);
        let p = CState::new(vec![0.3, 0.7]).unwrap();
        let seq = embed_matrix(&c_compose_seq(&f, &g).unwrap());
        let par = embed_matrix(&c_compose_par(&f, &h));
        let rho = embed_state(&p);
        let q_seq = apply(&compose_seq(&embed_matrix(&f), &embed_matrix(&g)).unwrap(), &rho).unwrap();
        prop_assert!(close(&apply(&seq, &rho).unwrap(), &q_seq, 1e-12));
        let rho2 = embed_state(&CState::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap());
        let q_par = apply(&compose_par(&embed_matrix(&f), &embed_matrix(&h)), &rho2).unwrap();
        prop_assert!(close(&apply(&par, &rho2).unwrap(), &q_par, 1e-12));
    }

    #[test]
    fn classical_coarse_graining_of_complete_tests_is_stochastic(seed in any::<u64>(), n in 1usize..5, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let test = classical::random_test(n, n + 1, k, &mut rng);
        prop_assert!(c_coarse_grain(&test).unwrap().is_deterministic_within(1e-12));
    }
}

#[test]
fn choi_of_identity_is_the_unnormalized_bell_projector() {
    let choi = KrausMap::identity(2).choi();
    let mut bell = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        bell[(i, j)] = linalg::ONE;
    }
    assert!(linalg::max_abs_diff(&choi, &bell) < 1e-15);
}
