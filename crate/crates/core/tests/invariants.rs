//! Randomized invariants across the library.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ghat::action::DualAction;
use ghat::cocycle::{check_cocycle1, coboundary, cocycle_from_perturbation, coboundary_residual, trivialize_1cocycle};
use ghat::group::Group;
use ghat::instances::{inner_action_m2, model_action};
use ghat::linalg::*;
use ghat::numerics::{nearest_projection, nearest_unitary, sample_near_projection, sample_near_unitary};
use ghat::rep::{Dual, Family};

const GROUPS: [&str; 6] = ["Z2", "Z3", "Z4", "S3", "D4", "Q8"];

fn duals() -> &'static Vec<Arc<Dual>> {
    static CACHE: OnceLock<Vec<Arc<Dual>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        GROUPS
            .iter()
            .map(|n| Arc::new(Dual::compute(&Group::builtin(n, 64).unwrap(), 0, 1e-9).unwrap()))
            .collect()
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_product_matches_nalgebra(seed in any::<u64>(), r in 1usize..40, k in 1usize..40, c in 1usize..40) {
        let mut g = rng(seed);
        let a = random_matrix(&mut g, r, k);
        let b = random_matrix(&mut g, k, c);
        prop_assert!(dist_frob(&mm(&a, &b), &(&a * &b)) < 1e-10 * (1.0 + frob(&a) * frob(&b)));
    }

    #[test]
    fn lift_helpers_match_dense(seed in any::<u64>(), n in 1usize..5, d in 1usize..5) {
        let mut g = rng(seed);
        let t = random_matrix(&mut g, d, d);
        let x = random_matrix(&mut g, n * d, n * d);
        let l = lift(n, &t);
        prop_assert!(dist_frob(&mul_lift(&x, &t), &(&x * &l)) < 1e-10);
        prop_assert!(dist_frob(&lift_mul(&t, &x), &(&l * &x)) < 1e-10);
        prop_assert!(dist_frob(&lift_sandwich(&t, &x), &(&l * &x * l.adjoint())) < 1e-10);
    }

    #[test]
    fn permute_legs_inverts(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4) {
        let mut g = rng(seed);
        let n = a * b * c;
        let x = random_matrix(&mut g, n, n);
        let y = permute_legs(&x, &[a, b, c], &[2, 0, 1]);
        let back = permute_legs(&y, &[c, a, b], &[1, 2, 0]);
        prop_assert!(dist_frob(&back, &x) == 0.0);
        let (p, q) = (random_matrix(&mut g, a, a), random_matrix(&mut g, b, b));
        let swapped = permute_legs(&kron(&p, &q), &[a, b], &[1, 0]);
        prop_assert!(dist_frob(&swapped, &kron(&q, &p)) < 1e-12);
    }

    #[test]
    fn polar_factor_is_unitary(seed in any::<u64>(), n in 1usize..8) {
        let a = random_matrix(&mut rng(seed), n, n);
        let u = polar_unitary(&a);
        prop_assert!(unitarity_residual(&u) < 1e-9);
        // a = u |a|
        prop_assert!(dist_frob(&(&u * sqrt_psd(&(a.adjoint() * &a))), &a) < 1e-8 * (1.0 + frob(&a)));
    }

    #[test]
    fn group_axioms(gi in 0usize..6, x in 0usize..64, y in 0usize..64, z in 0usize..64) {
        let g = &duals()[gi].group;
        let (x, y, z) = (x % g.order, y % g.order, z % g.order);
        prop_assert_eq!(g.mul(g.mul(x, y), z), g.mul(x, g.mul(y, z)));
        prop_assert_eq!(g.mul(x, g.inv(x)), g.identity);
        prop_assert_eq!(g.mul(g.identity, y), y);
    }

    #[test]
    fn irreps_for_any_seed(gi in 0usize..6, seed in any::<u64>()) {
        let g = &duals()[gi].group;
        let d = Dual::compute(g, seed, 1e-9).unwrap();
        prop_assert!(d.check_irreps().max_residual() < 1e-9);
        prop_assert_eq!(d.dims().iter().map(|x| x * x).sum::<usize>(), g.order);
    }

    #[test]
    fn conjugated_actions_stay_actions(gi in 0usize..6, seed in any::<u64>()) {
        let d = &duals()[gi];
        let alpha = model_action(d);
        let v = random_unitary(&mut rng(seed), alpha.n);
        prop_assert!(alpha.conjugate_by(&v).check().max_residual() < 1e-8);
    }

    #[test]
    fn coboundaries_are_cocycles_and_trivialize(gi in 0usize..6, seed in any::<u64>()) {
        let d = &duals()[gi];
        let alpha = model_action(d);
        let v = random_unitary(&mut rng(seed), alpha.n);
        let w = coboundary(&alpha, &v);
        prop_assert!(check_cocycle1(&alpha, &w).max_residual() < 1e-8);
        let found = trivialize_1cocycle(&alpha, &w, seed).unwrap();
        prop_assert!(coboundary_residual(&alpha, &w, &found) < 1e-8);
    }

    #[test]
    fn perturbations_give_twisted_actions(gi in 0usize..6, seed in any::<u64>()) {
        let d = &duals()[gi];
        let alpha = inner_action_m2(d, seed);
        let w = Family::random_unitary(d, 2, &mut rng(seed ^ 1));
        let ta = cocycle_from_perturbation(&alpha, &w).unwrap();
        prop_assert!(ta.check().max_residual() < 1e-8);
        // the same family written as a 1-cocycle is untwisted by its own boundary
        prop_assert!(ta.boundary_residual(&w.adjoint()) < 1e-8);
    }

    #[test]
    fn trivial_action_is_identity(gi in 0usize..6, n in 1usize..4, seed in any::<u64>()) {
        let d = &duals()[gi];
        let triv = DualAction::trivial(d.clone(), n);
        let x = random_matrix(&mut rng(seed), n, n);
        for pi in 0..d.num_classes() {
            prop_assert!(dist_frob(&triv.apply(pi, &x), &kron(&x, &eye(d.d(pi)))) == 0.0);
        }
    }

    #[test]
    fn nearest_projection_bound(seed in any::<u64>(), n in 2usize..9, eps in 1e-4f64..5e-2) {
        let (f, delta) = sample_near_projection(&mut rng(seed), n, eps);
        let p = nearest_projection(&f, delta).unwrap();
        prop_assert!(p.distance < p.bound);
        prop_assert!(dist_frob(&(&p.p * &p.p), &p.p) < 1e-9);
    }

    #[test]
    fn nearest_unitary_bound(seed in any::<u64>(), n in 1usize..9, eps in 1e-5f64..1e-2) {
        let (u, delta) = sample_near_unitary(&mut rng(seed), n, eps);
        let v = nearest_unitary(&u, delta).unwrap();
        prop_assert!(v.distance < v.bound);
        prop_assert!(unitarity_residual(&v.v) < 1e-9);
    }
}
