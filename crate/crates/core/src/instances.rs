//! Seeded example objects shared by the verification suite, the CLI and the tests.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::DualAction;
use crate::cocycle::{coboundary, cocycle_from_perturbation, TwistedAction};
use crate::linalg::*;
use crate::model::{product_model_action, MatrixUnitSystem, DEFAULT_LEVEL_CAP};
use crate::rep::{hermitian_exp_i, Dual, Family};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The level-one model action on `M_{|G|}`.
pub fn model_action(dual: &Arc<Dual>) -> DualAction {
    product_model_action(dual.clone(), 1, DEFAULT_LEVEL_CAP)
        .expect("level one is within the cap")
        .action
}

/// `Ad(p_0 ⊗ π(g_0) + p_1 ⊗ π(g_1))` on `M_2`, rotated by a seeded unitary. The elements
/// `g_0, g_1` are the first two in table order (the same one twice for the trivial group).
pub fn inner_action_m2(dual: &Arc<Dual>, seed: u64) -> DualAction {
    let mut r = rng(seed);
    let v = hermitian_exp_i(&random_hermitian(&mut r, 2));
    let g1 = 1.min(dual.order() - 1);
    let blocks = dual
        .irreps
        .iter()
        .map(|x| kron(&unit(2, 0, 0), &x.matrices[0]) + kron(&unit(2, 1, 1), &x.matrices[g1]))
        .collect();
    DualAction::ad_action(dual.clone(), Family { n: 2, blocks }, 1e-9)
        .expect("block-diagonal representation")
        .conjugate_by(&v)
}

/// `(α, w, (Ad w α, ∂w))` with `α` from [`inner_action_m2`] and a seeded unitary family `w`.
pub fn perturbed_twisted(dual: &Arc<Dual>, seed: u64) -> (DualAction, Family, TwistedAction) {
    let alpha = inner_action_m2(dual, seed);
    let w = Family::random_unitary(dual, 2, &mut rng(seed ^ 0x5eed));
    let ta = cocycle_from_perturbation(&alpha, &w).expect("perturbations of actions are twisted actions");
    (alpha, w, ta)
}

/// A coboundary `w = (v⊗1)α(v*)` for the model action and a seeded unitary `v`.
pub fn coboundary_instance(dual: &Arc<Dual>, seed: u64) -> (DualAction, CMat, Family) {
    let alpha = model_action(dual);
    let v = random_unitary(&mut rng(seed), alpha.n);
    let w = coboundary(&alpha, &v);
    (alpha, v, w)
}

/// A perturbation cocycle of the trivial action on `M_2`, amplified to product form
/// `M_{|G|} ⊗ M_2` together with the matrix units of the first leg.
pub fn product_form_instance(dual: &Arc<Dual>, seed: u64) -> (TwistedAction, MatrixUnitSystem) {
    let triv = DualAction::trivial(dual.clone(), 2);
    let w = Family::random_unitary(dual, 2, &mut rng(seed));
    let ta = cocycle_from_perturbation(&triv, &w)
        .expect("perturbations of actions are twisted actions")
        .amplify(dual.order());
    (ta, MatrixUnitSystem::standard(dual).tensored(2, false))
}

/// A perturbation cocycle of the model action amplified by 2, with `K = M_{|G|} ⊗ 1`.
/// `eps = None` draws an arbitrary unitary family, `Some(eps)` one within `eps` of 1.
pub fn model_cocycle_instance(dual: &Arc<Dual>, seed: u64, eps: Option<f64>) -> (TwistedAction, MatrixUnitSystem) {
    let base = model_action(dual).amplify(2);
    let n = base.n;
    let w = match eps {
        Some(e) => Family::random_near_identity(dual, n, e, &mut rng(seed)),
        None => Family::random_unitary(dual, n, &mut rng(seed)),
    };
    let ta = cocycle_from_perturbation(&base, &w).expect("perturbations of actions are twisted actions");
    (ta, MatrixUnitSystem::standard(dual).tensored(2, true))
}
