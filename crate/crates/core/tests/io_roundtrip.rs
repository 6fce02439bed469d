use std::sync::Arc;

use ghat::cocycle::TwistedAction;
use ghat::group::{Group, GroupJson, PermGenerators};
use ghat::instances::{perturbed_twisted, rng};
use ghat::io::*;
use ghat::linalg::dist_frob;
use ghat::model::product_model_action;
use ghat::rep::{Dual, Family};

fn dual(name: &str) -> Arc<Dual> {
    Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dual("Q8");
    let path = dir.path().join("q8.json");
    export_json(&dual_to_json(&d), &path).unwrap();
    let back = dual_from_json(&import_json(&path).unwrap()).unwrap();
    assert_eq!(back.dims(), d.dims());
    assert!(back.check_irreps().max_residual() < 1e-9);

    let alpha = product_model_action(d.clone(), 1, 256).unwrap().action;
    let path = dir.path().join("action.json");
    export_json(&action_to_json(&alpha), &path).unwrap();
    let read = action_from_json(&import_json(&path).unwrap()).unwrap();
    assert_eq!(action_to_json(&read), action_to_json(&alpha));
}

#[test]
fn cocycle_and_family_round_trip() {
    let d = dual("S3");
    let (_, w, ta) = perturbed_twisted(&d, 5);
    let fj = family_to_json(&w);
    let w2: Family = family_from_json(&parse(&to_string(&fj)).unwrap()).unwrap();
    assert!(w.max_distance(&w2) == 0.0);

    let cj = cocycle_to_json(&ta);
    let ta2: TwistedAction = cocycle_from_json(&parse(&to_string(&cj)).unwrap()).unwrap();
    assert!(ta2.check().max_residual() < 1e-9);
    for (a, b) in ta.u.iter().zip(&ta2.u) {
        assert!(dist_frob(a, b) == 0.0);
    }
}

#[test]
fn permutation_and_table_inputs_agree() {
    let perms: PermGenerators = parse(r#"{"degree": 3, "generators": [[1, 2, 0], [1, 0, 2]]}"#).unwrap();
    let g = Group::from_permutations(&perms, 64).unwrap();
    assert_eq!(g.order, 6);
    let table: GroupJson = parse(&to_string(&g.to_json())).unwrap();
    assert_eq!(group_from_json(&table).unwrap(), g);
    let d = Dual::compute(&g, 3, 1e-9).unwrap();
    let mut dims = d.dims();
    dims.sort();
    assert_eq!(dims, vec![1, 1, 2]);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(matches!(parse::<GroupJson>("{\"order\": 2, \"table\": "), Err(IoError::Parse { .. })));
    let bad: GroupJson = parse(r#"{"order": 2, "table": [[0, 1], [0, 1]]}"#).unwrap();
    assert!(matches!(group_from_json(&bad), Err(IoError::Group(_))));
    let ragged: FamilyJson = parse(r#"{"n": 1, "blocks": [[[[1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]}"#).unwrap();
    assert!(matches!(family_from_json(&ragged), Err(IoError::Invalid(_))));
    let d = dual("Z2");
    let mut cj = cocycle_to_json(&TwistedAction::untwisted(&ghat::action::DualAction::trivial(d, 1)));
    cj.u.pop();
    assert!(matches!(cocycle_from_json(&cj), Err(IoError::Invalid(_))));
}

#[test]
fn random_families_survive_text() {
    let d = dual("D4");
    for seed in 0..5 {
        let w = Family::random_unitary(&d, 3, &mut rng(seed));
        let text = to_string(&family_to_json(&w));
        let back = family_from_json(&parse(&text).unwrap()).unwrap();
        // float_roundtrip makes the decimal text exact
        assert!(w.max_distance(&back) == 0.0);
    }
}
