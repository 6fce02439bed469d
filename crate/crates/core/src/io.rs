//! JSON wire formats. Complex entries are `[re, im]` pairs of doubles.

use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::action::{ActionError, DualAction};
use crate::cocycle::TwistedAction;
use crate::group::{Group, GroupError, GroupJson, DEFAULT_ORDER_CAP};
use crate::linalg::CMat;
use crate::rep::{mat_from_json, mat_to_json, Dual, Family, IrrepJson, RepError};

type MatJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("invalid content: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// `{"group", "seed", "tol", "irreps"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DualJson {
    pub group: GroupJson,
    pub seed: u64,
    pub tol: f64,
    pub irreps: Vec<IrrepJson>,
}

/// `{"N", "group", "irreps", "maps"}` with `maps[π][a·N + b] = α_π(e_ab)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DualActionJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub group: GroupJson,
    pub irreps: Vec<IrrepJson>,
    pub maps: Vec<Vec<MatJson>>,
}

/// A unitary family `{"n", "blocks"}`; blocks indexed by class.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FamilyJson {
    pub n: usize,
    pub blocks: Vec<MatJson>,
}

/// A twisted action: the maps plus `u[π·K + ρ] = U_{π,ρ}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CocycleJson {
    pub action: DualActionJson,
    pub u: Vec<MatJson>,
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("wire types serialize")
}

pub fn export_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    std::fs::write(path, to_string(value) + "\n")
        .map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn import_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    parse(&text)
}

pub fn group_from_json(j: &GroupJson) -> Result<Group, IoError> {
    Ok(Group::from_json(j, DEFAULT_ORDER_CAP.max(j.order))?)
}

pub fn dual_to_json(d: &Dual) -> DualJson {
    DualJson { group: d.group.to_json(), seed: d.seed, tol: d.tol, irreps: d.irreps_json() }
}

pub fn dual_from_json(j: &DualJson) -> Result<Dual, IoError> {
    let g = group_from_json(&j.group)?;
    Ok(Dual::from_irreps_json(&g, &j.irreps, j.seed, j.tol)?)
}

pub fn action_to_json(a: &DualAction) -> DualActionJson {
    DualActionJson {
        n: a.n,
        group: a.dual.group.to_json(),
        irreps: a.dual.irreps_json(),
        maps: (0..a.dual.num_classes())
            .map(|pi| a.images(pi).iter().map(mat_to_json).collect())
            .collect(),
    }
}

/// Rebuilds the dual from the stored irreps, so class order and bases survive the round trip.
pub fn action_from_json(j: &DualActionJson) -> Result<DualAction, IoError> {
    let g = group_from_json(&j.group)?;
    let dual = Arc::new(Dual::from_irreps_json(&g, &j.irreps, 0, crate::rep::DEFAULT_TOL)?);
    action_from_json_with(j, dual)
}

/// Same as [`action_from_json`] over an existing dual; the stored group must match.
pub fn action_from_json_with(j: &DualActionJson, dual: Arc<Dual>) -> Result<DualAction, IoError> {
    if j.group.table != dual.group.table {
        return Err(IoError::Invalid("group table does not match the supplied dual".into()));
    }
    let images = j.maps.iter().map(|v| v.iter().map(checked_mat).collect()).collect::<Result<_, _>>()?;
    Ok(DualAction::from_images(dual, j.n, images)?)
}

pub fn family_to_json(f: &Family) -> FamilyJson {
    FamilyJson { n: f.n, blocks: f.blocks.iter().map(mat_to_json).collect() }
}

pub fn family_from_json(j: &FamilyJson) -> Result<Family, IoError> {
    let blocks = j.blocks.iter().map(checked_mat).collect::<Result<_, _>>()?;
    Ok(Family { n: j.n, blocks })
}

pub fn cocycle_to_json(ta: &TwistedAction) -> CocycleJson {
    CocycleJson { action: action_to_json(&ta.alpha), u: ta.u.iter().map(mat_to_json).collect() }
}

pub fn cocycle_from_json(j: &CocycleJson) -> Result<TwistedAction, IoError> {
    let alpha = action_from_json(&j.action)?;
    let k = alpha.dual.num_classes();
    if j.u.len() != k * k {
        return Err(IoError::Invalid(format!("{} cocycle entries for {k} classes", j.u.len())));
    }
    let u = j.u.iter().map(checked_mat).collect::<Result<_, _>>()?;
    Ok(TwistedAction { alpha, u })
}

fn checked_mat(rows: &MatJson) -> Result<CMat, IoError> {
    let c = rows.first().map(|r| r.len()).unwrap_or(0);
    if let Some(i) = rows.iter().position(|r| r.len() != c) {
        return Err(IoError::Invalid(format!("ragged matrix: row {i} has {} entries, expected {c}", rows[i].len())));
    }
    Ok(mat_from_json(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist_frob;

    fn dual(name: &str) -> Arc<Dual> {
        Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
    }

    #[test]
    fn group_round_trip() {
        let g = Group::builtin("D4", 64).unwrap();
        let text = to_string(&g.to_json());
        let back = group_from_json(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn dual_round_trip_is_exact() {
        let d = dual("S3");
        let j = dual_to_json(&d);
        let back = dual_from_json(&parse(&to_string(&j)).unwrap()).unwrap();
        for (a, b) in d.irreps.iter().zip(&back.irreps) {
            for (x, y) in a.matrices.iter().zip(&b.matrices) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn action_round_trip() {
        let d = dual("S3");
        let alpha = crate::model::product_model_action(d, 1, 256).unwrap().action;
        let j = action_to_json(&alpha);
        let back = action_from_json(&parse(&to_string(&j)).unwrap()).unwrap();
        assert!(back.check().pass(1e-9));
        for pi in 0..3 {
            for (x, y) in alpha.images(pi).iter().zip(back.images(pi)) {
                assert!(dist_frob(x, &y) <= 1e-15);
            }
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse::<GroupJson>("{\n  \"order\": 2,\n  \"table\": [[0,1],[1,0]\n}").unwrap_err();
        match err {
            IoError::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("unexpected {e}"),
        }
        let err = parse::<DualActionJson>("{\"N\": \"two\"}").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn mismatched_group_is_rejected() {
        let alpha = DualAction::trivial(dual("Z2"), 1);
        let j = action_to_json(&alpha);
        assert!(matches!(action_from_json_with(&j, dual("Z3")), Err(IoError::Invalid(_))));
    }
}
