//! Finite groups given by multiplication tables, and their right regular representation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{zeros, CMat, ONE};

pub const DEFAULT_ORDER_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("table is not associative at ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("table has no identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("group order {order} exceeds cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },
    #[error("unknown builtin group `{0}`")]
    UnknownBuiltin(String),
    #[error("malformed group description: {0}")]
    Malformed(String),
}

/// A finite group on the dense index set `0..order`, with `table[g][h] = g·h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    pub name: Option<String>,
}

/// Wire format of a group: `{"order", "table", "name"}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Permutation generators: `{"degree", "generators"}`; each generator lists images of `0..degree`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PermGenerators {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

/// The three accepted ways of describing a group.
#[derive(Debug, Clone)]
pub enum GroupSpec {
    Table(GroupJson),
    Permutations(PermGenerators),
    Builtin(String),
}

impl Group {
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("group of order {}", self.order))
    }

    /// Validate a multiplication table and derive identity and inverses.
    pub fn from_table(table: Vec<Vec<usize>>, name: Option<String>, cap: usize) -> Result<Group, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Malformed("empty table".into()));
        }
        if n > cap {
            return Err(GroupError::OrderCapExceeded { order: n, cap });
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::Malformed(format!("row {g} has length {}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(GroupError::NotClosed(format!("product {g}·? = {bad} is outside 0..{n}")));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![0; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or(GroupError::NoInverse(g))?;
        }
        check_latin(&table)?;
        check_associative(&table)?;
        Ok(Group { order: n, table, identity, inverse, name })
    }

    pub fn from_json(j: &GroupJson, cap: usize) -> Result<Group, GroupError> {
        if j.order != j.table.len() {
            return Err(GroupError::Malformed(format!(
                "order {} does not match table size {}",
                j.order,
                j.table.len()
            )));
        }
        Group::from_table(j.table.clone(), j.name.clone(), cap)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { order: self.order, table: self.table.clone(), name: self.name.clone() }
    }

    /// Closure of a set of permutations under composition, `(g·h)(x) = g(h(x))`.
    /// Elements are numbered in breadth-first order starting from the identity.
    pub fn from_permutations(p: &PermGenerators, cap: usize) -> Result<Group, GroupError> {
        let k = p.degree;
        for g in &p.generators {
            if g.len() != k {
                return Err(GroupError::Malformed(format!("generator {g:?} does not have degree {k}")));
            }
            let mut seen = vec![false; k];
            for &x in g {
                if x >= k || seen[x] {
                    return Err(GroupError::NotClosed(format!("generator {g:?} is not a permutation of 0..{k}")));
                }
                seen[x] = true;
            }
        }
        let id: Vec<usize> = (0..k).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &p.generators {
                let prod = compose(&elems[i], g);
                if !index.contains_key(&prod) {
                    if elems.len() == cap {
                        return Err(GroupError::OrderCapExceeded { order: cap + 1, cap });
                    }
                    index.insert(prod.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(prod);
                }
            }
        }
        perm_table(&elems, &index, None, cap)
    }

    pub fn builtin(name: &str, cap: usize) -> Result<Group, GroupError> {
        let key = name.trim().to_ascii_lowercase().replace(' ', "");
        let (kind, arg) = match key.find('(') {
            Some(p) if key.ends_with(')') => {
                let arg: usize = key[p + 1..key.len() - 1]
                    .parse()
                    .map_err(|_| GroupError::UnknownBuiltin(name.into()))?;
                (key[..p].to_string(), Some(arg))
            }
            _ => {
                let split = key.find(|c: char| c.is_ascii_digit()).unwrap_or(key.len());
                let arg = key[split..].parse().ok();
                (key[..split].to_string(), arg)
            }
        };
        let (table, canonical) = match (kind.as_str(), arg) {
            ("trivial", None) => (cyclic_table(1), "Z1".to_string()),
            ("cyclic" | "z" | "c", Some(n)) if n >= 1 => (cyclic_table(n), format!("Z{n}")),
            ("dihedral" | "d", Some(n)) if n >= 1 => (dihedral_table(n), format!("D{n}")),
            ("symmetric" | "s", Some(n)) if (1..=4).contains(&n) => (symmetric_table(n), format!("S{n}")),
            ("quaternion" | "q", Some(8)) => (quaternion_table(), "Q8".to_string()),
            _ => return Err(GroupError::UnknownBuiltin(name.into())),
        };
        Group::from_table(table, Some(canonical), cap)
    }

    pub fn parse(spec: &GroupSpec, cap: usize) -> Result<Group, GroupError> {
        match spec {
            GroupSpec::Table(j) => Group::from_json(j, cap),
            GroupSpec::Permutations(p) => Group::from_permutations(p, cap),
            GroupSpec::Builtin(s) => Group::builtin(s, cap),
        }
    }

    /// Direct product `G×H` with `(g,h) ↦ g·|H| + h`.
    pub fn product(&self, other: &Group, cap: usize) -> Result<Group, GroupError> {
        let (n, m) = (self.order, other.order);
        if n * m > cap {
            return Err(GroupError::OrderCapExceeded { order: n * m, cap });
        }
        let table = (0..n * m)
            .map(|a| {
                (0..n * m)
                    .map(|b| self.mul(a / m, b / m) * m + other.mul(a % m, b % m))
                    .collect()
            })
            .collect();
        let name = Some(format!("{}x{}", self.label(), other.label()));
        Group::from_table(table, name, cap)
    }

    /// Conjugacy classes, ordered by their smallest element; the identity class comes first.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.order];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.order {
            if class_of[x] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = (0..self.order)
                .map(|g| self.mul(self.mul(g, x), self.inv(g)))
                .collect();
            cls.sort_unstable();
            cls.dedup();
            for &y in &cls {
                class_of[y] = classes.len();
            }
            classes.push(cls);
        }
        classes
    }

    /// Right regular representation `u_g δ_h = δ_{h g⁻¹}`, i.e. `(u_g ψ)(x) = ψ(xg)`.
    pub fn regular_representation(&self) -> Vec<CMat> {
        (0..self.order)
            .map(|g| {
                let mut u = zeros(self.order, self.order);
                for h in 0..self.order {
                    u[(self.mul(h, self.inv(g)), h)] = ONE;
                }
                u
            })
            .collect()
    }

    /// Left regular representation `l_g δ_h = δ_{gh}`; it commutes with the right one.
    pub fn left_regular_representation(&self) -> Vec<CMat> {
        (0..self.order)
            .map(|g| {
                let mut u = zeros(self.order, self.order);
                for h in 0..self.order {
                    u[(self.mul(g, h), h)] = ONE;
                }
                u
            })
            .collect()
    }
}

fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

fn perm_table(
    elems: &[Vec<usize>],
    index: &HashMap<Vec<usize>, usize>,
    name: Option<String>,
    cap: usize,
) -> Result<Group, GroupError> {
    let table = elems
        .iter()
        .map(|g| elems.iter().map(|h| index[&compose(g, h)]).collect())
        .collect();
    Group::from_table(table, name, cap)
}

fn check_latin(table: &[Vec<usize>]) -> Result<(), GroupError> {
    let n = table.len();
    for g in 0..n {
        let mut row = vec![false; n];
        let mut col = vec![false; n];
        for h in 0..n {
            if row[table[g][h]] || col[table[h][g]] {
                return Err(GroupError::NotClosed(format!("row or column {g} is not a permutation")));
            }
            row[table[g][h]] = true;
            col[table[h][g]] = true;
        }
    }
    Ok(())
}

const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;

fn check_associative(t: &[Vec<usize>]) -> Result<(), GroupError> {
    let n = t.len();
    let check = |a: usize, b: usize, c: usize| {
        if t[t[a][b]][c] != t[a][t[b][c]] {
            Err(GroupError::NonAssociative(a, b, c))
        } else {
            Ok(())
        }
    };
    if n <= EXHAUSTIVE_ASSOC_LIMIT {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    check(a, b, c)?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..200_000 {
            check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
        }
    }
    Ok(())
}

fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
}

/// Dihedral group of order `2n`; element `a + n·b` stands for `r^a s^b`.
fn dihedral_table(n: usize) -> Vec<Vec<usize>> {
    let m = 2 * n;
    (0..m)
        .map(|x| {
            let (a, b) = (x % n, x / n);
            (0..m)
                .map(|y| {
                    let (c, d) = (y % n, y / n);
                    let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                    rot + n * ((b + d) % 2)
                })
                .collect()
        })
        .collect()
}

fn symmetric_table(n: usize) -> Vec<Vec<usize>> {
    let mut perms = Vec::new();
    permutations(&mut (0..n).collect(), 0, &mut perms);
    // lexicographic order keeps the identity at index 0
    perms.sort();
    let index: HashMap<Vec<usize>, usize> =
        perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    perms
        .iter()
        .map(|g| perms.iter().map(|h| index[&compose(g, h)]).collect())
        .collect()
}

fn permutations(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// Quaternion group: index `2u + s` is `(-1)^s · q_u` with `q = (1, i, j, k)`.
fn quaternion_table() -> Vec<Vec<usize>> {
    // unit products q_a q_b = sign · q_c
    let units: BTreeMap<(usize, usize), (usize, usize)> = [
        ((0, 0), (0, 0)), ((0, 1), (1, 0)), ((0, 2), (2, 0)), ((0, 3), (3, 0)),
        ((1, 0), (1, 0)), ((1, 1), (0, 1)), ((1, 2), (3, 0)), ((1, 3), (2, 1)),
        ((2, 0), (2, 0)), ((2, 1), (3, 1)), ((2, 2), (0, 1)), ((2, 3), (1, 0)),
        ((3, 0), (3, 0)), ((3, 1), (2, 0)), ((3, 2), (1, 1)), ((3, 3), (0, 1)),
    ]
    .into_iter()
    .collect();
    (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (c, s) = units[&(x / 2, y / 2)];
                    2 * c + (s + x % 2 + y % 2) % 2
                })
                .collect()
        })
        .collect()
}
