//! The dual object Ĝ: unitary irreducible representations, intertwiner bases,
//! fusion rules, conjugates and the Frobenius-transformed bases.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::group::Group;
use crate::linalg::*;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RETRIES: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepError {
    #[error("irreducible decomposition failed after {0} attempts")]
    DecompositionFailed(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("representation label {0} is not irreducible")]
    NotIrreducible(String),
    #[error("invalid irreducible representation data: {0}")]
    InvalidIrrep(String),
}

#[derive(Debug, Clone)]
pub struct UnitaryIrrep {
    pub class_index: usize,
    pub dim: usize,
    pub matrices: Vec<CMat>,
    pub character: Vec<C64>,
}

/// A representation built from class representatives by entrywise conjugation and tensor products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepLabel {
    Irrep(usize),
    Bar(Box<RepLabel>),
    Tensor(Box<RepLabel>, Box<RepLabel>),
}

impl RepLabel {
    pub fn irrep(k: usize) -> Self {
        RepLabel::Irrep(k)
    }

    pub fn bar(l: RepLabel) -> Self {
        RepLabel::Bar(Box::new(l))
    }

    pub fn tensor(a: RepLabel, b: RepLabel) -> Self {
        RepLabel::Tensor(Box::new(a), Box::new(b))
    }

    pub fn conj_of(k: usize) -> Self {
        RepLabel::bar(RepLabel::Irrep(k))
    }
}

impl std::fmt::Display for RepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepLabel::Irrep(k) => write!(f, "{k}"),
            RepLabel::Bar(l) => write!(f, "bar({l})"),
            RepLabel::Tensor(a, b) => write!(f, "({a}⊗{b})"),
        }
    }
}

/// Orthonormal basis `T^{σ,e}` of the intertwiner space `(σ, target)`.
#[derive(Debug, Clone)]
pub struct IntertwinerOnb {
    pub source: RepLabel,
    pub target: RepLabel,
    pub basis: Vec<CMat>,
    pub multiplicity: usize,
}

/// All channels of a decomposition: for each class `σ` an orthonormal basis of `(σ, target)`.
pub type Decomposition = Vec<(usize, Vec<CMat>)>;

/// The computed dual `Ĝ`, shared read-only.
#[derive(Debug)]
pub struct Dual {
    pub group: Group,
    pub irreps: Vec<UnitaryIrrep>,
    pub seed: u64,
    pub tol: f64,
    decomps: Mutex<HashMap<RepLabel, Arc<Decomposition>>>,
}

/// Character-table ordering: the trivial class first, then by dimension and character values.
fn class_order(a: &UnitaryIrrep, b: &UnitaryIrrep) -> std::cmp::Ordering {
    let key = |r: &UnitaryIrrep| {
        let trivial = r.dim == 1 && r.character.iter().all(|z| (z - ONE).norm() < 1e-6);
        (!trivial, r.dim)
    };
    key(a).cmp(&key(b)).then_with(|| {
        for (x, y) in a.character.iter().zip(&b.character) {
            for (p, q) in [(x.re, y.re), (x.im, y.im)] {
                if (p - q).abs() > 1e-6 {
                    return q.partial_cmp(&p).unwrap();
                }
            }
        }
        std::cmp::Ordering::Equal
    })
}

fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_salt(source: &RepLabel, target: &RepLabel) -> u64 {
    // FNV-1a over the printed labels; stable across runs
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in format!("{source}|{target}").bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn character_of(mats: &[CMat]) -> Vec<C64> {
    mats.iter().map(|m| m.trace()).collect()
}

fn char_inner(g: &Group, a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() / g.order as f64
}

/// Averaged inner product `P = |G|⁻¹ Σ π(g)*π(g)` and the similarity `P^{1/2} π P^{-1/2}`.
fn unitarize(mats: &[CMat]) -> Vec<CMat> {
    let d = mats[0].nrows();
    let mut p = zeros(d, d);
    for m in mats {
        p += m.adjoint() * m;
    }
    p /= re(mats.len() as f64);
    let s = sqrt_psd(&p);
    let si = inv_sqrt_pd(&p);
    mats.iter().map(|m| &s * m * &si).collect()
}

impl Dual {
    /// Compute Ĝ by splitting the regular representation with a seeded random
    /// self-adjoint element of its commutant.
    pub fn compute(group: &Group, seed: u64, tol: f64) -> Result<Dual, RepError> {
        Dual::compute_with_retries(group, seed, tol, DEFAULT_RETRIES)
    }

    pub fn compute_with_retries(group: &Group, seed: u64, tol: f64, retries: usize) -> Result<Dual, RepError> {
        for attempt in 0..retries {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x1_0000 + attempt as u64));
            if let Some(irreps) = try_split(group, &mut rng, tol) {
                return Ok(Dual::assemble(group.clone(), irreps, seed, tol));
            }
        }
        Err(RepError::DecompositionFailed(retries))
    }

    /// Build a dual from externally supplied irreducible matrices (validated).
    pub fn from_matrices(group: &Group, mats: Vec<Vec<CMat>>, seed: u64, tol: f64) -> Result<Dual, RepError> {
        let mut irreps = Vec::new();
        for (k, m) in mats.into_iter().enumerate() {
            if m.len() != group.order {
                return Err(RepError::InvalidIrrep(format!("class {k}: wrong number of matrices")));
            }
            let dim = m[0].nrows();
            let character = character_of(&m);
            irreps.push(UnitaryIrrep { class_index: k, dim, matrices: m, character });
        }
        let dual = Dual {
            group: group.clone(),
            irreps,
            seed,
            tol,
            decomps: Mutex::new(HashMap::new()),
        };
        let report = dual.check_irreps();
        if report.max_residual() > tol.max(1e-8) || !report.complete {
            return Err(RepError::InvalidIrrep(format!("validation residual {:.3e}", report.max_residual())));
        }
        Ok(dual)
    }

    fn assemble(group: Group, mut irreps: Vec<UnitaryIrrep>, seed: u64, tol: f64) -> Dual {
        irreps.sort_by(class_order);
        for (k, r) in irreps.iter_mut().enumerate() {
            r.class_index = k;
        }
        Dual { group, irreps, seed, tol, decomps: Mutex::new(HashMap::new()) }
    }

    pub fn num_classes(&self) -> usize {
        self.irreps.len()
    }

    pub fn order(&self) -> usize {
        self.group.order
    }

    pub fn d(&self, pi: usize) -> usize {
        self.irreps[pi].dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    pub fn df(&self, pi: usize) -> f64 {
        self.irreps[pi].dim as f64
    }

    /// Indices `(π, i, j)` in classIndex-major, row-major order.
    pub fn coefficient_labels(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for pi in 0..self.num_classes() {
            let d = self.d(pi);
            for i in 0..d {
                for j in 0..d {
                    out.push((pi, i, j));
                }
            }
        }
        out
    }

    /// Concrete matrices of a label, one per group element.
    pub fn resolve(&self, label: &RepLabel) -> Vec<CMat> {
        match label {
            RepLabel::Irrep(k) => self.irreps[*k].matrices.clone(),
            RepLabel::Bar(l) => self.resolve(l).iter().map(conj).collect(),
            RepLabel::Tensor(a, b) => {
                let (ma, mb) = (self.resolve(a), self.resolve(b));
                ma.iter().zip(&mb).map(|(x, y)| kron(x, y)).collect()
            }
        }
    }

    pub fn label_dim(&self, label: &RepLabel) -> usize {
        match label {
            RepLabel::Irrep(k) => self.d(*k),
            RepLabel::Bar(l) => self.label_dim(l),
            RepLabel::Tensor(a, b) => self.label_dim(a) * self.label_dim(b),
        }
    }

    pub fn character(&self, label: &RepLabel) -> Vec<C64> {
        match label {
            RepLabel::Irrep(k) => self.irreps[*k].character.clone(),
            RepLabel::Bar(l) => self.character(l).iter().map(|z| z.conj()).collect(),
            RepLabel::Tensor(a, b) => {
                let (ca, cb) = (self.character(a), self.character(b));
                ca.iter().zip(&cb).map(|(x, y)| x * y).collect()
            }
        }
    }

    /// Multiplicity of class `σ` in a label, from the character inner product.
    pub fn multiplicity(&self, sigma: usize, target: &RepLabel) -> usize {
        let m = char_inner(&self.group, &self.character(target), &self.irreps[sigma].character);
        m.re.round().max(0.0) as usize
    }

    /// Class index of an irreducible label, `None` when the label is reducible.
    pub fn class_of(&self, label: &RepLabel) -> Option<usize> {
        if let RepLabel::Irrep(k) = label {
            return Some(*k);
        }
        let ch = self.character(label);
        if (char_inner(&self.group, &ch, &ch).re - 1.0).abs() > 1e-6 {
            return None;
        }
        (0..self.num_classes()).find(|&s| self.multiplicity(s, label) == 1)
    }

    /// The class of the entrywise conjugate `bar(π)`.
    pub fn conj_class(&self, pi: usize) -> usize {
        self.class_of(&RepLabel::conj_of(pi)).expect("conjugate of an irrep is irreducible")
    }

    /// Orthonormal basis of `(source, target)` for an irreducible `source`.
    ///
    /// The basis is the image of seeded random matrices under the averaging
    /// projection `X ↦ |G|⁻¹ Σ target(g) X source(g)*`, orthonormalized for
    /// `⟨T, S⟩ 1 = S*T`. For `(𝟏, L⊗bar(L))` and `(𝟏, bar(L)⊗L)` with `L`
    /// irreducible the canonical isometry with entries `δ_ij/√d` is used.
    pub fn intertwiner_onb(&self, source: &RepLabel, target: &RepLabel) -> Result<IntertwinerOnb, RepError> {
        let sigma_class = self
            .class_of(source)
            .ok_or_else(|| RepError::NotIrreducible(source.to_string()))?;
        let ds = self.label_dim(source);
        let dt = self.label_dim(target);
        let mult = self.multiplicity(sigma_class, target);
        if sigma_class == 0 && mult == 1 && ds == 1 {
            if let Some(t) = self.canonical_pair(source, target) {
                return Ok(IntertwinerOnb { source: source.clone(), target: target.clone(), basis: vec![t], multiplicity: 1 });
            }
        }
        let src = self.resolve(source);
        let tgt = self.resolve(target);
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, label_salt(source, target)));
        let mut basis: Vec<CMat> = Vec::new();
        let mut flat: Vec<nalgebra::DVector<C64>> = Vec::new();
        let mut draws = 0;
        while basis.len() < mult {
            draws += 1;
            if draws > 4 * mult + 20 {
                return Err(RepError::DecompositionFailed(draws));
            }
            let x = random_matrix(&mut rng, dt, ds);
            let mut p = zeros(dt, ds);
            for (a, b) in tgt.iter().zip(&src) {
                p += a * &x * b.adjoint();
            }
            let mut v = vec_of(&p);
            for _ in 0..2 {
                for q in &flat {
                    let c = q.dotc(&v);
                    v -= q * c;
                }
            }
            let nv = v.norm();
            if nv < 1e-6 * (dt * ds) as f64 {
                continue;
            }
            v /= re(nv);
            basis.push(unvec(v.as_slice(), dt, ds) * re((ds as f64).sqrt()));
            flat.push(v);
        }
        Ok(IntertwinerOnb { source: source.clone(), target: target.clone(), basis, multiplicity: mult })
    }

    fn canonical_pair(&self, source: &RepLabel, target: &RepLabel) -> Option<CMat> {
        if self.label_dim(source) != 1 || self.class_of(source) != Some(0) {
            return None;
        }
        if let RepLabel::Tensor(a, b) = target {
            let matches = matches!(b.as_ref(), RepLabel::Bar(inner) if inner == a)
                || matches!(a.as_ref(), RepLabel::Bar(inner) if inner == b);
            if matches && self.class_of(a).is_some() {
                return Some(self.dual_isometry_dim(self.label_dim(a)));
            }
        }
        None
    }

    fn dual_isometry_dim(&self, d: usize) -> CMat {
        let mut t = zeros(d * d, 1);
        for i in 0..d {
            t[(i * d + i, 0)] = re(1.0 / (d as f64).sqrt());
        }
        t
    }

    /// `T^𝟏_{π,bar(π)}` with entries `δ_ij/√dπ`; the same vector is `T^𝟏_{bar(π),π}`.
    pub fn canonical_dual_isometry(&self, pi: usize) -> CMat {
        self.dual_isometry_dim(self.d(pi))
    }

    /// Irreducible decomposition of a label: an orthonormal basis of `(σ, label)` for every class `σ`
    /// with nonzero multiplicity. Cached per label.
    pub fn decompose(&self, label: &RepLabel) -> Arc<Decomposition> {
        if let Some(d) = self.decomps.lock().unwrap().get(label) {
            return d.clone();
        }
        let mut out = Vec::new();
        for sigma in 0..self.num_classes() {
            if self.multiplicity(sigma, label) > 0 {
                let onb = self
                    .intertwiner_onb(&RepLabel::Irrep(sigma), label)
                    .expect("class representatives are irreducible");
                out.push((sigma, onb.basis));
            }
        }
        let arc = Arc::new(out);
        self.decomps.lock().unwrap().insert(label.clone(), arc.clone());
        arc
    }

    /// Fusion channels of `π⊗ρ` for class representatives.
    pub fn fusion(&self, pi: usize, rho: usize) -> Arc<Decomposition> {
        self.decompose(&RepLabel::tensor(RepLabel::Irrep(pi), RepLabel::Irrep(rho)))
    }

    pub fn fusion_coefficients(&self, pi: usize, rho: usize) -> BTreeMap<usize, usize> {
        let t = RepLabel::tensor(RepLabel::Irrep(pi), RepLabel::Irrep(rho));
        (0..self.num_classes())
            .map(|s| (s, self.multiplicity(s, &t)))
            .filter(|&(_, m)| m > 0)
            .collect()
    }

    /// Frobenius transform of a basis of `(σ, π⊗ρ)` into a basis of `(ρ, bar(π)⊗σ)`:
    /// `T̃_{π̄_i σ_m}^{ρ_k} = √(dρ/dσ) · conj(T_{π_i ρ_k}^{σ_m})`.
    pub fn frobenius_basis(&self, dpi: usize, drho: usize, basis: &[CMat]) -> Result<Vec<CMat>, RepError> {
        basis
            .iter()
            .map(|t| {
                if t.nrows() != dpi * drho {
                    return Err(RepError::DimensionMismatch(format!(
                        "basis element has {} rows, expected {}",
                        t.nrows(),
                        dpi * drho
                    )));
                }
                let ds = t.ncols();
                let scale = (drho as f64 / ds as f64).sqrt();
                Ok(CMat::from_fn(dpi * ds, drho, |r, k| {
                    let (i, m) = (r / ds, r % ds);
                    t[(i * drho + k, m)].conj() * scale
                }))
            })
            .collect()
    }

    /// Operator form `√(dρ dπ/dσ) (1_π̄ ⊗ T*)(T^𝟏_{π̄,π} ⊗ 1_ρ)` of the Frobenius transform.
    pub fn frobenius_operator(&self, dpi: usize, drho: usize, t: &CMat) -> CMat {
        let ds = t.ncols();
        let t1 = self.dual_isometry_dim(dpi);
        let left = kron(&eye(dpi), &t.adjoint());
        let right = kron(&t1, &eye(drho));
        left * right * re((drho as f64 * dpi as f64 / ds as f64).sqrt())
    }

    /// Extend a family over Ĝ to an arbitrary label: `v(L) = Σ T v(σ) T*` over a decomposition of `L`.
    pub fn extend_family(&self, v: &Family, label: &RepLabel) -> CMat {
        if let RepLabel::Irrep(k) = label {
            return v.blocks[*k].clone();
        }
        let dl = self.label_dim(label);
        let mut out = zeros(v.n * dl, v.n * dl);
        for (sigma, basis) in self.decompose(label).iter() {
            for t in basis {
                out += lift_sandwich(t, &v.blocks[*sigma]);
            }
        }
        out
    }

    /// Same as [`Dual::extend_family`] with an explicitly supplied decomposition.
    pub fn extend_family_with(&self, v: &Family, decomposition: &Decomposition, dl: usize) -> CMat {
        let mut out = zeros(v.n * dl, v.n * dl);
        for (sigma, basis) in decomposition {
            for t in basis {
                out += lift_sandwich(t, &v.blocks[*sigma]);
            }
        }
        out
    }

    /// Recoupling matrix between the bases `(T^{η,a}⊗1)T^{ξ,b}` of `(ξ, (π⊗ρ)⊗σ)`
    /// (columns, indexed by `(ζ, c, d)`) and `(1⊗T^{ζ,c})T^{ξ,d}` (rows).
    pub fn recoupling_matrix(&self, pi: usize, rho: usize, sigma: usize, xi: usize) -> CMat {
        let (dp, ds, dx) = (self.d(pi), self.d(sigma), self.d(xi));
        let mut left = Vec::new();
        for (eta, ts) in self.fusion(pi, rho).iter() {
            for t in ts {
                for (x, us) in self.fusion(*eta, sigma).iter() {
                    if *x == xi {
                        for u in us {
                            left.push(kron(t, &eye(ds)) * u);
                        }
                    }
                }
            }
        }
        let mut right = Vec::new();
        for (zeta, ts) in self.fusion(rho, sigma).iter() {
            for t in ts {
                for (x, us) in self.fusion(pi, *zeta).iter() {
                    if *x == xi {
                        for u in us {
                            right.push(kron(&eye(dp), t) * u);
                        }
                    }
                }
            }
        }
        CMat::from_fn(right.len(), left.len(), |r, c| {
            (right[r].adjoint() * &left[c]).trace() / dx as f64
        })
    }

    pub fn check_irreps(&self) -> IrrepReport {
        let g = &self.group;
        let mut hom: f64 = 0.0;
        let mut unit: f64 = 0.0;
        let mut irreducible: f64 = 0.0;
        for r in &self.irreps {
            for a in 0..g.order {
                unit = unit.max(unitarity_residual(&r.matrices[a]));
                for b in 0..g.order {
                    let lhs = &r.matrices[a] * &r.matrices[b];
                    hom = hom.max(dist_frob(&lhs, &r.matrices[g.mul(a, b)]));
                }
            }
            // the commutant of an irreducible family is one-dimensional
            let ops: Vec<CMat> = r
                .matrices
                .iter()
                .map(|m| sandwich_op(m, &eye(r.dim)) - sandwich_op(&eye(r.dim), m))
                .collect();
            let k = null_space(&ops, r.dim * r.dim, 1e-6).ncols();
            irreducible = irreducible.max((k as f64 - 1.0).abs());
        }
        let mut ortho: f64 = 0.0;
        for a in &self.irreps {
            for b in &self.irreps {
                let want = if a.class_index == b.class_index { ONE } else { ZERO };
                ortho = ortho.max((char_inner(g, &a.character, &b.character) - want).norm());
            }
        }
        let sum_sq: usize = self.irreps.iter().map(|r| r.dim * r.dim).sum();
        let complete = sum_sq == g.order && self.irreps.len() == g.conjugacy_classes().len();
        IrrepReport { homomorphism: hom, unitarity: unit, irreducibility: irreducible, character_orthonormality: ortho, sum_of_squares: sum_sq, complete }
    }
}

/// Residuals of the intertwiner calculus over all pairs of classes.
#[derive(Debug, Clone, Default)]
pub struct CalculusReport {
    /// `T^{σ,e*}T^{ξ,f} = δ δ 1`.
    pub orthonormality: f64,
    /// `Σ T T* = 1`.
    pub completeness: f64,
    pub intertwining: f64,
    /// `Σ_k T^{ρ_l,e}_{π_k,π̄_k} = √dπ δ_{𝟏,ρ}`.
    pub dual_sum: f64,
    /// Orthonormality and intertwining of `T̃` in `(ρ, π̄⊗σ)`, and agreement with the operator form.
    pub frobenius: f64,
    /// `‖V*V − 1‖` for the recoupling matrices.
    pub recoupling: f64,
    /// `Σ_σ N_{πρ}^σ dσ = dπ dρ` for every pair.
    pub dimension_count_ok: bool,
}

impl CalculusReport {
    pub fn max_residual(&self) -> f64 {
        self.orthonormality
            .max(self.completeness)
            .max(self.intertwining)
            .max(self.dual_sum)
            .max(self.frobenius)
            .max(self.recoupling)
    }
}

impl Dual {
    pub fn check_calculus(&self) -> CalculusReport {
        let k = self.num_classes();
        let mut rep = CalculusReport { dimension_count_ok: true, ..Default::default() };
        for pi in 0..k {
            for rho in 0..k {
                let (dp, dr) = (self.d(pi), self.d(rho));
                let target = RepLabel::tensor(RepLabel::Irrep(pi), RepLabel::Irrep(rho));
                let tgt = self.resolve(&target);
                let fus = self.fusion(pi, rho);
                let count: usize = fus.iter().map(|(s, b)| b.len() * self.d(*s)).sum();
                rep.dimension_count_ok &= count == dp * dr;
                let mut sum = zeros(dp * dr, dp * dr);
                for (sigma, basis) in fus.iter() {
                    for (e, t) in basis.iter().enumerate() {
                        sum += t * t.adjoint();
                        for (xi, other) in fus.iter() {
                            for (f, s) in other.iter().enumerate() {
                                let want = if sigma == xi && e == f { eye(self.d(*sigma)) } else { zeros(t.ncols(), s.ncols()) };
                                rep.orthonormality = rep.orthonormality.max(dist_frob(&(t.adjoint() * s), &want));
                            }
                        }
                        for (g, m) in tgt.iter().enumerate() {
                            let r = dist_frob(&(t * &self.irreps[*sigma].matrices[g]), &(m * t));
                            rep.intertwining = rep.intertwining.max(r);
                        }
                    }
                    // T̃ lives in (ρ, bar(π)⊗σ)
                    let tilde = match self.frobenius_basis(dp, dr, basis) {
                        Ok(t) => t,
                        Err(_) => {
                            rep.frobenius = f64::INFINITY;
                            continue;
                        }
                    };
                    let tl = self.resolve(&RepLabel::tensor(RepLabel::conj_of(pi), RepLabel::Irrep(*sigma)));
                    for (e, tt) in tilde.iter().enumerate() {
                        rep.frobenius = rep.frobenius.max(dist_frob(tt, &self.frobenius_operator(dp, dr, &basis[e])));
                        for (f, ss) in tilde.iter().enumerate() {
                            let want = if e == f { eye(dr) } else { zeros(dr, dr) };
                            rep.frobenius = rep.frobenius.max(dist_frob(&(tt.adjoint() * ss), &want));
                        }
                        for (g, m) in tl.iter().enumerate() {
                            rep.frobenius = rep.frobenius.max(dist_frob(&(tt * &self.irreps[rho].matrices[g]), &(m * tt)));
                        }
                    }
                }
                rep.completeness = rep.completeness.max(dist_frob(&sum, &eye(dp * dr)));
            }
            let dp = self.d(pi);
            let pair = RepLabel::tensor(RepLabel::Irrep(pi), RepLabel::conj_of(pi));
            for (rho, basis) in self.decompose(&pair).iter() {
                for t in basis {
                    for l in 0..self.d(*rho) {
                        let s: C64 = (0..dp).map(|q| t[(q * dp + q, l)]).sum();
                        let want = if *rho == 0 { (dp as f64).sqrt() } else { 0.0 };
                        rep.dual_sum = rep.dual_sum.max((s - re(want)).norm());
                    }
                }
            }
        }
        for pi in 0..k {
            for rho in 0..k {
                for sigma in 0..k {
                    for xi in 0..k {
                        let v = self.recoupling_matrix(pi, rho, sigma, xi);
                        if v.nrows() > 0 {
                            rep.recoupling = rep.recoupling.max(unitarity_residual(&v));
                        }
                    }
                }
            }
        }
        rep
    }
}

#[derive(Debug, Clone)]
pub struct IrrepReport {
    pub homomorphism: f64,
    pub unitarity: f64,
    pub irreducibility: f64,
    pub character_orthonormality: f64,
    pub sum_of_squares: usize,
    pub complete: bool,
}

impl IrrepReport {
    pub fn max_residual(&self) -> f64 {
        self.homomorphism
            .max(self.unitarity)
            .max(self.irreducibility)
            .max(self.character_orthonormality)
    }
}

fn try_split(group: &Group, rng: &mut ChaCha8Rng, tol: f64) -> Option<Vec<UnitaryIrrep>> {
    let n = group.order;
    let left = group.left_regular_representation();
    let right = group.regular_representation();
    let mut a = zeros(n, n);
    for l in &left {
        let coeff = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        a += l * coeff;
    }
    let a = (&a + a.adjoint()) * re(0.5);
    let (vals, vecs) = hermitian_eigen(&a);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(gr) if (vals[k] - vals[gr[0]]).abs() < 1e-7 => gr.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut found: Vec<UnitaryIrrep> = Vec::new();
    for gr in groups {
        let mut v = zeros(n, gr.len());
        for (c, &k) in gr.iter().enumerate() {
            v.set_column(c, &vecs.column(k));
        }
        let mats: Vec<CMat> = right.iter().map(|u| v.adjoint() * u * &v).collect();
        let ch = character_of(&mats);
        if (char_inner(group, &ch, &ch).re - 1.0).abs() > 1e-6 {
            return None;
        }
        if found.iter().any(|r| {
            r.character.iter().zip(&ch).all(|(x, y)| (x - y).norm() < 1e-6)
        }) {
            continue;
        }
        let mats = unitarize(&mats);
        let character = character_of(&mats);
        found.push(UnitaryIrrep { class_index: 0, dim: gr.len(), matrices: mats, character });
    }
    let sum_sq: usize = found.iter().map(|r| r.dim * r.dim).sum();
    if sum_sq != n || found.len() != group.conjugacy_classes().len() {
        return None;
    }
    let worst = found
        .iter()
        .flat_map(|r| {
            (0..n).flat_map(move |a| (0..n).map(move |b| (r, a, b)))
        })
        .map(|(r, a, b)| dist_frob(&(&r.matrices[a] * &r.matrices[b]), &r.matrices[group.mul(a, b)]))
        .fold(0.0, f64::max);
    if worst > tol {
        return None;
    }
    Some(found)
}

/// A family `v(π) ∈ M_n ⊗ B(H_π)` indexed by the classes of Ĝ (leg order `M_n`, then `H_π`).
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub n: usize,
    pub blocks: Vec<CMat>,
}

impl Family {
    pub fn identity(dual: &Dual, n: usize) -> Family {
        Family { n, blocks: dual.dims().iter().map(|&d| eye(n * d)).collect() }
    }

    pub fn get(&self, pi: usize) -> &CMat {
        &self.blocks[pi]
    }

    /// The `M_n`-valued entry `v(π)_ij`.
    pub fn entry(&self, pi: usize, i: usize, j: usize) -> CMat {
        let d = self.blocks[pi].nrows() / self.n;
        block(&self.blocks[pi], d, i, j)
    }

    pub fn adjoint(&self) -> Family {
        Family { n: self.n, blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    /// Pointwise product `v(π) w(π)`.
    pub fn mul(&self, other: &Family) -> Family {
        Family { n: self.n, blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn max_distance(&self, other: &Family) -> f64 {
        max_or_zero(self.blocks.iter().zip(&other.blocks).map(|(a, b)| dist2(a, b)))
    }

    /// Seeded random unitary family with `v(𝟏) = 1`.
    pub fn random_unitary(dual: &Dual, n: usize, rng: &mut ChaCha8Rng) -> Family {
        let blocks = dual
            .dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| if k == 0 { eye(n) } else { random_unitary(rng, n * d) })
            .collect();
        Family { n, blocks }
    }

    /// Seeded random unitary family at distance about `eps` from the identity.
    pub fn random_near_identity(dual: &Dual, n: usize, eps: f64, rng: &mut ChaCha8Rng) -> Family {
        let blocks = dual
            .dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if k == 0 {
                    eye(n)
                } else {
                    let h = random_hermitian(rng, n * d);
                    let s = norm2(&h).max(1e-300);
                    hermitian_exp_i(&(h * re(eps / s)))
                }
            })
            .collect();
        Family { n, blocks }
    }
}

/// `exp(i h)` for Hermitian `h`.
pub fn hermitian_exp_i(h: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| C64::from_polar(1.0, v)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Wire format of one irrep: `{"class", "dim", "matrices"}` with entries `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IrrepJson {
    pub class: usize,
    pub dim: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn mat_to_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn mat_from_json(rows: &[Vec<[f64; 2]>]) -> CMat {
    let r = rows.len();
    let c = rows.first().map(|x| x.len()).unwrap_or(0);
    CMat::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

impl Dual {
    pub fn irreps_json(&self) -> Vec<IrrepJson> {
        self.irreps
            .iter()
            .map(|r| IrrepJson { class: r.class_index, dim: r.dim, matrices: r.matrices.iter().map(mat_to_json).collect() })
            .collect()
    }

    pub fn from_irreps_json(group: &Group, irreps: &[IrrepJson], seed: u64, tol: f64) -> Result<Dual, RepError> {
        let mut sorted: Vec<&IrrepJson> = irreps.iter().collect();
        sorted.sort_by_key(|r| r.class);
        let mats = sorted
            .iter()
            .map(|r| r.matrices.iter().map(|m| mat_from_json(m)).collect())
            .collect();
        Dual::from_matrices(group, mats, seed, tol)
    }
}
