//! Actions of `Ĝ×Ĝ` through the product group and the quantum double `M ⊂ N`.

use std::sync::Arc;

use crate::action::{check_representation, ActionMaps, DualAction, RepresentationReport};
use crate::crossed::CrossedProduct;
use crate::group::{Group, GroupError};
use crate::linalg::*;
use crate::rep::{Dual, Family, RepError, RepLabel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DoubleError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("not an action of the double dual: {0}")]
    NotDoubleAction(String),
}

/// `Ĝ×Ĝ` realized as the dual of `G×G` with classes `π⊗̂ρ` at index `π·K + ρ`.
#[derive(Debug, Clone)]
pub struct DoubleDual {
    pub base: Arc<Dual>,
    pub dual: Arc<Dual>,
}

impl DoubleDual {
    pub fn build(base: Arc<Dual>, cap: usize) -> Result<DoubleDual, DoubleError> {
        let g = &base.group;
        let gg = g.product(g, cap)?;
        let k = base.num_classes();
        let order = g.order;
        let mats = (0..k * k)
            .map(|q| {
                let (a, b) = (&base.irreps[q / k], &base.irreps[q % k]);
                (0..order * order).map(|x| kron(&a.matrices[x / order], &b.matrices[x % order])).collect()
            })
            .collect();
        let dual = Arc::new(Dual::from_matrices(&gg, mats, base.seed, base.tol)?);
        Ok(DoubleDual { base, dual })
    }

    pub fn class(&self, pi: usize, rho: usize) -> usize {
        pi * self.base.num_classes() + rho
    }

    /// The element `(g, h)` of `G×G`.
    pub fn element(&self, g: usize, h: usize) -> usize {
        g * self.base.order() + h
    }

    pub fn group(&self) -> &Group {
        &self.dual.group
    }

    /// `π ⊗̂ bar(π)` as a label of the double dual.
    pub fn diagonal_label(&self, pi: usize) -> RepLabel {
        RepLabel::tensor(
            RepLabel::Irrep(self.class(pi, 0)),
            RepLabel::bar(RepLabel::Irrep(self.class(0, pi))),
        )
    }
}

/// `α_{π⊗̂ρ} = Ad(u_π^{12} v_ρ^{13})` for two representations with commuting entries.
pub fn double_from_commuting(dd: &DoubleDual, u: &Family, v: &Family, tol: f64) -> Result<DualAction, DoubleError> {
    let k = dd.base.num_classes();
    let blocks = (0..k * k)
        .map(|q| {
            let (pi, rho) = (q / k, q % k);
            let dr = dd.base.d(rho);
            kron(&u.blocks[pi], &eye(dr)) * insert_middle(&v.blocks[rho], dr, dd.base.d(pi))
        })
        .collect();
    DualAction::ad_action(dd.dual.clone(), Family { n: u.n, blocks }, tol)
        .map_err(|e| DoubleError::NotDoubleAction(e.to_string()))
}

/// `(α ⊗̂ β)_{π⊗̂ρ}(x ⊗ y) = α_π(x)^{13} β_ρ(y)^{24}` on `M_N ⊗ M_{N'}`.
pub fn double_tensor(dd: &DoubleDual, alpha: &DualAction, beta: &DualAction) -> DualAction {
    let k = dd.base.num_classes();
    let (n, m) = (alpha.n, beta.n);
    let images = (0..k * k)
        .map(|q| {
            let (pi, rho) = (q / k, q % k);
            let (dp, dr) = (dd.base.d(pi), dd.base.d(rho));
            let ia = alpha.images(pi);
            let ib = beta.images(rho);
            let mut out = vec![zeros(0, 0); n * n * m * m];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..m {
                        for d in 0..m {
                            let x = kron(&ia[a * n + b], &ib[c * m + d]);
                            let idx = (a * m + c) * (n * m) + (b * m + d);
                            out[idx] = permute_legs(&x, &[n, dp, m, dr], &[0, 2, 1, 3]);
                        }
                    }
                }
            }
            out
        })
        .collect();
    DualAction { dual: dd.dual.clone(), n: n * m, maps: ActionMaps::Images(images) }
}

/// `(α_{bar(π)})^opp` on `M^opp`, realized on `M_N` through the transpose.
pub fn opposite_action(alpha: &DualAction) -> DualAction {
    let dual = alpha.dual.clone();
    let n = alpha.n;
    let images = (0..dual.num_classes())
        .map(|pi| {
            let bar = RepLabel::bar(RepLabel::Irrep(pi));
            (0..n * n).map(|q| alpha.apply_label(&bar, &unit(n, q % n, q / n)).transpose()).collect()
        })
        .collect();
    DualAction { dual, n, maps: ActionMaps::Images(images) }
}

/// The unitaries `w_{π_ij} = Σ_k λ_{π_ik ⊗̂ bar(π)_jk}` and the factors
/// `v_{π_ij} = λ_{π_ij ⊗̂ 𝟏}`, `u_{π_ij} = λ_{𝟏 ⊗̂ bar(π)_ji}`.
#[derive(Debug, Clone)]
pub struct DoubleUnitary {
    pub w: Family,
    pub v: Family,
    pub u: Family,
}

pub fn double_unitary(dd: &DoubleDual, cp: &CrossedProduct) -> Result<DoubleUnitary, DoubleError> {
    if cp.dual.order() != dd.dual.order() || cp.dual.num_classes() != dd.dual.num_classes() {
        return Err(DoubleError::NotDoubleAction(format!(
            "crossed product is over a dual of order {}, expected {}",
            cp.dual.order(),
            dd.dual.order()
        )));
    }
    let base = &dd.base;
    let m = cp.ambient_dim();
    let mut w = Vec::new();
    let mut v = Vec::new();
    let mut u = Vec::new();
    for pi in 0..base.num_classes() {
        let dp = base.d(pi);
        let lam = dd.dual.extend_family(&cp.lambda, &dd.diagonal_label(pi));
        let mut entries = Vec::with_capacity(dp * dp);
        for i in 0..dp {
            for j in 0..dp {
                let mut acc = zeros(m, m);
                for k in 0..dp {
                    acc += block(&lam, dp * dp, i * dp + j, k * dp + k);
                }
                entries.push(acc);
            }
        }
        w.push(from_blocks(&entries, dp));
        v.push(cp.lambda.blocks[dd.class(pi, 0)].clone());
        let lb = dd.dual.extend_family(&cp.lambda, &RepLabel::bar(RepLabel::Irrep(dd.class(0, pi))));
        let ut: Vec<CMat> = (0..dp * dp).map(|q| block(&lb, dp, q % dp, q / dp)).collect();
        u.push(from_blocks(&ut, dp));
    }
    Ok(DoubleUnitary {
        w: Family { n: m, blocks: w },
        v: Family { n: m, blocks: v },
        u: Family { n: m, blocks: u },
    })
}

#[derive(Debug, Clone, Default)]
pub struct DoubleReport {
    pub representation: RepresentationReport,
    pub u_representation: RepresentationReport,
    /// Largest `‖β_{g,g}(w_{π_ij}) − w_{π_ij}‖₂`.
    pub invariance: f64,
    /// `w = vu` and `[v, u] = 0`.
    pub factorization: f64,
    /// `dim N` from the rank of the `w` coefficients in the label space.
    pub dimension: usize,
    /// Dimension of the `β_{g,g}` fixed points from a separate null-space solve.
    pub fixed_dimension: usize,
    /// Fixed points solved in the ambient algebra, when small enough.
    pub ambient_fixed_dimension: Option<usize>,
    /// Largest `‖E(w_{π_ij}) − δ_{π,𝟏}δ_ij‖₂`.
    pub expectation: f64,
}

/// The inclusion `M ⊂ N = M ∨ {w_{π_ij}}` inside the crossed product by `Ĝ×Ĝ`.
#[derive(Debug, Clone)]
pub struct QuantumDouble {
    pub dd: DoubleDual,
    pub cp: CrossedProduct,
    pub units: DoubleUnitary,
    labels: Vec<(usize, usize, usize)>,
}

impl QuantumDouble {
    pub fn build(dd: &DoubleDual, alpha: &DualAction, tol: f64) -> Result<QuantumDouble, DoubleError> {
        let cp = CrossedProduct::build(alpha, tol).map_err(|e| DoubleError::NotDoubleAction(e.to_string()))?;
        let units = double_unitary(dd, &cp)?;
        Ok(QuantumDouble { labels: dd.base.coefficient_labels(), dd: dd.clone(), cp, units })
    }

    fn w_entry(&self, pi: usize, i: usize, j: usize) -> CMat {
        self.units.w.entry(pi, i, j)
    }

    /// `E(a)`, the `M`-part of `a ∈ N`.
    pub fn expectation(&self, a: &CMat) -> CMat {
        self.cp.conditional_expectation(a)
    }

    /// `a_{π,i,j} = dπ E(a w*_{π_ij})` and the reconstruction residual.
    pub fn expand(&self, a: &CMat) -> (Vec<CMat>, f64) {
        let coeffs: Vec<CMat> = self
            .labels
            .iter()
            .map(|&(p, i, j)| self.expectation(&(a * self.w_entry(p, i, j).adjoint())) * re(self.dd.base.df(p)))
            .collect();
        let back = self.from_coefficients(&coeffs);
        (coeffs.clone(), dist2(&back, a))
    }

    pub fn from_coefficients(&self, coeffs: &[CMat]) -> CMat {
        let m = self.cp.ambient_dim();
        let mut out = zeros(m, m);
        for (&(p, i, j), c) in self.labels.iter().zip(coeffs) {
            if frob(c) > 0.0 {
                out += self.cp.embed(c) * self.w_entry(p, i, j);
            }
        }
        out
    }

    pub fn dimension(&self) -> usize {
        self.cp.n * self.cp.n * self.dd.base.order()
    }

    /// Coefficient vector of `w_{π_ij}` over the labels of `Ĝ×Ĝ`.
    fn w_label_vector(&self, pi: usize, i: usize, j: usize) -> Vec<C64> {
        let dd = &self.dd;
        let dp = dd.base.d(pi);
        let labels = dd.dual.coefficient_labels();
        let mut out = vec![ZERO; labels.len()];
        for (c, ts) in dd.dual.decompose(&dd.diagonal_label(pi)).iter() {
            for t in ts {
                for (pos, &(cl, a, b)) in labels.iter().enumerate() {
                    if cl != *c {
                        continue;
                    }
                    for k in 0..dp {
                        out[pos] += t[(i * dp + j, a)] * t[(k * dp + k, b)].conj();
                    }
                }
            }
        }
        out
    }

    /// Matrix of `β_{(g,h)}` on label coefficients: `λ_{η_ab} ↦ Σ_k λ_{η_ak} η(g,h)_kb`.
    fn label_action(&self, x: usize) -> CMat {
        let dual = &self.dd.dual;
        let labels = dual.coefficient_labels();
        let pos = |c: usize, a: usize, b: usize| labels.iter().position(|&l| l == (c, a, b)).unwrap();
        let mut r = zeros(labels.len(), labels.len());
        for (col, &(c, a, b)) in labels.iter().enumerate() {
            let m = &dual.irreps[c].matrices[x];
            for k in 0..dual.d(c) {
                r[(pos(c, a, k), col)] += m[(k, b)];
            }
        }
        r
    }

    pub fn report(&self) -> DoubleReport {
        let base = self.dd.base.clone();
        let g = base.order();
        let n2 = self.cp.n * self.cp.n;
        let mut rep = DoubleReport {
            representation: check_representation(&base, &self.units.w),
            u_representation: check_representation(&base, &self.units.u),
            ..Default::default()
        };
        for &(p, i, j) in &self.labels {
            let w = self.w_entry(p, i, j);
            for x in 0..g {
                let moved = self.cp.dual_action_hat(self.dd.element(x, x), &w);
                rep.invariance = rep.invariance.max(dist2(&moved, &w));
            }
            let dp = base.d(p);
            let mut vu = zeros(w.nrows(), w.ncols());
            for k in 0..dp {
                vu += self.units.v.entry(p, i, k) * self.units.u.entry(p, k, j);
            }
            rep.factorization = rep.factorization.max(dist2(&vu, &w));
            for &(q, k, l) in &self.labels {
                let c = commutator(&self.units.v.entry(p, i, j), &self.units.u.entry(q, k, l));
                rep.factorization = rep.factorization.max(norm2(&c));
            }
            let want = if p == 0 && i == j { eye(self.cp.n) } else { zeros(self.cp.n, self.cp.n) };
            rep.expectation = rep.expectation.max(dist2(&self.expectation(&w), &want));
        }
        let vectors: Vec<Vec<C64>> = self.labels.iter().map(|&(p, i, j)| self.w_label_vector(p, i, j)).collect();
        let len = vectors[0].len();
        let span = CMat::from_fn(len, vectors.len(), |r, c| vectors[c][r]);
        rep.dimension = n2 * numerical_rank(&span);
        let ops: Vec<CMat> = (0..g).map(|x| self.label_action(self.dd.element(x, x)) - eye(len)).collect();
        rep.fixed_dimension = n2 * null_space(&ops, len, 1e-6).ncols();
        if self.cp.dimension() <= 400 {
            rep.ambient_fixed_dimension = Some(self.ambient_fixed_dimension());
        }
        rep
    }

    /// Rank of the diagonal average `|G|⁻¹ Σ_g β_{g,g}` on the crossed-product basis.
    fn ambient_fixed_dimension(&self) -> usize {
        let g = self.dd.base.order();
        let basis = self.cp.basis();
        let m = self.cp.ambient_dim();
        let mut mat = zeros(m * m, basis.len());
        for (k, b) in basis.iter().enumerate() {
            let mut avg = zeros(m, m);
            for x in 0..g {
                avg += self.cp.dual_action_hat(self.dd.element(x, x), b);
            }
            mat.set_column(k, &vec_of(&(avg / re(g as f64))));
        }
        numerical_rank(&mat)
    }
}

fn numerical_rank(a: &CMat) -> usize {
    let gram = mm(&a.adjoint(), a);
    let (vals, _) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0);
    vals.iter().filter(|&&v| v > 1e-10 * top.max(1.0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::model_representation;

    fn base(name: &str) -> Arc<Dual> {
        Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
    }

    #[test]
    fn double_dual_shapes() {
        let dd = DoubleDual::build(base("Z2"), 64).unwrap();
        assert_eq!(dd.dual.num_classes(), 4);
        assert!(dd.dual.dims().iter().all(|&d| d == 1));
        let dd = DoubleDual::build(base("S3"), 64).unwrap();
        assert_eq!(dd.dual.num_classes(), 9);
        let dims: usize = dd.dual.dims().iter().map(|d| d * d).sum();
        assert_eq!(dims, 36);
        assert_eq!(dd.dual.d(dd.class(2, 2)), 4);
        assert!(matches!(DoubleDual::build(base("S4"), 64), Err(DoubleError::Group(_))));
        let t = DoubleDual::build(base("trivial"), 64).unwrap();
        assert_eq!(t.dual.order(), 1);
    }

    #[test]
    fn trivial_action_on_scalars() {
        for name in ["trivial", "Z2", "S3"] {
            let b = base(name);
            let dd = DoubleDual::build(b.clone(), 64).unwrap();
            let qd = QuantumDouble::build(&dd, &DualAction::trivial(dd.dual.clone(), 1), 1e-9).unwrap();
            let rep = qd.report();
            assert!(rep.representation.max_residual() < 1e-9, "{name}");
            assert!(rep.invariance < 1e-10 && rep.factorization < 1e-10 && rep.expectation < 1e-10);
            assert!(rep.u_representation.max_residual() < 1e-9);
            assert_eq!(rep.dimension, b.order());
            assert_eq!(rep.fixed_dimension, b.order());
            assert_eq!(rep.ambient_fixed_dimension, Some(b.order()));
        }
    }

    #[test]
    fn model_type_double_action() {
        let b = base("S3");
        let dd = DoubleDual::build(b.clone(), 64).unwrap();
        let lam = model_representation(&b);
        let alpha = double_from_commuting(&dd, &lam, &lam, 1e-9).unwrap();
        let qd = QuantumDouble::build(&dd, &alpha, 1e-9).unwrap();
        let rep = qd.report();
        assert!(rep.representation.max_residual() < 1e-8);
        assert!(rep.invariance < 1e-8 && rep.factorization < 1e-9);
        assert_eq!(rep.dimension, 36 * 6);
        assert_eq!(rep.dimension, rep.fixed_dimension);
    }

    #[test]
    fn opposite_and_combined() {
        let b = base("Z2");
        let alpha = crate::model::product_model_action(b.clone(), 1, 256).unwrap().action;
        let opp = opposite_action(&alpha);
        assert!(opp.check().pass(1e-9));
        let s3 = base("S3");
        let m = crate::model::product_model_action(s3.clone(), 1, 256).unwrap().action;
        assert!(opposite_action(&m).check().pass(1e-9));
        let triv = DualAction::trivial(b.clone(), 2);
        assert!(opposite_action(&triv).check().pass(1e-12));
        let dd = DoubleDual::build(b.clone(), 64).unwrap();
        let both = double_tensor(&dd, &alpha, &opp);
        assert!(both.check().pass(1e-9));
        let qd = QuantumDouble::build(&dd, &both, 1e-9).unwrap();
        let rep = qd.report();
        assert!(rep.representation.max_residual() < 1e-9 && rep.invariance < 1e-9);
        assert_eq!(rep.dimension, rep.fixed_dimension);
        assert_eq!(rep.ambient_fixed_dimension, Some(rep.dimension));
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let coeffs: Vec<CMat> = (0..2).map(|_| random_matrix(&mut rng, 4, 4)).collect();
        let a = qd.from_coefficients(&coeffs);
        let (back, r) = qd.expand(&a);
        assert!(r < 1e-10);
        assert!(back.iter().zip(&coeffs).all(|(x, y)| dist_frob(x, y) < 1e-10));
    }
}
