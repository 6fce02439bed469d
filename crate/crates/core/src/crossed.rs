//! The crossed product `M ⋊_α Ĝ` realized inside `M_N ⊗ B(ℓ²(G))`.

use std::sync::Arc;

use crate::action::{coaction_image, freeness_solutions, group_algebra_units, probe_elements, DualAction};
use crate::linalg::*;
use crate::rep::{Dual, Family};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrossedError {
    #[error("maps do not form an action (residual {0:.3e})")]
    ActionInvalid(f64),
    #[error("element is not in the crossed product (residual {0:.3e})")]
    NotInAlgebra(f64),
}

/// `α(M) ∨ C⊗ℓ^∞(G)` with `λ_{π_ij} = 1 ⊗ diag(h ↦ π(h⁻¹)_ij)`.
#[derive(Debug, Clone)]
pub struct CrossedProduct {
    pub alpha: DualAction,
    pub dual: Arc<Dual>,
    pub n: usize,
    pub order: usize,
    /// `(π, i, j)` in coefficient order.
    pub labels: Vec<(usize, usize, usize)>,
    /// `λ_{π_ij}` in coefficient order, size `N|G|`.
    pub lambda_entries: Vec<CMat>,
    /// `λ_π = Σ λ_{π_ij} ⊗ e_ij` as a family over the ambient algebra.
    pub lambda: Family,
    units: Vec<Vec<CMat>>,
    tol: f64,
}

/// Report of the structural invariants of a crossed product.
#[derive(Debug, Clone, Default)]
pub struct CrossedReport {
    pub dimension: usize,
    pub basis_rank: usize,
    pub implementing: f64,
    pub representation: f64,
    pub expectation_of_lambda: f64,
    pub jones_projection: f64,
    pub jones_expectation: f64,
}

impl CrossedReport {
    pub fn max_residual(&self) -> f64 {
        self.implementing
            .max(self.representation)
            .max(self.expectation_of_lambda)
            .max(self.jones_projection)
            .max(self.jones_expectation)
    }
}

impl CrossedProduct {
    pub fn build(alpha: &DualAction, tol: f64) -> Result<CrossedProduct, CrossedError> {
        let r = alpha.check().max_residual();
        if r > tol.max(1e-9) {
            return Err(CrossedError::ActionInvalid(r));
        }
        Ok(CrossedProduct::build_unchecked(alpha, tol))
    }

    pub fn build_unchecked(alpha: &DualAction, tol: f64) -> CrossedProduct {
        let dual = alpha.dual.clone();
        let g = &dual.group;
        let order = g.order;
        let n = alpha.n;
        let labels = dual.coefficient_labels();
        let lambda_entries: Vec<CMat> = labels
            .iter()
            .map(|&(p, i, j)| {
                let diag = CMat::from_fn(order, order, |r, c| {
                    if r == c {
                        dual.irreps[p].matrices[g.inv(r)][(i, j)]
                    } else {
                        ZERO
                    }
                });
                kron(&eye(n), &diag)
            })
            .collect();
        let mut blocks = Vec::new();
        let mut at = 0;
        for pi in 0..dual.num_classes() {
            let d = dual.d(pi);
            blocks.push(from_blocks(&lambda_entries[at..at + d * d], d));
            at += d * d;
        }
        let units = group_algebra_units(&dual);
        CrossedProduct {
            alpha: alpha.clone(),
            lambda: Family { n: n * order, blocks },
            dual,
            n,
            order,
            labels,
            lambda_entries,
            units,
            tol,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n * self.n * self.order
    }

    pub fn ambient_dim(&self) -> usize {
        self.n * self.order
    }

    fn label_position(&self, pi: usize, i: usize, j: usize) -> usize {
        self.labels.iter().position(|&l| l == (pi, i, j)).expect("valid label")
    }

    /// `λ_{π_ij}` as an ambient matrix.
    pub fn lambda_entry(&self, pi: usize, i: usize, j: usize) -> &CMat {
        &self.lambda_entries[self.label_position(pi, i, j)]
    }

    /// The copy `α(x)` of `x ∈ M`.
    pub fn embed(&self, x: &CMat) -> CMat {
        coaction_image(&self.alpha, &self.units, x)
    }

    /// `Σ α(a_k) λ_k` for coefficients in label order.
    pub fn from_coefficients(&self, coeffs: &[CMat]) -> CMat {
        let m = self.ambient_dim();
        let mut out = zeros(m, m);
        for (a, l) in coeffs.iter().zip(&self.lambda_entries) {
            if frob(a) > 0.0 {
                out += self.embed(a) * l;
            }
        }
        out
    }

    /// Dual action `α̂_g = Ad(1 ⊗ l_g)`, realized as an index permutation.
    pub fn dual_action_hat(&self, g: usize, a: &CMat) -> CMat {
        let grp = &self.dual.group;
        let o = self.order;
        let gi = grp.inv(g);
        let perm: Vec<usize> = (0..self.ambient_dim())
            .map(|r| (r / o) * o + grp.mul(gi, r % o))
            .collect();
        CMat::from_fn(a.nrows(), a.ncols(), |r, c| a[(perm[r], perm[c])])
    }

    /// `|G|⁻¹ Σ_g α̂_g(a)`, an element of `α(M)`.
    pub fn average_dual(&self, a: &CMat) -> CMat {
        let mut out = zeros(a.nrows(), a.ncols());
        for g in 0..self.order {
            out += self.dual_action_hat(g, a);
        }
        out / re(self.order as f64)
    }

    /// Inverse of [`CrossedProduct::embed`] on `α(M)`: compression by the uniform vector of `ℓ²(G)`.
    pub fn unembed(&self, y: &CMat) -> CMat {
        let o = self.order;
        let mut out = zeros(self.n, self.n);
        for h in 0..o {
            for k in 0..o {
                out += block(y, o, h, k);
            }
        }
        out / re(o as f64)
    }

    /// `E_M(a)` as an element of `M`.
    pub fn conditional_expectation(&self, a: &CMat) -> CMat {
        self.unembed(&self.average_dual(a))
    }

    /// Coefficients `a_{π,i,j} = dπ E_M(a λ*_{π_ij})`.
    pub fn coefficients(&self, a: &CMat) -> Vec<CMat> {
        self.labels
            .iter()
            .zip(&self.lambda_entries)
            .map(|(&(p, _, _), l)| self.conditional_expectation(&(a * l.adjoint())) * re(self.dual.df(p)))
            .collect()
    }

    /// Coefficients and the reconstruction residual.
    pub fn expand_unchecked(&self, a: &CMat) -> (Vec<CMat>, f64) {
        let coeffs = self.coefficients(a);
        let back = self.from_coefficients(&coeffs);
        let r = dist_frob(&back, a);
        (coeffs, r)
    }

    pub fn expand(&self, a: &CMat) -> Result<Vec<CMat>, CrossedError> {
        let (c, r) = self.expand_unchecked(a);
        if r > self.tol.max(1e-9) * (1.0 + frob(a)) {
            return Err(CrossedError::NotInAlgebra(r));
        }
        Ok(c)
    }

    /// `e = |G|⁻¹ Σ_{π,i} dπ λ_{π_ii}`.
    pub fn jones_projection(&self) -> CMat {
        let m = self.ambient_dim();
        let mut out = zeros(m, m);
        for (&(p, i, j), l) in self.labels.iter().zip(&self.lambda_entries) {
            if i == j {
                out += l * re(self.dual.df(p));
            }
        }
        out / re(self.order as f64)
    }

    /// `b = Σ_{ρ,k} a_{ρ,k,k}` with `a e = b e`.
    pub fn push_down(&self, a: &CMat) -> Result<CMat, CrossedError> {
        let coeffs = self.expand(a)?;
        let mut b = zeros(self.n, self.n);
        for (&(_, i, j), c) in self.labels.iter().zip(&coeffs) {
            if i == j {
                b += c;
            }
        }
        Ok(b)
    }

    /// Basis elements `α(e_ab) λ_k`, ordered label-major.
    pub fn basis(&self) -> Vec<CMat> {
        let n = self.n;
        let embedded: Vec<CMat> = (0..n * n).map(|k| self.embed(&unit(n, k / n, k % n))).collect();
        let mut out = Vec::with_capacity(self.dimension());
        for l in &self.lambda_entries {
            for e in &embedded {
                out.push(e * l);
            }
        }
        out
    }

    /// Numerical rank of the spanning set (expansion uniqueness means this equals `N²|G|`).
    pub fn basis_rank(&self) -> usize {
        let basis = self.basis();
        let m = self.ambient_dim();
        let mut mat = zeros(m * m, basis.len());
        for (k, b) in basis.iter().enumerate() {
            mat.set_column(k, &vec_of(b));
        }
        let gram = mm(&mat.adjoint(), &mat);
        let (vals, _) = hermitian_eigen(&gram);
        let top = vals.last().copied().unwrap_or(0.0);
        vals.iter().filter(|&&v| v > 1e-10 * top.max(1.0)).count()
    }

    pub fn report(&self) -> CrossedReport {
        let dual = &self.dual;
        let mut rep = CrossedReport { dimension: self.dimension(), basis_rank: self.basis_rank(), ..Default::default() };
        for x in probe_elements(self.n) {
            let ax = self.embed(&x);
            for pi in 0..dual.num_classes() {
                let dp = dual.d(pi);
                let lam = &self.lambda.blocks[pi];
                let lhs = lam * kron(&ax, &eye(dp)) * lam.adjoint();
                let img = self.alpha.apply(pi, &x);
                let blocks: Vec<CMat> = (0..dp * dp).map(|k| self.embed(&block(&img, dp, k / dp, k % dp))).collect();
                rep.implementing = rep.implementing.max(dist_frob(&lhs, &from_blocks(&blocks, dp)));
            }
        }
        rep.representation = crate::action::check_representation(dual, &self.lambda).max_residual();
        for (&(p, i, j), l) in self.labels.iter().zip(&self.lambda_entries) {
            let want = if p == 0 && i == j { eye(self.n) } else { zeros(self.n, self.n) };
            rep.expectation_of_lambda = rep.expectation_of_lambda.max(dist_frob(&self.conditional_expectation(l), &want));
        }
        let e = self.jones_projection();
        rep.jones_projection = dist_frob(&(&e * &e), &e).max(dist_frob(&e.adjoint(), &e));
        rep.jones_expectation =
            dist_frob(&self.conditional_expectation(&e), &(eye(self.n) / re(self.order as f64)));
        rep
    }

    /// Basis of `M' ∩ M ⋊ Ĝ` from the ambient commutation equations on the generators of `M`.
    pub fn relative_commutant(&self) -> Vec<CMat> {
        let basis = self.basis();
        let m = self.ambient_dim();
        let [c, s] = clock_shift(self.n);
        let gens = [self.embed(&c), self.embed(&s)];
        let ops: Vec<CMat> = gens
            .iter()
            .map(|x| {
                let mut op = zeros(m * m, basis.len());
                for (k, b) in basis.iter().enumerate() {
                    op.set_column(k, &vec_of(&commutator(x, b)));
                }
                op
            })
            .collect();
        let ns = null_space(&ops, basis.len(), 1e-7);
        (0..ns.ncols())
            .map(|col| {
                let mut a = zeros(m, m);
                for (k, b) in basis.iter().enumerate() {
                    a += b * ns[(k, col)];
                }
                a
            })
            .collect()
    }

    /// `a_π = Σ a_{π,j,i} ⊗ e_ij` from the coefficients of `a`.
    pub fn class_component(&self, coeffs: &[CMat], pi: usize) -> CMat {
        let d = self.dual.d(pi);
        let blocks: Vec<CMat> = (0..d * d)
            .map(|k| coeffs[self.label_position(pi, k % d, k / d)].clone())
            .collect();
        from_blocks(&blocks, d)
    }

    /// Cross-check of the relative commutant against the per-class equations
    /// `(x ⊗ 1) a_π = a_π α_π(x)`.
    pub fn relative_commutant_report(&self) -> RelativeCommutantReport {
        let basis = self.relative_commutant();
        let k = self.dual.num_classes();
        let mut per_class = Vec::with_capacity(k);
        let mut obstruction = Vec::with_capacity(k);
        for pi in 0..k {
            per_class.push(componentwise_solutions(&self.alpha, pi).len());
            obstruction.push(freeness_solutions(&self.alpha, pi).ncols());
        }
        let [c, s] = clock_shift(self.n);
        let mut forward: f64 = 0.0;
        for a in &basis {
            let (coeffs, _) = self.expand_unchecked(a);
            for pi in 0..k {
                let dp = self.dual.d(pi);
                let ap = self.class_component(&coeffs, pi);
                for x in [&c, &s] {
                    let r = dist_frob(&(kron(x, &eye(dp)) * &ap), &(&ap * self.alpha.apply(pi, x)));
                    forward = forward.max(r / frob(a).max(1e-300));
                }
            }
        }
        let mut backward: f64 = 0.0;
        for pi in 0..k {
            let dp = self.dual.d(pi);
            for sol in componentwise_solutions(&self.alpha, pi) {
                let mut coeffs = vec![zeros(self.n, self.n); self.labels.len()];
                for i in 0..dp {
                    for j in 0..dp {
                        coeffs[self.label_position(pi, j, i)] = block(&sol, dp, i, j);
                    }
                }
                let a = self.from_coefficients(&coeffs);
                for x in [&c, &s] {
                    backward = backward.max(frob(&commutator(&self.embed(x), &a)) / frob(&a).max(1e-300));
                }
            }
        }
        RelativeCommutantReport {
            dimension: basis.len(),
            per_class,
            obstruction,
            forward_residual: forward,
            backward_residual: backward,
        }
    }

    /// Dimension of `{a : α̂_g(a) = a ∀g}` inside the crossed product, solved in coefficient space.
    pub fn dual_fixed_point_dimension(&self) -> usize {
        let basis = self.basis();
        let m = self.ambient_dim();
        let ops: Vec<CMat> = (0..self.order)
            .map(|g| {
                let mut op = zeros(m * m, basis.len());
                for (k, b) in basis.iter().enumerate() {
                    op.set_column(k, &vec_of(&(self.dual_action_hat(g, b) - b)));
                }
                op
            })
            .collect();
        null_space(&ops, basis.len(), 1e-7).ncols()
    }

    /// `max ‖α̂_g α̂_h(a) − α̂_{gh}(a)‖` and `max ‖α̂_g ⊗ id(λ_π) − λ_π π(g)‖`.
    pub fn dual_action_report(&self) -> (f64, f64) {
        let grp = &self.dual.group;
        let a = self.jones_projection() + &self.lambda_entries[self.lambda_entries.len() - 1];
        let mut comp: f64 = 0.0;
        let mut lam: f64 = 0.0;
        for g in 0..self.order {
            for h in 0..self.order {
                let lhs = self.dual_action_hat(g, &self.dual_action_hat(h, &a));
                comp = comp.max(dist_frob(&lhs, &self.dual_action_hat(grp.mul(g, h), &a)));
            }
            for pi in 0..self.dual.num_classes() {
                let dp = self.dual.d(pi);
                let lp = &self.lambda.blocks[pi];
                let moved = self.dual_action_hat_tensor(g, lp, dp);
                let want = lp * kron(&eye(self.ambient_dim()), &self.dual.irreps[pi].matrices[g]);
                lam = lam.max(dist_frob(&moved, &want));
            }
        }
        (comp, lam)
    }

    fn dual_action_hat_tensor(&self, g: usize, a: &CMat, d: usize) -> CMat {
        let blocks: Vec<CMat> = (0..d * d).map(|k| self.dual_action_hat(g, &block(a, d, k / d, k % d))).collect();
        from_blocks(&blocks, d)
    }
}

/// Solutions of `(x ⊗ 1) a = a α_π(x)` for all `x`, as matrices in `M_N ⊗ B(H_π)`.
pub fn componentwise_solutions(alpha: &DualAction, pi: usize) -> Vec<CMat> {
    let n = alpha.n;
    let dp = alpha.d(pi);
    let m = n * dp;
    let [c, s] = clock_shift(n);
    let ops: Vec<CMat> = [c, s]
        .iter()
        .map(|x| sandwich_op(&kron(x, &eye(dp)), &eye(m)) - sandwich_op(&eye(m), &alpha.apply(pi, x)))
        .collect();
    let ns = null_space(&ops, m * m, 1e-7);
    (0..ns.ncols()).map(|k| unvec(ns.column(k).as_slice(), m, m)).collect()
}

#[derive(Debug, Clone, Default)]
pub struct RelativeCommutantReport {
    pub dimension: usize,
    /// Solution dimensions of `(x ⊗ 1) a_π = a_π α_π(x)` per class.
    pub per_class: Vec<usize>,
    /// `freeness_obstruction` per class.
    pub obstruction: Vec<usize>,
    pub forward_residual: f64,
    pub backward_residual: f64,
}

impl RelativeCommutantReport {
    pub fn consistent(&self, tol: f64) -> bool {
        let sum: usize = self.per_class.iter().sum();
        let sum_obs: usize = self.obstruction.iter().sum();
        self.dimension == sum && sum == sum_obs && self.forward_residual < tol && self.backward_residual < tol
    }
}
