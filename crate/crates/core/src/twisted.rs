//! The twisted crossed product `M ⋊_{α,U} Ĝ` acting on `L²(M) ⊗ ℓ²(Ĝ)`.
//!
//! A vector is a family `v(π) ∈ L²(M) ⊗ B(H_π)`, stored as an `N dπ × N dπ` matrix with
//! leg order `(M, H_π)`. Coordinates are orthonormal for `⟨v,w⟩ = Σ dπ τ⊗Tr(w(π)* v(π))`,
//! so block `π` carries the scale `√(dπ/N)`.

use std::sync::Arc;

use crate::action::probe_elements;
use crate::cocycle::{alpha_rect, rect_block, TwistedAction};
use crate::crossed::CrossedProduct;
use crate::linalg::*;
use crate::rep::{Dual, Family, RepLabel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TwistedError {
    #[error("twisted action is invalid (residual {0:.3e})")]
    TwistedActionInvalid(f64),
    #[error("element is not in the twisted crossed product (residual {0:.3e})")]
    NotInAlgebra(f64),
}

#[derive(Debug, Clone)]
pub struct TwistedCrossedProduct {
    pub ta: TwistedAction,
    pub dual: Arc<Dual>,
    pub n: usize,
    /// Coordinate offset of each block.
    pub offsets: Vec<usize>,
    pub labels: Vec<(usize, usize, usize)>,
    pub lambda_entries: Vec<CMat>,
    pub lambda: Family,
}

#[derive(Debug, Clone, Default)]
pub struct TwistedProductReport {
    pub dimension: usize,
    pub unitarity: f64,
    pub implementing: f64,
    pub product: f64,
    pub conjugate: f64,
    pub expectation: f64,
    pub conjugate_identity: f64,
    pub conjugate_identity_intermediate: f64,
}

impl TwistedProductReport {
    pub fn max_residual(&self) -> f64 {
        self.unitarity
            .max(self.implementing)
            .max(self.product)
            .max(self.conjugate)
            .max(self.expectation)
            .max(self.conjugate_identity)
            .max(self.conjugate_identity_intermediate)
    }
}

impl TwistedCrossedProduct {
    pub fn build(ta: &TwistedAction, tol: f64) -> Result<TwistedCrossedProduct, TwistedError> {
        let r = ta.check().max_residual();
        if r > tol.max(1e-9) {
            return Err(TwistedError::TwistedActionInvalid(r));
        }
        Ok(TwistedCrossedProduct::build_unchecked(ta))
    }

    pub fn build_unchecked(ta: &TwistedAction) -> TwistedCrossedProduct {
        let dual = ta.dual().clone();
        let n = ta.n();
        let k = dual.num_classes();
        let mut offsets = Vec::with_capacity(k + 1);
        let mut at = 0;
        for pi in 0..k {
            offsets.push(at);
            at += n * n * dual.d(pi) * dual.d(pi);
        }
        offsets.push(at);
        let labels = dual.coefficient_labels();
        let mut tcp = TwistedCrossedProduct {
            ta: ta.clone(),
            dual: dual.clone(),
            n,
            offsets,
            labels: labels.clone(),
            lambda_entries: Vec::new(),
            lambda: Family { n: at, blocks: Vec::new() },
        };
        tcp.lambda_entries = labels.iter().map(|&(p, i, j)| tcp.build_lambda(p, i, j)).collect();
        let mut pos = 0;
        for pi in 0..k {
            let d = dual.d(pi);
            tcp.lambda.blocks.push(from_blocks(&tcp.lambda_entries[pos..pos + d * d], d));
            pos += d * d;
        }
        tcp
    }

    /// Size of the ambient space, `N²|G|`.
    pub fn ambient_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn dimension(&self) -> usize {
        self.n * self.n * self.dual.order()
    }

    fn scale(&self, pi: usize) -> f64 {
        (self.dual.df(pi) / self.n as f64).sqrt()
    }

    /// `(λ_{π_ij} v)(ρ) = Σ_{σ,e} U^{σ,e}_{ρ,π_i} v(σ) T^{σ,e*}_{ρ,π_j}`.
    fn build_lambda(&self, pi: usize, i: usize, j: usize) -> CMat {
        let dual = &self.dual;
        let n = self.n;
        let dp = dual.d(pi);
        let m = self.ambient_dim();
        let mut out = zeros(m, m);
        for rho in 0..dual.num_classes() {
            let dr = dual.d(rho);
            for (sigma, ts) in dual.fusion(rho, pi).iter() {
                let ds = dual.d(*sigma);
                for t in ts {
                    let ut = self.ta.get(rho, pi) * lift(n, t);
                    let a = CMat::from_fn(n * dr, n * ds, |r, c| ut[((r / dr) * dr * dp + (r % dr) * dp + i, c)]);
                    let tj = CMat::from_fn(ds, dr, |r, c| t[(c * dp + j, r)].conj());
                    let op = sandwich_op(&a, &lift(n, &tj)) * re(self.scale(rho) / self.scale(*sigma));
                    let (r0, c0) = (self.offsets[rho], self.offsets[*sigma]);
                    let mut view = out.view_mut((r0, c0), (op.nrows(), op.ncols()));
                    view += &op;
                }
            }
        }
        out
    }

    /// The copy `α(a)`: left multiplication by `α_π(a)` on each block.
    pub fn alpha_op(&self, a: &CMat) -> CMat {
        let m = self.ambient_dim();
        let mut out = zeros(m, m);
        for pi in 0..self.dual.num_classes() {
            let dp = self.dual.d(pi);
            let op = sandwich_op(&self.ta.alpha.apply(pi, a), &eye(self.n * dp));
            let o = self.offsets[pi];
            out.view_mut((o, o), (op.nrows(), op.ncols())).copy_from(&op);
        }
        out
    }

    /// `E(x) = P x P*` with `P` the compression to the `𝟏` block, read back as an element of `M`.
    pub fn expectation(&self, x: &CMat) -> CMat {
        let n = self.n;
        let comp = x.view((0, 0), (n * n, n * n));
        let one = vec_of(&eye(n));
        let img = comp * one;
        unvec(img.as_slice(), n, n)
    }

    /// `a_{π,i,j} = dπ E(a λ*_{π_ij})`.
    pub fn coefficients(&self, a: &CMat) -> Vec<CMat> {
        let n = self.n;
        // only the 𝟏 block of a λ* is read by E
        let top = a.rows(0, n * n).into_owned();
        self.labels
            .iter()
            .zip(&self.lambda_entries)
            .map(|(&(p, _, _), l)| self.expectation(&(&top * l.adjoint())) * re(self.dual.df(p)))
            .collect()
    }

    /// Coefficients and the reconstruction residual.
    pub fn expand_unchecked(&self, a: &CMat) -> (Vec<CMat>, f64) {
        let coeffs = self.coefficients(a);
        let back = self.from_coefficients(&coeffs);
        let r = dist2(&back, a);
        (coeffs, r)
    }

    pub fn expand(&self, a: &CMat) -> Result<Vec<CMat>, TwistedError> {
        let (c, r) = self.expand_unchecked(a);
        if r > 1e-8 {
            return Err(TwistedError::NotInAlgebra(r));
        }
        Ok(c)
    }

    pub fn from_coefficients(&self, coeffs: &[CMat]) -> CMat {
        let m = self.ambient_dim();
        let mut out = zeros(m, m);
        for (c, l) in coeffs.iter().zip(&self.lambda_entries) {
            if frob(c) > 0.0 {
                out += self.alpha_op(c) * l;
            }
        }
        out
    }

    /// `(α ⊗ id)(y)` for `y ∈ M_N ⊗ B(C^c, C^r)`.
    fn alpha_op_rect(&self, y: &CMat, r: usize, c: usize) -> CMat {
        let m = self.ambient_dim();
        let mut out = zeros(m * r, m * c);
        for k in 0..r {
            for l in 0..c {
                let mut e = zeros(r, c);
                e[(k, l)] = ONE;
                out += kron(&self.alpha_op(&rect_block(y, r, c, k, l)), &e);
            }
        }
        out
    }

    /// `Ũ_{A_a, B_b} = Σ_m U_{A_am, B_bm}` for the extended cocycle `U_{A,B}`.
    fn u_tilde(&self, a: &RepLabel, b: &RepLabel) -> Vec<CMat> {
        let u = self.ta.u_label(a, b);
        let d = self.dual.label_dim(a);
        (0..d * d)
            .map(|q| {
                let (x, y) = (q / d, q % d);
                let mut acc = zeros(self.n, self.n);
                for m in 0..d {
                    acc += block(&u, d * d, x * d + y, m * d + m);
                }
                acc
            })
            .collect()
    }

    /// Residuals of `Σ_{k,l} Ũ*_{π_k,π̄_l} α_π(Ũ_{π̄_l,π_i})_{k,j} = δ_ij` and of
    /// `(U^{𝟏*}_{π,π̄}⊗1)(α_π⊗id)(U^𝟏_{π̄,π}) = 1/dπ`.
    pub fn conjugate_identity(&self, pi: usize) -> (f64, f64) {
        let dual = &self.dual;
        let n = self.n;
        let dp = dual.d(pi);
        let p = RepLabel::Irrep(pi);
        let pb = RepLabel::bar(p.clone());
        let ut_ppb = self.u_tilde(&p, &pb);
        let ut_pbp = self.u_tilde(&pb, &p);
        let mut worst: f64 = 0.0;
        let images: Vec<CMat> = ut_pbp.iter().map(|x| self.ta.alpha.apply(pi, x)).collect();
        for i in 0..dp {
            for j in 0..dp {
                let mut acc = zeros(n, n);
                for k in 0..dp {
                    for l in 0..dp {
                        acc += ut_ppb[k * dp + l].adjoint() * block(&images[l * dp + i], dp, k, j);
                    }
                }
                let want = if i == j { eye(n) } else { zeros(n, n) };
                worst = worst.max(dist2(&acc, &want));
            }
        }
        let t1 = dual.canonical_dual_isometry(pi);
        let u1 = self.ta.u_label(&p, &pb) * lift(n, &t1);
        let u1b = self.ta.u_label(&pb, &p) * lift(n, &t1);
        let lhs = kron(&u1.adjoint(), &eye(dp)) * alpha_rect(&self.ta.alpha, pi, &u1b, dp * dp, 1);
        let mid = dist2(&lhs, &(eye(n * dp) * re(1.0 / dp as f64)));
        (worst, mid)
    }

    pub fn report(&self) -> TwistedProductReport {
        let dual = self.dual.clone();
        let n = self.n;
        let m = self.ambient_dim();
        let k = dual.num_classes();
        let mut rep = TwistedProductReport { dimension: self.dimension(), ..Default::default() };
        rep.unitarity = max_or_zero(self.lambda.blocks.iter().map(unitarity_residual));
        for x in probe_elements(n) {
            let ax = self.alpha_op(&x);
            for pi in 0..k {
                let dp = dual.d(pi);
                let lam = &self.lambda.blocks[pi];
                let lhs = lam * kron(&ax, &eye(dp)) * lam.adjoint();
                let img = self.ta.alpha.apply(pi, &x);
                let blocks: Vec<CMat> = (0..dp * dp).map(|q| self.alpha_op(&block(&img, dp, q / dp, q % dp))).collect();
                rep.implementing = rep.implementing.max(dist2(&lhs, &from_blocks(&blocks, dp)));
            }
        }
        for pi in 0..k {
            for rho in 0..k {
                let (dp, dr) = (dual.d(pi), dual.d(rho));
                let lhs = kron(&self.lambda.blocks[pi], &eye(dr)) * insert_middle(&self.lambda.blocks[rho], dr, dp);
                for (sigma, ts) in dual.fusion(pi, rho).iter() {
                    let ds = dual.d(*sigma);
                    for t in ts {
                        let ut = self.ta.get(pi, rho) * lift(n, t);
                        let rhs = self.alpha_op_rect(&ut, dp * dr, ds) * &self.lambda.blocks[*sigma];
                        rep.product = rep.product.max(dist2(&(&lhs * lift(m, t)), &rhs));
                    }
                }
            }
        }
        for pi in 0..k {
            let dp = dual.d(pi);
            let lam_bar = dual.extend_family(&self.lambda, &RepLabel::bar(RepLabel::Irrep(pi)));
            let ut = self.u_tilde(&RepLabel::Irrep(pi), &RepLabel::bar(RepLabel::Irrep(pi)));
            for i in 0..dp {
                for j in 0..dp {
                    let lhs = block(&lam_bar, dp, i, j).adjoint();
                    let mut rhs = zeros(m, m);
                    for kk in 0..dp {
                        rhs += self.alpha_op(&ut[kk * dp + i]).adjoint() * &self.lambda_entries[self.position(pi, kk, j)];
                    }
                    rep.conjugate = rep.conjugate.max(dist2(&lhs, &rhs));
                }
            }
            let (a, b) = self.conjugate_identity(pi);
            rep.conjugate_identity = rep.conjugate_identity.max(a);
            rep.conjugate_identity_intermediate = rep.conjugate_identity_intermediate.max(b);
        }
        for (&(p, i, j), l) in self.labels.iter().zip(&self.lambda_entries) {
            let want = if p == 0 && i == j { eye(n) } else { zeros(n, n) };
            rep.expectation = rep.expectation.max(dist2(&self.expectation(l), &want));
        }
        rep
    }

    fn position(&self, pi: usize, i: usize, j: usize) -> usize {
        self.labels.iter().position(|&l| l == (pi, i, j)).expect("valid label")
    }

    /// Expansion coefficients of `λ_k λ_l` for every pair of labels.
    pub fn structure_constants(&self) -> Vec<Vec<CMat>> {
        let mut out = Vec::new();
        for a in &self.lambda_entries {
            for b in &self.lambda_entries {
                out.push(self.coefficients(&(a * b)));
            }
        }
        out
    }
}

/// Largest difference between the structure constants of the twisted product with `U = 1`
/// and the crossed product, on `λ_k λ_l` and `λ_k α(x)`.
pub fn untwisted_comparison(tcp: &TwistedCrossedProduct, cp: &CrossedProduct) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, ca) in tcp.lambda_entries.iter().zip(&cp.lambda_entries) {
        for (b, cb) in tcp.lambda_entries.iter().zip(&cp.lambda_entries) {
            let x = tcp.coefficients(&(a * b));
            let y = cp.coefficients(&(ca * cb));
            worst = worst.max(max_or_zero(x.iter().zip(&y).map(|(p, q)| dist2(p, q))));
        }
        for probe in probe_elements(tcp.n) {
            let x = tcp.coefficients(&(a * tcp.alpha_op(&probe)));
            let y = cp.coefficients(&(ca * cp.embed(&probe)));
            worst = worst.max(max_or_zero(x.iter().zip(&y).map(|(p, q)| dist2(p, q))));
        }
    }
    worst
}

/// For `ta = (Ad w α, ∂_{Ad w α}(w))`: the elements `μ_π = w_π λ_π` of the crossed product by `α`
/// satisfy the relations of the twisted generators. Returns the largest deviation of
/// `μ_k μ_l` and `μ_k α(x)` from the twisted structure constants.
pub fn perturbation_comparison(tcp: &TwistedCrossedProduct, cp: &CrossedProduct, w: &Family) -> f64 {
    let dual = &cp.dual;
    let mut mu_entries = Vec::with_capacity(cp.labels.len());
    for &(p, i, j) in &cp.labels {
        let dp = dual.d(p);
        let mut acc = zeros(cp.ambient_dim(), cp.ambient_dim());
        for k in 0..dp {
            acc += cp.embed(&w.entry(p, i, k)) * cp.lambda_entry(p, k, j);
        }
        mu_entries.push(acc);
    }
    let rebuild = |coeffs: &[CMat]| {
        let mut out = zeros(cp.ambient_dim(), cp.ambient_dim());
        for (c, mu) in coeffs.iter().zip(&mu_entries) {
            if frob(c) > 0.0 {
                out += cp.embed(c) * mu;
            }
        }
        out
    };
    let mut worst: f64 = 0.0;
    for (ka, a) in tcp.lambda_entries.iter().enumerate() {
        for (kb, b) in tcp.lambda_entries.iter().enumerate() {
            let x = tcp.coefficients(&(a * b));
            worst = worst.max(dist2(&(&mu_entries[ka] * &mu_entries[kb]), &rebuild(&x)));
        }
        for probe in probe_elements(tcp.n) {
            let x = tcp.coefficients(&(a * tcp.alpha_op(&probe)));
            worst = worst.max(dist2(&(&mu_entries[ka] * cp.embed(&probe)), &rebuild(&x)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::DualAction;
    use crate::cocycle::cocycle_from_perturbation;
    use crate::group::Group;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dual(name: &str) -> Arc<Dual> {
        Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
    }

    fn perturbed(name: &str, seed: u64) -> (DualAction, Family, TwistedAction) {
        let d = dual(name);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, 2);
        let v = crate::rep::hermitian_exp_i(&h);
        // Ad of the representation p_e ⊗ π(e) + p_g ⊗ π(g), rotated by v
        let blocks = d
            .irreps
            .iter()
            .map(|r| kron(&unit(2, 0, 0), &r.matrices[0]) + kron(&unit(2, 1, 1), &r.matrices[1]))
            .collect();
        let alpha = DualAction::ad_action(d.clone(), Family { n: 2, blocks }, 1e-9).unwrap().conjugate_by(&v);
        let w = Family::random_unitary(&d, 2, &mut rng);
        let ta = cocycle_from_perturbation(&alpha, &w).unwrap();
        (alpha, w, ta)
    }

    #[test]
    fn invariants_for_perturbation_cocycles() {
        for name in ["Z3", "S3"] {
            let (_, _, ta) = perturbed(name, 1);
            let tcp = TwistedCrossedProduct::build(&ta, 1e-9).unwrap();
            assert_eq!(tcp.ambient_dim(), 4 * tcp.dual.order());
            let rep = tcp.report();
            assert!(rep.max_residual() < 1e-9, "{name}: {rep:?}");
        }
    }

    #[test]
    fn expansion_round_trip() {
        let (_, _, ta) = perturbed("S3", 2);
        let tcp = TwistedCrossedProduct::build(&ta, 1e-9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<CMat> = tcp.labels.iter().map(|_| random_matrix(&mut rng, 2, 2)).collect();
        let a = tcp.from_coefficients(&coeffs);
        let back = tcp.expand(&a).unwrap();
        assert!(back.iter().zip(&coeffs).all(|(x, y)| dist_frob(x, y) < 1e-10));
        let x = random_matrix(&mut rng, 2, 2);
        let c = tcp.expand(&tcp.alpha_op(&x)).unwrap();
        assert!(dist_frob(&c[0], &x) < 1e-12);
        let outside = random_matrix(&mut rng, tcp.ambient_dim(), tcp.ambient_dim());
        assert!(tcp.expand(&outside).is_err());
    }

    #[test]
    fn untwisted_degeneration() {
        let (alpha, _, _) = perturbed("S3", 7);
        let tcp = TwistedCrossedProduct::build(&TwistedAction::untwisted(&alpha), 1e-9).unwrap();
        let cp = CrossedProduct::build(&alpha, 1e-9).unwrap();
        assert!(untwisted_comparison(&tcp, &cp) < 1e-8);
    }

    #[test]
    fn perturbation_identification() {
        let (alpha, w, ta) = perturbed("S3", 4);
        let tcp = TwistedCrossedProduct::build(&ta, 1e-9).unwrap();
        let cp = CrossedProduct::build(&alpha, 1e-9).unwrap();
        assert!(perturbation_comparison(&tcp, &cp, &w) < 1e-8);
    }

    #[test]
    fn corrupted_cocycle_breaks_conjugate_identity() {
        let (_, _, mut ta) = perturbed("S3", 5);
        let k = ta.num_classes();
        let idx = 2 * k + 2;
        let dim = ta.u[idx].nrows();
        ta.u[idx] = &ta.u[idx] * hermitian_exp_i_scaled(dim);
        let tcp = TwistedCrossedProduct::build_unchecked(&ta);
        let (a, _) = tcp.conjugate_identity(2);
        assert!(a > 1e-3);
    }

    fn hermitian_exp_i_scaled(dim: usize) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        crate::rep::hermitian_exp_i(&(random_hermitian(&mut rng, dim) * re(0.5)))
    }
}
