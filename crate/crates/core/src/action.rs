//! Actions of Ĝ on `M_N` in the Roberts sense, unitary representations of Ĝ,
//! the coaction picture, fixed points and freeness obstructions.

use std::sync::Arc;

use crate::linalg::*;
use crate::rep::{Dual, Family, RepLabel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ActionError {
    #[error("family is not a representation of the dual (residual {0:.3e})")]
    NotARepresentation(f64),
    #[error("maps do not form an action (residual {0:.3e})")]
    ActionInvalid(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Storage of the maps `α_π : M_N → M_N ⊗ B(H_π)`.
#[derive(Debug, Clone)]
pub enum ActionMaps {
    /// `images[π][a*N + b] = α_π(e_ab)`.
    Images(Vec<Vec<CMat>>),
    /// `α_π(x) = U_π (x ⊗ 1) U_π*`.
    Inner(Family),
}

/// A family of maps `α_π`, one per class of Ĝ. Validity is checked by [`DualAction::check`].
#[derive(Debug, Clone)]
pub struct DualAction {
    pub dual: Arc<Dual>,
    pub n: usize,
    pub maps: ActionMaps,
}

/// Elements on which homomorphism-based identities are probed: the clock and shift
/// generators of `M_N` plus two matrix units.
pub fn probe_elements(n: usize) -> Vec<CMat> {
    let [c, s] = clock_shift(n);
    vec![c, s, unit(n, 0, 0), unit(n, 0, n - 1)]
}

/// `Σ_i a_ii` over the last leg of size `d`.
pub fn partial_trace_last(a: &CMat, d: usize) -> CMat {
    let m = a.nrows() / d;
    let mut out = zeros(m, m);
    for i in 0..d {
        out += block(a, d, i, i);
    }
    out
}

impl DualAction {
    pub fn trivial(dual: Arc<Dual>, n: usize) -> DualAction {
        let fam = Family::identity(&dual, n);
        DualAction { dual, n, maps: ActionMaps::Inner(fam) }
    }

    pub fn from_images(dual: Arc<Dual>, n: usize, images: Vec<Vec<CMat>>) -> Result<DualAction, ActionError> {
        if images.len() != dual.num_classes() {
            return Err(ActionError::DimensionMismatch(format!(
                "{} maps supplied for {} classes",
                images.len(),
                dual.num_classes()
            )));
        }
        for (pi, imgs) in images.iter().enumerate() {
            let m = n * dual.d(pi);
            if imgs.len() != n * n || imgs.iter().any(|x| x.nrows() != m || x.ncols() != m) {
                return Err(ActionError::DimensionMismatch(format!("class {pi}: expected {} images of size {m}", n * n)));
            }
        }
        Ok(DualAction { dual, n, maps: ActionMaps::Images(images) })
    }

    /// `α_π = Ad U_π(· ⊗ 1)` without validating `U`.
    pub fn inner_unchecked(dual: Arc<Dual>, u: Family) -> DualAction {
        let n = u.n;
        DualAction { dual, n, maps: ActionMaps::Inner(u) }
    }

    /// The action `Ad U_π(· ⊗ 1)` of a representation; fails when `U` is not one.
    pub fn ad_action(dual: Arc<Dual>, u: Family, tol: f64) -> Result<DualAction, ActionError> {
        let rep = check_representation(&dual, &u);
        if rep.fusion.max(rep.unitarity).max(rep.unit) > tol {
            return Err(ActionError::NotARepresentation(rep.max_residual()));
        }
        Ok(DualAction::inner_unchecked(dual, u))
    }

    pub fn d(&self, pi: usize) -> usize {
        self.dual.d(pi)
    }

    /// `α_π(x)`.
    pub fn apply(&self, pi: usize, x: &CMat) -> CMat {
        match &self.maps {
            ActionMaps::Inner(u) => {
                let ub = &u.blocks[pi];
                ub * kron(x, &eye(self.d(pi))) * ub.adjoint()
            }
            ActionMaps::Images(imgs) => {
                let m = self.n * self.d(pi);
                let mut out = zeros(m, m);
                for a in 0..self.n {
                    for b in 0..self.n {
                        let c = x[(a, b)];
                        if c != ZERO {
                            out += &imgs[pi][a * self.n + b] * c;
                        }
                    }
                }
                out
            }
        }
    }

    /// `α_L(x)` for an arbitrary label via an irreducible decomposition of `L`.
    pub fn apply_label(&self, label: &RepLabel, x: &CMat) -> CMat {
        if let RepLabel::Irrep(k) = label {
            return self.apply(*k, x);
        }
        let dl = self.dual.label_dim(label);
        let mut out = zeros(self.n * dl, self.n * dl);
        for (sigma, basis) in self.dual.decompose(label).iter() {
            let img = self.apply(*sigma, x);
            for t in basis {
                out += lift_sandwich(t, &img);
            }
        }
        out
    }

    /// `(α_π ⊗ id)(y)` for `y ∈ M_N ⊗ B(C^d)`; result legs `(M_N, H_π, C^d)`.
    pub fn apply_tensor_id(&self, pi: usize, y: &CMat, d: usize) -> CMat {
        if let ActionMaps::Inner(u) = &self.maps {
            let dp = self.d(pi);
            let u12 = kron(&u.blocks[pi], &eye(d));
            let y13 = insert_middle(y, d, dp);
            return &u12 * y13 * u12.adjoint();
        }
        self.apply_label_tensor_id(&RepLabel::Irrep(pi), y, d)
    }

    /// `(α_L ⊗ id)(y)` for a label `L`.
    pub fn apply_label_tensor_id(&self, label: &RepLabel, y: &CMat, d: usize) -> CMat {
        let dl = self.dual.label_dim(label);
        let mut out = zeros(self.n * dl * d, self.n * dl * d);
        for k in 0..d {
            for l in 0..d {
                let ykl = block(y, d, k, l);
                if frob(&ykl) == 0.0 {
                    continue;
                }
                out += kron(&self.apply_label(label, &ykl), &unit(d, k, l));
            }
        }
        out
    }

    /// Materialize all matrix-unit images.
    pub fn images(&self, pi: usize) -> Vec<CMat> {
        match &self.maps {
            ActionMaps::Images(imgs) => imgs[pi].clone(),
            ActionMaps::Inner(_) => (0..self.n * self.n)
                .map(|k| self.apply(pi, &unit(self.n, k / self.n, k % self.n)))
                .collect(),
        }
    }

    pub fn to_images(&self) -> DualAction {
        let imgs = (0..self.dual.num_classes()).map(|p| self.images(p)).collect();
        DualAction { dual: self.dual.clone(), n: self.n, maps: ActionMaps::Images(imgs) }
    }

    /// Perturbation `Ad w_π ∘ α_π`.
    pub fn perturb(&self, w: &Family) -> DualAction {
        let maps = match &self.maps {
            ActionMaps::Inner(u) => ActionMaps::Inner(w.mul(u)),
            ActionMaps::Images(imgs) => ActionMaps::Images(
                imgs.iter()
                    .enumerate()
                    .map(|(pi, v)| v.iter().map(|x| &w.blocks[pi] * x * w.blocks[pi].adjoint()).collect())
                    .collect(),
            ),
        };
        DualAction { dual: self.dual.clone(), n: self.n, maps }
    }

    /// `(Ad u ⊗ id) ∘ α_π ∘ Ad u*`.
    pub fn conjugate_by(&self, u: &CMat) -> DualAction {
        let fam_u = |pi: usize| kron(u, &eye(self.d(pi)));
        let maps = match &self.maps {
            ActionMaps::Inner(v) => ActionMaps::Inner(Family {
                n: self.n,
                blocks: v.blocks.iter().enumerate().map(|(pi, b)| fam_u(pi) * b * fam_u(pi).adjoint()).collect(),
            }),
            ActionMaps::Images(_) => ActionMaps::Images(
                (0..self.dual.num_classes())
                    .map(|pi| {
                        (0..self.n * self.n)
                            .map(|k| {
                                let x = u.adjoint() * unit(self.n, k / self.n, k % self.n) * u;
                                fam_u(pi) * self.apply(pi, &x) * fam_u(pi).adjoint()
                            })
                            .collect()
                    })
                    .collect(),
            ),
        };
        DualAction { dual: self.dual.clone(), n: self.n, maps }
    }

    /// Amplification `α ⊗ id_K` on `M_N ⊗ M_K`.
    pub fn amplify(&self, k: usize) -> DualAction {
        let maps = match &self.maps {
            ActionMaps::Inner(u) => ActionMaps::Inner(Family {
                n: self.n * k,
                blocks: u.blocks.iter().enumerate().map(|(pi, b)| insert_middle(b, self.d(pi), k)).collect(),
            }),
            ActionMaps::Images(imgs) => ActionMaps::Images(
                imgs.iter()
                    .enumerate()
                    .map(|(pi, v)| {
                        let dp = self.d(pi);
                        let mut out = Vec::with_capacity(self.n * self.n * k * k);
                        for a in 0..self.n {
                            for c in 0..k {
                                for b in 0..self.n {
                                    for d in 0..k {
                                        let base = insert_middle(&v[a * self.n + b], dp, k);
                                        let e = kron(&kron(&eye(self.n), &unit(k, c, d)), &eye(dp));
                                        out.push((a, c, b, d, base * e));
                                    }
                                }
                            }
                        }
                        let nk = self.n * k;
                        let mut sorted = vec![zeros(0, 0); nk * nk];
                        for (a, c, b, d, m) in out {
                            sorted[(a * k + c) * nk + (b * k + d)] = m;
                        }
                        sorted
                    })
                    .collect(),
            ),
        };
        DualAction { dual: self.dual.clone(), n: self.n * k, maps }
    }

    /// Replace `α_π` by `x ↦ α_π(x)ᵀ` (a deliberately invalid family, used as a negative control).
    pub fn with_transposed_map(&self, pi: usize) -> DualAction {
        let mut imgs: Vec<Vec<CMat>> = (0..self.dual.num_classes()).map(|p| self.images(p)).collect();
        imgs[pi] = imgs[pi].iter().map(|m| m.transpose()).collect();
        DualAction { dual: self.dual.clone(), n: self.n, maps: ActionMaps::Images(imgs) }
    }

    pub fn check(&self) -> ActionReport {
        check_action(self)
    }
}

/// Per-axiom residuals (Frobenius norms) of an action of Ĝ.
#[derive(Debug, Clone, Default)]
pub struct ActionReport {
    pub unital_identity_class: f64,
    pub composition: f64,
    pub homomorphism: f64,
    pub star: f64,
    pub injectivity: f64,
}

impl ActionReport {
    pub fn max_residual(&self) -> f64 {
        self.unital_identity_class
            .max(self.composition)
            .max(self.homomorphism)
            .max(self.star)
            .max(self.injectivity)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

fn homomorphism_residuals(alpha: &DualAction, pi: usize) -> (f64, f64) {
    let n = alpha.n;
    match &alpha.maps {
        ActionMaps::Inner(u) => {
            let r = unitarity_residual(&u.blocks[pi]);
            (r, r)
        }
        ActionMaps::Images(imgs) => {
            let img = &imgs[pi];
            let m = n * alpha.d(pi);
            let mut hom: f64 = 0.0;
            let mut star: f64 = 0.0;
            let mut sum = zeros(m, m);
            for a in 0..n {
                sum += &img[a * n + a];
                for b in 0..n {
                    hom = hom.max(dist_frob(&(&img[a * n] * &img[b]), &img[a * n + b]));
                    let want = if a == b { img[0].clone() } else { zeros(m, m) };
                    hom = hom.max(dist_frob(&(&img[a] * &img[b * n]), &want));
                    star = star.max(dist_frob(&img[a * n + b].adjoint(), &img[b * n + a]));
                }
            }
            hom = hom.max(dist_frob(&sum, &eye(m)));
            (hom, star)
        }
    }
}

pub fn check_action(alpha: &DualAction) -> ActionReport {
    let dual = &alpha.dual;
    let n = alpha.n;
    let probes = probe_elements(n);
    let mut rep = ActionReport::default();
    for pi in 0..dual.num_classes() {
        let (h, s) = homomorphism_residuals(alpha, pi);
        rep.homomorphism = rep.homomorphism.max(h);
        rep.star = rep.star.max(s);
    }
    let units: Vec<CMat> = (0..n * n).map(|k| unit(n, k / n, k % n)).collect();
    for x in units.iter().take(if n <= 8 { n * n } else { 0 }).chain(probes.iter()) {
        rep.unital_identity_class = rep.unital_identity_class.max(dist_frob(&alpha.apply(0, x), x));
    }
    for pi in 0..dual.num_classes() {
        for rho in 0..dual.num_classes() {
            let fus = dual.fusion(pi, rho);
            let dr = dual.d(rho);
            for x in &probes {
                let lhs = alpha.apply_tensor_id(pi, &alpha.apply(rho, x), dr);
                for (sigma, basis) in fus.iter() {
                    let rhs_img = alpha.apply(*sigma, x);
                    for t in basis {
                        rep.composition = rep.composition.max(dist_frob(&mul_lift(&lhs, t), &lift_mul(t, &rhs_img)));
                    }
                }
            }
        }
        // injectivity: T^{𝟏*}(α_π̄ ⊗ id)α_π(x)T^𝟏 = x with T^𝟏 ∈ (𝟏, π̄⊗π)
        let dp = dual.d(pi);
        let t1 = dual.canonical_dual_isometry(pi);
        for x in &probes {
            let y = alpha.apply_label_tensor_id(&RepLabel::conj_of(pi), &alpha.apply(pi, x), dp);
            rep.injectivity = rep.injectivity.max(dist_frob(&lift_mul(&t1.adjoint(), &mul_lift(&y, &t1)), x));
        }
    }
    rep
}

/// Residuals of a unitary representation of Ĝ and of its consequences.
#[derive(Debug, Clone, Default)]
pub struct RepresentationReport {
    pub unitarity: f64,
    pub unit: f64,
    pub fusion: f64,
    pub conjugate_adjoint: f64,
    pub commutation: f64,
}

impl RepresentationReport {
    pub fn max_residual(&self) -> f64 {
        self.unitarity
            .max(self.unit)
            .max(self.fusion)
            .max(self.conjugate_adjoint)
            .max(self.commutation)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

/// `U_π^{12} U_ρ^{13} T = T U_σ` for all fusion bases, unitarity, `U_𝟏 = 1`,
/// `U_{π_ij}* = U_{bar(π)_ij}` and `[U_{π_ij}, U_{ρ_kl}] = 0`.
pub fn check_representation(dual: &Dual, u: &Family) -> RepresentationReport {
    let n = u.n;
    let k = dual.num_classes();
    let mut rep = RepresentationReport {
        unit: dist_frob(&u.blocks[0], &eye(n)),
        ..Default::default()
    };
    for pi in 0..k {
        rep.unitarity = rep.unitarity.max(unitarity_residual(&u.blocks[pi]));
    }
    for pi in 0..k {
        for rho in 0..k {
            // entrywise: Σ_{j,l} u_{π_ij} u_{ρ_kl} T_{jl,m} = Σ_s T_{ik,s} u_{σ_sm}
            let (dp, dr) = (dual.d(pi), dual.d(rho));
            let mut prods = Vec::with_capacity(dp * dp * dr * dr);
            for i in 0..dp {
                for k in 0..dr {
                    for j in 0..dp {
                        for l in 0..dr {
                            prods.push(mm(&u.entry(pi, i, j), &u.entry(rho, k, l)));
                        }
                    }
                }
            }
            let m2 = dp * dr;
            for (sigma, basis) in dual.fusion(pi, rho).iter() {
                let ds = dual.d(*sigma);
                let us: Vec<CMat> = (0..ds * ds).map(|q| u.entry(*sigma, q / ds, q % ds)).collect();
                for t in basis {
                    let mut sq = 0.0;
                    for row in 0..m2 {
                        for m in 0..ds {
                            let mut diff = zeros(n, n);
                            for col in 0..m2 {
                                if t[(col, m)] != ZERO {
                                    diff += &prods[row * m2 + col] * t[(col, m)];
                                }
                            }
                            for s2 in 0..ds {
                                if t[(row, s2)] != ZERO {
                                    diff -= &us[s2 * ds + m] * t[(row, s2)];
                                }
                            }
                            sq += diff.norm_squared();
                        }
                    }
                    rep.fusion = rep.fusion.max(sq.sqrt());
                }
            }
        }
        let dp = dual.d(pi);
        let ubar = dual.extend_family(u, &RepLabel::conj_of(pi));
        for i in 0..dp {
            for j in 0..dp {
                let a = block(&u.blocks[pi], dp, i, j).adjoint();
                rep.conjugate_adjoint = rep.conjugate_adjoint.max(dist_frob(&a, &block(&ubar, dp, i, j)));
            }
        }
    }
    let entries: Vec<CMat> = dual
        .coefficient_labels()
        .iter()
        .map(|&(p, i, j)| u.entry(p, i, j))
        .collect();
    for a in &entries {
        for b in &entries {
            rep.commutation = rep.commutation.max(frob(&commutator(a, b)));
        }
    }
    rep
}

/// Matrix units `f^π_ij = dπ/|G| Σ_g conj(π(g)_ij) u_g` of `R(G) ⊂ B(ℓ²(G))` under which
/// `u_g` corresponds to `⊕_π π(g)`.
pub fn group_algebra_units(dual: &Dual) -> Vec<Vec<CMat>> {
    let g = &dual.group;
    let u = g.regular_representation();
    (0..dual.num_classes())
        .map(|pi| {
            let d = dual.d(pi);
            let mats = &dual.irreps[pi].matrices;
            (0..d * d)
                .map(|k| {
                    let (i, j) = (k / d, k % d);
                    let mut f = zeros(g.order, g.order);
                    for (h, uh) in u.iter().enumerate() {
                        f += uh * mats[h][(i, j)].conj();
                    }
                    f * re(d as f64 / g.order as f64)
                })
                .collect()
        })
        .collect()
}

/// The coaction `α : M_N → M_N ⊗ R(G)` stored by its images of matrix units (size `N|G|`).
#[derive(Debug, Clone)]
pub struct Coaction {
    pub n: usize,
    pub order: usize,
    pub images: Vec<CMat>,
}

impl Coaction {
    pub fn apply(&self, x: &CMat) -> CMat {
        let m = self.n * self.order;
        let mut out = zeros(m, m);
        for a in 0..self.n {
            for b in 0..self.n {
                if x[(a, b)] != ZERO {
                    out += &self.images[a * self.n + b] * x[(a, b)];
                }
            }
        }
        out
    }
}

/// `α(x) = Σ_π Σ_ij α_π(x)_ij ⊗ f^π_ij`.
pub fn coaction_image(alpha: &DualAction, units: &[Vec<CMat>], x: &CMat) -> CMat {
    let dual = &alpha.dual;
    let m = alpha.n * dual.order();
    let mut out = zeros(m, m);
    for pi in 0..dual.num_classes() {
        let d = dual.d(pi);
        let img = alpha.apply(pi, x);
        for i in 0..d {
            for j in 0..d {
                out += kron(&block(&img, d, i, j), &units[pi][i * d + j]);
            }
        }
    }
    out
}

pub fn coaction_from_roberts(alpha: &DualAction) -> Coaction {
    let units = group_algebra_units(&alpha.dual);
    let n = alpha.n;
    let images = (0..n * n)
        .map(|k| coaction_image(alpha, &units, &unit(n, k / n, k % n)))
        .collect();
    Coaction { n, order: alpha.dual.order(), images }
}

/// Inverse of [`coaction_from_roberts`]: `α_π(x)_ij = dπ⁻¹ Tr_{ℓ²}((1 ⊗ f^π_ji) α(x))`.
pub fn roberts_from_coaction(dual: Arc<Dual>, co: &Coaction) -> DualAction {
    let units = group_algebra_units(&dual);
    let n = co.n;
    let order = co.order;
    let images = (0..dual.num_classes())
        .map(|pi| {
            let d = dual.d(pi);
            co.images
                .iter()
                .map(|img| {
                    let blocks: Vec<CMat> = (0..d * d)
                        .map(|k| {
                            let (i, j) = (k / d, k % d);
                            let prod = lift_mul(&units[pi][j * d + i], img);
                            partial_trace_last(&prod, order) / re(d as f64)
                        })
                        .collect();
                    from_blocks(&blocks, d)
                })
                .collect()
        })
        .collect();
    DualAction { dual, n, maps: ActionMaps::Images(images) }
}

/// Residual of `(α ⊗ id)∘α = (id ⊗ Δ)∘α` with `Δ(u_g) = u_g ⊗ u_g`, over probe elements.
pub fn coaction_identity_residual(alpha: &DualAction) -> f64 {
    let dual = &alpha.dual;
    let g = &dual.group;
    let units = group_algebra_units(dual);
    let u = g.regular_representation();
    let order = g.order;
    let n = alpha.n;
    // Δ(f^π_ij) = dπ/|G| Σ_g conj(π(g)_ij) u_g ⊗ u_g
    let uu: Vec<CMat> = u.iter().map(|x| kron(x, x)).collect();
    let mut worst: f64 = 0.0;
    for x in probe_elements(n) {
        let ax = coaction_image(alpha, &units, &x);
        let mut lhs = zeros(n * order * order, n * order * order);
        for p in 0..order {
            for q in 0..order {
                let y = block(&ax, order, p, q);
                if frob(&y) == 0.0 {
                    continue;
                }
                lhs += kron(&coaction_image(alpha, &units, &y), &unit(order, p, q));
            }
        }
        let mut rhs = zeros(n * order * order, n * order * order);
        for pi in 0..dual.num_classes() {
            let d = dual.d(pi);
            let img = alpha.apply(pi, &x);
            for i in 0..d {
                for j in 0..d {
                    let mut delta = zeros(order * order, order * order);
                    for (h, m) in uu.iter().enumerate() {
                        delta += m * dual.irreps[pi].matrices[h][(i, j)].conj();
                    }
                    delta *= re(d as f64 / order as f64);
                    rhs += kron(&block(&img, d, i, j), &delta);
                }
            }
        }
        worst = worst.max(dist_frob(&lhs, &rhs));
    }
    worst
}

/// Largest difference between two actions over probe elements.
pub fn action_distance(a: &DualAction, b: &DualAction) -> f64 {
    let mut worst: f64 = 0.0;
    for x in probe_elements(a.n) {
        for pi in 0..a.dual.num_classes() {
            worst = worst.max(dist_frob(&a.apply(pi, &x), &b.apply(pi, &x)));
        }
    }
    worst
}

/// Orthonormal (Hilbert–Schmidt) basis of `M^α = {a : α_π(a) = a ⊗ 1 ∀π}`.
pub fn fixed_point_algebra(alpha: &DualAction) -> Vec<CMat> {
    let n = alpha.n;
    let mut ops = Vec::new();
    for pi in 0..alpha.dual.num_classes() {
        let dp = alpha.d(pi);
        let m = n * dp;
        let mut op = zeros(m * m, n * n);
        for k in 0..n * n {
            // column-major vectorization index of e_ab is b*n + a
            let (a, b) = (k % n, k / n);
            let e = unit(n, a, b);
            let diff = alpha.apply(pi, &e) - kron(&e, &eye(dp));
            op.set_column(k, &vec_of(&diff));
        }
        ops.push(op);
    }
    let ns = null_space(&ops, n * n, 1e-7);
    (0..ns.ncols())
        .map(|c| unvec(ns.column(c).as_slice(), n, n))
        .collect()
}

/// Basis of `{a ∈ M_N ⊗ B(H_π) : α_π(x) a = a (x ⊗ 1) ∀x}` (as column-major vectors).
pub fn freeness_solutions(alpha: &DualAction, pi: usize) -> CMat {
    let n = alpha.n;
    let dp = alpha.d(pi);
    let m = n * dp;
    let [c, s] = clock_shift(n);
    let ops: Vec<CMat> = [c, s]
        .iter()
        .map(|x| sandwich_op(&alpha.apply(pi, x), &eye(m)) - sandwich_op(&eye(m), &kron(x, &eye(dp))))
        .collect();
    null_space(&ops, m * m, 1e-7)
}

/// Dimension of the intertwiner space obstructing freeness at `π`; zero means free at `π`.
pub fn freeness_obstruction(alpha: &DualAction, pi: usize) -> usize {
    freeness_solutions(alpha, pi).ncols()
}

/// Residual of `β_π = (Ad u ⊗ id)∘α_π∘Ad u*` over probe elements.
pub fn are_conjugate(alpha: &DualAction, beta: &DualAction, u: &CMat) -> f64 {
    action_distance(&alpha.conjugate_by(u), beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dual(name: &str) -> Arc<Dual> {
        Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
    }

    #[test]
    fn trivial_action_is_exact() {
        let d = dual("S3");
        let a = DualAction::trivial(d.clone(), 2);
        assert!(a.check().max_residual() < 1e-12);
        assert_eq!(fixed_point_algebra(&a).len(), 4);
        for pi in 1..3 {
            assert_eq!(freeness_obstruction(&a, pi), d.d(pi) * d.d(pi));
        }
        assert_eq!(freeness_obstruction(&a, 0), 1);
    }

    #[test]
    fn trivial_representation_passes() {
        let d = dual("Q8");
        let u = Family::identity(&d, 3);
        assert!(check_representation(&d, &u).max_residual() < 1e-12);
    }

    #[test]
    fn conjugation_round_trip() {
        let d = dual("S3");
        let a = DualAction::trivial(d.clone(), 2).amplify(1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 2);
        let b = a.conjugate_by(&u);
        assert!(are_conjugate(&a, &b, &u) < 1e-12);
        assert!(are_conjugate(&a, &a, &eye(2)) < 1e-12);
    }

    #[test]
    fn images_round_trip_through_coaction() {
        let d = dual("Z2");
        let a = DualAction::trivial(d.clone(), 2).to_images();
        let co = coaction_from_roberts(&a);
        let back = roberts_from_coaction(d, &co);
        assert!(action_distance(&a, &back) < 1e-12);
        assert!(coaction_identity_residual(&a) < 1e-12);
        let x = unit(2, 0, 1);
        assert!(dist_frob(&co.apply(&x), &kron(&x, &eye(2))) < 1e-12);
    }
}
