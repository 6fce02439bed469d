//! 1-cocycles, cocycle twisted actions, 2-cocycles and their trivialization.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{probe_elements, ActionError, DualAction};
use crate::crossed::{CrossedError, CrossedProduct};
use crate::linalg::*;
use crate::model::{basis_index, lambda_from_matrix_units, MatrixUnitSystem};
use crate::numerics::{matrix_unit_conjugator, projection_defect, top_eigenprojection};
use crate::rep::{Dual, Family, RepLabel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CocycleError {
    #[error("family is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("family is not a 1-cocycle (residual {0:.3e})")]
    NotACocycle(f64),
    #[error("maps do not form an action (residual {0:.3e})")]
    ActionInvalid(f64),
    #[error("input is not in product form (residual {0:.3e})")]
    NotProductForm(f64),
    #[error("matrix size {n} is not divisible by |G| = {order}")]
    DimensionNotDivisible { n: usize, order: usize },
    #[error("no conjugator between matrix unit systems: {0}")]
    ConjugatorNotFound(String),
    #[error("matrix units are not fixed by the action (residual {0:.3e})")]
    NotFixed(f64),
    #[error("failure: {0}")]
    Failure(FailureKind),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FailureKind {
    #[error("pushed-down element is not invertible (smallest eigenvalue {0:.3e})")]
    NonInvertiblePushDown(f64),
    #[error("projection step degenerate: {0}")]
    Projection(String),
}

impl From<CrossedError> for CocycleError {
    fn from(e: CrossedError) -> Self {
        match e {
            CrossedError::ActionInvalid(r) => CocycleError::ActionInvalid(r),
            CrossedError::NotInAlgebra(r) => CocycleError::Failure(FailureKind::Projection(format!(
                "element left the crossed product ({r:.3e})"
            ))),
        }
    }
}

impl From<ActionError> for CocycleError {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::ActionInvalid(r) | ActionError::NotARepresentation(r) => CocycleError::ActionInvalid(r),
            ActionError::DimensionMismatch(s) => CocycleError::Failure(FailureKind::Projection(s)),
        }
    }
}

/// `(k, l)` entry of `a ∈ M_N ⊗ B(C^c, C^r)`.
pub fn rect_block(a: &CMat, r: usize, c: usize, k: usize, l: usize) -> CMat {
    let n = a.nrows() / r;
    CMat::from_fn(n, n, |p, q| a[(p * r + k, q * c + l)])
}

/// `(α_π ⊗ id)(y)` for rectangular `y ∈ M_N ⊗ B(C^c, C^r)`; legs `(M_N, H_π, C^r) ← (M_N, H_π, C^c)`.
pub fn alpha_rect(alpha: &DualAction, pi: usize, y: &CMat, r: usize, c: usize) -> CMat {
    let n = alpha.n;
    let dp = alpha.d(pi);
    let mut out = zeros(n * dp * r, n * dp * c);
    for k in 0..r {
        for l in 0..c {
            let ykl = rect_block(y, r, c, k, l);
            if frob(&ykl) == 0.0 {
                continue;
            }
            let mut e = zeros(r, c);
            e[(k, l)] = ONE;
            out += kron(&alpha.apply(pi, &ykl), &e);
        }
    }
    out
}

/// `Σ_{σ,t} T v_σ T*` over the fusion channels of `π⊗ρ`, i.e. `v` evaluated on `π⊗ρ`.
fn on_tensor(dual: &Dual, v: &Family, pi: usize, rho: usize) -> CMat {
    let dl = dual.d(pi) * dual.d(rho);
    dual.extend_family_with(v, &dual.fusion(pi, rho), dl)
}

#[derive(Debug, Clone, Default)]
pub struct Cocycle1Report {
    pub unitarity: f64,
    pub normalization: f64,
    pub identity: f64,
}

impl Cocycle1Report {
    pub fn max_residual(&self) -> f64 {
        self.unitarity.max(self.normalization).max(self.identity)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

/// Residuals of `(w_π⊗1)(α_π⊗id)(w_ρ)T = T w_σ`.
pub fn check_cocycle1(alpha: &DualAction, w: &Family) -> Cocycle1Report {
    let dual = &alpha.dual;
    let n = alpha.n;
    let mut rep = Cocycle1Report {
        unitarity: max_or_zero(w.blocks.iter().map(unitarity_residual)),
        normalization: dist2(&w.blocks[0], &eye(n)),
        identity: 0.0,
    };
    for pi in 0..dual.num_classes() {
        for rho in 0..dual.num_classes() {
            let dr = dual.d(rho);
            let lhs = kron(&w.blocks[pi], &eye(dr)) * alpha.apply_tensor_id(pi, &w.blocks[rho], dr);
            for (sigma, ts) in dual.fusion(pi, rho).iter() {
                for t in ts {
                    let lt = lift(n, t);
                    rep.identity = rep.identity.max(dist2(&(&lhs * &lt), &(&lt * &w.blocks[*sigma])));
                }
            }
        }
    }
    rep
}

/// `w_π = (v⊗1) α_π(v*)`.
pub fn coboundary(alpha: &DualAction, v: &CMat) -> Family {
    let dual = &alpha.dual;
    let blocks = (0..dual.num_classes())
        .map(|pi| kron(v, &eye(dual.d(pi))) * alpha.apply(pi, &v.adjoint()))
        .collect();
    Family { n: alpha.n, blocks }
}

/// `(∂_α W)_{π,ρ} = (α_π⊗id)(W_ρ)(W_π⊗1) Σ_{σ,e} T W_σ* T*`, indexed `π·K + ρ`.
pub fn boundary2(alpha: &DualAction, w: &Family) -> Vec<CMat> {
    let dual = &alpha.dual;
    let k = dual.num_classes();
    let wa = w.adjoint();
    let mut out = Vec::with_capacity(k * k);
    for pi in 0..k {
        for rho in 0..k {
            let dr = dual.d(rho);
            out.push(
                alpha.apply_tensor_id(pi, &w.blocks[rho], dr)
                    * kron(&w.blocks[pi], &eye(dr))
                    * on_tensor(dual, &wa, pi, rho),
            );
        }
    }
    out
}

/// A family of maps `α_π` with a 2-cocycle `U_{π,ρ} ∈ M_N ⊗ B(H_π) ⊗ B(H_ρ)`, stored at `π·K + ρ`.
#[derive(Debug, Clone)]
pub struct TwistedAction {
    pub alpha: DualAction,
    pub u: Vec<CMat>,
}

#[derive(Debug, Clone, Default)]
pub struct TwistedReport {
    pub normalization: f64,
    pub unitarity: f64,
    pub homomorphism: f64,
    pub composition: f64,
    pub cocycle_identity: f64,
    pub extended_identity: f64,
}

impl TwistedReport {
    pub fn max_residual(&self) -> f64 {
        self.normalization
            .max(self.unitarity)
            .max(self.homomorphism)
            .max(self.composition)
            .max(self.cocycle_identity)
            .max(self.extended_identity)
    }

    pub fn pass(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

fn decomposition_of(dual: &Dual, label: &RepLabel) -> Vec<(usize, CMat)> {
    dual.decompose(label)
        .iter()
        .flat_map(|(s, ts)| ts.iter().map(move |t| (*s, t.clone())))
        .collect()
}

impl TwistedAction {
    pub fn untwisted(alpha: &DualAction) -> TwistedAction {
        let dual = &alpha.dual;
        let k = dual.num_classes();
        let u = (0..k * k).map(|q| eye(alpha.n * dual.d(q / k) * dual.d(q % k))).collect();
        TwistedAction { alpha: alpha.clone(), u }
    }

    pub fn dual(&self) -> &Arc<Dual> {
        &self.alpha.dual
    }

    pub fn n(&self) -> usize {
        self.alpha.n
    }

    pub fn num_classes(&self) -> usize {
        self.alpha.dual.num_classes()
    }

    pub fn get(&self, pi: usize, rho: usize) -> &CMat {
        &self.u[pi * self.num_classes() + rho]
    }

    /// `U_{A,B}` for arbitrary labels, extended through irreducible decompositions of both legs.
    pub fn u_label(&self, a: &RepLabel, b: &RepLabel) -> CMat {
        let dual = self.dual();
        let n = self.n();
        let (da, db) = (dual.label_dim(a), dual.label_dim(b));
        let mut out = zeros(n * da * db, n * da * db);
        for (eta, s) in decomposition_of(dual, a) {
            for (xi, t) in decomposition_of(dual, b) {
                let st = lift(n, &kron(&s, &t));
                out += &st * self.get(eta, xi) * st.adjoint();
            }
        }
        out
    }

    /// Largest `‖U_{π,ρ} − 1‖₂`.
    pub fn distance_from_trivial(&self) -> f64 {
        max_or_zero(self.u.iter().map(|u| dist2(u, &eye(u.nrows()))))
    }

    pub fn check(&self) -> TwistedReport {
        let alpha = &self.alpha;
        let dual = self.dual();
        let n = self.n();
        let k = self.num_classes();
        let mut rep = TwistedReport::default();
        let base = alpha.check();
        rep.homomorphism = base.unital_identity_class.max(base.homomorphism).max(base.star);
        rep.unitarity = max_or_zero(self.u.iter().map(unitarity_residual));
        for pi in 0..k {
            let dp = dual.d(pi);
            rep.normalization = rep
                .normalization
                .max(dist2(self.get(pi, 0), &eye(n * dp)))
                .max(dist2(self.get(0, pi), &eye(n * dp)));
        }
        let probes = probe_elements(n);
        for pi in 0..k {
            for rho in 0..k {
                let dr = dual.d(rho);
                let u = self.get(pi, rho);
                let lhs_maps: Vec<CMat> =
                    probes.iter().map(|x| alpha.apply_tensor_id(pi, &alpha.apply(rho, x), dr)).collect();
                for (sigma, ts) in dual.fusion(pi, rho).iter() {
                    for t in ts {
                        let ut = u * lift(n, t);
                        for (x, lhs) in probes.iter().zip(&lhs_maps) {
                            let r = dist2(&(lhs * &ut), &(&ut * alpha.apply(*sigma, x)));
                            rep.composition = rep.composition.max(r);
                        }
                    }
                }
            }
        }
        for pi in 0..k {
            for rho in 0..k {
                for sigma in 0..k {
                    rep.cocycle_identity = rep.cocycle_identity.max(self.literal_identity(pi, rho, sigma));
                    rep.extended_identity = rep.extended_identity.max(self.extended_identity(pi, rho, sigma));
                }
            }
        }
        rep
    }

    /// `(U_{π,ρ}⊗1)U_{π⊗ρ,σ} = (α_π⊗id)(U_{ρ,σ})U_{π,ρ⊗σ}`.
    pub fn extended_identity(&self, pi: usize, rho: usize, sigma: usize) -> f64 {
        let dual = self.dual();
        let (dr, ds) = (dual.d(rho), dual.d(sigma));
        let (p, r, s) = (RepLabel::Irrep(pi), RepLabel::Irrep(rho), RepLabel::Irrep(sigma));
        let lhs = kron(self.get(pi, rho), &eye(ds)) * self.u_label(&RepLabel::tensor(p.clone(), r.clone()), &s);
        let rhs = self.alpha.apply_tensor_id(pi, self.get(rho, sigma), dr * ds) * self.u_label(&p, &RepLabel::tensor(r, s));
        dist2(&lhs, &rhs)
    }

    /// The 2-cocycle identity written with `U^{σ,a}_{π,ρ} = U_{π,ρ}T^{σ,a}_{π,ρ}` summed over channels.
    pub fn literal_identity(&self, pi: usize, rho: usize, sigma: usize) -> f64 {
        let dual = self.dual();
        let n = self.n();
        let (dp, dr, ds) = (dual.d(pi), dual.d(rho), dual.d(sigma));
        let m = n * dp * dr * ds;
        let mut lhs = zeros(m, m);
        for (eta, ta) in dual.fusion(rho, sigma).iter() {
            let de = dual.d(*eta);
            for t_eta in ta {
                let u_eta = self.get(rho, sigma) * lift(n, t_eta);
                let a_u = alpha_rect(&self.alpha, pi, &u_eta, dr * ds, de);
                let right = lift(n, &kron(&eye(dp), &t_eta.adjoint()));
                for (xi, tb) in dual.fusion(pi, *eta).iter() {
                    let _ = xi;
                    for t_xi in tb {
                        let u_xi = self.get(pi, *eta) * lift(n, t_xi);
                        lhs += &a_u * u_xi * lift(n, &t_xi.adjoint()) * &right;
                    }
                }
            }
        }
        let mut rhs = zeros(m, m);
        for (zeta, tc) in dual.fusion(pi, rho).iter() {
            for t_zeta in tc {
                let u_zeta = kron(&(self.get(pi, rho) * lift(n, t_zeta)), &eye(ds));
                let right = lift(n, &kron(&t_zeta.adjoint(), &eye(ds)));
                for (_, td) in dual.fusion(*zeta, sigma).iter() {
                    for t_xi in td {
                        let u_xi = self.get(*zeta, sigma) * lift(n, t_xi);
                        rhs += &u_zeta * u_xi * lift(n, &t_xi.adjoint()) * &right;
                    }
                }
            }
        }
        dist2(&lhs, &rhs)
    }

    /// Residual of `(W_π⊗1)(α_π⊗id)(W_ρ)U_{π,ρ}T = T W_σ`.
    pub fn coboundary_residual(&self, w: &Family) -> f64 {
        let dual = self.dual();
        let n = self.n();
        let k = self.num_classes();
        let mut worst: f64 = 0.0;
        for pi in 0..k {
            for rho in 0..k {
                let dr = dual.d(rho);
                let lhs = kron(&w.blocks[pi], &eye(dr))
                    * self.alpha.apply_tensor_id(pi, &w.blocks[rho], dr)
                    * self.get(pi, rho);
                for (sigma, ts) in dual.fusion(pi, rho).iter() {
                    for t in ts {
                        let lt = lift(n, t);
                        worst = worst.max(dist2(&(&lhs * &lt), &(&lt * &w.blocks[*sigma])));
                    }
                }
            }
        }
        worst
    }

    /// Largest `‖∂_α(W*) − U‖₂`.
    pub fn boundary_residual(&self, w: &Family) -> f64 {
        let b = boundary2(&self.alpha, &w.adjoint());
        max_or_zero(b.iter().zip(&self.u).map(|(x, y)| dist2(x, y)))
    }

    /// Conjugate by a unitary family: `(Ad u α, (u_π⊗1)(α_π⊗id)(u_ρ) U Σ T u_σ* T*)`.
    pub fn perturb(&self, u: &Family) -> TwistedAction {
        let dual = self.dual().clone();
        let k = self.num_classes();
        let ua = u.adjoint();
        let mut out = Vec::with_capacity(k * k);
        for pi in 0..k {
            for rho in 0..k {
                let dr = dual.d(rho);
                out.push(
                    kron(&u.blocks[pi], &eye(dr))
                        * self.alpha.apply_tensor_id(pi, &u.blocks[rho], dr)
                        * self.get(pi, rho)
                        * on_tensor(&dual, &ua, pi, rho),
                );
            }
        }
        TwistedAction { alpha: self.alpha.perturb(u), u: out }
    }

    /// `(α ⊗ id_K, U ⊗ 1_K)` on `M_N ⊗ M_K`.
    pub fn amplify(&self, k: usize) -> TwistedAction {
        let dual = self.dual();
        let c = self.num_classes();
        let u = self
            .u
            .iter()
            .enumerate()
            .map(|(q, x)| insert_middle(x, dual.d(q / c) * dual.d(q % c), k))
            .collect();
        TwistedAction { alpha: self.alpha.amplify(k), u }
    }
}

/// `(Ad w α, ∂_{Ad w α}(w))`.
pub fn cocycle_from_perturbation(alpha: &DualAction, w: &Family) -> Result<TwistedAction, CocycleError> {
    let r = alpha.check().max_residual();
    if r > 1e-8 {
        return Err(CocycleError::ActionInvalid(r));
    }
    let r = max_or_zero(w.blocks.iter().map(unitarity_residual));
    if r > 1e-8 {
        return Err(CocycleError::NotUnitary(r));
    }
    let beta = alpha.perturb(w);
    let u = boundary2(&beta, w);
    Ok(TwistedAction { alpha: beta, u })
}

fn check_units(dual: &Dual, k: &MatrixUnitSystem, n: usize) -> Result<(), CocycleError> {
    if !n.is_multiple_of(dual.order()) || k.size != dual.order() {
        return Err(CocycleError::DimensionNotDivisible { n, order: dual.order() });
    }
    let r = k.residual();
    if r > 1e-8 {
        return Err(CocycleError::ConjugatorNotFound(format!("invalid matrix units ({r:.3e})")));
    }
    Ok(())
}

/// Largest violation of `α_π(f) = f⊗1` and `[U_{π,ρ}, f⊗1⊗1] = 0` over the units `f`.
pub fn product_form_residual(ta: &TwistedAction, f: &MatrixUnitSystem) -> f64 {
    let dual = ta.dual();
    let k = ta.num_classes();
    let mut worst: f64 = 0.0;
    for e in &f.units {
        for pi in 0..k {
            let dp = dual.d(pi);
            worst = worst.max(dist2(&ta.alpha.apply(pi, e), &kron(e, &eye(dp))));
            for rho in 0..k {
                let ef = kron(e, &eye(dp * dual.d(rho)));
                worst = worst.max(norm2(&commutator(ta.get(pi, rho), &ef)));
            }
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct VanishResult {
    pub w: Family,
    /// `max ‖∂_α(w*) − U‖₂`.
    pub residual: f64,
    pub unitarity: f64,
}

/// Explicit trivializing family for a twisted action that fixes the units `f` and whose
/// cocycle commutes with them:
/// `w_{π_ij} = Σ √(dξ/dη) T^{η_c,e}_{π_iξ_a} (U^{η_d,e}_{π_jξ_b})* f_{η_cd, ξ_ab}`.
pub fn vanish2_explicit(ta: &TwistedAction, f: &MatrixUnitSystem) -> Result<VanishResult, CocycleError> {
    let dual = ta.dual().clone();
    let n = ta.n();
    check_units(&dual, f, n)?;
    let r = product_form_residual(ta, f);
    if r > 1e-8 {
        return Err(CocycleError::NotProductForm(r));
    }
    let k = dual.num_classes();
    let mut blocks = Vec::with_capacity(k);
    for pi in 0..k {
        let dp = dual.d(pi);
        let mut entries = vec![zeros(n, n); dp * dp];
        for xi in 0..k {
            let dx = dual.d(xi);
            for (eta, ts) in dual.fusion(pi, xi).iter() {
                let de = dual.d(*eta);
                let scale = (dx as f64 / de as f64).sqrt();
                for t in ts {
                    let ut = ta.get(pi, xi) * lift(n, t);
                    for i in 0..dp {
                        for j in 0..dp {
                            let mut acc = zeros(n, n);
                            for a in 0..dx {
                                for b in 0..dx {
                                    for c in 0..de {
                                        let coeff = t[(i * dx + a, c)];
                                        if coeff.norm() < 1e-15 {
                                            continue;
                                        }
                                        for d in 0..de {
                                            let ublk = rect_block(&ut, dp * dx, de, j * dx + b, d);
                                            let fu = f.get(basis_index(&dual, *eta, c, d), basis_index(&dual, xi, a, b));
                                            acc += ublk.adjoint() * fu * coeff;
                                        }
                                    }
                                }
                            }
                            entries[i * dp + j] += acc * re(scale);
                        }
                    }
                }
            }
        }
        blocks.push(from_blocks(&entries, dp));
    }
    let w = Family { n, blocks };
    Ok(VanishResult {
        residual: ta.boundary_residual(&w),
        unitarity: max_or_zero(w.blocks.iter().map(unitarity_residual)),
        w,
    })
}

#[derive(Debug, Clone)]
pub struct Standardized {
    /// `u_π` with `Ad u_π α_π(e_ij) = e_ij ⊗ 1`.
    pub u: Family,
    pub twisted: TwistedAction,
    /// Largest `‖Ad u_π α_π(e) − e⊗1‖₂`.
    pub fix_residual: f64,
    /// Largest commutator of `Ũ` with `K ⊗ 1 ⊗ 1`.
    pub commutant_residual: f64,
}

/// Move the twisted action so that it fixes the units `K` pointwise.
pub fn standardize_on_subfactor(ta: &TwistedAction, kunits: &MatrixUnitSystem) -> Result<Standardized, CocycleError> {
    let dual = ta.dual().clone();
    let n = ta.n();
    check_units(&dual, kunits, n)?;
    let mut blocks = Vec::with_capacity(dual.num_classes());
    for pi in 0..dual.num_classes() {
        let dp = dual.d(pi);
        let target = MatrixUnitSystem {
            n: n * dp,
            size: kunits.size,
            units: kunits.units.iter().map(|e| kron(e, &eye(dp))).collect(),
        };
        if pi == 0 {
            blocks.push(eye(n));
            continue;
        }
        let source = MatrixUnitSystem {
            n: n * dp,
            size: kunits.size,
            units: kunits.units.iter().map(|e| ta.alpha.apply(pi, e)).collect(),
        };
        let u = matrix_unit_conjugator(&source, &target).map_err(|e| CocycleError::ConjugatorNotFound(e.to_string()))?;
        blocks.push(u);
    }
    let u = Family { n, blocks };
    let twisted = ta.perturb(&u);
    let fix_residual = max_or_zero(kunits.units.iter().flat_map(|e| {
        let tw = &twisted;
        (0..dual.num_classes()).map(move |pi| dist2(&tw.alpha.apply(pi, e), &kron(e, &eye(tw.alpha.d(pi)))))
    }));
    let commutant_residual = product_form_residual(&twisted, kunits);
    Ok(Standardized { u, twisted, fix_residual, commutant_residual })
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub w: Family,
    pub residual: f64,
    pub standardize_residual: f64,
}

/// Trivialize a 2-cocycle on an algebra containing the `|G|`-dimensional subfactor `K`:
/// standardize, apply the explicit formula, transport back with `W_π = w̃_π u_π`.
pub fn solve_2cocycle(ta: &TwistedAction, kunits: &MatrixUnitSystem) -> Result<SolveResult, CocycleError> {
    let st = standardize_on_subfactor(ta, kunits)?;
    let vr = vanish2_explicit(&st.twisted, kunits)?;
    let w = vr.w.mul(&st.u);
    Ok(SolveResult {
        residual: ta.boundary_residual(&w),
        standardize_residual: st.fix_residual.max(st.commutant_residual),
        w,
    })
}

/// Element of the crossed product with seeded random coefficients.
fn random_element(cp: &CrossedProduct, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<CMat> = cp.labels.iter().map(|_| random_matrix(&mut rng, cp.n, cp.n)).collect();
    cp.from_coefficients(&coeffs)
}

/// Partial isometry `a` with `a*a = e` and `aa* = p` taken from the polar part of `p y e`.
fn equivalence(p: &CMat, e: &CMat, y: &CMat) -> Result<CMat, CocycleError> {
    let x = p * y * e;
    let q = orthonormal_columns(e, 1e-6);
    let xq = &x * &q;
    let gram = xq.adjoint() * &xq;
    let (vals, _) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0);
    let bottom = vals.first().copied().unwrap_or(0.0);
    if bottom <= 1e-10 * top.max(1e-300) {
        return Err(CocycleError::Failure(FailureKind::NonInvertiblePushDown(bottom)));
    }
    Ok(xq * inv_sqrt_pd(&gram) * q.adjoint())
}

/// `(embed ⊗ id)(w_π)`.
fn embed_family(cp: &CrossedProduct, w: &Family) -> Family {
    let dual = &cp.dual;
    let blocks = (0..dual.num_classes())
        .map(|pi| {
            let dp = dual.d(pi);
            let entries: Vec<CMat> = (0..dp * dp).map(|q| cp.embed(&w.entry(pi, q / dp, q % dp))).collect();
            from_blocks(&entries, dp)
        })
        .collect();
    Family { n: cp.ambient_dim(), blocks }
}

/// `|G|⁻¹ Σ dπ Σ_i (x_π)_ii` for an ambient family `x`.
fn weighted_diagonal(dual: &Dual, x: &Family) -> CMat {
    let m = x.n;
    let mut out = zeros(m, m);
    for pi in 0..dual.num_classes() {
        for i in 0..dual.d(pi) {
            out += x.entry(pi, i, i) * re(dual.df(pi));
        }
    }
    out / re(dual.order() as f64)
}

/// `v ∈ M` with `w_π = (v⊗1)α_π(v*)`, found through the projections `e` and
/// `f = |G|⁻¹ Σ dπ (w_π λ_π)_ii` of the crossed product and the push-down of a conjugator.
pub fn trivialize_1cocycle(alpha: &DualAction, w: &Family, seed: u64) -> Result<CMat, CocycleError> {
    let r = check_cocycle1(alpha, w).max_residual();
    if r > 1e-8 {
        return Err(CocycleError::NotACocycle(r));
    }
    let cp = CrossedProduct::build_unchecked(alpha, 1e-9);
    let e = cp.jones_projection();
    let f = weighted_diagonal(&cp.dual, &embed_family(&cp, w).mul(&cp.lambda));
    let a = equivalence(&f, &e, &random_element(&cp, seed))?;
    let v = cp.push_down(&a)?;
    let smin = v.singular_values().min();
    if smin < 1e-8 {
        return Err(CocycleError::Failure(FailureKind::NonInvertiblePushDown(smin)));
    }
    Ok(v)
}

/// Largest `‖w_π − (v⊗1)α_π(v*)‖₂`.
pub fn coboundary_residual(alpha: &DualAction, w: &Family, v: &CMat) -> f64 {
    w.max_distance(&coboundary(alpha, v))
}

/// `C = max(|G|⁻¹ Σ_{π,ρ} dπ²dρ²√(dπdρ), |G|⁻¹ Σ_π dπ³√dπ)`.
pub fn small_coboundary_constant(dual: &Dual) -> f64 {
    let g = dual.order() as f64;
    let dims: Vec<f64> = dual.dims().iter().map(|&d| d as f64).collect();
    let mut pair = 0.0;
    for &a in &dims {
        for &b in &dims {
            pair += a * a * b * b * (a * b).sqrt();
        }
    }
    let single: f64 = dims.iter().map(|&a| a.powi(3) * a.sqrt()).sum();
    (pair / g).max(single / g)
}

#[derive(Debug, Clone)]
pub struct SmallCoboundary {
    pub w_bar: Family,
    /// `max_{π,ρ} ‖U_{π,ρ} − 1‖₂`.
    pub delta: f64,
    /// `max_π ‖w̄_π − 1‖₂`.
    pub distance: f64,
    /// `max(‖f² − f‖₂, ‖f* − f‖₂)` in the trace `τ∘E_M`.
    pub f_defect: f64,
    pub constant: f64,
    /// `‖f − p‖₂` for the chosen projection.
    pub projection_distance: f64,
    /// `‖u*u − 1‖₂` before taking the polar part.
    pub unitary_defect: f64,
    pub residual: f64,
}

fn two_norm_in(cp: &CrossedProduct, x: &CMat) -> f64 {
    tau(&cp.conditional_expectation(&(x.adjoint() * x))).re.max(0.0).sqrt()
}

/// A trivializing family close to 1 for a 2-cocycle close to 1.
pub fn small_coboundary(ta: &TwistedAction, kunits: &MatrixUnitSystem, seed: u64) -> Result<SmallCoboundary, CocycleError> {
    let dual = ta.dual().clone();
    let delta = ta.distance_from_trivial();
    let w = solve_2cocycle(ta, kunits)?.w;
    let genuine = ta.alpha.perturb(&w);
    let cp = CrossedProduct::build(&genuine, 1e-8)?;
    let lam = embed_family(&cp, &w.adjoint()).mul(&cp.lambda);
    let f = weighted_diagonal(&dual, &lam);
    let f_defect = two_norm_in(&cp, &(&f * &f - &f)).max(two_norm_in(&cp, &(f.adjoint() - &f)));
    if projection_defect(&f) >= 0.25 {
        return Err(CocycleError::Failure(FailureKind::Projection(format!(
            "f is too far from a projection ({:.3e})",
            projection_defect(&f)
        ))));
    }
    let p = top_eigenprojection(&f, cp.n);
    let projection_distance = two_norm_in(&cp, &(&f - &p));
    let e = cp.jones_projection();
    let a = equivalence(&p, &e, &random_element(&cp, seed))?;
    let u = cp.push_down(&a)?;
    let unitary_defect = dist2(&(u.adjoint() * &u), &eye(cp.n));
    let smin = u.singular_values().min();
    if smin < 1e-8 {
        return Err(CocycleError::Failure(FailureKind::NonInvertiblePushDown(smin)));
    }
    let v = polar_unitary(&u);
    let blocks = (0..dual.num_classes())
        .map(|pi| kron(&v, &eye(dual.d(pi))) * &w.blocks[pi] * ta.alpha.apply(pi, &v.adjoint()))
        .collect();
    let w_bar = Family { n: ta.n(), blocks };
    let distance = w_bar.max_distance(&Family::identity(&dual, ta.n()));
    Ok(SmallCoboundary {
        residual: ta.boundary_residual(&w_bar),
        w_bar,
        delta,
        distance,
        f_defect,
        constant: small_coboundary_constant(&dual),
        projection_distance,
        unitary_defect,
    })
}

#[derive(Debug, Clone, Default)]
pub struct EquivariantReport {
    /// Largest `‖α_π(e) − Ad λ^E_π(e⊗1)‖₂`.
    pub equivariance: f64,
    /// `λ^{E*}` as a 1-cocycle for `α`.
    pub cocycle: f64,
    /// Largest `‖Ad λ^{E*}_π α_π(e) − e⊗1‖₂`.
    pub fixes_units: f64,
}

impl EquivariantReport {
    pub fn max_residual(&self) -> f64 {
        self.equivariance.max(self.cocycle).max(self.fixes_units)
    }
}

pub fn check_equivariant(alpha: &DualAction, e: &MatrixUnitSystem) -> EquivariantReport {
    let dual = &alpha.dual;
    let lam = lambda_from_matrix_units(dual, e);
    let mut rep = EquivariantReport { cocycle: check_cocycle1(alpha, &lam.adjoint()).max_residual(), ..Default::default() };
    let perturbed = alpha.perturb(&lam.adjoint());
    for x in &e.units {
        for pi in 0..dual.num_classes() {
            let dp = dual.d(pi);
            let lb = &lam.blocks[pi];
            let want = lb * kron(x, &eye(dp)) * lb.adjoint();
            rep.equivariance = rep.equivariance.max(dist2(&alpha.apply(pi, x), &want));
            rep.fixes_units = rep.fixes_units.max(dist2(&perturbed.apply(pi, x), &kron(x, &eye(dp))));
        }
    }
    rep
}

/// Equivariant matrix units `E = {u f u*}` from units `F` inside the fixed-point algebra,
/// with `u*` trivializing the 1-cocycle `λ^F`.
pub fn construct_equivariant_mu(alpha: &DualAction, f: &MatrixUnitSystem, seed: u64) -> Result<MatrixUnitSystem, CocycleError> {
    let dual = &alpha.dual;
    check_units(dual, f, alpha.n)?;
    let fixed = max_or_zero(f.units.iter().flat_map(|x| {
        (0..dual.num_classes()).map(move |pi| dist2(&alpha.apply(pi, x), &kron(x, &eye(alpha.d(pi)))))
    }));
    if fixed > 1e-8 {
        return Err(CocycleError::NotFixed(fixed));
    }
    let lam = lambda_from_matrix_units(dual, f);
    let v = trivialize_1cocycle(alpha, &lam, seed)?;
    Ok(f.conjugate(&v.adjoint()))
}
