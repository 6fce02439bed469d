//! The canonical representation of Ĝ on `ℓ²(Ĝ)`, matrix-unit systems and the product model action.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{probe_elements, DualAction};
use crate::linalg::*;
use crate::rep::{Dual, Family, RepLabel};

pub const DEFAULT_LEVEL_CAP: usize = 256;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("level {level} needs dimension {dim} above the cap {cap}")]
    CapExceeded { level: usize, dim: usize, cap: usize },
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("invalid matrix units (residual {0:.3e})")]
    InvalidMatrixUnits(f64),
}

/// Offsets of the class blocks in the basis `{dπ^{-1/2} e^π_ij}` of `ℓ²(Ĝ)`.
pub fn basis_offsets(dual: &Dual) -> Vec<usize> {
    let mut out = Vec::with_capacity(dual.num_classes());
    let mut acc = 0;
    for pi in 0..dual.num_classes() {
        out.push(acc);
        acc += dual.d(pi) * dual.d(pi);
    }
    out
}

/// Position of `dπ^{-1/2} e^π_ij`: class-major, then `(i, j)` row-major.
pub fn basis_index(dual: &Dual, pi: usize, i: usize, j: usize) -> usize {
    basis_offsets(dual)[pi] + i * dual.d(pi) + j
}

/// `λ_L ∈ B(ℓ²(Ĝ)) ⊗ B(H_L)` from `(λ_{L_ij} v)(ρ) = Σ_{σ,e} T^{σ̄,e}_{ρ̄,L_i} v(σ) T^{σ̄,e*}_{ρ̄,L_j}`
/// with `T ∈ (σ̄, ρ̄⊗L)`.
pub fn model_lambda_label(dual: &Dual, label: &RepLabel) -> CMat {
    let g = dual.order();
    let dl = dual.label_dim(label);
    let off = basis_offsets(dual);
    let k = dual.num_classes();
    let mut blocks = vec![zeros(g, g); dl * dl];
    for rho in 0..k {
        let dr = dual.d(rho);
        let target = RepLabel::tensor(RepLabel::conj_of(rho), label.clone());
        for sigma in 0..k {
            let ds = dual.d(sigma);
            let source = RepLabel::conj_of(sigma);
            if dual.multiplicity(dual.conj_class(sigma), &target) == 0 {
                continue;
            }
            let onb = dual
                .intertwiner_onb(&source, &target)
                .expect("conjugates of irreps are irreducible");
            let scale = (dr as f64 / ds as f64).sqrt();
            for t in &onb.basis {
                for i in 0..dl {
                    for j in 0..dl {
                        let b = &mut blocks[i * dl + j];
                        for kk in 0..dr {
                            for l in 0..dr {
                                for m in 0..ds {
                                    for n in 0..ds {
                                        let v = t[(kk * dl + i, m)] * t[(l * dl + j, n)].conj() * scale;
                                        b[(off[rho] + kk * dr + l, off[sigma] + m * ds + n)] += v;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    from_blocks(&blocks, dl)
}

/// The canonical unitary representation `λ` of Ĝ on `M_{|G|}`.
pub fn model_representation(dual: &Dual) -> Family {
    let blocks = (0..dual.num_classes())
        .map(|pi| model_lambda_label(dual, &RepLabel::Irrep(pi)))
        .collect();
    Family { n: dual.order(), blocks }
}

/// A system of matrix units `e_{p,q}` for `B(ℓ²(Ĝ))` inside `M_n`, indexed by basis positions.
#[derive(Debug, Clone)]
pub struct MatrixUnitSystem {
    pub n: usize,
    pub size: usize,
    pub units: Vec<CMat>,
}

impl MatrixUnitSystem {
    pub fn get(&self, p: usize, q: usize) -> &CMat {
        &self.units[p * self.size + q]
    }

    /// The standard system of `B(ℓ²(Ĝ)) = M_{|G|}`.
    pub fn standard(dual: &Dual) -> MatrixUnitSystem {
        let g = dual.order();
        MatrixUnitSystem { n: g, size: g, units: (0..g * g).map(|k| unit(g, k / g, k % g)).collect() }
    }

    /// `e ⊗ 1_K` inside `M_{|G|} ⊗ M_K`, or `1_K ⊗ e` when `first` is false.
    pub fn tensored(&self, k: usize, first: bool) -> MatrixUnitSystem {
        let units = self
            .units
            .iter()
            .map(|e| if first { kron(e, &eye(k)) } else { kron(&eye(k), e) })
            .collect();
        MatrixUnitSystem { n: self.n * k, size: self.size, units }
    }

    /// `{v e v*}`.
    pub fn conjugate(&self, v: &CMat) -> MatrixUnitSystem {
        let units = self.units.iter().map(|e| v * e * v.adjoint()).collect();
        MatrixUnitSystem { n: self.n, size: self.size, units }
    }

    /// Largest violation of `e_pq e_rs = δ_qr e_ps`, `e_pq* = e_qp`, `Σ e_pp = 1`.
    pub fn residual(&self) -> f64 {
        let s = self.size;
        let mut worst: f64 = 0.0;
        let mut sum = zeros(self.n, self.n);
        for p in 0..s {
            sum += self.get(p, p);
            for q in 0..s {
                worst = worst.max(dist_frob(&self.get(p, q).adjoint(), self.get(q, p)));
                worst = worst.max(dist_frob(&(self.get(p, 0) * self.get(0, q)), self.get(p, q)));
                let want = if p == q { self.get(0, 0).clone() } else { zeros(self.n, self.n) };
                worst = worst.max(dist_frob(&(self.get(0, p) * self.get(q, 0)), &want));
            }
        }
        worst.max(dist_frob(&sum, &eye(self.n)))
    }

    pub fn validate(&self, tol: f64) -> Result<(), ModelError> {
        let r = self.residual();
        if r > tol {
            return Err(ModelError::InvalidMatrixUnits(r));
        }
        Ok(())
    }
}

/// `λ^E_{L_ij} = Σ √(dρ/dσ) T^{σ_m,e}_{L_i,ρ_k} conj(T^{σ_n,e}_{L_j,ρ_l}) e_{σ_mn, ρ_kl}` with `T ∈ (σ, L⊗ρ)`.
pub fn lambda_label_from_matrix_units(dual: &Dual, e: &MatrixUnitSystem, label: &RepLabel) -> CMat {
    let dl = dual.label_dim(label);
    let off = basis_offsets(dual);
    let mut blocks = vec![zeros(e.n, e.n); dl * dl];
    for rho in 0..dual.num_classes() {
        let dr = dual.d(rho);
        let decomp = dual.decompose(&RepLabel::tensor(label.clone(), RepLabel::Irrep(rho)));
        for (sigma, basis) in decomp.iter() {
            let ds = dual.d(*sigma);
            let scale = (dr as f64 / ds as f64).sqrt();
            for t in basis {
                for i in 0..dl {
                    for j in 0..dl {
                        for k in 0..dr {
                            for l in 0..dr {
                                for m in 0..ds {
                                    for n in 0..ds {
                                        let c = t[(i * dr + k, m)] * t[(j * dr + l, n)].conj() * scale;
                                        if c.norm() < 1e-15 {
                                            continue;
                                        }
                                        let p = off[*sigma] + m * ds + n;
                                        let q = off[rho] + k * dr + l;
                                        blocks[i * dl + j] += e.get(p, q) * c;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    from_blocks(&blocks, dl)
}

pub fn lambda_from_matrix_units(dual: &Dual, e: &MatrixUnitSystem) -> Family {
    let blocks = (0..dual.num_classes())
        .map(|pi| lambda_label_from_matrix_units(dual, e, &RepLabel::Irrep(pi)))
        .collect();
    Family { n: e.n, blocks }
}

/// `e_{π_ij,ρ_kl} = √(dπ dρ) λ_{π_ij} e_{𝟏,𝟏} λ_{ρ_kl}*`.
pub fn matrix_units_from_lambda(dual: &Dual, lambda: &Family, e11: &CMat) -> MatrixUnitSystem {
    let labels = dual.coefficient_labels();
    let entries: Vec<CMat> = labels.iter().map(|&(p, i, j)| lambda.entry(p, i, j)).collect();
    let s = labels.len();
    let mut units = Vec::with_capacity(s * s);
    for (a, &(p, _, _)) in labels.iter().enumerate() {
        for (b, &(r, _, _)) in labels.iter().enumerate() {
            let c = (dual.d(p) as f64 * dual.d(r) as f64).sqrt();
            units.push(&entries[a] * e11 * entries[b].adjoint() * re(c));
        }
    }
    MatrixUnitSystem { n: lambda.n, size: s, units }
}

/// `λ^k_π` of the `k`-th copy of `M_{|G|}` inside `K_1 ⊗ … ⊗ K_level` (0-based `k`).
fn lambda_on_factor(lam: &CMat, g: usize, dp: usize, k: usize, level: usize) -> CMat {
    let before = g.pow(k as u32);
    let after = g.pow((level - k - 1) as u32);
    let inner = insert_middle(lam, dp, after);
    kron(&eye(before), &inner)
}

/// Level `n` of the product model action: `λ̃^n = λ̃^{n-1} λ^n` and `m^n = Ad λ̃^n`.
#[derive(Debug, Clone)]
pub struct ModelLevel {
    pub level: usize,
    pub lambda_tilde: Family,
    pub action: DualAction,
}

pub fn product_model_action(dual: Arc<Dual>, level: usize, cap: usize) -> Result<ModelLevel, ModelError> {
    if level == 0 {
        return Err(ModelError::ZeroLevel);
    }
    let g = dual.order();
    let dim = (g as u128).checked_pow(level as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(ModelError::CapExceeded { level, dim: dim.min(usize::MAX as u128) as usize, cap });
    }
    let dim = dim as usize;
    let lam = model_representation(&dual);
    let blocks = (0..dual.num_classes())
        .map(|pi| {
            let dp = dual.d(pi);
            let mut acc = eye(dim * dp);
            for k in 0..level {
                acc *= lambda_on_factor(&lam.blocks[pi], g, dp, k, level);
            }
            acc
        })
        .collect();
    let lambda_tilde = Family { n: dim, blocks };
    let action = DualAction::inner_unchecked(dual, lambda_tilde.clone());
    Ok(ModelLevel { level, lambda_tilde, action })
}

/// `‖m^n_π(x ⊗ 1) − m^{n-1}_π(x) ⊗ 1‖` over probes of the first `n − 1` factors.
pub fn stabilization_residual(dual: Arc<Dual>, level: usize, cap: usize) -> Result<f64, ModelError> {
    if level < 2 {
        return Ok(0.0);
    }
    let g = dual.order();
    let hi = product_model_action(dual.clone(), level, cap)?;
    let lo = product_model_action(dual.clone(), level - 1, cap)?;
    let mut worst: f64 = 0.0;
    for x in probe_elements(lo.action.n) {
        for pi in 0..dual.num_classes() {
            let a = hi.action.apply(pi, &kron(&x, &eye(g)));
            let b = insert_middle(&lo.action.apply(pi, &x), dual.d(pi), g);
            worst = worst.max(dist_frob(&a, &b));
        }
    }
    Ok(worst)
}

/// Trace factorization behind outerness of the model action: for random `x` on the first
/// `m` factors and `π ≠ 𝟏`, returns `(max |τ(x λ̃^{m+1}_{π_ij})|, factorization residual)`.
pub fn outerness_proxy(dual: Arc<Dual>, m: usize, seed: u64, cap: usize) -> Result<(f64, f64), ModelError> {
    let g = dual.order();
    let hi = product_model_action(dual.clone(), m + 1, cap)?;
    let lo = product_model_action(dual.clone(), m, cap)?;
    let lam = model_representation(&dual);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_matrix(&mut rng, lo.action.n, lo.action.n);
    let xe = kron(&x, &eye(g));
    let mut trace_max: f64 = 0.0;
    let mut fact: f64 = 0.0;
    for pi in 1..dual.num_classes() {
        let dp = dual.d(pi);
        for i in 0..dp {
            for j in 0..dp {
                let t_hi = tau(&(&xe * hi.lambda_tilde.entry(pi, i, j)));
                let mut t_fact = ZERO;
                for l in 0..dp {
                    t_fact += tau(&(&x * lo.lambda_tilde.entry(pi, i, l))) * tau(&lam.entry(pi, l, j));
                }
                trace_max = trace_max.max(t_hi.norm());
                fact = fact.max((t_hi - t_fact).norm());
            }
        }
    }
    Ok((trace_max, fact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{check_representation, fixed_point_algebra, freeness_obstruction};
    use crate::group::Group;

    fn dual(name: &str) -> Arc<Dual> {
        Arc::new(Dual::compute(&Group::builtin(name, 64).unwrap(), 0, 1e-9).unwrap())
    }

    #[test]
    fn z2_lambda_is_flip() {
        let d = dual("Z2");
        let lam = model_representation(&d);
        let want = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!(dist_frob(&lam.blocks[1], &want) < 1e-12);
    }

    #[test]
    fn model_is_representation() {
        for name in ["Z3", "S3", "Q8", "D4"] {
            let d = dual(name);
            let lam = model_representation(&d);
            let rep = check_representation(&d, &lam);
            assert!(rep.max_residual() < 1e-9, "{name}: {rep:?}");
            for pi in 0..d.num_classes() {
                let dp = d.d(pi);
                for i in 0..dp {
                    for j in 0..dp {
                        let want = if pi == 0 && i == j { 1.0 } else { 0.0 };
                        assert!((tau(&lam.entry(pi, i, j)) - re(want)).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn bar_label_matches_adjoint_entries() {
        let d = dual("S3");
        let lam = model_representation(&d);
        let lbar = model_lambda_label(&d, &RepLabel::conj_of(2));
        for i in 0..2 {
            for j in 0..2 {
                assert!(dist_frob(&block(&lbar, 2, i, j), &lam.entry(2, i, j).adjoint()) < 1e-9);
            }
        }
    }

    #[test]
    fn matrix_unit_formula_agrees() {
        for name in ["Z2", "S3", "Q8"] {
            let d = dual(name);
            let lam = model_representation(&d);
            let std = MatrixUnitSystem::standard(&d);
            let lam_e = lambda_from_matrix_units(&d, &std);
            assert!(lam.max_distance(&lam_e) < 1e-9, "{name}");
            let e11 = std.get(0, 0).clone();
            let back = matrix_units_from_lambda(&d, &lam, &e11);
            for (a, b) in back.units.iter().zip(&std.units) {
                assert!(dist_frob(a, b) < 1e-9);
            }
        }
    }

    #[test]
    fn model_level_one_fixed_points_and_obstruction() {
        let d = dual("Z2");
        let m = product_model_action(d.clone(), 1, DEFAULT_LEVEL_CAP).unwrap();
        assert!(m.action.check().max_residual() < 1e-9);
        assert_eq!(fixed_point_algebra(&m.action).len(), 2);
        let d = dual("S3");
        let m = product_model_action(d.clone(), 1, DEFAULT_LEVEL_CAP).unwrap();
        for pi in 0..3 {
            assert_eq!(freeness_obstruction(&m.action, pi), d.d(pi) * d.d(pi));
        }
    }

    #[test]
    fn z2_level_three_stabilizes() {
        let d = dual("Z2");
        assert!(stabilization_residual(d.clone(), 3, DEFAULT_LEVEL_CAP).unwrap() < 1e-10);
        let (t, f) = outerness_proxy(d, 2, 1, DEFAULT_LEVEL_CAP).unwrap();
        assert!(t < 1e-10 && f < 1e-10);
    }

    #[test]
    fn model_coaction_identity_nonabelian() {
        use crate::action::{action_distance, coaction_from_roberts, coaction_identity_residual, roberts_from_coaction};
        for name in ["Z2", "S3", "Q8"] {
            let d = dual(name);
            let m = product_model_action(d.clone(), 1, DEFAULT_LEVEL_CAP).unwrap();
            assert!(coaction_identity_residual(&m.action) < 1e-9, "{name}");
            let back = roberts_from_coaction(d, &coaction_from_roberts(&m.action));
            assert!(action_distance(&m.action, &back) < 1e-9);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = dual("S3");
        assert!(matches!(product_model_action(d, 4, DEFAULT_LEVEL_CAP), Err(ModelError::CapExceeded { .. })));
    }
}
