//! Approximation bounds in the trace 2-norm and matrix-unit utilities.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::*;
use crate::model::MatrixUnitSystem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericsError {
    #[error("τ(f)·N = {0:.6} is not an integer")]
    TraceNotQuantized(f64),
    #[error("bound violated: {value:.3e} ≥ {bound:.3e}")]
    BoundViolated { value: f64, bound: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("input is singular (smallest singular value {0:.3e})")]
    SingularInput(f64),
    #[error("matrix unit systems are incompatible: {0}")]
    IncompatibleSystems(String),
}

/// `‖x‖₂ = √τ(x*x)`.
pub fn trace_two_norm(x: &CMat) -> f64 {
    norm2(x)
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub p: CMat,
    pub distance: f64,
    pub bound: f64,
}

impl ProjectionResult {
    pub fn margin(&self) -> f64 {
        self.bound - self.distance
    }
}

/// Defect `max(‖f² − f‖₂, ‖f* − f‖₂)` of an approximate projection.
pub fn projection_defect(f: &CMat) -> f64 {
    dist2(&(f * f), f).max(dist2(&f.adjoint(), f))
}

/// Projection onto the top `τ(f)·N` eigenvectors of `(f + f*)/2`.
///
/// Equals the spectral cut at 1/2 whenever that cut already has the right trace.
pub fn nearest_projection(f: &CMat, delta: f64) -> Result<ProjectionResult, NumericsError> {
    let n = f.nrows();
    if delta > 0.25 {
        return Err(NumericsError::Precondition(format!("δ = {delta} exceeds 1/4")));
    }
    if projection_defect(f) >= delta {
        return Err(NumericsError::Precondition(format!(
            "projection defect {:.3e} is not below δ = {delta:.3e}",
            projection_defect(f)
        )));
    }
    if op_norm(f) > 1.0 + 1e-12 {
        return Err(NumericsError::Precondition(format!("‖f‖ = {} exceeds 1", op_norm(f))));
    }
    let scaled = tau(f).re * n as f64;
    let k = scaled.round();
    if (scaled - k).abs() > 1e-6 || k < 0.0 {
        return Err(NumericsError::TraceNotQuantized(scaled));
    }
    let p = top_eigenprojection(f, k as usize);
    let distance = dist2(f, &p);
    let bound = 6.0 * delta.powf(0.25);
    if distance >= bound {
        return Err(NumericsError::BoundViolated { value: distance, bound });
    }
    Ok(ProjectionResult { p, distance, bound })
}

/// Projection onto the eigenvectors of the `k` largest eigenvalues of the Hermitian part.
pub fn top_eigenprojection(f: &CMat, k: usize) -> CMat {
    let n = f.nrows();
    let (_, vecs) = hermitian_eigen(f);
    let mut p = zeros(n, n);
    for c in n - k..n {
        let v = vecs.column(c);
        p += v * v.adjoint();
    }
    (&p + p.adjoint()) * re(0.5)
}

#[derive(Debug, Clone)]
pub struct UnitaryResult {
    pub v: CMat,
    pub distance: f64,
    pub bound: f64,
}

impl UnitaryResult {
    pub fn margin(&self) -> f64 {
        self.bound - self.distance
    }
}

/// Polar factor of `u`, with the bound `‖u − v‖₂ < (3 + ‖u‖)δ` checked.
pub fn nearest_unitary(u: &CMat, delta: f64) -> Result<UnitaryResult, NumericsError> {
    let n = u.nrows();
    let defect = dist2(&(u.adjoint() * u), &eye(n));
    if defect >= delta {
        return Err(NumericsError::Precondition(format!(
            "‖u*u − 1‖₂ = {defect:.3e} is not below δ = {delta:.3e}"
        )));
    }
    let smin = u.singular_values().min();
    if smin < 1e-12 {
        return Err(NumericsError::SingularInput(smin));
    }
    let v = polar_unitary(u);
    let distance = dist2(u, &v);
    let bound = (3.0 + op_norm(u)) * delta;
    if distance >= bound {
        return Err(NumericsError::BoundViolated { value: distance, bound });
    }
    Ok(UnitaryResult { v, distance, bound })
}

/// Unitary `u` with `u e_ij u* = f_ij`: `u = Σ_i f_{i1} V e_{1i}` where `V` maps `range(e_11)` onto `range(f_11)`.
pub fn matrix_unit_conjugator(e: &MatrixUnitSystem, f: &MatrixUnitSystem) -> Result<CMat, NumericsError> {
    if e.n != f.n || e.size != f.size {
        return Err(NumericsError::IncompatibleSystems(format!(
            "sizes ({}, {}) and ({}, {})",
            e.n, e.size, f.n, f.size
        )));
    }
    if !e.n.is_multiple_of(e.size) {
        return Err(NumericsError::IncompatibleSystems(format!("{} does not divide {}", e.size, e.n)));
    }
    let qe = orthonormal_columns(e.get(0, 0), 1e-6);
    let qf = orthonormal_columns(f.get(0, 0), 1e-6);
    let rank = e.n / e.size;
    if qe.ncols() != rank || qf.ncols() != rank {
        return Err(NumericsError::IncompatibleSystems(format!(
            "ranks {} and {} of the minimal projections, expected {rank}",
            qe.ncols(),
            qf.ncols()
        )));
    }
    let v = &qf * qe.adjoint();
    let mut u = zeros(e.n, e.n);
    for i in 0..e.size {
        u += f.get(i, 0) * &v * e.get(0, i);
    }
    let r = unitarity_residual(&u);
    if r > 1e-6 {
        return Err(NumericsError::IncompatibleSystems(format!("conjugator is not unitary ({r:.3e})")));
    }
    Ok(u)
}

/// Largest `‖u e_ij u* − f_ij‖₂`.
pub fn conjugation_residual(u: &CMat, e: &MatrixUnitSystem, f: &MatrixUnitSystem) -> f64 {
    max_or_zero(e.units.iter().zip(&f.units).map(|(a, b)| dist2(&(u * a * u.adjoint()), b)))
}

/// `E_{K′∩M}(x) = n⁻¹ Σ e_ij x e_ji`.
pub fn relative_commutant_expectation(k: &MatrixUnitSystem, x: &CMat) -> CMat {
    let s = k.size;
    let mut out = zeros(x.nrows(), x.ncols());
    for i in 0..s {
        for j in 0..s {
            out += k.get(i, j) * x * k.get(j, i);
        }
    }
    out / re(s as f64)
}

/// Largest `‖[x, e_ij]‖₂`.
pub fn commutator_with_units(k: &MatrixUnitSystem, x: &CMat) -> f64 {
    max_or_zero(k.units.iter().map(|e| norm2(&commutator(x, e))))
}

/// A Hermitian near-projection in `M_n` with `τ(f)n` an integer, and a `δ` just above its defect.
///
/// Eigenvalues come in pairs `1 − η, η` with `η < eps`, so the trace stays quantized.
pub fn sample_near_projection(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> (CMat, f64) {
    let k = rng.gen_range(1..n);
    let mut vals = vec![0.0; n];
    for v in vals.iter_mut().take(k) {
        *v = 1.0;
    }
    for j in 0..k.min(n - k) {
        let eta = rng.gen_range(0.0..eps);
        vals[j] = 1.0 - eta;
        vals[k + j] = eta;
    }
    let u = random_unitary(rng, n);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, vals.iter().map(|&x| re(x))));
    let f = &u * d * u.adjoint();
    let f = (&f + f.adjoint()) * re(0.5);
    let delta = (projection_defect(&f) * 1.01 + 1e-14).min(0.25);
    (f, delta)
}

/// `v(1 + eps·x)` for a random unitary `v` and a random `x` with entries in the unit square,
/// and `δ` just above `‖u*u − 1‖₂`.
pub fn sample_near_unitary(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> (CMat, f64) {
    let v = random_unitary(rng, n);
    let x = random_matrix(rng, n, n);
    let u = v * (eye(n) + x * re(eps));
    let delta = dist2(&(u.adjoint() * &u), &eye(n)) * 1.01 + 1e-14;
    (u, delta)
}

/// Matrix units `e_ij ⊗ 1_m` of size `size` in `M_{size·m}` and an element `1 ⊗ y + eps·z`
/// close to their commutant.
pub fn sample_near_commutant(rng: &mut ChaCha8Rng, size: usize, m: usize, eps: f64) -> (MatrixUnitSystem, CMat) {
    let k = MatrixUnitSystem {
        n: size * m,
        size,
        units: (0..size * size).map(|q| kron(&unit(size, q / size, q % size), &eye(m))).collect(),
    };
    let x = kron(&eye(size), &random_matrix(rng, m, m)) + random_matrix(rng, size * m, size * m) * re(eps);
    (k, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| re(x))))
    }

    #[test]
    fn two_norm_values() {
        assert!((trace_two_norm(&eye(5)) - 1.0).abs() < 1e-15);
        assert!((trace_two_norm(&unit(2, 0, 0)) - 0.5f64.sqrt()).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 6, 6);
        let fro = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((trace_two_norm(&x) - fro / 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_examples() {
        let p = unit(3, 1, 1);
        let r = nearest_projection(&p, 1e-3).unwrap();
        assert!(dist_frob(&r.p, &p) < 1e-12);
        let f = diag(&[0.9, 0.1]);
        let r = nearest_projection(&f, 0.1).unwrap();
        assert!(dist_frob(&r.p, &diag(&[1.0, 0.0])) < 1e-12);
        assert!((r.distance - 0.1).abs() < 1e-12);
        assert!(matches!(
            nearest_projection(&diag(&[0.95, 0.0, 0.0]), 0.1),
            Err(NumericsError::TraceNotQuantized(_))
        ));
    }

    #[test]
    fn unitary_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 4);
        let r = nearest_unitary(&u, 1e-6).unwrap();
        assert!(dist_frob(&r.v, &u) < 1e-10);
        let r = nearest_unitary(&diag(&[0.9, 1.0]), 0.2).unwrap();
        assert!(dist_frob(&r.v, &eye(2)) < 1e-12);
        assert!(r.distance < r.bound);
    }

    #[test]
    fn conjugator_recovers_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = MatrixUnitSystem {
            n: 6,
            size: 3,
            units: (0..9).map(|k| kron(&unit(3, k / 3, k % 3), &eye(2))).collect(),
        };
        let u = matrix_unit_conjugator(&e, &e).unwrap();
        assert!(conjugation_residual(&u, &e, &e) < 1e-12);
        let v = random_unitary(&mut rng, 6);
        let f = e.conjugate(&v);
        let u = matrix_unit_conjugator(&e, &f).unwrap();
        assert!(conjugation_residual(&u, &e, &f) < 1e-9);
        assert!(unitarity_residual(&u) < 1e-9);
    }

    #[test]
    fn sampled_instances_meet_preconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 5, 8] {
            let (f, d) = sample_near_projection(&mut rng, n, 1e-2);
            assert!(projection_defect(&f) < d && d <= 0.25);
            let k = tau(&f).re * n as f64;
            assert!((k - k.round()).abs() < 1e-9);
            assert!(nearest_projection(&f, d).is_ok());
            let (u, d) = sample_near_unitary(&mut rng, n, 1e-3);
            assert!(nearest_unitary(&u, d).is_ok());
        }
        let (k, x) = sample_near_commutant(&mut rng, 3, 2, 0.0);
        assert!(commutator_with_units(&k, &x) < 1e-12);
    }

    #[test]
    fn relative_commutant_projection() {
        let k = MatrixUnitSystem {
            n: 4,
            size: 2,
            units: (0..4).map(|q| kron(&unit(2, q / 2, q % 2), &eye(2))).collect(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = kron(&eye(2), &random_matrix(&mut rng, 2, 2));
        assert!(dist_frob(&relative_commutant_expectation(&k, &x), &x) < 1e-12);
        let y = kron(&random_matrix(&mut rng, 2, 2), &eye(2));
        let want = kron(&eye(2), &eye(2)) * tau(&y);
        assert!(dist_frob(&relative_commutant_expectation(&k, &y), &want) < 1e-12);
        let z = random_matrix(&mut rng, 4, 4);
        let ez = relative_commutant_expectation(&k, &z);
        assert!(commutator_with_units(&k, &ez) < 1e-12);
        assert!(dist_frob(&relative_commutant_expectation(&k, &ez), &ez) < 1e-12);
    }
}
