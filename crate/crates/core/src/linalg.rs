//! Dense complex matrix helpers shared by every module.
//!
//! Tensor products follow the Kronecker convention: for `A ⊗ B` the row index
//! is `a * dim(B) + b`, so the first leg is the most significant one.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

/// Matrix unit `e_ij` in `M_n`.
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(a: &CMat) -> C64 {
    a.trace()
}

/// Normalized trace `τ(a) = Tr(a)/n`.
pub fn tau(a: &CMat) -> C64 {
    a.trace() / a.nrows() as f64
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace 2-norm `‖a‖₂ = √τ(a*a)` with respect to the normalized trace.
pub fn norm2(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    frob(a) / (a.nrows() as f64).sqrt()
}

pub fn dist_frob(a: &CMat, b: &CMat) -> f64 {
    frob(&(a - b))
}

pub fn dist2(a: &CMat, b: &CMat) -> f64 {
    norm2(&(a - b))
}

/// Largest singular value.
pub fn op_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Complex product through four real products, which use the blocked real kernel.
pub fn mm(a: &CMat, b: &CMat) -> CMat {
    if a.nrows() * a.ncols() * b.ncols() < 32_768 {
        return a * b;
    }
    let (ar, ai) = (a.map(|z| z.re), a.map(|z| z.im));
    let (br, bi) = (b.map(|z| z.re), b.map(|z| z.im));
    let real = &ar * &br - &ai * &bi;
    let imag = &ar * &bi + &ai * &br;
    real.zip_map(&imag, C64::new)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    mm(a, b) - mm(b, a)
}

pub fn conj(a: &CMat) -> CMat {
    a.map(|z| z.conj())
}

/// For `a` in `A ⊗ B(C^d)` (last leg of size `d`), the `A`-valued entry `a_ij`.
pub fn block(a: &CMat, d: usize, i: usize, j: usize) -> CMat {
    let m = a.nrows() / d;
    CMat::from_fn(m, m, |p, q| a[(p * d + i, q * d + j)])
}

/// Inverse of [`block`]: assemble `Σ_ij b_ij ⊗ e_ij` from `d*d` blocks in row-major order.
pub fn from_blocks(blocks: &[CMat], d: usize) -> CMat {
    assert_eq!(blocks.len(), d * d);
    let m = blocks[0].nrows();
    let mut out = zeros(m * d, m * d);
    for i in 0..d {
        for j in 0..d {
            let b = &blocks[i * d + j];
            for p in 0..m {
                for q in 0..m {
                    out[(p * d + i, q * d + j)] = b[(p, q)];
                }
            }
        }
    }
    out
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Index map for a leg permutation: new leg `k` is old leg `perm[k]`.
/// Returns `map[new_index] = old_index`.
pub fn leg_index_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    let mut map = vec![0; total];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut old = 0;
        for k in 0..perm.len() {
            let digit = (new_idx / new_strides[k]) % new_dims[k];
            old += digit * old_strides[perm[k]];
        }
        *slot = old;
    }
    map
}

/// Reorder the tensor legs of a square matrix on `⊗ dims`.
pub fn permute_legs(a: &CMat, dims: &[usize], perm: &[usize]) -> CMat {
    let map = leg_index_map(dims, perm);
    let n = map.len();
    assert_eq!(a.nrows(), n);
    CMat::from_fn(n, n, |r, c| a[(map[r], map[c])])
}

/// `u` on legs `(A, B)` placed on `(A, X, B)` with the identity on the middle leg `X`.
pub fn insert_middle(u: &CMat, dim_b: usize, dim_x: usize) -> CMat {
    let dim_a = u.nrows() / dim_b;
    let ext = kron(u, &eye(dim_x));
    permute_legs(&ext, &[dim_a, dim_b, dim_x], &[0, 2, 1])
}

/// `1_A ⊗ t` for a rectangular `t`.
pub fn lift(n: usize, t: &CMat) -> CMat {
    kron(&eye(n), t)
}

/// `a · (1 ⊗ t)` without forming the lift.
pub fn mul_lift(a: &CMat, t: &CMat) -> CMat {
    let (p, q) = (t.nrows(), t.ncols());
    let n = a.ncols() / p;
    let mut out = zeros(a.nrows(), n * q);
    for x in 0..n {
        let src = a.columns(x * p, p);
        out.columns_mut(x * q, q).copy_from(&(src * t));
    }
    out
}

/// `(1 ⊗ t) · b` without forming the lift.
pub fn lift_mul(t: &CMat, b: &CMat) -> CMat {
    let (p, q) = (t.nrows(), t.ncols());
    let n = b.nrows() / q;
    let mut out = zeros(n * p, b.ncols());
    for x in 0..n {
        let src = b.rows(x * q, q);
        out.rows_mut(x * p, p).copy_from(&(t * src));
    }
    out
}

/// `(1 ⊗ t) x (1 ⊗ t)*`.
pub fn lift_sandwich(t: &CMat, x: &CMat) -> CMat {
    mul_lift(&lift_mul(t, x), &t.adjoint())
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], zeros(0, 0));
    }
    let h = (a + a.adjoint()) * re(0.5);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Apply a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(a: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| re(f(v))),
    ));
    &vecs * d * vecs.adjoint()
}

/// Orthonormal basis (as columns) of the kernel of the stacked operators `ops`,
/// each acting on `C^n`. Singular values below `rel_tol * max(1, σ_max)` count as zero.
pub fn null_space(ops: &[CMat], n: usize, rel_tol: f64) -> CMat {
    let mut gram = zeros(n, n);
    for op in ops {
        gram += mm(&op.adjoint(), op);
    }
    null_space_of_gram(&gram, rel_tol)
}

/// Kernel of a positive semidefinite Gram matrix `L*L`.
pub fn null_space_of_gram(gram: &CMat, rel_tol: f64) -> CMat {
    let n = gram.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let (vals, vecs) = hermitian_eigen(gram);
    let top = vals.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let thr = rel_tol * rel_tol * top;
    let keep: Vec<usize> = (0..n).filter(|&k| vals[k] <= thr).collect();
    let mut out = zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        out.set_column(c, &vecs.column(k));
    }
    out
}

/// Column-major vectorization.
pub fn vec_of(a: &CMat) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

/// Matrix of the linear map `X ↦ A X B` on column-major vectorizations.
pub fn sandwich_op(a: &CMat, b: &CMat) -> CMat {
    kron(&b.transpose(), a)
}

/// Unitary polar factor of a square matrix, `u = W V*` from `a = W Σ V*`.
pub fn polar_unitary(a: &CMat) -> CMat {
    let svd = a.clone().svd(true, true);
    let w = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    w * vt
}

/// Positive square root of a positive semidefinite matrix.
pub fn sqrt_psd(a: &CMat) -> CMat {
    hermitian_fn(a, |v| v.max(0.0).sqrt())
}

pub fn inv_sqrt_pd(a: &CMat) -> CMat {
    hermitian_fn(a, |v| 1.0 / v.sqrt())
}

/// Residual of unitarity `max(‖u*u − 1‖_F, ‖uu* − 1‖_F)`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.nrows();
    let id = eye(n);
    let ua = u.adjoint();
    dist_frob(&mm(&ua, u), &id).max(dist_frob(&mm(u, &ua), &id))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let a = random_matrix(rng, n, n);
    (&a + a.adjoint()) * re(0.5)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    polar_unitary(&random_matrix(rng, n, n))
}

/// Gram–Schmidt on the columns of `a`; columns with residual norm below `tol` are dropped.
pub fn orthonormal_columns(a: &CMat, tol: f64) -> CMat {
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let nv = v.norm();
        if nv > tol {
            cols.push(v / re(nv));
        }
    }
    let mut out = zeros(a.nrows(), cols.len());
    for (j, v) in cols.iter().enumerate() {
        out.set_column(j, v);
    }
    out
}

/// Canonical clock and shift generators of `M_n` as an algebra.
pub fn clock_shift(n: usize) -> [CMat; 2] {
    let mut clock = zeros(n, n);
    let mut shift = zeros(n, n);
    for k in 0..n {
        let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        clock[(k, k)] = C64::from_polar(1.0, ang) + re(k as f64 * 0.25);
        shift[((k + 1) % n, k)] = ONE;
    }
    if n == 1 {
        shift[(0, 0)] = ONE;
    }
    [clock, shift]
}

pub fn max_or_zero(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn kron_leg_convention() {
        let a = unit(2, 0, 1);
        let b = unit(3, 2, 0);
        let k = kron(&a, &b);
        assert_eq!(k[(2, 3)], ONE);
        assert_eq!(block(&k, 3, 2, 0), a);
    }

    #[test]
    fn blocks_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 6, 6);
        let bs: Vec<CMat> = (0..9).map(|k| block(&a, 3, k / 3, k % 3)).collect();
        assert!(dist_frob(&from_blocks(&bs, 3), &a) < 1e-14);
    }

    #[test]
    fn permute_swaps_kron_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 2, 2);
        let b = random_matrix(&mut rng, 3, 3);
        let swapped = permute_legs(&kron(&a, &b), &[2, 3], &[1, 0]);
        assert!(dist_frob(&swapped, &kron(&b, &a)) < 1e-14);
    }

    #[test]
    fn insert_middle_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_matrix(&mut rng, 2, 2);
        let y = random_matrix(&mut rng, 3, 3);
        let u = kron(&x, &y);
        let got = insert_middle(&u, 3, 2);
        let want = kron(&kron(&x, &eye(2)), &y);
        assert!(dist_frob(&got, &want) < 1e-14);
    }

    #[test]
    fn polar_factor_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(&mut rng, 5);
        assert!(unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn null_space_of_commutator() {
        let [c, s] = clock_shift(3);
        let ops: Vec<CMat> = [c, s]
            .iter()
            .map(|x| sandwich_op(x, &eye(3)) - sandwich_op(&eye(3), x))
            .collect();
        let ns = null_space(&ops, 9, 1e-8);
        assert_eq!(ns.ncols(), 1);
    }

    #[test]
    fn norm2_of_matrix_unit() {
        assert!((norm2(&unit(2, 0, 0)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((norm2(&eye(7)) - 1.0).abs() < 1e-15);
    }
}
