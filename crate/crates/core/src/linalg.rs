//! Dense complex Hermitian matrix services: eigendecomposition, functions of
//! matrices, and Fredholm determinants of finite matrices.
//!
//! Truncated lattice Hamiltonians are real symmetric tridiagonal, so `eigh`
//! dispatches those to a Sturm-bisection / inverse-iteration path that scales
//! as O(n²) instead of the dense O(n³) route. Both paths are deterministic
//! for a fixed input.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SpectralError};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Frobenius distance between a matrix and the identity, ‖M − I‖_F.
pub fn identity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = m[(i, j)] - if i == j { Complex64::ONE } else { Complex64::ZERO };
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

/// ‖U*U − I‖_F, the unitarity defect of `u`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    identity_defect(&(u.adjoint() * u))
}

fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// A validated Hermitian matrix.
///
/// Construction symmetrizes the input exactly after checking that the
/// off-Hermitian part is at rounding level, so downstream code may rely on
/// `m[(i,j)] == conj(m[(j,i)])` bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMat,
}

impl HermitianMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(SpectralError::DimensionMismatch {
                expected: m.nrows().max(1),
                got: m.ncols(),
            });
        }
        if !all_finite(&m) {
            return Err(SpectralError::NonFinite("matrix entries".into()));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let tol = 1e-12 * scale;
        for i in 0..m.nrows() {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                    return Err(SpectralError::NonFinite(format!(
                        "matrix is not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        let sym = CMat::from_fn(m.nrows(), m.ncols(), |i, j| {
            0.5 * (m[(i, j)] + m[(j, i)].conj())
        });
        Ok(HermitianMatrix { m: sym })
    }

    /// Real symmetric input, promoted to complex.
    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    /// Real symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn from_tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n {
            return Err(SpectralError::DimensionMismatch {
                expected: n.max(1),
                got: off.len() + 1,
            });
        }
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(diag[i], 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = Complex64::new(off[i], 0.0);
                m[(i + 1, i)] = Complex64::new(off[i], 0.0);
            }
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    /// Diagonal and off-diagonal when the matrix is real and tridiagonal.
    fn real_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let z = self.m[(i, j)];
                if z.im != 0.0 {
                    return None;
                }
                if i.abs_diff(j) > 1 && z.re != 0.0 {
                    return None;
                }
            }
        }
        let diag: Vec<f64> = (0..n).map(|i| self.m[(i, i)].re).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| self.m[(i, i + 1)].re).collect();
        Some((diag, off))
    }
}

/// Ascending eigenvalues with a unitary matrix of column eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl EigenSystem {
    /// ‖U diag(λ) U* − H‖_F.
    pub fn reconstruction_defect(&self, h: &HermitianMatrix) -> f64 {
        let lam = CVec::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
        );
        let rec = &self.eigenvectors * CMat::from_diagonal(&lam) * self.eigenvectors.adjoint();
        (rec - h.matrix()).norm()
    }
}

/// Size above which real tridiagonal inputs take the Sturm/inverse-iteration
/// path instead of the dense solver.
const TRIDIAG_DISPATCH_DIM: usize = 32;

/// Unitary diagonalization of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenSystem> {
    if h.dim() >= TRIDIAG_DISPATCH_DIM {
        if let Some((diag, off)) = h.real_tridiagonal() {
            let (vals, vecs) = tridiag::eigh_tridiagonal(&diag, &off);
            return Ok(EigenSystem {
                eigenvalues: vals,
                eigenvectors: vecs,
            });
        }
    }
    let se = h.m.clone().symmetric_eigen();
    let n = h.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues only (no eigenvector accumulation).
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    if h.dim() >= TRIDIAG_DISPATCH_DIM {
        if let Some((diag, off)) = h.real_tridiagonal() {
            return Ok(tridiag::eigenvalues_tridiagonal(&diag, &off));
        }
    }
    let mut vals: Vec<f64> = h.m.clone().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// f(H) = U f(Λ) U* through the eigendecomposition.
pub fn matrix_function<F: Fn(f64) -> f64>(h: &HermitianMatrix, f: F) -> Result<HermitianMatrix> {
    let es = eigh(h)?;
    let n = h.dim();
    let mut fvals = Vec::with_capacity(n);
    for &lam in &es.eigenvalues {
        let y = f(lam);
        if !y.is_finite() {
            return Err(SpectralError::Evaluation(format!(
                "scalar function returned {y} at eigenvalue {lam}"
            )));
        }
        fvals.push(Complex64::new(y, 0.0));
    }
    let diag = CMat::from_diagonal(&CVec::from_vec(fvals));
    let m = &es.eigenvectors * diag * es.eigenvectors.adjoint();
    // Rounding can leave a ~1e-16 anti-Hermitian part; symmetrize.
    HermitianMatrix::new(m)
}

/// Fredholm determinant det(I + A) of a finite matrix, via pivoted LU.
pub fn fredholm_det(a: &CMat) -> Result<Complex64> {
    if a.nrows() != a.ncols() {
        return Err(SpectralError::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if !all_finite(a) {
        return Err(SpectralError::NonFinite("determinant input".into()));
    }
    let n = a.nrows();
    let m = CMat::identity(n, n) + a;
    Ok(m.lu().determinant())
}

/// Solve a tridiagonal system (diag, sub/super-diagonal `off`, symmetric
/// placement) in place, with partial pivoting. Used by the truncated-lattice
/// oracles and inverse iteration; not a general sparse solver.
pub fn solve_tridiagonal(diag: &[Complex64], off: &[Complex64], rhs: &mut [Complex64]) {
    let n = diag.len();
    assert_eq!(off.len() + 1, n);
    assert_eq!(rhs.len(), n);
    if n == 1 {
        rhs[0] /= diag[0];
        return;
    }
    // Banded LU with row swaps; fill-in limited to a second superdiagonal.
    let mut d: Vec<Complex64> = diag.to_vec();
    let mut u1: Vec<Complex64> = off.to_vec();
    let mut u2: Vec<Complex64> = vec![Complex64::ZERO; n.saturating_sub(2)];
    for i in 0..n - 1 {
        let mut sub = off[i];
        if sub.norm() > d[i].norm() {
            std::mem::swap(&mut d[i], &mut sub);
            let tmp = u1[i];
            u1[i] = d[i + 1];
            d[i + 1] = tmp;
            if i + 2 < n {
                u2[i] = u1[i + 1];
                u1[i + 1] = Complex64::ZERO;
            }
            rhs.swap(i, i + 1);
        }
        let m = sub / d[i];
        d[i + 1] -= m * u1[i];
        if i + 2 < n {
            u1[i + 1] -= m * u2[i];
        }
        let r = rhs[i];
        rhs[i + 1] -= m * r;
    }
    rhs[n - 1] /= d[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - u1[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - u1[i] * rhs[i + 1] - u2[i] * rhs[i + 2]) / d[i];
    }
}

pub(crate) mod tridiag {
    //! Sturm bisection and inverse iteration for real symmetric tridiagonal
    //! matrices. Off-diagonal zeros split the problem into independent
    //! Jacobi blocks, each of which has simple spectrum.

    use super::{CMat, Complex64};

    const PIVOT_GUARD: f64 = 1e-300;

    /// Number of eigenvalues strictly less than `x` (Sturm sequence count).
    pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
        let n = diag.len();
        let mut count = 0;
        let mut q = diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < PIVOT_GUARD {
                if q >= 0.0 {
                    PIVOT_GUARD
                } else {
                    -PIVOT_GUARD
                }
            } else {
                q
            };
            q = (diag[i] - x) - off[i - 1] * off[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
        let n = diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { off[i].abs() } else { 0.0 };
            lo = lo.min(diag[i] - left - right);
            hi = hi.max(diag[i] + left + right);
        }
        (lo - 1e-10 * (1.0 + hi.abs()), hi + 1e-10 * (1.0 + hi.abs()))
    }

    fn block_ranges(off: &[f64]) -> Vec<(usize, usize)> {
        let n = off.len() + 1;
        let mut ranges = Vec::new();
        let mut start = 0;
        for (i, &e) in off.iter().enumerate() {
            if e == 0.0 {
                ranges.push((start, i + 1));
                start = i + 1;
            }
        }
        ranges.push((start, n));
        ranges
    }

    fn block_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
        let n = diag.len();
        if n == 1 {
            return vec![diag[0]];
        }
        let (glo, ghi) = gershgorin(diag, off);
        let scale = glo.abs().max(ghi.abs()).max(1.0);
        let mut vals = Vec::with_capacity(n);
        // Bracket shrinking: eigenvalue k is bounded below by eigenvalue k-1.
        let mut lo_base = glo;
        for k in 0..n {
            let mut lo = lo_base;
            let mut hi = ghi;
            while hi - lo > 4.0 * f64::EPSILON * scale {
                let mid = 0.5 * (lo + hi);
                if sturm_count(diag, off, mid) <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            vals.push(root);
            lo_base = lo;
        }
        vals
    }

    pub fn eigenvalues_tridiagonal(diag: &[f64], off: &[f64]) -> Vec<f64> {
        let mut vals = Vec::with_capacity(diag.len());
        for (a, b) in block_ranges(off) {
            vals.extend(block_eigenvalues(&diag[a..b], &off[a..b.saturating_sub(1)]));
        }
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Deterministic full-spectrum inverse-iteration start vector.
    fn seed_vector(n: usize, salt: u64) -> Vec<f64> {
        let mut state = 0x9e3779b97f4a7c15_u64 ^ salt.wrapping_mul(0xd1342543de82ef95);
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            v.push(((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5);
        }
        v
    }

    fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [Complex64]) {
        let n = diag.len();
        let d: Vec<Complex64> = diag
            .iter()
            .map(|&x| Complex64::new(x - shift, 0.0))
            .collect();
        let e: Vec<Complex64> = off.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        super::solve_tridiagonal(&d, &e, rhs);
        // A singular pivot simply produces inf/nan; retry with a nudged shift.
        if rhs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            let scale = diag.iter().fold(0.0_f64, |a, &x| a.max(x.abs())).max(1.0);
            let d: Vec<Complex64> = diag
                .iter()
                .map(|&x| Complex64::new(x - shift - 1e-14 * scale, 0.0))
                .collect();
            for z in rhs.iter_mut() {
                *z = Complex64::new(1.0, 0.0);
            }
            super::solve_tridiagonal(&d, &e, rhs);
        }
    }

    pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> (Vec<f64>, CMat) {
        let n = diag.len();
        let mut entries: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(n);
        for (a, b) in block_ranges(off) {
            let bd = &diag[a..b];
            let be = &off[a..b.saturating_sub(1)];
            let vals = block_eigenvalues(bd, be);
            let scale = vals.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
            for (k, &lam) in vals.iter().enumerate() {
                let mut x: Vec<Complex64> = seed_vector(b - a, k as u64)
                    .into_iter()
                    .map(|t| Complex64::new(t, 0.0))
                    .collect();
                for _ in 0..2 {
                    solve_shifted(bd, be, lam, &mut x);
                    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    for z in x.iter_mut() {
                        *z /= norm;
                    }
                }
                // Orthogonalize against neighbors in a near-degenerate cluster.
                let mut j = entries.len();
                while j > 0 && entries.len() - j < 8 {
                    j -= 1;
                    let (prev_lam, prev_vec) = &entries[j];
                    if (lam - prev_lam).abs() > 1e-8 * scale {
                        break;
                    }
                    let dot: Complex64 = prev_vec
                        .iter()
                        .zip(&x)
                        .map(|(p, q)| p.conj() * q)
                        .sum();
                    for (xi, pi) in x.iter_mut().zip(prev_vec) {
                        *xi -= dot * pi;
                    }
                }
                let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in x.iter_mut() {
                    *z /= norm;
                }
                // Fix the sign so the result does not depend on the seed.
                let (imax, _) = x
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |(bi, bv), (i, z)| {
                        if z.norm_sqr() > bv {
                            (i, z.norm_sqr())
                        } else {
                            (bi, bv)
                        }
                    });
                if x[imax].re < 0.0 {
                    for z in x.iter_mut() {
                        *z = -*z;
                    }
                }
                let mut full = vec![Complex64::ZERO; n];
                full[a..b].copy_from_slice(&x);
                entries.push((lam, full));
            }
        }
        entries.sort_by(|p, q| p.0.total_cmp(&q.0));
        let vals: Vec<f64> = entries.iter().map(|(l, _)| *l).collect();
        let mut vecs = CMat::zeros(n, n);
        for (col, (_, v)) in entries.iter().enumerate() {
            for (row, &z) in v.iter().enumerate() {
                vecs[(row, col)] = z;
            }
        }
        (vals, vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let raw = CMat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::new(0.5 * (&raw + raw.adjoint())).unwrap()
    }

    #[test]
    fn eigh_identity_and_diagonal() {
        let id = HermitianMatrix::new(CMat::identity(2, 2)).unwrap();
        let es = eigh(&id).unwrap();
        assert_abs_diff_eq!(es.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(es.eigenvalues[1], 1.0, epsilon = 1e-14);
        assert!(unitarity_defect(&es.eigenvectors) < 1e-12);

        let d = HermitianMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]))
            .unwrap();
        let es = eigh(&d).unwrap();
        assert_eq!(es.eigenvalues, vec![-1.0, 3.0]);
    }

    #[test]
    fn eigh_offdiagonal_pair() {
        // [[0,1],[1,0]] has characteristic polynomial λ² − 1.
        let h = HermitianMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))
            .unwrap();
        let es = eigh(&h).unwrap();
        assert_abs_diff_eq!(es.eigenvalues[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(es.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigh_rejects_non_hermitian_and_non_finite() {
        let m = CMat::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 1.0));
        assert!(HermitianMatrix::new(m).is_err());
        let mut m = CMat::identity(2, 2);
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn eigh_orthonormal_columns_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 5, 17, 64] {
            let h = random_hermitian(&mut rng, n);
            let es = eigh(&h).unwrap();
            assert!(unitarity_defect(&es.eigenvectors) <= 1e-10);
            assert!(es.reconstruction_defect(&h) <= 1e-10 * h.matrix().norm().max(1.0));
            for w in es.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn tridiagonal_path_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &n in &[33usize, 80] {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.2..1.5)).collect();
            let h = HermitianMatrix::from_tridiagonal(&diag, &off).unwrap();
            // Tridiagonal dispatch.
            let es = eigh(&h).unwrap();
            assert!(unitarity_defect(&es.eigenvectors) <= 1e-11);
            assert!(es.reconstruction_defect(&h) <= 1e-11 * h.matrix().norm());
            // Dense reference on the same matrix.
            let se = h.matrix().clone().symmetric_eigen();
            let mut dense: Vec<f64> = se.eigenvalues.iter().copied().collect();
            dense.sort_by(f64::total_cmp);
            for (a, b) in es.eigenvalues.iter().zip(&dense) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-11);
            }
            let direct = eigenvalues(&h).unwrap();
            for (a, b) in es.eigenvalues.iter().zip(&direct) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn tridiagonal_blocks_with_zero_coupling() {
        // A zero off-diagonal splits into two decoupled Jacobi blocks.
        let diag = vec![0.0; 40];
        let mut off = vec![1.0; 39];
        off[19] = 0.0;
        let h = HermitianMatrix::from_tridiagonal(&diag, &off).unwrap();
        let es = eigh(&h).unwrap();
        assert!(unitarity_defect(&es.eigenvectors) <= 1e-11);
        assert!(es.reconstruction_defect(&h) <= 1e-11 * h.matrix().norm());
    }

    #[test]
    fn matrix_function_identity_one_and_sin() {
        let h = HermitianMatrix::from_real(&DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 0.0, 0.0, std::f64::consts::FRAC_PI_2],
        ))
        .unwrap();
        let same = matrix_function(&h, |x| x).unwrap();
        assert!((same.matrix() - h.matrix()).norm() < 1e-13);
        let one = matrix_function(&h, |_| 1.0).unwrap();
        assert!(identity_defect(one.matrix()) < 1e-13);
        let s = matrix_function(&h, f64::sin).unwrap();
        assert_abs_diff_eq!(s.matrix()[(0, 0)].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.matrix()[(1, 1)].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn matrix_function_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 6);
            let f = |x: f64| (0.3 * x).exp();
            let g = |x: f64| 1.0 + x * x;
            let fg = matrix_function(&h, |x| f(x) * g(x)).unwrap();
            let prod = matrix_function(&h, f).unwrap().into_matrix()
                * matrix_function(&h, g).unwrap().into_matrix();
            assert!((fg.matrix() - prod).norm() <= 1e-9);
        }
    }

    #[test]
    fn matrix_function_rejects_non_finite_values() {
        let h = HermitianMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert!(matrix_function(&h, |x| 1.0 / x).is_err());
    }

    #[test]
    fn fredholm_det_basics() {
        let zero = CMat::zeros(3, 3);
        assert_abs_diff_eq!(fredholm_det(&zero).unwrap().re, 1.0, epsilon = 1e-14);
        let d = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        assert_abs_diff_eq!(fredholm_det(&d).unwrap().re, 6.0, epsilon = 1e-13);
    }

    #[test]
    fn fredholm_det_rank_one() {
        // det(I + xy*) = 1 + y*x (matrix determinant lemma).
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 5;
        let x = CVec::from_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let y = CVec::from_fn(n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let a = &x * y.adjoint();
        let expected = Complex64::ONE + y.dotc(&x);
        let got = fredholm_det(&a).unwrap();
        assert!((got - expected).norm() < 1e-12);
    }

    #[test]
    fn fredholm_det_dimension_swap() {
        // det(I + AB) = det(I + BA); this identity carries the channel-space
        // determinant formula for the scattering matrix.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = rng.random_range(1..6);
            let m = rng.random_range(1..6);
            let a = CMat::from_fn(n, m, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let b = CMat::from_fn(m, n, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let d1 = fredholm_det(&(&a * &b)).unwrap();
            let d2 = fredholm_det(&(&b * &a)).unwrap();
            assert!((d1 - d2).norm() <= 1e-9 * d1.norm().max(1.0));
        }
    }

    #[test]
    fn tridiagonal_solver_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 50;
        let diag: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)))
            .collect();
        let off: Vec<Complex64> = (0..n - 1)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let mut full = CMat::zeros(n, n);
        for i in 0..n {
            full[(i, i)] = diag[i];
            if i + 1 < n {
                full[(i, i + 1)] = off[i];
                full[(i + 1, i)] = off[i];
            }
        }
        let rhs = CVec::from_fn(n, |i, _| Complex64::new(i as f64 / n as f64 - 0.3, 0.1));
        let mut x: Vec<Complex64> = rhs.iter().copied().collect();
        solve_tridiagonal(&diag, &off, &mut x);
        let dense = full.lu().solve(&rhs).unwrap();
        for (a, b) in x.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}
