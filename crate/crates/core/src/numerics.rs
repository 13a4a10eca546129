//! Small dense-matrix primitives.
//!
//! Everything here works on [`DenseMatrix`], a row-major `f64` matrix sized
//! for desk-scale networks (tens of processes, a few hundred stacked lags at
//! most). Factorizations are written out directly; no BLAS.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math;

/// Relative tolerance used when checking that a matrix is symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Largest condition estimate accepted before a solve is declared singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Margin below 1 required of the spectral radius of a stable system.
pub const STABILITY_MARGIN: f64 = 1e-6;

/// Row-major dense matrix with finite entries.
///
/// Serialized as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<f64>>", try_from = "Vec<Vec<f64>>")]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dims("matrix must have at least one row and one column"));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(alloc::format!(
                "{} entries supplied for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::dims("ragged rows"));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    fn zip_with(&self, rhs: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    /// Submatrix made of the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &DenseMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(i));
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            let src = (r0 + i) * self.cols + c0;
            out.data[i * cols..(i + 1) * cols].copy_from_slice(&self.data[src..src + cols]);
        }
        out
    }

    pub fn block_diag(a: &DenseMatrix, b: &DenseMatrix) -> Self {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        out.set_block(0, 0, a);
        out.set_block(a.rows, a.cols, b);
        out
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let tol = rel_tol * self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// `(M + Mᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..i {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub(crate) fn add_diag(&mut self, eps: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += eps;
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl From<DenseMatrix> for Vec<Vec<f64>> {
    fn from(m: DenseMatrix) -> Self {
        m.data.chunks(m.cols).map(|r| r.to_vec()).collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for DenseMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        DenseMatrix::from_rows(&refs)
    }
}

/// Lower-triangular Cholesky factor `L` with `M = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Factors a symmetric matrix; only the lower triangle is read.
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("Cholesky needs a square matrix"));
        }
        let n = m.rows;
        let mut l = m.clone();
        for j in 0..n {
            let mut d = l[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = math::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = l[(i, j)];
                let (ri, rj) = (i * n, j * n);
                for k in 0..j {
                    s -= l.data[ri + k] * l.data[rj + k];
                }
                l[(i, j)] = s / d;
            }
            for k in j + 1..n {
                l[(j, k)] = 0.0;
            }
        }
        Ok(Self { l })
    }

    pub fn factor_lower(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diag().iter().map(|&d| math::ln(d)).sum::<f64>()
    }

    /// Cheap lower bound on the 2-norm condition number, `(max Lᵢᵢ / min Lᵢᵢ)²`.
    pub fn condition_estimate(&self) -> f64 {
        let d = self.l.diag();
        let max = d.iter().fold(0.0_f64, |a, &b| a.max(b));
        let min = d.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let r = max / min;
        r * r
    }

    /// Solves `L X = B` in place, `B` given with one right-hand side per column.
    pub fn forward_solve(&self, b: &mut DenseMatrix) {
        let n = self.dim();
        assert_eq!(b.rows, n);
        let m = b.cols;
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                if lik == 0.0 {
                    continue;
                }
                for c in 0..m {
                    let v = b.data[k * m + c];
                    b.data[i * m + c] -= lik * v;
                }
            }
            let d = self.l[(i, i)];
            for c in 0..m {
                b.data[i * m + c] /= d;
            }
        }
    }

    /// Solves `Lᵀ X = B` in place.
    pub fn backward_solve(&self, b: &mut DenseMatrix) {
        let n = self.dim();
        assert_eq!(b.rows, n);
        let m = b.cols;
        for i in (0..n).rev() {
            for k in i + 1..n {
                let lki = self.l[(k, i)];
                if lki == 0.0 {
                    continue;
                }
                for c in 0..m {
                    let v = b.data[k * m + c];
                    b.data[i * m + c] -= lki * v;
                }
            }
            let d = self.l[(i, i)];
            for c in 0..m {
                b.data[i * m + c] /= d;
            }
        }
    }

    /// Solves `M X = B`.
    pub fn solve(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut x = b.clone();
        self.forward_solve(&mut x);
        self.backward_solve(&mut x);
        x
    }
}

/// Natural-log determinant of a symmetric positive definite matrix, via Cholesky.
pub fn log_det_pd(m: &DenseMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::dims("log-determinant needs a square matrix"));
    }
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::invalid("matrix is not symmetric"));
    }
    Ok(Cholesky::factor(&m.symmetrized())?.log_det())
}

/// Solves the square system `A x = b` by LU with partial pivoting.
///
/// Fails with [`Error::SingularSolve`] when the pivot ratio suggests a
/// condition number above [`MAX_CONDITION`].
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows != b.len() {
        return Err(Error::dims("LU solve shape mismatch"));
    }
    let n = a.rows;
    let mut lu = a.data.clone();
    let mut x = b.to_vec();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::SingularSolve { condition: f64::INFINITY });
    }
    let mut pmax = 0.0_f64;
    let mut pmin = f64::INFINITY;
    for k in 0..n {
        let (mut piv, mut best) = (k, lu[k * n + k].abs());
        for i in k + 1..n {
            let v = lu[i * n + k].abs();
            if v > best {
                piv = i;
                best = v;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularSolve { condition: f64::INFINITY });
        }
        if piv != k {
            for j in 0..n {
                lu.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        pmax = pmax.max(best);
        pmin = pmin.min(best);
        let d = lu[k * n + k];
        for i in k + 1..n {
            let f = lu[i * n + k] / d;
            if f == 0.0 {
                continue;
            }
            lu[i * n + k] = f;
            for j in k + 1..n {
                lu[i * n + j] -= f * lu[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    let condition = pmax / pmin;
    if condition > MAX_CONDITION {
        return Err(Error::SingularSolve { condition });
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= lu[i * n + j] * x[j];
        }
        x[i] = s / lu[i * n + i];
    }
    Ok(x)
}

/// Largest eigenvalue modulus of a square matrix.
///
/// Uses Gelfand's formula `ρ(A) = lim ‖A^k‖^{1/k}` along `k = 2^m`, with the
/// iterate renormalized after every squaring. Since `‖A^k‖ ≥ ρ(A)^k` for any
/// norm the estimate approaches the radius from above, and squaring reaches
/// `k ≈ 2^50` within fifty steps, so the polynomial factor from Jordan
/// blocks is negligible. Nilpotent inputs reach an exact zero.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    const MAX_SQUARINGS: usize = 200;
    if !a.is_square() {
        return Err(Error::dims("spectral radius needs a square matrix"));
    }
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut b = a.scale(1.0 / norm);
    // log of ‖A^(2^m)‖^(1/2^m)
    let mut log_est = math::ln(norm);
    let mut weight = 0.5;
    for _ in 0..MAX_SQUARINGS {
        let b2 = b.matmul(&b);
        let n2 = b2.frobenius_norm();
        if n2 == 0.0 {
            return Ok(0.0);
        }
        let step = weight * math::ln(n2);
        log_est += step;
        if step.abs() <= 1e-15 * log_est.abs().max(1.0) {
            return Ok(math::exp(log_est));
        }
        b = b2.scale(1.0 / n2);
        weight *= 0.5;
    }
    Err(Error::NonConvergence { iterations: MAX_SQUARINGS })
}

/// Solves `S = A S Aᵀ + Q` through the Kronecker system `(I − A⊗A) vec S = vec Q`.
///
/// The result is symmetrized.
pub fn solve_discrete_lyapunov(a: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() || !q.is_square() || a.rows != q.rows {
        return Err(Error::dims("Lyapunov equation needs square A and Q of equal size"));
    }
    if !q.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::invalid("Lyapunov right-hand side is not symmetric"));
    }
    let radius = spectral_radius(a)?;
    if radius >= 1.0 - STABILITY_MARGIN {
        return Err(Error::UnstableSystem { radius });
    }
    let n = a.rows;
    let nn = n * n;
    let mut sys = DenseMatrix::identity(nn);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..n {
                    sys[(i * n + j, k * n + l)] -= aik * a[(j, l)];
                }
            }
        }
    }
    let s = lu_solve(&sys, q.symmetrized().as_slice())?;
    Ok(DenseMatrix { rows: n, cols: n, data: s }.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd_sample(n: usize, seed: u64) -> DenseMatrix {
        // A Aᵀ + n I from a deterministic pseudo-random A.
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = DenseMatrix::new(n, n, (0..n * n).map(|_| next()).collect()).unwrap();
        a.matmul(&a.transpose()).add(&DenseMatrix::identity(n).scale(0.5))
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
    fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.clone();
        for _ in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[(i, j)].powi(2)).sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        a.diag()
    }

    #[test]
    fn log_det_identity_and_diag() {
        assert_eq!(log_det_pd(&DenseMatrix::identity(3)).unwrap(), 0.0);
        let d = log_det_pd(&DenseMatrix::from_diag(&[2.0, 2.0])).unwrap();
        assert!((d - 1.386294361119890_6).abs() < 1e-12);
    }

    #[test]
    fn log_det_matches_eigenvalue_product() {
        let m = spd_sample(4, 7);
        let oracle: f64 = jacobi_eigenvalues(&m).iter().map(|&l| libm::log(l)).sum();
        assert!((log_det_pd(&m).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn log_det_rejects_indefinite() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(matches!(log_det_pd(&m), Err(Error::NotPositiveDefinite { .. })));
        let m = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert!(matches!(log_det_pd(&m), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn log_det_rejects_asymmetric() {
        let m = DenseMatrix::from_rows(&[&[2.0, 0.5], &[0.0, 2.0]]).unwrap();
        assert!(matches!(log_det_pd(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn log_det_block_diag_additive() {
        let (a, b) = (spd_sample(3, 1), spd_sample(3, 2));
        let lhs = log_det_pd(&a).unwrap() + log_det_pd(&b).unwrap();
        let rhs = log_det_pd(&DenseMatrix::block_diag(&a, &b)).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn cholesky_solve() {
        let m = spd_sample(5, 3);
        let x = DenseMatrix::new(5, 2, (0..10).map(|v| v as f64 - 3.0).collect()).unwrap();
        let b = m.matmul(&x);
        let got = Cholesky::factor(&m).unwrap().solve(&b);
        assert!(got.sub(&x).max_abs() < 1e-10);
    }

    #[test]
    fn lyapunov_zero_dynamics() {
        let q = spd_sample(3, 11);
        let s = solve_discrete_lyapunov(&DenseMatrix::zeros(3, 3), &q).unwrap();
        assert!(s.sub(&q.symmetrized()).max_abs() < 1e-14);
    }

    #[test]
    fn lyapunov_scalar_geometric_series() {
        let a = DenseMatrix::from_rows(&[&[0.5]]).unwrap();
        let q = DenseMatrix::from_rows(&[&[1.0]]).unwrap();
        let s = solve_discrete_lyapunov(&a, &q).unwrap();
        assert!((s[(0, 0)] - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn lyapunov_matches_fixed_point_iteration() {
        let a = DenseMatrix::from_rows(&[&[0.5, 0.2, -0.1], &[0.0, 0.3, 0.4], &[0.25, -0.2, 0.1]]).unwrap();
        let q = spd_sample(3, 5);
        let s = solve_discrete_lyapunov(&a, &q).unwrap();
        let resid = s.sub(&a.matmul(&s).matmul(&a.transpose())).sub(&q);
        assert!(resid.max_abs() < 1e-10);
        // oracle: S_{k+1} = A S_k Aᵀ + Q from S_0 = 0
        let mut it = DenseMatrix::zeros(3, 3);
        for _ in 0..2000 {
            it = a.matmul(&it).matmul(&a.transpose()).add(&q);
        }
        assert!(s.sub(&it).max_abs() < 1e-8);
        assert!(s.is_symmetric(1e-12));
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.2]]).unwrap();
        let r = solve_discrete_lyapunov(&a, &DenseMatrix::identity(2));
        assert!(matches!(r, Err(Error::UnstableSystem { .. })));
    }

    #[test]
    fn spectral_radius_examples() {
        assert!((spectral_radius(&DenseMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-12);
        let mut nil = DenseMatrix::zeros(5, 5);
        for i in 0..5 {
            for j in 0..i {
                nil[(i, j)] = 1.0 + (i * j) as f64;
            }
        }
        assert_eq!(spectral_radius(&nil).unwrap(), 0.0);
        let ar1 = DenseMatrix::from_rows(&[&[0.9]]).unwrap();
        assert!((spectral_radius(&ar1).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_complex_pair_and_jordan() {
        // rotation scaled by 0.8: eigenvalues 0.8 e^{±iθ}
        let (c, s) = (0.8 * libm::cos(0.7), 0.8 * libm::sin(0.7));
        let rot = DenseMatrix::from_rows(&[&[c, -s], &[s, c]]).unwrap();
        assert!((spectral_radius(&rot).unwrap() - 0.8).abs() < 1e-12);
        let jordan = DenseMatrix::from_rows(&[&[0.6, 5.0, 0.0], &[0.0, 0.6, 5.0], &[0.0, 0.0, 0.6]]).unwrap();
        assert!((spectral_radius(&jordan).unwrap() - 0.6).abs() < 1e-8);
        // AR(2) companion with roots 0.9 and -0.5
        let comp = DenseMatrix::from_rows(&[&[0.4, 0.45], &[1.0, 0.0]]).unwrap();
        assert!((spectral_radius(&comp).unwrap() - 0.9).abs() < 1e-10);
    }

    #[test]
    fn matrix_rejects_non_finite_and_empty() {
        assert!(DenseMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(DenseMatrix::new(0, 1, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn square(n: usize) -> impl Strategy<Value = DenseMatrix> {
            proptest::collection::vec(-1.0f64..1.0, n * n).prop_map(move |d| DenseMatrix::new(n, n, d).unwrap())
        }

        proptest! {
            #[test]
            fn radius_is_homogeneous(a in square(4), c in -3.0f64..3.0) {
                let r = spectral_radius(&a).unwrap();
                let rc = spectral_radius(&a.scale(c)).unwrap();
                prop_assert!((rc - c.abs() * r).abs() < 1e-8 * (1.0 + r));
            }

            #[test]
            fn lyapunov_symmetric_psd(a in square(3), g in square(3)) {
                let r = spectral_radius(&a).unwrap();
                let a = a.scale(0.9 / r.max(1.0));
                let q = g.matmul(&g.transpose());
                let s = solve_discrete_lyapunov(&a, &q).unwrap();
                prop_assert!(s.is_symmetric(1e-12));
                let min_eig = jacobi_eigenvalues(&s).into_iter().fold(f64::INFINITY, f64::min);
                prop_assert!(min_eig > -1e-10 * (1.0 + s.max_abs()));
            }

            #[test]
            fn log_det_block_additivity(a in square(3), b in square(2)) {
                let a = a.matmul(&a.transpose()).add(&DenseMatrix::identity(3).scale(0.1));
                let b = b.matmul(&b.transpose()).add(&DenseMatrix::identity(2).scale(0.1));
                let lhs = log_det_pd(&a).unwrap() + log_det_pd(&b).unwrap();
                let rhs = log_det_pd(&DenseMatrix::block_diag(&a, &b)).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }
}
