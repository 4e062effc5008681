//! Dense complex-matrix arithmetic and spectral decompositions.
//!
//! Everything downstream (states, criteria, maps, the protocol simulation)
//! runs on [`ComplexMatrix`]: a row-major, double-precision, owned dense
//! matrix. Sizes stay modest — side lengths up to a few thousand — so there
//! is no sparsity, no blocking, no GPU. Decompositions ([`ComplexMatrix::eigh`],
//! [`ComplexMatrix::svd`]) are delegated to nalgebra and re-checked by the
//! test suite against reconstruction-residual bounds; the accuracy contract,
//! not the algorithm, is what the rest of the crate relies on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    /// Identity matrix of side `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Build entrywise from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Wrap a row-major entry vector. Rejects length mismatches and
    /// non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                len: data.len(),
                rows,
                cols,
            });
        }
        let m = ComplexMatrix { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::Malformed("matrix contains NaN or Inf".into()));
        }
        Ok(m)
    }

    /// Square matrix with the given diagonal and zeros elsewhere.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Sum of diagonal entries. Requires a square matrix.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.svd().singular_values.first().copied().unwrap_or(0.0)
    }

    /// Max entry of |m - m†|; how far from Hermitian the matrix is.
    /// Returns `None` for non-square input.
    pub fn hermiticity_defect(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Some(dev)
    }

    /// Scale every entry.
    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    /// Kronecker product: entry ((i·rb+k), (j·cb+l)) = a(i,j)·b(k,l).
    pub fn kron(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (b.rows, b.cols);
        let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let aij = self[(i, j)];
                if aij == Complex64::ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// The input must be Hermitian to within [`tol::HERMITICITY`] on the max
    /// entry of |h - h†|; inputs inside the tolerance are symmetrized as
    /// (h + h†)/2 before decomposition. Eigenvalues come back ascending with
    /// column-paired orthonormal eigenvectors. Within a degenerate eigenspace
    /// the basis is solver-dependent; callers must not rely on it.
    pub fn eigh(&self) -> Result<Spectrum> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let dev = self.hermiticity_defect().expect("square");
        if dev > tol::HERMITICITY {
            return Err(Error::NotHermitian {
                max_dev: dev,
                tol: tol::HERMITICITY,
            });
        }
        let n = self.rows;
        let sym = Self::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let eig = sym.to_na().symmetric_eigen();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors =
            ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Singular value decomposition `a = u · diag(s) · w†` with `s`
    /// nonnegative and descending.
    pub fn svd(&self) -> Svd {
        let svd = self.to_na().svd(true, true);
        let u_na = svd.u.expect("u requested");
        let vt_na = svd.v_t.expect("v_t requested");
        let k = svd.singular_values.len();

        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u = ComplexMatrix::from_fn(self.rows, k, |i, j| u_na[(i, order[j])]);
        // nalgebra hands back v†; our `w` satisfies a = u diag(s) w†.
        let w = ComplexMatrix::from_fn(self.cols, k, |i, j| vt_na[(order[j], i)].conj());
        Svd {
            singular_values,
            u,
            w,
        }
    }

    pub(crate) fn to_na(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_na(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in +");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in -");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-Complex64::ONE)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Dense matrix product (i-k-j loop order for row-major locality).
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in *");
        let (m, k_dim, n) = (self.rows, self.cols, rhs.cols);
        let mut out = ComplexMatrix::zeros(m, n);
        for i in 0..m {
            for k in 0..k_dim {
                let aik = self.data[i * k_dim + k];
                if aik == Complex64::ZERO {
                    continue;
                }
                let row_b = &rhs.data[k * n..(k + 1) * n];
                let row_o = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    row_o[j] += aik * row_b[j];
                }
            }
        }
        out
    }
}

impl Mul<Complex64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: Complex64) -> ComplexMatrix {
        self.scale(s)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 8 && self.cols <= 8 {
            for i in 0..self.rows {
                write!(f, "  [")?;
                for j in 0..self.cols {
                    let z = self[(i, j)];
                    write!(f, " {:.4}{:+.4}i", z.re, z.im)?;
                }
                writeln!(f, " ]")?;
            }
        }
        Ok(())
    }
}

/// Frobenius distance ‖a − b‖_F. Panics on shape mismatch.
pub fn frob_dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "shape mismatch in frob_dist"
    );
    a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Result of [`ComplexMatrix::eigh`]: ascending eigenvalues, column-paired
/// orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Smallest eigenvalue (first, since eigenvalues are ascending).
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue.
    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Copy of the k-th eigenvector (column k).
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }
}

/// Result of [`ComplexMatrix::svd`]: `a = u · diag(s) · w†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values, nonnegative, descending.
    pub singular_values: Vec<f64>,
    /// Left singular vectors (columns).
    pub u: ComplexMatrix,
    /// Right singular vectors (columns), so that `a = u diag(s) w†`.
    pub w: ComplexMatrix,
}

/// Reshape a length rows·cols vector into a matrix: the coefficient at
/// composite index m·cols + n lands at entry (m, n). For a bipartite vector
/// ψ = Σ a_mn |m⟩⊗|n⟩ this is exactly the coefficient matrix (a_mn).
pub fn vec_to_matrix(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::ShapeMismatch {
            len: v.len(),
            rows,
            cols,
        });
    }
    Ok(ComplexMatrix {
        rows,
        cols,
        data: v.to_vec(),
    })
}

/// Inverse of [`vec_to_matrix`]: flatten row-major.
pub fn matrix_to_vec(m: &ComplexMatrix) -> Vec<Complex64> {
    m.data.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));

        let a = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(4.0, 0.0)]);
        let expect =
            ComplexMatrix::diagonal(&[c(3.0, 0.0), c(4.0, 0.0), c(6.0, 0.0), c(8.0, 0.0)]);
        assert_eq!(a.kron(&b), expect);
    }

    #[test]
    fn eigh_diagonal_sorts_ascending() {
        let h = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let s = h.eigh().unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!((s.eigenvalues[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(m.eigh(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn trace_requires_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(m.trace(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-3.0, 0.0)]);
        assert!((m.op_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn vec_matrix_round_trip() {
        let v: Vec<Complex64> = (0..6).map(|k| c(k as f64, -(k as f64))).collect();
        let m = vec_to_matrix(&v, 2, 3).unwrap();
        assert_eq!(matrix_to_vec(&m), v);
        assert_eq!(m[(1, 2)], c(5.0, -5.0));
    }
}
