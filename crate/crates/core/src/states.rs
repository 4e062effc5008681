//! Bipartite density matrices and the named state families.
//!
//! Conventions used everywhere in this crate:
//!
//! * The composite Hilbert space is C^{dim_a} ⊗ C^{dim_b} with the product
//!   basis ordered A-major: |i⟩⊗|j⟩ has composite index `i·dim_b + j`.
//! * Basis states are 0-indexed, |0⟩ … |N−1⟩. In particular the
//!   distinguished product state in [`sigma_example`] is |0⟩⊗|1⟩.
//! * A [`BipartiteState`] is validated on construction: Hermitian to 1e−10,
//!   unit trace to 1e−10, and positive semidefinite down to −1e−9.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{vec_to_matrix, ComplexMatrix};
use crate::rng::{ginibre, rng_from_seed};
use crate::tol;

/// Which subsystem an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Validated density matrix on C^{dim_a} ⊗ C^{dim_b}.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    /// Wrap a density matrix, enforcing the type invariants
    /// (shape (dim_a·dim_b)², Hermitian, unit trace, PSD within tolerance).
    pub fn new(dim_a: usize, dim_b: usize, rho: ComplexMatrix) -> Result<Self> {
        let d = dim_a * dim_b;
        if rho.rows() != d || rho.cols() != d {
            return Err(Error::ShapeMismatch {
                len: rho.data().len(),
                rows: d,
                cols: d,
            });
        }
        check_density(&rho)?;
        Ok(BipartiteState { dim_a, dim_b, rho })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Side length of the composite density matrix, dim_a · dim_b.
    pub fn total_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    /// Trace out the given subsystem; the result is a density matrix on the
    /// kept side (`partial_trace(Side::B)` returns ρ_A).
    pub fn partial_trace(&self, over: Side) -> ComplexMatrix {
        let (da, db) = (self.dim_a, self.dim_b);
        match over {
            Side::B => ComplexMatrix::from_fn(da, da, |i, ip| {
                (0..db).map(|b| self.rho[(i * db + b, ip * db + b)]).sum()
            }),
            Side::A => ComplexMatrix::from_fn(db, db, |j, jp| {
                (0..da).map(|a| self.rho[(a * db + j, a * db + jp)]).sum()
            }),
        }
    }

    /// Transpose the given subsystem: for side B,
    /// ⟨mμ|ρ^{T_B}|nν⟩ = ⟨mν|ρ|nμ⟩. Involutive and trace-preserving; the
    /// result can fail to be positive, so it is returned as a raw matrix.
    pub fn partial_transpose(&self, side: Side) -> ComplexMatrix {
        partial_transpose_of(&self.rho, self.dim_a, self.dim_b, side)
    }

    /// Overlap Tr(ρ·P₊) with the maximally entangled state on equal local
    /// dimensions.
    pub fn fidelity(&self) -> Result<f64> {
        if self.dim_a != self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a,
                found: self.dim_b,
            });
        }
        let n = self.dim_a;
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i * n + i, j * n + j)];
            }
        }
        let f = acc / n as f64;
        debug_assert!(f.im.abs() < 1e-12, "fidelity picked up an imaginary part");
        Ok(f.re)
    }
}

/// Partial transpose of a raw matrix living on C^{da} ⊗ C^{db}.
pub(crate) fn partial_transpose_of(
    m: &ComplexMatrix,
    da: usize,
    db: usize,
    side: Side,
) -> ComplexMatrix {
    debug_assert_eq!(m.rows(), da * db);
    debug_assert_eq!(m.cols(), da * db);
    match side {
        Side::B => ComplexMatrix::from_fn(da * db, da * db, |r, c| {
            let (mm, mu) = (r / db, r % db);
            let (nn, nu) = (c / db, c % db);
            m[(mm * db + nu, nn * db + mu)]
        }),
        Side::A => ComplexMatrix::from_fn(da * db, da * db, |r, c| {
            let (mm, mu) = (r / db, r % db);
            let (nn, nu) = (c / db, c % db);
            m[(nn * db + mu, mm * db + nu)]
        }),
    }
}

/// Reject anything that is not a density matrix: non-square, non-finite,
/// non-Hermitian (1e−10), trace ≠ 1 (1e−10), or negative beyond −1e−9.
pub(crate) fn check_density(m: &ComplexMatrix) -> Result<()> {
    let fail = |reason: String| Err(Error::NotDensityMatrix { reason });
    if !m.is_square() {
        return fail(format!("matrix is {}x{}", m.rows(), m.cols()));
    }
    if !m.is_finite() {
        return fail("entries contain NaN or Inf".into());
    }
    let dev = m.hermiticity_defect().expect("square");
    if dev > tol::HERMITICITY {
        return fail(format!("Hermiticity defect {dev:.3e}"));
    }
    let tr = m.trace().expect("square");
    if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
        return fail(format!("trace = {tr}"));
    }
    let min = m.eigh()?.min_eigenvalue();
    if min < -tol::PSD {
        return fail(format!("min eigenvalue {min:.3e}"));
    }
    Ok(())
}

/// Pure bipartite state, amplitudes in the A-major product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wrap an amplitude vector; must have length dim_a·dim_b and unit norm
    /// to 1e−12.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::ShapeMismatch {
                len: amplitudes.len(),
                rows: dim_a,
                cols: dim_b,
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::PURE_NORM {
            return Err(Error::OutOfRange {
                what: "pure-state norm",
                value: norm,
                lo: 1.0 - tol::PURE_NORM,
                hi: 1.0 + tol::PURE_NORM,
            });
        }
        Ok(PureState {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Coefficient matrix (a_mn) of ψ = Σ a_mn |m⟩⊗|n⟩, shape dim_a × dim_b.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        vec_to_matrix(&self.amplitudes, self.dim_a, self.dim_b).expect("length checked at construction")
    }

    /// Rank-one density matrix |ψ⟩⟨ψ|.
    pub fn projector(&self) -> BipartiteState {
        let d = self.amplitudes.len();
        let rho = ComplexMatrix::from_fn(d, d, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        BipartiteState::new(self.dim_a, self.dim_b, rho)
            .expect("projector of a unit vector is a valid state")
    }
}

/// Maximally entangled state ψ₊ = (1/√n) Σ_i |i⟩⊗|i⟩.
pub fn psi_plus(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut v = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = amp;
    }
    PureState::new(n, n, v)
}

/// Swap operator V|i⟩|j⟩ = |j⟩|i⟩ on C^n ⊗ C^n.
pub fn swap_operator(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (a, b) = (r / n, r % n);
        let (cc, dd) = (c / n, c % n);
        if a == dd && b == cc {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// The U⊗U-invariant family
/// W = ((n−φ)·I + (nφ−1)·V) / (n³−n), φ ∈ [−1, 1].
/// Both reductions are maximally mixed.
pub fn werner(n: usize, phi: f64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::OutOfRange {
            what: "phi",
            value: phi,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let nf = n as f64;
    let denom = nf * nf * nf - nf;
    let id = ComplexMatrix::identity(n * n);
    let v = swap_operator(n);
    let rho = &(&id * ((nf - phi) / denom)) + &(&v * ((nf * phi - 1.0) / denom));
    BipartiteState::new(n, n, rho)
}

/// Fidelity of the isotropic state with mixing parameter α.
pub fn fidelity_from_alpha(n: usize, alpha: f64) -> f64 {
    let n2 = (n * n) as f64;
    (alpha * (n2 - 1.0) + 1.0) / n2
}

/// Mixing parameter α of the isotropic state with fidelity f.
pub fn alpha_from_fidelity(n: usize, f: f64) -> f64 {
    let n2 = (n * n) as f64;
    (n2 * f - 1.0) / (n2 - 1.0)
}

/// The U⊗U*-invariant family (1−α)·I/n² + α·P₊ parametrized by its
/// fidelity f = Tr(ρP₊) ∈ [0, 1], i.e. α = (n²f−1)/(n²−1).
pub fn isotropic(n: usize, f: f64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange {
            what: "fidelity",
            value: f,
            lo: 0.0,
            hi: 1.0,
        });
    }
    isotropic_from_alpha(n, alpha_from_fidelity(n, f))
}

/// Same family, parametrized by α ∈ [−1/(n²−1), 1].
pub fn isotropic_from_alpha(n: usize, alpha: f64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    let lo = -1.0 / ((n * n - 1) as f64);
    if alpha < lo - tol::RANGE_SLACK || alpha > 1.0 + tol::RANGE_SLACK {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
            lo,
            hi: 1.0,
        });
    }
    let n2 = (n * n) as f64;
    let id = ComplexMatrix::identity(n * n);
    let plus = psi_plus(n)?.projector();
    let rho = &(&id * ((1.0 - alpha) / n2)) + &(plus.rho() * alpha);
    BipartiteState::new(n, n, rho)
}

/// Embed an N-dimensional density matrix into C^N ⊗ C^N along the diagonal:
/// ⟨ii|ρᵉ|jj⟩ = ρ_ij, every other entry zero.
pub fn embed_diag(rho_n: &ComplexMatrix) -> Result<BipartiteState> {
    check_density(rho_n)?;
    let n = rho_n.rows();
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    let d = n * n;
    let mut rho = ComplexMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            rho[(i * n + i, j * n + j)] = rho_n[(i, j)];
        }
    }
    BipartiteState::new(n, n, rho)
}

/// The 3⊗3 regression fixture p·P₊ + (1−p)·|01⟩⟨01| with p ∈ (0, 1/3].
/// Its fidelity is exactly p.
pub fn sigma_example(p: f64) -> Result<BipartiteState> {
    if !(p > 0.0 && p <= 1.0 / 3.0 + tol::RANGE_SLACK) {
        return Err(Error::OutOfRange {
            what: "p",
            value: p,
            lo: 0.0,
            hi: 1.0 / 3.0,
        });
    }
    let plus = psi_plus(3)?.projector();
    let mut rho = plus.rho() * p;
    // |0⟩⊗|1⟩ has composite index 1.
    rho[(1, 1)] += Complex64::new(1.0 - p, 0.0);
    BipartiteState::new(3, 3, rho)
}

/// Schmidt decomposition of a pure state: ψ = Σ_i c_i · a_i ⊗ b_i with
/// nonnegative descending coefficients and orthonormal local bases.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonnegative, descending, Σ c_i² = 1.
    pub coefficients: Vec<f64>,
    /// Orthonormal vectors on side A (columns).
    pub basis_a: ComplexMatrix,
    /// Orthonormal vectors on side B (columns).
    pub basis_b: ComplexMatrix,
}

/// Schmidt decomposition via SVD of the coefficient matrix.
pub fn schmidt(psi: &PureState) -> SchmidtDecomposition {
    let svd = psi.coefficient_matrix().svd();
    // a = u diag(s) w†  ⇒  ψ = Σ s_i u_i ⊗ conj(w_i).
    SchmidtDecomposition {
        coefficients: svd.singular_values,
        basis_a: svd.u,
        basis_b: svd.w.conj(),
    }
}

/// Random density matrix on C^n ⊗ C^n: G·G†/Tr(G·G†) with G complex Ginibre
/// of side n². Deterministic for a given seed.
pub fn random_density(n: usize, seed: u64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    let mut rng = rng_from_seed(seed);
    let rho = normalized_wishart(n * n, &mut rng);
    BipartiteState::new(n, n, rho)
}

/// Random separable state: convex mixture Σ_k w_k · ρ_A^k ⊗ ρ_B^k of `terms`
/// random product states, with Dirichlet(1) weights. Separable by
/// construction. Deterministic for a given seed.
pub fn random_separable(n: usize, terms: usize, seed: u64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    if terms < 1 {
        return Err(Error::OutOfRange {
            what: "terms",
            value: terms as f64,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut weights: Vec<f64> = (0..terms)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let d = n * n;
    let mut rho = ComplexMatrix::zeros(d, d);
    for &w in &weights {
        let a = normalized_wishart(n, &mut rng);
        let b = normalized_wishart(n, &mut rng);
        rho = &rho + &(&a.kron(&b) * w);
    }
    BipartiteState::new(n, n, rho)
}

fn normalized_wishart(dim: usize, rng: &mut rand_chacha::ChaCha12Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let w = &g * &g.dagger();
    let tr = w.trace().expect("square").re;
    &w * (1.0 / tr)
}

/// Regroup ρ₁₂ living on (A₁B₁)⊗(A₂B₂) as a bipartite matrix on
/// (A₁A₂)⊗(B₁B₂).
///
/// Index bookkeeping: the source composite index is
/// `((a₁·db₁ + b₁)·da₂ + a₂)·db₂ + b₂` and the destination index is
/// `((a₁·da₂ + a₂)·db₁ + b₁)·db₂ + b₂`; rows and columns are permuted
/// identically.
pub(crate) fn regroup_pairs(
    m: &ComplexMatrix,
    da1: usize,
    db1: usize,
    da2: usize,
    db2: usize,
) -> ComplexMatrix {
    let d = da1 * db1 * da2 * db2;
    debug_assert_eq!(m.rows(), d);
    let mut perm = vec![0usize; d];
    for a1 in 0..da1 {
        for b1 in 0..db1 {
            for a2 in 0..da2 {
                for b2 in 0..db2 {
                    let src = ((a1 * db1 + b1) * da2 + a2) * db2 + b2;
                    let dst = ((a1 * da2 + a2) * db1 + b1) * db2 + b2;
                    perm[src] = dst;
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(perm[r], perm[c])] = m[(r, c)];
        }
    }
    out
}
