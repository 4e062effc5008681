//! Linear maps on operators, stored as Choi matrices.
//!
//! A map Λ from N×N to K×K operators is represented by the single operator
//! choi(Λ) = (I⊗Λ)(P₊) on C^N ⊗ C^K, where P₊ is the trace-one maximally
//! entangled projector — so choi carries the 1/N normalization, and block
//! (i, j) of choi equals Λ(|i⟩⟨j|)/N. (Conversion to the unnormalized
//! Σ|ii⟩⟨jj| convention is a factor of N.) The Choi matrix is the canonical
//! form here because it makes the two structural questions uniform:
//!
//! * complete positivity ⇔ choi ≥ 0,
//! * Kraus operators ⇔ scaled eigenvectors of choi.
//!
//! Function-valued maps enter through [`OperatorMap::from_action`], which
//! samples the action on the matrix-unit basis and spot-checks linearity.
//! The reference instances live in [`reduction_map`] (σ ↦ I·Trσ − σ),
//! [`transposition_map`], [`identity_map`] and [`depolarizing_map`];
//! [`verify_decomposition`] checks the transpose-composition structure of
//! the reduction map (Λ = T∘Γ = Γ′∘T with Γ, Γ′ completely positive), which
//! is what makes every PPT state pass the reduction criterion.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{frob_dist, vec_to_matrix, ComplexMatrix};
use rand::Rng;

use crate::rng::{ginibre, rng_from_seed};
use crate::states::{partial_transpose_of, swap_operator, BipartiteState, Side};
use crate::tol;

/// Eigenvalues of a Choi matrix at or below this are treated as exact zeros
/// when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// Fixed seed behind the linearity spot test and the random probes of
/// [`verify_decomposition`]; makes both fully deterministic.
const PROBE_SEED: u64 = 0x6d61_7073;

/// A linear operator map stored as its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMap {
    in_dim: usize,
    out_dim: usize,
    choi: ComplexMatrix,
}

impl OperatorMap {
    /// Wrap an explicit Choi matrix on C^{in_dim} ⊗ C^{out_dim}. The matrix
    /// must be Hermitian (all maps in scope are Hermiticity-preserving).
    pub fn from_choi(in_dim: usize, out_dim: usize, choi: ComplexMatrix) -> Result<Self> {
        let d = in_dim * out_dim;
        if choi.rows() != d || choi.cols() != d {
            return Err(Error::ShapeMismatch {
                len: choi.data().len(),
                rows: d,
                cols: d,
            });
        }
        let dev = choi.hermiticity_defect().ok_or(Error::NotSquare {
            rows: choi.rows(),
            cols: choi.cols(),
        })?;
        if dev > tol::HERMITICITY {
            return Err(Error::NotHermitian {
                max_dev: dev,
                tol: tol::HERMITICITY,
            });
        }
        Ok(OperatorMap {
            in_dim,
            out_dim,
            choi,
        })
    }

    /// Build the Choi matrix of a map given as a function on N×N matrices,
    /// sampling it on the matrix-unit basis. The action must be linear
    /// (spot-checked on random pairs with complex coefficients) and
    /// Hermiticity-preserving.
    pub fn from_action(
        n: usize,
        action: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadDimension { dim: n, min: 1 });
        }
        let probe = action(&unit_matrix(n, 0, 0));
        if !probe.is_square() {
            return Err(Error::NotSquare {
                rows: probe.rows(),
                cols: probe.cols(),
            });
        }
        let out_dim = probe.rows();

        // Linearity spot test: action(aσ₁ + bσ₂) = a·action(σ₁) + b·action(σ₂).
        let mut rng = rng_from_seed(PROBE_SEED);
        let mut residual: f64 = 0.0;
        for _ in 0..3 {
            let s1 = ginibre(n, n, &mut rng);
            let s2 = ginibre(n, n, &mut rng);
            let a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let b = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let combined = action(&(&(&s1 * a) + &(&s2 * b)));
            let split = &(&action(&s1) * a) + &(&action(&s2) * b);
            let scale = split.frob_norm().max(1.0);
            residual = residual.max(frob_dist(&combined, &split) / scale);
        }
        if residual > 1e-9 {
            return Err(Error::NonlinearAction { residual });
        }

        let d = n * out_dim;
        let mut choi = ComplexMatrix::zeros(d, d);
        let inv_n = 1.0 / n as f64;
        for i in 0..n {
            for j in 0..n {
                let block = action(&unit_matrix(n, i, j));
                if block.rows() != out_dim || block.cols() != out_dim {
                    return Err(Error::DimensionMismatch {
                        expected: out_dim,
                        found: block.rows(),
                    });
                }
                for k in 0..out_dim {
                    for l in 0..out_dim {
                        choi[(i * out_dim + k, j * out_dim + l)] = block[(k, l)] * inv_n;
                    }
                }
            }
        }
        Self::from_choi(n, out_dim, choi)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Recover the action from the Choi matrix:
    /// Λ(σ) = N · Σ_ij σ_ij · choi-block(i, j).
    pub fn apply(&self, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
        if sigma.rows() != self.in_dim || sigma.cols() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: sigma.rows(),
            });
        }
        let od = self.out_dim;
        let nf = self.in_dim as f64;
        let mut out = ComplexMatrix::zeros(od, od);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let coeff = sigma[(i, j)] * nf;
                if coeff == Complex64::ZERO {
                    continue;
                }
                for k in 0..od {
                    for l in 0..od {
                        out[(k, l)] += coeff * self.choi[(i * od + k, j * od + l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply the map to subsystem B of a bipartite state: returns
    /// (I⊗Λ)(ρ) on C^{dim_a} ⊗ C^{out_dim}, as a raw matrix since positivity
    /// may be lost — that loss is the whole point of the criteria built on
    /// positive-but-not-CP maps.
    pub fn apply_to_subsystem(&self, s: &BipartiteState) -> Result<ComplexMatrix> {
        if s.dim_b() != self.in_dim {
            return Err(Error::DimensionMismatch {
                expected: self.in_dim,
                found: s.dim_b(),
            });
        }
        let (da, db, od) = (s.dim_a(), s.dim_b(), self.out_dim);
        let mut out = ComplexMatrix::zeros(da * od, da * od);
        for a in 0..da {
            for ap in 0..da {
                let block = ComplexMatrix::from_fn(db, db, |mu, nu| {
                    s.rho()[(a * db + mu, ap * db + nu)]
                });
                let mapped = self.apply(&block)?;
                for k in 0..od {
                    for l in 0..od {
                        out[(a * od + k, ap * od + l)] = mapped[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Complete-positivity verdict with the full Choi spectrum as witness.
    pub fn cp_check(&self) -> CpVerdict {
        let spectrum = self
            .choi
            .eigh()
            .expect("Choi matrix is Hermitian by construction")
            .eigenvalues;
        let min_eigenvalue = spectrum[0];
        CpVerdict {
            cp: min_eigenvalue >= -tol::CRITERION,
            min_eigenvalue,
            spectrum,
        }
    }

    /// True iff the map is completely positive (Choi matrix PSD within
    /// tolerance).
    pub fn is_cp(&self) -> bool {
        self.cp_check().cp
    }

    /// Kraus operators of a completely positive map: for each Choi
    /// eigenpair (λ, ψ) with λ > [`KRAUS_CUTOFF`],
    /// W = √(λ·N) · unvec(ψ)ᵀ (out_dim × in_dim), so that
    /// Λ(σ) = Σ W σ W†.
    pub fn kraus(&self) -> Result<KrausSet> {
        let verdict = self.cp_check();
        if !verdict.cp {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: verdict.min_eigenvalue,
            });
        }
        let spectrum = self.choi.eigh().expect("Hermitian");
        let mut operators = Vec::new();
        for (k, &lambda) in spectrum.eigenvalues.iter().enumerate() {
            if lambda <= KRAUS_CUTOFF {
                continue;
            }
            let psi = spectrum.eigenvector(k);
            let coeff_matrix = vec_to_matrix(&psi, self.in_dim, self.out_dim)?;
            let w = &coeff_matrix.transpose() * (lambda * self.in_dim as f64).sqrt();
            operators.push(w);
        }
        Ok(KrausSet { operators })
    }
}

fn unit_matrix(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    m[(i, j)] = Complex64::ONE;
    m
}

/// Complete-positivity verdict.
#[derive(Debug, Clone)]
pub struct CpVerdict {
    pub cp: bool,
    pub min_eigenvalue: f64,
    /// Ascending eigenvalues of the Choi matrix.
    pub spectrum: Vec<f64>,
}

/// Kraus form Λ(σ) = Σ_i W_i σ W_i† of a completely positive map.
#[derive(Debug, Clone)]
pub struct KrausSet {
    /// out_dim × in_dim operators.
    pub operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Evaluate Σ W σ W†.
    pub fn apply(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let od = self.operators[0].rows();
        let mut out = ComplexMatrix::zeros(od, od);
        for w in &self.operators {
            out = &out + &(&(w * sigma) * &w.dagger());
        }
        out
    }

    /// Entrywise conjugated set {conj(W_i)} — the partner operators in the
    /// transpose-composition identity checked by [`verify_decomposition`].
    pub fn conjugated(&self) -> KrausSet {
        KrausSet {
            operators: self.operators.iter().map(|w| w.conj()).collect(),
        }
    }
}

/// The identity map σ ↦ σ; its Choi matrix is P₊.
pub fn identity_map(n: usize) -> Result<OperatorMap> {
    OperatorMap::from_action(n, |sigma| sigma.clone())
}

/// Transposition σ ↦ σᵀ (in the computational basis); positive but not
/// completely positive. Its Choi matrix is V/n.
pub fn transposition_map(n: usize) -> Result<OperatorMap> {
    OperatorMap::from_action(n, |sigma| sigma.transpose())
}

/// The reduction map σ ↦ I·Trσ − σ; positive but not completely positive.
/// Its Choi matrix is I/n ⊗ I − P₊.
pub fn reduction_map(n: usize) -> Result<OperatorMap> {
    OperatorMap::from_action(n, |sigma| {
        let tr = sigma.trace().expect("square by contract");
        &ComplexMatrix::identity(sigma.rows()).scale(tr) - sigma
    })
}

/// Depolarizing map σ ↦ (1−α)·I·Trσ/n + α·σ, completely positive for
/// α ∈ [0, 1]. Applied to one side of P₊ it produces exactly the isotropic
/// family.
pub fn depolarizing_map(n: usize, alpha: f64) -> Result<OperatorMap> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    OperatorMap::from_action(n, move |sigma| {
        let tr = sigma.trace().expect("square by contract");
        let mixed = ComplexMatrix::identity(sigma.rows()).scale(tr * ((1.0 - alpha) / n as f64));
        &mixed + &(sigma * alpha)
    })
}

/// Result of [`verify_decomposition`]: the three structural checks on the
/// reduction map Λ at one dimension.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub dim: usize,
    /// Check 1: choi(Λ)^{T_B} equals (I − V)/n entrywise (tolerance 1e−12).
    pub pt_identity_ok: bool,
    pub pt_identity_max_dev: f64,
    /// Check 2: Γ = T∘Λ is completely positive …
    pub gamma_is_cp: bool,
    pub gamma_choi_min_eigenvalue: f64,
    /// … and its Kraus form reconstructs its action (tolerance 1e−9 on
    /// unit-norm inputs).
    pub kraus_ok: bool,
    pub kraus_max_residual: f64,
    /// Check 3: T(Γ(σ)) = Λ(σ) and Γ′(σᵀ) = Λ(σ) on random inputs, with Γ′
    /// built from the conjugated Kraus operators of Γ (tolerance 1e−9).
    pub composition_ok: bool,
    pub composition_max_residual: f64,
}

impl DecompositionReport {
    pub fn all_pass(&self) -> bool {
        self.pt_identity_ok && self.gamma_is_cp && self.kraus_ok && self.composition_ok
    }
}

/// Verify the decomposition structure of the reduction map Λ(σ) = I·Trσ − σ
/// at dimension n:
///
/// 1. choi(Λ)^{T_B} = (1/n)(I⊗I − V) entrywise;
/// 2. Γ = T∘Λ is completely positive, and its Kraus form reproduces it;
/// 3. Λ = T∘Γ and Λ = Γ′∘T on 100 random inputs, where Γ′ has the
///    conjugated Kraus operators of Γ.
///
/// Together these exhibit Λ as a decomposable positive map, which is the
/// structural reason the reduction criterion is implied by the
/// partial-transposition criterion.
pub fn verify_decomposition(n: usize) -> Result<DecompositionReport> {
    if n < 2 {
        return Err(Error::BadDimension { dim: n, min: 2 });
    }
    let lambda = reduction_map(n)?;

    // Check 1: partial transpose of the Choi matrix.
    let pt = partial_transpose_of(lambda.choi(), n, n, Side::B);
    let target = &(&ComplexMatrix::identity(n * n) - &swap_operator(n)) * (1.0 / n as f64);
    let pt_dev = (&pt - &target).max_abs();

    // Check 2: Γ = T∘Λ, i.e. σ ↦ (I·Trσ − σ)ᵀ = I·Trσ − σᵀ.
    let gamma = OperatorMap::from_action(n, |sigma| {
        let tr = sigma.trace().expect("square by contract");
        &ComplexMatrix::identity(n).scale(tr) - &sigma.transpose()
    })?;
    let gamma_verdict = gamma.cp_check();
    let kraus = gamma.kraus()?;
    let gamma_prime = kraus.conjugated();

    // Check 2b/3: random probes, unit Frobenius norm.
    let mut rng = rng_from_seed(PROBE_SEED);
    let mut kraus_residual: f64 = 0.0;
    let mut comp_residual: f64 = 0.0;
    for _ in 0..100 {
        let g = ginibre(n, n, &mut rng);
        let sigma = &g * (1.0 / g.frob_norm());
        let via_lambda = lambda.apply(&sigma)?;
        let via_gamma = gamma.apply(&sigma)?;
        kraus_residual = kraus_residual.max(frob_dist(&kraus.apply(&sigma), &via_gamma));
        comp_residual = comp_residual.max(frob_dist(&via_gamma.transpose(), &via_lambda));
        comp_residual =
            comp_residual.max(frob_dist(&gamma_prime.apply(&sigma.transpose()), &via_lambda));
    }

    Ok(DecompositionReport {
        dim: n,
        pt_identity_ok: pt_dev <= 1e-12,
        pt_identity_max_dev: pt_dev,
        gamma_is_cp: gamma_verdict.cp,
        gamma_choi_min_eigenvalue: gamma_verdict.min_eigenvalue,
        kraus_ok: kraus_residual <= 1e-9,
        kraus_max_residual: kraus_residual,
        composition_ok: comp_residual <= 1e-9,
        composition_max_residual: comp_residual,
    })
}
