//! Separability criteria with spectral witnesses.
//!
//! Each check builds the relevant operator, decomposes it, and returns a
//! [`CriterionReport`]: the full witness spectrum, a verdict, and — for
//! violated spectral criteria — the most-negative eigenvector. Verdicts use
//! a single threshold: satisfied means the minimum is at least
//! −[`tol::CRITERION`]; minima inside (−tol, 0) are satisfied but flagged
//! borderline.
//!
//! The implemented checks, for a state ρ on C^{dA}⊗C^{dB}:
//!
//! * reduction: ρ_A⊗I − ρ ≥ 0 (side A) and I⊗ρ_B − ρ ≥ 0 (side B);
//! * partial transposition: ρ^{T_B} ≥ 0;
//! * Rényi-entropic: S_α(ρ) − S_α(ρ_B) ≥ 0 and S_α(ρ) − S_α(ρ_A) ≥ 0 for
//!   α ∈ {1, 2, ∞}.
//!
//! Violating the reduction criterion is the entry ticket to the distillation
//! pipeline in [`crate::distill`]: the returned witness vector is exactly
//! what the local filter is built from.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, Spectrum};
use crate::states::{check_density, regroup_pairs, BipartiteState, PureState, Side};
use crate::tol;
use crate::MAX_COMPOSITE_DIM;

/// Rényi order for the entropic criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntropyOrder {
    One,
    Two,
    Inf,
}

/// Which criterion a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    ReductionA,
    ReductionB,
    Ppt,
    Entropic(EntropyOrder),
}

impl Criterion {
    /// Stable string used in the JSON wire format.
    pub fn label(&self) -> &'static str {
        match self {
            Criterion::ReductionA => "reduction-a",
            Criterion::ReductionB => "reduction-b",
            Criterion::Ppt => "ppt",
            Criterion::Entropic(EntropyOrder::One) => "entropic-1",
            Criterion::Entropic(EntropyOrder::Two) => "entropic-2",
            Criterion::Entropic(EntropyOrder::Inf) => "entropic-inf",
        }
    }
}

/// Verdict plus witnessing data for one criterion.
///
/// For spectral criteria `witness_spectrum` holds the ascending eigenvalues
/// of the criterion operator and, iff violated, `witness_vector` holds the
/// most-negative eigenvector (unit norm, phase fixed so its
/// largest-magnitude component is real positive; within a degenerate minimal
/// eigenspace the choice is solver-dependent and must not be relied on).
/// For entropic criteria `witness_spectrum` is the single conditional
/// entropy value and there is never a witness vector.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub satisfied: bool,
    /// True when the minimum fell in (−tol, 0): satisfied, but only thanks
    /// to the tolerance.
    pub borderline: bool,
    pub witness_spectrum: Vec<f64>,
    pub witness_vector: Option<Vec<Complex64>>,
}

impl CriterionReport {
    /// Minimum of the witness spectrum (the decisive number).
    pub fn min_value(&self) -> f64 {
        self.witness_spectrum[0]
    }

    fn from_spectrum(criterion: Criterion, spectrum: Spectrum) -> Self {
        let min = spectrum.min_eigenvalue();
        let satisfied = min >= -tol::CRITERION;
        let witness_vector = if satisfied {
            None
        } else {
            let mut v = spectrum.eigenvector(0);
            fix_phase(&mut v);
            Some(v)
        };
        CriterionReport {
            criterion,
            satisfied,
            borderline: satisfied && min < 0.0,
            witness_spectrum: spectrum.eigenvalues,
            witness_vector,
        }
    }

    fn from_value(criterion: Criterion, value: f64) -> Self {
        let satisfied = value >= -tol::CRITERION;
        CriterionReport {
            criterion,
            satisfied,
            borderline: satisfied && value < 0.0,
            witness_spectrum: vec![value],
            witness_vector: None,
        }
    }
}

/// Normalize the global phase: make the largest-magnitude component real
/// and positive.
pub(crate) fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_norm = 0.0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > best_norm {
            best_norm = z.norm();
            best = k;
        }
    }
    if best_norm == 0.0 {
        return;
    }
    let phase = v[best].conj() / best_norm;
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// The reduction-criterion operator itself: ρ_A⊗I − ρ (side A) or
/// I⊗ρ_B − ρ (side B).
pub fn reduction_operator(s: &BipartiteState, side: Side) -> ComplexMatrix {
    match side {
        Side::A => {
            let ra = s.partial_trace(Side::B);
            &ra.kron(&ComplexMatrix::identity(s.dim_b())) - s.rho()
        }
        Side::B => {
            let rb = s.partial_trace(Side::A);
            &ComplexMatrix::identity(s.dim_a()).kron(&rb) - s.rho()
        }
    }
}

/// Reduction criterion on one side: satisfied iff the reduction operator is
/// positive semidefinite (within tolerance).
pub fn reduction_check(s: &BipartiteState, side: Side) -> CriterionReport {
    let op = reduction_operator(s, side);
    let spectrum = op.eigh().expect("reduction operator is Hermitian by construction");
    let criterion = match side {
        Side::A => Criterion::ReductionA,
        Side::B => Criterion::ReductionB,
    };
    CriterionReport::from_spectrum(criterion, spectrum)
}

/// Partial-transposition criterion: satisfied iff ρ^{T_B} ≥ 0.
pub fn ppt_check(s: &BipartiteState) -> CriterionReport {
    let pt = s.partial_transpose(Side::B);
    let spectrum = pt.eigh().expect("partial transpose of Hermitian is Hermitian");
    CriterionReport::from_spectrum(Criterion::Ppt, spectrum)
}

/// Rényi entropy of a density matrix:
/// S₁ = −Σ λ ln λ (with 0·ln 0 = 0), S₂ = −ln Tr ρ², S_∞ = −ln λ_max.
pub fn renyi_entropy(m: &ComplexMatrix, alpha: EntropyOrder) -> Result<f64> {
    check_density(m)?;
    let eigenvalues = m.eigh()?.eigenvalues;
    // Tolerated negatives are treated as exact zeros.
    let lambdas: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    Ok(match alpha {
        EntropyOrder::One => -lambdas
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| l * l.ln())
            .sum::<f64>(),
        EntropyOrder::Two => -lambdas.iter().map(|&l| l * l).sum::<f64>().ln(),
        EntropyOrder::Inf => -lambdas.last().expect("nonempty spectrum").ln(),
    })
}

/// Conditional-entropy criteria: returns the pair of reports for
/// (S_α(A|B), S_α(B|A)) = (S_α(ρ)−S_α(ρ_B), S_α(ρ)−S_α(ρ_A)), in that
/// order. Nonnegativity of both is necessary for separability.
pub fn entropic_check(
    s: &BipartiteState,
    alpha: EntropyOrder,
) -> Result<(CriterionReport, CriterionReport)> {
    let joint = renyi_entropy(s.rho(), alpha)?;
    let s_b = renyi_entropy(&s.partial_trace(Side::A), alpha)?;
    let s_a = renyi_entropy(&s.partial_trace(Side::B), alpha)?;
    Ok((
        CriterionReport::from_value(Criterion::Entropic(alpha), joint - s_b),
        CriterionReport::from_value(Criterion::Entropic(alpha), joint - s_a),
    ))
}

/// Fully entangled fraction of a pure state on equal local dimensions:
/// the maximal overlap with any maximally entangled vector,
/// f = (Σ_i c_i)²/n in Schmidt coefficients.
///
/// Only the pure-state closed form is provided; for mixed states sample
/// overlaps with locally rotated P₊ to get lower bounds.
pub fn fef_pure(psi: &PureState) -> Result<f64> {
    if psi.dim_a() != psi.dim_b() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim_a(),
            found: psi.dim_b(),
        });
    }
    let coeffs = crate::states::schmidt(psi).coefficients;
    let sum: f64 = coeffs.iter().sum();
    Ok(sum * sum / psi.dim_a() as f64)
}

/// Reduction criterion applied collectively to a pair of states: forms
/// ρ₁⊗ρ₂, regroups it as a bipartite state on (A₁A₂)⊗(B₁B₂), and checks the
/// side-A reduction criterion of the regrouped state.
///
/// The regrouping permutation is documented at
/// [`crate::states`]' `regroup_pairs`: source index
/// ((a₁·dB₁+b₁)·dA₂+a₂)·dB₂+b₂ ↦ destination ((a₁·dA₂+a₂)·dB₁+b₁)·dB₂+b₂.
pub fn collective_reduction_check(
    s1: &BipartiteState,
    s2: &BipartiteState,
) -> Result<CriterionReport> {
    let d = s1.total_dim() * s2.total_dim();
    if d > MAX_COMPOSITE_DIM {
        return Err(Error::DimensionOverflow {
            dim: d,
            cap: MAX_COMPOSITE_DIM,
        });
    }
    let product = s1.rho().kron(s2.rho());
    let regrouped = regroup_pairs(&product, s1.dim_a(), s1.dim_b(), s2.dim_a(), s2.dim_b());
    let joint = BipartiteState::new(s1.dim_a() * s2.dim_a(), s1.dim_b() * s2.dim_b(), regrouped)?;
    Ok(reduction_check(&joint, Side::A))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{isotropic, psi_plus, random_separable};

    #[test]
    fn isotropic_above_threshold_violates_reduction() {
        let s = isotropic(3, 0.5).unwrap();
        let report = reduction_check(&s, Side::A);
        assert!(!report.satisfied);
        assert!((report.min_value() - (1.0 / 3.0 - 0.5)).abs() < 1e-10);
        assert!(report.witness_vector.is_some());
    }

    #[test]
    fn separable_state_passes_everything() {
        let s = random_separable(2, 6, 31).unwrap();
        assert!(reduction_check(&s, Side::A).satisfied);
        assert!(reduction_check(&s, Side::B).satisfied);
        assert!(ppt_check(&s).satisfied);
        for order in [EntropyOrder::One, EntropyOrder::Two, EntropyOrder::Inf] {
            let (ab, ba) = entropic_check(&s, order).unwrap();
            assert!(ab.satisfied && ba.satisfied);
        }
    }

    #[test]
    fn renyi_entropy_reference_values() {
        let n = 4;
        let mixed = &ComplexMatrix::identity(n) * (1.0 / n as f64);
        for order in [EntropyOrder::One, EntropyOrder::Two, EntropyOrder::Inf] {
            let s = renyi_entropy(&mixed, order).unwrap();
            assert!((s - (n as f64).ln()).abs() < 1e-12);
        }
        let diag = ComplexMatrix::diagonal(&[
            Complex64::new(0.75, 0.0),
            Complex64::new(0.25, 0.0),
        ]);
        let s_inf = renyi_entropy(&diag, EntropyOrder::Inf).unwrap();
        assert!((s_inf - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn maximally_entangled_violates_inf_entropy() {
        let s = psi_plus(2).unwrap().projector();
        let (ab, ba) = entropic_check(&s, EntropyOrder::Inf).unwrap();
        // S_∞(ρ) = 0, S_∞(ρ_B) = ln 2 ⇒ conditional entropy −ln 2.
        assert!(!ab.satisfied);
        assert!((ab.min_value() + 2.0f64.ln()).abs() < 1e-10);
        assert!(!ba.satisfied);
    }

    #[test]
    fn fef_of_maximally_entangled_is_one() {
        let f = fef_pure(&psi_plus(3).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }
}
