//! Integration tests for the separability criteria: closed-form spectra on
//! the invariant families, the implication ordering between criteria, the
//! two-qubit equivalence, entropic behavior, and the collective closure of
//! the reduction test.

use num_complex::Complex64;
use qdistill::criteria::{
    collective_reduction_check, entropic_check, fef_pure, ppt_check, reduction_check,
    reduction_operator, renyi_entropy, Criterion, EntropyOrder,
};
use qdistill::distill::haar_unitary;
use qdistill::states::{
    isotropic, psi_plus, random_density, random_separable, werner, BipartiteState, PureState,
};
use qdistill::{ComplexMatrix, Error, Side};

#[test]
fn criterion_labels_are_stable() {
    assert_eq!(Criterion::ReductionA.label(), "reduction-a");
    assert_eq!(Criterion::ReductionB.label(), "reduction-b");
    assert_eq!(Criterion::Ppt.label(), "ppt");
    assert_eq!(Criterion::Entropic(EntropyOrder::One).label(), "entropic-1");
    assert_eq!(Criterion::Entropic(EntropyOrder::Two).label(), "entropic-2");
    assert_eq!(
        Criterion::Entropic(EntropyOrder::Inf).label(),
        "entropic-inf"
    );
}

#[test]
fn isotropic_reduction_spectrum_is_closed_form() {
    // ρ_A⊗I − ρ on the isotropic family has eigenvalue 1/n − f on the P₊
    // line and 1/n − (1−f)/(n²−1) on its complement.
    for n in 2..=5 {
        for f in [0.0, 0.1, 1.0 / (n * n) as f64, 0.5, 0.95] {
            let s = isotropic(n, f).unwrap();
            let spectrum = reduction_operator(&s, Side::A).eigh().unwrap().eigenvalues;
            let line = 1.0 / n as f64 - f;
            let bulk = 1.0 / n as f64 - (1.0 - f) / ((n * n - 1) as f64);
            let min = line.min(bulk);
            let max = line.max(bulk);
            assert!((spectrum[0] - min).abs() <= 1e-10, "n={n} f={f}");
            assert!((spectrum[spectrum.len() - 1] - max).abs() <= 1e-10);
        }
    }
}

#[test]
fn werner_closed_forms_reduction_vs_ppt() {
    // Reduction operator spectrum: (n−2+φ)/(n²−n) on the antisymmetric
    // sector, (n−φ)/(n²+n) on the symmetric one (the antisymmetric value is
    // the minimum exactly when φ < 1/n). Partial-transpose spectrum: φ/n on
    // the ψ₊ line, (n−φ)/(n³−n) elsewhere. For n ≥ 3, φ < 0 the reduction
    // minimum is nonnegative while the PT one is negative — the criteria
    // genuinely differ in strength.
    for n in 2..=4usize {
        for phi in [-1.0, -0.4, 0.2, 1.0] {
            let w = werner(n, phi).unwrap();
            let nf = n as f64;
            let red = reduction_check(&w, Side::A);
            let anti = (nf - 2.0 + phi) / (nf * nf - nf);
            let sym = (nf - phi) / (nf * nf + nf);
            assert!(
                (red.min_value() - anti.min(sym)).abs() <= 1e-10,
                "n={n} phi={phi}"
            );
            let ppt = ppt_check(&w);
            let line = phi / nf;
            let bulk = (nf - phi) / (nf * nf * nf - nf);
            assert!((ppt.min_value() - line.min(bulk)).abs() <= 1e-10);
            if n >= 3 && phi < 0.0 {
                assert!(red.satisfied && !ppt.satisfied);
            }
        }
    }
}

#[test]
fn reduction_sides_agree_on_symmetric_families() {
    let s = isotropic(3, 0.8).unwrap();
    let a = reduction_check(&s, Side::A);
    let b = reduction_check(&s, Side::B);
    assert_eq!(a.satisfied, b.satisfied);
    assert!((a.min_value() - b.min_value()).abs() <= 1e-12);
}

#[test]
fn violated_reports_carry_normalized_witnesses() {
    let s = isotropic(3, 0.9).unwrap();
    let report = reduction_check(&s, Side::A);
    assert!(!report.satisfied);
    let w = report.witness_vector.expect("violation carries a witness");
    let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    assert!((norm - 1.0).abs() <= 1e-12);
    // The isotropic witness is ψ₊ itself (phase-fixed → real positive).
    let expect = 1.0 / 3.0f64.sqrt();
    for (k, z) in w.iter().enumerate() {
        let want = if k % 4 == 0 { expect } else { 0.0 };
        assert!((z.re - want).abs() <= 1e-10 && z.im.abs() <= 1e-10);
    }
    // Satisfied reports carry no witness.
    assert!(reduction_check(&isotropic(3, 0.2).unwrap(), Side::A)
        .witness_vector
        .is_none());
}

#[test]
fn implication_chain_on_random_states() {
    // PPT ⇒ reduction (each side) ⇒ nonnegative conditional ∞-entropies.
    // The acceptance suite runs the full 1000-state version; this is a
    // faster smoke sample across both dimensions plus separable controls.
    for n in [2usize, 3] {
        for seed in 0..150u64 {
            let s = if seed % 3 == 0 {
                random_separable(n, 4, 10_000 + seed).unwrap()
            } else {
                random_density(n, 10_000 + seed).unwrap()
            };
            let ppt = ppt_check(&s).satisfied;
            let red_a = reduction_check(&s, Side::A).satisfied;
            let red_b = reduction_check(&s, Side::B).satisfied;
            let (inf_ab, inf_ba) = entropic_check(&s, EntropyOrder::Inf).unwrap();
            if ppt {
                assert!(red_a && red_b, "PPT state fails reduction at seed {seed}");
            }
            if red_a && red_b {
                assert!(
                    inf_ab.satisfied && inf_ba.satisfied,
                    "reduction-satisfied state fails S_inf at seed {seed}"
                );
            }
        }
    }
}

#[test]
fn renyi_entropies_on_reference_spectra() {
    let quarter = &ComplexMatrix::identity(4) * 0.25;
    for order in [EntropyOrder::One, EntropyOrder::Two, EntropyOrder::Inf] {
        let s = renyi_entropy(&quarter, order).unwrap();
        assert!((s - 4.0f64.ln()).abs() <= 1e-12);
    }
    let skewed = ComplexMatrix::diagonal(&[
        Complex64::new(0.75, 0.0),
        Complex64::new(0.25, 0.0),
    ]);
    let s1 = renyi_entropy(&skewed, EntropyOrder::One).unwrap();
    let expect1 = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
    assert!((s1 - expect1).abs() <= 1e-12);
    let s2 = renyi_entropy(&skewed, EntropyOrder::Two).unwrap();
    assert!((s2 + (0.75f64 * 0.75 + 0.25 * 0.25).ln()).abs() <= 1e-12);
    let sinf = renyi_entropy(&skewed, EntropyOrder::Inf).unwrap();
    assert!((sinf - (4.0f64 / 3.0).ln()).abs() <= 1e-12);
    // Entropies are monotone nonincreasing in the order.
    assert!(s1 >= s2 && s2 >= sinf);
}

#[test]
fn entropic_check_orders_sides_as_ab_then_ba() {
    // Product of a maximally mixed A with a pure B: S(A|B) = S(ρ) − S(ρ_B)
    // = ln 2 − 0, while S(B|A) = ln 2 − ln 2 = 0.
    let mixed_a = &ComplexMatrix::identity(2) * 0.5;
    let mut pure_b = ComplexMatrix::zeros(2, 2);
    pure_b[(0, 0)] = Complex64::ONE;
    let s = BipartiteState::new(2, 2, mixed_a.kron(&pure_b)).unwrap();
    let (ab, ba) = entropic_check(&s, EntropyOrder::One).unwrap();
    assert!((ab.min_value() - 2.0f64.ln()).abs() <= 1e-10);
    assert!(ba.min_value().abs() <= 1e-10);
    assert!(ab.satisfied && ba.satisfied);
}

#[test]
fn maximally_entangled_state_has_negative_conditional_entropies() {
    let p = psi_plus(3).unwrap().projector();
    for order in [EntropyOrder::One, EntropyOrder::Two, EntropyOrder::Inf] {
        let (ab, ba) = entropic_check(&p, order).unwrap();
        assert!(!ab.satisfied && !ba.satisfied);
        // S(ρ) = 0 for the pure state, S(ρ_B) = ln 3 at every order.
        assert!((ab.min_value() + 3.0f64.ln()).abs() <= 1e-10);
        assert!((ba.min_value() + 3.0f64.ln()).abs() <= 1e-10);
    }
}

#[test]
fn fully_entangled_fraction_reference_points() {
    assert!((fef_pure(&psi_plus(3).unwrap()).unwrap() - 1.0).abs() <= 1e-12);
    // A product state |00⟩ has a single Schmidt coefficient 1 → f = 1/n.
    let mut amps = vec![Complex64::ZERO; 9];
    amps[0] = Complex64::ONE;
    let product = PureState::new(3, 3, amps).unwrap();
    assert!((fef_pure(&product).unwrap() - 1.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn fully_entangled_fraction_is_the_maximum_over_sampled_overlaps() {
    // f = max_Φ |⟨ψ|Φ⟩|² over maximally entangled Φ = (U⊗V)·√n-normalized
    // ψ₊. No Monte-Carlo sample may beat the closed form (and the best
    // sample should come close for a generous budget).
    let mut amps = vec![Complex64::ZERO; 4];
    amps[0] = Complex64::new(0.8, 0.0);
    amps[3] = Complex64::new(0.6, 0.0);
    let psi = PureState::new(2, 2, amps).unwrap();
    let f = fef_pure(&psi).unwrap();
    assert!((f - (0.8f64 + 0.6) * (0.8 + 0.6) / 2.0).abs() <= 1e-12);

    let plus = psi_plus(2).unwrap();
    let plus_vec: Vec<Complex64> = plus.amplitudes().to_vec();
    let mut best_sample: f64 = 0.0;
    for k in 0..4000u64 {
        let u = haar_unitary(2, 2 * k).unwrap();
        let v = haar_unitary(2, 2 * k + 1).unwrap();
        let big = u.kron(&v);
        // Φ = (U⊗V)ψ₊; overlap = ⟨ψ|Φ⟩.
        let mut overlap = Complex64::ZERO;
        for r in 0..4 {
            let mut phi_r = Complex64::ZERO;
            for c in 0..4 {
                phi_r += big[(r, c)] * plus_vec[c];
            }
            overlap += psi.amplitudes()[r].conj() * phi_r;
        }
        best_sample = best_sample.max(overlap.norm_sqr());
    }
    assert!(best_sample <= f + 1e-9, "sample {best_sample} beats closed form {f}");
    assert!(best_sample >= f - 0.05, "sampling never approached the maximum");
}

#[test]
fn collective_reduction_closure_on_satisfying_pairs() {
    // Two states that individually satisfy the A-side reduction criterion
    // compose to a product that satisfies it collectively. 40 pairs here;
    // the acceptance suite runs 200.
    let mut collected = Vec::new();
    let mut seed = 0u64;
    while collected.len() < 80 {
        let s = random_density(2, 40_000 + seed).unwrap();
        seed += 1;
        if reduction_check(&s, Side::A).satisfied {
            collected.push(s);
        }
    }
    for pair in collected.chunks(2) {
        let joint = collective_reduction_check(&pair[0], &pair[1]).unwrap();
        assert!(joint.satisfied, "collective closure failed");
    }
}

#[test]
fn collective_check_dimensions() {
    let joint = collective_reduction_check(
        &isotropic(2, 0.3).unwrap(),
        &isotropic(3, 0.2).unwrap(),
    )
    .unwrap();
    assert_eq!(joint.witness_spectrum.len(), 36);

    // Oversized composites are refused up front.
    let big = isotropic(9, 0.5).unwrap();
    assert!(matches!(
        collective_reduction_check(&big, &big),
        Err(Error::DimensionOverflow { .. })
    ));
}

#[test]
fn collective_check_flags_a_shared_violation() {
    // A violating state paired with itself violates collectively: the
    // composite operator has minimum 1/4 − f² = 0.25 − 0.81 < 0 here.
    let violating = isotropic(2, 0.9).unwrap();
    let joint = collective_reduction_check(&violating, &violating).unwrap();
    assert!(!joint.satisfied);
    assert!((joint.min_value() - (0.25 - 0.81)).abs() <= 1e-10);

    // Pairing with a sufficiently mixed partner instead washes the
    // violation out — the composite operator factors as (I − ρ) ⊗ I/4,
    // which is positive whenever ρ's top eigenvalue stays below one. The
    // collective test is a check on the pair, not an OR of the factors.
    let mixed = BipartiteState::new(2, 2, &ComplexMatrix::identity(4) * 0.25).unwrap();
    let washed = collective_reduction_check(&violating, &mixed).unwrap();
    assert!(washed.satisfied);
    assert!((washed.min_value() - (1.0 - 0.9) / 4.0).abs() <= 1e-10);
}

#[test]
fn borderline_flag_marks_tolerated_negatives() {
    // isotropic(n, 1/n) sits exactly on the reduction boundary; whether the
    // computed minimum lands at 0⁻ or 0⁺ it must be reported as satisfied,
    // and the borderline flag must equal (min < 0).
    for n in 2..=4 {
        let s = isotropic(n, 1.0 / n as f64).unwrap();
        let r = reduction_check(&s, Side::A);
        assert!(r.satisfied);
        assert!(r.min_value().abs() <= 1e-12);
        assert_eq!(r.borderline, r.min_value() < 0.0);
    }
}
