//! Property tests for the dense complex-matrix layer: algebraic identities,
//! decomposition residual contracts, and vectorization round trips.

use num_complex::Complex64;
use proptest::prelude::*;
use qdistill::matrix::{matrix_to_vec, vec_to_matrix};
use qdistill::{frob_dist, ComplexMatrix};

/// Strategy: an r×c matrix with entries in the complex unit square.
fn matrix(r: usize, c: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * c).prop_map(move |parts| {
        let data = parts
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_vec(r, c, data).unwrap()
    })
}

/// Strategy: an n×n Hermitian matrix (G + G†)/2.
fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n, n).prop_map(|g| &(&g + &g.dagger()) * 0.5)
}

proptest! {
    #[test]
    fn kron_multiplies_traces(a in matrix(3, 3), b in matrix(4, 4)) {
        let lhs = a.kron(&b).trace().unwrap();
        let rhs = a.trace().unwrap() * b.trace().unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn kron_is_multiplicative(a in matrix(2, 3), b in matrix(3, 2), c in matrix(2, 2), d in matrix(2, 3)) {
        // (A⊗C)(B⊗D) = (AB)⊗(CD).
        let lhs = &a.kron(&c) * &b.kron(&d);
        let rhs = (&a * &b).kron(&(&c * &d));
        prop_assert!(frob_dist(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn dagger_reverses_products(a in matrix(3, 3), b in matrix(3, 3)) {
        let lhs = (&a * &b).dagger();
        let rhs = &b.dagger() * &a.dagger();
        prop_assert!(frob_dist(&lhs, &rhs) <= 1e-13);
        prop_assert!(frob_dist(&a.dagger().dagger(), &a) == 0.0);
    }

    #[test]
    fn eigh_reconstructs_and_orders(h in hermitian(5)) {
        let spec = h.eigh().unwrap();
        // Eigenvalues ascending.
        for pair in spec.eigenvalues.windows(2) {
            prop_assert!(pair[0] <= pair[1]);
        }
        // H·v_k = λ_k·v_k within the residual contract.
        let n = 5;
        for k in 0..n {
            let v = spec.eigenvector(k);
            let vm = vec_to_matrix(&v, n, 1).unwrap();
            let hv = &h * &vm;
            let lv = &vm * spec.eigenvalues[k];
            prop_assert!(frob_dist(&hv, &lv) <= 1e-9);
        }
        // Eigenbasis orthonormal.
        let q = &spec.eigenvectors.dagger() * &spec.eigenvectors;
        prop_assert!(frob_dist(&q, &ComplexMatrix::identity(n)) <= 1e-9);
    }

    #[test]
    fn svd_reconstructs_and_orders(a in matrix(4, 3)) {
        let svd = a.svd();
        for pair in svd.singular_values.windows(2) {
            prop_assert!(pair[0] >= pair[1]);
            prop_assert!(pair[1] >= 0.0);
        }
        // Thin SVD: u is 4×k and w is 3×k with k = min(4, 3).
        let k = svd.singular_values.len();
        let mut s = ComplexMatrix::zeros(k, k);
        for (i, &v) in svd.singular_values.iter().enumerate() {
            s[(i, i)] = Complex64::new(v, 0.0);
        }
        let rebuilt = &(&svd.u * &s) * &svd.w.dagger();
        prop_assert!(frob_dist(&rebuilt, &a) <= 1e-9);
    }

    #[test]
    fn op_norm_is_top_singular_value(a in matrix(4, 4)) {
        let top = a.svd().singular_values[0];
        prop_assert!((a.op_norm() - top).abs() <= 1e-12);
        // Sub-multiplicative sanity on a vector: ‖Av‖ ≤ ‖A‖·‖v‖.
        let v = vec_to_matrix(&vec![Complex64::new(0.5, -0.5); 4], 4, 1).unwrap();
        prop_assert!((&a * &v).frob_norm() <= a.op_norm() * v.frob_norm() + 1e-12);
    }

    #[test]
    fn vec_round_trip(a in matrix(3, 4)) {
        let v = matrix_to_vec(&a);
        let back = vec_to_matrix(&v, 3, 4).unwrap();
        prop_assert!(frob_dist(&back, &a) == 0.0);
    }

    #[test]
    fn vectorization_carries_left_factors_to_the_right(a in matrix(3, 3), m in matrix(3, 3)) {
        // With |m⟩ = Σ m_ij |i⟩⊗|j⟩: (A⊗I)|m⟩ = |A·m⟩ and (I⊗A)|m⟩ = |m·Aᵀ⟩.
        let id = ComplexMatrix::identity(3);
        let mv = vec_to_matrix(&matrix_to_vec(&m), 9, 1).unwrap();
        let lhs = &a.kron(&id) * &mv;
        let rhs = vec_to_matrix(&matrix_to_vec(&(&a * &m)), 9, 1).unwrap();
        prop_assert!(frob_dist(&lhs, &rhs) <= 1e-12);
        let lhs2 = &id.kron(&a) * &mv;
        let rhs2 = vec_to_matrix(&matrix_to_vec(&(&m * &a.transpose())), 9, 1).unwrap();
        prop_assert!(frob_dist(&lhs2, &rhs2) <= 1e-12);
    }
}

#[test]
fn trace_requires_square() {
    let m = ComplexMatrix::zeros(2, 3);
    assert!(m.trace().is_err());
}

#[test]
fn eigh_rejects_non_hermitian_and_non_square() {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(m.eigh().is_err());
    assert!(ComplexMatrix::zeros(2, 3).eigh().is_err());
}

#[test]
fn from_vec_rejects_bad_shapes_and_non_finite_entries() {
    assert!(ComplexMatrix::from_vec(2, 2, vec![Complex64::ONE; 3]).is_err());
    assert!(
        ComplexMatrix::from_vec(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err()
    );
}
