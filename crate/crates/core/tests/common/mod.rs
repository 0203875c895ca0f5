#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use numrad_core::linalg::{ComplexMatrix, ComplexVector};
use proptest::prelude::*;

pub fn to_na(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn from_na(a: &DMatrix<Complex64>) -> ComplexMatrix {
    let rows = (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect();
    ComplexMatrix::from_rows(rows).unwrap()
}

/// Largest singular value via nalgebra's SVD.
pub fn na_norm(a: &ComplexMatrix) -> f64 {
    to_na(a)
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Sorted eigenvalues of a Hermitian matrix via nalgebra.
pub fn na_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(a).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `A^t` for PSD `A` via nalgebra's Hermitian eigendecomposition.
pub fn na_psd_power(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let eig = to_na(a).symmetric_eigen();
    let d = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| {
            let l = l.max(0.0);
            Complex64::new(if t == 0.0 { 1.0 } else { l.powf(t) }, 0.0)
        }),
    );
    let u = &eig.eigenvectors;
    from_na(&(u * DMatrix::from_diagonal(&d) * u.adjoint()))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max_dim).prop_flat_map(|n| {
        prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n).prop_map(move |v| {
            ComplexMatrix::new(
                n,
                n,
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .unwrap()
        })
    })
}

pub fn vector_of(n: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n).prop_map(|v| {
        ComplexVector::new(
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

pub fn unit_vector_of(n: usize) -> impl Strategy<Value = ComplexVector> {
    vector_of(n).prop_filter_map("zero vector", |v| v.normalized())
}

/// A matrix together with two unit vectors of matching dimension.
pub fn matrix_and_units(
    max_dim: usize,
) -> impl Strategy<Value = (ComplexMatrix, ComplexVector, ComplexVector)> {
    matrix_strategy(max_dim).prop_flat_map(|m| {
        let n = m.rows();
        (Just(m), unit_vector_of(n), unit_vector_of(n))
    })
}
