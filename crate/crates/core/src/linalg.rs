//! Dense Hermitian linear algebra helpers.
//!
//! Eigendecompositions are delegated to `nalgebra`'s Hermitian solver. Results
//! are put in a reproducible form: eigenvalues ascending, each eigenvector
//! rotated so that its largest-magnitude component is real and positive.

use nalgebra::{DMatrix, DVector};

use crate::error::{contract, Result};
use crate::{Matrix8, Vector8, C64};

/// Eigenvalues (ascending) and matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<C64>>,
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest elementwise `|a - b|`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest elementwise deviation of `U^dagger U` from the identity.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let prod = u.adjoint() * u;
    max_abs_diff(&prod, &DMatrix::identity(u.nrows(), u.ncols()))
}

/// Rotates `v` by a global phase so its largest-magnitude entry is real positive.
/// Ties go to the lowest index.
pub fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0usize;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        // tolerate rounding-level ties
        if z.norm() > best_norm + 1e-14 {
            best_norm = z.norm();
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / v[best].norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}

/// Hermitian eigendecomposition. Fails if `m` is not Hermitian to `1e-9`.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(contract(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermiticity_defect(m);
    if defect > 1e-9 {
        return Err(contract(format!(
            "matrix is not Hermitian (asymmetry {defect:.3e})"
        )));
    }
    // symmetrise so rounding-level asymmetry does not leak into the solver
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: DVector<C64> = eig.eigenvectors.column(i).into_owned();
            fix_phase(&mut v);
            v
        })
        .collect();
    Ok(HermitianEigen { values, vectors })
}

/// `exp(-i t H)` for Hermitian `H`, via its eigendecomposition.
pub fn unitary_from_hermitian(h: &DMatrix<C64>, t: f64) -> Result<DMatrix<C64>> {
    let eig = hermitian_eigen(h)?;
    let n = h.nrows();
    let mut u = DMatrix::<C64>::zeros(n, n);
    for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
        let phase = C64::from_polar(1.0, -lambda * t);
        u += (v * v.adjoint()) * phase;
    }
    Ok(u)
}

pub fn to_dynamic(m: &Matrix8) -> DMatrix<C64> {
    DMatrix::from_fn(8, 8, |i, j| m[(i, j)])
}

pub fn vector8(v: &DVector<C64>) -> Vector8 {
    assert_eq!(v.len(), 8);
    Vector8::from_fn(|i, _| v[i])
}
