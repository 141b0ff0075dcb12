//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Determinant via nalgebra's partial-pivoting LU.
pub fn det(m: &CMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(m.clone().lu().determinant())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise modulus of `U†U - I`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    max_abs_diff(&g, &identity(u.ncols()))
}

/// Largest entrywise modulus of `A - A†`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// descending order together with the matching eigenvector columns.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    // symmetrise first; nalgebra only reads one triangle
    let h = (a + a.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Nearest isometry (polar factor) `G (G†G)^{-1/2}`, computed as `U V†` from
/// the thin SVD of `g`. Requires `g` to have at least as many rows as columns.
pub fn polar_isometry(g: &CMatrix) -> CMatrix {
    debug_assert!(g.nrows() >= g.ncols());
    let svd = g.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    u * v_t
}

/// Pauli `σ_y`.
pub fn pauli_y() -> CMatrix {
    let i = Complex64::i();
    CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)],
    )
}
