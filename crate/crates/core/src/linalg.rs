//! Thin helpers over nalgebra's complex SVD.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Relative singular-value cutoff used by every least-squares solve.
pub const PINV_RCOND: f64 = 1e-10;

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest singular value among the `min(rows, cols)` values.
pub fn smin(a: &CMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Numerical rank with cutoff `rtol · s_max`.
pub fn rank(a: &CMatrix, rtol: f64) -> usize {
    let s = singular_values(a);
    let Some(&top) = s.first() else { return 0 };
    s.iter().filter(|&&v| v > rtol * top).count()
}

/// Moore-Penrose pseudoinverse with a relative cutoff.
pub fn pinv(a: &CMatrix, rcond: f64) -> CMatrix {
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = CMatrix::zeros(a.ncols(), a.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > rcond * top && s > 0.0 {
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i).adjoint();
            out += (vi * ui) * Complex64::new(1.0 / s, 0.0);
        }
    }
    out
}

/// Least-squares solution `A⁺ b`.
pub fn lstsq(a: &CMatrix, b: &CVector) -> CVector {
    pinv(a, PINV_RCOND) * b
}

/// Null-space dimension of a square or tall matrix, `cols − rank`.
pub fn nullity(a: &CMatrix, rtol: f64) -> usize {
    a.ncols() - rank(a, rtol)
}
