//! Dense complex linear algebra helpers.
//!
//! Everything is built on `nalgebra::DMatrix<Complex64>`. The Hermitian
//! eigensolver backs the square roots, operator norms and nullspaces used
//! throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{HardyError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Eigenvalues above `-TOL_PSD` are treated as rounding noise and clamped.
pub const TOL_PSD: f64 = 1e-10;
/// Relative asymmetry tolerated before a matrix is rejected as non-Hermitian.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Matrices whose smaller side exceeds this use the Frobenius bound in
/// [`residual_norm`].
pub const EXACT_NORM_LIMIT: usize = 320;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn check_finite(x: &CMatrix) -> Result<()> {
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            let v = x[(i, j)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(HardyError::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn frobenius(x: &CMatrix) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &CMatrix) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let h = (a + a.adjoint()) * real(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest singular value.
pub fn operator_norm(x: &CMatrix) -> Result<f64> {
    check_finite(x)?;
    Ok(operator_norm_unchecked(x))
}

pub(crate) fn operator_norm_unchecked(x: &CMatrix) -> f64 {
    if x.nrows() == 0 || x.ncols() == 0 {
        return 0.0;
    }
    let scale = max_abs(x);
    if scale == 0.0 {
        return 0.0;
    }
    // Rescale before forming the Gram matrix so tiny residuals do not underflow.
    let y = x * real(1.0 / scale);
    let gram = if y.ncols() <= y.nrows() {
        y.adjoint() * &y
    } else {
        &y * y.adjoint()
    };
    let (values, _) = hermitian_eigen(&gram);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    scale * top.sqrt()
}

/// Operator norm for moderate sizes, Frobenius norm (an upper bound) beyond
/// [`EXACT_NORM_LIMIT`]. Used for residuals, where an upper bound suffices.
pub fn residual_norm(x: &CMatrix) -> f64 {
    if x.nrows().min(x.ncols()) <= EXACT_NORM_LIMIT {
        operator_norm_unchecked(x)
    } else {
        frobenius(x)
    }
}

pub fn hermitian_asymmetry(a: &CMatrix) -> f64 {
    frobenius(&(a - a.adjoint()))
}

/// Positive square root of a Hermitian positive semidefinite matrix.
pub fn positive_sqrt(a: &CMatrix) -> Result<CMatrix> {
    positive_sqrt_with_tol(a, TOL_PSD)
}

pub fn positive_sqrt_with_tol(a: &CMatrix, tol_psd: f64) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(HardyError::ShapeMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    check_finite(a)?;
    let size = frobenius(a);
    let asym = hermitian_asymmetry(a);
    if asym > TOL_HERMITIAN * size.max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(HardyError::NotHermitian { asymmetry: asym });
    }
    let (values, vectors) = hermitian_eigen(a);
    if let Some(&min) = values.first() {
        if min < -tol_psd {
            return Err(HardyError::NotPsd { min_eigenvalue: min });
        }
    }
    Ok(spectral_apply(&values, &vectors, |x| x.max(0.0).sqrt()))
}

/// `V f(Λ) V*` for an eigen-decomposition.
pub fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let fv = real(f(v));
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// Kronecker product with row-major block convention:
/// `(a ⊗ b)[(i, k), (j, l)] = a[i, j] b[k, l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Orthonormal basis of the (numerical) nullspace of `a`, as columns.
///
/// Uses the eigen-decomposition of `a* a`; eigenvalues of `a* a` below
/// `threshold * max(1, ‖a‖²)` count as zero.
pub fn nullspace(a: &CMatrix, threshold: f64) -> CMatrix {
    let n = a.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if a.nrows() == 0 {
        return identity(n);
    }
    let gram = a.adjoint() * a;
    nullspace_of_gram(&gram, threshold)
}

/// Nullspace from a precomputed Gram matrix `a* a`.
pub fn nullspace_of_gram(gram: &CMatrix, threshold: f64) -> CMatrix {
    let n = gram.ncols();
    let (values, vectors) = hermitian_eigen(gram);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = threshold * top.max(1.0);
    let keep: Vec<usize> = (0..n).filter(|&i| values[i] <= cut).collect();
    CMatrix::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])])
}

/// Row-major flattening of a matrix.
pub fn vec_row(x: &CMatrix) -> DVector<C64> {
    let (r, c) = x.shape();
    DVector::from_fn(r * c, |k, _| x[(k / c, k % c)])
}

pub fn unvec_row(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Frobenius inner product `tr(a* b)`.
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace(a: &CMatrix) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}
