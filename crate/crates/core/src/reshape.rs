//! The reshape isomorphism between tensors and matrices, numerical rank and
//! square-system inversion.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{Shape, Tensor, ZERO};

/// Reshaped view of a tensor: `prod(S) x prod(T)` complex matrix.
pub type Matrix = DMatrix<Complex64>;

/// `rsh(A)`. Storage order is shared, so this is a plain copy.
pub fn rsh(a: &Tensor) -> Matrix {
    let shape = a.shape();
    Matrix::from_column_slice(shape.rows(), shape.cols(), a.entries())
}

/// Inverse of [`rsh`] for the given target shape.
pub fn rsh_inv(m: &Matrix, shape: &Shape) -> Result<Tensor> {
    if m.nrows() != shape.rows() || m.ncols() != shape.cols() {
        return Err(Error::MatrixSize {
            rows: m.nrows(),
            cols: m.ncols(),
            shape: shape.extents().to_vec(),
            split: shape.split(),
            need_rows: shape.rows(),
            need_cols: shape.cols(),
        });
    }
    Tensor::new(shape.clone(), m.as_slice().to_vec())
}

/// Default relative rank tolerance `max(rows, cols) * eps`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s = thin_svd(m).s;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Thin SVD `m = u * diag(s) * v^H` with `k = min(rows, cols)` columns.
struct Svd {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
}

// nalgebra's bidiagonal SVD can stop early with errors near 1e-3 on small
// rank-deficient inputs, so the decomposition itself comes from faer.
fn thin_svd(m: &Matrix) -> Svd {
    let fm = faer::Mat::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let svd = fm.thin_svd().expect("SVD of a finite matrix converges");
    let (u, v) = (svd.U(), svd.V());
    let k = m.nrows().min(m.ncols());
    Svd {
        u: Matrix::from_fn(m.nrows(), k, |i, j| u[(i, j)]),
        s: (0..k).map(|j| svd.S()[j].re).collect(),
        v: Matrix::from_fn(m.ncols(), k, |i, j| v[(i, j)]),
    }
}

/// Count of singular values above `rtol * sigma_max`.
pub fn matrix_rank(m: &Matrix, rtol: Option<f64>) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    let rtol = rtol.unwrap_or_else(|| default_rank_tol(m.nrows(), m.ncols()));
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// Reshape rank: numerical rank of `rsh(a)`.
pub fn rshrank(a: &Tensor, rtol: Option<f64>) -> usize {
    matrix_rank(&rsh(a), rtol)
}

/// SVD pseudoinverse with singular values at or below `rtol * sigma_max` dropped.
pub fn pinv_matrix(m: &Matrix, rtol: Option<f64>) -> Matrix {
    let (rows, cols) = m.shape();
    let svd = thin_svd(m);
    let smax = svd.s.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = rtol.unwrap_or_else(|| default_rank_tol(rows, cols)) * smax;

    let mut out = Matrix::zeros(cols, rows);
    for (k, &sigma) in svd.s.iter().enumerate() {
        if sigma <= cutoff || sigma == 0.0 {
            continue;
        }
        out += (svd.v.column(k) * svd.u.column(k).adjoint()).unscale(sigma);
    }
    out
}

/// Orthonormal basis of the null space of `m` as columns. An empty null space
/// is returned as a single zero column so rank arithmetic still works.
pub fn null_space(m: &Matrix, rtol: Option<f64>) -> Matrix {
    let (rows, cols) = m.shape();
    // pad to at least square so the SVD yields a full right basis
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = thin_svd(&padded);
    let smax = svd.s.iter().fold(0.0_f64, |a, &b| a.max(b));
    let cutoff = rtol.unwrap_or_else(|| default_rank_tol(rows, cols)) * smax;

    let null_rows: Vec<usize> = svd
        .s
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == 0.0 || s <= cutoff)
        .map(|(k, _)| k)
        .collect();
    if null_rows.is_empty() {
        return Matrix::zeros(cols, 1);
    }
    let mut basis = Matrix::zeros(cols, null_rows.len());
    for (j, &k) in null_rows.iter().enumerate() {
        basis.set_column(j, &svd.v.column(k));
    }
    basis
}

/// Basis of `N(a)` as a tensor in `C^{T(t) x k}`.
pub fn null_space_basis(a: &Tensor, rtol: Option<f64>) -> Tensor {
    let basis = null_space(&rsh(a), rtol);
    let shape = Shape::from_blocks(a.shape().col_extents(), &[basis.ncols()]).expect("extents come from a valid shape");
    Tensor::from_parts(shape, basis.as_slice().to_vec())
}

/// Inverse of a square tensor `f` in `C^{T x T}` via LU on `rsh(f)`.
///
/// Fails with [`Error::Singular`] when the 2-norm condition number is at or
/// above `1 / (n * eps)`.
pub fn square_inverse(f: &Tensor) -> Result<Tensor> {
    let shape = f.shape();
    if !shape.is_square() {
        return Err(Error::NotSquare {
            rows: shape.row_extents().to_vec(),
            cols: shape.col_extents().to_vec(),
        });
    }
    let m = rsh(f);
    let n = m.nrows();
    let s = singular_values(&m);
    let (smax, smin) = (s[0], s[n - 1]);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if smax == 0.0 || condition >= 1.0 / (n as f64 * f64::EPSILON) {
        return Err(Error::Singular { condition });
    }
    let inv = m.lu().try_inverse().ok_or(Error::Singular { condition })?;
    if inv.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular { condition });
    }
    Ok(Tensor::from_parts(shape.clone(), inv.as_slice().to_vec()))
}

/// Horizontal concatenation `[x | y]` of two matrices with equal row counts.
pub(crate) fn hstack(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            left: x.nrows(),
            right: y.nrows(),
        });
    }
    let mut out = Matrix::from_element(x.nrows(), x.ncols() + y.ncols(), ZERO);
    out.view_mut((0, 0), x.shape()).copy_from(x);
    out.view_mut((0, x.ncols()), y.shape()).copy_from(y);
    Ok(out)
}
