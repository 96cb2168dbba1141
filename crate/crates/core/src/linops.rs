//! Dense least-squares kernels.
//!
//! [`IncrementalLs`] keeps an orthonormal basis `Q` and upper-triangular `R`
//! of the columns appended so far (`A = QR`), together with `Qᵀy` and the
//! residual `(I − P_A)y`. Appending a column costs `O(nk)`: one modified
//! Gram–Schmidt sweep plus a second reorthogonalization sweep.

use crate::{Error, Matrix, Result, Vector};

/// Relative tolerance of the dependence test: a new column whose component
/// orthogonal to the current span has norm `≤ RANK_TOL·‖a‖₂` is rejected.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct IncrementalLs {
    y: Vector,
    basis: Vec<Vector>,
    /// Column `j` of `R`, holding `j + 1` entries.
    r_cols: Vec<Vec<f64>>,
    qty: Vec<f64>,
    residual: Vector,
    residual_sq: f64,
}

impl IncrementalLs {
    /// Empty state for observation `y`; the residual starts at `y`.
    pub fn new(y: &Vector) -> Self {
        Self {
            y: y.clone(),
            basis: Vec::new(),
            r_cols: Vec::new(),
            qty: Vec::new(),
            residual: y.clone(),
            residual_sq: y.norm_squared(),
        }
    }

    /// Number of columns appended so far.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn observation(&self) -> &Vector {
        &self.y
    }

    /// Current residual `(I − P_A)y`.
    pub fn residual(&self) -> &Vector {
        &self.residual
    }

    pub fn residual_norm_sq(&self) -> f64 {
        self.residual_sq
    }

    /// Orthonormal basis of the appended columns, in append order.
    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Appends column `a`. On `RankDeficient` the state is left untouched.
    pub fn append(&mut self, a: &Vector) -> Result<()> {
        let k = self.len();
        if a.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: a.len() });
        }
        let a_norm = a.norm();
        if a_norm == 0.0 {
            return Err(Error::RankDeficient { column: k });
        }

        let mut v = a.clone();
        let mut coeffs = vec![0.0; k + 1];
        for _pass in 0..2 {
            for (q, c) in self.basis.iter().zip(coeffs.iter_mut()) {
                let proj = q.dot(&v);
                v.axpy(-proj, q, 1.0);
                *c += proj;
            }
        }
        let v_norm = v.norm();
        if v_norm <= RANK_TOL * a_norm {
            return Err(Error::RankDeficient { column: k });
        }
        v /= v_norm;
        coeffs[k] = v_norm;

        let step = v.dot(&self.residual);
        self.residual.axpy(-step, &v, 1.0);
        self.residual_sq = self.residual.norm_squared();
        self.qty.push(v.dot(&self.y));
        self.basis.push(v);
        self.r_cols.push(coeffs);
        Ok(())
    }

    /// Consuming form of [`append`](Self::append).
    pub fn with_column(mut self, a: &Vector) -> Result<Self> {
        self.append(a)?;
        Ok(self)
    }

    /// Least-squares coefficients of `y` on all appended columns.
    pub fn coefficients(&self) -> Vector {
        self.prefix_coefficients(self.len())
    }

    /// Least-squares coefficients of `y` on the first `m` appended columns.
    ///
    /// Because the factorization is built column by column, the leading
    /// `m × m` block of `R` factors the first `m` columns on its own.
    pub fn prefix_coefficients(&self, m: usize) -> Vector {
        assert!(m <= self.len(), "prefix {m} exceeds {} columns", self.len());
        self.back_substitute(&self.qty[..m])
    }

    /// Coefficients `A†b` of the projection of an arbitrary `b` onto the
    /// span of the appended columns.
    pub fn solve_for(&self, b: &Vector) -> Vector {
        let qtb: Vec<f64> = self.basis.iter().map(|q| q.dot(b)).collect();
        self.back_substitute(&qtb)
    }

    fn back_substitute(&self, rhs: &[f64]) -> Vector {
        let m = rhs.len();
        let mut x = Vector::zeros(m);
        for i in (0..m).rev() {
            let mut acc = rhs[i];
            for j in i + 1..m {
                acc -= self.r_cols[j][i] * x[j];
            }
            x[i] = acc / self.r_cols[i][i];
        }
        x
    }
}

/// Appends `a` to `state`, returning the updated state.
pub fn append_column(state: IncrementalLs, a: &Vector) -> Result<IncrementalLs> {
    state.with_column(a)
}

fn factor(a: &Matrix, y: &Vector) -> Result<IncrementalLs> {
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), actual: y.len() });
    }
    if a.ncols() > a.nrows() {
        return Err(Error::RankDeficient { column: a.nrows() });
    }
    let mut state = IncrementalLs::new(y);
    for j in 0..a.ncols() {
        state.append(&a.column(j).into_owned())?;
    }
    Ok(state)
}

/// Minimizer of `‖y − Ab‖₂` for full-column-rank `A`.
pub fn least_squares(a: &Matrix, y: &Vector) -> Result<Vector> {
    Ok(factor(a, y)?.coefficients())
}

/// `(I − P_A)y`; with zero columns this is `y`.
pub fn ortho_residual(y: &Vector, a: &Matrix) -> Result<Vector> {
    Ok(factor(a, y)?.residual().clone())
}

/// Copies the listed columns of `x` into a new matrix.
pub fn select_columns(x: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(x.nrows(), cols.len(), |i, j| x[(i, cols[j])])
}
