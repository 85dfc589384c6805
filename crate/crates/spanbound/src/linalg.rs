//! Exact linear algebra over any [`Field`].
//!
//! Matrices are row-major and immutable from the caller's point of view;
//! reduction returns fresh values. Elimination is division-deferred: forward
//! steps use cross-multiplied row updates plus a field-specific row
//! normalization hook, and only the final pass divides by pivots. The result
//! is the unique reduced row echelon form, so every downstream basis is
//! canonical.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F: Field> {
    field: F,
    cols: usize,
    rows: Vec<Vec<F::Elem>>,
}

pub struct Rref<F: Field> {
    pub matrix: Matrix<F>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: F, nrows: usize, cols: usize) -> Self {
        let rows = (0..nrows).map(|_| vec![field.zero(); cols]).collect();
        Matrix { field, cols, rows }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.rows[i][i] = m.field.one();
        }
        m
    }

    pub fn from_rows(field: F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "expected {} columns, found a row with {}",
                    cols,
                    r.len()
                )));
            }
        }
        Ok(Matrix { field, cols, rows })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.rows[i][j]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[F::Elem]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut rows = vec![Vec::with_capacity(self.nrows()); self.cols];
        for r in &self.rows {
            for (j, e) in r.iter().enumerate() {
                rows[j].push(e.clone());
            }
        }
        Matrix {
            field: self.field.clone(),
            cols: self.nrows(),
            rows,
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot stack {} columns onto {}",
                other.cols, self.cols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Matrix {
            field: self.field.clone(),
            cols: self.cols,
            rows,
        })
    }

    fn is_zero_row(&self, row: &[F::Elem]) -> bool {
        row.iter().all(|e| self.field.is_zero(e))
    }

    /// Reduced row echelon form with deterministic leftmost-pivot,
    /// first-nonzero-row selection.
    pub fn rref(&self) -> Rref<F> {
        let f = &self.field;
        let mut rows = self.rows.clone();
        let nrows = rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(sel) = (r..nrows).find(|&i| !f.is_zero(&rows[i][c])) else {
                continue;
            };
            rows.swap(r, sel);
            for j in (r + 1)..nrows {
                if f.is_zero(&rows[j][c]) {
                    continue;
                }
                cross_eliminate(f, &mut rows, j, r, c);
            }
            pivots.push(c);
            r += 1;
            if r == nrows {
                break;
            }
        }
        for i in (0..r).rev() {
            let c = pivots[i];
            for j in 0..i {
                if f.is_zero(&rows[j][c]) {
                    continue;
                }
                cross_eliminate(f, &mut rows, j, i, c);
            }
            let inv = f.inv(&rows[i][c]).expect("pivot is nonzero");
            for e in rows[i].iter_mut() {
                *e = f.mul(e, &inv);
            }
        }
        Rref {
            matrix: Matrix {
                field: f.clone(),
                cols: self.cols,
                rows,
            },
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the right null space `{x : self * x = 0}`, one vector per
    /// row, ordered by ascending free column of the reduction.
    pub fn kernel(&self) -> Matrix<F> {
        let f = self.field.clone();
        let red = self.rref();
        let pivots = &red.pivots;
        let mut basis = Vec::new();
        let mut piv_iter = pivots.iter().peekable();
        let mut free_cols = Vec::new();
        for c in 0..self.cols {
            if piv_iter.peek() == Some(&&c) {
                piv_iter.next();
            } else {
                free_cols.push(c);
            }
        }
        for &fc in &free_cols {
            let mut v = vec![f.zero(); self.cols];
            v[fc] = f.one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red.matrix.get(i, fc));
            }
            basis.push(v);
        }
        Matrix {
            field: f,
            cols: self.cols,
            rows: basis,
        }
    }

    /// Solve `self * x = rhs` column by column; `None` when inconsistent.
    /// Free variables are set to zero, so the solution is canonical.
    pub fn solve(&self, rhs: &Matrix<F>) -> Option<Matrix<F>> {
        assert_eq!(self.nrows(), rhs.nrows(), "right-hand side height mismatch");
        let f = &self.field;
        let aug_cols = self.cols + rhs.cols;
        let mut rows = Vec::with_capacity(self.nrows());
        for (a, b) in self.rows.iter().zip(rhs.rows.iter()) {
            let mut row = a.clone();
            row.extend(b.iter().cloned());
            rows.push(row);
        }
        let aug = Matrix {
            field: f.clone(),
            cols: aug_cols,
            rows,
        };
        let red = aug.rref();
        if red.pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut sol = Matrix::zero(f.clone(), self.cols, rhs.cols);
        for (i, &pc) in red.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                sol.rows[pc][j] = red.matrix.get(i, self.cols + j).clone();
            }
        }
        Some(sol)
    }

    /// Row-space basis: the nonzero rows of the reduced echelon form.
    pub fn row_basis(&self) -> Matrix<F> {
        let red = self.rref();
        let rows = red.matrix.rows[..red.rank].to_vec();
        Matrix {
            field: self.field.clone(),
            cols: self.cols,
            rows,
        }
    }

    /// Does the row space contain `v`?
    pub fn row_space_contains(&self, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.cols);
        if self.is_zero_row(v) {
            return true;
        }
        let mut rows = self.rows.clone();
        rows.push(v.to_vec());
        let with = Matrix {
            field: self.field.clone(),
            cols: self.cols,
            rows,
        };
        with.rank() == self.rank()
    }
}

/// rows[j] <- pivot * rows[j] - rows[j][c] * rows[r], then renormalize.
fn cross_eliminate<F: Field>(f: &F, rows: &mut [Vec<F::Elem>], j: usize, r: usize, c: usize) {
    let pivot = rows[r][c].clone();
    let factor = rows[j][c].clone();
    let (pr, tr) = if j > r {
        let (a, b) = rows.split_at_mut(j);
        (&a[r], &mut b[0])
    } else {
        let (a, b) = rows.split_at_mut(r);
        (&b[0], &mut a[j])
    };
    for (t, p) in tr.iter_mut().zip(pr.iter()) {
        *t = f.sub(&f.mul(t, &pivot), &f.mul(p, &factor));
    }
    f.normalize_row(tr);
}

/// Basis (as rref rows) of the sum of two row spaces.
pub fn subspace_sum<F: Field>(u: &Matrix<F>, v: &Matrix<F>) -> Result<Matrix<F>> {
    Ok(u.stack(v)?.row_basis())
}

/// Basis (as rref rows) of the intersection of two row spaces, computed from
/// the kernel of the stacked bases: a kernel vector (alpha, gamma) of
/// [U^T | V^T] yields the intersection vector alpha * U = -gamma * V.
pub fn subspace_intersect<F: Field>(u: &Matrix<F>, v: &Matrix<F>) -> Result<Matrix<F>> {
    if u.ncols() != v.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "ambient dimensions differ: {} vs {}",
            u.ncols(),
            v.ncols()
        )));
    }
    let f = u.field().clone();
    if u.nrows() == 0 || v.nrows() == 0 {
        return Ok(Matrix::zero(f, 0, u.ncols()));
    }
    let stacked = u.stack(v)?.transpose();
    let ker = stacked.kernel();
    let a = u.nrows();
    let mut rows = Vec::new();
    for kv in ker.rows_iter() {
        let mut w = vec![f.zero(); u.ncols()];
        for (i, coef) in kv[..a].iter().enumerate() {
            if f.is_zero(coef) {
                continue;
            }
            for (slot, e) in w.iter_mut().zip(u.row(i)) {
                *slot = f.add(slot, &f.mul(coef, e));
            }
        }
        rows.push(w);
    }
    let m = Matrix::from_rows(f, u.ncols(), rows)?.row_basis();
    debug_assert_eq!(
        m.nrows() + subspace_sum(u, v)?.nrows(),
        u.row_basis().nrows() + v.row_basis().nrows(),
        "dimension formula violated"
    );
    Ok(m)
}

/// Are the vectors (1, a, a^2, ..., a^(n-1)) for the given points linearly
/// independent? Requires exactly `n` pairwise distinct points.
pub fn moment_family_independence<F: Field>(f: &F, n: usize, alphas: &[F::Elem]) -> Result<bool> {
    if alphas.len() != n {
        return Err(Error::DuplicateAlpha);
    }
    for i in 0..alphas.len() {
        for j in (i + 1)..alphas.len() {
            if alphas[i] == alphas[j] {
                return Err(Error::DuplicateAlpha);
            }
        }
    }
    let mut rows = Vec::with_capacity(n);
    for a in alphas {
        let mut row = Vec::with_capacity(n);
        let mut acc = f.one();
        for _ in 0..n {
            row.push(acc.clone());
            acc = f.mul(&acc, a);
        }
        rows.push(row);
    }
    let m = Matrix::from_rows(f.clone(), n, rows)?;
    Ok(m.rank() == n)
}
