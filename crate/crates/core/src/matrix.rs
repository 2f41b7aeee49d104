//! Dense exact matrices and the elimination kernels everything else is built on.
//!
//! Pivoting is deterministic (leftmost column, then topmost row), so every
//! basis produced here (kernels, complements, particular solutions) is
//! reproducible bit for bit.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::field::{Field, Scalar};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = f(r, c);
                assert_eq!(x.field(), field, "entry from the wrong field");
                data.push(x);
            }
        }
        Matrix { field, rows, cols, data }
    }

    pub fn from_i64(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix::from_fn(field, rows, cols, |r, c| field.from_i64(entries[r * cols + c]))
    }

    pub fn from_rows(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Matrix { field, rows: n, cols, data }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Self {
        Matrix::from_fn(field, rows, columns.len(), |r, c| columns[c][r].clone())
    }

    pub fn column_vector(field: Field, v: &[Scalar]) -> Self {
        Matrix::from_columns(field, v.len(), &[v.to_vec()])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Scalar) {
        assert_eq!(x.field(), self.field);
        self.data[r * self.cols + c] = x;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix, Error> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch);
        }
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * out.cols + c;
                    out.data[idx] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = self.field.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        Matrix::from_fn(self.field, self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                rhs.get(r, c - self.cols).clone()
            }
        })
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix {
            field: self.field,
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.field, rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// Index and value of the first nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, &Scalar)> {
        self.data.iter().enumerate().find(|(_, x)| !x.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Reduced row echelon form; pivots chosen leftmost column first, topmost row within it.
    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Vec<Scalar>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let pivots = rref_rows(self.field, &mut rows, self.cols);
        Rref {
            reduced: Matrix::from_rows(self.field, self.cols, rows),
            pivots,
        }
    }

    /// Basis of the right kernel, as the columns of a `cols × k` matrix.
    ///
    /// One basis vector per free column, carrying a 1 in that column.
    pub fn kernel(&self) -> Matrix {
        let Rref { reduced, pivots } = self.rref();
        kernel_from_rref(&reduced, &pivots)
    }

    /// Solves `self · X = rhs`.
    pub fn solve(&self, rhs: &Matrix) -> Result<Solution, Error> {
        rref_solve(self, rhs)
    }

    /// A particular solution of `self · x = b`, if one exists.
    pub fn solve_vec(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        let rhs = Matrix::column_vector(self.field, b);
        match rref_solve(self, &rhs).expect("field and shape checked by caller") {
            Solution::Consistent { particular, .. } => Some(particular.column(0)),
            Solution::Inconsistent => None,
        }
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        match rref_solve(self, &Matrix::identity(self.field, self.rows)).ok()? {
            Solution::Consistent { particular, kernel } if kernel.cols() == 0 => Some(particular),
            _ => None,
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.to_string()).collect())
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Matrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let entries: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-self.field.one())
    }
}

#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum Solution {
    /// `particular` is `A.cols × B.cols`; `kernel` holds a basis of `ker A` as columns.
    Consistent { particular: Matrix, kernel: Matrix },
    Inconsistent,
}

/// In-place Gauss-Jordan elimination on row vectors; returns the pivot columns.
///
/// Only the first `ncols` columns are eligible as pivots, so an augmented
/// right-hand side can ride along in the trailing columns.
pub(crate) fn rref_rows(field: Field, rows: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let Some(found) = (top..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(top, found);
        let inv = rows[top][col].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for x in rows[top].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let support: Vec<usize> = (0..rows[top].len()).filter(|&c| !rows[top][c].is_zero()).collect();
        let pivot_row = rows[top].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == top || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for &c in &support {
                let delta = &factor * &pivot_row[c];
                row[c] -= &delta;
            }
        }
        let _ = field;
        pivots.push(col);
        top += 1;
    }
    pivots
}

fn kernel_from_rref(reduced: &Matrix, pivots: &[usize]) -> Matrix {
    let field = reduced.field();
    let n = reduced.cols();
    let is_pivot = {
        let mut v = vec![false; n];
        for &p in pivots {
            v[p] = true;
        }
        v
    };
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut basis = Matrix::zeros(field, n, free.len());
    for (k, &fc) in free.iter().enumerate() {
        basis.set(fc, k, field.one());
        for (row, &pc) in pivots.iter().enumerate() {
            let x = reduced.get(row, fc);
            if !x.is_zero() {
                basis.set(pc, k, -x);
            }
        }
    }
    basis
}

/// Exact solution description of `A · X = B`.
pub fn rref_solve(a: &Matrix, b: &Matrix) -> Result<Solution, Error> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    if a.rows() != b.rows() {
        return Err(Error::Shape(format!(
            "system has {} equations but right-hand side has {} rows",
            a.rows(),
            b.rows()
        )));
    }
    let field = a.field();
    let n = a.cols();
    let mut rows: Vec<Vec<Scalar>> = (0..a.rows())
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.extend_from_slice(b.row(r));
            row
        })
        .collect();
    let pivots = rref_rows(field, &mut rows, n);
    for row in rows.iter().skip(pivots.len()) {
        if row[n..].iter().any(|x| !x.is_zero()) {
            return Ok(Solution::Inconsistent);
        }
    }
    let mut particular = Matrix::zeros(field, n, b.cols());
    for (r, &pc) in pivots.iter().enumerate() {
        for c in 0..b.cols() {
            particular.set(pc, c, rows[r][n + c].clone());
        }
    }
    let reduced = Matrix::from_rows(field, n, rows.into_iter().map(|mut r| {
        r.truncate(n);
        r
    }).collect());
    let kernel = kernel_from_rref(&reduced, &pivots);
    Ok(Solution::Consistent { particular, kernel })
}

/// Quotient `k^rows / im A`, presented by a complement of coordinates.
#[derive(Clone, Debug)]
pub struct Cokernel {
    /// `|complement| × rows`, with `projection · A = 0`.
    pub projection: Matrix,
    /// Coordinates of `k^rows` whose images form the quotient basis, ascending.
    pub complement: Vec<usize>,
}

/// Cokernel of `A`; the quotient basis is the lexicographically first set of
/// coordinates not hit by pivots of the column space.
pub fn cokernel(a: &Matrix) -> Cokernel {
    let field = a.field();
    let m = a.rows();
    let Rref { reduced, pivots } = a.transpose().rref();
    let mut is_pivot = vec![false; m];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let complement: Vec<usize> = (0..m).filter(|&c| !is_pivot[c]).collect();
    // x ↦ x − Σ_k x[p_k]·row_k, then read the complement coordinates.
    let mut projection = Matrix::zeros(field, complement.len(), m);
    for (out, &c) in complement.iter().enumerate() {
        projection.set(out, c, field.one());
        for (k, &p) in pivots.iter().enumerate() {
            let x = reduced.get(k, c);
            if !x.is_zero() {
                projection.set(out, p, -x);
            }
        }
    }
    Cokernel { projection, complement }
}

/// Sparse coordinate vector helpers shared by the algebra tables.
pub fn dot(a: &[Scalar], b: &[Scalar], field: Field) -> Scalar {
    let mut acc = field.zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

pub fn axpy(y: &mut [Scalar], a: &Scalar, x: &[Scalar]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += &(a * xi);
        }
    }
}

pub fn unit_vector(field: Field, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let a = Matrix::identity(q(), 2);
        let b = Matrix::from_i64(q(), 2, 3, &[1, 2, 3, 4, 5, 6]);
        match rref_solve(&a, &b).unwrap() {
            Solution::Consistent { particular, kernel } => {
                assert_eq!(particular, b);
                assert_eq!(kernel.cols(), 0);
            }
            Solution::Inconsistent => panic!(),
        }
    }

    #[test]
    fn zero_system_has_full_kernel() {
        let a = Matrix::zeros(q(), 2, 2);
        let b = Matrix::zeros(q(), 2, 1);
        match rref_solve(&a, &b).unwrap() {
            Solution::Consistent { kernel, .. } => assert_eq!(kernel.cols(), 2),
            Solution::Inconsistent => panic!(),
        }
    }

    #[test]
    fn inconsistent_system_detected() {
        let a = Matrix::from_i64(q(), 2, 1, &[1, 1]);
        let b = Matrix::from_i64(q(), 2, 1, &[1, 2]);
        assert!(matches!(rref_solve(&a, &b).unwrap(), Solution::Inconsistent));
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = Matrix::identity(q(), 2);
        let b = Matrix::zeros(Field::Prime(3), 2, 1);
        assert!(matches!(rref_solve(&a, &b), Err(Error::FieldMismatch)));
    }

    #[test]
    fn cokernel_of_identity_is_trivial() {
        let c = cokernel(&Matrix::identity(q(), 3));
        assert_eq!(c.projection.shape(), (0, 3));
    }

    #[test]
    fn cokernel_of_zero_is_everything() {
        let c = cokernel(&Matrix::zeros(q(), 3, 2));
        assert_eq!(c.projection, Matrix::identity(q(), 3));
        assert_eq!(c.complement, vec![0, 1, 2]);
    }

    #[test]
    fn cokernel_picks_first_free_coordinates() {
        // image spanned by e0 + e1
        let a = Matrix::from_i64(q(), 3, 1, &[1, 1, 0]);
        let c = cokernel(&a);
        assert_eq!(c.complement, vec![1, 2]);
        assert!((&c.projection * &a).is_zero());
    }

    #[test]
    fn empty_shapes_are_legal() {
        let a = Matrix::zeros(q(), 0, 4);
        assert_eq!(a.kernel().cols(), 4);
        let b = Matrix::zeros(q(), 3, 0);
        assert_eq!(cokernel(&b).complement.len(), 3);
        assert_eq!((&Matrix::zeros(q(), 2, 0) * &Matrix::zeros(q(), 0, 5)).shape(), (2, 5));
    }

    #[test]
    fn inverse_of_unitriangular() {
        let a = Matrix::from_i64(q(), 3, 3, &[1, 2, 3, 0, 1, 4, 0, 0, 1]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(q(), 3));
        assert!(Matrix::zeros(q(), 2, 2).inverse().is_none());
    }
}
