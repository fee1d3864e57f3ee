//! Dense matrices over a [`Scalar`] field.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds from rows; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Option<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return None;
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Some(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Matrix product; panics if the inner dimensions differ.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i + 1..self.cols).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).is_negligible())
            })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.sub(&Self::identity(self.rows)).data.iter().all(T::is_negligible)
    }

    pub fn is_integral(&self) -> bool
    where
        T: IntegralTest,
    {
        self.data.iter().all(IntegralTest::is_integral_value)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // Largest magnitude pivot: harmless for exact fields, needed for floats.
            let best = (r..self.rows)
                .filter(|&i| !self[(i, c)].is_negligible())
                .max_by(|&a, &b| {
                    self[(a, c)]
                        .abs()
                        .partial_cmp(&self[(b, c)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            let Some(p) = best else { continue };
            self.swap_rows(r, p);
            let pivot = self[(r, c)].clone();
            for i in r + 1..self.rows {
                if self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone() / pivot.clone();
                for j in c..self.cols {
                    let v = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    self[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let pivots = aug.echelon();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        for r in (0..n).rev() {
            let p = aug[(r, r)].clone();
            for j in r..2 * n {
                let v = aug[(r, j)].clone() / p.clone();
                aug[(r, j)] = v;
            }
            for i in 0..r {
                let f = aug[(i, r)].clone();
                if f.is_zero() {
                    continue;
                }
                for j in r..2 * n {
                    let v = aug[(i, j)].clone() - f.clone() * aug[(r, j)].clone();
                    aug[(i, j)] = v;
                }
            }
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, m: i64) -> Option<Self> {
        let base = if m < 0 { self.inverse()? } else { self.clone() };
        let mut e = m.unsigned_abs();
        let mut acc = Self::identity(self.rows);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }
}

/// Membership test for the integers inside a field.
pub trait IntegralTest {
    fn is_integral_value(&self) -> bool;
}

impl IntegralTest for crate::scalar::Rational {
    fn is_integral_value(&self) -> bool {
        self.is_integer()
    }
}

impl IntegralTest for f64 {
    fn is_integral_value(&self) -> bool {
        (self - self.round()).abs() <= 1e-9
    }
}

impl IntegralTest for f32 {
    fn is_integral_value(&self) -> bool {
        (self - self.round()).abs() <= 1e-4
    }
}

impl<T: Scalar> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Result of a symmetric congruence reduction: `basisᵀ · gram · basis = diag(diagonal)`.
#[derive(Clone, Debug)]
pub struct Congruence<T> {
    /// Columns are the new basis vectors in the original coordinates.
    pub basis: Matrix<T>,
    pub diagonal: Vec<T>,
}

/// Diagonalizes a symmetric matrix by simultaneous row/column operations.
///
/// `start` fixes the initial basis (identity when `None`); pivots are taken in
/// that basis order. A block with zero diagonal but nonzero off-diagonal entry
/// `a_ij` is handled by first replacing basis vector `i` with `b_i + b_j`, which
/// makes the new diagonal entry `2 a_ij`.
pub fn congruence_diagonalize<T: Scalar>(gram: &Matrix<T>, start: Option<&Matrix<T>>) -> Congruence<T> {
    let n = gram.rows();
    let mut basis = start.cloned().unwrap_or_else(|| Matrix::identity(n));
    let mut a = basis.transpose().mul(gram).mul(&basis);

    let swap = |a: &mut Matrix<T>, basis: &mut Matrix<T>, i: usize, k: usize| {
        if i == k {
            return;
        }
        a.swap_rows(i, k);
        for r in 0..n {
            a.data.swap(r * n + i, r * n + k);
            basis.data.swap(r * n + i, r * n + k);
        }
    };

    for k in 0..n {
        if let Some(i) = (k..n).find(|&i| !a[(i, i)].is_negligible()) {
            swap(&mut a, &mut basis, i, k);
        } else if let Some((i, j)) = (k..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| !a[(i, j)].is_negligible())
        {
            // b_i <- b_i + b_j
            for r in 0..n {
                let v = basis[(r, i)].clone() + basis[(r, j)].clone();
                basis[(r, i)] = v;
            }
            for c in 0..n {
                let v = a[(i, c)].clone() + a[(j, c)].clone();
                a[(i, c)] = v;
            }
            for r in 0..n {
                let v = a[(r, i)].clone() + a[(r, j)].clone();
                a[(r, i)] = v;
            }
            swap(&mut a, &mut basis, i, k);
        } else {
            break;
        }
        let pivot = a[(k, k)].clone();
        for l in k + 1..n {
            if a[(l, k)].is_zero() {
                continue;
            }
            let f = a[(l, k)].clone() / pivot.clone();
            for r in 0..n {
                let v = basis[(r, l)].clone() - f.clone() * basis[(r, k)].clone();
                basis[(r, l)] = v;
            }
            for c in 0..n {
                let v = a[(l, c)].clone() - f.clone() * a[(k, c)].clone();
                a[(l, c)] = v;
            }
            for r in 0..n {
                let v = a[(r, l)].clone() - f.clone() * a[(r, k)].clone();
                a[(r, l)] = v;
            }
        }
    }
    let diagonal = (0..n).map(|i| a[(i, i)].clone()).collect();
    Congruence { basis, diagonal }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn inverse_and_rank() {
        let m = mat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(m.rank(), 3);
        let s = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.rank(), 1);
        assert!(s.inverse().is_none());
    }

    #[test]
    fn negative_powers() {
        let m = mat(&[&[1, 1], &[0, 1]]);
        assert_eq!(m.pow(-3).unwrap(), mat(&[&[1, -3], &[0, 1]]));
        assert!(m.pow(0).unwrap().is_identity());
    }

    #[test]
    fn congruence_handles_zero_diagonal() {
        let g = mat(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, -4, 0], &[0, 0, 0, -4]]);
        let c = congruence_diagonalize(&g, None);
        let d = c.basis.transpose().mul(&g).mul(&c.basis);
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    assert_eq!(d[(i, i)], c.diagonal[i]);
                } else {
                    assert_eq!(d[(i, j)], q(0));
                }
            }
        }
        assert_eq!(c.diagonal, vec![q(-4), q(-4), q(2), Rational::ratio(-1, 2)]);
    }
}
