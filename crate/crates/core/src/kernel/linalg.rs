use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use super::echelon::{Echelon, SparseRow};
use super::rational::{format_rational, rat, Rational};

/// Dense exact matrix in row-major order.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            entries.extend(row);
        }
        Self {
            rows: n,
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (r + 1..self.cols).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .sum()
    }

    /// Trace of `self * other` without forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> Rational {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Rational::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if !a.is_zero() {
                    let b = &other[(k, i)];
                    if !b.is_zero() {
                        acc += a * b;
                    }
                }
            }
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// Row-major entries flattened into a vector (used for spans of matrices).
    pub fn flatten(&self) -> Vec<Rational> {
        self.entries.clone()
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        for r in 0..self.rows {
            ech.insert_dense(self.row(r));
        }
        ech.rank()
    }

    /// Determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Rational {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut rows = self.row_vectors();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                rows.swap(p, col);
                det = -det;
            }
            let pivot = rows[col][col].clone();
            det *= &pivot;
            for r in col + 1..n {
                if rows[r][col].is_zero() {
                    continue;
                }
                let factor = &rows[r][col] / &pivot;
                #[allow(clippy::needless_range_loop)]
                for c in col..n {
                    let sub = &factor * &rows[col][c];
                    rows[r][c] -= sub;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            cols.push(solve_in_image(self, &e)?);
        }
        Some(Matrix::from_rows(cols).transpose())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(format_rational).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Matrix stored as sparse rows; used for the large, mostly-zero cochain
/// maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    /// Appends a row, dropping zero entries. Columns must be increasing.
    pub fn push_row(&mut self, row: SparseRow) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(row.iter().all(|(c, _)| *c < self.cols));
        self.rows
            .push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.rows[r]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &SparseRow> {
        self.rows.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows.len(), self.cols);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                m[(r, *c)] = v.clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length");
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .filter(|(c, _)| !v[*c].is_zero())
                    .map(|(c, a)| a * &v[*c])
                    .sum()
            })
            .collect()
    }

    /// Sparse product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows(), "matrix product shape");
        let mut out = SparseMatrix::new(rhs.cols);
        let mut acc: Vec<Rational> = vec![Rational::zero(); rhs.cols];
        let mut touched: Vec<usize> = Vec::new();
        for row in &self.rows {
            for (k, a) in row {
                for (j, b) in &rhs.rows[*k] {
                    if acc[*j].is_zero() {
                        touched.push(*j);
                    }
                    acc[*j] += a * b;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let entries = touched
                .drain(..)
                .map(|j| (j, std::mem::take(&mut acc[j])))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            out.rows.push(entries);
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t: Vec<SparseRow> = vec![Vec::new(); self.cols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                t[*c].push((r, v.clone()));
            }
        }
        SparseMatrix {
            cols: self.rows.len(),
            rows: t,
        }
    }

    pub fn max_abs(&self) -> Rational {
        super::rational::max_abs(self.rows.iter().flatten().map(|(_, v)| v))
    }

    pub fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.cols);
        for row in &self.rows {
            ech.insert_sparse(row);
        }
        ech
    }
}

impl From<&Matrix> for SparseMatrix {
    fn from(m: &Matrix) -> Self {
        let mut s = SparseMatrix::new(m.cols());
        for r in 0..m.rows() {
            s.push_row(
                m.row(r)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect(),
            );
        }
        s
    }
}

/// Reduced row echelon form of the span of `vectors`, zero rows dropped.
/// Returns the rows and their pivot columns.
pub fn rref(vectors: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut rows: Vec<Vec<Rational>> = vectors.to_vec();
    for r in &rows {
        assert_eq!(r.len(), cols, "vector length");
    }
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = Rational::one() / &rows[next][col];
        for v in rows[next].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    (rows, pivots)
}

/// Reduces `v` modulo the span of RREF `rows` with the given pivots, so the
/// result vanishes on every pivot column.
pub fn reduce_modulo(v: &[Rational], rows: &[Vec<Rational>], pivots: &[usize]) -> Vec<Rational> {
    let mut out = v.to_vec();
    for (row, &p) in rows.iter().zip(pivots) {
        if out[p].is_zero() {
            continue;
        }
        let factor = out[p].clone();
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o -= &factor * r;
            }
        }
    }
    out
}

/// Rank and null space of `m`. The null-space basis is returned in reduced
/// row echelon form so results are independent of elimination order.
pub fn rank_and_kernel(m: &Matrix) -> (usize, Vec<Vec<Rational>>) {
    let ech = SparseMatrix::from(m).echelon();
    let kernel = ech.null_space();
    let (kernel, _) = rref(&kernel, m.cols());
    (ech.rank(), kernel)
}

/// Some `x` with `m x = rhs`, or `None` when `rhs` is outside the column
/// space of `m`. Free variables are set to zero.
pub fn solve_in_image(m: &Matrix, rhs: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(rhs.len(), m.rows(), "rhs length");
    let n = m.cols();
    let mut ech = Echelon::new(n + 1);
    for (r, b) in rhs.iter().enumerate() {
        let mut row: SparseRow = m
            .row(r)
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.clone()))
            .collect();
        if !b.is_zero() {
            row.push((n, b.clone()));
        }
        ech.insert_sparse(&row);
    }
    if ech.is_pivot(n) {
        return None;
    }
    // [m | rhs] (x, -1) = 0
    let mut x = ech.back_substitute(&[(n, -Rational::one())]);
    x.truncate(n);
    Some(x)
}
