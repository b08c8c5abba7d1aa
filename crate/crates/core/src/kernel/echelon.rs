//! Fraction-free incremental row echelon form.
//!
//! Rows are scaled to primitive integer vectors and eliminated against the
//! current pivot rows with integer cross-multiplication, so no rational
//! arithmetic happens during forward elimination. Back substitution (kernel
//! vectors, particular solutions) is done in exact rationals at the end.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Sparse rational row: `(column, value)` pairs, columns strictly increasing.
pub type SparseRow = Vec<(usize, Rational)>;

#[derive(Debug, Clone)]
pub struct Echelon {
    cols: usize,
    /// Indexed by pivot column: primitive integer row whose first entry sits
    /// at that column and is positive.
    pivots: Vec<Option<Vec<(usize, BigInt)>>>,
    rank: usize,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            pivots: vec![None; cols],
            rank: 0,
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.as_ref().map(|_| c))
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots[col].is_some()
    }

    /// Adds a row given as sparse rationals. Returns true iff the rank grew.
    pub fn insert_sparse(&mut self, row: &[(usize, Rational)]) -> bool {
        match integer_dense(row, self.cols) {
            Some(w) => self.insert_integer(w),
            None => false,
        }
    }

    /// Adds a dense rational row. Returns true iff the rank grew.
    pub fn insert_dense(&mut self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.cols, "row length");
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.clone()))
            .collect();
        self.insert_sparse(&sparse)
    }

    /// Whether the row lies in the current row space.
    pub fn contains_sparse(&self, row: &[(usize, Rational)]) -> bool {
        match integer_dense(row, self.cols) {
            Some(mut w) => self.reduce(&mut w).is_none(),
            None => true,
        }
    }

    fn insert_integer(&mut self, mut w: Vec<BigInt>) -> bool {
        let Some(lead) = self.reduce(&mut w) else {
            return false;
        };
        make_primitive(&mut w[lead..]);
        if w[lead].is_negative() {
            w[lead..].iter_mut().for_each(|x| *x = -&*x);
        }
        let row = w
            .into_iter()
            .enumerate()
            .skip(lead)
            .filter(|(_, v)| !v.is_zero())
            .collect();
        self.pivots[lead] = Some(row);
        self.rank += 1;
        true
    }

    /// Eliminates pivot columns from `w` in ascending order until a nonzero
    /// entry in a non-pivot column is met. Returns that column, or `None` if
    /// the row reduced to zero.
    fn reduce(&self, w: &mut [BigInt]) -> Option<usize> {
        let mut col = 0;
        while col < self.cols {
            if w[col].is_zero() {
                col += 1;
                continue;
            }
            let Some(piv) = &self.pivots[col] else {
                return Some(col);
            };
            let lead = &piv[0].1;
            let g = lead.gcd(&w[col]);
            let scale = lead / &g;
            let factor = &w[col] / &g;
            if !scale.is_one() {
                for x in w[col..].iter_mut() {
                    if !x.is_zero() {
                        *x *= &scale;
                    }
                }
            }
            for (c, v) in piv {
                w[*c] -= &factor * v;
            }
            debug_assert!(w[col].is_zero());
            if !scale.is_one() {
                make_primitive(&mut w[col..]);
            }
            col += 1;
        }
        None
    }

    /// Solution of the homogeneous system with the given non-pivot columns
    /// fixed and every other non-pivot column set to zero.
    pub fn back_substitute(&self, fixed: &[(usize, Rational)]) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.cols];
        for (c, v) in fixed {
            assert!(!self.is_pivot(*c), "cannot fix a pivot column");
            x[*c] = v.clone();
        }
        for col in (0..self.cols).rev() {
            let Some(piv) = &self.pivots[col] else {
                continue;
            };
            let mut acc = Rational::zero();
            for (c, v) in &piv[1..] {
                if !x[*c].is_zero() {
                    acc += Rational::from_integer(v.clone()) * &x[*c];
                }
            }
            if !acc.is_zero() {
                x[col] = -acc / Rational::from_integer(piv[0].1.clone());
            }
        }
        x
    }

    /// Basis of the null space: one vector per non-pivot column, with a 1 in
    /// that column and 0 in every other non-pivot column.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        (0..self.cols)
            .filter(|&c| !self.is_pivot(c))
            .map(|c| self.back_substitute(&[(c, Rational::one())]))
            .collect()
    }

    /// The pivot rows as rationals (echelon, not reduced).
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.pivots
            .iter()
            .flatten()
            .map(|row| {
                let mut dense = vec![Rational::zero(); self.cols];
                for (c, v) in row {
                    dense[*c] = Rational::from_integer(v.clone());
                }
                dense
            })
            .collect()
    }
}

/// Scales a rational sparse row to a dense primitive integer row.
fn integer_dense(row: &[(usize, Rational)], cols: usize) -> Option<Vec<BigInt>> {
    let nonzero: Vec<_> = row.iter().filter(|(_, v)| !v.is_zero()).collect();
    if nonzero.is_empty() {
        return None;
    }
    let lcm = nonzero
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let mut w = vec![BigInt::zero(); cols];
    for (c, v) in nonzero {
        assert!(*c < cols, "column {c} out of range");
        w[*c] += v.numer() * (&lcm / v.denom());
    }
    Some(w)
}

fn make_primitive(w: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in w.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g > BigInt::one() {
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x /= &g;
            }
        }
    }
}
