//! Row echelon form over the prime field `F_p`, `p = 2^61 - 1`.
//!
//! The rank of a rational matrix reduced mod `p` never exceeds its rank over
//! the rationals, so a modular rank that meets a known upper bound certifies
//! the exact rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::rational::Rational;

pub const MODULUS: u64 = (1 << 61) - 1;

#[inline]
fn mul_mod(a: u64, b: u64) -> u64 {
    let wide = a as u128 * b as u128;
    let lo = (wide as u64) & MODULUS;
    let hi = (wide >> 61) as u64;
    let s = lo + hi;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, MODULUS - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(MODULUS))
        .to_u64()
        .expect("residue fits in u64")
}

/// Image of a rational in `F_p`, or `None` if `p` divides the denominator.
pub fn reduce_rational(q: &Rational) -> Option<u64> {
    let den = int_mod(q.denom());
    if den == 0 {
        return None;
    }
    Some(mul_mod(int_mod(q.numer()), inv_mod(den)))
}

#[derive(Debug, Clone)]
pub struct ModpEchelon {
    cols: usize,
    /// Pivot rows with leading entry 1, stored from the pivot column on.
    pivots: Vec<Option<Vec<u64>>>,
    rank: usize,
}

impl ModpEchelon {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            pivots: vec![None; cols],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Adds a sparse rational row. `None` if an entry has no image mod `p`.
    pub fn insert_sparse(&mut self, row: &[(usize, Rational)]) -> Option<bool> {
        let mut w = vec![0u64; self.cols];
        let mut first = self.cols;
        for (c, v) in row {
            if v.is_zero() {
                continue;
            }
            w[*c] = reduce_rational(v)?;
            if w[*c] != 0 {
                first = first.min(*c);
            }
        }
        for col in first..self.cols {
            let x = w[col];
            if x == 0 {
                continue;
            }
            match &self.pivots[col] {
                Some(piv) => {
                    for (slot, p) in w[col..].iter_mut().zip(piv) {
                        if *p != 0 {
                            *slot = sub_mod(*slot, mul_mod(x, *p));
                        }
                    }
                }
                None => {
                    let inv = inv_mod(x);
                    let piv = w[col..].iter().map(|&y| mul_mod(y, inv)).collect();
                    self.pivots[col] = Some(piv);
                    self.rank += 1;
                    return Some(true);
                }
            }
        }
        Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ratio, Matrix, SparseMatrix};
    use proptest::prelude::*;

    #[test]
    fn field_arithmetic() {
        assert_eq!(mul_mod(MODULUS - 1, MODULUS - 1), 1);
        assert_eq!(mul_mod(3, inv_mod(3)), 1);
        assert_eq!(
            reduce_rational(&ratio(-1, 2)).map(|h| mul_mod(h, 2)),
            Some(MODULUS - 1)
        );
        assert_eq!(
            reduce_rational(&Rational::from_integer(BigInt::from(MODULUS))),
            Some(0)
        );
    }

    #[test]
    fn modular_rank_drops_only_when_p_divides() {
        // det = p: full rank over Q, rank 1 mod p.
        let p = BigInt::from(MODULUS);
        let m = vec![
            vec![
                (0, Rational::from_integer(p.clone())),
                (1, Rational::from_integer(BigInt::from(0))),
            ],
            vec![(0, ratio(0, 1)), (1, ratio(1, 1))],
        ];
        let mut e = ModpEchelon::new(2);
        for r in &m {
            e.insert_sparse(r).unwrap();
        }
        assert_eq!(e.rank(), 1);
    }

    proptest! {
        #[test]
        fn agrees_with_exact_rank_on_small_integers(
            entries in proptest::collection::vec(-4i64..=4, 20),
        ) {
            let rows: Vec<&[i64]> = entries.chunks(5).collect();
            let m = Matrix::from_i64(&rows);
            let s = SparseMatrix::from(&m);
            let mut e = ModpEchelon::new(5);
            for r in s.iter_rows() {
                e.insert_sparse(r).unwrap();
            }
            prop_assert_eq!(e.rank(), m.rank());
        }
    }
}
