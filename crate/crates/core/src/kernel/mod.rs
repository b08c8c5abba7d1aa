//! Exact scalars, skew multi-indices and exact linear algebra.

mod echelon;
mod index;
mod linalg;
mod modp;
mod rational;

pub use echelon::{Echelon, SparseRow};
pub use index::{all_tuples, binomial, increasing_tuples, sort_skew, subset_rank, MultiIndex};
pub use linalg::{rank_and_kernel, reduce_modulo, rref, solve_in_image, Matrix, SparseMatrix};
pub use modp::{reduce_rational, ModpEchelon, MODULUS};
pub use rational::{format_rational, max_abs, one, parse_rational, rat, ratio, zero, Rational};
