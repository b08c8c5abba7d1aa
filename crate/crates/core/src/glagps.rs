//! Generalized Jacobi identity for even-arity antisymmetric brackets, which
//! is also the condition for a linear multivector to be a generalized
//! Poisson structure.

use itertools::Itertools;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{increasing_tuples, Rational};
use crate::nalg::{NAryAlgebra, Residual, Symmetry};

/// Fully antisymmetric structure constants `Omega_{i_1..i_n}^j`, `n` even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlaTensor {
    algebra: NAryAlgebra,
}

impl GlaTensor {
    pub fn new(algebra: NAryAlgebra) -> Result<Self> {
        if !algebra.arity().is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "generalized Jacobi identity needs even arity, got {}",
                algebra.arity()
            )));
        }
        if algebra.symmetry() != Symmetry::FullSkew {
            return Err(Error::UnsupportedSymmetry(algebra.symmetry().to_string()));
        }
        Ok(Self { algebra })
    }

    pub fn zero(arity: usize, dim: usize) -> Result<Self> {
        Self::new(NAryAlgebra::new(arity, dim, Symmetry::FullSkew)?)
    }

    pub fn algebra(&self) -> &NAryAlgebra {
        &self.algebra
    }

    pub fn arity(&self) -> usize {
        self.algebra.arity()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GjiWitness {
    /// Increasing `(2n-1)`-block of lower indices.
    pub block: Vec<usize>,
    pub target: usize,
    pub violation: Rational,
}

/// For every increasing `(2n-1)`-block `j` and target `s`,
/// `sum_{S, T} sign(S, T) Omega_S^l Omega_{T l}^s` over the splits of `j`
/// into an `n`-subset `S` and its complement `T`, `sign` being the shuffle
/// sign. The full antisymmetrization over `(2n-1)!` orderings equals
/// `n! (n-1)!` times this value.
pub fn gji_residual(omega: &GlaTensor) -> Residual<GjiWitness> {
    let alg = &omega.algebra;
    let (n, dim) = (alg.arity(), alg.dim());
    let table = alg.table();
    let blocks = increasing_tuples(dim, 2 * n - 1);
    let witnesses: Vec<GjiWitness> = blocks
        .par_iter()
        .flat_map_iter(|j| {
            let mut acc = vec![Rational::zero(); dim];
            let mut tail = vec![0; n];
            for picked in (0..2 * n - 1).combinations(n) {
                let s_idx: Vec<usize> = picked.iter().map(|&p| j[p]).collect();
                let first = table.get(&s_idx);
                if first.is_empty() {
                    continue;
                }
                let displacement: usize = picked.iter().enumerate().map(|(i, &p)| p - i).sum();
                let negative = displacement % 2 == 1;
                let mut t = 0;
                for (p, &x) in j.iter().enumerate() {
                    if !picked.contains(&p) {
                        tail[t] = x;
                        t += 1;
                    }
                }
                for (l, v) in first {
                    tail[n - 1] = l + 1;
                    for (s, w) in table.get(&tail) {
                        let term = v * w;
                        if negative {
                            acc[*s] -= term;
                        } else {
                            acc[*s] += term;
                        }
                    }
                }
            }
            acc.into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(s, violation)| GjiWitness {
                    block: j.clone(),
                    target: s + 1,
                    violation,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Residual::from_witnesses(witnesses, |w| &w.violation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{by_name, scaled};
    use crate::kernel::rat;
    use crate::nalg::fi_residual;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sum over all orderings of the block, straight from the definition.
    fn permutation_oracle(omega: &GlaTensor, block: &[usize], s: usize) -> Rational {
        let alg = omega.algebra();
        let n = alg.arity();
        let mut total = Rational::zero();
        for perm in (0..block.len()).permutations(block.len()) {
            let inversions = (0..perm.len())
                .flat_map(|a| (a + 1..perm.len()).map(move |b| (a, b)))
                .filter(|&(a, b)| perm[a] > perm[b])
                .count();
            let idx: Vec<usize> = perm.iter().map(|&p| block[p]).collect();
            let inner = alg.bracket_basis(&idx[..n]);
            let mut term = Rational::zero();
            for (l, v) in inner.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut outer = idx[n..].to_vec();
                outer.push(l + 1);
                term += v * &alg.constant(&outer, s).unwrap();
            }
            if inversions % 2 == 1 {
                total -= term;
            } else {
                total += term;
            }
        }
        total
    }

    fn factorial(k: usize) -> i64 {
        (1..=k as i64).product()
    }

    fn random_tensor(arity: usize, dim: usize, seed: u64) -> GlaTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alg = NAryAlgebra::new(arity, dim, Symmetry::FullSkew).unwrap();
        for block in increasing_tuples(dim, arity) {
            for t in 1..=dim {
                alg.set_constant(&block, t, rat(rng.random_range(-2..=2)))
                    .unwrap();
            }
        }
        GlaTensor::new(alg).unwrap()
    }

    fn check_against_oracle(omega: &GlaTensor) -> usize {
        let n = omega.arity();
        let res = gji_residual(omega);
        let weight = rat(factorial(n) * factorial(n - 1));
        let mut nonzero = 0;
        for block in increasing_tuples(omega.dim(), 2 * n - 1) {
            for s in 1..=omega.dim() {
                let expected = permutation_oracle(omega, &block, s);
                let found = res
                    .witnesses
                    .iter()
                    .find(|w| w.block == block && w.target == s)
                    .map_or_else(Rational::zero, |w| w.violation.clone());
                assert_eq!(expected, &found * &weight, "{block:?} -> {s}");
                nonzero += usize::from(!found.is_zero());
            }
        }
        assert_eq!(nonzero, res.witnesses.len());
        nonzero
    }

    #[test]
    fn so3_satisfies_jacobi() {
        let so3 = GlaTensor::new(by_name("so3").unwrap()).unwrap();
        assert!(gji_residual(&so3).is_zero());
        assert_eq!(check_against_oracle(&so3), 0);
    }

    #[test]
    fn zero_tensor() {
        assert!(gji_residual(&GlaTensor::zero(4, 7).unwrap()).is_zero());
    }

    #[test]
    fn perturbed_so3_fails_on_both_paths() {
        let mut alg = by_name("so3").unwrap();
        alg.set_constant(&[1, 2], 1, rat(1)).unwrap();
        assert!(!fi_residual(&alg).is_zero());
        let t = GlaTensor::new(alg).unwrap();
        assert!(!gji_residual(&t).is_zero());
        assert!(check_against_oracle(&t) > 0);
    }

    #[test]
    fn agrees_with_fi_for_binary_brackets() {
        for seed in 0..20 {
            let t = random_tensor(2, 3, seed);
            assert_eq!(
                gji_residual(&t).is_zero(),
                fi_residual(t.algebra()).is_zero(),
                "seed {seed}"
            );
            check_against_oracle(&t);
        }
        for name in ["so3", "so12", "abelian:2:3", "sum:so3:so12"] {
            let t = GlaTensor::new(by_name(name).unwrap()).unwrap();
            assert_eq!(
                gji_residual(&t).is_zero(),
                fi_residual(t.algebra()).is_zero()
            );
        }
    }

    #[test]
    fn quartic_random_tensor_fails() {
        let t = random_tensor(4, 7, 1);
        assert!(check_against_oracle(&t) > 0);
    }

    #[test]
    fn quartic_below_seven_dimensions_is_vacuous() {
        // 2n - 1 = 7 distinct lower indices are needed.
        assert!(gji_residual(&random_tensor(4, 5, 2)).is_zero());
        assert!(gji_residual(&random_tensor(4, 6, 3)).is_zero());
    }

    #[test]
    fn image_outside_indices_is_a_gla() {
        let mut alg = NAryAlgebra::new(4, 7, Symmetry::FullSkew).unwrap();
        alg.set_constant(&[1, 2, 3, 4], 7, rat(3)).unwrap();
        alg.set_constant(&[2, 3, 5, 6], 7, rat(-1)).unwrap();
        assert!(gji_residual(&GlaTensor::new(alg).unwrap()).is_zero());
    }

    #[test]
    fn residual_is_quadratic() {
        let t = random_tensor(2, 4, 9);
        let lambda = crate::kernel::ratio(-3, 2);
        let t2 = GlaTensor::new(scaled(t.algebra(), &lambda).unwrap()).unwrap();
        let (r1, r2) = (gji_residual(&t), gji_residual(&t2));
        assert_eq!(r1.witnesses.len(), r2.witnesses.len());
        for (a, b) in r1.witnesses.iter().zip(&r2.witnesses) {
            assert_eq!((&a.block, a.target), (&b.block, b.target));
            assert_eq!(&a.violation * &lambda * &lambda, b.violation);
        }
    }

    #[test]
    fn rejects_odd_arity() {
        assert!(GlaTensor::new(by_name("A4").unwrap()).is_err());
    }
}
