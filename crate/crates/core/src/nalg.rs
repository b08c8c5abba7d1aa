//! n-ary algebras given by structure constants `f_{a1..an}^d`.
//!
//! Basis indices are 1-based everywhere in the public surface; vectors are
//! plain coefficient arrays where position `a - 1` holds the coefficient of
//! `e_a`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{
    all_tuples, increasing_tuples, sort_skew, subset_rank, Matrix, MultiIndex, Rational,
};

/// Element of the algebra in the basis `{e_a}`.
pub type Vector = Vec<Rational>;

pub fn basis_vector(dim: usize, a: usize) -> Vector {
    let mut v = vec![Rational::zero(); dim];
    v[a - 1] = Rational::from_integer(1.into());
    v
}

/// Which leading bracket slots are antisymmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    /// All `n` slots (Filippov algebras).
    FullSkew,
    /// The first `n - 1` slots (n-Leibniz algebras with skew fundamental objects).
    SkewFirstNMinus1,
    /// No antisymmetry at all.
    None,
}

impl Symmetry {
    pub fn skew_arity(self, arity: usize) -> usize {
        match self {
            Symmetry::FullSkew => arity,
            Symmetry::SkewFirstNMinus1 => arity - 1,
            Symmetry::None => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::FullSkew => "full",
            Symmetry::SkewFirstNMinus1 => "first_n_minus_1",
            Symmetry::None => "none",
        }
    }

    /// Canonical bracket-slot tuples: increasing on the skew block, free after.
    pub fn canonical_tuples(self, arity: usize, dim: usize) -> Vec<Vec<usize>> {
        let skew = self.skew_arity(arity);
        let heads = increasing_tuples(dim, skew);
        let tails = all_tuples(dim, arity - skew);
        heads
            .iter()
            .cartesian_product(tails.iter())
            .map(|(h, t)| h.iter().chain(t).copied().collect())
            .collect()
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Symmetry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Symmetry::FullSkew),
            "first_n_minus_1" | "restricted" => Ok(Symmetry::SkewFirstNMinus1),
            "none" => Ok(Symmetry::None),
            other => Err(Error::Invalid(format!("unknown symmetry class {other:?}"))),
        }
    }
}

/// Finite-dimensional n-ary algebra.
#[derive(Clone, PartialEq, Eq)]
pub struct NAryAlgebra {
    arity: usize,
    dim: usize,
    symmetry: Symmetry,
    /// Canonical n-slot index block -> target -> nonzero value.
    constants: BTreeMap<Vec<usize>, BTreeMap<usize, Rational>>,
    metric: Option<Matrix>,
}

impl NAryAlgebra {
    pub fn new(arity: usize, dim: usize, symmetry: Symmetry) -> Result<Self> {
        if arity < 2 {
            return Err(Error::Invalid(format!(
                "arity must be at least 2, got {arity}"
            )));
        }
        if dim < 1 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        Ok(Self {
            arity,
            dim,
            symmetry,
            constants: BTreeMap::new(),
            metric: None,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn metric(&self) -> Option<&Matrix> {
        self.metric.as_ref()
    }

    pub fn set_metric(&mut self, metric: Option<Matrix>) -> Result<()> {
        if let Some(g) = &metric {
            if g.rows() != self.dim || g.cols() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: g.rows().max(g.cols()),
                });
            }
        }
        self.metric = metric;
        Ok(())
    }

    pub fn with_metric(mut self, metric: Matrix) -> Result<Self> {
        self.set_metric(Some(metric))?;
        Ok(self)
    }

    fn canonical_key(&self, idx: &[usize]) -> Result<(Vec<usize>, i8)> {
        if idx.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: idx.len(),
            });
        }
        let (key, sign) = MultiIndex::new(idx.to_vec(), self.symmetry.skew_arity(self.arity))
            .canonicalize(self.dim)?;
        Ok((key.indices, sign))
    }

    fn check_target(&self, target: usize) -> Result<()> {
        if target == 0 || target > self.dim {
            return Err(Error::IndexOutOfRange {
                index: target,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// Sets `[e_idx] ^ target` to `value`, folding a non-canonical index
    /// block in with its permutation sign. Returns the previous canonical
    /// value. A nonzero value on a block with a repeated skew index is
    /// rejected.
    pub fn set_constant(
        &mut self,
        idx: &[usize],
        target: usize,
        value: Rational,
    ) -> Result<Rational> {
        self.check_target(target)?;
        let (key, sign) = self.canonical_key(idx)?;
        if sign == 0 {
            return if value.is_zero() {
                Ok(Rational::zero())
            } else {
                Err(Error::Invalid(format!(
                    "nonzero constant on degenerate index block {idx:?} of a {} algebra",
                    self.symmetry
                )))
            };
        }
        let value = if sign < 0 { -value } else { value };
        let slot = self.constants.entry(key.clone()).or_default();
        let previous = if value.is_zero() {
            slot.remove(&target)
        } else {
            slot.insert(target, value)
        };
        if slot.is_empty() {
            self.constants.remove(&key);
        }
        Ok(previous.unwrap_or_else(Rational::zero))
    }

    /// Adds `value` to `[e_idx] ^ target` (with folding as in [`Self::set_constant`]).
    pub fn add_constant(&mut self, idx: &[usize], target: usize, value: Rational) -> Result<()> {
        let current = self.constant(idx, target)?;
        self.set_constant(idx, target, current + value)?;
        Ok(())
    }

    /// `f_{idx}^target` for any (not necessarily canonical) index block.
    pub fn constant(&self, idx: &[usize], target: usize) -> Result<Rational> {
        self.check_target(target)?;
        let (key, sign) = self.canonical_key(idx)?;
        if sign == 0 {
            return Ok(Rational::zero());
        }
        let v = self
            .constants
            .get(&key)
            .and_then(|m| m.get(&target))
            .cloned()
            .unwrap_or_else(Rational::zero);
        Ok(if sign < 0 { -v } else { v })
    }

    /// Canonical nonzero constants `(index block, target, value)` in key order.
    pub fn constants(&self) -> impl Iterator<Item = (&[usize], usize, &Rational)> {
        self.constants
            .iter()
            .flat_map(|(k, m)| m.iter().map(move |(t, v)| (k.as_slice(), *t, v)))
    }

    pub fn num_constants(&self) -> usize {
        self.constants.values().map(BTreeMap::len).sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.is_empty()
    }

    /// Same constants reinterpreted in another symmetry class. Fails if a
    /// stored block is degenerate in the target class.
    pub fn with_symmetry(&self, symmetry: Symmetry) -> Result<NAryAlgebra> {
        let mut out = NAryAlgebra::new(self.arity, self.dim, symmetry)?;
        out.metric = self.metric.clone();
        for block in self.symmetry.canonical_tuples(self.arity, self.dim) {
            for (t, v) in self.bracket_basis(&block).into_iter().enumerate() {
                if !v.is_zero() {
                    out.set_constant(&block, t + 1, v)?;
                }
            }
        }
        Ok(out)
    }

    /// Bracket of basis vectors `[e_{idx_1}, ..., e_{idx_n}]`.
    pub fn bracket_basis(&self, idx: &[usize]) -> Vector {
        let mut out = vec![Rational::zero(); self.dim];
        let (key, sign) = self.canonical_key(idx).expect("valid index block");
        if sign == 0 {
            return out;
        }
        if let Some(m) = self.constants.get(&key) {
            for (t, v) in m {
                out[t - 1] = if sign < 0 { -v.clone() } else { v.clone() };
            }
        }
        out
    }

    /// Multilinear bracket of `n` vectors.
    pub fn bracket(&self, args: &[Vector]) -> Result<Vector> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        for a in args {
            if a.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: a.len(),
                });
            }
        }
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| (0..self.dim).filter(|&i| !a[i].is_zero()).collect())
            .collect();
        let mut out = vec![Rational::zero(); self.dim];
        for combo in supports.iter().map(|s| s.iter()).multi_cartesian_product() {
            let idx: Vec<usize> = combo.iter().map(|&&i| i + 1).collect();
            let (key, sign) = self.canonical_key(&idx)?;
            if sign == 0 {
                continue;
            }
            let Some(m) = self.constants.get(&key) else {
                continue;
            };
            let mut coeff: Rational = combo
                .iter()
                .enumerate()
                .map(|(slot, &&i)| args[slot][i].clone())
                .product();
            if sign < 0 {
                coeff = -coeff;
            }
            for (t, v) in m {
                out[t - 1] += &coeff * v;
            }
        }
        Ok(out)
    }

    fn require_skew_objects(&self) -> Result<()> {
        match self.symmetry {
            Symmetry::None => Err(Error::UnsupportedSymmetry(self.symmetry.to_string())),
            _ => Ok(()),
        }
    }

    /// Canonical basis of fundamental objects: increasing `(n-1)`-subsets.
    pub fn fundamental_basis(&self) -> Vec<Vec<usize>> {
        increasing_tuples(self.dim, self.arity - 1)
    }

    pub fn fundamental_dim(&self) -> usize {
        crate::kernel::binomial(self.dim, self.arity - 1)
    }

    /// Matrix of `Z -> [X_1, ..., X_{n-1}, Z]`.
    pub fn ad_matrix(&self, x: &FundamentalObject) -> Result<Matrix> {
        self.require_skew_objects()?;
        self.check_object(x)?;
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (subset, c) in x.terms() {
            let mut idx = subset.clone();
            idx.push(0);
            for z in 1..=self.dim {
                idx[self.arity - 1] = z;
                for (t, v) in self.bracket_basis(&idx).into_iter().enumerate() {
                    if !v.is_zero() {
                        m[(t, z - 1)] += c * &v;
                    }
                }
            }
        }
        Ok(m)
    }

    /// `X . Y = sum_a (Y_1, ..., [X_1..X_{n-1}, Y_a], ..., Y_{n-1})`.
    pub fn compose(
        &self,
        x: &FundamentalObject,
        y: &FundamentalObject,
    ) -> Result<FundamentalObject> {
        self.require_skew_objects()?;
        self.check_object(x)?;
        self.check_object(y)?;
        let slots = self.arity - 1;
        let mut out = FundamentalObject::zero(self.dim, slots);
        for (xs, xc) in x.terms() {
            let mut idx = xs.clone();
            idx.push(0);
            for (ys, yc) in y.terms() {
                let c = xc * yc;
                for a in 0..slots {
                    idx[slots] = ys[a];
                    for (d, v) in self.bracket_basis(&idx).into_iter().enumerate() {
                        if v.is_zero() {
                            continue;
                        }
                        let mut replaced = ys.clone();
                        replaced[a] = d + 1;
                        out.add_tuple(&replaced, &(&c * &v));
                    }
                }
            }
        }
        Ok(out)
    }

    fn check_object(&self, x: &FundamentalObject) -> Result<()> {
        if x.dim != self.dim || x.slots != self.arity - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.fundamental_dim(),
                found: x.coeffs.len(),
            });
        }
        Ok(())
    }

    /// The algebra rewritten in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<NAryAlgebra> {
        if p.rows() != self.dim || p.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.rows(),
            });
        }
        let inv = p
            .inverse()
            .ok_or_else(|| Error::Invalid("change of basis matrix is singular".into()))?;
        let columns: Vec<Vector> = (0..self.dim).map(|c| p.column(c)).collect();
        let mut out = NAryAlgebra::new(self.arity, self.dim, self.symmetry)?;
        for block in self.symmetry.canonical_tuples(self.arity, self.dim) {
            let args: Vec<Vector> = block.iter().map(|&i| columns[i - 1].clone()).collect();
            let image = inv.mul_vec(&self.bracket(&args)?);
            for (t, v) in image.into_iter().enumerate() {
                if !v.is_zero() {
                    out.set_constant(&block, t + 1, v)?;
                }
            }
        }
        if let Some(g) = &self.metric {
            out.metric = Some(&(&p.transpose() * g) * p);
        }
        Ok(out)
    }

    /// Dense lookup table for basis brackets.
    pub fn table(&self) -> BracketTable {
        BracketTable::new(self)
    }
}

impl fmt::Debug for NAryAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NAryAlgebra {{ arity: {}, dim: {}, symmetry: {}, constants: [",
            self.arity, self.dim, self.symmetry
        )?;
        for (k, t, v) in self.constants() {
            write!(f, " f{:?}^{}={}", k, t, v)?;
        }
        write!(f, " ] }}")
    }
}

/// Sparse bracket values for every basis n-tuple, indexed directly.
#[derive(Debug, Clone)]
pub struct BracketTable {
    arity: usize,
    dim: usize,
    entries: Vec<Vec<(usize, Rational)>>,
}

impl BracketTable {
    pub fn new(alg: &NAryAlgebra) -> Self {
        let (arity, dim) = (alg.arity, alg.dim);
        let size = dim.pow(arity as u32);
        let mut entries = vec![Vec::new(); size];
        let skew = alg.symmetry.skew_arity(arity);
        let mut idx = vec![1usize; arity];
        #[allow(clippy::needless_range_loop)]
        for flat in 0..size {
            let mut rem = flat;
            for slot in (0..arity).rev() {
                idx[slot] = rem % dim + 1;
                rem /= dim;
            }
            let mut key = idx.clone();
            let sign = sort_skew(&mut key[..skew]);
            if sign == 0 {
                continue;
            }
            if let Some(m) = alg.constants.get(&key) {
                entries[flat] = m
                    .iter()
                    .map(|(t, v)| (t - 1, if sign < 0 { -v.clone() } else { v.clone() }))
                    .collect();
            }
        }
        Self {
            arity,
            dim,
            entries,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero `(target - 1, value)` pairs of `[e_idx]`; `idx` is 1-based.
    #[inline]
    pub fn get(&self, idx: &[usize]) -> &[(usize, Rational)] {
        debug_assert_eq!(idx.len(), self.arity);
        let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + (i - 1));
        &self.entries[flat]
    }
}

/// An element of the `(n-1)`-fold exterior power, in the basis of increasing
/// index subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalObject {
    dim: usize,
    slots: usize,
    coeffs: Vec<Rational>,
}

impl FundamentalObject {
    pub fn zero(dim: usize, slots: usize) -> Self {
        Self {
            dim,
            slots,
            coeffs: vec![Rational::zero(); crate::kernel::binomial(dim, slots)],
        }
    }

    /// `(e_{t_1}, ..., e_{t_{n-1}})` for any 1-based tuple; degenerate tuples
    /// give zero.
    pub fn from_tuple(dim: usize, tuple: &[usize]) -> Result<Self> {
        let mut out = Self::zero(dim, tuple.len());
        MultiIndex::new(tuple.to_vec(), tuple.len()).canonicalize(dim)?;
        out.add_tuple(tuple, &Rational::from_integer(1.into()));
        Ok(out)
    }

    /// Wedge product `X_1 ^ ... ^ X_{n-1}` of vectors.
    pub fn from_vectors(dim: usize, vectors: &[Vector]) -> Result<Self> {
        let slots = vectors.len();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let mut out = Self::zero(dim, slots);
        for (pos, subset) in increasing_tuples(dim, slots).into_iter().enumerate() {
            let minor = Matrix::from_rows(
                vectors
                    .iter()
                    .map(|v| subset.iter().map(|&s| v[s - 1].clone()).collect())
                    .collect(),
            );
            out.coeffs[pos] = minor.determinant();
        }
        Ok(out)
    }

    pub fn from_coeffs(dim: usize, slots: usize, coeffs: Vec<Rational>) -> Result<Self> {
        let expected = crate::kernel::binomial(dim, slots);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Self { dim, slots, coeffs })
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero `(subset, coefficient)` pairs.
    pub fn terms(&self) -> Vec<(Vec<usize>, &Rational)> {
        increasing_tuples(self.dim, self.slots)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn add_tuple(&mut self, tuple: &[usize], coeff: &Rational) {
        let mut key = tuple.to_vec();
        let sign = sort_skew(&mut key);
        if sign == 0 {
            return;
        }
        let pos = subset_rank(self.dim, &key);
        if sign > 0 {
            self.coeffs[pos] += coeff;
        } else {
            self.coeffs[pos] -= coeff;
        }
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            dim: self.dim,
            slots: self.slots,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(&Rational::from_integer((-1).into()))
    }
}

/// Largest absolute violation plus the index tuples where an identity fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual<W> {
    pub max_violation: Rational,
    pub witnesses: Vec<W>,
}

impl<W> Residual<W> {
    pub fn is_zero(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub(crate) fn from_witnesses(witnesses: Vec<W>, value: impl Fn(&W) -> &Rational) -> Self {
        let max_violation = witnesses
            .iter()
            .map(|w| value(w).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        Self {
            max_violation,
            witnesses,
        }
    }
}

/// A component where the Filippov identity fails:
/// `[e_outer, [e_inner]]^target != sum_k [.., [e_outer, e_inner_k], ..]^target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiWitness {
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
    pub target: usize,
    pub violation: Rational,
}

/// Evaluates the Filippov identity in structure-constant form over all
/// canonical index tuples `(b_1..b_n; a_1..a_{n-1}; s)`.
pub fn fi_residual(alg: &NAryAlgebra) -> Residual<FiWitness> {
    let table = alg.table();
    let (n, dim) = (alg.arity, alg.dim);
    let inner_blocks = alg.symmetry.canonical_tuples(n, dim);
    let outer_blocks = match alg.symmetry {
        Symmetry::None => all_tuples(dim, n - 1),
        _ => increasing_tuples(dim, n - 1),
    };
    let witnesses: Vec<FiWitness> = inner_blocks
        .par_iter()
        .flat_map_iter(|b| {
            let mut found = Vec::new();
            for a in &outer_blocks {
                let diff = fi_component(&table, a, b);
                for (s, v) in diff.into_iter().enumerate() {
                    if !v.is_zero() {
                        found.push(FiWitness {
                            inner: b.clone(),
                            outer: a.clone(),
                            target: s + 1,
                            violation: v,
                        });
                    }
                }
            }
            found
        })
        .collect();
    Residual::from_witnesses(witnesses, |w| &w.violation)
}

/// `f_b^l f_{a l}^s - sum_k f_{a b_k}^l f_{b_1..l..b_n}^s` for all `s`.
fn fi_component(table: &BracketTable, a: &[usize], b: &[usize]) -> Vector {
    let (n, dim) = (table.arity, table.dim);
    let mut diff = vec![Rational::zero(); dim];
    let mut outer: Vec<usize> = a.to_vec();
    outer.push(0);
    for (l, v) in table.get(b) {
        outer[n - 1] = l + 1;
        for (s, w) in table.get(&outer) {
            diff[*s] += v * w;
        }
    }
    let mut replaced = b.to_vec();
    for k in 0..n {
        outer[n - 1] = b[k];
        for (l, v) in table.get(&outer) {
            replaced[k] = l + 1;
            for (s, w) in table.get(&replaced) {
                diff[*s] -= v * w;
            }
        }
        replaced[k] = b[k];
    }
    diff
}

/// A basis tuple on which the bracket is not antisymmetric under swapping
/// slots `slot` and `slot + 1` (1-based slot numbers).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryViolation {
    pub indices: Vec<usize>,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryReport {
    pub audited_class: Symmetry,
    pub declared_class: Symmetry,
    pub tuples_checked: usize,
    pub noncanonical_keys: usize,
    pub violations: Vec<SymmetryViolation>,
}

impl SymmetryReport {
    pub fn passed(&self) -> bool {
        self.noncanonical_keys == 0 && self.violations.is_empty()
    }
}

/// Checks that the algebra's bracket has the antisymmetry required by
/// `class`: every adjacent swap inside the class's skew block flips the sign,
/// on every basis tuple.
pub fn symmetry_audit(alg: &NAryAlgebra, class: Symmetry) -> SymmetryReport {
    let skew = alg.symmetry.skew_arity(alg.arity);
    let noncanonical_keys = alg
        .constants
        .iter()
        .filter(|(k, m)| {
            !MultiIndex::new(k.to_vec(), skew).is_canonical()
                || m.values().any(Zero::is_zero)
                || m.is_empty()
        })
        .count();
    let table = alg.table();
    let audit_skew = class.skew_arity(alg.arity);
    let tuples = all_tuples(alg.dim, alg.arity);
    let mut violations = Vec::new();
    for t in &tuples {
        for slot in 0..audit_skew.saturating_sub(1) {
            if t[slot] > t[slot + 1] {
                continue;
            }
            let mut swapped = t.clone();
            swapped.swap(slot, slot + 1);
            if !sums_to_zero(table.get(t), table.get(&swapped)) {
                violations.push(SymmetryViolation {
                    indices: t.clone(),
                    slot: slot + 1,
                });
            }
        }
    }
    SymmetryReport {
        audited_class: class,
        declared_class: alg.symmetry,
        tuples_checked: tuples.len(),
        noncanonical_keys,
        violations,
    }
}

fn sums_to_zero(a: &[(usize, Rational)], b: &[(usize, Rational)]) -> bool {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (t, v) in a.iter().chain(b) {
        *acc.entry(*t).or_insert_with(Rational::zero) += v;
    }
    acc.values().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{abelian, simple_fa, Signature};
    use crate::kernel::{rat, ratio};
    use proptest::prelude::*;

    fn a4() -> NAryAlgebra {
        simple_fa(3, &Signature::euclidean(4)).unwrap()
    }

    fn e(dim: usize, a: usize) -> Vector {
        basis_vector(dim, a)
    }

    /// Independent oracle: the Filippov identity by nested bracket
    /// evaluation on basis vectors.
    fn fi_direct(alg: &NAryAlgebra) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
        let (n, dim) = (alg.arity(), alg.dim());
        let mut out = Vec::new();
        for b in alg.symmetry().canonical_tuples(n, dim) {
            for a in increasing_tuples(dim, n - 1) {
                let xs: Vec<Vector> = a.iter().map(|&i| e(dim, i)).collect();
                let ys: Vec<Vector> = b.iter().map(|&i| e(dim, i)).collect();
                let mut lhs_args = xs.clone();
                lhs_args.push(alg.bracket(&ys).unwrap());
                let lhs = alg.bracket(&lhs_args).unwrap();
                let mut rhs = vec![rat(0); dim];
                for k in 0..n {
                    let mut inner = xs.clone();
                    inner.push(ys[k].clone());
                    let mut args = ys.clone();
                    args[k] = alg.bracket(&inner).unwrap();
                    for (r, v) in rhs.iter_mut().zip(alg.bracket(&args).unwrap()) {
                        *r += v;
                    }
                }
                for s in 0..dim {
                    if lhs[s] != rhs[s] {
                        out.push((b.clone(), a.clone(), s + 1));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn a4_basis_brackets() {
        let alg = a4();
        assert_eq!(alg.bracket(&[e(4, 2), e(4, 3), e(4, 4)]).unwrap(), e(4, 1));
        let neg = |v: Vector| v.into_iter().map(|x| -x).collect::<Vector>();
        assert_eq!(
            alg.bracket(&[e(4, 1), e(4, 3), e(4, 4)]).unwrap(),
            neg(e(4, 2))
        );
        assert_eq!(alg.bracket(&[e(4, 1), e(4, 2), e(4, 4)]).unwrap(), e(4, 3));
        assert_eq!(
            alg.bracket(&[e(4, 1), e(4, 2), e(4, 3)]).unwrap(),
            neg(e(4, 4))
        );
        assert_eq!(alg.num_constants(), 4);
    }

    #[test]
    fn abelian_bracket_vanishes() {
        let alg = abelian(3, 4).unwrap();
        let v = vec![rat(1), rat(2), rat(3), rat(4)];
        assert!(alg
            .bracket(&[v.clone(), e(4, 2), e(4, 3)])
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn repeated_argument_vanishes() {
        let alg = a4();
        assert!(alg
            .bracket(&[e(4, 1), e(4, 1), e(4, 2)])
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn bracket_rejects_bad_shapes() {
        let alg = a4();
        assert!(matches!(
            alg.bracket(&[e(4, 1), e(4, 2)]),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            alg.bracket(&[e(4, 1), e(4, 2), e(3, 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn folding_non_canonical_keys() {
        let mut alg = NAryAlgebra::new(3, 4, Symmetry::FullSkew).unwrap();
        alg.set_constant(&[2, 1, 3], 4, rat(1)).unwrap();
        assert_eq!(alg.constant(&[1, 2, 3], 4).unwrap(), rat(-1));
        assert_eq!(alg.constants().next().unwrap().0, &[1, 2, 3]);
        assert!(alg.set_constant(&[1, 1, 3], 4, rat(1)).is_err());
        assert!(alg.set_constant(&[1, 2, 5], 4, rat(1)).is_err());

        let mut leib = NAryAlgebra::new(3, 4, Symmetry::SkewFirstNMinus1).unwrap();
        leib.set_constant(&[2, 1, 1], 2, rat(3)).unwrap();
        assert_eq!(leib.constant(&[1, 2, 1], 2).unwrap(), rat(-3));
        assert_eq!(leib.constant(&[1, 1, 2], 2).unwrap(), rat(0));
    }

    #[test]
    fn ad_of_e1_e2_in_a4() {
        // [e1,e2,e3] = -e4 and [e1,e2,e4] = e3.
        let alg = a4();
        let x = FundamentalObject::from_tuple(4, &[1, 2]).unwrap();
        let ad = alg.ad_matrix(&x).unwrap();
        let mut expected = Matrix::zeros(4, 4);
        expected[(3, 2)] = rat(-1);
        expected[(2, 3)] = rat(1);
        assert_eq!(ad, expected);
    }

    #[test]
    fn ad_degenerate_and_abelian_are_zero() {
        let x = FundamentalObject::from_tuple(4, &[1, 1]).unwrap();
        assert!(x.is_zero());
        assert!(a4().ad_matrix(&x).unwrap().is_zero());
        let y = FundamentalObject::from_tuple(4, &[1, 3]).unwrap();
        assert!(abelian(3, 4).unwrap().ad_matrix(&y).unwrap().is_zero());
    }

    #[test]
    fn ad_unsupported_for_unrestricted_leibniz() {
        let alg = NAryAlgebra::new(3, 3, Symmetry::None).unwrap();
        let x = FundamentalObject::from_tuple(3, &[1, 2]).unwrap();
        assert!(matches!(
            alg.ad_matrix(&x),
            Err(Error::UnsupportedSymmetry(_))
        ));
        assert!(matches!(
            alg.compose(&x, &x),
            Err(Error::UnsupportedSymmetry(_))
        ));
    }

    #[test]
    fn compose_in_a4() {
        // ([e1,e2,e1], e3) + (e1, [e1,e2,e3]) = (e1, -e4)
        let alg = a4();
        let x = FundamentalObject::from_tuple(4, &[1, 2]).unwrap();
        let y = FundamentalObject::from_tuple(4, &[1, 3]).unwrap();
        let expected = FundamentalObject::from_tuple(4, &[1, 4]).unwrap().neg();
        assert_eq!(alg.compose(&x, &y).unwrap(), expected);
    }

    #[test]
    fn compose_in_arity_two_is_the_bracket() {
        let so3 = simple_fa(2, &Signature::euclidean(3)).unwrap();
        let x = FundamentalObject::from_tuple(3, &[1]).unwrap();
        let y = FundamentalObject::from_tuple(3, &[2]).unwrap();
        let xy = so3.compose(&x, &y).unwrap();
        assert_eq!(
            xy.coeffs(),
            so3.bracket(&[e(3, 1), e(3, 2)]).unwrap().as_slice()
        );
    }

    #[test]
    fn compose_abelian_is_zero() {
        let alg = abelian(3, 4).unwrap();
        let x = FundamentalObject::from_tuple(4, &[1, 2]).unwrap();
        let y = FundamentalObject::from_tuple(4, &[3, 4]).unwrap();
        assert!(alg.compose(&x, &y).unwrap().is_zero());
    }

    #[test]
    fn fi_holds_for_a4_and_abelian() {
        assert!(fi_residual(&a4()).is_zero());
        assert!(fi_residual(&abelian(3, 4).unwrap()).is_zero());
    }

    #[test]
    fn rescaled_constant_still_satisfies_fi() {
        // Doubling f_{123}^4 is the basis rescaling e4 -> 2 e4 up to an
        // overall factor, so both routes must still report zero.
        let mut alg = a4();
        alg.set_constant(&[1, 2, 3], 4, rat(-2)).unwrap();
        assert!(fi_residual(&alg).is_zero());
        assert!(fi_direct(&alg).is_empty());
    }

    #[test]
    fn perturbed_a4_fails_fi() {
        let mut alg = a4();
        alg.set_constant(&[1, 2, 3], 1, rat(1)).unwrap();
        let res = fi_residual(&alg);
        assert!(!res.is_zero());
        assert!(res.max_violation > rat(0));
        let direct = fi_direct(&alg);
        let mut ours: Vec<_> = res
            .witnesses
            .iter()
            .map(|w| (w.inner.clone(), w.outer.clone(), w.target))
            .collect();
        ours.sort();
        let mut direct = direct;
        direct.sort();
        assert_eq!(ours, direct);
    }

    #[test]
    fn ad_is_a_lie_homomorphism_on_a4() {
        let alg = a4();
        let basis: Vec<_> = alg
            .fundamental_basis()
            .iter()
            .map(|t| FundamentalObject::from_tuple(4, t).unwrap())
            .collect();
        for x in &basis {
            for y in &basis {
                let adx = alg.ad_matrix(x).unwrap();
                let ady = alg.ad_matrix(y).unwrap();
                let xy = alg.compose(x, y).unwrap();
                let yx = alg.compose(y, x).unwrap();
                assert_eq!(adx.commutator(&ady), alg.ad_matrix(&xy).unwrap());
                assert_eq!(
                    alg.ad_matrix(&xy).unwrap(),
                    alg.ad_matrix(&yx).unwrap().scale(&rat(-1))
                );
            }
        }
    }

    #[test]
    fn audit_classes() {
        assert!(symmetry_audit(&a4(), Symmetry::FullSkew).passed());
        for class in [
            Symmetry::FullSkew,
            Symmetry::SkewFirstNMinus1,
            Symmetry::None,
        ] {
            assert!(symmetry_audit(&abelian(3, 3).unwrap(), class).passed());
        }
        let mut leib = NAryAlgebra::new(3, 3, Symmetry::SkewFirstNMinus1).unwrap();
        leib.set_constant(&[1, 2, 1], 2, rat(1)).unwrap();
        assert!(symmetry_audit(&leib, Symmetry::SkewFirstNMinus1).passed());
        let full = symmetry_audit(&leib, Symmetry::FullSkew);
        assert!(!full.passed());
        assert!(full.violations.iter().all(|v| v.slot == 2));
    }

    #[test]
    fn change_basis_preserves_fi_and_is_invertible() {
        let alg = a4();
        let p = Matrix::from_i64(&[&[1, 1, 0, 0], &[0, 1, 2, 0], &[0, 0, 1, -1], &[1, 0, 0, 1]]);
        let moved = alg.change_basis(&p).unwrap();
        assert!(fi_residual(&moved).is_zero());
        let back = moved.change_basis(&p.inverse().unwrap()).unwrap();
        assert_eq!(back, alg);
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let x = FundamentalObject::from_vectors(4, &[e(4, 2), e(4, 1)]).unwrap();
        assert_eq!(x, FundamentalObject::from_tuple(4, &[1, 2]).unwrap().neg());
        let v = vec![rat(1), rat(1), rat(0), rat(0)];
        let w = FundamentalObject::from_vectors(4, &[v.clone(), v]).unwrap();
        assert!(w.is_zero());
    }

    fn small_vec() -> impl Strategy<Value = Vector> {
        proptest::collection::vec(-3i64..=3, 4).prop_map(|v| v.into_iter().map(rat).collect())
    }

    proptest! {
        #[test]
        fn bracket_is_multilinear(
            x in small_vec(), y in small_vec(), z in small_vec(), w in small_vec(),
            a in -4i64..=4, b in 1i64..=4, slot in 0usize..3,
        ) {
            let alg = a4();
            let (a, b) = (rat(a), ratio(1, b));
            let mut args = vec![z.clone(), w.clone(), x.clone()];
            let combo: Vector = x.iter().zip(&y).map(|(p, q)| &a * p + &b * q).collect();
            args[slot] = combo;
            let lhs = alg.bracket(&args).unwrap();
            args[slot] = x.clone();
            let bx = alg.bracket(&args).unwrap();
            args[slot] = y.clone();
            let by = alg.bracket(&args).unwrap();
            let rhs: Vector = bx.iter().zip(&by).map(|(p, q)| &a * p + &b * q).collect();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn derivation_identity_on_random_objects(x1 in small_vec(), x2 in small_vec(), y1 in small_vec(), y2 in small_vec()) {
            let alg = a4();
            let x = FundamentalObject::from_vectors(4, &[x1, x2]).unwrap();
            let y = FundamentalObject::from_vectors(4, &[y1, y2]).unwrap();
            let lhs = alg.ad_matrix(&x).unwrap().commutator(&alg.ad_matrix(&y).unwrap());
            prop_assert_eq!(lhs, alg.ad_matrix(&alg.compose(&x, &y).unwrap()).unwrap());
        }
    }
}
