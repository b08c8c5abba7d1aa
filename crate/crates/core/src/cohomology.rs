//! Low-degree cohomology of Filippov algebras for central extensions
//! (trivial action) and infinitesimal deformations (adjoint action), in the
//! fully antisymmetric class and in the restricted n-Leibniz class.
//!
//! With `Q(mu)(X; Y, Z) = mu(X, mu(Y, Z)) - sum_k mu(.., mu(X, b_k), ..)`
//! (`b = (Y_1, .., Y_{n-1}, Z)`) the Filippov identity reads `Q(f) = 0`.
//! A scalar one-cochain `alpha` is a cocycle iff the polarisation
//! `B(alpha, f)` vanishes; a vector-valued one iff `B(alpha, f) + B(f, alpha)`
//! does. Coboundaries come from `beta(X) in k` and from generator shifts
//! `X -> X + beta(X)` respectively.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{
    binomial, increasing_tuples, max_abs, reduce_modulo, rref, sort_skew, subset_rank, Echelon,
    ModpEchelon, Rational, SparseMatrix, SparseRow,
};
use crate::nalg::{fi_residual, BracketTable, NAryAlgebra, Symmetry, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Trivial,
    Adjoint,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Trivial => "trivial",
            Action::Adjoint => "adjoint",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Action::Trivial),
            "adjoint" => Ok(Action::Adjoint),
            _ => Err(Error::Invalid(format!(
                "unknown action {s:?} (expected trivial|adjoint)"
            ))),
        }
    }
}

/// Shape of a cochain space: which coordinates exist and how they are laid
/// out in a flat coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CochainLayout {
    pub action: Action,
    pub symmetry: Symmetry,
    pub arity: usize,
    pub dim: usize,
    pub degree: usize,
}

impl CochainLayout {
    fn components(&self) -> usize {
        match self.action {
            Action::Trivial => 1,
            Action::Adjoint => self.dim,
        }
    }

    /// Number of argument blocks (before multiplying by value components).
    fn blocks(&self) -> usize {
        let (n, dim) = (self.arity, self.dim);
        match (self.degree, self.symmetry) {
            (0, _) => dim,
            (_, Symmetry::FullSkew) => binomial(dim, n),
            _ => binomial(dim, n - 1) * dim,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks() * self.components()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of arguments a cochain of this layout takes.
    pub fn args(&self) -> usize {
        if self.degree == 0 {
            1
        } else {
            self.arity
        }
    }

    /// Flat offset of the argument block `args` (any order) and the sign
    /// picked up by sorting it; `None` if the block is degenerate.
    pub fn block_offset(&self, args: &[usize]) -> Option<(usize, i8)> {
        let comps = self.components();
        if self.degree == 0 {
            return Some(((args[0] - 1) * comps, 1));
        }
        let mut key = args.to_vec();
        let n = self.arity;
        match self.symmetry {
            Symmetry::FullSkew => {
                let sign = sort_skew(&mut key);
                (sign != 0).then(|| (subset_rank(self.dim, &key) * comps, sign))
            }
            _ => {
                let sign = sort_skew(&mut key[..n - 1]);
                (sign != 0).then(|| {
                    (
                        (subset_rank(self.dim, &key[..n - 1]) * self.dim + key[n - 1] - 1) * comps,
                        sign,
                    )
                })
            }
        }
    }

    /// Canonical argument block and 1-based value component (adjoint only)
    /// of a flat coordinate.
    pub fn label(&self, coord: usize) -> (Vec<usize>, Option<usize>) {
        let comps = self.components();
        let (block, comp) = (coord / comps, coord % comps);
        let args = if self.degree == 0 {
            vec![block + 1]
        } else {
            match self.symmetry {
                Symmetry::FullSkew => increasing_tuples(self.dim, self.arity)[block].clone(),
                _ => {
                    let mut t =
                        increasing_tuples(self.dim, self.arity - 1)[block / self.dim].clone();
                    t.push(block % self.dim + 1);
                    t
                }
            }
        };
        let comp = (self.action == Action::Adjoint).then_some(comp + 1);
        (args, comp)
    }

    /// Canonical argument blocks in flat order.
    pub fn canonical_args(&self) -> Vec<Vec<usize>> {
        if self.degree == 0 {
            return (1..=self.dim).map(|a| vec![a]).collect();
        }
        self.symmetry.canonical_tuples(self.arity, self.dim)
    }
}

/// A 0- or 1-cochain given by its canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    layout: CochainLayout,
    coeffs: Vec<Rational>,
}

impl Cochain {
    pub fn zero(layout: CochainLayout) -> Self {
        Self {
            layout,
            coeffs: vec![Rational::zero(); layout.len()],
        }
    }

    pub fn from_coeffs(layout: CochainLayout, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != layout.len() {
            return Err(Error::DimensionMismatch {
                expected: layout.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self { layout, coeffs })
    }

    /// Builds a cochain from `value(args, component)` on canonical argument
    /// blocks; `component` is 1-based for adjoint layouts and 0 otherwise.
    pub fn from_fn(layout: CochainLayout, value: impl Fn(&[usize], usize) -> Rational) -> Self {
        let comps = layout.components();
        let mut coeffs = Vec::with_capacity(layout.len());
        for args in layout.canonical_args() {
            for c in 0..comps {
                let comp = if layout.action == Action::Adjoint {
                    c + 1
                } else {
                    0
                };
                coeffs.push(value(&args, comp));
            }
        }
        Self { layout, coeffs }
    }

    pub fn layout(&self) -> &CochainLayout {
        &self.layout
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Value on basis arguments: length 1 for trivial action, `dim` for
    /// adjoint.
    pub fn value(&self, args: &[usize]) -> Result<Vector> {
        if args.len() != self.layout.args() {
            return Err(Error::ArityMismatch {
                expected: self.layout.args(),
                found: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a == 0 || a > self.layout.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                dim: self.layout.dim,
            });
        }
        let comps = self.layout.components();
        Ok(match self.layout.block_offset(args) {
            None => vec![Rational::zero(); comps],
            Some((offset, sign)) => self.coeffs[offset..offset + comps]
                .iter()
                .map(|v| if sign < 0 { -v.clone() } else { v.clone() })
                .collect(),
        })
    }

    /// Nonzero coordinates with their canonical labels.
    pub fn entries(&self) -> Vec<(Vec<usize>, Option<usize>, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| {
                let (args, comp) = self.layout.label(i);
                (args, comp, v)
            })
            .collect()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.layout != other.layout {
            return Err(Error::Invalid("cochain layouts differ".into()));
        }
        Ok(Self {
            layout: self.layout,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    fn sparse(&self) -> SparseRow {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect()
    }
}

/// A cochain complex `C^0 -> C^1 -> (cocycle conditions)` over a Filippov
/// algebra.
#[derive(Debug, Clone)]
pub struct ComplexSpec {
    action: Action,
    symmetry: Symmetry,
    algebra: NAryAlgebra,
}

impl ComplexSpec {
    /// The algebra must be fully antisymmetric and satisfy the Filippov
    /// identity; `symmetry` selects the cochain class.
    pub fn new(algebra: &NAryAlgebra, action: Action, symmetry: Symmetry) -> Result<Self> {
        if algebra.symmetry() != Symmetry::FullSkew {
            return Err(Error::UnsupportedSymmetry(format!(
                "complexes are built over fully antisymmetric algebras, got {}",
                algebra.symmetry()
            )));
        }
        if symmetry == Symmetry::None {
            return Err(Error::UnsupportedSymmetry(symmetry.to_string()));
        }
        let res = fi_residual(algebra);
        if !res.is_zero() {
            return Err(Error::IdentityViolated {
                witnesses: res.witnesses.len(),
            });
        }
        Ok(Self {
            action,
            symmetry,
            algebra: algebra.clone(),
        })
    }

    pub fn action(&self) -> Action {
        self.action
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn algebra(&self) -> &NAryAlgebra {
        &self.algebra
    }

    pub fn layout(&self, degree: usize) -> CochainLayout {
        CochainLayout {
            action: self.action,
            symmetry: self.symmetry,
            arity: self.algebra.arity(),
            dim: self.algebra.dim(),
            degree,
        }
    }

    fn check_layout(&self, c: &Cochain, degree: usize) -> Result<()> {
        if c.layout != self.layout(degree) {
            return Err(Error::Invalid(format!(
                "cochain layout {:?} does not belong to the {} / {} complex in degree {degree}",
                c.layout, self.action, self.symmetry
            )));
        }
        Ok(())
    }

    /// `delta: C^0 -> C^1` with rows indexed by one-cochain coordinates.
    pub fn coboundary_matrix(&self) -> SparseMatrix {
        let table = self.algebra.table();
        let l1 = self.layout(1);
        let dim = self.algebra.dim();
        let mut m = SparseMatrix::new(self.layout(0).len());
        for b in l1.canonical_args() {
            match self.action {
                Action::Trivial => {
                    let row = table
                        .get(&b)
                        .iter()
                        .map(|(d, v)| (*d, -v.clone()))
                        .collect();
                    m.push_row(row);
                }
                Action::Adjoint => {
                    // -beta(f(b)) + sum_a f(.., beta(b_a), ..)
                    let mut rows = vec![BTreeMap::new(); dim];
                    for (d, v) in table.get(&b) {
                        for (s, row) in rows.iter_mut().enumerate() {
                            accumulate(row, d * dim + s, -v.clone());
                        }
                    }
                    let mut replaced = b.clone();
                    for a in 0..b.len() {
                        for m in 1..=dim {
                            replaced[a] = m;
                            for (s, v) in table.get(&replaced) {
                                accumulate(&mut rows[*s], (b[a] - 1) * dim + m - 1, v.clone());
                            }
                        }
                        replaced[a] = b[a];
                    }
                    for row in rows {
                        m.push_row(finish(row));
                    }
                }
            }
        }
        m
    }

    /// Cocycle conditions on `C^1`, one row per `(X, Y, Z[, s])` with `X`,
    /// `Y` increasing `(n-1)`-blocks.
    pub fn cocycle_matrix(&self) -> SparseMatrix {
        let table = self.algebra.table();
        let layout = self.layout(1);
        let (n, dim) = (self.algebra.arity(), self.algebra.dim());
        let heads = increasing_tuples(dim, n - 1);
        let rows: Vec<SparseRow> = heads
            .par_iter()
            .flat_map_iter(|x| {
                let mut out = Vec::new();
                for y in &heads {
                    for z in 1..=dim {
                        out.extend(cocycle_rows(&table, &layout, x, y, z));
                    }
                }
                out
            })
            .collect();
        let mut m = SparseMatrix::new(layout.len());
        for r in rows {
            m.push_row(r);
        }
        m
    }

    /// The `(X, Y, Z[, s])` label of a cocycle-matrix row.
    pub fn cocycle_row_label(&self, row: usize) -> CocycleRow {
        let (n, dim) = (self.algebra.arity(), self.algebra.dim());
        let comps = self.layout(1).components();
        let heads = binomial(dim, n - 1);
        let s = row % comps;
        let rest = row / comps;
        let z = rest % dim + 1;
        let rest = rest / dim;
        let y = rest % heads;
        let x = rest / heads;
        let blocks = increasing_tuples(dim, n - 1);
        CocycleRow {
            x: blocks[x].clone(),
            y: blocks[y].clone(),
            z,
            component: (self.action == Action::Adjoint).then_some(s + 1),
        }
    }

    pub fn coboundary(&self, beta: &Cochain) -> Result<Cochain> {
        self.check_layout(beta, 0)?;
        Cochain::from_coeffs(
            self.layout(1),
            self.coboundary_matrix().mul_vec(&beta.coeffs),
        )
    }

    /// First violated cocycle condition, if any.
    pub fn cocycle_violation(&self, alpha: &Cochain) -> Result<Option<CocycleRow>> {
        self.check_layout(alpha, 1)?;
        let image = self.cocycle_matrix().mul_vec(&alpha.coeffs);
        Ok(image
            .iter()
            .position(|v| !v.is_zero())
            .map(|r| self.cocycle_row_label(r)))
    }

    pub fn is_cocycle(&self, alpha: &Cochain) -> Result<bool> {
        Ok(self.cocycle_violation(alpha)?.is_none())
    }

    pub fn is_coboundary(&self, alpha: &Cochain) -> Result<bool> {
        self.check_layout(alpha, 1)?;
        Ok(image_echelon(&self.coboundary_matrix()).contains_sparse(&alpha.sparse()))
    }
}

/// Label of a cocycle condition: `X`, `Y`, `Z` and, for the adjoint action,
/// the 1-based output component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleRow {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: usize,
    pub component: Option<usize>,
}

impl fmt::Display for CocycleRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={:?} Y={:?} Z={}", self.x, self.y, self.z)?;
        if let Some(s) = self.component {
            write!(f, " component={s}")?;
        }
        Ok(())
    }
}

fn accumulate(row: &mut BTreeMap<usize, Rational>, col: usize, v: Rational) {
    let slot = row.entry(col).or_insert_with(Rational::zero);
    *slot += v;
}

fn finish(row: BTreeMap<usize, Rational>) -> SparseRow {
    row.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Rows of the linearised Filippov identity at `(X, Y, Z)`: one row for
/// the trivial action, `dim` rows (one per output component) for adjoint.
fn cocycle_rows(
    table: &BracketTable,
    layout: &CochainLayout,
    x: &[usize],
    y: &[usize],
    z: usize,
) -> Vec<SparseRow> {
    let (n, dim) = (layout.arity, layout.dim);
    let adjoint = layout.action == Action::Adjoint;
    let comps = layout.components();
    let mut rows = vec![BTreeMap::new(); comps];

    let join = |head: &[usize], last: usize| -> Vec<usize> {
        let mut t = head.to_vec();
        t.push(last);
        t
    };
    // alpha(args) contributes `v` to every output component.
    let add_alpha = |rows: &mut Vec<BTreeMap<usize, Rational>>, args: &[usize], v: &Rational| {
        if let Some((offset, sign)) = layout.block_offset(args) {
            let v = if sign < 0 { -v.clone() } else { v.clone() };
            for (s, row) in rows.iter_mut().enumerate() {
                accumulate(row, offset + s, v.clone());
            }
        }
    };

    // alpha(X, f(Y, Z))
    for (d, v) in table.get(&join(y, z)) {
        add_alpha(&mut rows, &join(x, d + 1), v);
    }
    // - sum_a alpha(Y_1 .. f(X, Y_a) .. Y_{n-1}, Z)
    let mut args = join(y, z);
    for a in 0..n - 1 {
        for (d, v) in table.get(&join(x, y[a])) {
            args[a] = d + 1;
            add_alpha(&mut rows, &args, &-v.clone());
        }
        args[a] = y[a];
    }
    // - alpha(Y, f(X, Z))
    for (d, v) in table.get(&join(x, z)) {
        add_alpha(&mut rows, &join(y, d + 1), &-v.clone());
    }

    if adjoint {
        // f(X, alpha(Y, Z))
        if let Some((offset, sign)) = layout.block_offset(&join(y, z)) {
            for m in 1..=dim {
                for (s, v) in table.get(&join(x, m)) {
                    accumulate(&mut rows[*s], offset + m - 1, signed(v, sign));
                }
            }
        }
        // - sum_a f(Y_1 .. alpha(X, Y_a) .. Y_{n-1}, Z)
        let mut args = join(y, z);
        for a in 0..n - 1 {
            if let Some((offset, sign)) = layout.block_offset(&join(x, y[a])) {
                for m in 1..=dim {
                    args[a] = m;
                    for (s, v) in table.get(&args) {
                        accumulate(&mut rows[*s], offset + m - 1, -signed(v, sign));
                    }
                }
            }
            args[a] = y[a];
        }
        // - f(Y, alpha(X, Z))
        if let Some((offset, sign)) = layout.block_offset(&join(x, z)) {
            for m in 1..=dim {
                for (s, v) in table.get(&join(y, m)) {
                    accumulate(&mut rows[*s], offset + m - 1, -signed(v, sign));
                }
            }
        }
    }
    rows.into_iter().map(finish).collect()
}

fn signed(v: &Rational, sign: i8) -> Rational {
    if sign < 0 {
        -v.clone()
    } else {
        v.clone()
    }
}

fn image_echelon(coboundary: &SparseMatrix) -> Echelon {
    coboundary.transpose().echelon()
}

/// `C^1 -> conditions` applied to `delta` (i.e. `delta o delta` on `C^0`):
/// largest absolute entry of the composite. Zero for every Filippov algebra.
pub fn delta_square_residual(spec: &ComplexSpec) -> Rational {
    spec.cocycle_matrix()
        .mul(&spec.coboundary_matrix())
        .max_abs()
}

/// Exact-identity status of the algebra induced by a representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepresentativeFlags {
    /// The central extension (trivial action) or the deformation at `t = 1`
    /// (adjoint action) satisfies the Filippov identity exactly.
    pub exact_fi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub action: Action,
    pub symmetry: Symmetry,
    pub arity: usize,
    pub dim: usize,
    /// `dim C^0`.
    pub cochains0: usize,
    /// `dim C^1`.
    pub cochains: usize,
    /// `dim Z^1`.
    pub cocycles: usize,
    /// `dim B^1`.
    pub coboundaries: usize,
    /// `dim H^1 = dim Z^1 - dim B^1`.
    pub h1: usize,
    /// Echelonized cocycles reduced modulo coboundaries, one per class.
    pub representatives: Vec<Cochain>,
    pub flags: Vec<RepresentativeFlags>,
}

/// Computes `H^1` of the complex with representatives.
pub fn h1(spec: &ComplexSpec) -> Result<CohomologyReport> {
    let layout = spec.layout(1);
    let cols = layout.len();
    let coboundary = spec.coboundary_matrix();
    let cocycle = spec.cocycle_matrix();

    let product = cocycle.mul(&coboundary);
    if !product.is_zero() {
        return Err(Error::Invariant(format!(
            "coboundaries are not cocycles (max entry of delta^2 is {})",
            product.max_abs()
        )));
    }
    let image = image_echelon(&coboundary);
    let b_dim = image.rank();
    // rank(cocycle) <= cols - b_dim since B^1 lies in the kernel.
    let bound = cols - b_dim;

    let mut modular = ModpEchelon::new(cols);
    let mut certified = bound == 0;
    for row in cocycle.iter_rows() {
        if certified {
            break;
        }
        match modular.insert_sparse(row) {
            Some(_) => certified = modular.rank() == bound,
            None => break,
        }
    }

    let (z_dim, representatives) = if certified {
        (b_dim, Vec::new())
    } else {
        let mut exact = Echelon::new(cols);
        for row in cocycle.iter_rows() {
            exact.insert_sparse(row);
            if exact.rank() == bound {
                break;
            }
        }
        let z_dim = cols - exact.rank();
        let reps = if z_dim > b_dim {
            representatives(&exact, &image, cols)
        } else {
            Vec::new()
        };
        (z_dim, reps)
    };
    if z_dim < b_dim || representatives.len() != z_dim - b_dim {
        return Err(Error::Invariant(format!(
            "inconsistent dimensions: Z={z_dim} B={b_dim} representatives={}",
            representatives.len()
        )));
    }
    let representatives: Vec<Cochain> = representatives
        .into_iter()
        .map(|c| Cochain::from_coeffs(layout, c))
        .collect::<Result<_>>()?;
    let flags = representatives
        .iter()
        .map(|rep| {
            let exact_fi = match spec.action {
                Action::Trivial => central_extend(spec.algebra(), rep).is_ok(),
                Action::Adjoint => {
                    deform(spec.algebra(), rep, &Rational::from_integer(1.into()))?.exact_fi_ok
                }
            };
            Ok(RepresentativeFlags { exact_fi })
        })
        .collect::<Result<_>>()?;

    Ok(CohomologyReport {
        action: spec.action,
        symmetry: spec.symmetry,
        arity: spec.algebra.arity(),
        dim: spec.algebra.dim(),
        cochains0: spec.layout(0).len(),
        cochains: cols,
        cocycles: z_dim,
        coboundaries: b_dim,
        h1: z_dim - b_dim,
        representatives,
        flags,
    })
}

/// Kernel basis reduced modulo the image, in reduced echelon form.
fn representatives(kernel: &Echelon, image: &Echelon, cols: usize) -> Vec<Vec<Rational>> {
    let (img_rows, img_pivots) = rref(&image.rows(), cols);
    let reduced: Vec<Vec<Rational>> = kernel
        .null_space()
        .iter()
        .map(|v| reduce_modulo(v, &img_rows, &img_pivots))
        .collect();
    rref(&reduced, cols).0
}

/// Coordinates of the class of `alpha` in the basis of `report`'s
/// representatives.
pub fn class_coordinates(
    spec: &ComplexSpec,
    report: &CohomologyReport,
    alpha: &Cochain,
) -> Result<Vec<Rational>> {
    if let Some(row) = spec.cocycle_violation(alpha)? {
        return Err(Error::NotACocycle(row.to_string()));
    }
    let cols = spec.layout(1).len();
    let image = image_echelon(&spec.coboundary_matrix());
    let (img_rows, img_pivots) = rref(&image.rows(), cols);
    let reduced = reduce_modulo(&alpha.coeffs, &img_rows, &img_pivots);
    let reps: Vec<Vec<Rational>> = report
        .representatives
        .iter()
        .map(|r| r.coeffs.clone())
        .collect();
    let (_, rep_pivots) = rref(&reps, cols);
    Ok(rep_pivots.iter().map(|&p| reduced[p].clone()).collect())
}

/// The explicit restricted-class deformation cocycle of a simple 3-ary
/// algebra: `alpha(X1, X2, Z) = 2 (g(X1, Z) X2 - g(X2, Z) X1)` in the
/// orthonormal basis, i.e.
/// `alpha(e_a1, e_a2, e_c)^d = 2 eps_c (d_{a1 c} d_{a2 d} - d_{a1 d} d_{a2 c})`.
pub fn theorem1_cocycle(alg: &NAryAlgebra) -> Result<Cochain> {
    if alg.arity() != 3 {
        return Err(Error::ArityMismatch {
            expected: 3,
            found: alg.arity(),
        });
    }
    if alg.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: alg.dim(),
        });
    }
    let eps: Vec<Rational> = (1..=4)
        .map(|a| {
            let block: Vec<usize> = (1..=4).filter(|&i| i != a).collect();
            let f = alg.constant(&block, a)?;
            let e = if a % 2 == 1 { f } else { -f };
            if e.abs() != Rational::from_integer(1.into()) {
                return Err(Error::Invalid(
                    "algebra is not a simple algebra in standard form".into(),
                ));
            }
            Ok(e)
        })
        .collect::<Result<_>>()?;
    let layout = CochainLayout {
        action: Action::Adjoint,
        symmetry: Symmetry::SkewFirstNMinus1,
        arity: 3,
        dim: 4,
        degree: 1,
    };
    let two = Rational::from_integer(2.into());
    Ok(Cochain::from_fn(layout, |args, d| {
        let (a1, a2, c) = (args[0], args[1], args[2]);
        let delta = |i: usize, j: usize| i32::from(i == j);
        let k = delta(a1, c) * delta(a2, d) - delta(a1, d) * delta(a2, c);
        &two * &eps[c - 1] * Rational::from_integer(k.into())
    }))
}

fn cochain_class(c: &Cochain, alg: &NAryAlgebra, degree: usize, action: Action) -> Result<()> {
    let l = c.layout;
    if l.degree != degree || l.action != action {
        return Err(Error::Invalid(format!(
            "expected a degree-{degree} {action} cochain, got degree {} {}",
            l.degree, l.action
        )));
    }
    if l.arity != alg.arity() || l.dim != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: l.dim,
        });
    }
    Ok(())
}

/// The central extension by a generator `e_{N+1}` that is central:
/// `[e_b] = f_b^d e_d + alpha(e_b) e_{N+1}`.
pub fn central_extend(alg: &NAryAlgebra, alpha: &Cochain) -> Result<NAryAlgebra> {
    cochain_class(alpha, alg, 1, Action::Trivial)?;
    let spec = ComplexSpec::new(alg, Action::Trivial, alpha.layout.symmetry)?;
    if let Some(row) = spec.cocycle_violation(alpha)? {
        return Err(Error::NotACocycle(row.to_string()));
    }
    let base = alg.with_symmetry(alpha.layout.symmetry)?;
    let center = alg.dim() + 1;
    let mut out = NAryAlgebra::new(alg.arity(), center, alpha.layout.symmetry)?;
    for (idx, t, v) in base.constants() {
        out.set_constant(idx, t, v.clone())?;
    }
    for (args, _, v) in alpha.entries() {
        out.set_constant(&args, center, v.clone())?;
    }
    let res = fi_residual(&out);
    if !res.is_zero() {
        return Err(Error::Invariant(format!(
            "extension by a cocycle fails the identity at {} tuples",
            res.witnesses.len()
        )));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deformation {
    pub algebra: NAryAlgebra,
    /// `alpha` satisfies the linearised identity.
    pub first_order_ok: bool,
    /// The deformed constants satisfy the identity exactly.
    pub exact_fi_ok: bool,
}

/// `f + t alpha`, in the symmetry class of `alpha`.
pub fn deform(alg: &NAryAlgebra, alpha: &Cochain, t: &Rational) -> Result<Deformation> {
    cochain_class(alpha, alg, 1, Action::Adjoint)?;
    let spec = ComplexSpec::new(alg, Action::Adjoint, alpha.layout.symmetry)?;
    let first_order_ok = spec.is_cocycle(alpha)?;
    let mut out = alg.with_symmetry(alpha.layout.symmetry)?;
    if !t.is_zero() {
        for (args, d, v) in alpha.entries() {
            out.add_constant(&args, d.expect("adjoint component"), t * v)?;
        }
    }
    let exact_fi_ok = fi_residual(&out).is_zero();
    Ok(Deformation {
        algebra: out,
        first_order_ok,
        exact_fi_ok,
    })
}

/// Largest absolute coefficient of a cochain.
pub fn cochain_max_abs(c: &Cochain) -> Rational {
    max_abs(&c.coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{abelian, by_name, direct_sum, simple_fa, Signature};
    use crate::kernel::{rat, Matrix};
    use crate::nalg::basis_vector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FULL: Symmetry = Symmetry::FullSkew;
    const RESTRICTED: Symmetry = Symmetry::SkewFirstNMinus1;

    fn spec(name: &str, action: Action, symmetry: Symmetry) -> ComplexSpec {
        ComplexSpec::new(&by_name(name).unwrap(), action, symmetry).unwrap()
    }

    fn h1_dim(name: &str, action: Action, symmetry: Symmetry) -> usize {
        h1(&spec(name, action, symmetry)).unwrap().h1
    }

    fn random_cochain(layout: CochainLayout, rng: &mut ChaCha8Rng) -> Cochain {
        let coeffs = (0..layout.len())
            .map(|_| rat(rng.random_range(-3..=3)))
            .collect();
        Cochain::from_coeffs(layout, coeffs).unwrap()
    }

    #[test]
    fn cochain_dimensions() {
        for (action, symmetry, expected) in [
            (Action::Trivial, FULL, 4),
            (Action::Adjoint, FULL, 16),
            (Action::Trivial, RESTRICTED, 24),
            (Action::Adjoint, RESTRICTED, 96),
        ] {
            let s = spec("A4", action, symmetry);
            assert_eq!(s.layout(1).len(), expected);
            assert_eq!(s.coboundary_matrix().rows(), expected);
            assert_eq!(s.cocycle_matrix().cols(), expected);
        }
    }

    #[test]
    fn layout_labels_round_trip() {
        for symmetry in [FULL, RESTRICTED] {
            for action in [Action::Trivial, Action::Adjoint] {
                let l = spec("A4", action, symmetry).layout(1);
                for coord in 0..l.len() {
                    let (args, comp) = l.label(coord);
                    let (offset, sign) = l.block_offset(&args).unwrap();
                    assert_eq!(sign, 1);
                    assert_eq!(offset + comp.map_or(0, |c| c - 1), coord);
                }
            }
        }
    }

    #[test]
    fn a4_trivial_coboundary_is_bijective() {
        let s = spec("A4", Action::Trivial, FULL);
        assert_eq!(s.coboundary_matrix().echelon().rank(), 4);
    }

    #[test]
    fn abelian_controls() {
        for (action, symmetry, expected) in [
            (Action::Trivial, FULL, 4),
            (Action::Adjoint, FULL, 16),
            (Action::Trivial, RESTRICTED, 24),
            (Action::Adjoint, RESTRICTED, 96),
        ] {
            let s = spec("abelian:3:4", action, symmetry);
            assert!(s.cocycle_matrix().is_zero());
            assert!(s.coboundary_matrix().is_zero());
            let r = h1(&s).unwrap();
            assert_eq!(
                (r.cochains, r.cocycles, r.coboundaries, r.h1),
                (expected, expected, 0, expected)
            );
            assert_eq!(r.representatives.len(), expected);
        }
    }

    #[test]
    fn whitehead_on_a4() {
        assert_eq!(h1_dim("A4", Action::Trivial, FULL), 0);
        assert_eq!(h1_dim("A4", Action::Adjoint, FULL), 0);
        // Derivations of A4 form so(4), so B^1 = 16 - 6.
        let r = h1(&spec("A4", Action::Adjoint, FULL)).unwrap();
        assert_eq!(r.coboundaries, 10);
    }

    #[test]
    fn restricted_trivial_vanishes() {
        for name in ["A4", "A5", "so3", "so12", "A_1_3"] {
            assert_eq!(h1_dim(name, Action::Trivial, RESTRICTED), 0, "{name}");
        }
    }

    #[test]
    fn restricted_adjoint() {
        let r = h1(&spec("A4", Action::Adjoint, RESTRICTED)).unwrap();
        assert_eq!(r.h1, 1);
        assert_eq!(r.representatives.len(), 1);
        for name in ["A5", "so3", "so12"] {
            assert_eq!(h1_dim(name, Action::Adjoint, RESTRICTED), 0, "{name}");
        }
    }

    #[test]
    fn explicit_cocycle_values() {
        let a = theorem1_cocycle(&by_name("A4").unwrap()).unwrap();
        assert_eq!(
            a.value(&[1, 2, 1]).unwrap(),
            basis_vector(4, 2)
                .iter()
                .map(|v| v * rat(2))
                .collect::<Vec<_>>()
        );
        assert!(a.value(&[1, 2, 3]).unwrap().iter().all(Zero::is_zero));
        assert_eq!(a.value(&[2, 1, 1]).unwrap()[1], rat(-2));
        assert!(theorem1_cocycle(&by_name("A5").unwrap()).is_err());
    }

    #[test]
    fn explicit_cocycle_nontrivial_for_every_signature() {
        for sig in Signature::all(4) {
            let alg = simple_fa(3, &sig).unwrap();
            let s = ComplexSpec::new(&alg, Action::Adjoint, RESTRICTED).unwrap();
            let a = theorem1_cocycle(&alg).unwrap();
            assert!(s.is_cocycle(&a).unwrap(), "{sig:?}");
            assert!(!s.is_coboundary(&a).unwrap(), "{sig:?}");
            let r = h1(&s).unwrap();
            assert_eq!(r.h1, 1);
            let coords = class_coordinates(&s, &r, &a).unwrap();
            assert!(!coords[0].is_zero());
        }
    }

    #[test]
    fn chevalley_eilenberg_counts_for_lie_algebras() {
        // Classical H^2(g, k): so(3) -> 0, abelian k^2 -> 1, heisenberg -> 2,
        // the 2-dim non-abelian algebra -> 0.
        let mut heis = NAryAlgebra::new(2, 3, FULL).unwrap();
        heis.set_constant(&[1, 2], 3, rat(1)).unwrap();
        let mut aff = NAryAlgebra::new(2, 2, FULL).unwrap();
        aff.set_constant(&[1, 2], 2, rat(1)).unwrap();
        for (alg, c1, expected) in [
            (by_name("so3").unwrap(), 3, 0),
            (abelian(2, 2).unwrap(), 1, 1),
            (heis, 3, 2),
            (aff, 1, 0),
        ] {
            let r = h1(&ComplexSpec::new(&alg, Action::Trivial, FULL).unwrap()).unwrap();
            assert_eq!((r.cochains, r.h1), (c1, expected));
        }
    }

    #[test]
    fn nilpotency() {
        for name in ["A4", "A5", "A_1_3", "abelian:3:3", "sum:so3:so12"] {
            for action in [Action::Trivial, Action::Adjoint] {
                for symmetry in [FULL, RESTRICTED] {
                    assert!(
                        delta_square_residual(&spec(name, action, symmetry)).is_zero(),
                        "{name}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_algebras() {
        let mut broken = by_name("A4").unwrap();
        broken.set_constant(&[1, 2, 3], 1, rat(1)).unwrap();
        assert!(matches!(
            ComplexSpec::new(&broken, Action::Trivial, FULL),
            Err(Error::IdentityViolated { .. })
        ));
        let leibniz = by_name("A4").unwrap().with_symmetry(RESTRICTED).unwrap();
        assert!(ComplexSpec::new(&leibniz, Action::Trivial, FULL).is_err());
        assert!(
            ComplexSpec::new(&by_name("A4").unwrap(), Action::Trivial, Symmetry::None).is_err()
        );
    }

    /// `sum_a f(.., beta(b_a), ..) - beta(f(b))` via vector brackets.
    fn shift_oracle(alg: &NAryAlgebra, beta: &Matrix, b: &[usize]) -> Vector {
        let dim = alg.dim();
        let args: Vec<Vector> = b.iter().map(|&i| basis_vector(dim, i)).collect();
        let mut out: Vector = beta
            .mul_vec(&alg.bracket(&args).unwrap())
            .into_iter()
            .map(|v| -v)
            .collect();
        for a in 0..b.len() {
            let mut shifted = args.clone();
            shifted[a] = beta.mul_vec(&args[a]);
            for (o, v) in out.iter_mut().zip(alg.bracket(&shifted).unwrap()) {
                *o += v;
            }
        }
        out
    }

    #[test]
    fn adjoint_coboundary_matches_generator_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in ["A4", "sum:so3:so12"] {
            for symmetry in [FULL, RESTRICTED] {
                let s = spec(name, Action::Adjoint, symmetry);
                let alg = s.algebra().clone();
                let beta = random_cochain(s.layout(0), &mut rng);
                // beta(e_c) = sum_m beta_c^m e_m, so the matrix has beta_c^m at (m, c).
                let dim = alg.dim();
                let mut bm = Matrix::zeros(dim, dim);
                for c in 1..=dim {
                    for (m, v) in beta.value(&[c]).unwrap().into_iter().enumerate() {
                        bm[(m, c - 1)] = v;
                    }
                }
                let alpha = s.coboundary(&beta).unwrap();
                for b in s.layout(1).canonical_args() {
                    assert_eq!(
                        alpha.value(&b).unwrap(),
                        shift_oracle(&alg, &bm, &b),
                        "{name} {b:?}"
                    );
                }
                let d = deform(&alg, &alpha, &rat(1)).unwrap();
                assert!(d.first_order_ok);
            }
        }
    }

    #[test]
    fn central_extensions() {
        let a4 = by_name("A4").unwrap();
        let zero = Cochain::zero(CochainLayout {
            action: Action::Trivial,
            symmetry: FULL,
            arity: 3,
            dim: 4,
            degree: 1,
        });
        let ext = central_extend(&a4, &zero).unwrap();
        assert_eq!(
            ext,
            direct_sum(&a4.clone(), &abelian(3, 1).unwrap()).unwrap()
        );

        // alpha = delta beta: shifting e_a -> e_a - beta_a e_5 splits the extension.
        let s = spec("A4", Action::Trivial, FULL);
        let beta =
            Cochain::from_coeffs(s.layout(0), vec![rat(1), rat(-2), rat(3), rat(5)]).unwrap();
        let alpha = s.coboundary(&beta).unwrap();
        for b in s.layout(1).canonical_args() {
            let f = a4.bracket_basis(&b);
            let expect: Rational = -f
                .iter()
                .zip(beta.coeffs())
                .map(|(x, y)| x * y)
                .sum::<Rational>();
            assert_eq!(alpha.value(&b).unwrap()[0], expect);
        }
        let ext = central_extend(&a4, &alpha).unwrap();
        let mut p = Matrix::identity(5);
        for a in 0..4 {
            p[(4, a)] = -beta.coeffs()[a].clone();
        }
        let split = ext.change_basis(&p).unwrap();
        assert_eq!(split, direct_sum(&a4, &abelian(3, 1).unwrap()).unwrap());

        // Restricted trivial cochains are mostly not cocycles.
        let s = spec("A4", Action::Trivial, RESTRICTED);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bad = random_cochain(s.layout(1), &mut rng);
        assert!(matches!(
            central_extend(&a4, &bad),
            Err(Error::NotACocycle(_))
        ));
    }

    #[test]
    fn deformations() {
        let a4 = by_name("A4").unwrap();
        let s = spec("A4", Action::Adjoint, FULL);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alpha = random_cochain(s.layout(1), &mut rng);
        let d = deform(&a4, &alpha, &rat(0)).unwrap();
        assert_eq!(d.algebra, a4);
        assert!(d.exact_fi_ok);
        let d = deform(&a4, &alpha, &rat(1)).unwrap();
        assert!(!d.first_order_ok);
        assert!(!d.exact_fi_ok);

        let thm = theorem1_cocycle(&a4).unwrap();
        let d = deform(&a4, &thm, &rat(1)).unwrap();
        assert!(d.first_order_ok);
        assert_eq!(d.algebra.symmetry(), RESTRICTED);
    }

    #[test]
    fn representatives_are_nontrivial_cocycles() {
        for (name, action, symmetry) in [
            ("A4", Action::Adjoint, RESTRICTED),
            ("abelian:3:3", Action::Adjoint, FULL),
            ("sum:A4:abelian:3:1", Action::Trivial, FULL),
        ] {
            let s = spec(name, action, symmetry);
            let r = h1(&s).unwrap();
            assert!(r.coboundaries <= r.cocycles && r.cocycles <= r.cochains);
            assert_eq!(r.flags.len(), r.h1);
            for rep in &r.representatives {
                assert!(s.is_cocycle(rep).unwrap());
                assert!(!s.is_coboundary(rep).unwrap());
            }
        }
    }

    #[test]
    fn reports_are_basis_independent() {
        let a4 = by_name("A4").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2 {
            let p = loop {
                let m = Matrix::from_rows(
                    (0..4)
                        .map(|_| (0..4).map(|_| rat(rng.random_range(-2..=2))).collect())
                        .collect(),
                );
                if !m.determinant().is_zero() {
                    break m;
                }
            };
            let b = a4.change_basis(&p).unwrap();
            for action in [Action::Trivial, Action::Adjoint] {
                for symmetry in [FULL, RESTRICTED] {
                    let r0 = h1(&ComplexSpec::new(&a4, action, symmetry).unwrap()).unwrap();
                    let r1 = h1(&ComplexSpec::new(&b, action, symmetry).unwrap()).unwrap();
                    assert_eq!(
                        (r0.cochains, r0.cocycles, r0.coboundaries, r0.h1),
                        (r1.cochains, r1.cocycles, r1.coboundaries, r1.h1)
                    );
                }
            }
        }
    }
}
