//! Named algebras: the simple Filippov algebras `A_{n+1}` and their
//! Lorentzian forms, abelian algebras, and direct sums.

use crate::error::{Error, Result};
use crate::kernel::{rat, Matrix, Rational};
use crate::nalg::{fi_residual, NAryAlgebra, Symmetry};

/// Sign factors `eps_a = +-1`, one per basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature(Vec<i8>);

impl Signature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::Invalid(format!(
                "signature entries must be +1 or -1, got {bad}"
            )));
        }
        Ok(Self(signs))
    }

    pub fn euclidean(len: usize) -> Self {
        Self(vec![1; len])
    }

    /// `s` negative signs followed by `t` positive ones.
    pub fn lorentzian(s: usize, t: usize) -> Self {
        Self(
            std::iter::repeat_n(-1, s)
                .chain(std::iter::repeat_n(1, t))
                .collect(),
        )
    }

    /// All `2^len` signatures, in binary counting order.
    pub fn all(len: usize) -> Vec<Self> {
        (0..1u32 << len)
            .map(|bits| {
                Self(
                    (0..len)
                        .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn metric(&self) -> Matrix {
        Matrix::diagonal(&self.0.iter().map(|&s| rat(s as i64)).collect::<Vec<_>>())
    }
}

/// The simple `n`-Lie algebra on `n + 1` generators:
/// `[e_1 .. ê_a .. e_{n+1}] = (-1)^(a+1) eps_a e_a`, carrying the invariant
/// metric `diag(eps)`.
pub fn simple_fa(n: usize, sig: &Signature) -> Result<NAryAlgebra> {
    if n < 2 {
        return Err(Error::Invalid(format!("arity must be at least 2, got {n}")));
    }
    if sig.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: sig.len(),
        });
    }
    let dim = n + 1;
    let mut alg = NAryAlgebra::new(n, dim, Symmetry::FullSkew)?;
    for a in 1..=dim {
        let block: Vec<usize> = (1..=dim).filter(|&i| i != a).collect();
        let sign = if a % 2 == 1 { 1 } else { -1 };
        alg.set_constant(&block, a, rat(sign * sig.signs()[a - 1] as i64))?;
    }
    alg.set_metric(Some(sig.metric()))?;
    let res = fi_residual(&alg);
    if !res.is_zero() {
        return Err(Error::Invariant(format!(
            "simple algebra for n={n} fails the Filippov identity"
        )));
    }
    Ok(alg)
}

/// Abelian `n`-ary algebra of dimension `dim`.
pub fn abelian(n: usize, dim: usize) -> Result<NAryAlgebra> {
    NAryAlgebra::new(n, dim, Symmetry::FullSkew)
}

/// Block sum; generators of `b` are renumbered after those of `a`.
pub fn direct_sum(a: &NAryAlgebra, b: &NAryAlgebra) -> Result<NAryAlgebra> {
    if a.arity() != b.arity() {
        return Err(Error::ArityMismatch {
            expected: a.arity(),
            found: b.arity(),
        });
    }
    if a.symmetry() != b.symmetry() {
        return Err(Error::Invalid(format!(
            "symmetry classes differ: {} vs {}",
            a.symmetry(),
            b.symmetry()
        )));
    }
    let shift = a.dim();
    let mut out = NAryAlgebra::new(a.arity(), a.dim() + b.dim(), a.symmetry())?;
    for (idx, t, v) in a.constants() {
        out.set_constant(idx, t, v.clone())?;
    }
    for (idx, t, v) in b.constants() {
        let moved: Vec<usize> = idx.iter().map(|i| i + shift).collect();
        out.set_constant(&moved, t + shift, v.clone())?;
    }
    if let (Some(ga), Some(gb)) = (a.metric(), b.metric()) {
        let mut g = Matrix::zeros(out.dim(), out.dim());
        for r in 0..shift {
            for c in 0..shift {
                g[(r, c)] = ga[(r, c)].clone();
            }
        }
        for r in 0..b.dim() {
            for c in 0..b.dim() {
                g[(r + shift, c + shift)] = gb[(r, c)].clone();
            }
        }
        out.set_metric(Some(g))?;
    }
    Ok(out)
}

/// Resolves a catalog name:
///
/// * `A<k>` (k >= 3): Euclidean simple algebra of dimension `k`, arity `k - 1`
/// * `A_<s>_<t>`: signature with `s` minus and `t` plus signs, arity `s + t - 1`
/// * `so3`, `so12`: the arity-2 cases `A3` and `A_1_2`
/// * `abelian:<n>:<dim>`
/// * `sum:<item>:<item>[:...]`: direct sum of the listed items
pub fn by_name(name: &str) -> Result<NAryAlgebra> {
    let tokens: Vec<&str> = name.trim().split(':').collect();
    let mut pos = 0;
    let alg = parse_item(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(unknown(name));
    }
    Ok(alg)
}

/// Whether `name` looks like a catalog entry rather than a file path.
pub fn is_catalog_name(name: &str) -> bool {
    by_name(name).is_ok()
}

fn unknown(name: &str) -> Error {
    Error::Invalid(format!("unknown catalog algebra {name:?}"))
}

fn parse_item(tokens: &[&str], pos: &mut usize) -> Result<NAryAlgebra> {
    let Some(&head) = tokens.get(*pos) else {
        return Err(Error::Invalid("empty catalog name".into()));
    };
    *pos += 1;
    match head {
        "so3" => simple_fa(2, &Signature::euclidean(3)),
        "so12" => simple_fa(2, &Signature::lorentzian(1, 2)),
        "abelian" => {
            let n = parse_count(tokens.get(*pos), head)?;
            let dim = parse_count(tokens.get(*pos + 1), head)?;
            *pos += 2;
            abelian(n, dim)
        }
        "sum" => {
            let mut acc = parse_item(tokens, pos)?;
            let mut parts = 1;
            while *pos < tokens.len() {
                let next = parse_item(tokens, pos)?;
                acc = direct_sum(&acc, &next)?;
                parts += 1;
            }
            if parts < 2 {
                return Err(Error::Invalid("sum needs at least two summands".into()));
            }
            Ok(acc)
        }
        _ => parse_simple(head),
    }
}

fn parse_count(token: Option<&&str>, context: &str) -> Result<usize> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Invalid(format!("{context}: expected a positive integer")))
}

fn parse_simple(head: &str) -> Result<NAryAlgebra> {
    let rest = head.strip_prefix('A').ok_or_else(|| unknown(head))?;
    if let Some(st) = rest.strip_prefix('_') {
        let (s, t) = st.split_once('_').ok_or_else(|| unknown(head))?;
        let s: usize = s.parse().map_err(|_| unknown(head))?;
        let t: usize = t.parse().map_err(|_| unknown(head))?;
        if s + t < 3 {
            return Err(unknown(head));
        }
        return simple_fa(s + t - 1, &Signature::lorentzian(s, t));
    }
    let k: usize = rest.parse().map_err(|_| unknown(head))?;
    if k < 3 {
        return Err(unknown(head));
    }
    simple_fa(k - 1, &Signature::euclidean(k))
}

/// Multiplies every structure constant by `factor`.
pub fn scaled(alg: &NAryAlgebra, factor: &Rational) -> Result<NAryAlgebra> {
    let mut out = NAryAlgebra::new(alg.arity(), alg.dim(), alg.symmetry())?;
    for (idx, t, v) in alg.constants() {
        out.set_constant(idx, t, v * factor)?;
    }
    out.set_metric(alg.metric().cloned())?;
    Ok(out)
}
