//! Structure theory of Filippov algebras: derived series, the Kasymov trace
//! form and semisimplicity, ideals, the Lie algebra of inner derivations and
//! invariant metrics.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::{all_tuples, Matrix, Rational};
use crate::kernel::{
    increasing_tuples, rank_and_kernel, reduce_modulo, rref, solve_in_image, sort_skew, subset_rank,
};
use crate::nalg::{basis_vector, FundamentalObject, NAryAlgebra, Symmetry, Vector};

/// Linear subspace held as an echelonized basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        let (basis, _) = rref(vectors, ambient);
        Self { ambient, basis }
    }

    pub fn full(ambient: usize) -> Self {
        Self::coordinate(ambient, &(1..=ambient).collect::<Vec<_>>())
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
        }
    }

    /// `span{e_a : a in indices}`.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vectors: Vec<Vector> = indices.iter().map(|&a| basis_vector(ambient, a)).collect();
        Self::span(ambient, &vectors)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.basis.is_empty() {
            return false;
        }
        let columns = Matrix::from_rows(self.basis.clone()).transpose();
        solve_in_image(&columns, v).is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSeries {
    /// `dim I^(0), dim I^(1), ...` up to the first repeat or zero.
    pub dims: Vec<usize>,
    pub solvable: bool,
}

/// `I^(0) = G`, `I^(s) = [I^(s-1), ..., I^(s-1)]`, until the dimension stops
/// changing or reaches zero.
pub fn derived_series(alg: &NAryAlgebra) -> DerivedSeries {
    let mut current = Subspace::full(alg.dim());
    let mut dims = vec![current.dim()];
    loop {
        let next = bracket_span(alg, &current);
        dims.push(next.dim());
        if next.dim() == 0 {
            return DerivedSeries {
                dims,
                solvable: true,
            };
        }
        if next.dim() == current.dim() {
            return DerivedSeries {
                dims,
                solvable: false,
            };
        }
        current = next;
    }
}

/// Span of all brackets of basis vectors of `s`.
fn bracket_span(alg: &NAryAlgebra, s: &Subspace) -> Subspace {
    let k = s.dim();
    let tuples = alg.symmetry().canonical_tuples(alg.arity(), k);
    let images: Vec<Vector> = tuples
        .iter()
        .map(|t| {
            let args: Vec<Vector> = t.iter().map(|&i| s.basis[i - 1].clone()).collect();
            alg.bracket(&args).expect("shapes agree")
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    Subspace::span(alg.dim(), &images)
}

/// Trace form `k(X, Y) = Tr(ad_X ad_Y)` on the fundamental-object basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KasymovForm {
    pub basis: Vec<Vec<usize>>,
    pub matrix: Matrix,
}

impl KasymovForm {
    pub fn is_symmetric(&self) -> bool {
        self.matrix.is_symmetric()
    }
}

pub fn kasymov_form(alg: &NAryAlgebra) -> Result<KasymovForm> {
    let basis = alg.fundamental_basis();
    let ads = basis_ads(alg, &basis)?;
    let m = basis.len();
    let mut matrix = Matrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = ads[i].trace_of_product(&ads[j]);
            matrix[(j, i)] = v.clone();
            matrix[(i, j)] = v;
        }
    }
    Ok(KasymovForm { basis, matrix })
}

fn basis_ads(alg: &NAryAlgebra, basis: &[Vec<usize>]) -> Result<Vec<Matrix>> {
    basis
        .iter()
        .map(|t| alg.ad_matrix(&FundamentalObject::from_tuple(alg.dim(), t)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Semisimplicity {
    pub semisimple: bool,
    /// Basis of `{Z : k(Z, G, ..., G; G, ..., G) = 0}`; empty iff semisimple.
    pub kernel: Vec<Vector>,
}

/// Kasymov non-degeneracy test: the map
/// `Z -> (k((Z, X_2, .., X_{n-1}), Y))` over canonical basis completions
/// must be injective.
pub fn is_semisimple(alg: &NAryAlgebra) -> Result<Semisimplicity> {
    let k = kasymov_form(alg)?;
    let (n, dim) = (alg.arity(), alg.dim());
    let completions = increasing_tuples(dim, n - 2);
    let objects = k.basis.len();
    let mut rows = Vec::with_capacity(completions.len() * objects);
    for w in &completions {
        for y in 0..objects {
            let mut row = vec![Rational::zero(); dim];
            for z in 1..=dim {
                let mut key: Vec<usize> = std::iter::once(z).chain(w.iter().copied()).collect();
                let sign = sort_skew(&mut key);
                if sign == 0 {
                    continue;
                }
                let v = &k.matrix[(subset_rank(dim, &key), y)];
                row[z - 1] = if sign > 0 { v.clone() } else { -v.clone() };
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (1..=dim).map(|a| basis_vector(dim, a)).collect()
    } else {
        rank_and_kernel(&Matrix::from_rows(rows)).1
    };
    Ok(Semisimplicity {
        semisimple: kernel.is_empty(),
        kernel,
    })
}

/// `[X_1, ..., X_{n-1}, Z] in s` for all basis `X` and all `Z in s`.
pub fn is_ideal(alg: &NAryAlgebra, s: &Subspace) -> Result<bool> {
    if s.ambient() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: s.ambient(),
        });
    }
    let (n, dim) = (alg.arity(), alg.dim());
    let heads = match alg.symmetry() {
        Symmetry::None => all_tuples(dim, n - 1),
        _ => increasing_tuples(dim, n - 1),
    };
    for head in &heads {
        let mut args: Vec<Vector> = head.iter().map(|&a| basis_vector(dim, a)).collect();
        args.push(Vector::new());
        for z in s.basis() {
            args[n - 1] = z.clone();
            if !s.contains(&alg.bracket(&args)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraReport {
    pub dim: usize,
    /// Echelonized basis of `span{ad_X}` as matrices.
    pub basis: Vec<Matrix>,
    pub closure_ok: bool,
}

/// The Lie algebra spanned by the inner derivations `ad_X`.
pub fn lie_algebra_of(alg: &NAryAlgebra) -> Result<LieAlgebraReport> {
    let dim = alg.dim();
    let ads = basis_ads(alg, &alg.fundamental_basis())?;
    let flat: Vec<Vec<Rational>> = ads.iter().map(Matrix::flatten).collect();
    let (rows, pivots) = rref(&flat, dim * dim);
    let basis: Vec<Matrix> = rows
        .iter()
        .map(|r| Matrix::from_rows(r.chunks(dim).map(<[Rational]>::to_vec).collect()))
        .collect();
    let mut closure_ok = true;
    'outer: for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = basis[i].commutator(&basis[j]).flatten();
            if reduce_modulo(&c, &rows, &pivots)
                .iter()
                .any(|x| !x.is_zero())
            {
                closure_ok = false;
                break 'outer;
            }
        }
    }
    Ok(LieAlgebraReport {
        dim: basis.len(),
        basis,
        closure_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricReport {
    /// `f_{x b}^l g_{lc} + f_{x c}^l g_{bl} = 0` for all indices.
    pub invariant: bool,
    /// `f_{a_1..a_n c} = f_{a_1..a_n}^l g_{lc}` is totally antisymmetric.
    pub lowered_antisymmetric: bool,
    /// `sum_i f_{a b_i}^l f_{b_1..l..b_{n+1}} = 0`.
    pub invariant_tensor: bool,
}

impl MetricReport {
    pub fn all_pass(&self) -> bool {
        self.invariant && self.lowered_antisymmetric && self.invariant_tensor
    }
}

pub fn metric_checks(alg: &NAryAlgebra) -> Result<MetricReport> {
    let g = alg
        .metric()
        .ok_or_else(|| Error::Invalid("algebra carries no metric".into()))?;
    if !g.is_symmetric() {
        return Err(Error::Invalid("metric is not symmetric".into()));
    }
    let (n, dim) = (alg.arity(), alg.dim());
    let table = alg.table();
    let heads = match alg.symmetry() {
        Symmetry::None => all_tuples(dim, n - 1),
        _ => increasing_tuples(dim, n - 1),
    };

    // f_{t_1..t_n}^l g_{l t_{n+1}} for every (n+1)-tuple, flattened.
    let lowered_at = |t: &[usize]| -> Rational {
        table
            .get(&t[..n])
            .iter()
            .map(|(l, v)| v * &g[(*l, t[n] - 1)])
            .sum()
    };
    let tuples = all_tuples(dim, n + 1);
    let lowered: Vec<Rational> = tuples.iter().map(|t| lowered_at(t)).collect();
    let flat = |t: &[usize]| t.iter().fold(0, |acc, &i| acc * dim + (i - 1));

    let mut invariant = true;
    'inv: for x in &heads {
        let mut t: Vec<usize> = x.clone();
        t.push(0);
        t.push(0);
        for b in 1..=dim {
            for c in 1..=dim {
                t[n - 1] = b;
                t[n] = c;
                let first = &lowered[flat(&t)];
                t[n - 1] = c;
                t[n] = b;
                // f_{x c}^l g_{bl} = f_{x c}^l g_{lb}
                if !(first + &lowered[flat(&t)]).is_zero() {
                    invariant = false;
                    break 'inv;
                }
            }
        }
    }

    let mut lowered_antisymmetric = true;
    'anti: for t in &tuples {
        for slot in 0..n {
            let mut s = t.clone();
            s.swap(slot, slot + 1);
            if !(&lowered[flat(t)] + &lowered[flat(&s)]).is_zero() {
                lowered_antisymmetric = false;
                break 'anti;
            }
        }
    }

    let mut invariant_tensor = true;
    'tensor: for a in &heads {
        let mut outer = a.clone();
        outer.push(0);
        for b in increasing_tuples(dim, n + 1) {
            let mut acc = Rational::zero();
            let mut replaced = b.clone();
            for i in 0..=n {
                outer[n - 1] = b[i];
                for (l, v) in table.get(&outer) {
                    replaced[i] = l + 1;
                    acc += v * &lowered[flat(&replaced)];
                }
                replaced[i] = b[i];
            }
            if !acc.is_zero() {
                invariant_tensor = false;
                break 'tensor;
            }
        }
    }

    Ok(MetricReport {
        invariant,
        lowered_antisymmetric,
        invariant_tensor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{abelian, by_name, direct_sum};
    use crate::kernel::rat;

    #[test]
    fn derived_series_examples() {
        let ab = derived_series(&abelian(3, 4).unwrap());
        assert_eq!(ab.dims, vec![4, 0]);
        assert!(ab.solvable);
        let a4 = derived_series(&by_name("A4").unwrap());
        assert_eq!(a4.dims, vec![4, 4]);
        assert!(!a4.solvable);
        let s = derived_series(&by_name("sum:A4:abelian:3:1").unwrap());
        assert_eq!(s.dims, vec![5, 4, 4]);
        assert!(!s.solvable);
    }

    #[test]
    fn kasymov_on_a4() {
        // ad_{(e1,e2)} rotates the (e3, e4) plane, so its square has trace -2.
        let k = kasymov_form(&by_name("A4").unwrap()).unwrap();
        let e12 = subset_rank(4, &[1, 2]);
        let e34 = subset_rank(4, &[3, 4]);
        assert_eq!(k.matrix[(e12, e12)], rat(-2));
        assert_eq!(k.matrix[(e12, e34)], rat(0));
        assert!(k.is_symmetric());
        assert!(kasymov_form(&abelian(3, 4).unwrap())
            .unwrap()
            .matrix
            .is_zero());
    }

    #[test]
    fn semisimplicity() {
        assert!(is_semisimple(&by_name("A4").unwrap()).unwrap().semisimple);
        let ab = is_semisimple(&abelian(3, 4).unwrap()).unwrap();
        assert!(!ab.semisimple);
        assert_eq!(ab.kernel.len(), 4);
        let s = is_semisimple(&by_name("sum:A4:abelian:3:1").unwrap()).unwrap();
        assert!(!s.semisimple);
        assert_eq!(s.kernel, vec![basis_vector(5, 5)]);
    }

    #[test]
    fn ideals() {
        let a4 = by_name("A4").unwrap();
        assert!(is_ideal(&a4, &Subspace::full(4)).unwrap());
        assert!(is_ideal(&a4, &Subspace::zero(4)).unwrap());
        assert!(!is_ideal(&a4, &Subspace::coordinate(4, &[1])).unwrap());
        let sum = direct_sum(&a4, &by_name("A_1_3").unwrap()).unwrap();
        assert!(is_ideal(&sum, &Subspace::coordinate(8, &[1, 2, 3, 4])).unwrap());
        assert!(is_ideal(&sum, &Subspace::coordinate(8, &[5, 6, 7, 8])).unwrap());
    }

    #[test]
    fn lie_algebras() {
        let l = lie_algebra_of(&by_name("A4").unwrap()).unwrap();
        assert_eq!(l.dim, 6);
        assert!(l.closure_ok);
        let l = lie_algebra_of(&by_name("A5").unwrap()).unwrap();
        assert_eq!(l.dim, 10);
        assert!(l.closure_ok);
        assert_eq!(lie_algebra_of(&abelian(3, 4).unwrap()).unwrap().dim, 0);
    }

    #[test]
    fn metrics() {
        assert!(metric_checks(&by_name("A4").unwrap()).unwrap().all_pass());
        assert!(metric_checks(&by_name("A_1_3").unwrap())
            .unwrap()
            .all_pass());
        let ab = abelian(3, 3)
            .unwrap()
            .with_metric(Matrix::from_i64(&[&[1, 2, 0], &[2, 1, 0], &[0, 0, 5]]))
            .unwrap();
        assert!(metric_checks(&ab).unwrap().all_pass());
        let skewed = by_name("A4")
            .unwrap()
            .with_metric(Matrix::diagonal(&[rat(1), rat(1), rat(1), rat(2)]))
            .unwrap();
        assert!(!metric_checks(&skewed).unwrap().invariant);
        let bad = by_name("A4")
            .unwrap()
            .with_metric(Matrix::from_i64(&[
                &[1, 1, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
            ]))
            .unwrap();
        assert!(metric_checks(&bad).is_err());
        assert!(metric_checks(&abelian(3, 3).unwrap()).is_err());
    }
}
