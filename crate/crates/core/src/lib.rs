//! Exact computer algebra for n-ary algebras given by structure constants.
//!
//! Filippov (n-Lie) algebras, the restricted n-Leibniz class that keeps the
//! first `n - 1` bracket slots antisymmetric, and even-arity generalized Lie
//! algebras are handled over the rationals with no floating point anywhere.
//! The crate checks their characteristic identities, computes structure
//! theory (derived series, Kasymov form, associated Lie algebra) and the
//! first cohomology groups that control central extensions and
//! infinitesimal deformations.

pub mod error;
pub mod kernel;

pub use error::{Error, Result};
pub use kernel::{Matrix, MultiIndex, Rational, SparseMatrix};
pub mod catalog;
pub mod cohomology;
pub mod glagps;
pub mod nalg;
pub mod nambu;
pub mod structure;

pub use catalog::{abelian, by_name, direct_sum, simple_fa, Signature};
pub use cohomology::{
    central_extend, deform, delta_square_residual, h1, theorem1_cocycle, Action, Cochain,
    CochainLayout, CohomologyReport, ComplexSpec, Deformation,
};
pub use glagps::{gji_residual, GjiWitness, GlaTensor};
pub use nalg::{
    basis_vector, fi_residual, symmetry_audit, BracketTable, FiWitness, FundamentalObject,
    NAryAlgebra, Residual, Symmetry, Vector,
};
pub use nambu::{
    bracket_skew_check, jacobian_bracket, leibniz_rule_residual, np_fi_residual, Polynomial,
};
pub use structure::{
    derived_series, is_ideal, is_semisimple, kasymov_form, lie_algebra_of, metric_checks,
    DerivedSeries, KasymovForm, LieAlgebraReport, MetricReport, Semisimplicity, Subspace,
};
