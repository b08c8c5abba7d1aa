//! JSON interchange format for structure constants.

use std::collections::BTreeMap;
use std::path::Path;

use nary_core::kernel::{format_rational, parse_rational, MultiIndex};
use nary_core::{by_name, Matrix, NAryAlgebra, Rational, Symmetry};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub arity: usize,
    pub dim: usize,
    pub symmetry: String,
    pub constants: Vec<ConstantRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantRecord {
    pub idx: Vec<usize>,
    pub target: usize,
    pub value: String,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

impl AlgebraFile {
    pub fn from_algebra(name: &str, alg: &NAryAlgebra) -> Self {
        Self {
            name: name.to_string(),
            arity: alg.arity(),
            dim: alg.dim(),
            symmetry: alg.symmetry().as_str().to_string(),
            constants: alg
                .constants()
                .map(|(idx, target, v)| ConstantRecord {
                    idx: idx.to_vec(),
                    target,
                    value: format_rational(v),
                })
                .collect(),
            metric: alg.metric().map(|g| {
                (0..g.rows())
                    .map(|r| g.row(r).iter().map(format_rational).collect())
                    .collect()
            }),
        }
    }

    /// Builds the algebra, folding non-canonical index blocks with their
    /// permutation sign. Conflicting duplicates are rejected.
    pub fn to_algebra(&self) -> Result<NAryAlgebra, CliError> {
        let symmetry: Symmetry = self.symmetry.parse().map_err(|_| {
            invalid(format!(
                "symmetry must be \"full\", \"first_n_minus_1\" or \"none\", got {:?}",
                self.symmetry
            ))
        })?;
        if self.arity < 2 {
            return Err(invalid(format!(
                "arity must be at least 2, got {}",
                self.arity
            )));
        }
        let mut alg = NAryAlgebra::new(self.arity, self.dim, symmetry)?;
        let skew = symmetry.skew_arity(self.arity);
        let mut seen: BTreeMap<(Vec<usize>, usize), (Rational, usize)> = BTreeMap::new();
        for (i, rec) in self.constants.iter().enumerate() {
            let at = |msg: String| invalid(format!("constants[{i}]: {msg}"));
            if rec.idx.len() != self.arity {
                return Err(at(format!(
                    "idx has {} entries, arity is {}",
                    rec.idx.len(),
                    self.arity
                )));
            }
            if rec.target == 0 || rec.target > self.dim {
                return Err(at(format!(
                    "target {} out of range 1..={}",
                    rec.target, self.dim
                )));
            }
            let value = parse_rational(&rec.value).map_err(|e| at(e.to_string()))?;
            let (key, sign) = MultiIndex::new(rec.idx.clone(), skew)
                .canonicalize(self.dim)
                .map_err(|e| at(e.to_string()))?;
            if sign == 0 {
                if value.is_zero() {
                    continue;
                }
                return Err(at(format!(
                    "nonzero value on degenerate index block {:?}",
                    rec.idx
                )));
            }
            let value = if sign < 0 { -value } else { value };
            let slot = (key.indices, rec.target);
            if let Some((previous, j)) = seen.get(&slot) {
                if *previous != value {
                    return Err(at(format!(
                        "conflicts with constants[{j}] on canonical key {:?} -> {} ({} vs {})",
                        slot.0,
                        slot.1,
                        format_rational(previous),
                        format_rational(&value)
                    )));
                }
                continue;
            }
            alg.set_constant(&slot.0, slot.1, value.clone())?;
            seen.insert(slot, (value, i));
        }
        if let Some(rows) = &self.metric {
            if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                return Err(invalid(format!("metric must be {0}x{0}", self.dim)));
            }
            let parsed = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| parse_rational(v))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| invalid(format!("metric: {e}")))?;
            alg.set_metric(Some(Matrix::from_rows(parsed)))?;
        }
        Ok(alg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let offset = line_col_offset(text, e.line(), e.column());
            CliError::Parse {
                position: offset,
                message: format!("line {} column {}: {e}", e.line(), e.column()),
            }
        })
    }
}

fn line_col_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    before + column.saturating_sub(1)
}

/// An algebra loaded from a file path or a catalog name.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub algebra: NAryAlgebra,
}

impl Loaded {
    /// sha256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let canonical = AlgebraFile::from_algebra(&self.name, &self.algebra);
        let bytes = serde_json::to_vec(&canonical).expect("serializable");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Existing files win over catalog names.
pub fn resolve(input: &str) -> Result<Loaded, CliError> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{input}: {e}")))?;
        let file = AlgebraFile::parse(&text)?;
        let algebra = file.to_algebra()?;
        return Ok(Loaded {
            name: file.name,
            algebra,
        });
    }
    match by_name(input) {
        Ok(algebra) => Ok(Loaded {
            name: input.to_string(),
            algebra,
        }),
        Err(_) => Err(invalid(format!(
            "{input:?} is neither a readable file nor a catalog algebra"
        ))),
    }
}
