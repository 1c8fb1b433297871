//! The on-disk algebra format: a JSON object with a generator list and a
//! bracket table keyed by generator pairs. Only pairs `gi,gj` with
//! `i <= j` are required; the other half is filled in by skew symmetry,
//! and explicitly given redundant entries are cross-checked against it.

use std::collections::BTreeMap;

use lcas_core::lca::LCAlgebra;
use lcas_core::poly::{Poly, Var};
use serde::{Deserialize, Serialize};

use crate::expr::{parse_lin_expr, render_term, ParseError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub generators: Vec<String>,
    #[serde(default)]
    pub brackets: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FileError {
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
    #[error("`{0}` is reserved and cannot name a generator")]
    ReservedName(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("bracket key `{0}` is not of the form `gi,gj`")]
    BadKey(String),
    #[error("bracket key `{key}` names unknown generator `{name}`")]
    UnknownGenerator { key: String, name: String },
    #[error("bracket `{key}`, term {index}: {source}")]
    Term {
        key: String,
        index: usize,
        source: ParseError,
    },
    #[error("bracket `{key}`, term {index}: a bracket value must carry a generator in every additive part")]
    ScalarTerm { key: String, index: usize },
    #[error("bracket `{key}` conflicts with the skew image of `{other}`")]
    SkewConflict { key: String, other: String },
    #[error("structure data is malformed: {0}")]
    Algebra(String),
}

const RESERVED: [&str; 4] = ["del", "lam", "mu", "nu"];

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn skew_image(bracket: &[Poly]) -> Vec<Poly> {
    let flip = -&(&Poly::var(Var::Lam) + &Poly::var(Var::Del));
    bracket
        .iter()
        .map(|p| -&p.substitute1(Var::Lam, &flip))
        .collect()
}

impl AlgebraFile {
    /// Parses and validates into a structure table. Skew symmetry fills
    /// in missing mirror pairs; explicit mirrors must agree with it.
    pub fn to_algebra(&self) -> Result<LCAlgebra, FileError> {
        let n = self.generators.len();
        let mut seen = std::collections::BTreeSet::new();
        for g in &self.generators {
            if !valid_ident(g) {
                return Err(FileError::BadGeneratorName(g.clone()));
            }
            if RESERVED.contains(&g.as_str()) {
                return Err(FileError::ReservedName(g.clone()));
            }
            if !seen.insert(g.clone()) {
                return Err(FileError::DuplicateGenerator(g.clone()));
            }
        }

        let mut given: BTreeMap<(usize, usize), (String, Vec<Poly>)> = BTreeMap::new();
        for (key, terms) in &self.brackets {
            let Some((left, right)) = key.split_once(',') else {
                return Err(FileError::BadKey(key.clone()));
            };
            let index_of = |name: &str| -> Result<usize, FileError> {
                let name = name.trim();
                self.generators
                    .iter()
                    .position(|g| g == name)
                    .ok_or_else(|| FileError::UnknownGenerator {
                        key: key.clone(),
                        name: name.to_string(),
                    })
            };
            let i = index_of(left)?;
            let j = index_of(right)?;
            let mut value = vec![Poly::zero(); n];
            for (index, term) in terms.iter().enumerate() {
                let lin = parse_lin_expr(term, &self.generators).map_err(|source| {
                    FileError::Term { key: key.clone(), index, source }
                })?;
                if !lin.scalar.is_zero() {
                    return Err(FileError::ScalarTerm { key: key.clone(), index });
                }
                for (acc, c) in value.iter_mut().zip(&lin.coeffs) {
                    *acc = &*acc + c;
                }
            }
            given.insert((i, j), (key.clone(), value));
        }

        let mut table = vec![vec![vec![Poly::zero(); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                let forward = given.get(&(i, j));
                let mirror = if i == j { None } else { given.get(&(j, i)) };
                match (forward, mirror) {
                    (Some((_, f)), Some((mkey, m))) => {
                        if skew_image(f) != *m {
                            return Err(FileError::SkewConflict {
                                key: mkey.clone(),
                                other: format!(
                                    "{},{}",
                                    self.generators[i], self.generators[j]
                                ),
                            });
                        }
                        table[i][j] = f.clone();
                        table[j][i] = m.clone();
                    }
                    (Some((_, f)), None) => {
                        table[j][i] = skew_image(f);
                        table[i][j] = f.clone();
                    }
                    (None, Some((_, m))) => {
                        table[i][j] = skew_image(m);
                        table[j][i] = m.clone();
                    }
                    (None, None) => {}
                }
            }
        }
        LCAlgebra::new(self.generators.clone(), table)
            .map_err(|e| FileError::Algebra(e.to_string()))
    }

    /// Serializes a structure table; only the `i <= j` half is emitted.
    pub fn from_algebra(alg: &LCAlgebra) -> AlgebraFile {
        let n = alg.rank();
        let mut brackets = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let bracket = alg.structure(i, j);
                let terms: Vec<String> = bracket
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(k, p)| render_term(p, alg.name(k)))
                    .collect();
                if !terms.is_empty() {
                    brackets.insert(format!("{},{}", alg.name(i), alg.name(j)), terms);
                }
            }
        }
        AlgebraFile { generators: alg.names().to_vec(), brackets }
    }
}
