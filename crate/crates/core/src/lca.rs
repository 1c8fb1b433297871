//! Finite free Lie conformal algebras over ℚ[∂].
//!
//! An algebra of rank `n` is a structure table `P[i][j][k](del, lam)`
//! encoding `[e_i lam e_j] = Σ_k P[i][j][k](del, lam) e_k`, where `del`
//! acts on the target generator. Brackets of general elements extend the
//! table by sesquilinearity:
//!
//! ```text
//! [p(del) a  lam  q(del) b] = p(-lam) q(del + lam) [a lam b]
//! ```
//!
//! Structure tables are never trusted: `check_axioms` verifies skew
//! symmetry and the Jacobi identity as polynomial identities on
//! generators, which suffices by multilinearity.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::cmap::ConformalMap;
use crate::poly::{Poly, Rational, Var};
use crate::submodule::{
    hermite_rows, reduce_against_hermite, smith_decompose, SmithDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LcaError {
    #[error("value does not belong to this algebra")]
    AlgebraMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    BadWidth { expected: usize, got: usize },
    #[error("structure polynomials may use only del and lam")]
    BadTableVariables,
    #[error("element coordinates may use only del")]
    BadElementVariables,
    #[error("generator names must be nonempty and distinct")]
    BadNames,
    #[error("constants are not antisymmetric at pair ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("constants violate the Jacobi identity at triple ({i}, {j}, {k})")]
    NotJacobi { i: usize, j: usize, k: usize },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

/// Content fingerprint of an algebra; equal ids mean equal structure
/// tables, so values built from equal fixtures interoperate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(u64);

/// A member of the free module: one `del`-polynomial per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    algebra: AlgebraId,
    coords: Vec<Poly>,
}

impl Element {
    pub(crate) fn from_parts(algebra: AlgebraId, coords: Vec<Poly>) -> Element {
        Element { algebra, coords }
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|p| p.is_zero())
    }

    /// The module action of `del`: multiplies every coordinate by `del`.
    pub fn mul_del(&self) -> Element {
        let del = Poly::var(Var::Del);
        Element {
            algebra: self.algebra,
            coords: self.coords.iter().map(|p| p * &del).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        Element {
            algebra: self.algebra,
            coords: self.coords.iter().map(|p| p.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element, LcaError> {
        if self.algebra != other.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        Ok(Element {
            algebra: self.algebra,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Skew/Jacobi verification report; failures carry the residual
/// polynomial vector for the offending generator tuple.
#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub skew_failures: Vec<(usize, usize, Vec<Poly>)>,
    pub jacobi_failures: Vec<(usize, usize, usize, Vec<Poly>)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.skew_failures.is_empty() && self.jacobi_failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct LCAlgebra {
    id: AlgebraId,
    names: Vec<String>,
    table: Vec<Vec<Vec<Poly>>>,
}

fn fingerprint(names: &[String], table: &[Vec<Vec<Poly>>]) -> AlgebraId {
    let mut h = DefaultHasher::new();
    names.hash(&mut h);
    for row in table {
        for cell in row {
            for p in cell {
                p.to_string().hash(&mut h);
            }
        }
    }
    AlgebraId(h.finish())
}

impl LCAlgebra {
    /// Builds an algebra from a structure table. Shape and variable use
    /// are validated here; the axioms are checked by `check_axioms`.
    pub fn new(names: Vec<String>, table: Vec<Vec<Vec<Poly>>>) -> Result<LCAlgebra, LcaError> {
        let n = names.len();
        if n == 0 && !table.is_empty() {
            return Err(LcaError::BadWidth { expected: 0, got: table.len() });
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            if name.is_empty() || !seen.insert(name) {
                return Err(LcaError::BadNames);
            }
        }
        if table.len() != n {
            return Err(LcaError::BadWidth { expected: n, got: table.len() });
        }
        for row in &table {
            if row.len() != n {
                return Err(LcaError::BadWidth { expected: n, got: row.len() });
            }
            for cell in row {
                if cell.len() != n {
                    return Err(LcaError::BadWidth { expected: n, got: cell.len() });
                }
                for p in cell {
                    if !p.uses_only(&[Var::Del, Var::Lam]) {
                        return Err(LcaError::BadTableVariables);
                    }
                }
            }
        }
        let id = fingerprint(&names, &table);
        Ok(LCAlgebra { id, names, table })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Structure polynomials of `[e_i lam e_j]`.
    pub fn structure(&self, i: usize, j: usize) -> &[Poly] {
        &self.table[i][j]
    }

    pub fn element(&self, coords: Vec<Poly>) -> Result<Element, LcaError> {
        if coords.len() != self.rank() {
            return Err(LcaError::BadWidth { expected: self.rank(), got: coords.len() });
        }
        if coords.iter().any(|p| !p.uses_only(&[Var::Del])) {
            return Err(LcaError::BadElementVariables);
        }
        Ok(Element { algebra: self.id, coords })
    }

    pub fn zero_element(&self) -> Element {
        Element {
            algebra: self.id,
            coords: vec![Poly::zero(); self.rank()],
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut coords = vec![Poly::zero(); self.rank()];
        coords[i] = Poly::one();
        Element { algebra: self.id, coords }
    }

    /// `[a lam b]` as a coordinate vector of polynomials in `(del, lam)`.
    pub fn bracket_eval(&self, a: &Element, b: &Element) -> Result<Vec<Poly>, LcaError> {
        if a.algebra != self.id || b.algebra != self.id {
            return Err(LcaError::AlgebraMismatch);
        }
        let n = self.rank();
        let neg_lam = -Poly::var(Var::Lam);
        let del_plus_lam = &Poly::var(Var::Del) + &Poly::var(Var::Lam);
        let mut out = vec![Poly::zero(); n];
        for i in 0..n {
            if a.coords[i].is_zero() {
                continue;
            }
            let p = a.coords[i].substitute1(Var::Del, &neg_lam);
            for j in 0..n {
                if b.coords[j].is_zero() {
                    continue;
                }
                let q = b.coords[j].substitute1(Var::Del, &del_plus_lam);
                let pq = &p * &q;
                for k in 0..n {
                    let s = &self.table[i][j][k];
                    if !s.is_zero() {
                        out[k] = &out[k] + &(&pq * s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Verifies skew symmetry and the Jacobi identity on all generator
    /// pairs and triples. The report is independent of evaluation order.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.rank();
        let mut report = AxiomReport::default();
        let neg_lam_del = -&(&Poly::var(Var::Lam) + &Poly::var(Var::Del));
        for i in 0..n {
            for j in 0..n {
                let mut residual = Vec::with_capacity(n);
                let mut bad = false;
                for k in 0..n {
                    // [e_i lam e_j] + [e_j mu e_i] with mu -> -lam - del
                    let r = &self.table[i][j][k]
                        + &self.table[j][i][k].substitute1(Var::Lam, &neg_lam_del);
                    bad |= !r.is_zero();
                    residual.push(r);
                }
                if bad {
                    report.skew_failures.push((i, j, residual));
                }
            }
        }
        let del = Poly::var(Var::Del);
        let lam = Poly::var(Var::Lam);
        let mu = Poly::var(Var::Mu);
        let del_lam = &del + &lam;
        let del_mu = &del + &mu;
        let lam_mu = &lam + &mu;
        let neg_lam_mu = -&lam_mu;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut residual = Vec::with_capacity(n);
                    let mut bad = false;
                    for m in 0..n {
                        let mut r = Poly::zero();
                        for l in 0..n {
                            // [e_i lam [e_j mu e_k]]
                            let left = self.table[j][k][l]
                                .substitute(&[(Var::Del, del_lam.clone()), (Var::Lam, mu.clone())]);
                            r = &r + &(&left * &self.table[i][l][m]);
                            // [[e_i lam e_j] lam+mu e_k]
                            let mid = self.table[i][j][l]
                                .substitute1(Var::Del, &neg_lam_mu);
                            let rhs = self.table[l][k][m].substitute1(Var::Lam, &lam_mu);
                            r = &r - &(&mid * &rhs);
                            // [e_j mu [e_i lam e_k]]
                            let right = self.table[i][k][l]
                                .substitute1(Var::Del, &del_mu);
                            let inner = self.table[j][l][m].substitute1(Var::Lam, &mu);
                            r = &r - &(&right * &inner);
                        }
                        bad |= !r.is_zero();
                        residual.push(r);
                    }
                    if bad {
                        report.jacobi_failures.push((i, j, k, residual));
                    }
                }
            }
        }
        report
    }

    /// The conformal endomorphism `b -> [a lam b]`.
    pub fn adjoint(&self, a: &Element) -> Result<ConformalMap, LcaError> {
        if a.algebra != self.id {
            return Err(LcaError::AlgebraMismatch);
        }
        let n = self.rank();
        let mut entries = vec![vec![Poly::zero(); n]; n];
        for j in 0..n {
            let col = self.bracket_eval(a, &self.generator(j))?;
            for (i, p) in col.into_iter().enumerate() {
                entries[i][j] = p;
            }
        }
        Ok(ConformalMap::from_entries_unchecked(self.id, entries))
    }

    /// The submodule spanned by all `lam`-coefficients of generator
    /// brackets, in canonical form.
    pub fn derived_subalgebra(&self) -> Submodule {
        let n = self.rank();
        let mut gens: Vec<Vec<Poly>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let bracket = &self.table[i][j];
                let max_q = bracket
                    .iter()
                    .filter_map(|p| p.degree(Var::Lam))
                    .max()
                    .unwrap_or(0);
                for q in 0..=max_q {
                    let coords: Vec<Poly> =
                        bracket.iter().map(|p| p.coefficient_of(Var::Lam, q)).collect();
                    if coords.iter().any(|p| !p.is_zero()) {
                        gens.push(coords);
                    }
                }
            }
        }
        Submodule::from_generators(self, gens).expect("derived generators are del-vectors")
    }

    /// Smith-normal-form test for a free complement of `s` inside the
    /// algebra, after the module decomposition hypothesis.
    pub fn complement_test(&self, s: &Submodule) -> Result<SmithReport, LcaError> {
        if s.algebra != self.id {
            return Err(LcaError::AlgebraMismatch);
        }
        let n = self.rank();
        let smith = smith_decompose(&s.rows, n);
        let quotient_free = smith.diag.iter().all(|d| d.is_one());
        let complement = quotient_free.then(|| {
            let gens = smith.w[smith.rank..n].to_vec();
            Submodule::from_generators(self, gens).expect("complement rows are del-vectors")
        });
        Ok(SmithReport {
            invariant_factors: smith.diag,
            quotient_free,
            complement,
        })
    }

    /// Full change-of-basis data for `s`; used by the quasiderivation
    /// embedding, which needs generator coordinates in the split basis.
    pub(crate) fn smith_data(&self, s: &Submodule) -> SmithDecomposition {
        smith_decompose(&s.rows, self.rank())
    }

    /// Direct sum with cross brackets zero. Colliding generator names on
    /// the right acquire a `_2` suffix.
    pub fn direct_sum(&self, other: &LCAlgebra) -> LCAlgebra {
        let n1 = self.rank();
        let n2 = other.rank();
        let n = n1 + n2;
        let mut names = self.names.clone();
        for name in &other.names {
            let mut candidate = name.clone();
            while names.contains(&candidate) {
                candidate.push_str("_2");
            }
            names.push(candidate);
        }
        let mut table = vec![vec![vec![Poly::zero(); n]; n]; n];
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    table[i][j][k] = self.table[i][j][k].clone();
                }
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                for k in 0..n2 {
                    table[n1 + i][n1 + j][n1 + k] = other.table[i][j][k].clone();
                }
            }
        }
        LCAlgebra::new(names, table).expect("direct sum of valid tables is valid")
    }

    /// The nilpotent extension on generators `{e_i t, e_i t^2}` with
    /// `[a t^i lam b t^j] = [a lam b] t^(i+j)` and `t^3 = 0`.
    pub fn truncated_extension(&self) -> LCAlgebra {
        let n = self.rank();
        let mut names = Vec::with_capacity(2 * n);
        for name in &self.names {
            names.push(format!("{name}t"));
        }
        for name in &self.names {
            names.push(format!("{name}t2"));
        }
        let mut table = vec![vec![vec![Poly::zero(); 2 * n]; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[i][j][n + k] = self.table[i][j][k].clone();
                }
            }
        }
        LCAlgebra::new(names, table).expect("extension of a valid table is valid")
    }
}

/// Builds the current algebra of a Lie algebra given by structure
/// constants `c[i][j][k]`; the constants are validated, not trusted.
pub fn current_from_lie(
    names: Vec<String>,
    constants: &[Vec<Vec<Rational>>],
) -> Result<LCAlgebra, LcaError> {
    let n = names.len();
    if constants.len() != n || constants.iter().any(|r| r.len() != n || r.iter().any(|c| c.len() != n)) {
        return Err(LcaError::BadWidth { expected: n, got: constants.len() });
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if constants[i][j][k] != -constants[j][i][k].clone() {
                    return Err(LcaError::NotAntisymmetric { i, j });
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut acc = Rational::from_integer(0.into());
                    for l in 0..n {
                        acc += &constants[i][j][l] * &constants[l][k][m];
                        acc += &constants[j][k][l] * &constants[l][i][m];
                        acc += &constants[k][i][l] * &constants[l][j][m];
                    }
                    if acc != Rational::from_integer(0.into()) {
                        return Err(LcaError::NotJacobi { i, j, k });
                    }
                }
            }
        }
    }
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| Poly::constant(constants[i][j][k].clone()))
                        .collect()
                })
                .collect()
        })
        .collect();
    LCAlgebra::new(names, table)
}

/// Built-in algebras used throughout the test and acceptance suites.
pub fn fixture(name: &str) -> Result<LCAlgebra, LcaError> {
    let del = Poly::var(Var::Del);
    let lam = Poly::var(Var::Lam);
    match name {
        "vir" => {
            let bracket = &del + &lam.scale(&crate::poly::rat_int(2));
            LCAlgebra::new(vec!["L".into()], vec![vec![vec![bracket]]])
        }
        "cur_sl2" => {
            let z = || crate::poly::rat_int(0);
            let c = |v: i64| crate::poly::rat_int(v);
            // basis (e, h, f): [h,e] = 2e, [h,f] = -2f, [e,f] = h
            let mut constants = vec![vec![vec![z(); 3]; 3]; 3];
            constants[1][0][0] = c(2);
            constants[0][1][0] = c(-2);
            constants[1][2][2] = c(-2);
            constants[2][1][2] = c(2);
            constants[0][2][1] = c(1);
            constants[2][0][1] = c(-1);
            current_from_lie(vec!["e".into(), "h".into(), "f".into()], &constants)
        }
        "rank2_LW" => {
            let z = Poly::zero();
            let ll = &del + &lam.scale(&crate::poly::rat_int(2));
            let table = vec![
                vec![vec![ll, z.clone()], vec![z.clone(), del.clone()]],
                vec![vec![z.clone(), -&del], vec![z.clone(), z.clone()]],
            ];
            LCAlgebra::new(vec!["L".into(), "W".into()], table)
        }
        "solvable_d1" => {
            let z = Poly::zero();
            let table = vec![
                vec![vec![z.clone(), z.clone()], vec![z.clone(), Poly::one()]],
                vec![vec![z.clone(), -Poly::one()], vec![z.clone(), z.clone()]],
            ];
            LCAlgebra::new(vec!["a".into(), "b".into()], table)
        }
        other => {
            if let Some(arg) = other.strip_prefix("abelian(").and_then(|s| s.strip_suffix(')')) {
                let n: usize = arg
                    .parse()
                    .map_err(|_| LcaError::UnknownFixture(other.to_string()))?;
                let names = (1..=n).map(|i| format!("a{i}")).collect();
                let table = vec![vec![vec![Poly::zero(); n]; n]; n];
                return LCAlgebra::new(names, table);
            }
            Err(LcaError::UnknownFixture(other.to_string()))
        }
    }
}

/// Names of the built-in fixtures accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 5] = ["vir", "cur_sl2", "rank2_LW", "solvable_d1", "abelian(n)"];

/// A finitely generated submodule of the algebra's free module, stored as
/// canonical Hermite rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submodule {
    algebra: AlgebraId,
    ncols: usize,
    rows: Vec<Vec<Poly>>,
}

impl Submodule {
    pub fn from_generators(
        alg: &LCAlgebra,
        gens: Vec<Vec<Poly>>,
    ) -> Result<Submodule, LcaError> {
        let n = alg.rank();
        for g in &gens {
            if g.len() != n {
                return Err(LcaError::BadWidth { expected: n, got: g.len() });
            }
            if g.iter().any(|p| !p.uses_only(&[Var::Del])) {
                return Err(LcaError::BadElementVariables);
            }
        }
        Ok(Submodule {
            algebra: alg.id(),
            ncols: n,
            rows: hermite_rows(gens, n),
        })
    }

    pub fn from_elements(alg: &LCAlgebra, elems: &[Element]) -> Result<Submodule, LcaError> {
        if elems.iter().any(|e| e.algebra != alg.id()) {
            return Err(LcaError::AlgebraMismatch);
        }
        Submodule::from_generators(alg, elems.iter().map(|e| e.coords.clone()).collect())
    }

    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Canonical generators as elements of `alg`.
    pub fn generators(&self, alg: &LCAlgebra) -> Result<Vec<Element>, LcaError> {
        if alg.id() != self.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        Ok(self
            .rows
            .iter()
            .map(|r| Element { algebra: self.algebra, coords: r.clone() })
            .collect())
    }

    pub fn generator_rows(&self) -> &[Vec<Poly>] {
        &self.rows
    }

    pub fn contains(&self, e: &Element) -> Result<bool, LcaError> {
        if e.algebra != self.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        let red = reduce_against_hermite(&self.rows, &e.coords);
        Ok(red.iter().all(|p| p.is_zero()))
    }

    /// Equality of submodules is equality of canonical rows.
    pub fn same_module(&self, other: &Submodule) -> bool {
        self.algebra == other.algebra && self.rows == other.rows
    }

    /// True when every `lam`-coefficient of `[e_i lam s]` stays inside,
    /// for all generators `e_i` of the algebra and `s` of the submodule.
    pub fn is_ideal(&self, alg: &LCAlgebra) -> Result<bool, LcaError> {
        if alg.id() != self.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        for i in 0..alg.rank() {
            let gen = alg.generator(i);
            for s in self.generators(alg)? {
                let bracket = alg.bracket_eval(&gen, &s)?;
                let max_q = bracket.iter().filter_map(|p| p.degree(Var::Lam)).max().unwrap_or(0);
                for q in 0..=max_q {
                    let coords: Vec<Poly> =
                        bracket.iter().map(|p| p.coefficient_of(Var::Lam, q)).collect();
                    let elem = Element { algebra: self.algebra, coords };
                    if !self.contains(&elem)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Outcome of the free-complement test.
#[derive(Debug, Clone)]
pub struct SmithReport {
    /// Monic invariant factors of the generator matrix, divisibility-ordered.
    pub invariant_factors: Vec<Poly>,
    /// True when the quotient module is free, i.e. every factor is a unit.
    pub quotient_free: bool,
    /// A free complement when one exists.
    pub complement: Option<Submodule>,
}
