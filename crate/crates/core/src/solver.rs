//! Degree-bounded exact solving of derivation-type identities.
//!
//! Every supported identity is linear in the unknown maps, so under an
//! entry-degree bound it becomes a finite homogeneous linear system over
//! ℚ: one column per ansatz unit (tuple slot, matrix entry, monomial),
//! one row per monomial of the residual on each generator pair. Kernels
//! are computed by exact elimination and stored in reduced row echelon
//! form, which makes every solution space canonical and directly
//! comparable.
//!
//! The evaluation oracle rebuilds the same system without touching the
//! coefficient-extraction path: residual columns are evaluated on a
//! rational grid large enough to be faithful at the known degrees, and
//! the two kernels must agree.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::cmap::ConformalMap;
use crate::lca::{AlgebraId, Element, LCAlgebra, LcaError, Submodule};
use crate::linalg::{intersect_rowspaces, kernel_basis, rref_rows, Rref};
use crate::poly::{rat_int, Monomial, Poly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Algebra(#[from] LcaError),
    #[error("expected {expected} maps for this kind, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("spaces have a different layout, algebra, or bounds")]
    SpaceMismatch,
    #[error("map entries exceed the degree bounds of the space")]
    BoundsExceeded,
    #[error("no free complement: invariant factor `{factor}` is not a unit")]
    NoFreeComplement { factor: String },
    #[error("slot {slot} out of range for arity {arity}")]
    BadSlot { slot: usize, arity: usize },
    #[error("this operation needs a map space, not an element space")]
    NotAMapSpace,
    #[error("this operation needs an element space")]
    NotAnElementSpace,
}

/// Inclusive per-variable degree caps for every map of an ansatz tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DegreeBound {
    pub max_del: u16,
    pub max_lam: u16,
}

impl DegreeBound {
    pub fn new(max_del: u16, max_lam: u16) -> DegreeBound {
        DegreeBound { max_del, max_lam }
    }
}

impl fmt::Display for DegreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "del<={} lam<={}", self.max_del, self.max_lam)
    }
}

/// Scalar parameters of the three-parameter derivation identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbgParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl AbgParams {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> AbgParams {
        AbgParams { alpha, beta, gamma }
    }

    pub fn of_ints(alpha: i64, beta: i64, gamma: i64) -> AbgParams {
        AbgParams::new(rat_int(alpha), rat_int(beta), rat_int(gamma))
    }
}

/// The identity a solution space is cut out by.
///
/// Arities: `Quasi` solves for pairs `(D, D')` where `D'` acts on the
/// bracket, `Generalized` for triples `(D, D', D'')` with `D''` on the
/// bracket; everything else is a single map, except `Center`, which
/// lives in the module itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationKind {
    Conformal,
    Quasi,
    Generalized,
    Centroid,
    Quasicentroid,
    Central,
    AlphaBetaGamma(AbgParams),
    Center,
}

impl DerivationKind {
    pub fn arity(&self) -> usize {
        match self {
            DerivationKind::Quasi => 2,
            DerivationKind::Generalized => 3,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            DerivationKind::Conformal => "cder".into(),
            DerivationKind::Quasi => "qder".into(),
            DerivationKind::Generalized => "gder".into(),
            DerivationKind::Centroid => "centroid".into(),
            DerivationKind::Quasicentroid => "qc".into(),
            DerivationKind::Central => "zder".into(),
            DerivationKind::AlphaBetaGamma(p) => {
                format!("abg({},{},{})", p.alpha, p.beta, p.gamma)
            }
            DerivationKind::Center => "center".into(),
        }
    }
}

// The three bilinear building blocks of every identity, instantiated on a
// generator pair (g, h) with outer variable lam and inner variable mu:
//   ActOnBracket : map applied to [e_g mu e_h], coefficients shifted by lam
//   ActOnLeft    : [(map e_g) lam+mu e_h]
//   ActOnRight   : [e_g mu (map e_h)]
//   ActOnLeftMu  : [(map e_g) mu e_h] (unshifted variant)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermRole {
    ActOnBracket,
    ActOnLeft,
    ActOnRight,
    ActOnLeftMu,
}

// (slot, role, scalar coefficient, equation block)
fn kind_terms(kind: &DerivationKind) -> Vec<(usize, TermRole, Rational, usize)> {
    use DerivationKind::*;
    use TermRole::*;
    let one = Rational::one;
    match kind {
        Conformal => vec![
            (0, ActOnBracket, one(), 0),
            (0, ActOnLeft, -one(), 0),
            (0, ActOnRight, -one(), 0),
        ],
        Quasi => vec![
            (0, ActOnLeft, one(), 0),
            (0, ActOnRight, one(), 0),
            (1, ActOnBracket, -one(), 0),
        ],
        Generalized => vec![
            (0, ActOnLeft, one(), 0),
            (1, ActOnRight, one(), 0),
            (2, ActOnBracket, -one(), 0),
        ],
        Centroid => vec![
            (0, ActOnBracket, one(), 0),
            (0, ActOnLeft, -one(), 0),
            (0, ActOnBracket, one(), 1),
            (0, ActOnRight, -one(), 1),
        ],
        Quasicentroid => vec![(0, ActOnLeft, one(), 0), (0, ActOnRight, -one(), 0)],
        Central => vec![(0, ActOnLeftMu, one(), 0), (0, ActOnBracket, one(), 1)],
        AlphaBetaGamma(p) => vec![
            (0, ActOnBracket, p.alpha.clone(), 0),
            (0, ActOnLeft, -p.beta.clone(), 0),
            (0, ActOnRight, -p.gamma.clone(), 0),
        ],
        Center => panic!("center residuals live in element space"),
    }
}

fn blocks_of(kind: &DerivationKind) -> usize {
    match kind {
        DerivationKind::Centroid | DerivationKind::Central => 2,
        _ => 1,
    }
}

// Structure table under the substitutions each term role needs.
struct ShiftedTables {
    // P[i][j][k](del + lam, mu)
    on_bracket: Vec<Vec<Vec<Poly>>>,
    // P[i][j][k](del, lam + mu)
    on_left: Vec<Vec<Vec<Poly>>>,
    // P[i][j][k](del, mu)
    on_mu: Vec<Vec<Vec<Poly>>>,
}

impl ShiftedTables {
    fn new(alg: &LCAlgebra) -> ShiftedTables {
        let n = alg.rank();
        let del_lam = &Poly::var(Var::Del) + &Poly::var(Var::Lam);
        let mu = Poly::var(Var::Mu);
        let lam_mu = &Poly::var(Var::Lam) + &mu;
        let map3 = |f: &dyn Fn(&Poly) -> Poly| -> Vec<Vec<Vec<Poly>>> {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| alg.structure(i, j).iter().map(f).collect())
                        .collect()
                })
                .collect()
        };
        ShiftedTables {
            on_bracket: map3(&|p| {
                p.substitute(&[(Var::Del, del_lam.clone()), (Var::Lam, mu.clone())])
            }),
            on_left: map3(&|p| p.substitute1(Var::Lam, &lam_mu)),
            on_mu: map3(&|p| p.substitute1(Var::Lam, &mu)),
        }
    }
}

/// Residual of an identity on all generator pairs: one entry per
/// equation block, then per pair `(g, h)` in lexicographic order, then
/// per coordinate. Identically zero exactly when the tuple satisfies the
/// identity.
#[derive(Debug, Clone)]
pub struct Residual {
    pub blocks: Vec<Vec<((usize, usize), Vec<Poly>)>>,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.blocks
            .iter()
            .flatten()
            .all(|(_, coords)| coords.iter().all(|p| p.is_zero()))
    }
}

fn shifted_map(map: &ConformalMap, image: &Poly) -> Vec<Vec<Poly>> {
    map.entries()
        .iter()
        .map(|r| r.iter().map(|p| p.substitute1(Var::Del, image)).collect())
        .collect()
}

/// Residual of the identity `kind` for a concrete tuple of maps.
pub fn residual(
    kind: &DerivationKind,
    maps: &[ConformalMap],
    alg: &LCAlgebra,
) -> Result<Residual, SolverError> {
    if matches!(kind, DerivationKind::Center) {
        return Err(SolverError::NotAnElementSpace);
    }
    let arity = kind.arity();
    if maps.len() != arity {
        return Err(SolverError::ArityMismatch { expected: arity, got: maps.len() });
    }
    for m in maps {
        if m.algebra_id() != alg.id() {
            return Err(LcaError::AlgebraMismatch.into());
        }
    }
    let n = alg.rank();
    let tables = ShiftedTables::new(alg);
    let neg_lam_mu = -&(&Poly::var(Var::Lam) + &Poly::var(Var::Mu));
    let del_mu = &Poly::var(Var::Del) + &Poly::var(Var::Mu);
    let neg_mu = -Poly::var(Var::Mu);

    let nblocks = blocks_of(kind);
    let mut blocks =
        vec![
            (0..n * n)
                .map(|p| ((p / n, p % n), vec![Poly::zero(); n]))
                .collect::<Vec<_>>();
            nblocks
        ];
    for (slot, role, coeff, block) in kind_terms(kind) {
        let map = &maps[slot];
        let contribution: Vec<Vec<Vec<Poly>>> = match role {
            TermRole::ActOnBracket => {
                let x = map.entries();
                (0..n)
                    .map(|g| {
                        (0..n)
                            .map(|h| {
                                (0..n)
                                    .map(|m| {
                                        let mut acc = Poly::zero();
                                        for k in 0..n {
                                            acc = &acc
                                                + &(&tables.on_bracket[g][h][k] * &x[m][k]);
                                        }
                                        acc
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            }
            TermRole::ActOnLeft => {
                let x = shifted_map(map, &neg_lam_mu);
                (0..n)
                    .map(|g| {
                        (0..n)
                            .map(|h| {
                                (0..n)
                                    .map(|m| {
                                        let mut acc = Poly::zero();
                                        for k in 0..n {
                                            acc = &acc + &(&x[k][g] * &tables.on_left[k][h][m]);
                                        }
                                        acc
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            }
            TermRole::ActOnRight => {
                let x = shifted_map(map, &del_mu);
                (0..n)
                    .map(|g| {
                        (0..n)
                            .map(|h| {
                                (0..n)
                                    .map(|m| {
                                        let mut acc = Poly::zero();
                                        for k in 0..n {
                                            acc = &acc + &(&x[k][h] * &tables.on_mu[g][k][m]);
                                        }
                                        acc
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            }
            TermRole::ActOnLeftMu => {
                let x = shifted_map(map, &neg_mu);
                (0..n)
                    .map(|g| {
                        (0..n)
                            .map(|h| {
                                (0..n)
                                    .map(|m| {
                                        let mut acc = Poly::zero();
                                        for k in 0..n {
                                            acc = &acc + &(&x[k][g] * &tables.on_mu[k][h][m]);
                                        }
                                        acc
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        for g in 0..n {
            for h in 0..n {
                let slotvec = &mut blocks[block][g * n + h].1;
                for m in 0..n {
                    if !contribution[g][h][m].is_zero() {
                        slotvec[m] = &slotvec[m] + &contribution[g][h][m].scale(&coeff);
                    }
                }
            }
        }
    }
    Ok(Residual { blocks })
}

/// Residual of the center condition `[a lam e_j] = 0` for every
/// generator; one coordinate vector per right-hand generator.
pub fn center_residual(a: &Element, alg: &LCAlgebra) -> Result<Vec<Vec<Poly>>, SolverError> {
    (0..alg.rank())
        .map(|j| Ok(alg.bracket_eval(a, &alg.generator(j))?))
        .collect()
}

/// Shape of the coefficient vectors a space is canonicalized over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceLayout {
    Maps { n: usize, arity: usize, bounds: DegreeBound },
    Elements { n: usize, max_del: u16 },
}

impl SpaceLayout {
    fn monomials(&self) -> Vec<Monomial> {
        let mut monos = Vec::new();
        match self {
            SpaceLayout::Maps { bounds, .. } => {
                for p in 0..=bounds.max_del {
                    for q in 0..=bounds.max_lam {
                        monos.push(
                            Monomial::var_pow(Var::Del, p).mul(&Monomial::var_pow(Var::Lam, q)),
                        );
                    }
                }
            }
            SpaceLayout::Elements { max_del, .. } => {
                for p in 0..=*max_del {
                    monos.push(Monomial::var_pow(Var::Del, p));
                }
            }
        }
        monos.sort_by(|a, b| b.cmp(a));
        monos
    }

    pub fn ncols(&self) -> usize {
        match self {
            SpaceLayout::Maps { n, arity, bounds } => {
                arity
                    * n
                    * n
                    * (bounds.max_del as usize + 1)
                    * (bounds.max_lam as usize + 1)
            }
            SpaceLayout::Elements { n, max_del } => n * (*max_del as usize + 1),
        }
    }
}

/// A finite-dimensional solution space in canonical reduced form.
///
/// The canonical matrix is the unique reduced row echelon basis over the
/// deterministic column order (tuple slot, matrix entry row-major,
/// monomial in descending graded-lex order), so two spaces are equal as
/// sets exactly when their canonical matrices are equal.
#[derive(Debug, Clone)]
pub struct SolutionSpace {
    label: String,
    algebra: AlgebraId,
    layout: SpaceLayout,
    canonical: Vec<Vec<Rational>>,
}

impl SolutionSpace {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn layout(&self) -> SpaceLayout {
        self.layout
    }

    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn dimension(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_zero_space(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn canonical_rows(&self) -> &[Vec<Rational>] {
        &self.canonical
    }

    /// Set equality: same layout, same algebra, same canonical matrix.
    pub fn same_space(&self, other: &SolutionSpace) -> bool {
        self.algebra == other.algebra
            && self.layout == other.layout
            && self.canonical == other.canonical
    }

    fn mono_index(&self) -> BTreeMap<Monomial, usize> {
        self.layout
            .monomials()
            .into_iter()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect()
    }

    fn vectorize_tuple(&self, maps: &[ConformalMap]) -> Result<Option<Vec<Rational>>, SolverError> {
        let SpaceLayout::Maps { n, arity, .. } = self.layout else {
            return Err(SolverError::NotAMapSpace);
        };
        if maps.len() != arity {
            return Err(SolverError::ArityMismatch { expected: arity, got: maps.len() });
        }
        for m in maps {
            if m.algebra_id() != self.algebra {
                return Err(LcaError::AlgebraMismatch.into());
            }
            if m.rank() != n {
                return Err(SolverError::SpaceMismatch);
            }
        }
        let index = self.mono_index();
        let width = index.len();
        let mut row = vec![Rational::zero(); self.layout.ncols()];
        for (slot, map) in maps.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    for (mono, coeff) in map.entries()[i][j].terms() {
                        let Some(&mi) = index.get(mono) else {
                            return Ok(None);
                        };
                        row[((slot * n + i) * n + j) * width + mi] = coeff.clone();
                    }
                }
            }
        }
        Ok(Some(row))
    }

    fn vectorize_element(&self, e: &Element) -> Result<Option<Vec<Rational>>, SolverError> {
        let SpaceLayout::Elements { n, .. } = self.layout else {
            return Err(SolverError::NotAnElementSpace);
        };
        if e.algebra_id() != self.algebra {
            return Err(LcaError::AlgebraMismatch.into());
        }
        if e.coords().len() != n {
            return Err(SolverError::SpaceMismatch);
        }
        let index = self.mono_index();
        let width = index.len();
        let mut row = vec![Rational::zero(); self.layout.ncols()];
        for (j, p) in e.coords().iter().enumerate() {
            for (mono, coeff) in p.terms() {
                let Some(&mi) = index.get(mono) else {
                    return Ok(None);
                };
                row[j * width + mi] = coeff.clone();
            }
        }
        Ok(Some(row))
    }

    fn tuple_from_row(&self, row: &[Rational]) -> Vec<ConformalMap> {
        let SpaceLayout::Maps { n, arity, .. } = self.layout else {
            unreachable!("tuple_from_row on an element space");
        };
        let monos = self.layout.monomials();
        let width = monos.len();
        (0..arity)
            .map(|slot| {
                let mut entries = vec![vec![Poly::zero(); n]; n];
                for i in 0..n {
                    for j in 0..n {
                        let base = ((slot * n + i) * n + j) * width;
                        let mut p = Poly::zero();
                        for (mi, mono) in monos.iter().enumerate() {
                            let c = &row[base + mi];
                            if !c.is_zero() {
                                p = &p + &Poly::term(*mono, c.clone());
                            }
                        }
                        entries[i][j] = p;
                    }
                }
                ConformalMap::from_entries_unchecked(self.algebra, entries)
            })
            .collect()
    }

    fn element_from_row(&self, row: &[Rational]) -> Element {
        let SpaceLayout::Elements { n, .. } = self.layout else {
            unreachable!("element_from_row on a map space");
        };
        let monos = self.layout.monomials();
        let width = monos.len();
        let coords = (0..n)
            .map(|j| {
                let mut p = Poly::zero();
                for (mi, mono) in monos.iter().enumerate() {
                    let c = &row[j * width + mi];
                    if !c.is_zero() {
                        p = &p + &Poly::term(*mono, c.clone());
                    }
                }
                p
            })
            .collect();
        Element::from_parts(self.algebra, coords)
    }

    /// Canonical basis as map tuples (map-layout spaces).
    pub fn basis_tuples(&self) -> Result<Vec<Vec<ConformalMap>>, SolverError> {
        match self.layout {
            SpaceLayout::Maps { .. } => {
                Ok(self.canonical.iter().map(|r| self.tuple_from_row(r)).collect())
            }
            SpaceLayout::Elements { .. } => Err(SolverError::NotAMapSpace),
        }
    }

    /// Canonical basis as elements (element-layout spaces).
    pub fn basis_elements(&self) -> Result<Vec<Element>, SolverError> {
        match self.layout {
            SpaceLayout::Elements { .. } => {
                Ok(self.canonical.iter().map(|r| self.element_from_row(r)).collect())
            }
            SpaceLayout::Maps { .. } => Err(SolverError::NotAnElementSpace),
        }
    }

    /// Membership of a map tuple; tuples whose entries do not fit the
    /// bounds cannot lie in the space.
    pub fn contains_tuple(&self, maps: &[ConformalMap]) -> Result<bool, SolverError> {
        let Some(row) = self.vectorize_tuple(maps)? else {
            return Ok(false);
        };
        let mut rr = Rref::new(self.layout.ncols());
        for r in &self.canonical {
            rr.add_row(r);
        }
        Ok(rr.contains(&row))
    }

    pub fn contains_element(&self, e: &Element) -> Result<bool, SolverError> {
        let Some(row) = self.vectorize_element(e)? else {
            return Ok(false);
        };
        let mut rr = Rref::new(self.layout.ncols());
        for r in &self.canonical {
            rr.add_row(r);
        }
        Ok(rr.contains(&row))
    }

    fn check_compatible(&self, other: &SolutionSpace) -> Result<(), SolverError> {
        if self.algebra != other.algebra || self.layout != other.layout {
            return Err(SolverError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn intersect(&self, other: &SolutionSpace) -> Result<SolutionSpace, SolverError> {
        self.check_compatible(other)?;
        let canonical =
            intersect_rowspaces(&self.canonical, &other.canonical, self.layout.ncols());
        Ok(SolutionSpace {
            label: format!("intersect({},{})", self.label, other.label),
            algebra: self.algebra,
            layout: self.layout,
            canonical,
        })
    }

    pub fn sum(&self, other: &SolutionSpace) -> Result<SolutionSpace, SolverError> {
        self.check_compatible(other)?;
        let rows = self
            .canonical
            .iter()
            .chain(other.canonical.iter())
            .cloned()
            .collect::<Vec<_>>();
        Ok(SolutionSpace {
            label: format!("sum({},{})", self.label, other.label),
            algebra: self.algebra,
            layout: self.layout,
            canonical: rref_rows(rows, self.layout.ncols()),
        })
    }

    /// Projection of a tuple space onto one slot, re-canonicalized as an
    /// arity-one space at the same bounds.
    pub fn project(&self, slot: usize) -> Result<SolutionSpace, SolverError> {
        let SpaceLayout::Maps { n, arity, bounds } = self.layout else {
            return Err(SolverError::NotAMapSpace);
        };
        if slot >= arity {
            return Err(SolverError::BadSlot { slot, arity });
        }
        let width = self.layout.monomials().len();
        let per_slot = n * n * width;
        let rows: Vec<Vec<Rational>> = self
            .canonical
            .iter()
            .map(|r| r[slot * per_slot..(slot + 1) * per_slot].to_vec())
            .collect();
        Ok(SolutionSpace {
            label: format!("project{}({})", slot, self.label),
            algebra: self.algebra,
            layout: SpaceLayout::Maps { n, arity: 1, bounds },
            canonical: rref_rows(rows, per_slot),
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct SlotKey {
    block: usize,
    left: usize,
    right: usize,
    coord: usize,
}

// One ansatz unit's residual contribution: (column, equation slot, polynomial).
type Contribution = (usize, SlotKey, Poly);

fn map_unit_contributions(
    kind: &DerivationKind,
    alg: &LCAlgebra,
    bounds: DegreeBound,
) -> (Vec<Contribution>, usize) {
    let n = alg.rank();
    let arity = kind.arity();
    let layout = SpaceLayout::Maps { n, arity, bounds };
    let monos = layout.monomials();
    let width = monos.len();
    let ncols = layout.ncols();
    let tables = ShiftedTables::new(alg);

    let d = bounds.max_del as usize;
    let neg_lam_mu = -&(&Poly::var(Var::Lam) + &Poly::var(Var::Mu));
    let del_mu = &Poly::var(Var::Del) + &Poly::var(Var::Mu);
    let neg_mu = -Poly::var(Var::Mu);
    let pow_list = |base: &Poly| -> Vec<Poly> {
        let mut v = Vec::with_capacity(d + 1);
        v.push(Poly::one());
        for _ in 0..d {
            let next = &v[v.len() - 1] * base;
            v.push(next);
        }
        v
    };
    let neg_lam_mu_pows = pow_list(&neg_lam_mu);
    let del_mu_pows = pow_list(&del_mu);
    let neg_mu_pows = pow_list(&neg_mu);

    let mut out: Vec<Contribution> = Vec::new();
    for (slot, role, coeff, block) in kind_terms(kind) {
        for i in 0..n {
            for j in 0..n {
                for (mi, mono) in monos.iter().enumerate() {
                    let col = ((slot * n + i) * n + j) * width + mi;
                    let p = mono.exponent(Var::Del);
                    let q = mono.exponent(Var::Lam);
                    let lam_part = Poly::term(Monomial::var_pow(Var::Lam, q), coeff.clone());
                    match role {
                        TermRole::ActOnBracket => {
                            let unit = Poly::term(*mono, coeff.clone());
                            for g in 0..n {
                                for h in 0..n {
                                    let s = &tables.on_bracket[g][h][j];
                                    if s.is_zero() {
                                        continue;
                                    }
                                    out.push((
                                        col,
                                        SlotKey { block, left: g, right: h, coord: i },
                                        s * &unit,
                                    ));
                                }
                            }
                        }
                        TermRole::ActOnLeft => {
                            let shifted = &neg_lam_mu_pows[p as usize] * &lam_part;
                            for h in 0..n {
                                for m in 0..n {
                                    let s = &tables.on_left[i][h][m];
                                    if s.is_zero() {
                                        continue;
                                    }
                                    out.push((
                                        col,
                                        SlotKey { block, left: j, right: h, coord: m },
                                        s * &shifted,
                                    ));
                                }
                            }
                        }
                        TermRole::ActOnRight => {
                            let shifted = &del_mu_pows[p as usize] * &lam_part;
                            for g in 0..n {
                                for m in 0..n {
                                    let s = &tables.on_mu[g][i][m];
                                    if s.is_zero() {
                                        continue;
                                    }
                                    out.push((
                                        col,
                                        SlotKey { block, left: g, right: j, coord: m },
                                        s * &shifted,
                                    ));
                                }
                            }
                        }
                        TermRole::ActOnLeftMu => {
                            let shifted = &neg_mu_pows[p as usize] * &lam_part;
                            for h in 0..n {
                                for m in 0..n {
                                    let s = &tables.on_mu[i][h][m];
                                    if s.is_zero() {
                                        continue;
                                    }
                                    out.push((
                                        col,
                                        SlotKey { block, left: j, right: h, coord: m },
                                        s * &shifted,
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (out, ncols)
}

fn center_unit_contributions(alg: &LCAlgebra, max_del: u16) -> (Vec<Contribution>, usize) {
    let n = alg.rank();
    let layout = SpaceLayout::Elements { n, max_del };
    let monos = layout.monomials();
    let width = monos.len();
    let neg_lam = -Poly::var(Var::Lam);
    let mut neg_lam_pows = vec![Poly::one()];
    for _ in 0..max_del {
        let next = &neg_lam_pows[neg_lam_pows.len() - 1] * &neg_lam;
        neg_lam_pows.push(next);
    }
    let mut out = Vec::new();
    for j in 0..n {
        for (mi, mono) in monos.iter().enumerate() {
            let col = j * width + mi;
            let p = mono.exponent(Var::Del) as usize;
            for h in 0..n {
                for m in 0..n {
                    let s = &alg.structure(j, h)[m];
                    if s.is_zero() {
                        continue;
                    }
                    out.push((
                        col,
                        SlotKey { block: 0, left: h, right: 0, coord: m },
                        s * &neg_lam_pows[p],
                    ));
                }
            }
        }
    }
    (out, layout.ncols())
}

fn kernel_from_contributions(contributions: &[Contribution], ncols: usize) -> Vec<Vec<Rational>> {
    let mut rows: BTreeMap<(SlotKey, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    for (col, key, poly) in contributions {
        for (mono, c) in poly.terms() {
            rows.entry((*key, *mono)).or_default().push((*col, c.clone()));
        }
    }
    let dense = rows.values().map(|sparse| {
        let mut row = vec![Rational::zero(); ncols];
        for (col, c) in sparse {
            row[*col] += c;
        }
        row
    });
    kernel_basis(dense, ncols)
}

/// Exact kernel of the identity `kind` within the ansatz bounds, in
/// canonical form. Every returned basis tuple is re-checked to have
/// identically zero residual.
pub fn solve_space(
    kind: &DerivationKind,
    alg: &LCAlgebra,
    bounds: DegreeBound,
) -> SolutionSpace {
    let space = match kind {
        DerivationKind::Center => {
            let (contributions, ncols) = center_unit_contributions(alg, bounds.max_del);
            let canonical = kernel_from_contributions(&contributions, ncols);
            SolutionSpace {
                label: kind.label(),
                algebra: alg.id(),
                layout: SpaceLayout::Elements { n: alg.rank(), max_del: bounds.max_del },
                canonical,
            }
        }
        _ => {
            let (contributions, ncols) = map_unit_contributions(kind, alg, bounds);
            let canonical = kernel_from_contributions(&contributions, ncols);
            SolutionSpace {
                label: kind.label(),
                algebra: alg.id(),
                layout: SpaceLayout::Maps { n: alg.rank(), arity: kind.arity(), bounds },
                canonical,
            }
        }
    };
    // the linear algebra is not trusted: re-check each basis vector symbolically
    match kind {
        DerivationKind::Center => {
            for e in space.basis_elements().expect("element layout") {
                let res = center_residual(&e, alg).expect("basis element belongs to algebra");
                assert!(
                    res.iter().flatten().all(|p| p.is_zero()),
                    "internal error: center basis element has nonzero residual"
                );
            }
        }
        _ => {
            for tuple in space.basis_tuples().expect("map layout") {
                let res = residual(kind, &tuple, alg).expect("basis tuple matches kind");
                assert!(
                    res.is_zero(),
                    "internal error: {} basis tuple has nonzero residual",
                    kind.label()
                );
            }
        }
    }
    space
}

/// The span of `lam^s * ad(e_i)` within the bounds: the inner derivation
/// space realized over ℚ, since `del` acts on adjoints as `-lam`.
pub fn cinn_span(alg: &LCAlgebra, bounds: DegreeBound) -> SolutionSpace {
    let n = alg.rank();
    let layout = SpaceLayout::Maps { n, arity: 1, bounds };
    let template = SolutionSpace {
        label: "cinn".into(),
        algebra: alg.id(),
        layout,
        canonical: Vec::new(),
    };
    let lam = Poly::var(Var::Lam);
    let mut rows = Vec::new();
    for i in 0..n {
        let ad = alg.adjoint(&alg.generator(i)).expect("generator adjoint");
        let mut scaled = ad;
        for _s in 0..=bounds.max_lam {
            if let Ok(Some(row)) = template.vectorize_tuple(std::slice::from_ref(&scaled)) {
                rows.push(row);
            }
            scaled = scaled.scale_poly(&lam);
        }
    }
    SolutionSpace {
        canonical: rref_rows(rows, layout.ncols()),
        ..template
    }
}

/// Canonical span of explicitly given maps, as an arity-one space.
pub fn span_of_maps(
    label: &str,
    alg: &LCAlgebra,
    bounds: DegreeBound,
    maps: &[ConformalMap],
) -> Result<SolutionSpace, SolverError> {
    let layout = SpaceLayout::Maps { n: alg.rank(), arity: 1, bounds };
    let template = SolutionSpace {
        label: label.to_string(),
        algebra: alg.id(),
        layout,
        canonical: Vec::new(),
    };
    let mut rows = Vec::new();
    for m in maps {
        let row = template
            .vectorize_tuple(std::slice::from_ref(m))?
            .ok_or(SolverError::BoundsExceeded)?;
        rows.push(row);
    }
    Ok(SolutionSpace {
        canonical: rref_rows(rows, layout.ncols()),
        ..template
    })
}

/// Embeds a quasiderivation pair `(d, d_bracket)` of `alg` as a
/// conformal endomorphism of the truncated extension: the `t`-block
/// carries `d`, the derived-submodule part of the `t^2`-block carries
/// `d_bracket`, and the complement part of the `t^2`-block maps to zero.
/// Requires the derived submodule to admit a free complement.
pub fn quasi_embed(
    alg: &LCAlgebra,
    d: &ConformalMap,
    d_bracket: &ConformalMap,
) -> Result<ConformalMap, SolverError> {
    if d.algebra_id() != alg.id() || d_bracket.algebra_id() != alg.id() {
        return Err(LcaError::AlgebraMismatch.into());
    }
    let n = alg.rank();
    let derived = alg.derived_subalgebra();
    let smith = alg.smith_data(&derived);
    if let Some(bad) = smith.diag.iter().find(|f| !f.is_one()) {
        return Err(SolverError::NoFreeComplement { factor: bad.to_string() });
    }
    let ext = alg.truncated_extension();
    let mut entries = vec![vec![Poly::zero(); 2 * n]; 2 * n];
    for j in 0..n {
        for i in 0..n {
            entries[i][j] = d.entries()[i][j].clone();
        }
    }
    for j in 0..n {
        // derived-part of e_j in the split basis: sum over the first
        // `rank` basis rows with the tracked coordinates
        let mut coords = vec![Poly::zero(); n];
        for k in 0..smith.rank {
            if smith.v[j][k].is_zero() {
                continue;
            }
            for c in 0..n {
                coords[c] = &coords[c] + &(&smith.v[j][k] * &smith.w[k][c]);
            }
        }
        let part = Element::from_parts(alg.id(), coords);
        let img = d_bracket.apply(alg, &part)?;
        for i in 0..n {
            entries[n + i][n + j] = img[i].clone();
        }
    }
    Ok(ConformalMap::from_entries_unchecked(ext.id(), entries))
}

/// Rebuilds the linear system of `solve_space` by evaluating residual
/// columns on a deterministic rational grid that is faithful at the
/// residual's per-variable degrees, and compares canonical kernels.
pub fn oracle_check(kind: &DerivationKind, alg: &LCAlgebra, bounds: DegreeBound) -> bool {
    let (contributions, ncols) = match kind {
        DerivationKind::Center => center_unit_contributions(alg, bounds.max_del),
        _ => map_unit_contributions(kind, alg, bounds),
    };
    // regroup: per equation slot, a dense vector of column polynomials
    let mut groups: BTreeMap<SlotKey, Vec<Poly>> = BTreeMap::new();
    for (col, key, poly) in &contributions {
        let cols = groups.entry(*key).or_insert_with(|| vec![Poly::zero(); ncols]);
        cols[*col] = &cols[*col] + poly;
    }
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for cols in groups.values() {
        let mut dmax = [0u16; 3];
        for p in cols {
            let d = p.degrees();
            dmax[0] = dmax[0].max(d[Var::Del as usize]);
            dmax[1] = dmax[1].max(d[Var::Lam as usize]);
            dmax[2] = dmax[2].max(d[Var::Mu as usize]);
        }
        for i in 0..=dmax[0] {
            for j in 0..=dmax[1] {
                for k in 0..=dmax[2] {
                    let point: BTreeMap<Var, Rational> = [
                        (Var::Del, rat_int(2 + i as i64)),
                        (Var::Lam, rat_int(3 + j as i64)),
                        (Var::Mu, rat_int(5 + k as i64)),
                    ]
                    .into();
                    let row = cols
                        .iter()
                        .map(|p| p.evaluate(&point).expect("residuals use del, lam, mu only"))
                        .collect();
                    rows.push(row);
                }
            }
        }
    }
    let grid_kernel = kernel_basis(rows, ncols);
    let symbolic = solve_space(kind, alg, bounds);
    grid_kernel == symbolic.canonical
}

/// Submodule of elements (with coordinate degrees up to `max_del`)
/// annihilated by the map.
pub fn map_kernel_submodule(
    alg: &LCAlgebra,
    map: &ConformalMap,
    max_del: u16,
) -> Result<Submodule, SolverError> {
    if map.algebra_id() != alg.id() {
        return Err(LcaError::AlgebraMismatch.into());
    }
    let n = alg.rank();
    let layout = SpaceLayout::Elements { n, max_del };
    let monos = layout.monomials();
    let width = monos.len();
    let shift = &Poly::var(Var::Del) + &Poly::var(Var::Lam);
    let mut rows: BTreeMap<(usize, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    for j in 0..n {
        for (mi, mono) in monos.iter().enumerate() {
            let col = j * width + mi;
            let q = Poly::term(*mono, Rational::one()).substitute1(Var::Del, &shift);
            for i in 0..n {
                let img = &q * &map.entries()[i][j];
                for (m, c) in img.terms() {
                    rows.entry((i, *m)).or_default().push((col, c.clone()));
                }
            }
        }
    }
    let dense = rows.values().map(|sparse| {
        let mut row = vec![Rational::zero(); layout.ncols()];
        for (col, c) in sparse {
            row[*col] += c;
        }
        row
    });
    let kernel = kernel_basis(dense, layout.ncols());
    let template = SolutionSpace {
        label: "ker".into(),
        algebra: alg.id(),
        layout,
        canonical: Vec::new(),
    };
    let gens = kernel
        .iter()
        .map(|row| template.element_from_row(row).coords().to_vec())
        .collect();
    Ok(Submodule::from_generators(alg, gens)?)
}

/// Submodule generated by all `lam`-coefficients of generator images.
pub fn map_image_submodule(alg: &LCAlgebra, map: &ConformalMap) -> Result<Submodule, SolverError> {
    if map.algebra_id() != alg.id() {
        return Err(LcaError::AlgebraMismatch.into());
    }
    let n = alg.rank();
    let mut gens = Vec::new();
    for j in 0..n {
        let max_q = (0..n)
            .filter_map(|i| map.entries()[i][j].degree(Var::Lam))
            .max()
            .unwrap_or(0);
        for q in 0..=max_q {
            let coords: Vec<Poly> = (0..n)
                .map(|i| map.entries()[i][j].coefficient_of(Var::Lam, q))
                .collect();
            if coords.iter().any(|p| !p.is_zero()) {
                gens.push(coords);
            }
        }
    }
    Ok(Submodule::from_generators(alg, gens)?)
}
