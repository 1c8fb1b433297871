//! Conformal endomorphisms of a finite free module and their bracket.
//!
//! A [`ConformalMap`] is an `n x n` matrix over ℚ[del, lam] acting by
//! `phi(e_j) = Σ_i entries[i][j](del, lam) e_i`, with the shift rule
//! `phi(del a) = (del + lam) phi(a)`. [`ConformalMap2`] carries a second
//! formal parameter: `lam` is the outer bracket variable and `mu` is the
//! map's own slot. Renaming `mu` back to `lam` is always explicit.

use crate::lca::{AlgebraId, Element, LCAlgebra, LcaError};
use crate::poly::{Poly, Rational, Var};

/// One-parameter conformal endomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalMap {
    algebra: AlgebraId,
    entries: Vec<Vec<Poly>>,
}

/// Two-parameter object produced by the bracket of two conformal maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConformalMap2 {
    algebra: AlgebraId,
    entries: Vec<Vec<Poly>>,
}

impl ConformalMap {
    pub fn new(alg: &LCAlgebra, entries: Vec<Vec<Poly>>) -> Result<ConformalMap, LcaError> {
        let n = alg.rank();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(LcaError::BadWidth { expected: n, got: entries.len() });
        }
        for row in &entries {
            for p in row {
                if !p.uses_only(&[Var::Del, Var::Lam]) {
                    return Err(LcaError::BadTableVariables);
                }
            }
        }
        Ok(ConformalMap { algebra: alg.id(), entries })
    }

    pub(crate) fn from_entries_unchecked(algebra: AlgebraId, entries: Vec<Vec<Poly>>) -> ConformalMap {
        ConformalMap { algebra, entries }
    }

    pub fn zero(alg: &LCAlgebra) -> ConformalMap {
        let n = alg.rank();
        ConformalMap {
            algebra: alg.id(),
            entries: vec![vec![Poly::zero(); n]; n],
        }
    }

    pub fn identity(alg: &LCAlgebra) -> ConformalMap {
        let n = alg.rank();
        let mut m = ConformalMap::zero(alg);
        for i in 0..n {
            m.entries[i][i] = Poly::one();
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    pub fn add(&self, other: &ConformalMap) -> Result<ConformalMap, LcaError> {
        if self.algebra != other.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        Ok(ConformalMap {
            algebra: self.algebra,
            entries: zip_entries(&self.entries, &other.entries, |a, b| a + b),
        })
    }

    pub fn sub(&self, other: &ConformalMap) -> Result<ConformalMap, LcaError> {
        if self.algebra != other.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        Ok(ConformalMap {
            algebra: self.algebra,
            entries: zip_entries(&self.entries, &other.entries, |a, b| a - b),
        })
    }

    pub fn scale(&self, c: &Rational) -> ConformalMap {
        ConformalMap {
            algebra: self.algebra,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|p| p.scale(c)).collect())
                .collect(),
        }
    }

    /// Multiplies every entry by a polynomial in `(del, lam)`.
    pub fn scale_poly(&self, p: &Poly) -> ConformalMap {
        ConformalMap {
            algebra: self.algebra,
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|e| e * p).collect())
                .collect(),
        }
    }

    /// `phi(a)` for `a = Σ q_j(del) e_j`: coordinate `i` is
    /// `Σ_j q_j(del + lam) entries[i][j]`.
    pub fn apply(&self, alg: &LCAlgebra, a: &Element) -> Result<Vec<Poly>, LcaError> {
        if self.algebra != alg.id() || a.algebra_id() != alg.id() {
            return Err(LcaError::AlgebraMismatch);
        }
        let n = self.rank();
        let shift = &Poly::var(Var::Del) + &Poly::var(Var::Lam);
        let mut out = vec![Poly::zero(); n];
        for (j, q) in a.coords().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let qs = q.substitute1(Var::Del, &shift);
            for i in 0..n {
                if !self.entries[i][j].is_zero() {
                    out[i] = &out[i] + &(&qs * &self.entries[i][j]);
                }
            }
        }
        Ok(out)
    }

    /// The module action of `del` on maps: every entry times `-lam`.
    pub fn module_action(&self) -> ConformalMap {
        let neg_lam = -Poly::var(Var::Lam);
        self.scale_poly(&neg_lam)
    }

    /// The bracket `[phi lam psi]_mu (a) = phi_lam(psi_{mu - lam} a) -
    /// psi_{mu - lam}(phi_lam a)`, returned with `lam` as the outer
    /// variable and `mu` as the slot of the resulting map.
    pub fn gc_bracket(&self, other: &ConformalMap) -> Result<ConformalMap2, LcaError> {
        if self.algebra != other.algebra {
            return Err(LcaError::AlgebraMismatch);
        }
        let n = self.rank();
        let del = Poly::var(Var::Del);
        let lam = Poly::var(Var::Lam);
        let mu = Poly::var(Var::Mu);
        let mu_minus_lam = &mu - &lam;
        let del_plus_lam = &del + &lam;
        let del_plus_mu_minus_lam = &del + &mu_minus_lam;

        // psi with its slot moved to mu - lam, coefficients shifted by lam
        let psi_inner: Vec<Vec<Poly>> = other
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|p| {
                        p.substitute(&[
                            (Var::Del, del_plus_lam.clone()),
                            (Var::Lam, mu_minus_lam.clone()),
                        ])
                    })
                    .collect()
            })
            .collect();
        // psi at slot mu - lam, unshifted (the outer map of the second term)
        let psi_outer: Vec<Vec<Poly>> = other
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.substitute1(Var::Lam, &mu_minus_lam)).collect())
            .collect();
        // phi with coefficients shifted by the slot of psi_outer
        let phi_inner: Vec<Vec<Poly>> = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|p| p.substitute1(Var::Del, &del_plus_mu_minus_lam))
                    .collect()
            })
            .collect();

        let mut entries = vec![vec![Poly::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Poly::zero();
                for k in 0..n {
                    if !self.entries[i][k].is_zero() && !psi_inner[k][j].is_zero() {
                        acc = &acc + &(&self.entries[i][k] * &psi_inner[k][j]);
                    }
                    if !psi_outer[i][k].is_zero() && !phi_inner[k][j].is_zero() {
                        acc = &acc - &(&psi_outer[i][k] * &phi_inner[k][j]);
                    }
                }
                entries[i][j] = acc;
            }
        }
        Ok(ConformalMap2 { algebra: self.algebra, entries })
    }
}

fn zip_entries(
    a: &[Vec<Poly>],
    b: &[Vec<Poly>],
    f: impl Fn(&Poly, &Poly) -> Poly,
) -> Vec<Vec<Poly>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f(x, y)).collect())
        .collect()
}

impl ConformalMap2 {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn algebra_id(&self) -> AlgebraId {
        self.algebra
    }

    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    /// Splits into `lam`-coefficient maps, each with `mu` renamed back to
    /// `lam`; index `k` holds the coefficient of `lam^k`. Summing
    /// `lam^k * maps[k]` (after renaming `lam` back to `mu`) reconstructs
    /// the object; the zero bracket gives an empty list.
    pub fn extract_lam_coeffs(&self) -> Vec<ConformalMap> {
        let max = self
            .entries
            .iter()
            .flatten()
            .filter_map(|p| p.degree(Var::Lam))
            .max();
        let Some(max) = max else { return Vec::new() };
        let lam = Poly::var(Var::Lam);
        (0..=max)
            .map(|k| {
                let entries = self
                    .entries
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|p| p.coefficient_of(Var::Lam, k).substitute1(Var::Mu, &lam))
                            .collect()
                    })
                    .collect();
                ConformalMap { algebra: self.algebra, entries }
            })
            .collect()
    }

    /// Binds the outer variable to `p` (a polynomial in `del`, `lam`,
    /// `mu`), then renames the slot `mu` to `lam`.
    pub fn bind_lam(&self, p: &Poly) -> Result<ConformalMap, LcaError> {
        if !p.uses_only(&[Var::Del, Var::Lam, Var::Mu]) {
            return Err(LcaError::BadTableVariables);
        }
        let lam = Poly::var(Var::Lam);
        let entries = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.substitute1(Var::Lam, p).substitute1(Var::Mu, &lam))
                    .collect()
            })
            .collect();
        Ok(ConformalMap { algebra: self.algebra, entries })
    }

    /// Substitutes the outer and slot variables without renaming;
    /// internal helper for identities with more parameters.
    pub fn substitute_params(&self, lam_image: &Poly, mu_image: &Poly) -> ConformalMap2 {
        let entries = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| {
                        e.substitute(&[
                            (Var::Lam, lam_image.clone()),
                            (Var::Mu, mu_image.clone()),
                        ])
                    })
                    .collect()
            })
            .collect();
        ConformalMap2 { algebra: self.algebra, entries }
    }
}

/// Residual of the Jacobi identity for the bracket of maps, with formal
/// variables `(lam, mu, nu)`; identically zero entries confirm that the
/// bracket equips the endomorphism module with a conformal algebra
/// structure. Built from `gc_bracket` outputs, not from raw compositions.
pub fn gc_jacobi_residual(
    phi: &ConformalMap,
    psi: &ConformalMap,
    chi: &ConformalMap,
) -> Result<Vec<Vec<Poly>>, LcaError> {
    if phi.algebra != psi.algebra || psi.algebra != chi.algebra {
        return Err(LcaError::AlgebraMismatch);
    }
    let n = phi.rank();
    let del = Poly::var(Var::Del);
    let lam = Poly::var(Var::Lam);
    let mu = Poly::var(Var::Mu);
    let nu = Poly::var(Var::Nu);

    // [phi lam [psi mu chi]]_nu
    let inner = psi.gc_bracket(chi)?;
    let b = inner.substitute_params(&mu, &(&nu - &lam));
    let shift_lam = &del + &lam;
    let shift_nu_lam = &del + &(&nu - &lam);
    let mut lhs = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Poly::zero();
            for k in 0..n {
                acc = &acc
                    + &(&phi.entries[i][k] * &b.entries[k][j].substitute1(Var::Del, &shift_lam));
                acc = &acc
                    - &(&b.entries[i][k]
                        * &phi.entries[k][j].substitute1(Var::Del, &shift_nu_lam));
            }
            lhs[i][j] = acc;
        }
    }

    // [[phi lam psi]_{lam+mu} chi]_nu
    let outer = phi.gc_bracket(psi)?;
    let a = outer.substitute_params(&lam, &(&lam + &mu));
    let chi_slot: Vec<Vec<Poly>> = chi
        .entries
        .iter()
        .map(|r| {
            r.iter()
                .map(|p| p.substitute1(Var::Lam, &(&nu - &(&lam + &mu))))
                .collect()
        })
        .collect();
    let shift_lam_mu = &del + &(&lam + &mu);
    let shift_rest = &del + &(&nu - &(&lam + &mu));
    let mut rhs1 = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Poly::zero();
            for k in 0..n {
                acc = &acc
                    + &(&a.entries[i][k] * &chi_slot[k][j].substitute1(Var::Del, &shift_lam_mu));
                acc = &acc
                    - &(&chi_slot[i][k] * &a.entries[k][j].substitute1(Var::Del, &shift_rest));
            }
            rhs1[i][j] = acc;
        }
    }

    // [psi mu [phi lam chi]]_nu
    let inner2 = phi.gc_bracket(chi)?;
    let c = inner2.substitute_params(&lam, &(&nu - &mu));
    let psi_mu: Vec<Vec<Poly>> = psi
        .entries
        .iter()
        .map(|r| r.iter().map(|p| p.substitute1(Var::Lam, &mu)).collect())
        .collect();
    let shift_mu = &del + &mu;
    let shift_nu_mu = &del + &(&nu - &mu);
    let mut rhs2 = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Poly::zero();
            for k in 0..n {
                acc = &acc + &(&psi_mu[i][k] * &c.entries[k][j].substitute1(Var::Del, &shift_mu));
                acc = &acc
                    - &(&c.entries[i][k] * &psi_mu[k][j].substitute1(Var::Del, &shift_nu_mu));
            }
            rhs2[i][j] = acc;
        }
    }

    let mut out = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = &(&lhs[i][j] - &rhs1[i][j]) - &rhs2[i][j];
        }
    }
    Ok(out)
}

/// The two-parameter map induced by taking the adjoint of a bracket
/// value: for `[a lam b] = Σ_k c_k(del, lam) e_k`, the bracket of the two
/// adjoints equals `Σ_k c_k(-mu, lam) ad(e_k)_mu`. Used as an oracle for
/// the homomorphism property of `ad`.
pub fn adjoint_of_bracket(
    alg: &LCAlgebra,
    a: &Element,
    b: &Element,
) -> Result<ConformalMap2, LcaError> {
    let bracket = alg.bracket_eval(a, b)?;
    let n = alg.rank();
    let neg_mu = -Poly::var(Var::Mu);
    let mu = Poly::var(Var::Mu);
    let mut entries = vec![vec![Poly::zero(); n]; n];
    for (k, c) in bracket.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let scalar = c.substitute1(Var::Del, &neg_mu);
        let ad_k = alg.adjoint(&alg.generator(k))?;
        for i in 0..n {
            for j in 0..n {
                let e = ad_k.entries()[i][j].substitute1(Var::Lam, &mu);
                if !e.is_zero() {
                    entries[i][j] = &entries[i][j] + &(&scalar * &e);
                }
            }
        }
    }
    Ok(ConformalMap2 { algebra: alg.id(), entries })
}
