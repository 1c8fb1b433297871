//! Exact sparse multivariate polynomials over the rationals.
//!
//! All coefficient data in this crate lives in a fixed, ordered variable
//! universe: `del < lam < mu < nu < t1 < t2`. `del` is the module
//! generator-shift variable, `lam`/`mu`/`nu` are the formal bracket
//! parameters, and `t1`/`t2` are spare variables for internal rewrites.
//! Terms are kept in a canonical graded-lexicographic order, zero
//! coefficients are pruned eagerly, and every operation is exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational scalar, always in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Small-integer rational constructor, handy in tests and fixtures.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A variable of the fixed universe, in canonical order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Del,
    Lam,
    Mu,
    Nu,
    T1,
    T2,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::Del, Var::Lam, Var::Mu, Var::Nu, Var::T1, Var::T2];

    pub fn name(self) -> &'static str {
        match self {
            Var::Del => "del",
            Var::Lam => "lam",
            Var::Mu => "mu",
            Var::Nu => "nu",
            Var::T1 => "t1",
            Var::T2 => "t2",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A power product of universe variables. Variables with exponent zero
/// are absent; the all-zero monomial is the constant `1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: [u16; 6],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; 6] };

    pub fn var(v: Var) -> Monomial {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u16) -> Monomial {
        let mut exps = [0; 6];
        exps[v.index()] = e;
        Monomial { exps }
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.exps[v.index()]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = [0; 6];
        for i in 0..6 {
            exps[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("monomial exponent overflow");
        }
        Monomial { exps }
    }

    /// Variables occurring with nonzero exponent, in universe order.
    pub fn vars(&self) -> impl Iterator<Item = (Var, u16)> + '_ {
        Var::ALL
            .iter()
            .copied()
            .filter(move |v| self.exps[v.index()] > 0)
            .map(move |v| (v, self.exps[v.index()]))
    }

    /// Splits into the sub-monomial supported on `vars` and the rest.
    pub fn split(&self, vars: &[Var]) -> (Monomial, Monomial) {
        let mut inside = [0; 6];
        let mut outside = self.exps;
        for &v in vars {
            inside[v.index()] = self.exps[v.index()];
            outside[v.index()] = 0;
        }
        (Monomial { exps: inside }, Monomial { exps: outside })
    }
}

/// Graded lexicographic order: total degree first, then exponent vectors
/// compared in universe order. This is the crate-wide canonical term order.
impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (v, e) in self.vars() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Raised when `evaluate` meets a variable missing from the point.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable {0} is not bound at the evaluation point")]
pub struct UnboundVar(pub Var);

/// Sparse polynomial: a map from monomials to nonzero rational
/// coefficients. Structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::term(Monomial::ONE, c)
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Poly {
        Poly::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms in descending canonical order (display/report order).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution of variables by polynomials. Variables
    /// not mentioned in `bindings` are left in place; every occurrence of
    /// a bound variable refers to the original polynomial, never to an
    /// already-substituted image.
    pub fn substitute(&self, bindings: &[(Var, Poly)]) -> Poly {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut bound: [Option<&Poly>; 6] = [None; 6];
        for (v, p) in bindings {
            bound[v.index()] = Some(p);
        }
        // memoized powers of each binding image
        let mut powers: [Vec<Poly>; 6] = Default::default();
        let mut result = Poly::zero();
        for (m, c) in &self.terms {
            let mut residue = Monomial::ONE;
            let mut factor = Poly::constant(c.clone());
            for (v, e) in m.vars() {
                match bound[v.index()] {
                    None => residue = residue.mul(&Monomial::var_pow(v, e)),
                    Some(image) => {
                        let cache = &mut powers[v.index()];
                        if cache.is_empty() {
                            cache.push(Poly::one());
                        }
                        while cache.len() <= e as usize {
                            let next = &cache[cache.len() - 1] * image;
                            cache.push(next);
                        }
                        factor = &factor * &cache[e as usize];
                    }
                }
            }
            result = &result + &factor.mul_monomial(&residue);
        }
        result
    }

    /// Substitution of a single variable.
    pub fn substitute1(&self, v: Var, image: &Poly) -> Poly {
        self.substitute(&[(v, image.clone())])
    }

    fn mul_monomial(&self, m: &Monomial) -> Poly {
        if m.is_one() {
            return self.clone();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    /// Regroups the polynomial by its monomials in `vars`; the value at a
    /// key is the cofactor polynomial in the remaining variables. Summing
    /// `key * value` over the result reconstructs the input exactly.
    pub fn coeff_extract(&self, vars: &[Var]) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(vars);
            out.entry(inside)
                .or_insert_with(Poly::zero)
                .add_term(outside, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Coefficient of `var^k` as a polynomial in the remaining variables.
    pub fn coefficient_of(&self, var: Var, k: u16) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.exponent(var) == k {
                let (_, rest) = m.split(&[var]);
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Maximum exponent of `var`, or `None` for the zero polynomial.
    pub fn degree(&self, var: Var) -> Option<u16> {
        self.terms.keys().map(|m| m.exponent(var)).max()
    }

    /// Per-variable degree vector (zero polynomial reports all zeros).
    pub fn degrees(&self) -> [u16; 6] {
        let mut d = [0; 6];
        for m in self.terms.keys() {
            for i in 0..6 {
                d[i] = d[i].max(m.exps[i]);
            }
        }
        d
    }

    /// Exact evaluation at a rational point binding every occurring variable.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational, UnboundVar> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut val = c.clone();
            for (v, e) in m.vars() {
                let x = point.get(&v).ok_or(UnboundVar(v))?;
                for _ in 0..e {
                    val *= x;
                }
            }
            acc += val;
        }
        Ok(acc)
    }

    /// The value of a constant polynomial, if it is one.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    /// True when only the given variables occur.
    pub fn uses_only(&self, vars: &[Var]) -> bool {
        self.terms
            .keys()
            .all(|m| m.vars().all(|(v, _)| vars.contains(&v)))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Renders in the CLI expression grammar: terms in descending canonical
/// order, `*` for products, `^` for powers, rationals as `p/q`. The
/// output reparses to the same polynomial; since a leading `-` binds
/// only the first atom, a leading term like `-del^2` is spelled
/// `-1*del^2`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms_desc().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            let leading = idx == 0;
            if leading {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                let powered_head = m.vars().next().is_some_and(|(_, e)| e >= 2);
                if leading && neg && powered_head {
                    write!(f, "1*{m}")?;
                } else {
                    write!(f, "{m}")?;
                }
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}
