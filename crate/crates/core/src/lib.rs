//! Exact symbolic computation for finite-rank Lie conformal algebras.
//!
//! The crate has four layers:
//!
//! * [`poly`] — sparse multivariate polynomials over ℚ in the fixed
//!   variable universe `del, lam, mu, nu, t1, t2`;
//! * [`lca`] — algebras given by structure tables, bracket evaluation,
//!   axiom verification, fixtures, and module theory (Hermite and Smith
//!   forms over ℚ[∂]);
//! * [`cmap`] — conformal endomorphisms and their two-parameter bracket;
//! * [`solver`] — degree-bounded kernels of the derivation identities,
//!   the algebra of solution spaces, the quasiderivation embedding into
//!   the truncated extension, and an independent evaluation oracle.
//!
//! All values are immutable after construction and all operations are
//! pure, so everything can be shared freely across threads.

pub mod cmap;
pub mod lca;
pub mod linalg;
pub mod poly;
pub mod solver;
mod submodule;

pub use cmap::{ConformalMap, ConformalMap2};
pub use lca::{current_from_lie, fixture, AxiomReport, Element, LCAlgebra, LcaError, SmithReport, Submodule};
pub use poly::{Monomial, Poly, Rational, Var};
pub use solver::{
    cinn_span, oracle_check, quasi_embed, residual, solve_space, AbgParams, DegreeBound,
    DerivationKind, SolutionSpace, SolverError,
};
