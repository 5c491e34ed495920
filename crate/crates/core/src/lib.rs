//! Two-dimensional (and small-`n`) Selberg-type integrals over `F_p`.
//!
//! An `F_p`-Selberg integral is the coefficient of
//! `x_1^{l_1 p - 1} ... x_n^{l_n p - 1}` in the master polynomial
//! `prod_{i<j} (x_i - x_j)^{2c} prod_i x_i^a (1 - x_i)^b`. This crate
//! evaluates those coefficients three ways (full expansion, a direct
//! binomial sum, and a closed-form case analysis for two variables) and
//! ships the machinery used to cross-check them: parameter recurrences,
//! relations between cycles, and the Morris constant-term identity over
//! the integers.

pub mod closed2d;
pub mod error;
pub mod formula;
pub mod golden;
pub mod harness;
pub mod modp;
pub mod morris;
pub mod poly;
pub mod selberg;

pub use closed2d::{
    classify, condition_set, eval_closed, eval_closed_explained, relations_check,
    skew_symmetry_check, Branch, CaseTag, ClosedEvaluation, ConditionSet, CycleClass,
    RelationReport,
};
pub use error::{Error, Result};
pub use formula::FactorialFormula;
pub use modp::{is_prime, Fp, FpContext};
pub use morris::{LaurentPoly, MorrisParams};
pub use poly::{CoeffRing, Cycle, Integers, MultiPoly, PrimeField};
pub use selberg::{
    beta_closed, master_polynomial, moment_integral, selberg_bruteforce,
    selberg_bruteforce_integer, selberg_direct_2d, selberg_nd_closed, MasterPolySpec,
    MomentKind, ResourceLimits, SelbergParams,
};
