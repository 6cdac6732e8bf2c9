//! Exact arithmetic and exhaustive verification for Artin-Schreier point
//! counts, character sums, and complete plane arcs derived from a
//! generalized Hermitian curve.
//!
//! The crate is organised around one arithmetic kernel: a single absolute
//! extension `F_p[X]/(modulus)` of degree `n*ell` ([`gf::TowerSpec`]), with
//! the intermediate field `F_q` realised as the fixed field of the q-power
//! Frobenius. On top of it sit
//!
//! - [`cyclo`]: exact integers in `Z[zeta_m]`, the value space of every
//!   brute-force character sum,
//! - [`charsums`]: canonical characters, Gauss sums, and the Weil sum
//!   `R(A,B,C)` both as an exact brute sum and as a symbolic closed form,
//! - [`aschreier`]: affine point counts of `y^q - y = a x^{q^r+1} + b x + c`
//!   (closed form and brute force) plus the maximal/minimal classifier,
//! - [`geometry`]: the plane `PG(2, q^ell)`, the curve pointset, the six
//!   arc constructions, and the exhaustive completeness verifier.
//!
//! Every closed form has an independent exhaustive oracle; the oracles are
//! authoritative and the closed forms are hypotheses under test.

pub mod aschreier;
pub mod charsums;
pub mod cyclo;
pub mod geometry;
pub mod gf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("quadratic character is undefined in characteristic 2")]
    EvenCharacteristic,
    #[error("target degree {0} does not divide {1}")]
    NonDivisorDegree(u32, u32),
    #[error("exponent {0} is not invertible modulo {1}")]
    NonInvertibleExponent(u128, u64),
    #[error("root of zero requested for exponent {0}")]
    ZeroRoot(u128),
    #[error("leading coefficient a = 0 is outside the curve family")]
    ZeroLeadingCoefficient,
    #[error("cyclotomic index mismatch: {0} vs {1}")]
    MixedCyclotomicIndex(u64, u64),
    #[error("unsupported cyclotomic index {0}")]
    UnsupportedCyclotomicIndex(u64),
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
