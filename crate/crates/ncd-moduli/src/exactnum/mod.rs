//! Exact arithmetic: rationals, nonzero coefficients closed under rational
//! powers, rational linear algebra, lattice normal form and strict cone
//! feasibility. Nothing in here touches floating point.

mod coeff;
mod cone;
mod matrix;
mod power;
mod rational;
mod smith;

pub use coeff::ExactNonzeroComplex;
pub use cone::strict_positive_solution;
pub use matrix::{rational_nullspace, IntegerMatrix, RationalMatrix};
pub use power::{apply_powers, solve_power_system, PowerSolutionSet, PowerSystemSolution, MAX_ENUMERATED_BRANCHES};
pub use rational::{format_rational, int, parse_rational, rat, reduce_mod_one, Rational};
pub use smith::{smith_normal_form, SmithForm};

use thiserror::Error;

/// Failures when constructing exact values or matrices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("zero has no representation as a nonzero coefficient")]
    Zero,
    #[error("cannot factor {0}: prime factors above 2^64 are not supported")]
    Unfactorable(String),
    #[error("malformed rational `{0}`")]
    Parse(String),
    #[error("matrix rows have unequal lengths")]
    Ragged,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("root order must be positive")]
    ZeroRootOrder,
}

pub(crate) mod serde_rational {
    //! Rationals serialise as JSON integers when integral and as `"p/q"`
    //! strings otherwise.
    use super::rational::{format_rational, parse_rational, Rational};
    use num_traits::{One, ToPrimitive};
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        if q.denom().is_one() {
            if let Some(v) = q.numer().to_i64() {
                return s.serialize_i64(v);
            }
        }
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                parse_rational(v).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}
