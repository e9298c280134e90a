//! Exact arithmetic in `Q[z_1..z_n, w_1..w_n] / (total degree > D)`.
//!
//! The `w_i` are formal stand-ins for the antiholomorphic coordinates; they
//! are independent variables, so `∂/∂z_i` and `∂/∂w_i` are independent
//! derivations. Every value carries a `valid_order`: the total degree up to
//! which it is exact. Binary operations take the minimum of their operands'
//! orders and derivatives lower the order by one.
//!
//! A value whose terms were never truncated is exact at every degree; its
//! order is [`EXACT`], which stays far above any truncation under
//! differentiation. A product that discards terms above `D` falls back to
//! the degree just below the lowest discarded term.
//!
//! Since `m^{v+1}` (monomials of degree `> v`) is an ideal, the values at
//! order `v` are honest elements of the quotient ring, and every identity
//! checked here is an identity in that quotient.

mod monomial;
mod series;
pub mod solve;

pub use monomial::{monomials_up_to, Monomial, VarKind, MAX_VARS};
pub use series::TruncatedSeries;
pub use solve::{solve_graded_linear, LinearEquation};

use num_rational::BigRational;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Valid order of a value that lost no terms to truncation.
pub const EXACT: u32 = 1 << 20;

/// The rational number `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Number of holomorphic coordinates and the truncation degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    num_vars: usize,
    truncation: u32,
}

impl RingSpec {
    pub fn new(num_vars: usize, truncation: u32) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidRing("num_vars must be at least 1".into()));
        }
        if num_vars > MAX_VARS {
            return Err(Error::InvalidRing(format!(
                "num_vars {num_vars} exceeds the supported maximum {MAX_VARS}"
            )));
        }
        if truncation > u8::MAX as u32 {
            return Err(Error::InvalidRing(format!(
                "truncation {truncation} exceeds {}",
                u8::MAX
            )));
        }
        Ok(RingSpec {
            num_vars,
            truncation,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub(crate) fn check_same(&self, other: &RingSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(
                format!("{self:?}"),
                format!("{other:?}"),
            ))
        }
    }
}

/// A coordinate ideal `(z_i : i ∈ vars)`, 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    vars: Vec<usize>,
}

impl IdealSpec {
    pub fn new(ring: &RingSpec, mut vars: Vec<usize>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidRing(
                "ideal must have at least one generator".into(),
            ));
        }
        vars.sort_unstable();
        vars.dedup();
        if let Some(&bad) = vars.iter().find(|&&v| v == 0 || v > ring.num_vars()) {
            return Err(Error::InvalidRing(format!(
                "ideal generator z{bad} is outside z1..z{}",
                ring.num_vars()
            )));
        }
        Ok(IdealSpec { vars })
    }

    /// 1-based indices of the generators.
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub(crate) fn kills(&self, m: &Monomial) -> bool {
        self.vars.iter().any(|&v| m.exponent(VarKind::Z, v) > 0)
    }
}
