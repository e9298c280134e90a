//! Super linear algebra of `⋀E` for a free module `E` of rank `r`, with
//! form coefficients.
//!
//! Exterior basis elements are bitmasks over `e_1..e_r` (bit `j-1` is `e_j`).
//! A homogeneous element is written `ω ⊗ e_S` with the form on the left; the
//! product of two such elements is
//! `(ω₁ ⊗ e_A)(ω₂ ⊗ e_B) = (-1)^{|A||ω₂|} ω₁ω₂ ⊗ e_A ∧ e_B`.

mod checks;
mod endmatrix;
mod multivector;
mod operator;
mod trace;

pub use checks::{verify_bracket_traces, verify_trace_commutation, verify_trace_inclusion};
pub use endmatrix::EndMatrix;
pub use multivector::{Basis, Multivector};
pub use operator::{BaseDifferential, Operator};
pub use trace::{
    contraction, extend_derivation, gen_supertrace, gen_supertrace_of_unit, inclusion_i, left_mult,
};

use crate::error::{Error, Result};

/// Largest supported bundle rank.
pub const MAX_RANK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BundleSpec {
    rank: usize,
}

impl BundleSpec {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > MAX_RANK {
            return Err(Error::InvalidRing(format!(
                "bundle rank must lie in 1..={MAX_RANK}, got {rank}"
            )));
        }
        Ok(BundleSpec { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of exterior basis elements, `2^r`.
    pub fn dim(&self) -> u32 {
        1 << self.rank
    }

    pub fn full_mask(&self) -> u32 {
        self.dim() - 1
    }

    /// All masks of exterior degree `k`, increasing.
    pub fn masks_of_degree(&self, k: u32) -> impl Iterator<Item = u32> {
        (0..self.dim()).filter(move |m| m.count_ones() == k)
    }

    pub(crate) fn check_same(&self, other: &BundleSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::BundleMismatch(self.rank, other.rank))
        }
    }
}

/// Render an exterior mask as `e1*e3` (or `e^1*e^3`), `1` when empty.
pub fn ext_mask_to_string(mask: u32, basis: Basis) -> String {
    if mask == 0 {
        return "1".into();
    }
    let prefix = match basis {
        Basis::Vector => "e",
        Basis::Covector => "e^",
    };
    (0..32)
        .filter(|b| mask & (1 << b) != 0)
        .map(|b| format!("{prefix}{}", b + 1))
        .collect::<Vec<_>>()
        .join("*")
}

/// `(-1)^k` applied to the odd part of a form when `k` is odd: moving an
/// object of parity `k` past the form.
pub(crate) fn twist(form: &crate::forms::Form, k: u32) -> crate::forms::Form {
    if k.is_multiple_of(2) {
        return form.clone();
    }
    let odd = form.parity_part(1);
    if odd.is_zero() {
        return form.clone();
    }
    &form.parity_part(0) - &odd
}
