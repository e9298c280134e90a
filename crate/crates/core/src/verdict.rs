//! Pass/fail records for identity checks.

use std::fmt;

use serde::Serialize;

use crate::forms::Form;
use crate::superlinear::{ext_mask_to_string, Basis, EndMatrix, Multivector};

/// Where an identity first failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub location: String,
    pub monomial: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}: lhs {} vs rhs {}",
            self.location, self.monomial, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// Lowest order at which every compared pair was checked.
    pub verified_order: Option<u32>,
    pub comparisons: usize,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        self.passed
    }

    /// A verdict that failed for a reason other than a form mismatch.
    pub fn failure(name: impl Into<String>, detail: impl Into<String>) -> Verdict {
        Verdict {
            name: name.into(),
            passed: false,
            verified_order: None,
            comparisons: 0,
            witness: None,
            detail: Some(detail.into()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Verdict {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}", self.name)?;
        if let Some(order) = self.verified_order {
            write!(f, " (order {order}, {} comparisons)", self.comparisons)?;
        }
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        if let Some(d) = &self.detail {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

/// Accumulates comparisons; the first mismatch becomes the witness.
#[derive(Clone, Debug)]
pub struct Tally {
    name: String,
    order: Option<u32>,
    comparisons: usize,
    witness: Option<Witness>,
    failed: bool,
    detail: Option<String>,
}

impl Tally {
    pub fn new(name: impl Into<String>) -> Self {
        Tally {
            name: name.into(),
            order: None,
            comparisons: 0,
            witness: None,
            failed: false,
            detail: None,
        }
    }

    /// Compare two forms up to their common valid order.
    pub fn forms(&mut self, location: impl FnOnce() -> String, lhs: &Form, rhs: &Form) -> bool {
        let order = lhs
            .valid_order()
            .min(rhs.valid_order())
            .min(lhs.ring().truncation());
        self.order = Some(self.order.map_or(order, |o| o.min(order)));
        self.comparisons += 1;
        match lhs.first_difference(rhs) {
            None => true,
            Some((mask, m, a, b)) => {
                if self.witness.is_none() {
                    self.witness = Some(Witness {
                        location: format!(
                            "{} [{}]",
                            location(),
                            Form::mask_to_string(lhs.ring(), mask)
                        ),
                        monomial: m.to_string(),
                        lhs: a.to_string(),
                        rhs: b.to_string(),
                    });
                }
                self.failed = true;
                false
            }
        }
    }

    /// Record a failure that carries no form witness.
    pub fn fail(&mut self, detail: impl Into<String>) {
        self.failed = true;
        if self.detail.is_none() {
            self.detail = Some(detail.into());
        }
    }

    pub fn absorb(&mut self, v: &Verdict) {
        if let Some(order) = v.verified_order {
            self.order = Some(self.order.map_or(order, |o| o.min(order)));
        }
        self.comparisons += v.comparisons;
        if !v.passed {
            self.failed = true;
            if self.witness.is_none() && v.witness.is_some() {
                self.witness = v.witness.clone().map(|mut w| {
                    w.location = format!("{}: {}", v.name, w.location);
                    w
                });
            }
            if self.detail.is_none() {
                self.detail = v
                    .detail
                    .clone()
                    .or_else(|| Some(format!("{} failed", v.name)));
            }
        }
    }

    pub fn passed(&self) -> bool {
        !self.failed
    }

    pub fn finish(self) -> Verdict {
        Verdict {
            name: self.name,
            passed: !self.failed,
            verified_order: self.order,
            comparisons: self.comparisons,
            witness: self.witness,
            detail: self.detail,
        }
    }
}

/// Compare two matrices entry by entry, recording the first mismatch.
pub fn compare_matrices(tally: &mut Tally, name: &str, lhs: &EndMatrix, rhs: &EndMatrix) -> bool {
    match lhs.first_difference(rhs) {
        None => {
            let order = lhs.valid_order().min(rhs.valid_order());
            let z = Form::zero_with_order(lhs.ring(), order);
            tally.forms(|| name.to_string(), &z, &z)
        }
        Some(((t, s), _, _, _, _)) => tally.forms(
            || {
                format!(
                    "{name}[{} <- {}]",
                    ext_mask_to_string(t, Basis::Vector),
                    ext_mask_to_string(s, Basis::Vector)
                )
            },
            &lhs.entry(t, s)
                .with_order(lhs.valid_order().min(rhs.valid_order())),
            &rhs.entry(t, s)
                .with_order(lhs.valid_order().min(rhs.valid_order())),
        ),
    }
}

/// Compare two multivectors, recording the first mismatch.
pub fn compare_multivectors(
    tally: &mut Tally,
    name: &str,
    lhs: &Multivector,
    rhs: &Multivector,
) -> bool {
    let order = lhs.valid_order().min(rhs.valid_order());
    match lhs.first_difference(rhs) {
        None => {
            let z = Form::zero_with_order(lhs.ring(), order);
            tally.forms(|| name.to_string(), &z, &z)
        }
        Some((mask, _, _, _, _)) => tally.forms(
            || format!("{name}[{}]", ext_mask_to_string(mask, lhs.basis())),
            &lhs.coefficient(mask).with_order(order),
            &rhs.coefficient(mask).with_order(order),
        ),
    }
}
