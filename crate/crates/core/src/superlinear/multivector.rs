use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{ext_mask_to_string, twist, BundleSpec};
use crate::forms::{wedge_sign, Form};
use crate::ring::{IdealSpec, Monomial, Rational, RingSpec, TruncatedSeries};

/// Whether the exterior factors are `e_j` or dual `e^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Vector,
    Covector,
}

/// A form-valued element of `⋀E` (or `⋀E^∨`), stored as `mask → ω` meaning
/// `Σ ω ⊗ e_mask`.
#[derive(Clone, PartialEq, Eq)]
pub struct Multivector {
    ring: RingSpec,
    bundle: BundleSpec,
    basis: Basis,
    order: u32,
    terms: BTreeMap<u32, Form>,
}

impl Multivector {
    pub fn zero(ring: RingSpec, bundle: BundleSpec, basis: Basis) -> Self {
        Multivector {
            ring,
            bundle,
            basis,
            order: crate::ring::EXACT,
            terms: BTreeMap::new(),
        }
    }

    /// `ω ⊗ e_mask`.
    pub fn term(bundle: BundleSpec, basis: Basis, mask: u32, form: Form) -> Self {
        assert!(
            mask <= bundle.full_mask(),
            "exterior mask outside the bundle"
        );
        let mut out = Multivector {
            ring: form.ring(),
            bundle,
            basis,
            order: form.valid_order(),
            terms: BTreeMap::new(),
        };
        if !form.is_zero() {
            out.terms.insert(mask, form);
        }
        out
    }

    /// `1 ⊗ e_mask`.
    pub fn basis_element(ring: RingSpec, bundle: BundleSpec, basis: Basis, mask: u32) -> Self {
        Self::term(bundle, basis, mask, Form::one(ring))
    }

    /// `Σ_j c_j ⊗ e^j` (or `e_j`) from per-generator functions.
    pub fn from_functions(bundle: BundleSpec, basis: Basis, coeffs: &[TruncatedSeries]) -> Self {
        assert_eq!(coeffs.len(), bundle.rank(), "one coefficient per generator");
        Self::from_forms(
            bundle,
            basis,
            &coeffs
                .iter()
                .cloned()
                .map(Form::function)
                .collect::<Vec<_>>(),
        )
    }

    /// `Σ_j ω_j ⊗ e^j` (or `e_j`) from per-generator forms.
    pub fn from_forms(bundle: BundleSpec, basis: Basis, coeffs: &[Form]) -> Self {
        assert_eq!(coeffs.len(), bundle.rank(), "one coefficient per generator");
        let ring = coeffs[0].ring();
        let mut out = Self::zero(ring, bundle, basis);
        for (j, c) in coeffs.iter().enumerate() {
            out = &out + &Self::term(bundle, basis, 1 << j, c.clone());
        }
        out
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn bundle(&self) -> BundleSpec {
        self.bundle
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn valid_order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Form)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    pub fn coefficient(&self, mask: u32) -> Form {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Form::zero_with_order(self.ring, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients of the degree-one part, `j = 1..r`.
    pub fn generator_coefficients(&self) -> Vec<Form> {
        (0..self.bundle.rank())
            .map(|j| self.coefficient(1 << j))
            .collect()
    }

    pub fn exterior_degree_part(&self, k: u32) -> Multivector {
        self.filter(|mask| mask.count_ones() == k)
    }

    fn filter(&self, keep: impl Fn(u32) -> bool) -> Multivector {
        Multivector {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, f)| (*m, f.clone()))
                .collect(),
            ..self.clone_empty(self.order)
        }
    }

    fn clone_empty(&self, order: u32) -> Multivector {
        Multivector {
            ring: self.ring,
            bundle: self.bundle,
            basis: self.basis,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn add_form(&mut self, mask: u32, form: &Form) {
        if form.valid_order() < self.order {
            *self = self.with_order(form.valid_order());
        }
        if form.is_zero() {
            return;
        }
        let form = form.with_order(self.order);
        let sum = match self.terms.get(&mask) {
            Some(existing) => existing + &form,
            None => form,
        };
        if sum.is_zero() {
            self.terms.remove(&mask);
        } else {
            self.terms.insert(mask, sum);
        }
    }

    pub fn with_order(&self, order: u32) -> Multivector {
        if order >= self.order {
            return self.clone();
        }
        let mut out = self.clone_empty(order);
        for (m, f) in &self.terms {
            out.add_form(*m, f);
        }
        out
    }

    fn check_compatible(&self, other: &Multivector) {
        assert_eq!(self.ring, other.ring, "multivector ring mismatch");
        assert_eq!(self.bundle, other.bundle, "multivector bundle mismatch");
        assert_eq!(self.basis, other.basis, "multivector basis mismatch");
    }

    /// Super product `(ω₁ ⊗ e_A)(ω₂ ⊗ e_B) = (-1)^{|A||ω₂|} ω₁ω₂ ⊗ e_A ∧ e_B`.
    pub fn wedge(&self, other: &Multivector) -> Multivector {
        self.check_compatible(other);
        let mut out = self.clone_empty(self.order.min(other.order));
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                let sign = wedge_sign(*a, *b);
                if sign == 0 {
                    continue;
                }
                let prod = wa.wedge(&twist(wb, a.count_ones()));
                if sign > 0 {
                    out.add_form(a | b, &prod);
                } else {
                    out.add_form(a | b, &-&prod);
                }
            }
        }
        out
    }

    /// `ω · v` for a form `ω` acting from the left.
    pub fn left_form_mul(&self, omega: &Form) -> Multivector {
        let mut out = self.clone_empty(self.order.min(omega.valid_order()));
        for (m, f) in &self.terms {
            out.add_form(*m, &omega.wedge(f));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Multivector {
        let mut out = self.clone_empty(self.order);
        for (m, f) in &self.terms {
            out.add_form(*m, &f.scale(c));
        }
        out
    }

    pub fn map_forms(&self, order: u32, f: impl Fn(&Form) -> Form) -> Multivector {
        let mut out = self.clone_empty(order);
        for (m, w) in &self.terms {
            out.add_form(*m, &f(w));
        }
        out
    }

    /// `∂̄` on coefficients; the exterior factors are inert.
    pub fn dbar(&self) -> Multivector {
        self.map_forms(self.order.saturating_sub(1), Form::dbar)
    }

    pub fn partial(&self) -> Multivector {
        self.map_forms(self.order.saturating_sub(1), Form::partial)
    }

    pub fn reduce_mod_ideal(&self, ideal: &IdealSpec) -> Multivector {
        self.map_forms(self.order, |f| f.reduce_mod_ideal(ideal))
    }

    /// First `(exterior mask, form mask, monomial, lhs, rhs)` where the two
    /// differ up to the common valid order.
    pub fn first_difference(
        &self,
        other: &Multivector,
    ) -> Option<(u32, u32, Monomial, Rational, Rational)> {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let diff = &self.with_order(order) - &other.with_order(order);
        let (ext, _) = diff.terms.iter().next()?;
        let (mask, m, a, b) = self
            .coefficient(*ext)
            .with_order(order)
            .first_difference(&other.coefficient(*ext).with_order(order))?;
        Some((*ext, mask, m, a, b))
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mask, form)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({form}) ⊗ {}", ext_mask_to_string(*mask, self.basis))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [order {}]", self, self.order)
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.check_compatible(rhs);
        let mut out = self.with_order(rhs.order);
        for (m, f) in &rhs.terms {
            out.add_form(*m, f);
        }
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.map_forms(self.order, |f| -f)
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::VarKind;

    #[test]
    fn super_product_signs() {
        let r = RingSpec::new(1, 4).unwrap();
        let b = BundleSpec::new(2).unwrap();
        let e1 = Multivector::basis_element(r, b, Basis::Vector, 0b01);
        let e2 = Multivector::basis_element(r, b, Basis::Vector, 0b10);
        assert_eq!(e2.wedge(&e1), -&e1.wedge(&e2));
        assert!(e1.wedge(&e1).is_zero());
        // e_1 · (dz ⊗ e_2) = -dz ⊗ e_1 ∧ e_2
        let dz = Form::generator(r, VarKind::Z, 1);
        let v = Multivector::term(b, Basis::Vector, 0b10, dz.clone());
        assert_eq!(
            e1.wedge(&v),
            Multivector::term(b, Basis::Vector, 0b11, -&dz)
        );
        assert_eq!(
            v.wedge(&e1),
            Multivector::term(b, Basis::Vector, 0b11, -&dz)
        );
    }
}
