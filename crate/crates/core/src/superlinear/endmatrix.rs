use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{ext_mask_to_string, twist, Basis, BundleSpec, Multivector};
use crate::forms::Form;
use crate::ring::{Monomial, Rational, RingSpec};

/// A form-valued endomorphism of `⋀E`.
///
/// The entry `ω` at `(target T, source S)` stands for `ω ⊗ E_{T,S}`, where
/// `E_{T,S}` sends `e_S` to `e_T` and has parity `|T| + |S|`. Column `S`
/// therefore holds the image of `e_S`. Entries may mix parities; the even
/// and odd parts are recovered with [`EndMatrix::parity_part`].
#[derive(Clone, PartialEq, Eq)]
pub struct EndMatrix {
    ring: RingSpec,
    bundle: BundleSpec,
    order: u32,
    entries: BTreeMap<(u32, u32), Form>,
}

impl EndMatrix {
    pub fn zero(ring: RingSpec, bundle: BundleSpec) -> Self {
        Self::zero_with_order(ring, bundle, crate::ring::EXACT)
    }

    pub fn zero_with_order(ring: RingSpec, bundle: BundleSpec, order: u32) -> Self {
        EndMatrix {
            ring,
            bundle,
            order: order.min(crate::ring::EXACT),
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(ring: RingSpec, bundle: BundleSpec) -> Self {
        let mut out = Self::zero(ring, bundle);
        for s in 0..bundle.dim() {
            out.add_entry(s, s, &Form::one(ring));
        }
        out
    }

    /// The grading involution `ε = (-1)^{|S|}` on `e_S`.
    pub fn grading(ring: RingSpec, bundle: BundleSpec) -> Self {
        let mut out = Self::zero(ring, bundle);
        for s in 0..bundle.dim() {
            let one = Form::one(ring);
            if s.count_ones() % 2 == 0 {
                out.add_entry(s, s, &one);
            } else {
                out.add_entry(s, s, &-&one);
            }
        }
        out
    }

    /// The matrix whose column `S` is `columns(S)`.
    pub fn from_columns(
        ring: RingSpec,
        bundle: BundleSpec,
        mut columns: impl FnMut(u32) -> Multivector,
    ) -> Self {
        let mut out = Self::zero(ring, bundle);
        for s in 0..bundle.dim() {
            let col = columns(s);
            out.order = out.order.min(col.valid_order());
            for (t, f) in col.terms() {
                out.add_entry(t, s, f);
            }
        }
        out.normalize_order();
        out
    }

    pub fn from_entries(
        ring: RingSpec,
        bundle: BundleSpec,
        order: u32,
        entries: impl IntoIterator<Item = ((u32, u32), Form)>,
    ) -> Self {
        let mut out = Self::zero_with_order(ring, bundle, order);
        for ((t, s), f) in entries {
            out.add_entry(t, s, &f);
        }
        out
    }

    fn normalize_order(&mut self) {
        let order = self.order;
        for f in self.entries.values_mut() {
            *f = f.with_order(order);
        }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn bundle(&self) -> BundleSpec {
        self.bundle
    }

    pub fn valid_order(&self) -> u32 {
        self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), &Form)> {
        self.entries.iter().map(|(k, f)| (*k, f))
    }

    pub fn entry(&self, target: u32, source: u32) -> Form {
        self.entries
            .get(&(target, source))
            .cloned()
            .unwrap_or_else(|| Form::zero_with_order(self.ring, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn add_entry(&mut self, target: u32, source: u32, form: &Form) {
        assert!(target <= self.bundle.full_mask() && source <= self.bundle.full_mask());
        if form.valid_order() < self.order {
            *self = self.with_order(form.valid_order());
        }
        if form.is_zero() {
            return;
        }
        let form = form.with_order(self.order);
        let key = (target, source);
        let sum = match self.entries.get(&key) {
            Some(existing) => existing + &form,
            None => form,
        };
        if sum.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, sum);
        }
    }

    pub fn with_order(&self, order: u32) -> EndMatrix {
        if order >= self.order {
            return self.clone();
        }
        self.map(order, |_, f| f.clone())
    }

    /// Apply `f` to every entry, producing a matrix of the given order.
    pub fn map(&self, order: u32, f: impl Fn((u32, u32), &Form) -> Form) -> EndMatrix {
        let mut out = Self::zero_with_order(self.ring, self.bundle, order);
        for (k, w) in &self.entries {
            out.add_entry(k.0, k.1, &f(*k, w));
        }
        out
    }

    fn check_compatible(&self, other: &EndMatrix) {
        assert_eq!(self.ring, other.ring, "matrix ring mismatch");
        assert_eq!(self.bundle, other.bundle, "matrix bundle mismatch");
    }

    /// The part of total parity `p` (form degree plus `|T| + |S|`).
    pub fn parity_part(&self, p: u32) -> EndMatrix {
        self.map(self.order, |(t, s), f| {
            f.parity_part((p + t.count_ones() + s.count_ones()) % 2)
        })
    }

    /// `Some(parity)` when every nonzero piece has the same total parity.
    pub fn parity(&self) -> Option<u32> {
        let even = self.parity_part(0).is_zero();
        let odd = self.parity_part(1).is_zero();
        match (even, odd) {
            (true, true) => Some(0),
            (false, true) => Some(0),
            (true, false) => Some(1),
            (false, false) => None,
        }
    }

    /// Entries that change exterior degree by exactly `k` (target minus source).
    pub fn exterior_shift_part(&self, k: i32) -> EndMatrix {
        self.map(self.order, |(t, s), f| {
            if t.count_ones() as i32 - s.count_ones() as i32 == k {
                f.clone()
            } else {
                Form::zero_with_order(self.ring, self.order)
            }
        })
    }

    /// Restrict every entry to form bidegree `(p, q)`.
    pub fn bidegree_part(&self, p: u32, q: u32) -> EndMatrix {
        self.map(self.order, |_, f| f.bidegree_part(p, q))
    }

    /// `ω` applied entrywise to the coefficients: `(ω₁ ⊗ E)(η ⊗ e_S) =
    /// (-1)^{|E||η|} ω₁η ⊗ E(e_S)`.
    pub fn apply(&self, v: &Multivector) -> Multivector {
        assert_eq!(self.bundle, v.bundle(), "bundle mismatch");
        assert_eq!(v.basis(), Basis::Vector, "matrices act on ⋀E");
        let by_source = self.by_source();
        let mut out = Multivector::zero(self.ring, self.bundle, Basis::Vector)
            .with_order(self.order.min(v.valid_order()));
        for (s, eta) in v.terms() {
            if let Some(col) = by_source.get(&s) {
                for (t, omega) in col {
                    let parity = t.count_ones() + s.count_ones();
                    out.add_form(*t, &omega.wedge(&twist(eta, parity)));
                }
            }
        }
        out
    }

    fn by_source(&self) -> BTreeMap<u32, Vec<(u32, &Form)>> {
        let mut map: BTreeMap<u32, Vec<(u32, &Form)>> = BTreeMap::new();
        for ((t, s), f) in &self.entries {
            map.entry(*s).or_default().push((*t, f));
        }
        map
    }

    fn by_target(&self) -> BTreeMap<u32, Vec<(u32, &Form)>> {
        let mut map: BTreeMap<u32, Vec<(u32, &Form)>> = BTreeMap::new();
        for ((t, s), f) in &self.entries {
            map.entry(*t).or_default().push((*s, f));
        }
        map
    }

    fn compose_with(&self, other: &EndMatrix, signed: bool) -> EndMatrix {
        self.check_compatible(other);
        let rows = other.by_target();
        let mut out = Self::zero_with_order(self.ring, self.bundle, self.order.min(other.order));
        for ((t, s), w1) in &self.entries {
            if let Some(row) = rows.get(s) {
                let parity = if signed {
                    t.count_ones() + s.count_ones()
                } else {
                    0
                };
                for (u, w2) in row {
                    out.add_entry(*t, *u, &w1.wedge(&twist(w2, parity)));
                }
            }
        }
        out
    }

    /// `(ω₁ ⊗ φ₁)(ω₂ ⊗ φ₂) = (-1)^{|φ₁||ω₂|} ω₁ω₂ ⊗ φ₁φ₂`.
    pub fn compose(&self, other: &EndMatrix) -> EndMatrix {
        self.compose_with(other, true)
    }

    /// Composition that lets coefficients commute freely past the
    /// endomorphism factors, matching `Tr_Λ(ω ⊗ φ) = ω Tr_Λ(φ)`.
    pub(crate) fn compose_plain(&self, other: &EndMatrix) -> EndMatrix {
        self.compose_with(other, false)
    }

    pub fn pow(&self, k: u32) -> EndMatrix {
        let mut out = Self::identity(self.ring, self.bundle).with_order(self.order);
        for _ in 0..k {
            out = out.compose(self);
        }
        out
    }

    /// `[a, b]_s = ab - (-1)^{|a||b|} ba`, extended bilinearly over the
    /// even/odd split.
    pub fn supercommutator(&self, other: &EndMatrix) -> EndMatrix {
        let mut out = Self::zero_with_order(self.ring, self.bundle, self.order.min(other.order));
        for pa in 0..2 {
            let a = self.parity_part(pa);
            if a.is_zero() {
                continue;
            }
            for pb in 0..2 {
                let b = other.parity_part(pb);
                if b.is_zero() {
                    continue;
                }
                let ab = a.compose(&b);
                let ba = b.compose(&a);
                out = &out + &ab;
                out = if pa * pb == 1 { &out + &ba } else { &out - &ba };
            }
        }
        out
    }

    /// `tr_s = Σ_S (-1)^{|S|} entry(S, S)`.
    pub fn supertrace(&self) -> Form {
        let mut out = Form::zero_with_order(self.ring, self.order);
        for s in 0..self.bundle.dim() {
            if let Some(f) = self.entries.get(&(s, s)) {
                out = if s.count_ones() % 2 == 0 {
                    &out + f
                } else {
                    &out - f
                };
            }
        }
        out
    }

    /// The graded bracket with a scalar base differential, which acts
    /// entrywise: `[∂̄, M]_s` has entries `∂̄ω`.
    pub fn dbar(&self) -> EndMatrix {
        self.map(self.order.saturating_sub(1), |_, f| f.dbar())
    }

    pub fn partial(&self) -> EndMatrix {
        self.map(self.order.saturating_sub(1), |_, f| f.partial())
    }

    pub fn d(&self) -> EndMatrix {
        self.map(self.order.saturating_sub(1), |_, f| f.d())
    }

    pub fn scale(&self, c: &Rational) -> EndMatrix {
        self.map(self.order, |_, f| f.scale(c))
    }

    /// Left multiplication of every entry by a form (no sign: the form is
    /// placed to the left of the coefficient).
    pub fn left_form_mul(&self, omega: &Form) -> EndMatrix {
        self.map(self.order.min(omega.valid_order()), |_, f| omega.wedge(f))
    }

    /// First `((T, S), form mask, monomial, lhs, rhs)` where the matrices
    /// differ up to the common valid order.
    #[allow(clippy::type_complexity)]
    pub fn first_difference(
        &self,
        other: &EndMatrix,
    ) -> Option<((u32, u32), u32, Monomial, Rational, Rational)> {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let diff = &self.with_order(order) - &other.with_order(order);
        let (key, _) = diff.entries.iter().next()?;
        let (mask, m, a, b) = self
            .entry(key.0, key.1)
            .with_order(order)
            .first_difference(&other.entry(key.0, key.1).with_order(order))?;
        Some((*key, mask, m, a, b))
    }
}

impl fmt::Display for EndMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (k, ((t, s), w)) in self.entries.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "[{} <- {}] {w}",
                ext_mask_to_string(*t, Basis::Vector),
                ext_mask_to_string(*s, Basis::Vector)
            )?;
        }
        Ok(())
    }
}

impl fmt::Debug for EndMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [order {}]", self, self.order)
    }
}

impl Add for &EndMatrix {
    type Output = EndMatrix;
    fn add(self, rhs: &EndMatrix) -> EndMatrix {
        self.check_compatible(rhs);
        let mut out = self.with_order(rhs.order);
        for ((t, s), f) in &rhs.entries {
            out.add_entry(*t, *s, f);
        }
        out
    }
}

impl Neg for &EndMatrix {
    type Output = EndMatrix;
    fn neg(self) -> EndMatrix {
        self.map(self.order, |_, f| -f)
    }
}

impl Sub for &EndMatrix {
    type Output = EndMatrix;
    fn sub(self, rhs: &EndMatrix) -> EndMatrix {
        self + &(-rhs)
    }
}
