//! The bigraded exterior algebra over the truncated ring.
//!
//! A basis element is a bitmask over the `2n` generators: bit `i-1` is
//! `dz_i`, bit `n+i-1` is `dw_i`. Generators are kept in increasing bit order
//! (`dz_1 < … < dz_n < dw_1 < … < dw_n`) and coefficients sit on the left.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ring::{IdealSpec, Monomial, Rational, RingSpec, TruncatedSeries, VarKind, EXACT};

/// Sign of `dx_A ∧ dx_B` relative to the sorted basis element `dx_{A∪B}`;
/// zero when the masks overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> (bit + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Form {
    ring: RingSpec,
    order: u32,
    terms: BTreeMap<u32, TruncatedSeries>,
}

impl Form {
    pub fn zero(ring: RingSpec) -> Self {
        Self::zero_with_order(ring, EXACT)
    }

    pub fn zero_with_order(ring: RingSpec, order: u32) -> Self {
        Form {
            ring,
            order: order.min(EXACT),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: RingSpec) -> Self {
        Self::function(TruncatedSeries::one(ring))
    }

    /// The 0-form `f`.
    pub fn function(f: TruncatedSeries) -> Self {
        Self::term(0, f)
    }

    /// `f · dx_mask`.
    pub fn term(mask: u32, f: TruncatedSeries) -> Self {
        let ring = f.ring();
        assert!(
            mask >> (2 * ring.num_vars()) == 0,
            "mask outside the generators"
        );
        let mut out = Self::zero_with_order(ring, f.valid_order());
        if !f.is_zero() {
            out.terms.insert(mask, f);
        }
        out
    }

    /// `dz_index` or `dw_index`.
    pub fn generator(ring: RingSpec, kind: VarKind, index: usize) -> Self {
        Self::term(generator_bit(ring, kind, index), TruncatedSeries::one(ring))
    }

    pub fn from_terms(
        ring: RingSpec,
        order: u32,
        terms: impl IntoIterator<Item = (u32, TruncatedSeries)>,
    ) -> Self {
        let mut out = Self::zero_with_order(ring, order);
        for (mask, f) in terms {
            out.add_term(mask, &f);
        }
        out
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn valid_order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &TruncatedSeries)> {
        self.terms.iter().map(|(m, f)| (*m, f))
    }

    pub fn coefficient(&self, mask: u32) -> TruncatedSeries {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero_with_order(self.ring, self.order))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(p, q)` for a basis mask.
    pub fn bidegree_of(&self, mask: u32) -> (u32, u32) {
        let n = self.ring.num_vars();
        let zbits = (1u32 << n) - 1;
        ((mask & zbits).count_ones(), (mask >> n).count_ones())
    }

    /// `Some(parity)` when every term has the same total degree parity.
    pub fn parity(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.count_ones() % 2);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn parity_part(&self, parity: u32) -> Form {
        self.filter(|mask| mask.count_ones() % 2 == parity)
    }

    pub fn bidegree_part(&self, p: u32, q: u32) -> Form {
        let n = self.ring.num_vars();
        let zbits = (1u32 << n) - 1;
        self.filter(|mask| (mask & zbits).count_ones() == p && (mask >> n).count_ones() == q)
    }

    pub fn degree_part(&self, k: u32) -> Form {
        self.filter(|mask| mask.count_ones() == k)
    }

    fn filter(&self, keep: impl Fn(u32) -> bool) -> Form {
        Form {
            ring: self.ring,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, f)| (*m, f.clone()))
                .collect(),
        }
    }

    /// The degree-zero part as a function.
    pub fn function_part(&self) -> TruncatedSeries {
        self.coefficient(0)
    }

    fn add_term(&mut self, mask: u32, f: &TruncatedSeries) {
        if f.valid_order() < self.order {
            *self = self.with_order(f.valid_order());
        }
        if f.is_zero() {
            return;
        }
        let f = f.with_order(self.order);
        let sum = match self.terms.get(&mask) {
            Some(existing) => existing + &f,
            None => f,
        };
        if sum.is_zero() {
            self.terms.remove(&mask);
        } else {
            self.terms.insert(mask, sum);
        }
    }

    pub fn with_order(&self, order: u32) -> Form {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Form::zero_with_order(self.ring, order);
        for (m, f) in &self.terms {
            out.add_term(*m, f);
        }
        out
    }

    pub fn checked_add(&self, other: &Form) -> Result<Form> {
        self.ring.check_same(&other.ring)?;
        let mut out = self.with_order(other.order);
        for (m, f) in &other.terms {
            out.add_term(*m, f);
        }
        Ok(out)
    }

    pub fn checked_wedge(&self, other: &Form) -> Result<Form> {
        self.ring.check_same(&other.ring)?;
        let mut out = Form::zero_with_order(self.ring, self.order.min(other.order));
        for (ma, fa) in &self.terms {
            for (mb, fb) in &other.terms {
                let sign = wedge_sign(*ma, *mb);
                if sign == 0 {
                    continue;
                }
                let prod = fa * fb;
                if sign > 0 {
                    out.add_term(ma | mb, &prod);
                } else {
                    out.add_term(ma | mb, &-&prod);
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Form {
        self.checked_wedge(other).expect("form ring mismatch")
    }

    /// Left multiplication by a function.
    pub fn mul_function(&self, f: &TruncatedSeries) -> Form {
        let mut out = Form::zero_with_order(self.ring, self.order.min(f.valid_order()));
        for (m, g) in &self.terms {
            out.add_term(*m, &(f * g));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Form {
        let mut out = Form::zero_with_order(self.ring, self.order);
        for (m, g) in &self.terms {
            out.add_term(*m, &g.scale(c));
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Form {
        self.scale(&Rational::from_integer(c.into()))
    }

    fn differential(&self, kind: VarKind) -> Form {
        let n = self.ring.num_vars();
        let mut out = Form::zero_with_order(self.ring, self.order.saturating_sub(1));
        for (mask, f) in &self.terms {
            for i in 1..=n {
                let bit = generator_bit(self.ring, kind, i);
                let sign = wedge_sign(bit, *mask);
                if sign == 0 {
                    continue;
                }
                let df = f.wirtinger(kind, i);
                if sign > 0 {
                    out.add_term(bit | mask, &df);
                } else {
                    out.add_term(bit | mask, &-&df);
                }
            }
        }
        out
    }

    /// `∂̄`: raises `q` by one.
    pub fn dbar(&self) -> Form {
        self.differential(VarKind::W)
    }

    /// `∂`: raises `p` by one.
    pub fn partial(&self) -> Form {
        self.differential(VarKind::Z)
    }

    pub fn d(&self) -> Form {
        &self.partial() + &self.dbar()
    }

    pub fn reduce_mod_ideal(&self, ideal: &IdealSpec) -> Form {
        let mut out = Form::zero_with_order(self.ring, self.order);
        for (m, f) in &self.terms {
            out.add_term(*m, &f.reduce_mod_ideal(ideal));
        }
        out
    }

    /// Whether any coefficient involves a `w` variable.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.values().all(|f| f.is_holomorphic())
    }

    /// First basis element and monomial, up to the common valid order, where
    /// the two forms differ: `(mask, monomial, self coeff, other coeff)`.
    pub fn first_difference(&self, other: &Form) -> Option<(u32, Monomial, Rational, Rational)> {
        let order = self.order.min(other.order);
        let diff = &self.with_order(order) - &other.with_order(order);
        let (mask, f) = diff.terms.iter().next()?;
        let (m, _) = f.terms().next()?;
        Some((
            *mask,
            *m,
            self.coefficient(*mask).coefficient(m),
            other.coefficient(*mask).coefficient(m),
        ))
    }

    /// Render a basis mask as `dz1*dw2`, or `1` for the empty mask.
    pub fn mask_to_string(ring: RingSpec, mask: u32) -> String {
        if mask == 0 {
            return "1".into();
        }
        let n = ring.num_vars();
        let mut parts = Vec::new();
        for bit in 0..2 * n {
            if mask & (1 << bit) != 0 {
                if bit < n {
                    parts.push(format!("dz{}", bit + 1));
                } else {
                    parts.push(format!("dw{}", bit - n + 1));
                }
            }
        }
        parts.join("*")
    }

    pub fn parse(text: &str, ring: RingSpec) -> Result<Form> {
        crate::parse::parse_form(text, ring)
    }

    /// Reject anything outside bidegree `(p, q)`.
    pub fn require_bidegree(&self, p: u32, q: u32, what: &str) -> Result<()> {
        for mask in self.terms.keys() {
            let bd = self.bidegree_of(*mask);
            if bd != (p, q) {
                return Err(Error::Bidegree(format!(
                    "{what} has a term of bidegree ({}, {}), expected ({p}, {q})",
                    bd.0, bd.1
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn generator_bit(ring: RingSpec, kind: VarKind, index: usize) -> u32 {
    assert!(
        index >= 1 && index <= ring.num_vars(),
        "generator index out of range"
    );
    match kind {
        VarKind::Z => 1 << (index - 1),
        VarKind::W => 1 << (ring.num_vars() + index - 1),
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<u32> = self.terms.keys().copied().collect();
        keys.sort_by_key(|m| (m.count_ones(), *m));
        let lone = keys.len() == 1;
        for (k, mask) in keys.iter().enumerate() {
            let coeff = &self.terms[mask];
            let text = if *mask == 0 {
                if lone || coeff.num_terms() == 1 {
                    coeff.to_string()
                } else {
                    format!("({coeff})")
                }
            } else {
                let basis = Form::mask_to_string(self.ring, *mask);
                match coeff.as_single_term() {
                    Some((m, c)) if m.is_one() && *c == Rational::from_integer(1.into()) => basis,
                    Some((m, c)) if m.is_one() && *c == Rational::from_integer((-1).into()) => {
                        format!("-{basis}")
                    }
                    Some(_) => format!("{coeff}*{basis}"),
                    None => format!("({coeff})*{basis}"),
                }
            };
            if k == 0 {
                write!(f, "{text}")?;
            } else if let Some(rest) = text.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {text}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [order {}]", self, self.order)
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.checked_add(rhs).expect("form ring mismatch")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.checked_add(&-rhs).expect("form ring mismatch")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            ring: self.ring,
            order: self.order,
            terms: self.terms.iter().map(|(m, f)| (*m, -f)).collect(),
        }
    }
}

impl Mul for &Form {
    type Output = Form;
    fn mul(self, rhs: &Form) -> Form {
        self.wedge(rhs)
    }
}
