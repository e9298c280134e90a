use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::{IdealSpec, Monomial, Rational, RingSpec, VarKind, EXACT};
use crate::error::{Error, Result};

/// A multivariate series in `z_i, w_i`, exact up to total degree `order`.
///
/// Invariants: no stored monomial has degree above `min(order, D)` and no
/// stored coefficient is zero. An order above `D` means every term of degree
/// up to that order is known, so those above `D` are zero.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: RingSpec,
    order: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl TruncatedSeries {
    pub fn zero(ring: RingSpec) -> Self {
        Self::zero_with_order(ring, EXACT)
    }

    pub fn zero_with_order(ring: RingSpec, order: u32) -> Self {
        TruncatedSeries {
            ring,
            order: order.min(EXACT),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: RingSpec) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: RingSpec, c: Rational) -> Self {
        Self::monomial(ring, Monomial::ONE, c)
    }

    pub fn from_integer(ring: RingSpec, c: i64) -> Self {
        Self::constant(ring, Rational::from_integer(c.into()))
    }

    /// The coordinate `z_index` or `w_index` (1-based).
    pub fn var(ring: RingSpec, kind: VarKind, index: usize) -> Self {
        assert!(
            index >= 1 && index <= ring.num_vars(),
            "variable index out of range"
        );
        Self::monomial(ring, Monomial::var(kind, index), Rational::one())
    }

    pub fn monomial(ring: RingSpec, m: Monomial, c: Rational) -> Self {
        let mut s = Self::zero(ring);
        s.add_term(m, c);
        s
    }

    pub fn from_terms(
        ring: RingSpec,
        order: u32,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut s = Self::zero_with_order(ring, order);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    /// The total degree up to which this value is exact.
    pub fn valid_order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::ONE)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(m)` when the series is a single monomial with coefficient one.
    pub(crate) fn as_single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|m| m.degree())
    }

    /// No antiholomorphic variable occurs.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|m| !m.has_w())
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || m.degree() > self.order {
            return;
        }
        if m.degree() > self.ring.truncation() {
            self.order = m.degree() - 1;
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Lower the valid order to `min(order, self.valid_order())`.
    pub fn with_order(&self, order: u32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        TruncatedSeries {
            ring: self.ring,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        let order = self.order.min(other.order);
        let mut out = self.with_order(order);
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg_ref())
    }

    /// Truncated product: monomials above `min(v_a, v_b, D)` are discarded.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ring.check_same(&other.ring)?;
        let mut order = self.order.min(other.order);
        let cap = order.min(self.ring.truncation());
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                let d = da + mb.degree();
                if d > cap {
                    if d <= order {
                        order = d - 1;
                    }
                    break;
                }
                let prod = ca * cb;
                let key = ma.mul(mb);
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(TruncatedSeries {
            ring: self.ring,
            order,
            terms: acc,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero_with_order(self.ring, self.order);
        }
        TruncatedSeries {
            ring: self.ring,
            order: self.order,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    fn neg_ref(&self) -> Self {
        TruncatedSeries {
            ring: self.ring,
            order: self.order,
            terms: self.terms.iter().map(|(m, v)| (*m, -v)).collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::one(self.ring).with_order(self.order);
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative in `z_index` or `w_index`, treating the other
    /// family as constants. The valid order drops by one (floor zero).
    pub fn wirtinger(&self, kind: VarKind, index: usize) -> Self {
        assert!(
            index >= 1 && index <= self.ring.num_vars(),
            "variable index out of range"
        );
        let order = self.order.saturating_sub(1);
        let mut out = Self::zero_with_order(self.ring, order);
        for (m, c) in &self.terms {
            let e = m.exponent(kind, index);
            if let Some(lower) = m.lower(kind, index) {
                out.add_term(lower, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv_c0 = c0.recip();
        // a = c0 (1 + x) with x(0) = 0, so a^{-1} = c0^{-1} sum_k (-x)^k.
        let mut minus_x = self.scale(&-inv_c0.clone());
        minus_x.terms.remove(&Monomial::ONE);
        let one = Self::one(self.ring).with_order(self.order);
        let mut sum = one.clone();
        let mut power = one;
        for _ in 0..self.order.min(self.ring.truncation()) {
            power = &power * &minus_x;
            sum = &sum + &power;
            if power.is_zero() {
                break;
            }
        }
        Ok(sum.scale(&inv_c0))
    }

    /// Substitute `z_i := 0` for every generator of the coordinate ideal.
    pub fn reduce_mod_ideal(&self, ideal: &IdealSpec) -> Self {
        TruncatedSeries {
            ring: self.ring,
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !ideal.kills(m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Parse the expression grammar into a pure function (no `dz`/`dw`).
    pub fn parse(text: &str, ring: RingSpec) -> Result<Self> {
        crate::parse::parse_series(text, ring)
    }

    /// First monomial, up to the common valid order, where `self` and `other`
    /// differ, with both coefficients.
    pub fn first_difference(&self, other: &Self) -> Option<(Monomial, Rational, Rational)> {
        let order = self.order.min(other.order);
        let diff = (&self.with_order(order)) - &other.with_order(order);
        diff.terms
            .keys()
            .next()
            .map(|m| (*m, self.coefficient(m), other.coefficient(m)))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [order {}]", self, self.order)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_add(rhs).expect("series ring mismatch")
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_sub(rhs).expect("series ring mismatch")
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.checked_mul(rhs).expect("series ring mismatch")
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.neg_ref()
    }
}
