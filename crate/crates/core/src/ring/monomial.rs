use std::cmp::Ordering;
use std::fmt;

/// Largest supported number of holomorphic coordinates.
pub const MAX_VARS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Z,
    W,
}

/// Exponent vector over `z_1..z_n, w_1..w_n`.
///
/// `z_i` lives at slot `i-1`, `w_i` at slot `MAX_VARS + i - 1`. Ordering is
/// graded: lower total degree first, then lexicographic with `z_1 > z_2 > … >
/// w_1 > …` placed first among monomials of the same degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u16,
    exps: [u8; 2 * MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        degree: 0,
        exps: [0; 2 * MAX_VARS],
    };

    fn slot(kind: VarKind, index: usize) -> usize {
        debug_assert!((1..=MAX_VARS).contains(&index));
        match kind {
            VarKind::Z => index - 1,
            VarKind::W => MAX_VARS + index - 1,
        }
    }

    pub fn var(kind: VarKind, index: usize) -> Self {
        let mut m = Monomial::ONE;
        m.exps[Self::slot(kind, index)] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exponents(z: &[u8], w: &[u8]) -> Self {
        assert!(z.len() <= MAX_VARS && w.len() <= MAX_VARS);
        let mut m = Monomial::ONE;
        m.exps[..z.len()].copy_from_slice(z);
        m.exps[MAX_VARS..MAX_VARS + w.len()].copy_from_slice(w);
        m.degree = m.exps.iter().map(|&e| e as u16).sum();
        m
    }

    pub fn degree(&self) -> u32 {
        self.degree as u32
    }

    pub fn exponent(&self, kind: VarKind, index: usize) -> u8 {
        self.exps[Self::slot(kind, index)]
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn has_w(&self) -> bool {
        self.exps[MAX_VARS..].iter().any(|&e| e > 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = *self;
        for (a, b) in out.exps.iter_mut().zip(other.exps.iter()) {
            *a += *b;
        }
        out.degree += other.degree;
        out
    }

    /// Divides out one power of a variable; `None` when it does not occur.
    pub fn lower(&self, kind: VarKind, index: usize) -> Option<Monomial> {
        let slot = Self::slot(kind, index);
        if self.exps[slot] == 0 {
            return None;
        }
        let mut out = *self;
        out.exps[slot] -= 1;
        out.degree -= 1;
        Some(out)
    }

    /// Multiply by one more power of a variable.
    pub fn raise(&self, kind: VarKind, index: usize) -> Monomial {
        let mut out = *self;
        out.exps[Self::slot(kind, index)] += 1;
        out.degree += 1;
        out
    }

    pub(crate) fn factors(&self) -> impl Iterator<Item = (VarKind, usize, u8)> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(slot, &e)| {
                if slot < MAX_VARS {
                    (VarKind::Z, slot + 1, e)
                } else {
                    (VarKind::W, slot - MAX_VARS + 1, e)
                }
            })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (kind, index, e) in self.factors() {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = match kind {
                VarKind::Z => 'z',
                VarKind::W => 'w',
            };
            if e == 1 {
                write!(f, "{name}{index}")?;
            } else {
                write!(f, "{name}{index}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All monomials in `z_1..z_n, w_1..w_n` of total degree at most `max_degree`,
/// in ascending monomial order.
pub fn monomials_up_to(num_vars: usize, max_degree: u32) -> Vec<Monomial> {
    let slots: Vec<(VarKind, usize)> = (1..=num_vars)
        .map(|i| (VarKind::Z, i))
        .chain((1..=num_vars).map(|i| (VarKind::W, i)))
        .collect();
    let mut out = vec![Monomial::ONE];
    let mut frontier = vec![(Monomial::ONE, 0usize)];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (k, &(kind, index)) in slots.iter().enumerate().skip(*start) {
                next.push((m.raise(kind, index), k));
            }
        }
        out.extend(next.iter().map(|(m, _)| *m));
        frontier = next;
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order_puts_lower_degree_first() {
        let one = Monomial::ONE;
        let z1 = Monomial::var(VarKind::Z, 1);
        let z2 = Monomial::var(VarKind::Z, 2);
        let w1 = Monomial::var(VarKind::W, 1);
        let z1w1 = z1.mul(&w1);
        assert!(one < z1);
        assert!(z1 < z2);
        assert!(z2 < w1);
        assert!(w1 < z1w1);
    }

    #[test]
    fn enumeration_counts_match_binomials() {
        // C(2n + d, d) monomials of degree <= d in 2n variables.
        assert_eq!(monomials_up_to(1, 3).len(), 10);
        assert_eq!(monomials_up_to(2, 6).len(), 210);
        let ms = monomials_up_to(2, 4);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn display() {
        let m = Monomial::from_exponents(&[2, 0], &[1, 3]);
        assert_eq!(m.to_string(), "z1^2*w1*w2^3");
        assert_eq!(m.degree(), 6);
    }
}
