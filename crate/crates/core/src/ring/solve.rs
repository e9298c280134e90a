//! Linear systems over the truncated ring, solved coefficientwise.
//!
//! Each unknown is a series; each equation `Σ_u c_u · x_u = rhs` becomes one
//! rational equation per monomial of degree `<= order`. Columns are
//! `(monomial, unknown)` pairs ordered by graded monomial order first, rows are
//! processed by increasing degree, and the pivot of each row is its smallest
//! column. Free columns are set to zero, so the returned solution prefers
//! low-degree monomials and is fully deterministic.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{monomials_up_to, Monomial, Rational, RingSpec, TruncatedSeries};
use crate::error::{Error, Result};

/// `Σ_u coeffs[u] · x_u = rhs`, with `u` an index into the unknowns.
#[derive(Clone, Debug)]
pub struct LinearEquation {
    pub coeffs: Vec<(usize, TruncatedSeries)>,
    pub rhs: TruncatedSeries,
}

impl LinearEquation {
    pub fn new(rhs: TruncatedSeries) -> Self {
        LinearEquation {
            coeffs: Vec::new(),
            rhs,
        }
    }

    pub fn with_term(mut self, unknown: usize, coeff: TruncatedSeries) -> Self {
        if !coeff.is_zero() {
            self.coeffs.push((unknown, coeff));
        }
        self
    }
}

type Row = BTreeMap<usize, Rational>;

/// Find series `x_0..x_{k-1}` satisfying every equation up to total degree
/// `order`. Unknown monomials run up to `order - c`, where `c` is the lowest
/// degree among the coefficients, and that is the valid order returned: the
/// equations at degree `<= order` do not constrain anything higher.
pub fn solve_graded_linear(
    ring: RingSpec,
    num_unknowns: usize,
    equations: &[LinearEquation],
    order: u32,
) -> Result<Vec<TruncatedSeries>> {
    let order = order.min(ring.truncation());
    let min_coeff_degree = equations
        .iter()
        .flat_map(|eq| eq.coeffs.iter())
        .filter_map(|(_, c)| c.lowest_degree())
        .min()
        .unwrap_or(0);
    let unknown_degree = order.saturating_sub(min_coeff_degree);
    let unknown_monomials = monomials_up_to(ring.num_vars(), unknown_degree);
    let column = |mono_rank: usize, unknown: usize| mono_rank * num_unknowns + unknown;

    // Assemble rows keyed by (monomial, equation) so iteration follows degree.
    let mut rows: BTreeMap<(Monomial, usize), (Row, Rational)> = BTreeMap::new();
    for (e, eq) in equations.iter().enumerate() {
        for (m, c) in eq.rhs.terms() {
            if m.degree() <= order {
                rows.entry((*m, e))
                    .or_insert_with(|| (Row::new(), Rational::zero()))
                    .1 += c;
            }
        }
        for (u, coeff) in &eq.coeffs {
            assert!(*u < num_unknowns, "unknown index out of range");
            for (mc, cc) in coeff.terms() {
                for (rank, mu) in unknown_monomials.iter().enumerate() {
                    if mc.degree() + mu.degree() > order {
                        break;
                    }
                    let entry = rows
                        .entry((mc.mul(mu), e))
                        .or_insert_with(|| (Row::new(), Rational::zero()));
                    *entry
                        .0
                        .entry(column(rank, *u))
                        .or_insert_with(Rational::zero) += cc;
                }
            }
        }
    }

    let mut pivots: BTreeMap<usize, (Row, Rational)> = BTreeMap::new();
    for ((m, e), (mut row, mut rhs)) in rows {
        row.retain(|_, v| !v.is_zero());
        reduce(&mut row, &mut rhs, &pivots);
        match row.iter().next().map(|(c, v)| (*c, v.clone())) {
            None => {
                if !rhs.is_zero() {
                    return Err(Error::Inconsistent {
                        degree: m.degree(),
                        witness: format!("equation {e} at monomial {m}: residual {rhs}"),
                    });
                }
            }
            Some((pivot, lead)) => {
                let inv = lead.recip();
                for v in row.values_mut() {
                    *v *= &inv;
                }
                rhs *= &inv;
                pivots.insert(pivot, (row, rhs));
            }
        }
    }

    let mut values: HashMap<usize, Rational> = HashMap::new();
    for (&pivot, (row, rhs)) in pivots.iter().rev() {
        let mut v = rhs.clone();
        for (c, a) in row.range(pivot + 1..) {
            if let Some(x) = values.get(c) {
                v -= a * x;
            }
        }
        if !v.is_zero() {
            values.insert(pivot, v);
        }
    }

    let mut out = vec![TruncatedSeries::zero_with_order(ring, unknown_degree); num_unknowns];
    for (col, v) in values {
        let (rank, u) = (col / num_unknowns, col % num_unknowns);
        out[u].add_term(unknown_monomials[rank], v);
    }
    Ok(out)
}

/// Eliminate every pivot column from `row`, scanning columns in ascending
/// order; a pivot row only contains columns at or after its pivot.
fn reduce(row: &mut Row, rhs: &mut Rational, pivots: &BTreeMap<usize, (Row, Rational)>) {
    let mut cursor = 0usize;
    loop {
        let next = row
            .range(cursor..)
            .find(|(c, _)| pivots.contains_key(c))
            .map(|(c, v)| (*c, v.clone()));
        let Some((c, factor)) = next else { break };
        let (prow, prhs) = &pivots[&c];
        for (pc, pv) in prow {
            let entry = row.entry(*pc).or_insert_with(Rational::zero);
            *entry -= &factor * pv;
            if entry.is_zero() {
                row.remove(pc);
            }
        }
        *rhs -= &factor * prhs;
        cursor = c + 1;
    }
}
