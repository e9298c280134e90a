//! Flat `(1,0)`-connections, their duals and exterior extensions, curvature,
//! the top Chern form and the Chern character of a superconnection.
//!
//! Frame convention: `∇e_j = Σ_i Γ_ij e_i`, so flatness reads
//! `∂Γ + Γ∧Γ = 0` and the dual frame satisfies `∇e^j = Σ_i Γ^∨_ij e^i` with
//! `Γ^∨ = -Γ^T`.

use crate::error::{Error, Result};
use crate::forms::Form;
use crate::ring::{int, RingSpec};
use crate::superlinear::{
    extend_derivation, BaseDifferential, Basis, BundleSpec, EndMatrix, Multivector, Operator,
};
use crate::verdict::{compare_matrices, Tally, Verdict};

/// A square matrix of forms, multiplied with the wedge product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    ring: RingSpec,
    rows: Vec<Vec<Form>>,
}

impl FormMatrix {
    pub fn new(ring: RingSpec, rows: Vec<Vec<Form>>) -> Result<Self> {
        let r = rows.len();
        if let Some(bad) = rows.iter().find(|row| row.len() != r) {
            return Err(Error::Shape {
                expected: format!("{r}x{r} matrix"),
                found: format!("row of length {}", bad.len()),
            });
        }
        Ok(FormMatrix { ring, rows })
    }

    pub fn zero(ring: RingSpec, r: usize) -> Self {
        FormMatrix {
            ring,
            rows: vec![vec![Form::zero(ring); r]; r],
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Form>] {
        &self.rows
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> FormMatrix {
        FormMatrix {
            ring: self.ring,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> FormMatrix {
        let r = self.size();
        FormMatrix {
            ring: self.ring,
            rows: (0..r)
                .map(|i| (0..r).map(|j| self.rows[j][i].clone()).collect())
                .collect(),
        }
    }

    pub fn mul(&self, other: &FormMatrix) -> FormMatrix {
        let r = self.size();
        let mut rows = vec![vec![Form::zero(self.ring); r]; r];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for k in 0..r {
                    *cell = &*cell + &self.rows[i][k].wedge(&other.rows[k][j]);
                }
            }
        }
        FormMatrix {
            ring: self.ring,
            rows,
        }
    }

    pub fn add(&self, other: &FormMatrix) -> FormMatrix {
        let r = self.size();
        FormMatrix {
            ring: self.ring,
            rows: (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| &self.rows[i][j] + &other.rows[i][j])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &FormMatrix) -> FormMatrix {
        self.add(&other.map(|f| -f))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Form::is_zero)
    }

    /// Leibniz determinant with wedge products, rows taken in order. For
    /// matrices of even forms this is the ordinary determinant.
    pub fn det(&self) -> Form {
        let rows: Vec<usize> = (0..self.size()).collect();
        self.minor(&rows, &rows)
    }

    /// Determinant of the submatrix with the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Form {
        assert_eq!(rows.len(), cols.len());
        if rows.is_empty() {
            return Form::one(self.ring);
        }
        let mut out = Form::zero(self.ring);
        let mut perm: Vec<usize> = (0..cols.len()).collect();
        permutations(&mut perm, 0, &mut |p, sign| {
            let mut prod =
                Form::function(crate::ring::TruncatedSeries::constant(self.ring, int(sign)));
            for (k, &pk) in p.iter().enumerate() {
                prod = prod.wedge(&self.rows[rows[k]][cols[pk]]);
                if prod.is_zero() {
                    return;
                }
            }
            out = &out + &prod;
        });
        out
    }

    /// First differing entry `(i, j)` with the usual witness data.
    pub fn compare(&self, other: &FormMatrix, name: &str, tally: &mut Tally) {
        for i in 0..self.size() {
            for j in 0..self.size() {
                tally.forms(
                    || format!("{name}[{},{}]", i + 1, j + 1),
                    &self.rows[i][j],
                    &other.rows[i][j],
                );
            }
        }
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize], i64)) {
    fn go(p: &mut Vec<usize>, k: usize, sign: i64, visit: &mut impl FnMut(&[usize], i64)) {
        if k == p.len() {
            visit(p, sign);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(p, k + 1, if i == k { sign } else { -sign }, visit);
            p.swap(k, i);
        }
    }
    go(p, k, 1, visit)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    bundle: BundleSpec,
    gamma: FormMatrix,
}

impl Connection {
    /// `∇ = ∂ + Γ`; every entry must have bidegree `(1, 0)`.
    pub fn new(bundle: BundleSpec, gamma: FormMatrix) -> Result<Self> {
        if gamma.size() != bundle.rank() {
            return Err(Error::BundleMismatch(bundle.rank(), gamma.size()));
        }
        for (i, row) in gamma.rows().iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                f.require_bidegree(1, 0, &format!("gamma[{}][{}]", i + 1, j + 1))?;
            }
        }
        Ok(Connection { bundle, gamma })
    }

    pub fn trivial(ring: RingSpec, bundle: BundleSpec) -> Self {
        Connection {
            bundle,
            gamma: FormMatrix::zero(ring, bundle.rank()),
        }
    }

    pub fn bundle(&self) -> BundleSpec {
        self.bundle
    }

    pub fn ring(&self) -> RingSpec {
        self.gamma.ring()
    }

    pub fn gamma(&self) -> &FormMatrix {
        &self.gamma
    }

    /// `∂Γ + Γ∧Γ`.
    pub fn flatness_defect(&self) -> FormMatrix {
        self.gamma
            .map(Form::partial)
            .add(&self.gamma.mul(&self.gamma))
    }

    pub fn check_flat(&self) -> Verdict {
        let mut tally = Tally::new("connection.flat");
        let zero = FormMatrix::zero(self.ring(), self.bundle.rank());
        self.flatness_defect()
            .compare(&zero, "dGamma+Gamma^Gamma", &mut tally);
        tally.finish()
    }

    pub fn require_flat(&self) -> Result<()> {
        let v = self.check_flat();
        match v.witness {
            Some(w) if !v.passed => Err(Error::NotFlat(w)),
            _ => Ok(()),
        }
    }

    /// The induced connection on `E^∨`: `Γ^∨ = -Γ^T`.
    pub fn dual(&self) -> Connection {
        Connection {
            bundle: self.bundle,
            gamma: self.gamma.transpose().map(|f| -f),
        }
    }

    /// The odd operator `∂ + Γ̃` on `⋀E`, where `Γ̃` is the derivation
    /// extension of `e_j ↦ Σ_i Γ_ij e_i`.
    pub fn exterior_extension(&self) -> Operator {
        let ring = self.ring();
        let images: Vec<Multivector> = (0..self.bundle.rank())
            .map(|j| {
                let col: Vec<Form> = (0..self.bundle.rank())
                    .map(|i| self.gamma.get(i, j).clone())
                    .collect();
                Multivector::from_forms(self.bundle, Basis::Vector, &col)
            })
            .collect();
        Operator::new(
            BaseDifferential::PARTIAL,
            extend_derivation(ring, self.bundle, &images),
        )
    }

    /// `∇τ` for a covector of functions: `(∇τ)_j = ∂τ_j + Σ_k Γ^∨_jk τ_k`.
    pub fn covariant_covector(&self, tau: &Multivector) -> Multivector {
        let dual = self.dual();
        let coeffs = tau.generator_coefficients();
        let out: Vec<Form> = (0..self.bundle.rank())
            .map(|j| {
                let mut acc = coeffs[j].partial();
                for (k, c) in coeffs.iter().enumerate() {
                    acc = &acc + &dual.gamma.get(j, k).wedge(c);
                }
                acc
            })
            .collect();
        Multivector::from_forms(self.bundle, Basis::Covector, &out)
    }

    /// Curvature of the induced connection `∂̄ + ∇^∨` on `E^∨`:
    /// `R = [∇^∨, ∂̄]_s = ∂̄Γ^∨` entrywise.
    pub fn curvature_r(&self) -> Result<FormMatrix> {
        self.require_flat()?;
        Ok(self.dual().gamma.map(Form::dbar))
    }

    /// `[∇̃^∨, R]_s = dR + Γ^∨R - RΓ^∨` for the dual connection.
    pub fn bianchi_defect(&self) -> Result<FormMatrix> {
        let r = self.curvature_r()?;
        let g = &self.dual().gamma;
        Ok(r.map(Form::d).add(&g.mul(&r)).sub(&r.mul(g)))
    }
}

/// `R(τ)_j = Σ_k R_jk τ_k` for a curvature matrix on `E^∨`.
pub fn curvature_on_covector(r: &FormMatrix, tau: &Multivector) -> Multivector {
    let coeffs = tau.generator_coefficients();
    let out: Vec<Form> = (0..r.size())
        .map(|j| {
            let mut acc = Form::zero(r.ring());
            for (k, c) in coeffs.iter().enumerate() {
                acc = &acc + &r.get(j, k).wedge(c);
            }
            acc
        })
        .collect();
    Multivector::from_forms(tau.bundle(), Basis::Covector, &out)
}

/// The top Chern form `det(R)`.
pub fn chern_form_top(r: &FormMatrix) -> Form {
    r.det()
}

/// An odd operator `A = B + M` on form-valued `⋀E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superconnection {
    pub operator: Operator,
}

impl Superconnection {
    /// `A = ∇ + δ`, after checking `∇² = 0` and `δ² = 0`.
    pub fn from_halves(nabla: &Operator, delta: &Operator) -> Result<Self> {
        for (name, half) in [("nabla", nabla), ("delta", delta)] {
            let sq = half.square();
            let zero = EndMatrix::zero(sq.ring(), sq.bundle());
            let mut tally = Tally::new(name);
            compare_matrices(&mut tally, name, &sq, &zero);
            let v = tally.finish();
            if let (false, Some(w)) = (v.passed, v.witness) {
                return Err(Error::NotFlatHalves {
                    half: name.into(),
                    witness: w,
                });
            }
        }
        Ok(Superconnection {
            operator: nabla.add(delta),
        })
    }

    /// `R_A = A²` as a matrix; the scalar differential parts cancel.
    pub fn supercurvature(&self) -> EndMatrix {
        self.operator.square()
    }
}

/// `tr_s(exp R_A) = Σ_k tr_s(R_A^k) / k!`; every summand of `R_A` carries
/// form degree at least one, so `k ≤ 2n` suffices.
pub fn chern_character(ra: &EndMatrix) -> Form {
    let ring = ra.ring();
    let mut out = Form::zero_with_order(ring, ra.valid_order());
    let mut power = EndMatrix::identity(ring, ra.bundle()).with_order(ra.valid_order());
    let mut factorial = int(1);
    for k in 0..=(2 * ring.num_vars()) as i64 {
        if k > 0 {
            power = power.compose(ra);
            factorial *= int(k);
        }
        out = &out + &power.supertrace().scale(&factorial.recip());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::TruncatedSeries;

    fn example_a(d: u32) -> Connection {
        let ring = RingSpec::new(1, d).unwrap();
        let b = BundleSpec::new(1).unwrap();
        let g = Form::parse("-w1*(1 + z1*w1)^-1*dz1", ring).unwrap();
        Connection::new(b, FormMatrix::new(ring, vec![vec![g]]).unwrap()).unwrap()
    }

    #[test]
    fn flatness() {
        let ring = RingSpec::new(2, 4).unwrap();
        let b = BundleSpec::new(2).unwrap();
        assert!(Connection::trivial(ring, b).check_flat().passed);
        assert!(example_a(8).check_flat().passed);
        let bad = Form::parse("z2*dz1", ring).unwrap();
        let c = Connection::new(
            BundleSpec::new(1).unwrap(),
            FormMatrix::new(ring, vec![vec![bad]]).unwrap(),
        )
        .unwrap();
        let v = c.check_flat();
        assert!(!v.passed);
        assert!(v.witness.is_some());
    }

    #[test]
    fn wrong_bidegree_is_rejected() {
        let ring = RingSpec::new(1, 4).unwrap();
        let g = Form::parse("-z1*w1*dw1", ring).unwrap();
        let err = Connection::new(
            BundleSpec::new(1).unwrap(),
            FormMatrix::new(ring, vec![vec![g]]).unwrap(),
        );
        assert!(matches!(err, Err(Error::Bidegree(_))));
    }

    #[test]
    fn example_a_curvature() {
        let c = example_a(8);
        let ring = c.ring();
        let r = c.curvature_r().unwrap();
        // Oracle: ∂_w (w/(1+zw)) = (1+zw)^{-2}, expanded independently.
        let want = Form::parse("(1 + z1*w1)^-2*dw1*dz1", ring).unwrap();
        assert_eq!(r.get(0, 0).first_difference(&want), None);
        assert_eq!(chern_form_top(&r).first_difference(&want), None);
        assert!(r.get(0, 0).dbar().is_zero());
        assert!(c.bianchi_defect().unwrap().is_zero());
    }

    #[test]
    fn dual_is_negative_transpose() {
        let ring = RingSpec::new(2, 4).unwrap();
        let b = BundleSpec::new(2).unwrap();
        let f = |s: &str| Form::parse(s, ring).unwrap();
        let g = FormMatrix::new(
            ring,
            vec![vec![f("z1*dz1"), f("w2*dz2")], vec![f("0"), f("dz1")]],
        )
        .unwrap();
        let c = Connection::new(b, g.clone()).unwrap();
        let d = c.dual();
        assert_eq!(d.gamma().get(0, 1), &-g.get(1, 0));
        assert_eq!(d.gamma().get(1, 0), &-g.get(0, 1));
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn exterior_extension_on_generator() {
        let c = example_a(6);
        let ring = c.ring();
        let b = c.bundle();
        let op = c.exterior_extension();
        let e1 = Multivector::basis_element(ring, b, Basis::Vector, 1);
        let want = Multivector::term(b, Basis::Vector, 1, c.gamma().get(0, 0).clone());
        assert_eq!(op.apply(&e1).first_difference(&want), None);
        assert!(!op.apply(&e1).is_zero());
    }

    #[test]
    fn determinant_of_diagonal() {
        let ring = RingSpec::new(2, 4).unwrap();
        let f = |s: &str| Form::parse(s, ring).unwrap();
        let m = FormMatrix::new(
            ring,
            vec![vec![f("z1*dz1*dw1"), f("0")], vec![f("0"), f("dz2*dw2")]],
        )
        .unwrap();
        assert_eq!(m.det(), f("z1*dz1*dw1").wedge(&f("dz2*dw2")));
        assert!(FormMatrix::zero(ring, 2).det().is_zero());
        let _ = TruncatedSeries::zero(ring);
    }
}
