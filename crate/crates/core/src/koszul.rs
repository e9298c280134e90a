//! Koszul complex of a holomorphic section and the chain map `ψ` into the
//! Dolbeault complex `𝒜^{r,*}`.
//!
//! With `R` the curvature on `E^∨` and `ι = ι_{∇τ}`, the map on `⋀^p E` is
//!
//! ```text
//! ψ_p(e_S) = (1/p!) Σ_J sgn(S^c, S) sgn(J, J^c) det R_{J,S^c} ∧ ι^p(e_{J^c})
//! ```
//!
//! where `sgn(A, B)` is the sign of `e_A ∧ e_B` against the sorted basis,
//! `S^c` is the complement of `S` and `J` runs over subsets of size `r - p`.
//! This is `(1/p!) ι^p ∘ φ_p^{-1} ∘ ⋀^{r-p}R ∘ φ_p` with
//! `φ_p(α)(β) = β ∧ α`.

use std::collections::BTreeMap;

use crate::connections::{chern_form_top, curvature_on_covector, Connection, FormMatrix};
use crate::error::{Error, Result};
use crate::forms::{wedge_sign, Form};
use crate::ring::{
    int, solve_graded_linear, IdealSpec, LinearEquation, RingSpec, TruncatedSeries, VarKind,
};
use crate::superlinear::{contraction, Basis, BundleSpec, EndMatrix, Multivector};
use crate::verdict::{compare_matrices, compare_multivectors, Tally, Verdict};

/// Express each ideal generator through the section: returns `u` with
/// `z_{vars[i]} = Σ_j u[j][i] τ_j` (so `u[j][i]` is `u_{ji}`).
pub fn ideal_certificate(
    tau: &[TruncatedSeries],
    ideal: &IdealSpec,
    order: u32,
) -> Result<Vec<Vec<TruncatedSeries>>> {
    let ring = tau[0].ring();
    let r = tau.len();
    let mut u = vec![vec![TruncatedSeries::zero(ring); ideal.len()]; r];
    for (i, &var) in ideal.vars().iter().enumerate() {
        let mut eq = LinearEquation::new(TruncatedSeries::var(ring, VarKind::Z, var));
        for (j, t) in tau.iter().enumerate() {
            eq = eq.with_term(j, t.clone());
        }
        let sol = solve_graded_linear(ring, r, &[eq], order).map_err(|e| match e {
            Error::Inconsistent { degree, witness } => Error::Hypothesis(format!(
                "z{var} is not in the ideal generated by tau (obstruction at degree {degree}: {witness})"
            )),
            other => other,
        })?;
        for (j, s) in sol.into_iter().enumerate() {
            u[j][i] = s;
        }
    }
    Ok(u)
}

/// Check that every component of `τ` vanishes on `Z`.
pub fn require_tau_in_ideal(tau: &[TruncatedSeries], ideal: &IdealSpec) -> Result<()> {
    for (j, t) in tau.iter().enumerate() {
        if !t.reduce_mod_ideal(ideal).is_zero() {
            return Err(Error::Hypothesis(format!(
                "tau[{}] = {t} does not vanish modulo the ideal",
                j + 1
            )));
        }
    }
    Ok(())
}

/// `φ_p(e_S) = sgn(S^c, S) e^{S^c} ⊗ e_top` for every `|S| = p`, as
/// `S ↦ (S^c, sign)`. The inverse has the same signs.
pub fn phi_p(bundle: BundleSpec, p: u32) -> BTreeMap<u32, (u32, i32)> {
    let full = bundle.full_mask();
    bundle
        .masks_of_degree(p)
        .map(|s| {
            let c = full & !s;
            (s, (c, wedge_sign(c, s)))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct KoszulData {
    connection: Connection,
    tau: Multivector,
    ideal: IdealSpec,
    nabla_tau: Multivector,
    r: FormMatrix,
    r_tau: Multivector,
    certificate: Vec<Vec<TruncatedSeries>>,
}

impl KoszulData {
    pub fn new(connection: Connection, tau: &[TruncatedSeries], ideal: IdealSpec) -> Result<Self> {
        let bundle = connection.bundle();
        if tau.len() != bundle.rank() {
            return Err(Error::BundleMismatch(bundle.rank(), tau.len()));
        }
        if let Some((j, t)) = tau.iter().enumerate().find(|(_, t)| !t.is_holomorphic()) {
            return Err(Error::Hypothesis(format!(
                "tau[{}] = {t} is not holomorphic",
                j + 1
            )));
        }
        connection.require_flat()?;
        require_tau_in_ideal(tau, &ideal)?;
        let ring = connection.ring();
        let certificate = ideal_certificate(tau, &ideal, ring.truncation())?;
        let tau = Multivector::from_functions(bundle, Basis::Covector, tau);
        let nabla_tau = connection.covariant_covector(&tau);
        let r = connection.curvature_r()?;
        let r_tau = curvature_on_covector(&r, &tau);
        Ok(KoszulData {
            connection,
            tau,
            ideal,
            nabla_tau,
            r,
            r_tau,
            certificate,
        })
    }

    pub fn ring(&self) -> RingSpec {
        self.connection.ring()
    }

    pub fn bundle(&self) -> BundleSpec {
        self.connection.bundle()
    }

    pub fn connection(&self) -> &Connection {
        &self.connection
    }

    pub fn tau(&self) -> &Multivector {
        &self.tau
    }

    pub fn ideal(&self) -> &IdealSpec {
        &self.ideal
    }

    pub fn nabla_tau(&self) -> &Multivector {
        &self.nabla_tau
    }

    pub fn r_tau(&self) -> &Multivector {
        &self.r_tau
    }

    pub fn curvature(&self) -> &FormMatrix {
        &self.r
    }

    /// `u_{ji}` with `z_{vars[i]} = Σ_j u_{ji} τ_j`.
    pub fn certificate(&self) -> &[Vec<TruncatedSeries>] {
        &self.certificate
    }

    pub fn iota_tau(&self) -> EndMatrix {
        contraction(&self.tau).expect("degree-one covector")
    }

    pub fn iota_nabla_tau(&self) -> EndMatrix {
        contraction(&self.nabla_tau).expect("degree-one covector")
    }

    pub fn iota_r_tau(&self) -> EndMatrix {
        contraction(&self.r_tau).expect("degree-one covector")
    }

    /// `[∂̄, ι_{∇τ}]_s = ι_{R(τ)}` and `[ι_{∇τ}, ι_{R(τ)}]_s = 0`, plus the
    /// identity `[∇_{⋀E}, ι_τ]_s = ι_{∇τ}` linking the two descriptions of `∇τ`.
    pub fn verify_bracket_facts(&self) -> Verdict {
        let mut tally = Tally::new("koszul.bracket_facts");
        let inabla = self.iota_nabla_tau();
        let ir = self.iota_r_tau();
        compare_matrices(&mut tally, "[dbar, i_nabla_tau]", &inabla.dbar(), &ir);
        let zero = EndMatrix::zero(self.ring(), self.bundle());
        compare_matrices(
            &mut tally,
            "[i_nabla_tau, i_R_tau]",
            &inabla.supercommutator(&ir),
            &zero,
        );
        let nabla = self.connection.exterior_extension();
        let itau = crate::superlinear::Operator::matrix_only(self.iota_tau());
        compare_matrices(&mut tally, "[nabla, i_tau]", &nabla.bracket(&itau), &inabla);
        tally.finish()
    }

    /// `ψ_p` on every basis element of `⋀^p E`.
    pub fn psi(&self) -> Psi {
        let ring = self.ring();
        let bundle = self.bundle();
        let r = bundle.rank() as u32;
        let inabla = self.iota_nabla_tau();
        let mut maps = Vec::with_capacity(r as usize + 1);
        let mut factorial = int(1);
        for p in 0..=r {
            if p > 0 {
                factorial *= int(p as i64);
            }
            let mut map = BTreeMap::new();
            for (s, (sc, sign_s)) in phi_p(bundle, p) {
                let sc_idx = indices(sc);
                let mut acc = Multivector::zero(ring, bundle, Basis::Vector);
                for j in bundle.masks_of_degree(r - p) {
                    let jc = bundle.full_mask() & !j;
                    let minor = self.r.minor(&indices(j), &sc_idx);
                    if minor.is_zero() {
                        continue;
                    }
                    let sign = sign_s * wedge_sign(j, jc);
                    let v =
                        Multivector::term(bundle, Basis::Vector, jc, minor.scale_int(sign as i64));
                    acc = &acc + &v;
                }
                for _ in 0..p {
                    acc = inabla.apply(&acc);
                }
                let value = acc.coefficient(0).scale(&factorial.recip());
                map.insert(s, value);
            }
            maps.push(map);
        }
        Psi { maps }
    }

    /// The ladder `∂̄ ∘ ψ_p = ψ_{p-1} ∘ ι_τ` on every basis element, the
    /// bidegree of each `ψ_p`, the identities `ψ_0 = det R` and
    /// `ψ_r = ι_{∇τ}^r / r!`, and the operator identity
    /// `∂̄ ∘ ι^p/p! = ι^{p-1}/(p-1)! ∘ ι_{R(τ)}` both as a bracket and on
    /// `∂̄`-closed inputs.
    pub fn verify_chain_map_psi(&self) -> Verdict {
        let psi = self.psi();
        let bundle = self.bundle();
        let ring = self.ring();
        let r = bundle.rank() as u32;
        let mut tally = Tally::new("koszul.chain_map");
        let itau = self.iota_tau();

        for p in 0..=r {
            for (s, value) in &psi.maps[p as usize] {
                let wrong = value.filter_bidegree_complement(r, r - p);
                if !wrong.is_zero() {
                    tally.forms(
                        || format!("bidegree of psi_{p}(e_{s:b})"),
                        &wrong,
                        &Form::zero(ring),
                    );
                }
            }
        }

        for p in 1..=r {
            for s in bundle.masks_of_degree(p) {
                let lhs = psi.eval(p, s).dbar();
                let image = itau.apply(&Multivector::basis_element(ring, bundle, Basis::Vector, s));
                let rhs = psi.apply(&image);
                tally.forms(
                    || {
                        format!(
                            "dbar psi_{p}(e_{}) vs psi_{}(i_tau e)",
                            mask_label(s),
                            p - 1
                        )
                    },
                    &lhs,
                    &rhs,
                );
            }
        }

        tally.forms(
            || "psi_0 = det R".into(),
            &psi.eval(0, 0),
            &chern_form_top(&self.r),
        );
        let inabla = self.iota_nabla_tau();
        let top = bundle.full_mask();
        let mut factorial = int(1);
        for k in 1..=r as i64 {
            factorial *= int(k);
        }
        let direct = inabla
            .pow(r)
            .apply(&Multivector::basis_element(
                ring,
                bundle,
                Basis::Vector,
                top,
            ))
            .coefficient(0)
            .scale(&factorial.recip());
        tally.forms(
            || "psi_r = i_nabla_tau^r / r!".into(),
            &psi.eval(r, top),
            &direct,
        );

        let ir = self.iota_r_tau();
        let mut fact_p = int(1);
        for p in 1..=r {
            fact_p *= int(p as i64);
            let fact_pm1 = &fact_p / int(p as i64);
            let lhs = inabla.pow(p).scale(&fact_p.recip());
            let rhs = inabla.pow(p - 1).compose(&ir).scale(&fact_pm1.recip());
            compare_matrices(
                &mut tally,
                &format!("[dbar, i^{p}/{p}!]"),
                &lhs.dbar(),
                &rhs,
            );
            for input in self.closed_inputs(r - p) {
                for s in bundle.masks_of_degree(p) {
                    let v = Multivector::term(bundle, Basis::Vector, s, input.clone());
                    let l = lhs.apply(&v).dbar();
                    let rr = rhs.apply(&v);
                    compare_multivectors(
                        &mut tally,
                        &format!("bracket identity on closed input, p={p}"),
                        &l,
                        &rr,
                    );
                }
            }
        }
        tally.finish()
    }

    /// Sample `∂̄`-closed forms of bidegree `(k, k)`: minors of `R` and
    /// `dz_I ∧ dw_J` with a holomorphic coefficient.
    fn closed_inputs(&self, k: u32) -> Vec<Form> {
        let ring = self.ring();
        let n = ring.num_vars();
        let mut out = Vec::new();
        let r = self.r.size();
        let subsets: Vec<Vec<usize>> = (0u32..1 << r)
            .filter(|m| m.count_ones() == k)
            .map(indices)
            .collect();
        for rows in &subsets {
            for cols in &subsets {
                let m = self.r.minor(rows, cols);
                if !m.is_zero() {
                    out.push(m);
                }
            }
        }
        let zbits = (1u32 << n) - 1;
        let holo = TruncatedSeries::from_integer(ring, 1);
        let z1 = TruncatedSeries::var(ring, VarKind::Z, 1);
        let coeff = &holo + &z1;
        for zi in (0..1u32 << n).filter(|m| m.count_ones() == k) {
            for wj in (0..1u32 << n).filter(|m| m.count_ones() == k) {
                let mask = (zi & zbits) | (wj << n);
                out.push(Form::term(mask, coeff.clone()));
            }
        }
        out
    }

    /// `ψ_r(e_1 ∧ … ∧ e_r) ≡ ∂τ_1 ∧ … ∧ ∂τ_r` modulo the ideal.
    pub fn fundamental_class_local(&self) -> Verdict {
        let psi = self.psi();
        let top = self.bundle().full_mask();
        let r = self.bundle().rank() as u32;
        let lhs = psi.eval(r, top).reduce_mod_ideal(&self.ideal);
        let mut rhs = Form::one(self.ring());
        for c in self.tau.generator_coefficients() {
            rhs = rhs.wedge(&c.partial());
        }
        let rhs = rhs.reduce_mod_ideal(&self.ideal);
        let mut tally = Tally::new("koszul.fundamental_class");
        tally.forms(
            || "psi_r(e_top) vs d tau_1 ^ ... ^ d tau_r mod I".into(),
            &lhs,
            &rhs,
        );
        tally
            .finish()
            .with_detail(format!("psi_r(e_top) mod I = {lhs}"))
    }

    /// `ι_τ² = 0`, and `[∂̄, ι_τ]_s = 0` for the holomorphic section.
    pub fn verify_koszul_differential(&self) -> Verdict {
        let mut tally = Tally::new("koszul.differential");
        let it = self.iota_tau();
        let zero = EndMatrix::zero(self.ring(), self.bundle());
        compare_matrices(&mut tally, "i_tau^2", &it.compose(&it), &zero);
        compare_matrices(&mut tally, "[dbar, i_tau]", &it.dbar(), &zero);
        tally.finish()
    }

    /// Every Koszul verdict.
    pub fn verdicts(&self) -> Vec<Verdict> {
        vec![
            self.verify_koszul_differential(),
            self.verify_bracket_facts(),
            self.verify_chain_map_psi(),
            self.fundamental_class_local(),
        ]
    }
}

/// The maps `ψ_p`, indexed by `p`, each sending a basis mask to a form.
#[derive(Clone, Debug)]
pub struct Psi {
    pub maps: Vec<BTreeMap<u32, Form>>,
}

impl Psi {
    pub fn eval(&self, p: u32, s: u32) -> Form {
        self.maps[p as usize][&s].clone()
    }

    /// Extend by linearity over functions: `ψ(f e_S) = f ψ(e_S)`.
    pub fn apply(&self, v: &Multivector) -> Form {
        let mut out = Form::zero_with_order(v.ring(), v.valid_order());
        for (s, coeff) in v.terms() {
            out = &out + &coeff.wedge(&self.eval(s.count_ones(), s));
        }
        out
    }
}

pub(crate) fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

fn mask_label(mask: u32) -> String {
    crate::superlinear::ext_mask_to_string(mask, Basis::Vector)
}

impl Form {
    /// The terms of any bidegree other than `(p, q)`.
    pub(crate) fn filter_bidegree_complement(&self, p: u32, q: u32) -> Form {
        self - &self.bidegree_part(p, q)
    }
}
