//! Identity checks for the supertrace and `Tr_Λ` on concrete operators.

use super::{gen_supertrace, inclusion_i, Basis, BundleSpec, EndMatrix, Multivector, Operator};
use crate::forms::Form;
use crate::ring::RingSpec;
use crate::verdict::{compare_matrices, compare_multivectors, Tally, Verdict};

/// `tr_s([a, b]_s) = 0` for every unordered pair, including `a = b`.
pub fn verify_bracket_traces(mats: &[(&str, &EndMatrix)]) -> Verdict {
    let mut tally = Tally::new("supertrace.brackets");
    for (i, (na, a)) in mats.iter().enumerate() {
        for (nb, b) in &mats[i..] {
            let tr = a.supercommutator(b).supertrace();
            let zero = Form::zero(tr.ring());
            tally.forms(|| format!("tr_s([{na}, {nb}])"), &tr, &zero);
        }
    }
    tally.finish()
}

/// `Tr_Λ(i(e^U)) = e^U` for every dual basis element.
pub fn verify_trace_inclusion(ring: RingSpec, bundle: BundleSpec) -> Verdict {
    let mut tally = Tally::new("supertrace.inclusion");
    for u in 0..bundle.dim() {
        let alpha = Multivector::basis_element(ring, bundle, Basis::Covector, u);
        let back = gen_supertrace(&inclusion_i(&alpha));
        compare_multivectors(&mut tally, &format!("Tr(i(e^{u:b}))"), &back, &alpha);
    }
    tally.finish()
}

/// `i(Tr_Λ[D, φ]_s) = [D, i(Tr_Λ φ)]_s` for superderivations `D`.
pub fn verify_trace_commutation(ops: &[(&str, &Operator)], mats: &[(&str, &EndMatrix)]) -> Verdict {
    let mut tally = Tally::new("supertrace.commutation");
    for (nd, d) in ops {
        for (nphi, phi) in mats {
            let bracket = d.bracket(&Operator::matrix_only((*phi).clone()));
            let lhs = inclusion_i(&gen_supertrace(&bracket));
            let traced = Operator::matrix_only(inclusion_i(&gen_supertrace(phi)));
            let rhs = d.bracket(&traced);
            compare_matrices(&mut tally, &format!("[{nd}, {nphi}]"), &lhs, &rhs);
        }
    }
    tally.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::TruncatedSeries;
    use crate::superlinear::{contraction, BaseDifferential};

    #[test]
    fn contraction_and_dbar_pass() {
        let ring = RingSpec::new(1, 5).unwrap();
        let bundle = BundleSpec::new(2).unwrap();
        let tau = Multivector::from_functions(
            bundle,
            Basis::Covector,
            &[
                TruncatedSeries::parse("z1*(1 + z1*w1)", ring).unwrap(),
                TruncatedSeries::parse("w1^2 + 3", ring).unwrap(),
            ],
        );
        let it = contraction(&tau).unwrap();
        let eps = EndMatrix::grading(ring, bundle);
        let mats = [("i_tau", &it), ("eps", &eps)];
        assert!(verify_bracket_traces(&mats).passed);
        assert!(verify_trace_inclusion(ring, bundle).passed);
        let dbar = Operator::new(BaseDifferential::DBAR, EndMatrix::zero(ring, bundle));
        let i_op = Operator::matrix_only(it.clone());
        let v = verify_trace_commutation(&[("dbar", &dbar), ("i_tau", &i_op)], &mats);
        assert!(v.passed, "{v}");
    }
}
