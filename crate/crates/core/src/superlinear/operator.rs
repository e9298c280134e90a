use super::{EndMatrix, Multivector};
use crate::forms::Form;

/// Which scalar differentials act on the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct BaseDifferential {
    pub partial: bool,
    pub dbar: bool,
}

impl BaseDifferential {
    pub const NONE: BaseDifferential = BaseDifferential {
        partial: false,
        dbar: false,
    };
    pub const PARTIAL: BaseDifferential = BaseDifferential {
        partial: true,
        dbar: false,
    };
    pub const DBAR: BaseDifferential = BaseDifferential {
        partial: false,
        dbar: true,
    };
    pub const D: BaseDifferential = BaseDifferential {
        partial: true,
        dbar: true,
    };

    pub fn is_none(&self) -> bool {
        !self.partial && !self.dbar
    }

    fn union(self, other: BaseDifferential) -> BaseDifferential {
        BaseDifferential {
            partial: self.partial || other.partial,
            dbar: self.dbar || other.dbar,
        }
    }

    pub fn on_form(&self, f: &Form) -> Form {
        match (self.partial, self.dbar) {
            (false, false) => Form::zero_with_order(f.ring(), f.valid_order()),
            (true, false) => f.partial(),
            (false, true) => f.dbar(),
            (true, true) => f.d(),
        }
    }

    /// `[B, M]_s`, which acts entrywise on the coefficients.
    pub fn bracket(&self, m: &EndMatrix) -> EndMatrix {
        match (self.partial, self.dbar) {
            (false, false) => EndMatrix::zero_with_order(m.ring(), m.bundle(), m.valid_order()),
            (true, false) => m.partial(),
            (false, true) => m.dbar(),
            (true, true) => m.d(),
        }
    }

    pub fn on_multivector(&self, v: &Multivector) -> Multivector {
        if self.is_none() {
            return v.map_forms(v.valid_order(), |f| {
                Form::zero_with_order(f.ring(), f.valid_order())
            });
        }
        v.map_forms(v.valid_order().saturating_sub(1), |f| self.on_form(f))
    }
}

/// An odd operator `B + M` on form-valued `⋀E`: a scalar differential
/// extended trivially to the exterior factors, plus a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    pub base: BaseDifferential,
    pub matrix: EndMatrix,
}

impl Operator {
    pub fn new(base: BaseDifferential, matrix: EndMatrix) -> Self {
        Operator { base, matrix }
    }

    pub fn matrix_only(matrix: EndMatrix) -> Self {
        Operator {
            base: BaseDifferential::NONE,
            matrix,
        }
    }

    pub fn apply(&self, v: &Multivector) -> Multivector {
        let m = self.matrix.apply(v);
        if self.base.is_none() {
            m
        } else {
            &self.base.on_multivector(v) + &m
        }
    }

    /// The supercommutator of two operators. Scalar differentials
    /// supercommute with each other, so the result is always a matrix.
    pub fn bracket(&self, other: &Operator) -> EndMatrix {
        let ring = self.matrix.ring();
        let bundle = self.matrix.bundle();
        let mut out = EndMatrix::zero(ring, bundle);
        // [B1, M2]_s acts entrywise.
        out = &out + &self.base.bracket(&other.matrix);
        // [M1, B2]_s = -(-1)^{|M1|} [B2, M1]_s.
        let even = self.matrix.parity_part(0);
        let odd = self.matrix.parity_part(1);
        out = &out - &other.base.bracket(&even);
        out = &out + &other.base.bracket(&odd);
        &out + &self.matrix.supercommutator(&other.matrix)
    }

    /// `(B + M)^2 = [B, M]_s + M^2` for odd `M`.
    pub fn square(&self) -> EndMatrix {
        let m = &self.matrix;
        debug_assert!(m.parity_part(0).is_zero(), "square expects an odd operator");
        &self.base.bracket(m) + &m.compose(m)
    }

    pub fn add(&self, other: &Operator) -> Operator {
        Operator {
            base: self.base.union(other.base),
            matrix: &self.matrix + &other.matrix,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingSpec, TruncatedSeries};
    use crate::superlinear::{contraction, Basis, BundleSpec};

    #[test]
    fn bracket_with_dbar_is_entrywise_and_matches_evaluation() {
        let r = RingSpec::new(1, 6).unwrap();
        let b = BundleSpec::new(1).unwrap();
        let tau = Multivector::from_functions(
            b,
            Basis::Covector,
            &[TruncatedSeries::parse("z1*(1 + z1*w1)", r).unwrap()],
        );
        let iota = Operator::matrix_only(contraction(&tau).unwrap());
        let dbar = Operator::new(BaseDifferential::DBAR, EndMatrix::zero(r, b));
        let br = dbar.bracket(&iota);
        // Evaluate [∂̄, ι]_s = ∂̄ι + ι∂̄ on f e_1.
        let v = Multivector::term(b, Basis::Vector, 1, Form::parse("w1^2", r).unwrap());
        let lhs = &dbar.apply(&iota.apply(&v)) + &iota.apply(&dbar.apply(&v));
        assert_eq!(br.apply(&v).first_difference(&lhs), None);
        assert_eq!(br, iota.matrix.dbar());
        assert_eq!(iota.bracket(&dbar), br);
    }
}
