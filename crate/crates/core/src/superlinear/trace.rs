//! Derivations, contractions, left multiplication and the generalized
//! supertrace `Tr_Λ`.

use super::{Basis, BundleSpec, EndMatrix, Multivector};
use crate::error::{Error, Result};
use crate::forms::wedge_sign;
use crate::ring::RingSpec;

/// Matrix of `l_η`, left multiplication `ζ ↦ η ζ` in the super product.
pub fn left_mult(eta: &Multivector) -> EndMatrix {
    let (ring, bundle) = (eta.ring(), eta.bundle());
    EndMatrix::from_columns(ring, bundle, |s| {
        eta.wedge(&Multivector::basis_element(ring, bundle, Basis::Vector, s))
            .with_order(eta.valid_order())
    })
}

/// The superderivation of `⋀E` with the given generator images, acting
/// trivially on coefficients. Each image may mix parities; a piece of parity
/// `p` in `D(e_j)` belongs to the derivation component of parity `p + 1`.
pub fn extend_derivation(ring: RingSpec, bundle: BundleSpec, images: &[Multivector]) -> EndMatrix {
    assert_eq!(images.len(), bundle.rank(), "one image per generator");
    let mut out = EndMatrix::zero(ring, bundle);
    for parity in 0..2 {
        let pieces: Vec<Multivector> = images
            .iter()
            .map(|img| multivector_parity_part(img, (parity + 1) % 2))
            .collect();
        if pieces.iter().all(Multivector::is_zero) {
            continue;
        }
        let order = pieces
            .iter()
            .map(Multivector::valid_order)
            .min()
            .unwrap_or(crate::ring::EXACT);
        let mut columns: Vec<Multivector> = Vec::with_capacity(bundle.dim() as usize);
        for s in 0..bundle.dim() {
            let col = if s == 0 {
                Multivector::zero(ring, bundle, Basis::Vector).with_order(order)
            } else {
                // D(e_j ∧ rest) = D(e_j) rest + (-1)^{|D|} e_j D(rest).
                let j = s.trailing_zeros();
                let rest = s & (s - 1);
                let ej = Multivector::basis_element(ring, bundle, Basis::Vector, 1 << j);
                let e_rest = Multivector::basis_element(ring, bundle, Basis::Vector, rest);
                let first = pieces[j as usize].wedge(&e_rest);
                let second = ej.wedge(&columns[rest as usize]);
                if parity == 0 {
                    &first + &second
                } else {
                    &first - &second
                }
            };
            columns.push(col);
        }
        let part = EndMatrix::from_columns(ring, bundle, |s| columns[s as usize].clone());
        out = &out + &part;
    }
    out
}

fn multivector_parity_part(v: &Multivector, parity: u32) -> Multivector {
    let mut out = Multivector::zero(v.ring(), v.bundle(), v.basis()).with_order(v.valid_order());
    for (mask, f) in v.terms() {
        out.add_form(mask, &f.parity_part((parity + mask.count_ones()) % 2));
    }
    out
}

/// The odd-derivation extension of contraction with a covector
/// `c = Σ c_j e^j`: `e_j ↦ c_j`.
pub fn contraction(c: &Multivector) -> Result<EndMatrix> {
    if c.basis() != Basis::Covector {
        return Err(Error::Shape {
            expected: "covector".into(),
            found: "vector".into(),
        });
    }
    if c.terms().any(|(mask, _)| mask.count_ones() != 1) {
        return Err(Error::Shape {
            expected: "exterior degree 1".into(),
            found: format!("{c}"),
        });
    }
    let (ring, bundle) = (c.ring(), c.bundle());
    let images: Vec<Multivector> = c
        .generator_coefficients()
        .into_iter()
        .map(|f| Multivector::term(bundle, Basis::Vector, 0, f))
        .collect();
    Ok(extend_derivation(ring, bundle, &images).with_order(c.valid_order()))
}

/// `i(α)`: sends `e_U` to the pairing `⟨α, e_U⟩` in degree zero.
pub fn inclusion_i(alpha: &Multivector) -> EndMatrix {
    assert_eq!(alpha.basis(), Basis::Covector, "inclusion takes a covector");
    EndMatrix::from_entries(
        alpha.ring(),
        alpha.bundle(),
        alpha.valid_order(),
        alpha.terms().map(|(u, f)| ((0, u), f.clone())),
    )
}

/// `Tr_Λ(φ)`: the coefficient of `e^U` is `(-1)^{|U|} tr_s(l_{e_U} ∘ φ)`,
/// evaluated on every exterior basis element, with coefficients pulled out
/// on the left.
pub fn gen_supertrace(m: &EndMatrix) -> Multivector {
    let (ring, bundle) = (m.ring(), m.bundle());
    let mut out = Multivector::zero(ring, bundle, Basis::Covector).with_order(m.valid_order());
    for u in 0..bundle.dim() {
        let l = left_mult(&Multivector::basis_element(ring, bundle, Basis::Vector, u));
        let tr = l.compose_plain(m).supertrace();
        let tr = if u.count_ones() % 2 == 0 { tr } else { -&tr };
        out.add_form(u, &tr);
    }
    out
}

/// Closed form for `Tr_Λ(E_{T,S})`: `(-1)^{|T|} sgn(e_{S∖T} ∧ e_T) e^{S∖T}`
/// when `T ⊆ S`, zero otherwise. Returns `(mask, sign)`.
pub fn gen_supertrace_of_unit(target: u32, source: u32) -> Option<(u32, i32)> {
    if target & !source != 0 {
        return None;
    }
    let u = source & !target;
    let sign = wedge_sign(u, target)
        * if target.count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        };
    Some((u, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Form;
    use crate::ring::{TruncatedSeries, VarKind};

    fn setup(n: usize, rank: usize) -> (RingSpec, BundleSpec) {
        (RingSpec::new(n, 4).unwrap(), BundleSpec::new(rank).unwrap())
    }

    fn e(r: RingSpec, b: BundleSpec, mask: u32) -> Multivector {
        Multivector::basis_element(r, b, Basis::Vector, mask)
    }

    fn dual(r: RingSpec, b: BundleSpec, mask: u32) -> Multivector {
        Multivector::basis_element(r, b, Basis::Covector, mask)
    }

    #[test]
    fn contraction_examples() {
        let (r, b) = setup(1, 2);
        let i1 = contraction(&dual(r, b, 0b01)).unwrap();
        let i2 = contraction(&dual(r, b, 0b10)).unwrap();
        assert_eq!(i1.apply(&e(r, b, 0b11)), e(r, b, 0b10));
        assert_eq!(i2.apply(&e(r, b, 0b11)), -&e(r, b, 0b01));
        let z = TruncatedSeries::parse("z1", r).unwrap();
        let w = TruncatedSeries::parse("w1", r).unwrap();
        let c = Multivector::from_functions(b, Basis::Covector, &[z.clone(), w.clone()]);
        let want = &Multivector::term(b, Basis::Vector, 0b10, Form::function(z))
            - &Multivector::term(b, Basis::Vector, 0b01, Form::function(w));
        assert_eq!(contraction(&c).unwrap().apply(&e(r, b, 0b11)), want);
        assert!(contraction(&dual(r, b, 0b11)).is_err());
    }

    #[test]
    fn left_multiplication_examples() {
        let (r, b) = setup(1, 2);
        assert_eq!(
            left_mult(&e(r, b, 0b01)).apply(&e(r, b, 0b10)),
            e(r, b, 0b11)
        );
        assert!(left_mult(&e(r, b, 0b01)).apply(&e(r, b, 0b01)).is_zero());
        assert_eq!(left_mult(&e(r, b, 0b11)).apply(&e(r, b, 0)), e(r, b, 0b11));
    }

    #[test]
    fn derivation_with_zero_images_is_zero() {
        let (r, b) = setup(1, 3);
        let zero = Multivector::zero(r, b, Basis::Vector);
        assert!(extend_derivation(r, b, &[zero.clone(), zero.clone(), zero]).is_zero());
    }

    #[test]
    fn derivation_with_wedge_image() {
        // e_1 ↦ e_1 ∧ e_2, so the derivation is odd; e_2 ↦ 0.
        let (r, b) = setup(1, 2);
        let d = extend_derivation(
            r,
            b,
            &[e(r, b, 0b11), Multivector::zero(r, b, Basis::Vector)],
        );
        assert_eq!(d.apply(&e(r, b, 0b01)), e(r, b, 0b11));
        // Leibniz: D(e1 e2) = D(e1) e2 - e1 D(e2) = e1 e2 e2 = 0.
        assert!(d.apply(&e(r, b, 0b11)).is_zero());
        assert_eq!(d.parity(), Some(1));
    }

    #[test]
    fn gen_supertrace_basics() {
        let (r, b) = setup(1, 2);
        for u in 0..4 {
            assert_eq!(gen_supertrace(&inclusion_i(&dual(r, b, u))), dual(r, b, u));
        }
        // Contraction has vanishing trace in rank 2.
        let tau = Multivector::from_functions(
            b,
            Basis::Covector,
            &[
                TruncatedSeries::parse("z1", r).unwrap(),
                TruncatedSeries::parse("1 + w1", r).unwrap(),
            ],
        );
        assert!(gen_supertrace(&contraction(&tau).unwrap()).is_zero());
        let (r1, b1) = setup(1, 1);
        let tau1 = Multivector::from_functions(
            b1,
            Basis::Covector,
            &[TruncatedSeries::parse("z1*w1", r1).unwrap()],
        );
        assert_eq!(gen_supertrace(&contraction(&tau1).unwrap()), tau1);
    }

    #[test]
    fn gen_supertrace_matches_closed_form() {
        let (r, b) = setup(1, 3);
        let dz = Form::generator(r, VarKind::Z, 1);
        for t in 0..8u32 {
            for s in 0..8u32 {
                let m = EndMatrix::from_entries(r, b, crate::ring::EXACT, [((t, s), dz.clone())]);
                let got = gen_supertrace(&m);
                let want = match gen_supertrace_of_unit(t, s) {
                    Some((u, sign)) => {
                        Multivector::term(b, Basis::Covector, u, dz.scale_int(sign as i64))
                    }
                    None => Multivector::zero(r, b, Basis::Covector),
                };
                assert_eq!(got, want, "E_({t},{s})");
            }
        }
    }
}
