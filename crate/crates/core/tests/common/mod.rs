#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use superkoszul::forms::Form;
use superkoszul::ring::{monomials_up_to, Rational, RingSpec, TruncatedSeries};
use superkoszul::superlinear::{extend_derivation, Basis, BundleSpec, EndMatrix, Multivector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-3i64..=3);
    }
    Rational::from_integer(c.into())
}

pub fn series(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    max_terms: usize,
    max_degree: u32,
) -> TruncatedSeries {
    let monos = monomials_up_to(ring.num_vars(), max_degree.min(ring.truncation()));
    let k = rng.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..k)
        .map(|_| (monos[rng.gen_range(0..monos.len())], small(rng)))
        .collect();
    TruncatedSeries::from_terms(ring, ring.truncation(), terms)
}

pub fn unit_series(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    max_terms: usize,
    max_degree: u32,
) -> TruncatedSeries {
    let s = series(rng, ring, max_terms, max_degree);
    let c0 = s.constant_term();
    let shift = if c0 == Rational::from_integer((-1).into()) {
        2
    } else {
        1
    };
    &s + &TruncatedSeries::from_integer(ring, shift)
}

pub fn form(rng: &mut ChaCha8Rng, ring: RingSpec, max_terms: usize, max_degree: u32) -> Form {
    let masks = 1u32 << (2 * ring.num_vars());
    let k = rng.gen_range(0..=max_terms);
    let mut out = Form::zero(ring);
    for _ in 0..k {
        let mask = rng.gen_range(0..masks);
        out = &out + &Form::term(mask, series(rng, ring, 2, max_degree));
    }
    out
}

/// A form all of whose terms have the given degree parity.
pub fn form_of_parity(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    parity: u32,
    max_terms: usize,
    max_degree: u32,
) -> Form {
    form(rng, ring, max_terms, max_degree).parity_part(parity)
}

pub fn matrix(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    bundle: BundleSpec,
    entries: usize,
    max_degree: u32,
) -> EndMatrix {
    let dim = bundle.dim();
    let list: Vec<_> = (0..entries)
        .map(|_| {
            let key = (rng.gen_range(0..dim), rng.gen_range(0..dim));
            (key, form(rng, ring, 2, max_degree))
        })
        .collect();
    EndMatrix::from_entries(ring, bundle, ring.truncation(), list)
}

pub fn multivector(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    bundle: BundleSpec,
    basis: Basis,
    terms: usize,
    max_degree: u32,
) -> Multivector {
    let mut out = Multivector::zero(ring, bundle, basis);
    for _ in 0..terms {
        let mask = rng.gen_range(0..bundle.dim());
        out = &out + &Multivector::term(bundle, basis, mask, form(rng, ring, 2, max_degree));
    }
    out
}

/// A random superderivation of the given parity.
pub fn derivation(
    rng: &mut ChaCha8Rng,
    ring: RingSpec,
    bundle: BundleSpec,
    parity: u32,
    max_degree: u32,
) -> EndMatrix {
    let images: Vec<Multivector> = (0..bundle.rank())
        .map(|_| {
            let mut img = Multivector::zero(ring, bundle, Basis::Vector);
            for _ in 0..rng.gen_range(0..=2) {
                let mask = rng.gen_range(0..bundle.dim());
                let want = (parity + 1 + mask.count_ones()) % 2;
                let f = form_of_parity(rng, ring, want, 2, max_degree);
                img = &img + &Multivector::term(bundle, Basis::Vector, mask, f);
            }
            img
        })
        .collect();
    extend_derivation(ring, bundle, &images)
}
