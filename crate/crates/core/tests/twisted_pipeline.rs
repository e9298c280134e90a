use std::time::Instant;

use superkoszul::connections::{Connection, FormMatrix};
use superkoszul::forms::Form;
use superkoszul::koszul::KoszulData;
use superkoszul::ring::{IdealSpec, RingSpec, TruncatedSeries};
use superkoszul::superlinear::BundleSpec;
use superkoszul::twisted::{
    build_comparison, fundamental_class_local_twisted, verify_comparison, RealSection,
    TwistedPipeline,
};

fn s(text: &str, ring: RingSpec) -> TruncatedSeries {
    TruncatedSeries::parse(text, ring).unwrap()
}

fn run_all(p: &TwistedPipeline) {
    for v in p.verdicts() {
        assert!(v.passed, "{v}");
    }
    let c = build_comparison(p).unwrap();
    for v in [
        verify_comparison(p, &c),
        fundamental_class_local_twisted(p, &c),
    ] {
        assert!(v.passed, "{v}");
    }
}

#[test]
fn example_c_rank_two() {
    let start = Instant::now();
    let ring = RingSpec::new(2, 6).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let sec = RealSection::new(&[s("z1*(1 + z1*w1)", ring), s("z2", ring)], ideal).unwrap();
    let b = BundleSpec::new(2).unwrap();
    let p = TwistedPipeline::build(Connection::trivial(ring, b), sec).unwrap();
    println!("a components: {}", p.twist().top_index());
    for (k, a) in p.twist().components().iter().enumerate() {
        println!("a_{k} zero: {}", a.is_zero());
    }
    let v = p.twist().verify_cocycles();
    println!("{v}");
    run_all(&p);
    println!("elapsed {:?}", start.elapsed());
}

#[test]
fn mixed_section_rank_two_with_connection() {
    let ring = RingSpec::new(2, 5).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let sec =
        RealSection::new(&[s("z1 + z1*z2*w2", ring), s("z2 + z1*w1*w2", ring)], ideal).unwrap();
    let gamma = FormMatrix::new(
        ring,
        vec![
            vec![
                Form::parse("-w1*(1 + z1*w1)^-1*dz1", ring).unwrap(),
                Form::zero(ring),
            ],
            vec![
                Form::zero(ring),
                Form::parse("-w2*(1 + z2*w2)^-1*dz2", ring).unwrap(),
            ],
        ],
    )
    .unwrap();
    let c = Connection::new(BundleSpec::new(2).unwrap(), gamma).unwrap();
    let p = TwistedPipeline::build(c, sec).unwrap();
    assert!(p.twist().top_index() >= 2, "expected a nonzero a_2");
    run_all(&p);
}

#[test]
fn holomorphic_rank_two_matches_koszul() {
    let ring = RingSpec::new(2, 5).unwrap();
    let ideal = IdealSpec::new(&ring, vec![1, 2]).unwrap();
    let gamma = FormMatrix::new(
        ring,
        vec![
            vec![
                Form::parse("-w1*(1 + z1*w1)^-1*dz1", ring).unwrap(),
                Form::zero(ring),
            ],
            vec![
                Form::zero(ring),
                Form::parse("-w2*(1 + z2*w2)^-1*dz2", ring).unwrap(),
            ],
        ],
    )
    .unwrap();
    let c = Connection::new(BundleSpec::new(2).unwrap(), gamma).unwrap();
    let tau = [s("z1", ring), s("z2*(1 + z1)", ring)];
    let k = KoszulData::new(c.clone(), &tau, ideal.clone()).unwrap();
    let p = TwistedPipeline::build(c, RealSection::new(&tau, ideal).unwrap()).unwrap();
    let v = p.compare_with_koszul(&k);
    assert!(v.passed, "{v}");
}
