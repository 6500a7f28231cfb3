use agcover::feasibility::{check_constraints, enumerate_profiles, CountCap, EnumerationQuery};
use agcover::galois::GaloisReport;
use agcover::invariants::{noether_check, InvariantReport};
use agcover::local_models::verify_local_model;
use agcover::monodromy::{certify, local_monodromy_group, FiberModel, IsoClass, TrackingParams};
use agcover::{Family, SingularProfile};
use num_bigint::BigInt;
use num_complex::Complex64;

#[test]
fn enumerated_profiles_have_consistent_reports() {
    let q = EnumerationQuery::new(4, None, 1, CountCap::DeltaBudget);
    let found = enumerate_profiles(&q).unwrap();
    assert!(!found.is_empty());
    for p in &found {
        let inv = InvariantReport::compute(p);
        assert!(inv.noether_ok && inv.chi_integral && inv.hodge_ok, "{p}");
        assert!(noether_check(p));
        let galois = GaloisReport::compute(p).unwrap();
        let n_fact: BigInt = (1..=p.cover_degree).map(BigInt::from).product();
        let d = BigInt::from(p.d) - 3;
        assert_eq!(galois.kz_square, &d * &d * n_fact, "{p}");
        assert!(check_constraints(p).admissible);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let p = SingularProfile::new(6, 4)
        .with(Family::S3Odd, 0, 24)
        .with(Family::S2, 1, 12);
    let parsed = SingularProfile::from_json(&p.to_json()).unwrap();
    assert_eq!(parsed, p);

    let inv = InvariantReport::compute(&p);
    let text = serde_json::to_string(&inv).unwrap();
    assert_eq!(serde_json::from_str::<InvariantReport>(&text).unwrap(), inv);

    let galois = GaloisReport::compute(&p).unwrap();
    let text = serde_json::to_string(&galois).unwrap();
    assert_eq!(serde_json::from_str::<GaloisReport>(&text).unwrap(), galois);
}

#[test]
fn huge_counts_stay_exact() {
    let p = SingularProfile::new(1_000_000, 3).with(Family::S3Odd, 0, 3_000_000_000);
    let inv = InvariantReport::compute(&p);
    assert!(inv.noether_ok);
    let text = serde_json::to_string(&inv).unwrap();
    let (d, c) = (1_000_000i128, 3_000_000_000i128);
    let k2 = 9 * 3 + 2 * (d * d - 6 * d) - c;
    assert!(text.contains(&format!("\"K_square\":{k2}")), "{text}");
    let galois =
        GaloisReport::compute(&SingularProfile::new(3, 40).with(Family::S3Odd, 1, 2)).unwrap();
    assert!(galois.s_sing.bits() > 150);
}

#[test]
fn local_models_verify() {
    for n in 1..=8 {
        let r = verify_local_model(n);
        assert!(r.all_passed(), "n={n}: {:?}", r.checks);
    }
}

#[test]
fn monodromy_is_independent_of_the_line() {
    let params = TrackingParams::default();
    for u0 in [Complex64::new(0.7, 0.0), Complex64::new(0.3, 1.1)] {
        let g = local_monodromy_group(&FiberModel::s3_cover_at(2, u0), &params).unwrap();
        assert_eq!(g.descriptor.iso_class, IsoClass::S3);
    }
    let r = certify(&FiberModel::s2_pair(3), &params.halved()).unwrap();
    assert!(r.certified, "{:?}", r.checks);
}
