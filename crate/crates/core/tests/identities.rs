use zhu_core::identities::{verify_all, IdentityId, VerifyConfig};
use zhu_core::voa::{Automorphism, FreeBoson, VoaContext};

fn run(aut: Automorphism, samples: usize) -> Vec<zhu_core::identities::IdentityRecord> {
    let ctx = VoaContext::new(FreeBoson::new(aut));
    let mut cfg = VerifyConfig::new(aut.order());
    cfg.samples = samples;
    verify_all(&ctx, &IdentityId::ALL, &cfg).unwrap()
}

#[test]
fn every_identity_is_certified_untwisted() {
    for r in run(Automorphism::Trivial, 12) {
        assert!(r.found, "{}: {:?}", r.id, r.failures);
        assert_eq!(r.certified, r.samples, "{}", r.id);
        assert!(r.millis.is_none());
    }
}

#[test]
fn every_identity_is_certified_for_theta() {
    for r in run(Automorphism::Theta, 12) {
        assert!(r.found, "{}: {:?}", r.id, r.failures);
        assert!(r.samples > 0, "{} drew no samples", r.id);
        assert!(r.b.is_some());
    }
}

#[test]
fn records_are_deterministic() {
    let a = serde_json::to_string(&run(Automorphism::Theta, 4)).unwrap();
    let b = serde_json::to_string(&run(Automorphism::Theta, 4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn id_lists_parse() {
    assert_eq!(IdentityId::parse_list("all").unwrap().len(), 11);
    assert_eq!(
        IdentityId::parse_list("L3.1, p4.3").unwrap(),
        vec![IdentityId::L31, IdentityId::P43]
    );
    assert!(IdentityId::parse_list("L9.9").is_err());
    for id in IdentityId::ALL {
        assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
    }
}
