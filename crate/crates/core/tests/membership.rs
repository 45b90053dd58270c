use cxbody::membership::*;
use cxbody::*;

#[test]
fn l3_ball_in_r4_is_certified() {
    let k = StarBody::lq_ball(2, 3.0).unwrap();
    let cert = membership_test(&k, &DictionaryConfig::default(), 1e-3).unwrap();
    assert_eq!(cert.verdict, Verdict::MemberWithinTol);
    assert!(cert.residual_rel <= 1e-3, "{}", cert.residual_rel);
    assert!(verify_certificate(&k, &cert).unwrap());
    // the certificate survives a JSON round trip
    let back: MembershipCertificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert!(verify_certificate(&k, &back).unwrap());
}

#[test]
fn radial_sum_of_atoms_is_recovered() {
    let atoms = vec![
        EllipsoidAtom { a: 1.0, b: 1.5, xi: vec![1.0, 0.0, 0.0, 0.0], w: 0.5 },
        EllipsoidAtom { a: 0.8, b: 0.8, xi: vec![1.0, 0.0, 0.0, 0.0], w: 0.5 },
    ];
    let k = atom_body(&atoms).unwrap();
    let cert = membership_test(&k, &DictionaryConfig::default(), 1e-3).unwrap();
    assert_eq!(cert.verdict, Verdict::MemberWithinTol);
}

#[test]
fn certified_member_wraps_passing_bodies_only() {
    let k = StarBody::lq_ball(2, 3.0).unwrap();
    assert!(CertifiedMember::certify(k.clone(), &DictionaryConfig::default(), 1e-3).is_ok());
    assert!(matches!(
        CertifiedMember::certify(k, &DictionaryConfig::default(), 1e-9),
        Err(Error::NotCertified { .. })
    ));
}

#[test]
fn approximation_error_shrinks_with_budget() {
    let ic = StarBody::intersection_of(StarBody::lq_ball(2, 1.0).unwrap(), RadonConfig::new(2).unwrap()).unwrap();
    let cfg = DictionaryConfig { grid_size: 9, span: 8.0, directions: Some(32), eval_nodes: Some(500), ..Default::default() };
    let ladder = goodey_weil_ladder(&ic, &[2, 8, 32], &cfg).unwrap();
    for w in ladder.windows(2) {
        assert!(w[1].radial_error <= 1.05 * w[0].radial_error, "{} then {}", w[0].radial_error, w[1].radial_error);
    }
    for a in &ladder {
        assert!(a.atoms.len() <= a.budget);
    }
}
