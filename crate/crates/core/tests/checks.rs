mod common;

use common::*;
use torus_blowup::checks::{
    hexagonal_suite, hexagonal_tau, identity_suite, structure_suite, CheckStatus, SuiteSizes,
};
use torus_blowup::elliptic::EvalConfig;

fn sizes() -> SuiteSizes {
    SuiteSizes::scaled(200)
}

#[test]
fn identity_suite_passes_across_moduli() {
    for tau in moduli() {
        let recs = identity_suite(&w(tau), &sizes(), 7);
        assert!(recs.len() >= 9);
        for r in &recs {
            assert_eq!(
                r.status,
                CheckStatus::Pass,
                "{} at {tau}: {:?}",
                r.check_id,
                r.measured
            );
        }
    }
}

#[test]
fn identity_suite_adds_g2_check_near_rho() {
    let recs = identity_suite(&w(hexagonal_tau()), &sizes(), 7);
    assert!(recs
        .iter()
        .any(|r| r.check_id == "g2_vanishes_hexagonal" && r.passed()));
    let recs = identity_suite(&w(c(0.0, 1.0)), &sizes(), 7);
    assert!(!recs.iter().any(|r| r.check_id == "g2_vanishes_hexagonal"));
}

#[test]
fn suites_are_deterministic_in_the_seed() {
    let ww = w(c(0.5, 1.3));
    assert_eq!(
        identity_suite(&ww, &sizes(), 3),
        identity_suite(&ww, &sizes(), 3)
    );
}

#[test]
fn hexagonal_suite_passes() {
    let recs = hexagonal_suite(EvalConfig::default(), &sizes(), 7).unwrap();
    assert_eq!(recs.len(), 4);
    for r in &recs {
        assert!(r.passed(), "{}: {:?}", r.check_id, r.measured);
    }
    let crit = recs
        .iter()
        .find(|r| r.check_id == "green_critical_points_hexagonal")
        .unwrap();
    assert_eq!(crit.measured["count"], 5.0);
}

#[test]
fn structure_suite_passes_on_rectangular_tori() {
    for tau in [c(0.0, 0.6), c(0.0, 1.0), c(0.0, 2.0)] {
        let recs = structure_suite(&w(tau), &sizes(), 7);
        assert!(recs.len() >= 30, "{tau}: {}", recs.len());
        for r in &recs {
            assert!(r.passed(), "{} at {tau}: {:?}", r.check_id, r.measured);
        }
    }
}

#[test]
fn structure_suite_rejects_non_rectangular_moduli() {
    let recs = structure_suite(&w(c(0.3, 0.9)), &sizes(), 7);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].status, CheckStatus::Fail);
}

#[test]
fn records_serialize_with_snake_case_status() {
    let recs = identity_suite(&w(c(0.0, 1.0)), &SuiteSizes::scaled(40), 1);
    let json = serde_json::to_string(&recs[0]).unwrap();
    assert!(json.contains("\"status\":\"pass\""), "{json}");
    assert!(json.contains("\"check_id\""));
}
