use std::collections::BTreeSet;

use polargap::verify::SPECTRAL_CHECKS;
use polargap::{run_verify, CheckKind, Error, VerifyConfig};

fn quick() -> VerifyConfig {
    VerifyConfig { spectral: false, ..Default::default() }
}

#[test]
fn fixture_suite_passes_and_names_are_unique() {
    let rep = run_verify(&quick()).unwrap();
    let failures: Vec<_> = rep.failures().map(|c| format!("{}: {} {}", c.name, c.measured, c.detail)).collect();
    assert!(rep.pass, "{failures:#?}");
    let names: BTreeSet<_> = rep.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names.len(), rep.checks.len());
}

#[test]
fn check_names_are_stable() {
    let a = run_verify(&quick()).unwrap();
    let b = run_verify(&VerifyConfig { roots: [2.0, -0.5, -1.5], ..quick() }).unwrap();
    let na: Vec<_> = a.checks.iter().map(|c| &c.name).collect();
    let nb: Vec<_> = b.checks.iter().map(|c| &c.name).collect();
    assert_eq!(na, nb);
    for name in [
        "lattice.legendre",
        "onegap.r3.x_derivative",
        "twogap.plus.liouville",
        "backlund.onegap3.b",
        "backlund.twogap.minus.exponent",
        "soliton.convergence",
    ] {
        assert!(a.get(name).is_some(), "missing {name}");
    }
    for name in SPECTRAL_CHECKS {
        assert_eq!(a.get(name).unwrap().kind, CheckKind::Skipped);
    }
}

#[test]
fn degenerate_branches_skip_only_where_e2_vanishes() {
    let a = run_verify(&quick()).unwrap();
    assert_eq!(a.get("onegap.r2.x_derivative").unwrap().kind, CheckKind::Skipped);
    let b = run_verify(&VerifyConfig { roots: [2.0, -0.5, -1.5], ..quick() }).unwrap();
    let r2 = b.get("onegap.r2.x_derivative").unwrap();
    assert_eq!(r2.kind, CheckKind::Check);
    assert!(r2.pass);
}

#[test]
fn findings_record_the_measured_discrepancies() {
    let rep = run_verify(&quick()).unwrap();
    let b = rep.get("backlund.plus.b_measured").unwrap();
    assert_eq!(b.kind, CheckKind::Finding);
    assert!((b.measured - 2.0).abs() < 1e-9);
    assert!((b.expected - 3.375).abs() < 1e-12);
    let minus = rep.get("backlund.twogap.minus.exponent").unwrap();
    assert!((minus.measured - 2.0 / 3.0).abs() < 0.02);
    assert!(!rep.get("backlund.twogap.flipped_sign").unwrap().pass);
}

#[test]
fn mutation_is_caught() {
    let rep = run_verify(&VerifyConfig { perturb_a3: Some(1.01), ..quick() }).unwrap();
    assert!(!rep.pass);
    let c = rep.get("onegap.r3.x_derivative").unwrap();
    assert!(c.measured > 1e-3 && c.measured < 1e-1, "{}", c.measured);
}

#[test]
fn unordered_roots_abort() {
    let cfg = VerifyConfig { roots: [0.0, 1.0, -1.0], ..quick() };
    assert!(matches!(run_verify(&cfg), Err(Error::UnorderedRoots(..))));
}

#[test]
fn deterministic() {
    let a = run_verify(&quick()).unwrap();
    let b = run_verify(&quick()).unwrap();
    for (x, y) in a.checks.iter().zip(&b.checks) {
        assert_eq!(x.name, y.name);
        assert!(x.measured.to_bits() == y.measured.to_bits() || (x.measured.is_nan() && y.measured.is_nan()));
    }
}
