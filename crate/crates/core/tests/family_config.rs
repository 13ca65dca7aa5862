use std::sync::Arc;

use hml_core::config::{builtin, load_family_str, resolve_family, FamilyConfig, BUILTINS, QUINTIC_TOML};
use hml_core::linalg::cz;
use hml_core::metrics::{CyFamily, MetricPoint};
use hml_core::quintic;
use hml_core::HmlError;

fn field_of(e: HmlError) -> String {
    match e {
        HmlError::Config { field, .. } => field,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn shipped_quintic_loads() {
    let f = builtin("quintic").unwrap().unwrap();
    assert_eq!(f.cy.dim(), 3);
    assert_eq!(f.cy.moduli_dim(), 1);
    assert_eq!(f.cy.euler_characteristic(), 200);
    let pf = f.config.picard_fuchs.as_ref().unwrap();
    assert_eq!(pf.operator.len(), 5);
}

#[test]
fn shipped_quintic_matches_library_family() {
    let f = builtin("quintic").unwrap().unwrap();
    let diamond = f.config.hodge_numbers.clone();
    let mut lib = CyFamily::from_diamond(Arc::new(quintic::family().unwrap()), &diamond, 200).unwrap();
    lib.rel_step = f.cy.rel_step;
    let t = [cz(-3e-4, 1e-4)];
    let a = MetricPoint::evaluate(&f.cy, &t).unwrap();
    let b = MetricPoint::evaluate(&lib, &t).unwrap();
    assert!((&a.h_wp - &b.h_wp).norm() <= 1e-12 * b.h_wp.norm());
}

#[test]
fn every_builtin_loads() {
    for (name, _) in BUILTINS {
        let f = builtin(name).unwrap().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(f.config.name, *name);
    }
    let uhp = resolve_family("upper-half-plane").unwrap();
    assert_eq!((uhp.cy.dim(), uhp.cy.moduli_dim()), (1, 1));
}

#[test]
fn unknown_family_is_reported() {
    assert!(matches!(
        resolve_family("no-such-family"),
        Err(HmlError::UnknownFamily(_))
    ));
}

#[test]
fn rank_mismatch_is_rejected() {
    let text = QUINTIC_TOML.replace(
        "[0, 101, 1, 0],\n    [0, 1, 101, 0]",
        "[0, 101, 2, 0],\n    [0, 2, 101, 0]",
    );
    let text = text.replace("euler_characteristic = 200", "euler_characteristic = 198");
    assert_eq!(field_of(load_family_str(&text).unwrap_err()), "hodge_numbers");
}

#[test]
fn euler_mismatch_is_rejected() {
    let text = QUINTIC_TOML.replace("euler_characteristic = 200", "euler_characteristic = -200");
    assert_eq!(field_of(load_family_str(&text).unwrap_err()), "euler_characteristic");
}

#[test]
fn asymmetric_diamond_is_rejected() {
    let text = QUINTIC_TOML.replace("[0, 1, 101, 0],", "[0, 1, 100, 0],");
    assert_eq!(field_of(load_family_str(&text).unwrap_err()), "hodge_numbers");
}

#[test]
fn series_check_catches_wrong_operator() {
    let text = QUINTIC_TOML.replace("[\"0\", \"-120\"]", "[\"0\", \"-121\"]");
    assert_eq!(
        field_of(load_family_str(&text).unwrap_err()),
        "picard_fuchs.series_check"
    );
}

#[test]
fn unlisted_singularity_is_rejected() {
    let text = QUINTIC_TOML.replace("[\"0\", \"1/3125\", \"inf\"]", "[\"0\", \"inf\"]");
    assert_eq!(
        field_of(load_family_str(&text).unwrap_err()),
        "picard_fuchs.singular_points"
    );
}

#[test]
fn wrong_polarization_sign_is_rejected() {
    let text = QUINTIC_TOML.replace(
        "[[0, 0], [1, 0], [0, 0], [0, 0]],",
        "[[0, 0], [-1, 0], [0, 0], [0, 0]],",
    );
    assert!(field_of(load_family_str(&text).unwrap_err()).starts_with("picard_fuchs.polarization_matrix"));
}

#[test]
fn nonzero_basepoint_is_rejected() {
    let text = QUINTIC_TOML.replace("basepoint = \"0\"", "basepoint = \"1/2\"");
    assert_eq!(field_of(load_family_str(&text).unwrap_err()), "picard_fuchs.basepoint");
}

#[test]
fn schema_violation_names_a_line() {
    let text = QUINTIC_TOML.replace("weight = 3", "weight = \"three\"");
    assert!(field_of(load_family_str(&text).unwrap_err()).starts_with("line"));
}

#[test]
fn config_round_trips_through_toml() {
    let c = FamilyConfig::from_toml(QUINTIC_TOML).unwrap();
    let again = FamilyConfig::from_toml(&toml::to_string(&c).unwrap()).unwrap();
    assert_eq!(c, again);
}
