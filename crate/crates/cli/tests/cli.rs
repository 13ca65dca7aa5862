use std::path::PathBuf;
use std::process::Command;

use hml_cli::report::{fmt_num, Report, Table, Value};
use hml_cli::{run_verify, GridSpec, Suite, VerifyOptions};
use hml_core::config::QUINTIC_TOML;
use proptest::prelude::*;

fn hml() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hml"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn grid_spec_parses_both_spacings() {
    let g: GridSpec = "log:1e-6:1e-3:4".parse().unwrap();
    let r = g.radii();
    assert_eq!(r.len(), 4);
    for (a, b) in r.iter().zip([1e-6, 1e-5, 1e-4, 1e-3]) {
        assert!((a / b - 1.0).abs() < 1e-12);
    }
    let g: GridSpec = "lin:0.1:0.4:4".parse().unwrap();
    for (a, b) in g.radii().iter().zip([0.1, 0.2, 0.3, 0.4]) {
        assert!((a - b).abs() < 1e-15);
    }
    for bad in ["log:1:2", "cubic:1:2:3", "log:0:1:3", "lin:1:2:0", "log:a:1:2"] {
        assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
    }
}

#[test]
fn grid_points_are_radius_major_off_the_positive_axis() {
    let g: GridSpec = "log:1e-3:1e-2:3".parse().unwrap();
    let pts = g.points(4, 2);
    assert_eq!(pts.len(), 12);
    for (i, p) in pts.iter().enumerate() {
        assert_eq!(p.index, i);
        assert_eq!(p.ray, i % 4);
        assert_eq!(p.z.len(), 2);
        assert!((p.z[0].norm() - p.radius).abs() < 1e-15 * p.radius);
        assert!(!(p.z[0].im == 0.0 && p.z[0].re > 0.0));
    }
}

proptest! {
    #[test]
    fn log_grid_is_geometric(a in 1e-8f64..1e-2, span in 1.0f64..1e4, n in 2usize..40) {
        let g = GridSpec { spacing: hml_cli::grid::Spacing::Log, a, b: a * span, n };
        let r = g.radii();
        prop_assert_eq!(r.len(), n);
        prop_assert!((r[0] / a - 1.0).abs() < 1e-12);
        prop_assert!((r[n - 1] / (a * span) - 1.0).abs() < 1e-12);
        let q = r[1] / r[0];
        for w in r.windows(2) {
            prop_assert!((w[1] / w[0] / q - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn numbers_carry_seventeen_significant_digits(x in -1e300f64..1e300) {
        let s = fmt_num(x);
        let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        prop_assert_eq!(mantissa.len(), 17);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}

#[test]
fn csv_and_json_encode_the_same_rows() {
    let mut t = Table::new("demo", vec!["a".into(), "b".into(), "pass".into()]);
    t.push(vec![Value::Num(0.1), Value::Text("x, \"y\"".into()), Value::Bool(true)]);
    t.push(vec![Value::Missing, Value::Int(3), Value::Bool(false)]);
    let rep = Report {
        suite: "demo".into(),
        family: "none".into(),
        config_sha256: "0".repeat(64),
        provenance: vec![("k".into(), "v".into())],
        tables: vec![t],
    };
    assert!(!rep.all_pass());
    let csv = rep.to_csv().unwrap();
    assert!(csv.contains("1.0000000000000001e-1,\"x, \"\"y\"\"\",true\n"));
    assert!(csv.contains("\n,3,false\n"));
    let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    assert_eq!(json["tables"][0]["rows"][0][0].as_f64(), Some(0.1));
    assert!(json["tables"][0]["rows"][1][0].is_null());
    assert_eq!(json["all_pass"], false);
}

#[test]
fn every_row_pass_flag_follows_from_its_residuals() {
    let mut opts = VerifyOptions::new(Suite::Metrics, "sym2");
    opts.grid = Some("log:1e-4:1e-2:3".parse().unwrap());
    let rep = run_verify(&opts).unwrap();
    let t = rep.table("metrics").unwrap();
    for row in &t.rows {
        for (i, c) in t.columns.iter().enumerate() {
            let Some(name) = c.strip_suffix("_residual") else {
                continue;
            };
            let tol = &row[t.column(&format!("{name}_tol")).unwrap()];
            let pass = &row[t.column(&format!("{name}_pass")).unwrap()];
            if let (Value::Num(r), Value::Num(tol)) = (&row[i], tol) {
                assert_eq!(*pass, Value::Bool(r <= tol), "{name}");
            }
        }
    }
}

#[test]
fn verify_writes_report_and_mirror() {
    let out = scratch("uhp_metrics.csv");
    let status = hml()
        .args([
            "verify",
            "metrics",
            "--family",
            "upper-half-plane",
            "--grid",
            "log:1e-3:1e-1:3",
            "--rays",
            "1",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# suite: metrics\n# family: upper-half-plane\n"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["tables"][0]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn identity_failure_exits_with_one() {
    let status = hml()
        .args([
            "verify",
            "metrics",
            "--family",
            "sym2",
            "--grid",
            "log:1e-3:1e-2:2",
            "--tol",
            "1e-30",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn infrastructure_failures_exit_with_two() {
    let bad = scratch("bad.toml");
    std::fs::write(
        &bad,
        QUINTIC_TOML.replace("euler_characteristic = 200", "euler_characteristic = 4"),
    )
    .unwrap();
    let out = hml()
        .args(["verify", "metrics", "--family"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("euler_characteristic"));
    let out = hml()
        .args(["verify", "metrics", "--family", "no-such-family"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = hml().args(["verify", "everything"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_path_loads_like_the_builtin() {
    let path = scratch("quintic.toml");
    std::fs::write(&path, QUINTIC_TOML).unwrap();
    let grid: GridSpec = "log:1e-5:1e-4:2".parse().unwrap();
    let mut a = VerifyOptions::new(Suite::Vhs, path.to_str().unwrap());
    a.grid = Some(grid);
    let mut b = VerifyOptions::new(Suite::Vhs, "quintic");
    b.grid = Some(grid);
    assert_eq!(
        run_verify(&a).unwrap().to_csv().unwrap(),
        run_verify(&b).unwrap().to_csv().unwrap()
    );
}

#[test]
fn two_parameter_vhs_rows_pass() {
    let mut opts = VerifyOptions::new(Suite::Vhs, "two-param-product");
    opts.grid = Some("log:1e-3:1e-1:3".parse().unwrap());
    opts.rays = Some(2);
    let rep = run_verify(&opts).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_csv().unwrap());
    let t = rep.table("vhs").unwrap();
    assert_eq!(t.rows.len(), 6);
    assert!(t.column("z1_im").is_some());
}
