//! `verify`: resolve the family, run the suites, build the report.

use std::fmt;
use std::str::FromStr;

use hml_core::config::{resolve_family, LoadedFamily};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::grid::GridSpec;
use crate::report::{fmt_num, Report};
use crate::suites::{self, Settings, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exterior,
    Vhs,
    Metrics,
    Poincare,
    All,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "exterior" => Ok(Suite::Exterior),
            "vhs" => Ok(Suite::Vhs),
            "metrics" => Ok(Suite::Metrics),
            "poincare" => Ok(Suite::Poincare),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Usage(format!(
                "unknown suite `{s}` (expected exterior, vhs, metrics, poincare or all)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Exterior => "exterior",
            Suite::Vhs => "vhs",
            Suite::Metrics => "metrics",
            Suite::Poincare => "poincare",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

/// Command-line overrides; `None` keeps the family's defaults.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub family: String,
    pub grid: Option<GridSpec>,
    pub rays: Option<usize>,
    pub decades: Option<usize>,
    pub fd_step: Option<f64>,
    pub tol: Option<f64>,
}

impl VerifyOptions {
    pub fn new(suite: Suite, family: &str) -> Self {
        VerifyOptions {
            suite,
            family: family.to_string(),
            grid: None,
            rays: None,
            decades: None,
            fd_step: None,
            tol: None,
        }
    }
}

pub fn config_hash(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

fn settings(opts: &VerifyOptions, fam: &LoadedFamily) -> Result<Settings, CliError> {
    let d = &fam.config.defaults;
    let grid = match opts.grid {
        Some(g) => g,
        None => d.grid.parse()?,
    };
    let s = Settings {
        grid,
        rays: opts.rays.unwrap_or(d.rays),
        decades: opts.decades.unwrap_or(d.decades),
        rel_step: opts.fd_step.unwrap_or(d.fd_rel_step),
        identity_tol: opts.tol.unwrap_or(d.identity_tol),
    };
    if s.rays == 0 || s.decades == 0 {
        return Err(CliError::Usage("--rays and --decades must be positive".into()));
    }
    if !(s.rel_step > 0.0 && s.rel_step < 0.5) {
        return Err(CliError::Usage("--fd-step must lie in (0, 0.5)".into()));
    }
    if !(s.identity_tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    Ok(s)
}

pub fn run_verify(opts: &VerifyOptions) -> Result<Report, CliError> {
    let fam = resolve_family(&opts.family)?;
    let s = settings(opts, &fam)?;
    let mut cy = fam.cy.clone();
    cy.rel_step = s.rel_step;
    cy.identity_tol = s.identity_tol;
    let hash = config_hash(&fam.source);
    let short = &hash[..12];
    let target = Target {
        cy: &cy,
        chart: &fam.chart,
        config: short,
    };
    let mut tables = Vec::new();
    let wants = |x: Suite| opts.suite == x || opts.suite == Suite::All;
    if wants(Suite::Exterior) {
        tables.push(suites::exterior::run(suites::exterior::CASES));
    }
    if wants(Suite::Vhs) {
        tables.push(suites::vhs::run(&target, &s));
    }
    if wants(Suite::Metrics) {
        tables.push(suites::metrics::run(&target, &s));
    }
    if wants(Suite::Poincare) {
        let (samples, summary) = suites::poincare::run(&target, &s);
        tables.push(samples);
        tables.push(summary);
    }
    let provenance = vec![
        ("hml_version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("grid".into(), s.grid.to_string()),
        ("rays".into(), s.rays.to_string()),
        ("decades".into(), s.decades.to_string()),
        ("fd_rel_step".into(), fmt_num(s.rel_step)),
        ("identity_tol".into(), fmt_num(s.identity_tol)),
        ("transport_tol".into(), fmt_num(fam.config.defaults.transport_tol)),
        ("exterior_cases".into(), suites::exterior::CASES.to_string()),
    ];
    Ok(Report {
        suite: opts.suite.to_string(),
        family: fam.config.name.clone(),
        config_sha256: hash,
        provenance,
        tables,
    })
}
