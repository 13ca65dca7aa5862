//! Family configuration files and the built-in families.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{HmlError, Result};
use crate::linalg::{cz, CMatrix};
use crate::metrics::CyFamily;
use crate::picard_fuchs::{series_seed, PFOperator, PeriodSolver, SingularPoint};
use crate::poincare::PoincareChart;
use crate::vhs::{
    frame_at, gram_at, ConstantVhs, FamilyModel, PfFamily, PunctureCoordinate, Sym2, TwoParamProduct, UpperHalfPlane,
};

pub const QUINTIC_TOML: &str = include_str!("../../../families/quintic.toml");

const UPPER_HALF_PLANE_TOML: &str = r#"name = "upper-half-plane"
kind = "synthetic"
synthetic_id = "upper-half-plane"
weight = 1
moduli_dim = 1
euler_characteristic = 0
hodge_numbers = [[1, 1], [1, 1]]

[chart]
coordinate = "half-plane"
punctured = 1

[defaults]
grid = "log:1e-6:1e-1:20"
rays = 4
decades = 6
"#;

const SYM2_TOML: &str = r#"name = "sym2"
kind = "synthetic"
synthetic_id = "sym2"
weight = 2
moduli_dim = 1
euler_characteristic = 6
hodge_numbers = [[1, 0, 1], [0, 2, 0], [1, 0, 1]]

[chart]
coordinate = "half-plane"
punctured = 1

[defaults]
grid = "log:1e-6:1e-1:20"
rays = 4
decades = 6
"#;

const TWO_PARAM_PRODUCT_TOML: &str = r#"name = "two-param-product"
kind = "synthetic"
synthetic_id = "two-param-product"
weight = 2
moduli_dim = 2
euler_characteristic = 7
hodge_numbers = [[1, 0, 1], [0, 3, 0], [1, 0, 1]]

[chart]
coordinate = "half-plane"
punctured = 2

[defaults]
grid = "log:1e-6:1e-1:12"
rays = 2
decades = 6
"#;

const CONSTANT_TOML: &str = r#"name = "constant"
kind = "synthetic"
synthetic_id = "constant"
weight = 3
moduli_dim = 1
euler_characteristic = 0
hodge_numbers = [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]]

[chart]
coordinate = "disc"
punctured = 1

[defaults]
grid = "lin:0.1:0.9:9"
rays = 2
decades = 6
"#;

/// Names and sources of the built-in families.
pub const BUILTINS: &[(&str, &str)] = &[
    ("quintic", QUINTIC_TOML),
    ("upper-half-plane", UPPER_HALF_PLANE_TOML),
    ("sym2", SYM2_TOML),
    ("two-param-product", TWO_PARAM_PRODUCT_TOML),
    ("constant", CONSTANT_TOML),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    PicardFuchs,
    Synthetic,
}

/// How the configured family's own parameters relate to the polydisc chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coordinate {
    /// Parameters are already disc coordinates.
    Disc,
    /// Parameters live in upper half planes; the chart uses `q = e^{2πit}`.
    HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub coordinate: Coordinate,
    /// Number of punctured factors `l`, listed first.
    pub punctured: usize,
}

pub type ComplexEntry = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardFuchsConfig {
    pub basepoint: String,
    pub series_order: usize,
    /// `operator[j]` lists the ascending z-coefficients multiplying `θ^j`.
    pub operator: Vec<Vec<String>>,
    pub singular_points: Vec<String>,
    #[serde(default)]
    pub series_check: Vec<String>,
    pub polarization_matrix: Vec<Vec<ComplexEntry>>,
    pub flat_basis: Vec<Vec<ComplexEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default = "default_grid")]
    pub grid: String,
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_decades")]
    pub decades: usize,
    #[serde(default = "default_rel_step")]
    pub fd_rel_step: f64,
    #[serde(default = "default_identity_tol")]
    pub identity_tol: f64,
    #[serde(default = "default_transport_tol")]
    pub transport_tol: f64,
}

fn default_grid() -> String {
    "log:1e-6:1e-3:20".into()
}
fn default_rays() -> usize {
    1
}
fn default_decades() -> usize {
    6
}
fn default_rel_step() -> f64 {
    crate::fd::DEFAULT_REL_STEP
}
fn default_identity_tol() -> f64 {
    crate::metrics::DEFAULT_IDENTITY_TOL
}
fn default_transport_tol() -> f64 {
    crate::picard_fuchs::DEFAULT_TOL
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            grid: default_grid(),
            rays: default_rays(),
            decades: default_decades(),
            fd_rel_step: default_rel_step(),
            identity_tol: default_identity_tol(),
            transport_tol: default_transport_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub name: String,
    pub kind: FamilyKind,
    #[serde(default)]
    pub synthetic_id: Option<String>,
    pub weight: usize,
    pub moduli_dim: usize,
    pub euler_characteristic: i64,
    /// Full Hodge diamond `h[p][q]`, `0 ≤ p, q ≤ n`.
    pub hodge_numbers: Vec<Vec<usize>>,
    #[serde(default = "default_primitive")]
    pub primitive: bool,
    pub chart: ChartConfig,
    #[serde(default)]
    pub picard_fuchs: Option<PicardFuchsConfig>,
    #[serde(default)]
    pub defaults: Defaults,
}

fn default_primitive() -> bool {
    true
}

/// A validated family ready for evaluation in chart coordinates.
#[derive(Debug, Clone)]
pub struct LoadedFamily {
    pub config: FamilyConfig,
    /// Exact text the family was read from.
    pub source: String,
    pub cy: CyFamily,
    pub chart: PoincareChart,
}

fn parse_rational(field: &str, s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim())
        .map_err(|_| HmlError::config(field, format!("`{s}` is not an integer or rational a/b")))
}

fn parse_singular_point(s: &str) -> Result<SingularPoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
        return Ok(SingularPoint::Infinity);
    }
    let r = parse_rational("picard_fuchs.singular_points", s)?;
    let x: f64 = num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN);
    Ok(SingularPoint::Finite(cz(x, 0.0)))
}

fn complex_matrix(field: &str, rows: &[Vec<ComplexEntry>], n: usize) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(HmlError::config(
            field,
            format!("expected a {n}x{n} matrix of [re, im] pairs"),
        ));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !(e[0].is_finite() && e[1].is_finite()) {
                return Err(HmlError::config(field, format!("entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = cz(e[0], e[1]);
        }
    }
    Ok(m)
}

impl FamilyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map_or_else(|| "document".to_string(), |s| locate(text, s.start));
            HmlError::config(field, e.message().to_string())
        })
    }

    /// Hodge symmetry, Serre duality and the Euler characteristic.
    fn check_diamond(&self) -> Result<()> {
        let n = self.weight;
        let h = &self.hodge_numbers;
        if h.len() != n + 1 || h.iter().any(|r| r.len() != n + 1) {
            return Err(HmlError::config(
                "hodge_numbers",
                format!("expected an {0}x{0} diamond for weight {n}", n + 1),
            ));
        }
        for p in 0..=n {
            for q in 0..=n {
                if h[p][q] != h[q][p] {
                    return Err(HmlError::config(
                        "hodge_numbers",
                        format!("h^{{{p},{q}}} != h^{{{q},{p}}}"),
                    ));
                }
                if h[p][q] != h[n - p][n - q] {
                    return Err(HmlError::config(
                        "hodge_numbers",
                        format!("h^{{{p},{q}}} != h^{{{},{}}}", n - p, n - q),
                    ));
                }
            }
        }
        if h[0][n] != 1 {
            return Err(HmlError::config("hodge_numbers", format!("h^{{0,{n}}} must be 1")));
        }
        let chi: i64 = (0..=n)
            .flat_map(|p| (0..=n).map(move |q| (p, q)))
            .map(|(p, q)| {
                if (p + q) % 2 == 0 {
                    h[p][q] as i64
                } else {
                    -(h[p][q] as i64)
                }
            })
            .sum();
        if chi != self.euler_characteristic {
            return Err(HmlError::config(
                "euler_characteristic",
                format!(
                    "{} differs from {chi} computed from hodge_numbers",
                    self.euler_characteristic
                ),
            ));
        }
        Ok(())
    }

    /// `h_prim^{p,n−p}`.
    pub fn primitive_middle(&self) -> Vec<usize> {
        let n = self.weight;
        let h = &self.hodge_numbers;
        (0..=n)
            .map(|p| {
                let below = if p > 0 && n - p > 0 { h[p - 1][n - p - 1] } else { 0 };
                h[p][n - p].saturating_sub(below)
            })
            .collect()
    }

    fn build_picard_fuchs(&self) -> Result<Arc<dyn FamilyModel>> {
        let pf = self
            .picard_fuchs
            .as_ref()
            .ok_or_else(|| HmlError::config("picard_fuchs", "missing for kind = \"picard-fuchs\""))?;
        if self.moduli_dim != 1 {
            return Err(HmlError::config(
                "moduli_dim",
                "Picard-Fuchs families are one-parameter",
            ));
        }
        let base = parse_rational("picard_fuchs.basepoint", &pf.basepoint)?;
        if !num_traits::Zero::is_zero(&base) {
            return Err(HmlError::config(
                "picard_fuchs.basepoint",
                "only the point of maximal unipotent monodromy z = 0 is supported",
            ));
        }
        let coeffs = pf
            .operator
            .iter()
            .map(|p| p.iter().map(|c| parse_rational("picard_fuchs.operator", c)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let sing = pf
            .singular_points
            .iter()
            .map(|s| parse_singular_point(s))
            .collect::<Result<Vec<_>>>()?;
        let op = PFOperator::new(coeffs, sing).map_err(|e| prefix(e, "picard_fuchs"))?;
        let rank: usize = self.primitive_middle().iter().sum();
        if op.order() != rank {
            return Err(HmlError::config(
                "hodge_numbers",
                format!(
                    "primitive middle Hodge numbers sum to {rank}, operator order is {}",
                    op.order()
                ),
            ));
        }
        if self.primitive_middle().iter().any(|&h| h != 1) {
            return Err(HmlError::config(
                "hodge_numbers",
                "a one-parameter Picard-Fuchs family needs h_prim^{p,n-p} = 1 for every p",
            ));
        }
        let seed = series_seed(&op, pf.series_order).map_err(|e| prefix(e, "picard_fuchs.operator"))?;
        if let Err(k) = seed.check_recursion(&op) {
            return Err(HmlError::config(
                "picard_fuchs.operator",
                format!("series recursion fails at index {k}"),
            ));
        }
        for (k, want) in pf.series_check.iter().enumerate() {
            let want = parse_rational("picard_fuchs.series_check", want)?;
            match seed.coefficients.get(k) {
                Some(got) if *got == want => {}
                got => {
                    return Err(HmlError::config(
                        "picard_fuchs.series_check",
                        format!("coefficient {k}: expected {want}, series gives {got:?}"),
                    ))
                }
            }
        }
        let n = op.order();
        let q = complex_matrix("picard_fuchs.polarization_matrix", &pf.polarization_matrix, n)?;
        let sign = if self.weight.is_multiple_of(2) { 1.0 } else { -1.0 };
        if (q.transpose() * cz(sign, 0.0) - &q).norm() > 1e-12 * q.norm() {
            return Err(HmlError::config(
                "picard_fuchs.polarization_matrix",
                format!(
                    "not {} for weight {}",
                    if sign > 0.0 { "symmetric" } else { "antisymmetric" },
                    self.weight
                ),
            ));
        }
        if q.determinant().norm() == 0.0 {
            return Err(HmlError::config(
                "picard_fuchs.polarization_matrix",
                "matrix is singular",
            ));
        }
        let basis = complex_matrix("picard_fuchs.flat_basis", &pf.flat_basis, n)?;
        let solver = PeriodSolver::new(op, pf.series_order, self.defaults.transport_tol)
            .map_err(|e| prefix(e, "picard_fuchs"))?;
        let fam = PfFamily::new(&self.name, self.weight, solver, basis, q).map_err(|e| prefix(e, "picard_fuchs"))?;
        Ok(Arc::new(fam))
    }

    fn build_synthetic(&self) -> Result<Arc<dyn FamilyModel>> {
        let id = self
            .synthetic_id
            .as_deref()
            .ok_or_else(|| HmlError::config("synthetic_id", "missing for kind = \"synthetic\""))?;
        let fam: Arc<dyn FamilyModel> = match id {
            "upper-half-plane" => Arc::new(UpperHalfPlane::default()),
            "sym2" => Arc::new(Sym2::default()),
            "two-param-product" => Arc::new(TwoParamProduct::default()),
            "constant" => Arc::new(ConstantVhs::new(
                &self.name,
                self.weight,
                self.primitive_middle(),
                self.moduli_dim,
            )?),
            other => {
                return Err(HmlError::config(
                    "synthetic_id",
                    format!("unknown synthetic family `{other}`"),
                ))
            }
        };
        if fam.weight() != self.weight {
            return Err(HmlError::config(
                "weight",
                format!("`{id}` has weight {}", fam.weight()),
            ));
        }
        if fam.moduli_dim() != self.moduli_dim {
            return Err(HmlError::config(
                "moduli_dim",
                format!("`{id}` has {} parameters", fam.moduli_dim()),
            ));
        }
        Ok(fam)
    }

    /// A point of the chart used to probe positivity at load time.
    fn probe_point(&self) -> Vec<Complex64> {
        vec![cz(0.1, 0.0); self.moduli_dim]
    }

    pub fn build(&self, source: &str) -> Result<LoadedFamily> {
        if self.weight == 0 {
            return Err(HmlError::config("weight", "must be at least 1"));
        }
        if self.moduli_dim == 0 {
            return Err(HmlError::config("moduli_dim", "must be at least 1"));
        }
        self.check_diamond()?;
        let d = &self.defaults;
        if !(d.fd_rel_step > 0.0 && d.fd_rel_step < 0.5) {
            return Err(HmlError::config("defaults.fd_rel_step", "must lie in (0, 0.5)"));
        }
        if !(d.identity_tol > 0.0) || !(d.transport_tol > 0.0) {
            return Err(HmlError::config("defaults", "tolerances must be positive"));
        }
        if d.rays == 0 || d.decades == 0 {
            return Err(HmlError::config("defaults", "rays and decades must be positive"));
        }
        let native = match (&self.kind, &self.picard_fuchs) {
            (FamilyKind::PicardFuchs, _) => self.build_picard_fuchs()?,
            (FamilyKind::Synthetic, None) => self.build_synthetic()?,
            (FamilyKind::Synthetic, Some(_)) => {
                return Err(HmlError::config("picard_fuchs", "not allowed for kind = \"synthetic\""))
            }
        };
        let top: Arc<dyn FamilyModel> = match self.chart.coordinate {
            Coordinate::Disc => native,
            Coordinate::HalfPlane => Arc::new(PunctureCoordinate::new(native)?),
        };
        let chart =
            PoincareChart::new(self.chart.punctured, self.moduli_dim).map_err(|e| prefix(e, "chart.punctured"))?;
        let mut cy = CyFamily::from_diamond(top, &self.hodge_numbers, self.euler_characteristic)
            .map_err(|e| prefix(e, "hodge_numbers"))?;
        cy.rel_step = d.fd_rel_step;
        cy.identity_tol = d.identity_tol;
        cy.primitive = self.primitive;
        let probe = self.probe_point();
        gram_at(&frame_at(cy.top(), &probe)?).map_err(|e| {
            HmlError::config(
                "picard_fuchs.polarization_matrix",
                format!("Hodge form not positive at the probe point: {e}"),
            )
        })?;
        Ok(LoadedFamily {
            config: self.clone(),
            source: source.to_string(),
            cy,
            chart,
        })
    }
}

fn prefix(e: HmlError, parent: &str) -> HmlError {
    match e {
        HmlError::Config { field, message } if !field.contains('.') && field != parent => {
            HmlError::config(format!("{parent}.{field}"), message)
        }
        HmlError::Config { .. } => e,
        other => HmlError::config(parent, other.to_string()),
    }
}

/// `line N` for an error span.
fn locate(text: &str, offset: usize) -> String {
    let line = text[..offset.min(text.len())].matches('\n').count() + 1;
    format!("line {line}")
}

pub fn load_family_str(text: &str) -> Result<LoadedFamily> {
    FamilyConfig::from_toml(text)?.build(text)
}

/// Loads a family config file.
pub fn load_family(path: &Path) -> Result<LoadedFamily> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HmlError::config("path", format!("cannot read {}: {e}", path.display())))?;
    load_family_str(&text)
}

pub fn builtin(name: &str) -> Option<Result<LoadedFamily>> {
    BUILTINS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| load_family_str(text))
}

/// A built-in name, or else a path to a config file.
pub fn resolve_family(spec: &str) -> Result<LoadedFamily> {
    if let Some(f) = builtin(spec) {
        return f;
    }
    let path = Path::new(spec);
    if path.exists() {
        return load_family(path);
    }
    Err(HmlError::UnknownFamily(spec.to_string()))
}
