//! Tables of report rows and their CSV and JSON encodings.

use serde_json::{json, Map, Number, Value as Json};

use crate::error::CliError;

/// One cell of a report row.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Value {
    pub fn opt(x: Option<f64>) -> Value {
        x.map_or(Value::Missing, Value::Num)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}
impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}
impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}
impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}
impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Seventeen significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Num(x) => fmt_num(*x),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => s.clone(),
        Value::Missing => String::new(),
    }
}

fn cell_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Num(x) if x.is_finite() => {
            Json::Number(fmt_num(*x).parse::<Number>().expect("formatted float is a JSON number"))
        }
        Value::Num(x) => Json::String(x.to_string()),
        Value::Bool(b) => json!(b),
        Value::Text(s) => json!(s),
        Value::Missing => Json::Null,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<String>) -> Self {
        Table {
            name: name.to_string(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of one column.
    pub fn values(&self, name: &str) -> Vec<&Value> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }

    /// Whether every row's `pass` cell is true.
    pub fn all_pass(&self) -> bool {
        match self.column("pass") {
            Some(i) => self.rows.iter().all(|r| r[i] == Value::Bool(true)),
            None => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: String,
    pub family: String,
    pub config_sha256: String,
    /// Fixed key/value settings the rows were computed with.
    pub provenance: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.tables.iter().all(Table::all_pass)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// `#` lines of metadata, then for each table a `# table:` line, the
    /// header and the rows, tables separated by blank lines.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        out.push_str(&format!(
            "# suite: {}\n# family: {}\n# config_sha256: {}\n",
            self.suite, self.family, self.config_sha256
        ));
        for (k, v) in &self.provenance {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        for t in &self.tables {
            out.push_str(&format!("\n# table: {}\n", t.name));
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let enc = |e: csv::Error| CliError::Encode(e.to_string());
            w.write_record(&t.columns).map_err(enc)?;
            for r in &t.rows {
                w.write_record(r.iter().map(cell_text)).map_err(enc)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let provenance: Map<String, Json> = self.provenance.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let tables: Vec<Json> = self
            .tables
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "columns": t.columns,
                    "rows": t.rows.iter().map(|r| r.iter().map(cell_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = json!({
            "suite": self.suite,
            "family": self.family,
            "config_sha256": self.config_sha256,
            "provenance": provenance,
            "all_pass": self.all_pass(),
            "tables": tables,
        });
        let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Encode(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Real and imaginary column names for the upper triangle of an `m × m` matrix.
pub fn upper_columns(prefix: &str, m: usize) -> Vec<String> {
    let mut out = Vec::new();
    for a in 0..m {
        for b in a..m {
            out.push(format!("{prefix}_{a}{b}_re"));
            out.push(format!("{prefix}_{a}{b}_im"));
        }
    }
    out
}

/// Row-major upper triangle of a square matrix, real and imaginary parts.
pub fn upper_values(m: &hml_core::linalg::CMatrix) -> Vec<Value> {
    let mut out = Vec::new();
    for a in 0..m.nrows() {
        for b in a..m.ncols() {
            out.push(Value::Num(m[(a, b)].re));
            out.push(Value::Num(m[(a, b)].im));
        }
    }
    out
}
