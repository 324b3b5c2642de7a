use serde::Serialize;
use serde_json::{Map, Value};

use chronoq::qcore::TOL_ALG;

/// One asserted comparison. `relation` is `eq` (|value - bound| ≤ tolerance), `ge`, `le` or
/// `holds` (boolean check).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub relation: &'static str,
    pub value: Value,
    pub bound: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, expected: f64, tol: f64) -> Self {
        let pass = (value - expected).abs() <= tol;
        Self { name: name.into(), relation: "eq", value: num(value), bound: num(expected), tolerance: Some(tol), pass }
    }

    /// Empirical rate against its analytic value at 3 standard errors.
    pub fn statistical(name: impl Into<String>, empirical: f64, analytic: f64, std_err: f64) -> Self {
        Self::within(name, empirical, analytic, 3.0 * std_err + TOL_ALG)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let pass = value >= bound - tol;
        Self { name: name.into(), relation: "ge", value: num(value), bound: num(bound), tolerance: Some(tol), pass }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let pass = value <= bound + tol;
        Self { name: name.into(), relation: "le", value: num(value), bound: num(bound), tolerance: Some(tol), pass }
    }

    pub fn holds(name: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), relation: "holds", value: Value::Bool(pass), bound: Value::Bool(true), tolerance: None, pass }
    }

    pub fn equals(name: impl Into<String>, value: impl Into<Value>, expected: impl Into<Value>) -> Self {
        let (value, bound) = (value.into(), expected.into());
        let pass = value == bound;
        Self { name: name.into(), relation: "eq", value, bound, tolerance: None, pass }
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Result of one command before it is wrapped into a [`Report`].
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub result: Map<String, Value>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn new(result: Value) -> Self {
        match result {
            Value::Object(result) => Self { result, checks: Vec::new() },
            other => {
                let mut result = Map::new();
                result.insert("value".into(), other);
                Self { result, checks: Vec::new() }
            }
        }
    }

    pub fn check(mut self, c: Check) -> Self {
        self.checks.push(c);
        self
    }

    pub fn checks(mut self, cs: impl IntoIterator<Item = Check>) -> Self {
        self.checks.extend(cs);
        self
    }
}

/// Echo of the run configuration. `--out` and the output format are not part of it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub trials: u64,
    pub tol: Option<f64>,
}

/// Canonical report; CSV and table output are rendered from its JSON form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub result: Map<String, Value>,
}

impl Report {
    pub fn new(command: String, config: ConfigEcho, outcome: Outcome) -> Self {
        let pass = outcome.checks.iter().all(|c| c.pass);
        Self { command, config, pass, checks: outcome.checks, result: outcome.result }
    }

    /// Rows of the result table, if the command produced one.
    pub fn rows(&self) -> Option<&Vec<Value>> {
        self.result.get("rows").and_then(Value::as_array)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(report),
        Format::Table => render_table(report),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Row with nested objects expanded into `parent.child` columns.
fn flatten(row: &Value) -> Map<String, Value> {
    fn walk(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, v, out);
                }
            }
            other => {
                out.insert(prefix.to_string(), other.clone());
            }
        }
    }
    let mut out = Map::new();
    walk("", row, &mut out);
    out
}

fn columns(rows: &[Map<String, Value>]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for row in rows {
        for (k, v) in row {
            if !v.is_null() && !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

/// Table cell: non-integer numbers are shown to 6 significant digits.
fn short(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if !v.is_i64() && !v.is_u64() => sig6(x),
        _ => cell(v),
    }
}

fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let s = format!("{:.*}", (5 - mag).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn scalars(report: &Report) -> impl Iterator<Item = (&String, &Value)> {
    report.result.iter().filter(|(k, _)| k.as_str() != "rows")
}

fn render_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    match report.rows() {
        Some(rows) => {
            let rows: Vec<Map<String, Value>> = rows.iter().map(flatten).collect();
            let cols = columns(&rows);
            w.write_record(&cols).expect("in-memory write");
            for row in &rows {
                let rec: Vec<String> = cols.iter().map(|c| row.get(c).map(cell).unwrap_or_default()).collect();
                w.write_record(&rec).expect("in-memory write");
            }
        }
        None => {
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in scalars(report) {
                w.write_record([k.clone(), cell(v)]).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

fn render_table(report: &Report) -> String {
    let mut out = format!("{}  (seed {}, trials {})\n", report.command, report.config.seed, report.config.trials);
    let key_width = scalars(report).map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in scalars(report).map(|(k, v)| (k, short(v))) {
        out.push_str(&format!("  {k:<key_width$}  {v}\n"));
    }
    if let Some(rows) = report.rows() {
        let rows: Vec<Map<String, Value>> = rows.iter().map(flatten).collect();
        let cols = columns(&rows);
        let cells: Vec<Vec<String>> =
            rows.iter().map(|r| cols.iter().map(|c| r.get(c).map(short).unwrap_or_default()).collect()).collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: &[String]| {
            let padded: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
            format!("  {}\n", padded.join("  ").trim_end())
        };
        out.push('\n');
        out.push_str(&line(&cols));
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        for r in &cells {
            out.push_str(&line(r));
        }
    }
    if !report.checks.is_empty() {
        out.push('\n');
        for c in &report.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let tol = c.tolerance.map(|t| format!(" ± {t:.1e}")).unwrap_or_default();
            out.push_str(&format!(
                "  {status}  {}: {} {} {}{tol}\n",
                c.name,
                short(&c.value),
                c.relation,
                short(&c.bound)
            ));
        }
    }
    out.push_str(&format!("\n  overall: {}\n", if report.pass { "PASS" } else { "FAIL" }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.333333333), "0.333333");
        assert_eq!(sig6(2.0), "2");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(1.5e-7), "1.50000e-7");
    }

    #[test]
    fn nested_rows_flatten_to_dotted_columns() {
        let row = serde_json::json!({ "a": 1, "b": { "c": 2, "d": null } });
        let flat = flatten(&row);
        assert_eq!(flat.keys().collect::<Vec<_>>(), ["a", "b.c", "b.d"]);
        assert_eq!(columns(&[flat]), ["a", "b.c"]);
    }
}
