//! Tabular experiment results and their CSV form.

use std::fmt::{self, Write as _};

use contilab_core::{SampleStats, SweepTable};

/// One sweep coordinate.
#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Num(f64),
    Text(String),
}

impl Coord {
    pub fn text(s: impl Into<String>) -> Self {
        Coord::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Coord::Num(x) => Some(*x),
            Coord::Text(_) => None,
        }
    }
}

impl From<f64> for Coord {
    fn from(x: f64) -> Self {
        Coord::Num(x)
    }
}

impl From<u64> for Coord {
    fn from(x: u64) -> Self {
        Coord::Num(x as f64)
    }
}

impl From<&str> for Coord {
    fn from(s: &str) -> Self {
        Coord::Text(s.to_string())
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Num(x) => write!(f, "{x}"),
            Coord::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    /// Monte Carlo summary over trials.
    Stats(SampleStats),
    /// Closed-form or deterministic value.
    Exact(f64),
    /// Every trial of the cell failed; holds the first error.
    Missing(String),
}

impl Value {
    pub fn mean(&self) -> Option<f64> {
        match self {
            Value::Stats(s) => Some(s.mean),
            Value::Exact(x) => Some(*x),
            Value::Missing(_) => None,
        }
    }

    pub fn stats(&self) -> Option<&SampleStats> {
        match self {
            Value::Stats(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coords: Vec<Coord>,
    pub metric: String,
    pub value: Value,
}

/// How to draw a report as lines: x from one column, one line per distinct
/// value of the `series` columns and metric.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub series: Vec<String>,
    pub metrics: Vec<String>,
    pub log_x: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    /// Failed trials and cells, one message each.
    pub failures: Vec<String>,
    pub plot: Option<PlotSpec>,
    /// Additional tables written next to `results.csv`.
    pub extra: Vec<(String, Report)>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            failures: Vec::new(),
            plot: None,
            extra: Vec::new(),
        }
    }

    pub fn push(&mut self, coords: Vec<Coord>, metric: &str, value: Value) {
        assert_eq!(coords.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(Row { coords, metric: metric.to_string(), value });
    }

    pub fn exact(&mut self, coords: Vec<Coord>, metric: &str, x: f64) {
        self.push(coords, metric, Value::Exact(x));
    }

    /// Adds the sweep cell at `cell` under `coords`, one row per metric in
    /// `metrics` (metrics with no data become error markers).
    pub fn push_cell(&mut self, table: &SweepTable, cell: usize, coords: Vec<Coord>, metrics: &[&str]) {
        for m in metrics {
            self.push_metric(table, cell, coords.clone(), m, m);
        }
    }

    /// Adds metric `source` of a sweep cell as a row named `name`.
    pub fn push_metric(&mut self, table: &SweepTable, cell: usize, coords: Vec<Coord>, source: &str, name: &str) {
        let c = &table.cells[cell];
        let value = match c.metric(source) {
            Some(s) => Value::Stats(*s),
            None => Value::Missing(c.errors.first().map(|(_, e)| e.to_string()).unwrap_or_else(|| "no data".into())),
        };
        self.push(coords, name, value);
    }

    /// Records every failed trial of the sweep as a header comment.
    pub fn note_failures(&mut self, table: &SweepTable) {
        for c in &table.cells {
            for (trial, e) in &c.errors {
                self.failures.push(format!("{} trial {trial}: {e}", c.key));
            }
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    fn matching(&self, metric: &str, filter: &[(&str, Coord)]) -> Vec<usize> {
        let idx: Vec<Option<usize>> = filter.iter().map(|(c, _)| self.column(c)).collect();
        (0..self.rows.len())
            .filter(|&k| {
                let r = &self.rows[k];
                r.metric == metric
                    && filter.iter().zip(&idx).all(|((_, want), i)| i.is_some_and(|i| coord_eq(&r.coords[i], want)))
            })
            .collect()
    }

    /// Rows with metric `metric` whose coordinates match every `(column, value)` filter.
    pub fn select(&self, metric: &str, filter: &[(&str, Coord)]) -> impl Iterator<Item = &Row> + '_ {
        self.matching(metric, filter).into_iter().map(|k| &self.rows[k])
    }

    /// The single value matching `metric` and `filter`.
    pub fn get(&self, metric: &str, filter: &[(&str, Coord)]) -> Option<&Value> {
        match self.matching(metric, filter)[..] {
            [k] => Some(&self.rows[k].value),
            _ => None,
        }
    }

    /// True when the report has data rows and all of them are error markers.
    pub fn all_failed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| matches!(r.value, Value::Missing(_)))
    }

    /// CSV text with `#` header comments.
    pub fn to_csv(&self, experiment: &str, seed: u64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# experiment: {experiment}");
        let _ = writeln!(s, "# seed: {seed}");
        let _ = writeln!(s, "# version: contilab {}", env!("CARGO_PKG_VERSION"));
        for f in &self.failures {
            let _ = writeln!(s, "# failed: {}", f.replace('\n', " "));
        }
        let mut header: Vec<&str> = self.columns.iter().map(String::as_str).collect();
        header.extend(["metric", "mean", "std", "ci95", "trials"]);
        let _ = writeln!(s, "{}", header.join(","));
        for r in &self.rows {
            for c in &r.coords {
                let _ = write!(s, "{},", csv_field(&c.to_string()));
            }
            let (mean, std, ci, n) = match &r.value {
                Value::Stats(st) => (st.mean, st.std, st.ci95, st.n),
                Value::Exact(x) => (*x, 0.0, 0.0, 0),
                Value::Missing(_) => (f64::NAN, f64::NAN, f64::NAN, 0),
            };
            let _ = writeln!(s, "{},{},{},{},{}", csv_field(&r.metric), num(mean), num(std), num(ci), n);
        }
        s
    }
}

fn coord_eq(a: &Coord, b: &Coord) -> bool {
    match (a, b) {
        (Coord::Num(x), Coord::Num(y)) => (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0),
        (Coord::Text(x), Coord::Text(y)) => x == y,
        _ => false,
    }
}

/// Twelve significant digits in scientific notation.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.11e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut r = Report::new(&["alpha"]);
        r.push(vec![0.35.into()], "avg", Value::Stats(SampleStats { mean: -1.5, std: 0.25, ci95: 0.01, n: 200 }));
        r.exact(vec![0.4.into()], "bound", 0.125);
        r.push(vec![0.5.into()], "avg", Value::Missing("boom".into()));
        r.failures.push("alpha=0.5 trial 0: boom".into());
        let csv = r.to_csv("demo", 9);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# experiment: demo");
        assert_eq!(lines[1], "# seed: 9");
        assert!(lines[2].starts_with("# version: contilab "));
        assert_eq!(lines[3], "# failed: alpha=0.5 trial 0: boom");
        assert_eq!(lines[4], "alpha,metric,mean,std,ci95,trials");
        assert_eq!(lines[5], "0.35,avg,-1.50000000000e0,2.50000000000e-1,1.00000000000e-2,200");
        assert_eq!(lines[6], "0.4,bound,1.25000000000e-1,0.00000000000e0,0.00000000000e0,0");
        assert_eq!(lines[7], "0.5,avg,nan,nan,nan,0");
        assert!(!r.all_failed());
    }

    #[test]
    fn selection_by_coordinates() {
        let mut r = Report::new(&["eta", "agent"]);
        r.exact(vec![0.1.into(), "ts".into()], "x", 1.0);
        r.exact(vec![0.1.into(), "ps".into()], "x", 2.0);
        r.exact(vec![0.3.into(), "ps".into()], "x", 3.0);
        assert_eq!(r.get("x", &[("eta", 0.1.into()), ("agent", "ps".into())]).unwrap().mean(), Some(2.0));
        assert_eq!(r.select("x", &[("agent", "ps".into())]).count(), 2);
        assert!(r.get("x", &[("agent", "ps".into())]).is_none());
        assert_eq!(r.select("x", &[("nope", 1.0.into())]).count(), 0);
    }

    #[test]
    fn all_failed_needs_every_row_missing() {
        let mut r = Report::new(&["x"]);
        assert!(!r.all_failed());
        r.push(vec![1.0.into()], "m", Value::Missing("nan at step 3".into()));
        assert!(r.all_failed());
        r.exact(vec![2.0.into()], "m", 0.5);
        assert!(!r.all_failed());
    }
}
