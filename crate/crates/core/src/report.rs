//! Plain tabular output and pass/fail lines.

use std::fmt::Write as _;

use serde::Serialize;

/// Header plus string rows; rendered as CSV with a stable column order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.headers.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| escape(c)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Formats a float with 10 significant digits; stable across runs.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        format!("{x}")
    }
}

/// One checked statement: `statistic` compared against `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `statistic <= tolerance`.
    pub fn at_most(name: impl Into<String>, statistic: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            statistic,
            tolerance,
            passed: statistic <= tolerance,
            detail: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            statistic: if passed { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["check", "statistic", "tolerance", "result", "detail"]);
    for c in checks {
        t.push(vec![
            c.name.clone(),
            num(c.statistic),
            num(c.tolerance),
            if c.passed { "pass" } else { "fail" }.into(),
            c.detail.clone(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(Table::new(&["a", "b"]).to_csv(), "a,b\n");
    }

    #[test]
    fn cells_are_escaped() {
        let mut t = Table::new(&["x"]);
        t.push(vec!["a,\"b\"".into()]);
        assert_eq!(t.to_csv(), "x\n\"a,\"\"b\"\"\"\n");
    }

    #[test]
    fn check_thresholds() {
        assert!(Check::at_most("k", 0.03, 0.03).passed);
        assert!(!Check::at_most("k", f64::NAN, 0.03).passed);
        assert_eq!(num(0.5), "5.000000000e-1");
    }
}
