//! Plain-text artifacts: CSV tables, `key: value` summaries and verification
//! reports. Output depends only on the values passed in, so identical runs
//! serialize byte-identically.

use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Asymptotic,
    CrossFormula,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Asymptotic => "paper-asymptotic",
            Provenance::CrossFormula => "cross-formula",
        })
    }
}

/// One named comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub passed: bool,
    pub provenance: Provenance,
}

impl Check {
    /// `|observed − expected| ≤ tol`.
    pub fn close(name: &str, expected: f64, observed: f64, tol: f64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            expected: format!("{expected:.12e}"),
            observed: format!("{observed:.12e}"),
            tolerance: format!("{tol:.1e}"),
            passed: (observed - expected).abs() <= tol,
            provenance,
        }
    }

    /// `observed ≤ bound`.
    pub fn at_most(name: &str, observed: f64, bound: f64, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            expected: format!("<= {bound:.3e}"),
            observed: format!("{observed:.6e}"),
            tolerance: "-".into(),
            passed: observed <= bound,
            provenance,
        }
    }

    pub fn flag(name: &str, expected: &str, observed: &str, passed: bool, provenance: Provenance) -> Self {
        Self {
            name: name.into(),
            expected: expected.into(),
            observed: observed.into(),
            tolerance: "-".into(),
            passed,
            provenance,
        }
    }
}

/// A numbered group of checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub checks: Vec<Check>,
    /// Wall time in seconds; excluded from [`VerificationReport::to_csv`].
    pub elapsed: f64,
    /// Failure that prevented the checks from running.
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// `PASS 3 title (1.23 s)` followed by the names of failed checks.
    pub fn line(&self) -> String {
        let mut s = format!("{} {} {} ({:.2} s)", if self.passed() { "PASS" } else { "FAIL" }, self.id, self.title, self.elapsed);
        if let Some(e) = &self.error {
            let _ = write!(s, " error: {e}");
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (expected {}, got {})", c.name, c.expected, c.observed))
            .collect();
        if !failed.is_empty() {
            let _ = write!(s, " failed: {}", failed.join("; "));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub criteria: Vec<CriterionReport>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("criterion,check,expected,observed,tolerance,pass,provenance\n");
        for c in &self.criteria {
            if let Some(e) = &c.error {
                let _ = writeln!(out, "{},error,-,{},-,false,-", c.id, csv_field(e));
            }
            for k in &c.checks {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    c.id,
                    csv_field(&k.name),
                    csv_field(&k.expected),
                    csv_field(&k.observed),
                    csv_field(&k.tolerance),
                    k.passed,
                    k.provenance
                );
            }
        }
        out
    }
}

/// Column-major numeric table written as CSV with a header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| format!("{v:e}")).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|v| csv_field(v)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn add(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}: {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_lines() {
        let mut t = CsvTable::new(&["a", "b,c"]);
        t.push_numbers(&[1.0, 0.5]);
        assert_eq!(t.to_csv(), "a,\"b,c\"\n1e0,5e-1\n");
        let r = CriterionReport {
            id: 1,
            title: "demo".into(),
            checks: vec![Check::close("x", 1.0, 1.0 + 1e-9, 1e-6, Provenance::ClosedForm)],
            elapsed: 0.5,
            error: None,
        };
        assert!(r.passed());
        assert!(r.line().starts_with("PASS 1 demo"));
        let mut s = Summary::default();
        s.add("k", 3).add("wall_time_s", "0.1");
        assert_eq!(s.to_string(), "k: 3\nwall_time_s: 0.1\n");
    }
}
