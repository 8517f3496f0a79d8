//! Pass/fail records for verified inequalities and their CSV form.

use std::io::Write;

/// Header comment that opens every CSV the crate writes.
pub const CSV_VERSION_LINE: &str = "# typical-clt v1";

/// One verified inequality `lhs ≤ rhs + slack` at one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub check: String,
    /// Human-readable statement of the inequality being checked.
    pub anchor: String,
    pub spec: String,
    pub n: usize,
    /// Name and value of the free parameter (t, p, x...), if any.
    pub param: Option<(&'static str, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub budget: u64,
    pub seed: u64,
}

impl BoundCheck {
    /// `rhs + slack − lhs`; nonnegative means the inequality held.
    pub fn margin(&self) -> f64 {
        self.rhs + self.slack - self.lhs
    }

    pub fn pass(&self) -> bool {
        self.margin() >= 0.0 && self.lhs.is_finite() && self.rhs.is_finite()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundCheckReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundCheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: BoundCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: BoundCheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(BoundCheck::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass())
    }

    /// Smallest margin among the rows of one check family.
    pub fn worst_margin(&self, check: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.check == check)
            .map(BoundCheck::margin)
            .min_by(f64::total_cmp)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_VERSION_LINE}")?;
        writeln!(
            out,
            "check,anchor,spec,n,param,param_value,lhs,rhs,slack,margin,pass,budget,seed"
        )?;
        for c in &self.checks {
            let (pname, pval) = match c.param {
                Some((name, v)) => (name.to_string(), v.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&c.check),
                csv_field(&c.anchor),
                csv_field(&c.spec),
                c.n,
                pname,
                pval,
                c.lhs,
                c.rhs,
                c.slack,
                c.margin(),
                c.pass(),
                c.budget,
                c.seed
            )?;
        }
        Ok(())
    }
}

/// Quote a CSV field when it contains a delimiter, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
