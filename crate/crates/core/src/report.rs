// SPDX-License-Identifier: Apache-2.0

//! Plain-text analysis reports.
//!
//! One `name value unit [verdict]` line per entry, preceded by `#` header
//! lines (technology echo) and followed by `#` note lines. Serialisation is
//! deterministic: values print in Rust's shortest round-trip form.

use std::fmt;

/// Units an entry may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Volt,
    Ampere,
    Watt,
    Second,
    Farad,
    Ohm,
    Hertz,
    Meter,
    SquareMeter,
    /// Layout area in lambda squared.
    LambdaSquared,
    /// Dimensionless ratio.
    Ratio,
    /// An integer count; printed without a unit column.
    Count,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Volt => "V",
            Unit::Ampere => "A",
            Unit::Watt => "W",
            Unit::Second => "s",
            Unit::Farad => "F",
            Unit::Ohm => "ohm",
            Unit::Hertz => "Hz",
            Unit::Meter => "m",
            Unit::SquareMeter => "m2",
            Unit::LambdaSquared => "lambda2",
            Unit::Ratio => "1",
            Unit::Count => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub name: String,
    pub value: f64,
    pub unit: Unit,
    pub verdict: Option<Verdict>,
    /// Operation that produced the value.
    pub provenance: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisReport {
    pub header: Vec<String>,
    pub entries: Vec<ReportEntry>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: f64, unit: Unit, provenance: &'static str) -> &mut ReportEntry {
        self.entries.push(ReportEntry {
            name: name.into(),
            value,
            unit,
            verdict: None,
            provenance,
        });
        self.entries.last_mut().expect("just pushed")
    }

    pub fn add_checked(
        &mut self,
        name: impl Into<String>,
        value: f64,
        unit: Unit,
        ok: bool,
        provenance: &'static str,
    ) {
        self.add(name, value, unit, provenance).verdict = Some(Verdict::from_bool(ok));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn get(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).map(|e| e.value)
    }

    /// Appends another report's entries and notes (headers are kept from `self`).
    pub fn extend(&mut self, other: AnalysisReport) {
        self.entries.extend(other.entries);
        self.notes.extend(other.notes);
    }

    /// True when no entry carries a failing verdict.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Some(Verdict::Fail))
    }
}

pub(crate) fn format_number(value: f64, unit: Unit) -> String {
    if unit == Unit::Count && value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value:e}")
    }
}

impl fmt::Display for ReportEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, format_number(self.value, self.unit))?;
        if self.unit != Unit::Count {
            write!(f, " {}", self.unit.symbol())?;
        }
        if let Some(v) = self.verdict {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.header {
            writeln!(f, "# {h}")?;
        }
        for e in &self.entries {
            writeln!(f, "{e}")?;
        }
        for n in &self.notes {
            writeln!(f, "# note: {n}")?;
        }
        Ok(())
    }
}
