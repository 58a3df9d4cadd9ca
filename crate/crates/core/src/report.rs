//! Text, CSV and JSON rendering for every report type.
//!
//! All output is a pure function of the report value: sets are sorted, cycles
//! are in min-first rotation, JSON objects keep a fixed field order, and lines
//! end in `\n`.

use std::fmt::{self, Display, Write as _};
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::collatz::{CollatzRangeReport, CollatzTrajectory};
use crate::cycledetect::Cycle;
use crate::kaprekar::{ConjectureOutcome, ExpectationCheck, KaprekarClassification};
use crate::verifier::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("{what} cannot be rendered as {format}")]
    UnsupportedFormat { what: &'static str, format: Format },
    #[error("unknown format {0:?}; expected table, csv or json")]
    UnknownFormat(String),
    #[error("display base {0} must be in 2..=36")]
    InvalidBase(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderSpec {
    pub format: Format,
    /// Radix for values in table and CSV output. JSON numbers are always decimal.
    pub base_for_display: u32,
    /// Whether wall-clock fields are emitted. Off for byte-comparable output.
    pub include_timing: bool,
}

impl RenderSpec {
    pub fn new(format: Format) -> Self {
        Self { format, base_for_display: 10, include_timing: true }
    }

    pub fn with_base(mut self, base: u32) -> Self {
        self.base_for_display = base;
        self
    }

    pub fn without_timing(mut self) -> Self {
        self.include_timing = false;
        self
    }
}

/// `v` in `base` without prefix or leading zeros.
pub fn format_value(v: u64, base: u32) -> String {
    assert!((2..=36).contains(&base), "display base must be in 2..=36");
    if v == 0 {
        return "0".into();
    }
    let mut out = Vec::new();
    let mut rest = v;
    while rest > 0 {
        out.push(char::from_digit((rest % u64::from(base)) as u32, base).expect("digit < base"));
        rest /= u64::from(base);
    }
    out.iter().rev().collect()
}

pub fn parse_value(s: &str, base: u32) -> Option<u64> {
    u64::from_str_radix(s, base).ok()
}

fn format_cycle(c: &Cycle, base: u32) -> String {
    let inner: Vec<String> = c.values().iter().map(|&v| format_value(v, base)).collect();
    format!("{{{}}}", inner.join(", "))
}

/// Header plus one row per `(step, value)`.
pub fn trajectory_csv<T: Display>(values: impl IntoIterator<Item = T>) -> String {
    let mut out = String::from("step,value\n");
    for (i, v) in values.into_iter().enumerate() {
        writeln!(out, "{i},{v}").expect("writing to a String");
    }
    out
}

/// Fixed-width columns separated by two spaces; the last column is not padded.
fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                write!(line, "{cell:<w$}  ", w = widths[c]).expect("writing to a String");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Anything with a stable textual form.
pub trait Render {
    const WHAT: &'static str;

    fn json(&self, spec: &RenderSpec) -> Value;

    fn table(&self, spec: &RenderSpec) -> Option<String> {
        let _ = spec;
        None
    }

    fn csv(&self, spec: &RenderSpec) -> Option<String> {
        let _ = spec;
        None
    }
}

pub fn render<R: Render + ?Sized>(item: &R, spec: &RenderSpec) -> Result<String, ReportError> {
    if !(2..=36).contains(&spec.base_for_display) {
        return Err(ReportError::InvalidBase(spec.base_for_display));
    }
    let out = match spec.format {
        Format::Json => Some(pretty(&item.json(spec))),
        Format::Table => item.table(spec),
        Format::Csv => item.csv(spec),
    };
    out.ok_or(ReportError::UnsupportedFormat { what: R::WHAT, format: spec.format })
}

impl Render for CollatzTrajectory {
    const WHAT: &'static str = "Collatz trajectory";

    fn json(&self, _: &RenderSpec) -> Value {
        json!({
            "start": self.start.to_string(),
            "steps": self.steps,
            "reached_one": self.reached_one,
            "values": self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }

    fn csv(&self, _: &RenderSpec) -> Option<String> {
        Some(trajectory_csv(&self.values))
    }

    fn table(&self, _: &RenderSpec) -> Option<String> {
        let values: Vec<String> = self.values.iter().map(u128::to_string).collect();
        Some(format!(
            "start {}: {} steps, reached 1: {}\n{}\n",
            self.start,
            self.steps,
            self.reached_one,
            values.join(", ")
        ))
    }
}

impl Render for CollatzRangeReport {
    const WHAT: &'static str = "Collatz range report";

    fn json(&self, _: &RenderSpec) -> Value {
        json!({
            "upper": self.upper,
            "verified": self.verified,
            "all_reach_one": self.verified == self.upper,
            "max_steps": self.max_steps,
            "max_steps_start": self.max_steps_start,
            "max_excursion": self.max_excursion.to_string(),
            "max_excursion_start": self.max_excursion_start,
        })
    }

    fn table(&self, _: &RenderSpec) -> Option<String> {
        Some(aligned(&[
            vec!["upper".into(), self.upper.to_string()],
            vec!["verified".into(), self.verified.to_string()],
            vec!["max steps".into(), format!("{} (start {})", self.max_steps, self.max_steps_start)],
            vec![
                "max excursion".into(),
                format!("{} (start {})", self.max_excursion, self.max_excursion_start),
            ],
        ]))
    }
}

fn basin_key(c: &Cycle) -> String {
    c.values().iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// A classification with an optional comparison against a published terminal list.
#[derive(Debug, Clone, Copy)]
pub struct ClassificationView<'a> {
    pub classification: &'a KaprekarClassification,
    pub expectation: Option<&'a ExpectationCheck>,
}

impl<'a> From<&'a KaprekarClassification> for ClassificationView<'a> {
    fn from(classification: &'a KaprekarClassification) -> Self {
        Self { classification, expectation: None }
    }
}

impl Render for ClassificationView<'_> {
    const WHAT: &'static str = "Kaprekar classification";

    fn json(&self, _: &RenderSpec) -> Value {
        let c = self.classification;
        let basins = |canonical: bool| {
            let entries: serde_json::Map<String, Value> = c
                .terminals
                .iter()
                .map(|b| (basin_key(&b.terminal), json!(if canonical { b.canonical_size } else { b.size })))
                .collect();
            Value::Object(entries)
        };
        let cycles: Vec<&[u64]> = c.cycles().into_iter().map(Cycle::values).collect();
        let mut out = json!({
            "config": c.config,
            "fixed_points": c.fixed_points(),
            "cycles": cycles,
            "degenerate_starts_count": c.degenerate_starts.len(),
            "zero_starts_count": c.zero_starts.len(),
            "basins": basins(false),
            "canonical_basins": basins(true),
        });
        if let Some(e) = self.expectation {
            out["expectation"] = json!({
                "expected": e.expected,
                "discovered": e.discovered,
                "missing": e.missing,
                "unexpected": e.unexpected,
                "matches": e.matches(),
            });
        }
        out
    }

    fn table(&self, spec: &RenderSpec) -> Option<String> {
        let c = self.classification;
        let b = spec.base_for_display;
        let cfg = c.config;
        let mut rows = vec![vec!["terminal".to_string(), "basin".into(), "canonical".into()]];
        for basin in &c.terminals {
            rows.push(vec![
                format_cycle(&basin.terminal, b),
                basin.size.to_string(),
                basin.canonical_size.to_string(),
            ]);
        }
        rows.push(vec!["degenerate".into(), c.degenerate_starts.len().to_string()]);
        rows.push(vec!["zero".into(), c.zero_starts.len().to_string()]);
        let mut out = format!(
            "K_{{{},{}}} base {} length {}\n",
            cfg.u, cfg.v, cfg.base, cfg.length
        );
        out.push_str(&aligned(&rows));
        if let Some(e) = self.expectation {
            let list = |v: &[u64]| v.iter().map(|&x| format_value(x, b)).collect::<Vec<_>>().join(", ");
            writeln!(out, "expected: [{}]", list(&e.expected)).ok()?;
            if e.matches() {
                out.push_str("expected terminals match\n");
            } else {
                writeln!(out, "MISMATCH missing: [{}] unexpected: [{}]", list(&e.missing), list(&e.unexpected))
                    .ok()?;
            }
        }
        Some(out)
    }
}

impl Render for KaprekarClassification {
    const WHAT: &'static str = "Kaprekar classification";

    fn json(&self, spec: &RenderSpec) -> Value {
        ClassificationView::from(self).json(spec)
    }

    fn table(&self, spec: &RenderSpec) -> Option<String> {
        ClassificationView::from(self).table(spec)
    }
}

impl Render for VerificationReport {
    const WHAT: &'static str = "verification report";

    fn json(&self, spec: &RenderSpec) -> Value {
        let unknown: Vec<&[u64]> = self.unknown.iter().map(|(c, _)| c.values()).collect();
        let mut out = json!({
            "process": self.kind,
            "cases": self.cases_total,
            "terminals": self.terminals,
            "unknown": unknown,
            "max_transient": self.max_transient,
        });
        if spec.include_timing {
            out["elapsed_ms"] = json!(self.elapsed.as_millis() as u64);
        }
        out
    }

    fn table(&self, spec: &RenderSpec) -> Option<String> {
        let mut rows = vec![vec!["terminal".to_string(), "basin".into(), "cycle".into()]];
        for t in &self.terminals {
            rows.push(vec![t.name.clone(), t.basin.to_string(), format_cycle(&t.cycle, 10)]);
        }
        for (c, n) in &self.unknown {
            rows.push(vec!["UNKNOWN".into(), n.to_string(), format_cycle(c, 10)]);
        }
        let mut out = format!(
            "{}: {} cases, max transient {}\n",
            self.kind, self.cases_total, self.max_transient
        );
        out.push_str(&aligned(&rows));
        if spec.include_timing {
            writeln!(out, "elapsed {} ms", self.elapsed.as_millis()).ok()?;
        }
        Some(out)
    }

    fn csv(&self, _: &RenderSpec) -> Option<String> {
        let mut out = String::from("terminal,basin\n");
        for t in &self.terminals {
            writeln!(out, "{},{}", t.name, t.basin).ok()?;
        }
        for (c, n) in &self.unknown {
            writeln!(out, "unknown:{},{}", basin_key(c).replace(',', " "), n).ok()?;
        }
        Some(out)
    }
}

impl Render for [ConjectureOutcome] {
    const WHAT: &'static str = "conjecture check";

    fn json(&self, _: &RenderSpec) -> Value {
        let rows: Vec<Value> = self
            .iter()
            .map(|o| {
                let cycles = |cs: &[Cycle]| cs.iter().map(|c| c.values().to_vec()).collect::<Vec<_>>();
                json!({
                    "m": o.m,
                    "even_length": 2 * o.m,
                    "predicted_fixed_point": o.predicted_fixed_point,
                    "even_terminals": cycles(&o.even_terminals),
                    "even_holds": o.even_holds,
                    "odd_length": 2 * o.m + 1,
                    "predicted_loop": o.predicted_loop,
                    "odd_terminals": cycles(&o.odd_terminals),
                    "odd_holds": o.odd_holds,
                })
            })
            .collect();
        json!({ "all_hold": self.iter().all(ConjectureOutcome::holds), "results": rows })
    }

    fn table(&self, spec: &RenderSpec) -> Option<String> {
        let b = spec.base_for_display;
        let mut rows = vec![vec![
            "m".to_string(),
            "fixed point".into(),
            "holds".into(),
            "loop".into(),
            "holds".into(),
        ]];
        for o in self {
            rows.push(vec![
                o.m.to_string(),
                format_value(o.predicted_fixed_point, b),
                o.even_holds.to_string(),
                format!(
                    "{{{}, {}}}",
                    format_value(o.predicted_loop[0], b),
                    format_value(o.predicted_loop[1], b)
                ),
                o.odd_holds.to_string(),
            ]);
        }
        Some(aligned(&rows))
    }
}

/// One row per classification: digit length, fixed points and loops, values
/// in base 2 without leading zeros.
pub fn render_table1(results: &[KaprekarClassification]) -> String {
    let mut rows = vec![vec![
        "Base".to_string(),
        "Digit length".into(),
        "fixed points".into(),
        "loops".into(),
    ]];
    for c in results {
        let base = c.config.base;
        let fixed: Vec<String> = c.fixed_points().iter().map(|&v| format_value(v, base)).collect();
        let loops: Vec<String> = c.cycles().iter().map(|cy| format_cycle(cy, base)).collect();
        let or_none = |v: Vec<String>| if v.is_empty() { "none".to_string() } else { v.join(", ") };
        rows.push(vec![base.to_string(), c.config.length.to_string(), or_none(fixed), or_none(loops)]);
    }
    aligned(&rows)
}
