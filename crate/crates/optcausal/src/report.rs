//! Text and JSON renderings of command results.
//!
//! JSON documents are plain serde structs, so field order is fixed by the
//! declaration order below and every document deserializes back into the
//! struct it came from.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use optcausal_core::circuit::{NodeId, ValidationReport};
use optcausal_core::engine::{CausalityReport, FalsificationReport, JointDistribution};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub kind: String,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub witness: String,
    pub verdict: String,
    pub notes: Vec<String>,
}

impl From<&CausalityReport> for ReportDoc {
    fn from(r: &CausalityReport) -> Self {
        ReportDoc {
            kind: r.kind.as_str().to_string(),
            tolerance: r.tolerance,
            max_deviation: r.max_deviation,
            witness: r.witness.clone(),
            verdict: r.verdict.as_str().to_string(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyDoc {
    pub report: ReportDoc,
    pub p_a_zero: [f64; 2],
    pub p_b: [Vec<f64>; 2],
    pub p_b_alt: [Vec<f64>; 2],
    pub forward_dependence: f64,
    pub forward_witness: String,
}

impl From<&FalsificationReport> for FalsifyDoc {
    fn from(r: &FalsificationReport) -> Self {
        FalsifyDoc {
            report: ReportDoc::from(&r.report),
            p_a_zero: r.p_a_zero,
            p_b: r.p_b.clone(),
            p_b_alt: r.p_b_alt.clone(),
            forward_dependence: r.forward_dependence,
            forward_witness: r.forward_witness.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisDoc {
    pub node: String,
    pub outcomes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDoc {
    pub outcomes: Vec<usize>,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    pub axes: Vec<AxisDoc>,
    pub rows: Vec<RowDoc>,
    pub total: f64,
}

impl From<&JointDistribution> for DistributionDoc {
    fn from(d: &JointDistribution) -> Self {
        DistributionDoc {
            axes: d.axes().iter().map(|a| AxisDoc { node: a.node.to_string(), outcomes: a.outcomes }).collect(),
            rows: d.iter().map(|(outcomes, probability)| RowDoc { outcomes, probability }).collect(),
            total: d.total(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConesDoc {
    pub node: String,
    pub past: Vec<String>,
    pub future: Vec<String>,
}

impl ConesDoc {
    pub fn new(node: &str, past: &BTreeSet<NodeId>, future: &BTreeSet<NodeId>) -> Self {
        let names = |s: &BTreeSet<NodeId>| s.iter().map(ToString::to_string).collect();
        ConesDoc { node: node.to_string(), past: names(past), future: names(future) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationDoc {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl From<&ValidationReport> for ValidationDoc {
    fn from(r: &ValidationReport) -> Self {
        ValidationDoc { valid: r.is_valid(), violations: r.violations.iter().map(ToString::to_string).collect() }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report documents serialize");
    s.push('\n');
    s
}

pub fn report_text(r: &ReportDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "check: {}", r.kind);
    let _ = writeln!(out, "verdict: {}", r.verdict);
    let _ = writeln!(out, "max deviation: {:e}", r.max_deviation);
    let _ = writeln!(out, "tolerance: {:e}", r.tolerance);
    let _ = writeln!(out, "witness: {}", r.witness);
    for n in &r.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

pub fn falsify_text(f: &FalsifyDoc) -> String {
    let mut out = report_text(&f.report);
    let _ = writeln!(out, "p_A(0) under B: {:.12}", f.p_a_zero[0]);
    let _ = writeln!(out, "p_A(0) under B': {:.12}", f.p_a_zero[1]);
    let _ = writeln!(out, "forward dependence: {:e}", f.forward_dependence);
    let _ = writeln!(out, "forward witness: {}", f.forward_witness);
    out
}

pub fn distribution_text(d: &DistributionDoc) -> String {
    let widths: Vec<usize> = d.axes.iter().map(|a| a.node.len().max((a.outcomes - 1).to_string().len())).collect();
    let mut out = String::new();
    for (a, w) in d.axes.iter().zip(&widths) {
        let _ = write!(out, "{:<w$}  ", a.node);
    }
    out.push_str("probability\n");
    for row in &d.rows {
        for (k, w) in row.outcomes.iter().zip(&widths) {
            let _ = write!(out, "{k:<w$}  ");
        }
        let _ = writeln!(out, "{:.12}", row.probability);
    }
    let _ = writeln!(out, "total {:.12}", d.total);
    out
}

pub fn cones_text(c: &ConesDoc) -> String {
    let list = |v: &[String]| if v.is_empty() { "(none)".to_string() } else { v.join(" ") };
    format!("node: {}\npast: {}\nfuture: {}\n", c.node, list(&c.past), list(&c.future))
}

pub fn validation_text(v: &ValidationDoc) -> String {
    if v.valid {
        return "valid\n".to_string();
    }
    let mut out = String::new();
    for line in &v.violations {
        let _ = writeln!(out, "{line}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use optcausal_core::engine::{Axis, CheckKind};

    #[test]
    fn report_json_has_stable_field_order_and_round_trips() {
        let r = CausalityReport::new(CheckKind::NoSignaling, 1e-9, 0.25, "w", vec!["n".into()]);
        let doc = ReportDoc::from(&r);
        let json = to_json(&doc);
        let keys = ["\"kind\"", "\"tolerance\"", "\"max_deviation\"", "\"witness\"", "\"verdict\"", "\"notes\""];
        let positions: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert_eq!(serde_json::from_str::<ReportDoc>(&json).unwrap(), doc);
        assert!(report_text(&doc).contains("verdict: fail"));
    }

    #[test]
    fn distribution_table_layout() {
        let d = JointDistribution::new(vec![Axis::new("P", 1), Axis::new("Obs", 2)], vec![0.25, 0.75]).unwrap();
        let text = distribution_text(&DistributionDoc::from(&d));
        assert_eq!(text, "P  Obs  probability\n0  0    0.250000000000\n0  1    0.750000000000\ntotal 1.000000000000\n");
    }

    #[test]
    fn empty_cones_print_none() {
        let c = ConesDoc { node: "P".into(), past: vec![], future: vec!["O".into(), "T".into()] };
        assert_eq!(cones_text(&c), "node: P\npast: (none)\nfuture: O T\n");
    }
}
