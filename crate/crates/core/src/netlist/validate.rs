// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::{Netlist, Node};
use crate::report::{AnalysisReport, Unit};

const OP: &str = "validate";

/// Structural checks. Always returns a report; problems show up as counts,
/// failing verdicts and notes.
pub fn validate(netlist: &Netlist) -> AnalysisReport {
    let mut report = AnalysisReport::new();
    report.add("elements", netlist.element_count() as f64, Unit::Count, OP);
    report.add("nodes", netlist.node_count() as f64, Unit::Count, OP);

    let degenerate: Vec<&str> = netlist
        .elements()
        .filter(|e| e.is_degenerate())
        .map(|e| e.id())
        .collect();
    report.add("degenerate_elements", degenerate.len() as f64, Unit::Count, OP);
    if !degenerate.is_empty() {
        report.note(format!("degenerate (excluded from simulation): {}", degenerate.join(" ")));
    }

    let placeholders = netlist
        .elements()
        .flat_map(|e| e.nodes())
        .filter(|n| n.is_placeholder())
        .count();
    report.add("placeholder_terminals", placeholders as f64, Unit::Count, OP);

    // Elements touching each node, counting every element once.
    let mut touch: BTreeMap<&str, usize> = BTreeMap::new();
    for e in netlist.elements() {
        let mut names: Vec<&str> = e
            .nodes()
            .into_iter()
            .filter_map(|n| match n {
                Node::Named(s) => Some(s.as_str()),
                Node::Placeholder => None,
            })
            .collect();
        names.sort_unstable();
        names.dedup();
        for name in names {
            let count = touch.entry(name).or_insert(0);
            if !e.is_degenerate() {
                *count += 1;
            }
        }
    }
    let floating: Vec<&str> = touch
        .iter()
        .filter(|(_, &c)| c < 2)
        .map(|(&n, _)| n)
        .collect();
    report.add_checked("floating_nodes", floating.len() as f64, Unit::Count, floating.is_empty(), OP);
    if !floating.is_empty() {
        report.note(format!("floating nodes: {}", floating.join(" ")));
    }

    let zero_cap = netlist
        .comments()
        .filter(|c| c.to_ascii_lowercase().contains("zero nodal parasitic capacitance"))
        .count();
    report.add("zero_capacitance_warnings", zero_cap as f64, Unit::Count, OP);

    if let Some(n) = netlist.declared_node_count() {
        report.add_checked(
            "declared_nodes",
            n as f64,
            Unit::Count,
            n == netlist.node_count(),
            OP,
        );
    }
    if let Some(n) = netlist.declared_element_count() {
        report.add_checked(
            "declared_elements",
            n as f64,
            Unit::Count,
            n == netlist.element_count(),
            OP,
        );
    }
    for w in netlist.count_warnings() {
        report.note(format!("count mismatch: {w}"));
    }
    report
}
