// SPDX-License-Identifier: Apache-2.0

use sramlab_core::netlist::{parse_netlist, print_netlist, validate};

const CELL: &str = include_str!("../corpus/cell_extract.sp");
const ARRAY: &str = include_str!("../corpus/array_extract.sp");

#[test]
fn cell_extract_counts() {
    let n = parse_netlist(CELL).unwrap();
    assert_eq!(n.node_count(), 6);
    assert_eq!(n.element_count(), 10);
    assert_eq!(n.declared_node_count(), Some(6));
    assert_eq!(n.declared_element_count(), Some(10));
    assert!(n.count_warnings().is_empty());
    let r = validate(&n);
    assert_eq!(r.value("degenerate_elements"), Some(0.0));
    assert_eq!(r.value("zero_capacitance_warnings"), Some(2.0));
}

#[test]
fn array_extract_counts() {
    let n = parse_netlist(ARRAY).unwrap();
    assert_eq!(n.element_count(), 79);
    assert_eq!(n.declared_element_count(), Some(79));
    let r = validate(&n);
    assert!(r.value("degenerate_elements").unwrap() > 0.0);
    // either the trailer matches or the mismatch is reported
    let warnings = n.count_warnings();
    if n.node_count() != 25 {
        assert!(warnings.iter().any(|w| w.contains("25 nodes")), "{warnings:?}");
    } else {
        assert!(warnings.is_empty());
    }
}

#[test]
fn corpus_round_trips() {
    for text in [CELL, ARRAY] {
        let first = parse_netlist(text).unwrap();
        let printed = print_netlist(&first);
        let second = parse_netlist(&printed).unwrap();
        assert_eq!(first, second);
        assert_eq!(print_netlist(&second), printed);
    }
}
