// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{Element, Item, MosElement, Netlist, SourceElement, Stimulus};
use crate::units::{format_value, format_value_or};

/// Prints a netlist in the dialect accepted by [`super::parse_netlist`].
/// The output is canonical: printing a re-parsed netlist gives the same text.
pub fn print_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    if !netlist.title.is_empty() {
        let _ = writeln!(out, "* TITLE: {}", netlist.title);
    }
    for item in &netlist.items {
        match item {
            Item::Comment(c) => out.push_str(c),
            Item::Element(e) => out.push_str(&element_card(e)),
        }
        out.push('\n');
    }
    out.push_str(".END\n");
    out
}

pub(crate) fn element_card(element: &Element) -> String {
    match element {
        Element::Mos(m) => mos_card(m),
        Element::Capacitor(c) => format!("{} {} {} C={}", c.id, c.a, c.b, format_value_or(c.value, "f")),
        Element::Resistor(r) => format!("{} {} {} {}", r.id, r.a, r.b, format_value(r.value)),
        Element::Vsource(s) | Element::Isource(s) => source_card(s),
    }
}

fn mos_card(m: &MosElement) -> String {
    let mut s = format!(
        "{} {} {} {} {} {} L={} W={}",
        m.id,
        m.drain,
        m.gate,
        m.source,
        m.bulk,
        m.polarity.keyword(),
        format_value_or(m.l, "u"),
        format_value_or(m.w, "u"),
    );
    let extras = [("AD", m.ad, "p"), ("PD", m.pd, "u"), ("AS", m.as_, "p"), ("PS", m.ps, "u")];
    for (key, value, zero) in extras {
        if let Some(v) = value {
            let _ = write!(s, " {key}={}", format_value_or(v, zero));
        }
    }
    if let Some([a, b, c, d]) = m.bbox {
        let _ = write!(s, "\n* {} DRAIN GATE SOURCE BULK ({a} {b} {c} {d})", m.id);
    }
    s
}

fn source_card(s: &SourceElement) -> String {
    let head = format!("{} {} {}", s.id, s.pos, s.neg);
    match &s.stimulus {
        Stimulus::Dc(v) => format!("{head} DC {}", format_value(*v)),
        Stimulus::Pulse(p) => {
            let args: Vec<String> = [p.v1, p.v2, p.delay, p.rise, p.fall, p.width, p.period]
                .iter()
                .map(|v| format_value(*v))
                .collect();
            format!("{head} PULSE({})", args.join(" "))
        }
        Stimulus::Pwl(points) => {
            let args: Vec<String> = points
                .iter()
                .map(|(t, v)| format!("{} {}", format_value(*t), format_value(*v)))
                .collect();
            format!("{head} PWL({})", args.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_netlist, TwoTerminal};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_prints_end_only() {
        assert_eq!(print_netlist(&Netlist::default()), ".END\n");
    }

    #[test]
    fn capacitor_format() {
        let mut n = Netlist::default();
        n.push(Element::Capacitor(TwoTerminal::new("Cpar1", "1", "0", 97.083e-15)));
        assert_eq!(print_netlist(&n), "Cpar1 1 0 C=97.083f\n.END\n");
    }

    #[test]
    fn extractor_lines_print_back_verbatim() {
        let lines = [
            "M5 3 4 1 6 PMOS L=2u W=10.5u AD=63p PD=33u AS=143p PS=64u",
            "* M5 DRAIN GATE SOURCE BULK (34 31 36 41.5)",
            "M19 ? 1 ? 1 NMOS L=0u W=0u",
            "* M19 DRAIN GATE SOURCE BULK (298.5 3 300.5 10)",
            "M22 1 20 14 1 NMOS L=2u W=6.5u AD=1.43025n PD=610u AS=138.5p PS=70u",
            "* M22 DRAIN GATE SOURCE BULK (133 -28 135 -21.5)",
            "* WARNING: Node 5 has zero nodal parasitic capacitance.",
        ];
        let text = lines.join("\n");
        let printed = print_netlist(&parse_netlist(&text).unwrap());
        assert_eq!(printed, format!("{text}\n.END\n"));
    }

    fn arb_node() -> impl Strategy<Value = String> {
        prop_oneof![Just("0".to_string()), Just("?".to_string()), "[a-zA-Z][a-zA-Z0-9_]{0,3}", "[1-9][0-9]{0,2}"]
    }

    fn arb_value() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), 1e-16f64..1e-3, 1e-3f64..1e4]
    }

    fn arb_card() -> impl Strategy<Value = String> {
        prop_oneof![
            (arb_node(), arb_node(), arb_node(), arb_node(), any::<bool>(), arb_value(), arb_value(), proptest::option::of(arb_value()))
                .prop_map(|(d, g, s, b, p, l, w, ad)| {
                    let mut card = format!("M {d} {g} {s} {b} {} L={l:e} W={w:e}", if p { "nmos" } else { "PMOS" });
                    if let Some(ad) = ad {
                        card.push_str(&format!(" AD={ad:e}"));
                    }
                    card
                }),
            (arb_node(), arb_node(), arb_value()).prop_map(|(a, b, v)| format!("C {a} {b} {v:e}")),
            (arb_node(), arb_node(), 1.0f64..1e6).prop_map(|(a, b, v)| format!("R {a} {b} R={v:e}")),
            (arb_node(), arb_node(), -5.0f64..5.0).prop_map(|(a, b, v)| format!("V {a} {b} {v:e}")),
            (arb_node(), arb_node(), 1e-12f64..1e-9, 1e-12f64..1e-9)
                .prop_map(|(a, b, r, f)| format!("V {a} {b} PULSE(0 1.8 1n {r:e} {f:e} 5n 10n)")),
            (arb_node(), arb_node()).prop_map(|(a, b)| format!("I {a} {b} PWL(0 0 1n 1u 3n 2u)")),
            "\\* [ -~]{0,20}".prop_map(|c| c.trim_end().to_string()),
        ]
    }

    proptest! {
        #[test]
        fn print_is_canonical(cards in proptest::collection::vec(arb_card(), 0..12)) {
            // give every element a unique id
            let text: String = cards
                .iter()
                .enumerate()
                .map(|(i, c)| if c.starts_with('*') { format!("{c}\n") } else {
                    let (k, rest) = c.split_at(1);
                    format!("{k}{i}{rest}\n")
                })
                .collect();
            let first = parse_netlist(&text).unwrap();
            let printed = print_netlist(&first);
            let second = parse_netlist(&printed).unwrap();
            prop_assert_eq!(&first, &second);
            prop_assert_eq!(print_netlist(&second), printed);
        }
    }
}
