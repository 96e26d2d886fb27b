// SPDX-License-Identifier: Apache-2.0

//! Netlist model for the extracted-layout SPICE subset.
//!
//! The dialect has five element cards (`M`, `C`, `R`, `V`, `I`), `*` comment
//! lines and `.END`. Extractor output carries two kinds of structured
//! comments that are understood here:
//!
//! * a bounding-box comment right after a transistor card,
//!   `* M5 DRAIN GATE SOURCE BULK (34 31 36 41.5)`, which is attached to
//!   that transistor;
//! * trailer counts, `* Total Nodes: 6` and `* Total Elements: 10`.
//!
//! Unresolved terminals are written `?` and kept as [`Node::Placeholder`]
//! so that the listing prints back unchanged.

mod parser;
mod printer;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

pub use parser::parse_netlist;
pub use printer::print_netlist;
pub use validate::validate;

/// Name of the reference node.
pub const GROUND: &str = "0";

/// A circuit node. Names are case-sensitive; `0` is ground.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Named(String),
    /// `?` in extractor output: a terminal the extractor could not resolve.
    Placeholder,
}

impl Node {
    pub fn named(name: impl Into<String>) -> Self {
        Node::Named(name.into())
    }

    pub fn ground() -> Self {
        Node::Named(GROUND.to_string())
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Node::Named(n) if n == GROUND)
    }

    pub fn is_placeholder(&self) -> bool {
        matches!(self, Node::Placeholder)
    }

    /// The printed form (`?` for a placeholder).
    pub fn name(&self) -> &str {
        match self {
            Node::Named(n) => n,
            Node::Placeholder => "?",
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Nmos,
    Pmos,
}

impl Polarity {
    pub fn keyword(self) -> &'static str {
        match self {
            Polarity::Nmos => "NMOS",
            Polarity::Pmos => "PMOS",
        }
    }
}

/// A MOSFET card. Lengths in meters, areas in square meters.
#[derive(Debug, Clone, PartialEq)]
pub struct MosElement {
    pub id: String,
    pub drain: Node,
    pub gate: Node,
    pub source: Node,
    pub bulk: Node,
    pub polarity: Polarity,
    pub l: f64,
    pub w: f64,
    pub ad: Option<f64>,
    pub pd: Option<f64>,
    pub as_: Option<f64>,
    pub ps: Option<f64>,
    /// Layout bounding box from the extractor comment.
    pub bbox: Option<[f64; 4]>,
}

impl MosElement {
    pub fn new(
        id: impl Into<String>,
        [drain, gate, source, bulk]: [&str; 4],
        polarity: Polarity,
        w: f64,
        l: f64,
    ) -> Self {
        MosElement {
            id: id.into(),
            drain: Node::named(drain),
            gate: Node::named(gate),
            source: Node::named(source),
            bulk: Node::named(bulk),
            polarity,
            l,
            w,
            ad: None,
            pd: None,
            as_: None,
            ps: None,
            bbox: None,
        }
    }

    pub fn terminals(&self) -> [&Node; 4] {
        [&self.drain, &self.gate, &self.source, &self.bulk]
    }

    /// Zero geometry or an unresolved terminal. Degenerate devices are
    /// reported by validation and never simulated.
    pub fn is_degenerate(&self) -> bool {
        self.l == 0.0 || self.w == 0.0 || self.terminals().iter().any(|n| n.is_placeholder())
    }

    /// W/L.
    pub fn aspect(&self) -> f64 {
        self.w / self.l
    }
}

/// Two-terminal passive (capacitor or resistor).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTerminal {
    pub id: String,
    pub a: Node,
    pub b: Node,
    pub value: f64,
}

impl TwoTerminal {
    pub fn new(id: impl Into<String>, a: &str, b: &str, value: f64) -> Self {
        TwoTerminal {
            id: id.into(),
            a: Node::named(a),
            b: Node::named(b),
            value,
        }
    }
}

/// Trapezoidal pulse train, SPICE `PULSE(v1 v2 td tr tf pw per)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub v1: f64,
    pub v2: f64,
    pub delay: f64,
    pub rise: f64,
    pub fall: f64,
    pub width: f64,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stimulus {
    Dc(f64),
    Pulse(Pulse),
    /// (time, value) points, times strictly increasing.
    Pwl(Vec<(f64, f64)>),
}

impl Stimulus {
    /// Source value at time `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Stimulus::Dc(v) => *v,
            Stimulus::Pulse(p) => {
                if t < p.delay {
                    return p.v1;
                }
                let mut tt = t - p.delay;
                if p.period > 0.0 {
                    tt %= p.period;
                }
                if tt < p.rise {
                    p.v1 + (p.v2 - p.v1) * tt / p.rise
                } else if tt < p.rise + p.width {
                    p.v2
                } else if tt < p.rise + p.width + p.fall {
                    p.v2 + (p.v1 - p.v2) * (tt - p.rise - p.width) / p.fall
                } else {
                    p.v1
                }
            }
            Stimulus::Pwl(points) => {
                let (first, last) = (points[0], points[points.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|&(pt, _)| pt <= t);
                let (t0, v0) = points[k - 1];
                let (t1, v1) = points[k];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Independent voltage or current source. Current flows from `pos`
/// through the source to `neg`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceElement {
    pub id: String,
    pub pos: Node,
    pub neg: Node,
    pub stimulus: Stimulus,
}

impl SourceElement {
    pub fn dc(id: impl Into<String>, pos: &str, neg: &str, value: f64) -> Self {
        SourceElement {
            id: id.into(),
            pos: Node::named(pos),
            neg: Node::named(neg),
            stimulus: Stimulus::Dc(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Mos(MosElement),
    Capacitor(TwoTerminal),
    Resistor(TwoTerminal),
    Vsource(SourceElement),
    Isource(SourceElement),
}

impl Element {
    pub fn id(&self) -> &str {
        match self {
            Element::Mos(m) => &m.id,
            Element::Capacitor(e) | Element::Resistor(e) => &e.id,
            Element::Vsource(s) | Element::Isource(s) => &s.id,
        }
    }

    pub fn nodes(&self) -> Vec<&Node> {
        match self {
            Element::Mos(m) => m.terminals().to_vec(),
            Element::Capacitor(e) | Element::Resistor(e) => vec![&e.a, &e.b],
            Element::Vsource(s) | Element::Isource(s) => vec![&s.pos, &s.neg],
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            Element::Mos(m) => m.is_degenerate(),
            other => other.nodes().iter().any(|n| n.is_placeholder()),
        }
    }
}

/// One line of a netlist: an element card or a free comment.
#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Element(Element),
    /// Full comment line including the leading `*`.
    Comment(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist {
    pub title: String,
    pub items: Vec<Item>,
}

impl Netlist {
    pub fn new(title: impl Into<String>) -> Self {
        Netlist {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, element: Element) {
        self.items.push(Item::Element(element));
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        let text = text.into();
        let line = if text.starts_with('*') { text } else { format!("* {text}") };
        self.items.push(Item::Comment(line));
    }

    pub fn elements(&self) -> impl DoubleEndedIterator<Item = &Element> {
        self.items.iter().filter_map(|i| match i {
            Item::Element(e) => Some(e),
            Item::Comment(_) => None,
        })
    }

    pub fn elements_mut(&mut self) -> impl Iterator<Item = &mut Element> {
        self.items.iter_mut().filter_map(|i| match i {
            Item::Element(e) => Some(e),
            Item::Comment(_) => None,
        })
    }

    pub fn comments(&self) -> impl DoubleEndedIterator<Item = &str> {
        self.items.iter().filter_map(|i| match i {
            Item::Comment(c) => Some(c.as_str()),
            Item::Element(_) => None,
        })
    }

    pub fn mosfets(&self) -> impl Iterator<Item = &MosElement> {
        self.elements().filter_map(|e| match e {
            Element::Mos(m) => Some(m),
            _ => None,
        })
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements().find(|e| e.id().eq_ignore_ascii_case(id))
    }

    pub fn element_count(&self) -> usize {
        self.elements().count()
    }

    /// Distinct named nodes other than ground, in first-use order.
    /// Placeholders are not counted.
    pub fn node_names(&self) -> Vec<String> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in self.elements() {
            for n in e.nodes() {
                if let Node::Named(name) = n {
                    if name != GROUND && seen.insert(name.clone()) {
                        out.push(name.clone());
                    }
                }
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.node_names().len()
    }

    /// `* Total Nodes: N` from the trailer, if present.
    pub fn declared_node_count(&self) -> Option<usize> {
        self.trailer_value("total nodes:")
    }

    /// `* Total Elements: N` from the trailer, if present.
    pub fn declared_element_count(&self) -> Option<usize> {
        self.trailer_value("total elements:")
    }

    fn trailer_value(&self, key: &str) -> Option<usize> {
        self.comments().rev().find_map(|c| {
            let body = c.trim_start_matches('*').trim();
            let lower = body.to_ascii_lowercase();
            lower
                .strip_prefix(key)
                .and_then(|rest| rest.trim().parse().ok())
        })
    }

    /// Warnings about trailer counts that disagree with the parsed content.
    pub fn count_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(n) = self.declared_node_count() {
            let actual = self.node_count();
            if n != actual {
                out.push(format!("trailer declares {n} nodes, netlist has {actual}"));
            }
        }
        if let Some(n) = self.declared_element_count() {
            let actual = self.element_count();
            if n != actual {
                out.push(format!("trailer declares {n} elements, netlist has {actual}"));
            }
        }
        out
    }
}
