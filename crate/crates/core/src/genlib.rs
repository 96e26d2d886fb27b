// SPDX-License-Identifier: Apache-2.0

//! Netlist generators: the 6T cell, cell arrays and periphery circuits.
//!
//! Every generator returns a self-contained netlist with DC bias sources on
//! its supply and control nodes, ready for simulation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::netlist::{Element, MosElement, Netlist, Polarity, SourceElement, TwoTerminal, GROUND};

pub const DEFAULT_VDD: f64 = 1.8;

/// W and L in meters for each device class of the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub pu: (f64, f64),
    pub pd: (f64, f64),
    pub pg: (f64, f64),
}

impl Default for CellGeometry {
    fn default() -> Self {
        CellGeometry {
            pu: (10.5e-6, 2e-6),
            pd: (6e-6, 2e-6),
            pg: (10.5e-6, 2.5e-6),
        }
    }
}

impl CellGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, (w, l)) in [("PU", self.pu), ("PD", self.pd), ("PG", self.pg)] {
            if !(w > 0.0 && l > 0.0) {
                return Err(Error::Domain(format!("{name} geometry must be positive, got W={w} L={l}")));
            }
        }
        Ok(())
    }
}

/// Extracted node capacitances of the reference layout, by cell node name.
pub fn extracted_parasitics() -> BTreeMap<String, f64> {
    [("WL", 97.083e-15), ("BL", 12.392e-15), ("Q", 35.838e-15), ("Qbar", 35.338e-15)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Node names of one cell.
struct CellNodes {
    q: String,
    qbar: String,
    wl: String,
    bl: String,
    blb: String,
}

fn push_cell(net: &mut Netlist, first_id: usize, g: &CellGeometry, n: &CellNodes) {
    let m = |k: usize| format!("M{}", first_id + k);
    let (vdd, gnd) = ("VDD", GROUND);
    let devices = [
        MosElement::new(m(0), [&n.q, &n.qbar, gnd, gnd], Polarity::Nmos, g.pd.0, g.pd.1),
        MosElement::new(m(1), [&n.q, &n.qbar, vdd, vdd], Polarity::Pmos, g.pu.0, g.pu.1),
        MosElement::new(m(2), [&n.qbar, &n.q, gnd, gnd], Polarity::Nmos, g.pd.0, g.pd.1),
        MosElement::new(m(3), [&n.qbar, &n.q, vdd, vdd], Polarity::Pmos, g.pu.0, g.pu.1),
        MosElement::new(m(4), [&n.bl, &n.wl, &n.q, gnd], Polarity::Nmos, g.pg.0, g.pg.1),
        MosElement::new(m(5), [&n.blb, &n.wl, &n.qbar, gnd], Polarity::Nmos, g.pg.0, g.pg.1),
    ];
    for d in devices {
        net.push(Element::Mos(d));
    }
}

fn source(net: &mut Netlist, id: &str, node: &str, v: f64) {
    net.push(Element::Vsource(SourceElement::dc(id, node, GROUND, v)));
}

/// One 6T cell: M1/M2 drive Q from Qbar, M3/M4 drive Qbar from Q, M5 and
/// M6 connect Q and Qbar to BL and BLB. The cell is biased in hold: VDD at
/// 1.8 V, WL low, both bitlines high.
///
/// `parasitics` adds a grounded capacitor per named node; zero entries are
/// skipped.
pub fn build_6t_cell(g: &CellGeometry, parasitics: Option<&BTreeMap<String, f64>>) -> Netlist {
    let mut net = Netlist::new("6T SRAM cell");
    let nodes = CellNodes {
        q: "Q".into(),
        qbar: "Qbar".into(),
        wl: "WL".into(),
        bl: "BL".into(),
        blb: "BLB".into(),
    };
    push_cell(&mut net, 1, g, &nodes);
    source(&mut net, "VDD", "VDD", DEFAULT_VDD);
    source(&mut net, "VWL", "WL", 0.0);
    source(&mut net, "VBL", "BL", DEFAULT_VDD);
    source(&mut net, "VBLB", "BLB", DEFAULT_VDD);
    for (node, &c) in parasitics.into_iter().flatten() {
        if c != 0.0 {
            net.push(Element::Capacitor(TwoTerminal::new(format!("Cpar_{node}"), node, GROUND, c)));
        }
    }
    net
}

/// `rows × cols` cells. Row `r` shares `WL{r}`, column `c` shares `BL{c}`
/// and `BLB{c}`, and the cell at (r, c) stores on `Q_{r}_{c}`/`Qbar_{r}_{c}`.
/// A 1×1 array is exactly [`build_6t_cell`] without parasitics.
pub fn build_array(rows: usize, cols: usize, g: &CellGeometry) -> Result<Netlist> {
    if rows == 0 || cols == 0 {
        return Err(Error::Domain(format!("array must be at least 1x1, got {rows}x{cols}")));
    }
    if rows == 1 && cols == 1 {
        return Ok(build_6t_cell(g, None));
    }
    let mut net = Netlist::new(format!("{rows}x{cols} SRAM array"));
    for r in 0..rows {
        for c in 0..cols {
            let nodes = CellNodes {
                q: format!("Q_{r}_{c}"),
                qbar: format!("Qbar_{r}_{c}"),
                wl: format!("WL{r}"),
                bl: format!("BL{c}"),
                blb: format!("BLB{c}"),
            };
            push_cell(&mut net, 1 + 6 * (r * cols + c), g, &nodes);
        }
    }
    source(&mut net, "VDD", "VDD", DEFAULT_VDD);
    for r in 0..rows {
        source(&mut net, &format!("VWL{r}"), &format!("WL{r}"), 0.0);
    }
    for c in 0..cols {
        source(&mut net, &format!("VBL{c}"), &format!("BL{c}"), DEFAULT_VDD);
        source(&mut net, &format!("VBLB{c}"), &format!("BLB{c}"), DEFAULT_VDD);
    }
    Ok(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeripheryKind {
    SenseAmp,
    Precharge,
    WriteDriver,
    Decoder2to4,
}

impl PeripheryKind {
    pub const ALL: [PeripheryKind; 4] = [
        PeripheryKind::SenseAmp,
        PeripheryKind::Precharge,
        PeripheryKind::WriteDriver,
        PeripheryKind::Decoder2to4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PeripheryKind::SenseAmp => "sense-amp",
            PeripheryKind::Precharge => "precharge",
            PeripheryKind::WriteDriver => "write-driver",
            PeripheryKind::Decoder2to4 => "decoder",
        }
    }
}

impl fmt::Display for PeripheryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PeripheryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "sense-amp" | "senseamp" => Ok(PeripheryKind::SenseAmp),
            "precharge" => Ok(PeripheryKind::Precharge),
            "write-driver" => Ok(PeripheryKind::WriteDriver),
            "decoder" | "decoder-2to4" | "decoder2to4" => Ok(PeripheryKind::Decoder2to4),
            _ => Err(Error::Semantic(format!("unknown periphery kind {s:?}"))),
        }
    }
}

/// Sequential device ids with NMOS sized as the cell pull-down and PMOS as
/// the pull-up.
struct Builder<'a> {
    net: Netlist,
    g: &'a CellGeometry,
    next: usize,
}

impl<'a> Builder<'a> {
    fn new(title: &str, g: &'a CellGeometry) -> Self {
        let mut net = Netlist::new(title);
        source(&mut net, "VDD", "VDD", DEFAULT_VDD);
        Builder { net, g, next: 1 }
    }

    fn mos(&mut self, polarity: Polarity, d: &str, gate: &str, s: &str) {
        let (w, l, bulk) = match polarity {
            Polarity::Nmos => (self.g.pd.0, self.g.pd.1, GROUND),
            Polarity::Pmos => (self.g.pu.0, self.g.pu.1, "VDD"),
        };
        let id = format!("M{}", self.next);
        self.next += 1;
        self.net.push(Element::Mos(MosElement::new(id, [d, gate, s, bulk], polarity, w, l)));
    }

    fn inverter(&mut self, input: &str, output: &str) {
        self.mos(Polarity::Pmos, output, input, "VDD");
        self.mos(Polarity::Nmos, output, input, GROUND);
    }

    fn nand2(&mut self, a: &str, b: &str, output: &str) {
        let mid = format!("{output}_x");
        self.mos(Polarity::Pmos, output, a, "VDD");
        self.mos(Polarity::Pmos, output, b, "VDD");
        self.mos(Polarity::Nmos, output, a, &mid);
        self.mos(Polarity::Nmos, &mid, b, GROUND);
    }
}

/// Bitline load used where a periphery circuit drives the bitlines.
const BITLINE_LOAD: f64 = 100e-15;

/// Periphery circuits, with control inputs held inactive:
///
/// * sense amplifier: cross-coupled inverters on BL/BLB with a PMOS header
///   gated by SEB and an NMOS tail gated by SE;
/// * precharge: two PMOS pull-ups on BL/BLB and an equalizer, gated by PC;
/// * write driver: an inverter from D and NMOS pass devices gated by WE
///   driving BL with D and BLB with its complement;
/// * 2:4 decoder: static NAND2 gates with output inverters; `D{k}` is high
///   when `A1A0` equals `k`.
pub fn build_periphery(kind: PeripheryKind, g: &CellGeometry) -> Netlist {
    let mut b = Builder::new(&format!("{kind}"), g);
    match kind {
        PeripheryKind::SenseAmp => {
            b.mos(Polarity::Pmos, "TOP", "SEB", "VDD");
            b.mos(Polarity::Pmos, "BL", "BLB", "TOP");
            b.mos(Polarity::Pmos, "BLB", "BL", "TOP");
            b.mos(Polarity::Nmos, "BL", "BLB", "TAIL");
            b.mos(Polarity::Nmos, "BLB", "BL", "TAIL");
            b.mos(Polarity::Nmos, "TAIL", "SE", GROUND);
            source(&mut b.net, "VSE", "SE", 0.0);
            source(&mut b.net, "VSEB", "SEB", DEFAULT_VDD);
        }
        PeripheryKind::Precharge => {
            b.mos(Polarity::Pmos, "BL", "PC", "VDD");
            b.mos(Polarity::Pmos, "BLB", "PC", "VDD");
            b.mos(Polarity::Pmos, "BL", "PC", "BLB");
            source(&mut b.net, "VPC", "PC", DEFAULT_VDD);
        }
        PeripheryKind::WriteDriver => {
            b.inverter("D", "DB");
            b.mos(Polarity::Nmos, "BL", "WE", "D");
            b.mos(Polarity::Nmos, "BLB", "WE", "DB");
            source(&mut b.net, "VD", "D", 0.0);
            source(&mut b.net, "VWE", "WE", 0.0);
            for node in ["BL", "BLB"] {
                b.net.push(Element::Capacitor(TwoTerminal::new(format!("C{node}"), node, GROUND, BITLINE_LOAD)));
            }
        }
        PeripheryKind::Decoder2to4 => {
            b.inverter("A0", "A0B");
            b.inverter("A1", "A1B");
            for k in 0..4 {
                let a0 = if k & 1 == 1 { "A0" } else { "A0B" };
                let a1 = if k & 2 == 2 { "A1" } else { "A1B" };
                let n = format!("N{k}");
                b.nand2(a0, a1, &n);
                b.inverter(&n, &format!("D{k}"));
            }
            source(&mut b.net, "VA0", "A0", 0.0);
            source(&mut b.net, "VA1", "A1", 0.0);
        }
    }
    b.net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::TechnologyParams;
    use crate::engine::solve_dc;
    use crate::netlist::{parse_netlist, print_netlist, validate, Node};

    fn count(n: &Netlist, p: Polarity) -> usize {
        n.mosfets().filter(|m| m.polarity == p).count()
    }

    fn all_generated() -> Vec<Netlist> {
        let g = CellGeometry::default();
        let mut v = vec![
            build_6t_cell(&g, None),
            build_6t_cell(&g, Some(&extracted_parasitics())),
            build_array(2, 3, &g).unwrap(),
        ];
        v.extend(PeripheryKind::ALL.iter().map(|&k| build_periphery(k, &g)));
        v
    }

    #[test]
    fn cell_device_mix() {
        let c = build_6t_cell(&CellGeometry::default(), None);
        assert_eq!(c.mosfets().count(), 6);
        assert_eq!(count(&c, Polarity::Pmos), 2);
        assert_eq!(count(&c, Polarity::Nmos), 4);
        assert_eq!(c.node_count(), 6);
        assert_eq!(c.element_count(), 10);
        for node in ["Q", "Qbar", "BL", "BLB", "WL", "VDD"] {
            assert!(c.node_names().iter().any(|n| n == node), "{node}");
        }
    }

    #[test]
    fn parasitics() {
        let g = CellGeometry::default();
        let c = build_6t_cell(&g, Some(&extracted_parasitics()));
        let caps: BTreeMap<String, f64> = c
            .elements()
            .filter_map(|e| match e {
                Element::Capacitor(t) => Some((t.a.name().to_string(), t.value)),
                _ => None,
            })
            .collect();
        assert_eq!(caps.len(), 4);
        assert_eq!(caps["WL"], 97.083e-15);
        assert_eq!(caps["BL"], 12.392e-15);
        assert_eq!(caps["Q"], 35.838e-15);
        assert_eq!(caps["Qbar"], 35.338e-15);

        let zeros: BTreeMap<String, f64> = extracted_parasitics().into_keys().map(|k| (k, 0.0)).collect();
        assert_eq!(build_6t_cell(&g, Some(&zeros)), build_6t_cell(&g, None));
    }

    #[test]
    fn array_shapes() {
        let g = CellGeometry::default();
        assert_eq!(build_array(1, 1, &g).unwrap(), build_6t_cell(&g, None));
        let a = build_array(2, 3, &g).unwrap();
        assert_eq!(a.mosfets().count(), 36);
        let names = a.node_names();
        assert_eq!(names.iter().filter(|n| n.starts_with("WL")).count(), 2);
        assert_eq!(names.iter().filter(|n| n.starts_with("BL") && !n.starts_with("BLB")).count(), 3);
        assert_eq!(names.iter().filter(|n| n.starts_with("BLB")).count(), 3);
        // 6 Q/Qbar pairs, 2 WL, 3 BL, 3 BLB, VDD
        assert_eq!(a.node_count(), 12 + 2 + 3 + 3 + 1);
        // 36 devices, VDD, 2 wordline and 6 bitline sources
        assert_eq!(a.element_count(), 36 + 1 + 2 + 6);
        assert!(build_array(0, 3, &g).is_err());
    }

    #[test]
    fn periphery_device_counts() {
        let g = CellGeometry::default();
        let sa = build_periphery(PeripheryKind::SenseAmp, &g);
        assert_eq!((count(&sa, Polarity::Pmos), count(&sa, Polarity::Nmos)), (3, 3));
        let pc = build_periphery(PeripheryKind::Precharge, &g);
        assert_eq!((count(&pc, Polarity::Pmos), count(&pc, Polarity::Nmos)), (3, 0));
        let wd = build_periphery(PeripheryKind::WriteDriver, &g);
        assert_eq!((count(&wd, Polarity::Pmos), count(&wd, Polarity::Nmos)), (1, 3));
        let dec = build_periphery(PeripheryKind::Decoder2to4, &g);
        assert_eq!(dec.mosfets().count(), 4 + 4 * 4 + 4 * 2);
    }

    #[test]
    fn decoder_truth_table() {
        let g = CellGeometry::default();
        let p = TechnologyParams::default();
        for code in 0..4usize {
            let mut dec = build_periphery(PeripheryKind::Decoder2to4, &g);
            for e in dec.elements_mut() {
                if let Element::Vsource(s) = e {
                    let bit = match s.id.as_str() {
                        "VA0" => code & 1,
                        "VA1" => (code >> 1) & 1,
                        _ => continue,
                    };
                    s.stimulus = crate::netlist::Stimulus::Dc(bit as f64 * DEFAULT_VDD);
                }
            }
            let sol = solve_dc(&dec, &p, None).unwrap();
            for k in 0..4 {
                let v = sol.voltage(&format!("D{k}")).unwrap();
                if k == code {
                    assert!(v > 0.9 * DEFAULT_VDD, "code {code}: D{k} = {v}");
                } else {
                    assert!(v < 0.1 * DEFAULT_VDD, "code {code}: D{k} = {v}");
                }
            }
        }
    }

    #[test]
    fn generated_netlists_validate_cleanly() {
        for n in all_generated() {
            let r = validate(&n);
            assert_eq!(r.value("degenerate_elements"), Some(0.0), "{}", n.title);
            assert_eq!(r.value("floating_nodes"), Some(0.0), "{}: {r}", n.title);
        }
    }

    #[test]
    fn generated_netlists_round_trip() {
        for n in all_generated() {
            let text = print_netlist(&n);
            let back = parse_netlist(&text).unwrap();
            assert_eq!(print_netlist(&back), text);
            assert_eq!(back.title, n.title);
            assert_eq!(back.element_count(), n.element_count());
        }
    }

    #[test]
    fn cell_is_left_right_symmetric() {
        let c = build_6t_cell(&CellGeometry::default(), None);
        let swap = |s: &str| -> String {
            match s {
                "Q" => "Qbar",
                "Qbar" => "Q",
                "BL" => "BLB",
                "BLB" => "BL",
                other => other,
            }
            .to_string()
        };
        // devices as unordered channel plus gate, bulk and size
        let key = |m: &MosElement, f: &dyn Fn(&str) -> String| {
            let name = |n: &Node| f(n.name());
            let mut ch = [name(&m.drain), name(&m.source)];
            ch.sort();
            (ch, name(&m.gate), name(&m.bulk), m.polarity, m.w.to_bits(), m.l.to_bits())
        };
        let mut orig: Vec<_> = c.mosfets().map(|m| key(m, &|s| s.to_string())).collect();
        let mut mirrored: Vec<_> = c.mosfets().map(|m| key(m, &swap)).collect();
        orig.sort();
        mirrored.sort();
        assert_eq!(orig, mirrored);
    }

    #[test]
    fn kind_names_parse() {
        for k in PeripheryKind::ALL {
            assert_eq!(k.name().parse::<PeripheryKind>().unwrap(), k);
        }
        assert!("flipflop".parse::<PeripheryKind>().is_err());
    }
}
