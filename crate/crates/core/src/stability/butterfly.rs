// SPDX-License-Identifier: Apache-2.0

//! Cell recognition, DC testbenches and butterfly curves.

use std::fmt::Write as _;

use super::square::inscribed_squares;
use crate::devices::TechnologyParams;
use crate::engine::{Circuit, TransferCurve};
use crate::error::{Error, Result};
use crate::netlist::{Element, MosElement, Netlist, Node, Polarity, SourceElement, GROUND};

/// Accepted spellings (case-insensitive) of the complement storage node.
pub const QBAR_NAMES: &[&str] = &["qbar", "qb", "q_bar", "qn", "nq", "q_b"];

/// Name of the swept input in open-loop testbenches.
pub(crate) const SWEEP_NODE: &str = "__vin";
pub(crate) const SWEEP_SOURCE: &str = "V__vin";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Wordline low; the access devices only leak.
    #[default]
    Hold,
    /// Wordline at VDD with both bitlines held at VDD.
    Read,
}

/// The roles of a cell's devices and nodes, found by connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct CellTopology {
    pub q: String,
    pub qbar: String,
    pub vdd: String,
    pub wordline: Option<String>,
    pub bitline: Option<String>,
    pub bitline_bar: Option<String>,
    /// Drives Q from Qbar.
    pub inverter_a: Vec<String>,
    /// Drives Qbar from Q.
    pub inverter_b: Vec<String>,
    pub access_q: Vec<String>,
    pub access_qbar: Vec<String>,
}

fn touches(m: &MosElement, node: &str) -> bool {
    m.drain.name() == node || m.source.name() == node
}

fn other_terminal<'a>(m: &'a MosElement, node: &str) -> &'a str {
    if m.drain.name() == node {
        m.source.name()
    } else {
        m.drain.name()
    }
}

/// Finds Q/Qbar by name and classifies the transistors around them.
pub fn identify_cell(cell: &Netlist) -> Result<CellTopology> {
    let names = cell.node_names();
    let q = names
        .iter()
        .find(|n| n.eq_ignore_ascii_case("q"))
        .ok_or_else(|| Error::Configuration("no storage node named Q".into()))?
        .clone();
    let qbar = names
        .iter()
        .find(|n| QBAR_NAMES.iter().any(|c| n.eq_ignore_ascii_case(c)))
        .ok_or_else(|| Error::Configuration(format!("no complement node (one of {})", QBAR_NAMES.join(", "))))?
        .clone();

    let live: Vec<&MosElement> = cell.mosfets().filter(|m| !m.is_degenerate()).collect();
    let ids = |pred: &dyn Fn(&MosElement) -> bool| -> Vec<String> {
        live.iter().filter(|m| pred(m)).map(|m| m.id.clone()).collect()
    };
    let inverter_a = ids(&|m| touches(m, &q) && m.gate.name() == qbar);
    let inverter_b = ids(&|m| touches(m, &qbar) && m.gate.name() == q);
    let access_q = ids(&|m| touches(m, &q) && m.gate.name() != qbar);
    let access_qbar = ids(&|m| touches(m, &qbar) && m.gate.name() != q);
    if inverter_a.is_empty() || inverter_b.is_empty() {
        return Err(Error::Configuration(format!(
            "{q} and {qbar} are not driven by cross-coupled inverters"
        )));
    }

    let find = |id: &str| live.iter().find(|m| m.id == id).copied().expect("id from live list");
    let vdd = inverter_a
        .iter()
        .map(|id| find(id))
        .find(|m| m.polarity == Polarity::Pmos)
        .map(|m| other_terminal(m, &q).to_string())
        .ok_or_else(|| Error::Configuration("inverter driving Q has no PMOS pull-up".into()))?;

    let wordline = access_q.iter().chain(&access_qbar).map(|id| find(id).gate.name().to_string()).next();
    let bitline = access_q.first().map(|id| other_terminal(find(id), &q).to_string());
    let bitline_bar = access_qbar.first().map(|id| other_terminal(find(id), &qbar).to_string());
    Ok(CellTopology {
        q,
        qbar,
        vdd,
        wordline,
        bitline,
        bitline_bar,
        inverter_a,
        inverter_b,
        access_q,
        access_qbar,
    })
}

/// Voltages applied by a testbench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bias {
    pub vdd: f64,
    pub wl: f64,
    pub bl: f64,
    pub blb: f64,
}

impl Bias {
    pub(crate) fn for_mode(mode: Mode, vdd: f64) -> Self {
        Bias {
            vdd,
            wl: if mode == Mode::Read { vdd } else { 0.0 },
            bl: vdd,
            blb: vdd,
        }
    }
}

pub(crate) const VDD_SOURCE: &str = "V__vdd";
pub(crate) const WL_SOURCE: &str = "V__wl";
pub(crate) const BL_SOURCE: &str = "V__bl";
pub(crate) const BLB_SOURCE: &str = "V__blb";

/// The cell's transistors and resistors with fresh bias sources. With
/// `open_loop`, both inverter inputs are moved to one swept node so a single
/// sweep traces both transfer curves.
pub(crate) fn testbench(cell: &Netlist, topo: &CellTopology, bias: Bias, open_loop: bool) -> Netlist {
    let mut tb = Netlist::new(format!("{} testbench", cell.title));
    let mut driven: Vec<String> = vec![GROUND.to_string(), topo.vdd.clone()];
    let pin = |tb: &mut Netlist, id: &str, node: &str, v: f64, driven: &mut Vec<String>| {
        tb.push(Element::Vsource(SourceElement::dc(id, node, GROUND, v)));
        driven.push(node.to_string());
    };
    pin(&mut tb, VDD_SOURCE, &topo.vdd, bias.vdd, &mut driven);
    if let Some(wl) = &topo.wordline {
        pin(&mut tb, WL_SOURCE, wl, bias.wl, &mut driven);
    }
    if let Some(bl) = &topo.bitline {
        pin(&mut tb, BL_SOURCE, bl, bias.bl, &mut driven);
    }
    if let Some(blb) = &topo.bitline_bar {
        pin(&mut tb, BLB_SOURCE, blb, bias.blb, &mut driven);
    }
    if open_loop {
        pin(&mut tb, SWEEP_SOURCE, SWEEP_NODE, 0.0, &mut driven);
    }
    let mut bulks = Vec::new();
    for e in cell.elements().filter(|e| !e.is_degenerate()) {
        match e {
            Element::Mos(m) => {
                let mut m = m.clone();
                let rewire = (topo.inverter_a.contains(&m.id) || topo.inverter_b.contains(&m.id)) && open_loop;
                if rewire {
                    m.gate = Node::named(SWEEP_NODE);
                }
                bulks.push((m.bulk.name().to_string(), m.polarity));
                tb.push(Element::Mos(m));
            }
            Element::Resistor(_) => tb.push(e.clone()),
            _ => {}
        }
    }
    for (node, polarity) in bulks {
        if !driven.contains(&node) && node != topo.q && node != topo.qbar {
            let v = if polarity == Polarity::Pmos { bias.vdd } else { 0.0 };
            let id = format!("V__bulk{}", driven.len());
            pin(&mut tb, &id, &node, v, &mut driven);
        }
    }
    tb
}

/// Butterfly curves and their inscribed squares.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterflyData {
    pub vdd: f64,
    pub grid: f64,
    pub mode: Mode,
    /// Inverter A: input (Qbar) against output (Q).
    pub curve_a: TransferCurve,
    /// Inverter B: input (Q) against output (Qbar). Plotted mirrored.
    pub curve_b: TransferCurve,
    pub snm_high: f64,
    pub snm_low: f64,
    pub snm: f64,
    /// Lower-left corners of the two squares.
    pub anchor_high: Option<(f64, f64)>,
    pub anchor_low: Option<(f64, f64)>,
    /// Number of intersections of the two curves (3 for a healthy cell).
    pub crossings: usize,
}

impl ButterflyData {
    pub fn from_curves(curve_a: TransferCurve, curve_b: TransferCurve, vdd: f64, grid: f64, mode: Mode) -> Self {
        let fit = inscribed_squares(&curve_a, &curve_b);
        ButterflyData {
            vdd,
            grid,
            mode,
            snm_high: fit.snm_high,
            snm_low: fit.snm_low,
            snm: fit.snm(),
            anchor_high: fit.anchor_high,
            anchor_low: fit.anchor_low,
            crossings: fit.crossings.len(),
            curve_a,
            curve_b,
        }
    }

    /// `V1, Vout_A, Vout_B_mirrored` rows followed by `# key=value` lines.
    /// The mirrored column is the inverse of inverter B's curve.
    pub fn to_csv(&self) -> String {
        let mut inverse: Vec<(f64, f64)> = self.curve_b.points().map(|(y, x)| (x, y)).collect();
        inverse.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (ix, iy): (Vec<f64>, Vec<f64>) = inverse.into_iter().unzip();
        let mut out = String::from("V1,Vout_A,Vout_B_mirrored\n");
        for (x, ya) in self.curve_a.points() {
            let yb = crate::engine::interpolate(&ix, &iy, x);
            let _ = writeln!(out, "{x:e},{ya:e},{yb:e}");
        }
        let _ = writeln!(out, "# snm_high={:e}", self.snm_high);
        let _ = writeln!(out, "# snm_low={:e}", self.snm_low);
        let _ = writeln!(out, "# snm={:e}", self.snm);
        let _ = writeln!(out, "# vdd={:e}", self.vdd);
        out
    }
}

/// A compiled open-loop testbench, reusable across runs (Monte Carlo).
#[derive(Debug, Clone)]
pub(crate) struct ButterflyBench {
    pub circuit: Circuit,
    topo: CellTopology,
    vdd: f64,
    mode: Mode,
}

impl ButterflyBench {
    pub(crate) fn new(cell: &Netlist, params: &TechnologyParams, mode: Mode, vdd: f64) -> Result<Self> {
        if !(vdd > 0.0) {
            return Err(Error::Domain(format!("supply must be positive, got {vdd}")));
        }
        let topo = identify_cell(cell)?;
        let tb = testbench(cell, &topo, Bias::for_mode(mode, vdd), true);
        Ok(ButterflyBench {
            circuit: Circuit::new(&tb, params)?,
            topo,
            vdd,
            mode,
        })
    }

    pub(crate) fn run(&mut self, grid: f64) -> Result<ButterflyData> {
        if !(grid > 0.0) {
            return Err(Error::Domain(format!("grid must be positive, got {grid}")));
        }
        let sweep = self.circuit.sweep(SWEEP_SOURCE, 0.0, self.vdd, grid, None)?;
        let a = sweep.curve(&self.topo.q).expect("Q is in the testbench");
        let b = sweep.curve(&self.topo.qbar).expect("Qbar is in the testbench");
        Ok(ButterflyData::from_curves(a, b, self.vdd, grid, self.mode))
    }
}

/// Opens the cell's feedback loop, sweeps both inverters from 0 to `vdd`
/// in steps of `grid`, and measures the squares between the curves.
pub fn butterfly(cell: &Netlist, params: &TechnologyParams, mode: Mode, vdd: f64, grid: f64) -> Result<ButterflyData> {
    ButterflyBench::new(cell, params, mode, vdd)?.run(grid)
}
