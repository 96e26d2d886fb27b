// SPDX-License-Identifier: Apache-2.0

//! Write margin: the highest bitline voltage that flips a cell holding 1.

use super::butterfly::{identify_cell, testbench, Bias, CellTopology, BL_SOURCE};
use crate::devices::TechnologyParams;
use crate::engine::Circuit;
use crate::error::{Error, Result};
use crate::netlist::{Netlist, Stimulus};

/// Continuation step when walking the bitline down.
const WALK_STEP: f64 = 5e-3;
const RESOLUTION: f64 = 1e-3;

pub(crate) struct WriteBench {
    circuit: Circuit,
    topo: CellTopology,
    vdd: f64,
}

impl WriteBench {
    pub(crate) fn new(cell: &Netlist, params: &TechnologyParams, vdd: f64, wordline: f64) -> Result<Self> {
        if !(vdd > 0.0) {
            return Err(Error::Domain(format!("supply must be positive, got {vdd}")));
        }
        let topo = identify_cell(cell)?;
        if topo.bitline.is_none() {
            return Err(Error::Configuration("cell has no bitline on Q".into()));
        }
        let bias = Bias {
            vdd,
            wl: wordline,
            bl: vdd,
            blb: vdd,
        };
        let circuit = Circuit::new(&testbench(cell, &topo, bias, false), params)?;
        Ok(WriteBench { circuit, topo, vdd })
    }

    /// Solution holding Q high with the bitline at VDD.
    pub(crate) fn initial(&mut self) -> Result<Vec<f64>> {
        self.circuit.set_source(BL_SOURCE, Stimulus::Dc(self.vdd))?;
        let mut guess = vec![0.0; self.circuit.size()];
        for (name, v) in [(&self.topo.q, self.vdd), (&self.topo.qbar, 0.0)] {
            guess[self.circuit.node_index(name).expect("storage node")] = v;
        }
        for (k, name) in self.circuit.node_names().iter().enumerate() {
            if *name == self.topo.vdd || Some(name) == self.topo.bitline.as_ref() || Some(name) == self.topo.bitline_bar.as_ref() {
                guess[k] = self.vdd;
            }
        }
        self.circuit.solve_dc(Some(&guess))
            .map(|s| s.x)
    }

    pub(crate) fn flipped(&self, x: &[f64]) -> bool {
        let q = x[self.circuit.node_index(&self.topo.q).expect("storage node")];
        let qb = x[self.circuit.node_index(&self.topo.qbar).expect("storage node")];
        q < qb
    }

    /// Moves the bitline from `from` (state `x`) to `to` in small steps,
    /// following the state reached.
    pub(crate) fn walk(&mut self, x: &[f64], from: f64, to: f64) -> Result<Vec<f64>> {
        let steps = ((from - to).abs() / WALK_STEP).ceil().max(1.0) as usize;
        let mut x = x.to_vec();
        for k in 1..=steps {
            let bl = if k == steps { to } else { from + (to - from) * k as f64 / steps as f64 };
            self.circuit.set_source(BL_SOURCE, Stimulus::Dc(bl))?;
            x = self
                .circuit
                .solve_dc(Some(&x))
                .map_err(|e| e.annotate(format!("bitline at {bl} V")))?
                .x;
        }
        Ok(x)
    }
}

/// Write margin with the wordline at `vdd`.
pub fn write_margin(cell: &Netlist, params: &TechnologyParams, vdd: f64) -> Result<f64> {
    write_margin_with_wordline(cell, params, vdd, vdd)
}

/// Starting from Q = 1 with BLB at VDD, lowers BL until the cell flips and
/// returns the highest flipping bitline voltage, bisected to 1 mV.
pub fn write_margin_with_wordline(cell: &Netlist, params: &TechnologyParams, vdd: f64, wordline: f64) -> Result<f64> {
    let mut bench = WriteBench::new(cell, params, vdd, wordline)?;
    let start = bench.initial()?;
    if bench.flipped(&start) {
        return Err(Error::Measurement("cell does not hold Q = 1 with both bitlines at VDD".into()));
    }
    let bottom = bench.walk(&start, vdd, 0.0)?;
    if !bench.flipped(&bottom) {
        return Err(Error::NotWritable(format!(
            "Q stays high with BL at 0 V and wordline at {wordline} V"
        )));
    }
    // hi holds, lo flips; the state at hi is cached for continuation
    let (mut hi, mut lo) = (vdd, 0.0);
    let mut at_hi = start;
    while hi - lo > RESOLUTION {
        let mid = 0.5 * (hi + lo);
        let x = bench.walk(&at_hi, hi, mid)?;
        if bench.flipped(&x) {
            lo = mid;
        } else {
            hi = mid;
            at_hi = x;
        }
    }
    Ok(lo)
}
