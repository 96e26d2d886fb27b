// SPDX-License-Identifier: Apache-2.0

//! Closed-form figures of merit: switching power, delays, device ratios and
//! layout area.

use crate::engine::Waveform;
use crate::error::{Error, Result};
use crate::genlib::CellGeometry;

/// `C_L · V_dd² · f_sw`.
pub fn dynamic_power(c_load: f64, vdd: f64, f_sw: f64) -> f64 {
    c_load * vdd * vdd * f_sw
}

/// `C_B · ΔV / I_cell`: time for the cell current to develop `ΔV` on the
/// bitline.
pub fn bitline_delay(c_bitline: f64, dv: f64, i_cell: f64) -> Result<f64> {
    if !(i_cell > 0.0) {
        return Err(Error::Domain(format!("cell current must be positive, got {i_cell:e}")));
    }
    Ok(c_bitline * dv / i_cell)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayMeasurement {
    pub t_plh: f64,
    pub t_phl: f64,
    /// Mean of the two edges.
    pub t_p: f64,
    /// Crossing levels on the input and output.
    pub v_in: f64,
    pub v_out: f64,
}

impl DelayMeasurement {
    /// From already measured edges; thresholds are left at zero.
    pub fn from_edges(t_plh: f64, t_phl: f64) -> Self {
        DelayMeasurement {
            t_plh,
            t_phl,
            t_p: (t_plh + t_phl) / 2.0,
            v_in: 0.0,
            v_out: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    Rising,
    Falling,
}

/// Interpolated times at which `v` crosses `level`.
fn crossings(times: &[f64], v: &[f64], level: f64) -> Vec<(f64, Edge)> {
    let mut out = Vec::new();
    for k in 1..v.len() {
        let (a, b) = (v[k - 1] - level, v[k] - level);
        let edge = if a < 0.0 && b >= 0.0 {
            Edge::Rising
        } else if a > 0.0 && b <= 0.0 {
            Edge::Falling
        } else {
            continue;
        };
        let t = times[k - 1] + (times[k] - times[k - 1]) * a / (a - b);
        out.push((t, edge));
    }
    out
}

/// Output edge of the given direction and the input edge preceding it.
fn first_delay(input: &[(f64, Edge)], output: &[(f64, Edge)], edge: Edge) -> Option<f64> {
    output.iter().filter(|o| o.1 == edge).find_map(|&(t_out, _)| {
        input
            .iter()
            .rev()
            .find(|&&(t_in, _)| t_in <= t_out)
            .map(|&(t_in, _)| t_out - t_in)
    })
}

/// Fraction of the swing at which delays are measured.
pub const DELAY_THRESHOLD: f64 = 0.5;

/// Input-to-output delays at 50 % of `[v_low, v_high]` on both signals.
/// Each delay pairs the first rising (falling) output crossing with the
/// latest input crossing before it.
pub fn propagation_delay(w: &Waveform, input: &str, output: &str, v_low: f64, v_high: f64) -> Result<DelayMeasurement> {
    let level = v_low + DELAY_THRESHOLD * (v_high - v_low);
    let series = |name: &str| {
        w.node(name)
            .ok_or_else(|| Error::Measurement(format!("no node {name} in the waveform")))
    };
    let xin = crossings(&w.times, series(input)?, level);
    let xout = crossings(&w.times, series(output)?, level);
    let missing = |what: &str| Error::Measurement(format!("{output} has no {what} transition after an edge on {input}"));
    let t_plh = first_delay(&xin, &xout, Edge::Rising).ok_or_else(|| missing("rising"))?;
    let t_phl = first_delay(&xin, &xout, Edge::Falling).ok_or_else(|| missing("falling"))?;
    Ok(DelayMeasurement {
        v_in: level,
        v_out: level,
        ..DelayMeasurement::from_edges(t_plh, t_phl)
    })
}

/// First rise and fall times of `node` between the `lo` and `hi` fractions
/// of the swing (0.1 and 0.9 for the usual 10–90 % measurement).
pub fn transition_times(w: &Waveform, node: &str, v_low: f64, v_high: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let v = w
        .node(node)
        .ok_or_else(|| Error::Measurement(format!("no node {node} in the waveform")))?;
    let at = |f: f64| crossings(&w.times, v, v_low + f * (v_high - v_low));
    let (low, high) = (at(lo), at(hi));
    let span = |start: &[(f64, Edge)], end: &[(f64, Edge)], edge: Edge| {
        start.iter().filter(|s| s.1 == edge).find_map(|&(t0, _)| {
            end.iter().find(|e| e.1 == edge && e.0 >= t0).map(|&(t1, _)| t1 - t0)
        })
    };
    let rise = span(&low, &high, Edge::Rising).ok_or_else(|| Error::Measurement(format!("{node} has no complete rising edge")))?;
    let fall = span(&high, &low, Edge::Falling).ok_or_else(|| Error::Measurement(format!("{node} has no complete falling edge")))?;
    Ok((rise, fall))
}

/// Tolerance for "both sides equal".
pub const RATIO_TOLERANCE: f64 = 1e-9;

/// Cell and pull-up ratios per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub cr_left: f64,
    pub cr_right: f64,
    pub pr_left: f64,
    pub pr_right: f64,
    /// Both cell ratios above one and equal.
    pub read_stable: bool,
    /// Both pull-up ratios below one and equal.
    pub write_stable: bool,
}

/// `(W, L)` of one device on each side of the cell.
pub type SidePair = [(f64, f64); 2];

/// `CR = (W/L)_PD / (W/L)_PG` and `PR = (W/L)_PU / (W/L)_PG` for each side.
pub fn check_ratios(pd: SidePair, pu: SidePair, pg: SidePair) -> Result<RatioReport> {
    for (w, l) in pd.iter().chain(&pu).chain(&pg) {
        if !(*w > 0.0 && *l > 0.0) {
            return Err(Error::Domain(format!("device geometry must be positive, got W={w} L={l}")));
        }
    }
    let aspect = |(w, l): (f64, f64)| w / l;
    let cr = [aspect(pd[0]) / aspect(pg[0]), aspect(pd[1]) / aspect(pg[1])];
    let pr = [aspect(pu[0]) / aspect(pg[0]), aspect(pu[1]) / aspect(pg[1])];
    let equal = |v: [f64; 2]| (v[0] - v[1]).abs() <= RATIO_TOLERANCE;
    Ok(RatioReport {
        cr_left: cr[0],
        cr_right: cr[1],
        pr_left: pr[0],
        pr_right: pr[1],
        read_stable: cr.iter().all(|&c| c > 1.0) && equal(cr),
        write_stable: pr.iter().all(|&p| p < 1.0) && equal(pr),
    })
}

/// Ratios of a symmetric cell.
pub fn cell_ratios(g: &CellGeometry) -> Result<RatioReport> {
    check_ratios([g.pd; 2], [g.pu; 2], [g.pg; 2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaReport {
    pub areas: Vec<f64>,
    pub total: f64,
}

/// Areas of `(width, height)` rectangles and their sum, in λ².
pub fn area_report(rects: &[(f64, f64)]) -> Result<AreaReport> {
    if let Some((w, h)) = rects.iter().find(|(w, h)| !(*w >= 0.0 && *h >= 0.0)) {
        return Err(Error::Domain(format!("rectangle sides must be non-negative, got {w} x {h}")));
    }
    let areas: Vec<f64> = rects.iter().map(|(w, h)| w * h).collect();
    Ok(AreaReport {
        total: areas.iter().sum(),
        areas,
    })
}
