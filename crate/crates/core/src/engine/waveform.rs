// SPDX-License-Identifier: Apache-2.0

//! Sampled results and their CSV form.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered (input, output) samples of one node against a swept source.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransferCurve {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl TransferCurve {
    pub fn new(input: Vec<f64>, output: Vec<f64>) -> Self {
        assert_eq!(input.len(), output.len(), "transfer curve columns differ in length");
        TransferCurve { input, output }
    }

    pub fn len(&self) -> usize {
        self.input.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input.is_empty()
    }

    /// Linear interpolation in the input, clamped at the ends.
    /// Inputs may run in either direction.
    pub fn at(&self, x: f64) -> f64 {
        interpolate(&self.input, &self.output, x)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.input.iter().copied().zip(self.output.iter().copied())
    }
}

pub(crate) fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 1 {
        return ys[0];
    }
    let ascending = xs[n - 1] >= xs[0];
    let key = |v: f64| if ascending { v } else { -v };
    let k = xs.partition_point(|&v| key(v) <= key(x));
    if k == 0 {
        return ys[0];
    }
    if k == n {
        return ys[n - 1];
    }
    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

pub(crate) fn write_csv(header: Vec<String>, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Every node voltage at every point of a DC sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DcSweep {
    pub source: String,
    pub inputs: Vec<f64>,
    node_names: Arc<Vec<String>>,
    /// One MNA solution vector per input value.
    points: Vec<Vec<f64>>,
}

impl DcSweep {
    pub(crate) fn new(source: &str, inputs: Vec<f64>, node_names: Arc<Vec<String>>, points: Vec<Vec<f64>>) -> Self {
        DcSweep {
            source: source.to_string(),
            inputs,
            node_names,
            points,
        }
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn curve(&self, node: &str) -> Option<TransferCurve> {
        let i = self.node_names.iter().position(|n| n == node)?;
        Some(TransferCurve::new(self.inputs.clone(), self.points.iter().map(|x| x[i]).collect()))
    }

    /// Solution vector at each point, for seeding follow-up solves.
    pub fn solution(&self, k: usize) -> &[f64] {
        &self.points[k]
    }

    /// First column the swept value, then the requested nodes (all when empty).
    pub fn to_csv(&self, probes: &[String]) -> Result<String> {
        let probes = resolve(&self.node_names, probes)?;
        let mut header = vec![self.source.clone()];
        header.extend(probes.iter().map(|&i| self.node_names[i].clone()));
        Ok(write_csv(
            header,
            self.inputs.iter().zip(&self.points).map(|(v, x)| {
                let mut row = vec![*v];
                row.extend(probes.iter().map(|&i| x[i]));
                row
            }),
        ))
    }
}

fn resolve(names: &[String], probes: &[String]) -> Result<Vec<usize>> {
    if probes.is_empty() {
        return Ok((0..names.len()).collect());
    }
    probes
        .iter()
        .map(|p| {
            names
                .iter()
                .position(|n| n == p)
                .ok_or_else(|| Error::Configuration(format!("no node named {p}")))
        })
        .collect()
}

/// Transient result: node voltages and source currents against time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Waveform {
    pub times: Vec<f64>,
    pub node_names: Vec<String>,
    /// `voltages[k]` is the series for `node_names[k]`.
    pub voltages: Vec<Vec<f64>>,
    pub source_names: Vec<String>,
    pub source_currents: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl Waveform {
    pub fn node(&self, name: &str) -> Option<&[f64]> {
        if name == crate::netlist::GROUND {
            return None;
        }
        self.node_names
            .iter()
            .position(|n| n == name)
            .map(|k| self.voltages[k].as_slice())
    }

    pub fn source_current(&self, id: &str) -> Option<&[f64]> {
        self.source_names
            .iter()
            .position(|n| n.eq_ignore_ascii_case(id))
            .map(|k| self.source_currents[k].as_slice())
    }

    /// Node value at time `t` by linear interpolation.
    pub fn sample(&self, name: &str, t: f64) -> Option<f64> {
        self.node(name).map(|v| interpolate(&self.times, v, t))
    }

    /// Waveform with times shifted by `dt` (used for invariance checks).
    pub fn shifted(&self, dt: f64) -> Waveform {
        Waveform {
            times: self.times.iter().map(|t| t + dt).collect(),
            ..self.clone()
        }
    }

    /// First column time, then the requested nodes (all when empty).
    pub fn to_csv(&self, probes: &[String]) -> Result<String> {
        let probes = resolve(&self.node_names, probes)?;
        let mut header = vec!["time".to_string()];
        header.extend(probes.iter().map(|&i| self.node_names[i].clone()));
        Ok(write_csv(
            header,
            self.times.iter().enumerate().map(|(k, t)| {
                let mut row = vec![*t];
                row.extend(probes.iter().map(|&i| self.voltages[i][k]));
                row
            }),
        ))
    }
}
