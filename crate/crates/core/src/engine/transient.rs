// SPDX-License-Identifier: Apache-2.0

//! Fixed-step transient analysis with capacitor companion models.

use super::{pin, Circuit, Companion, EvalContext, Waveform};
use crate::devices::TechnologyParams;
use crate::error::{Error, Result};
use crate::netlist::{Netlist, Stimulus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    BackwardEuler,
    Trapezoidal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransientOptions {
    pub t_stop: f64,
    pub dt: f64,
    pub method: Integrator,
    /// Node voltages forced at t = 0. Other nodes come from the DC solve.
    pub initial_conditions: Vec<(String, f64)>,
}

impl TransientOptions {
    pub fn new(t_stop: f64, dt: f64) -> Self {
        TransientOptions {
            t_stop,
            dt,
            method: Integrator::BackwardEuler,
            initial_conditions: Vec::new(),
        }
    }
}

/// Integrates from t = 0 to `t_stop`. The starting point is the DC solution
/// at t = 0 with any initial conditions held by temporary sources.
pub fn transient(netlist: &Netlist, params: &TechnologyParams, opts: &TransientOptions) -> Result<Waveform> {
    if !(opts.t_stop > 0.0) || !(opts.dt > 0.0) {
        return Err(Error::Domain(format!(
            "t_stop and dt must be positive, got {} and {}",
            opts.t_stop, opts.dt
        )));
    }
    let circuit = Circuit::new(netlist, params)?;
    let mut warnings = Vec::new();
    for (id, s) in circuit.stimuli() {
        if let Stimulus::Pulse(p) = s {
            if opts.dt >= p.rise || opts.dt >= p.fall {
                warnings.push(format!(
                    "dt = {:e} s is not below the rise/fall time of {id} ({:e}/{:e} s)",
                    opts.dt, p.rise, p.fall
                ));
            }
        }
    }

    let x0 = initial_state(netlist, params, &circuit, &opts.initial_conditions)?;

    let n = circuit.node_names().len();
    let caps = circuit.capacitors();
    let v = |x: &[f64], i: Option<usize>| i.map_or(0.0, |i| x[i]);
    let mut cap_current = vec![0.0; caps.len()];
    let mut wave = Waveform {
        node_names: circuit.node_names().to_vec(),
        voltages: vec![Vec::new(); n],
        source_names: circuit.source_names().to_vec(),
        source_currents: vec![Vec::new(); circuit.source_names().len()],
        warnings,
        ..Default::default()
    };
    let record = |wave: &mut Waveform, t: f64, x: &[f64]| {
        wave.times.push(t);
        for (k, series) in wave.voltages.iter_mut().enumerate() {
            series.push(x[k]);
        }
        for (k, series) in wave.source_currents.iter_mut().enumerate() {
            series.push(x[n + k]);
        }
    };
    record(&mut wave, 0.0, &x0);

    let steps = (opts.t_stop / opts.dt - 1e-9).ceil() as usize;
    let mut x = x0;
    let mut companions = vec![Companion { geq: 0.0, hist: 0.0 }; caps.len()];
    for k in 1..=steps {
        let t = (k as f64 * opts.dt).min(opts.t_stop);
        let h = t - (k - 1) as f64 * opts.dt;
        for (c, &(a, b, cap)) in caps.iter().enumerate() {
            let vc = v(&x, a) - v(&x, b);
            companions[c] = match opts.method {
                Integrator::BackwardEuler => Companion {
                    geq: cap / h,
                    hist: cap / h * vc,
                },
                Integrator::Trapezoidal => Companion {
                    geq: 2.0 * cap / h,
                    hist: 2.0 * cap / h * vc + cap_current[c],
                },
            };
        }
        let ctx = EvalContext {
            time: t,
            scale: 1.0,
            companions: Some(&companions),
            anchor: None,
        };
        let sol = circuit
            .newton(&x, &ctx)
            .map_err(|e| e.annotate(format!("t = {t:e} s")))?;
        x = sol.x;
        for (c, &(a, b, _)) in caps.iter().enumerate() {
            cap_current[c] = companions[c].geq * (v(&x, a) - v(&x, b)) - companions[c].hist;
        }
        record(&mut wave, t, &x);
    }
    Ok(wave)
}

fn initial_state(netlist: &Netlist, params: &TechnologyParams, circuit: &Circuit, ics: &[(String, f64)]) -> Result<Vec<f64>> {
    if ics.is_empty() {
        return circuit.solve_dc(None).map(|s| s.x).map_err(|e| e.annotate("initial operating point"));
    }
    let mut forced = netlist.clone();
    for (k, (node, value)) in ics.iter().enumerate() {
        if circuit.node_index(node).is_none() {
            return Err(Error::Configuration(format!("initial condition on unknown node {node}")));
        }
        pin(&mut forced, &format!("V__ic{k}"), node, *value);
    }
    let aux = Circuit::new(&forced, params)?;
    let guess: Vec<f64> = {
        let mut g = vec![0.0; aux.size()];
        for (node, value) in ics {
            g[aux.node_index(node).expect("checked above")] = *value;
        }
        g
    };
    let sol = aux.solve_dc(Some(&guess)).map_err(|e| e.annotate("initial conditions"))?;
    // same node order; the IC branches sit after the original branches
    let mut x = vec![0.0; circuit.size()];
    x.copy_from_slice(&sol.x[..circuit.size()]);
    Ok(x)
}
