// SPDX-License-Identifier: Apache-2.0

//! Modified nodal analysis.
//!
//! Unknowns are the non-ground node voltages followed by one branch current
//! per voltage source. The residual is KCL with current leaving a node
//! counted positive, plus `v+ − v− − V` for each voltage source. Newton
//! steps are solved with a dense LU factorisation.

mod transient;
mod waveform;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

pub use transient::{transient, Integrator, TransientOptions};
pub use waveform::{DcSweep, TransferCurve, Waveform};
pub(crate) use waveform::{interpolate, write_csv};

use crate::devices::{terminal_current, MosModel, TechnologyParams};
use crate::error::{Error, Result};
use crate::netlist::{Element, Netlist, Node, Polarity, SourceElement, Stimulus};

/// Newton tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// KCL residual bound, A.
    pub abstol: f64,
    pub reltol: f64,
    /// Absolute voltage step bound, V.
    pub vntol: f64,
    pub max_iterations: usize,
    /// Largest per-node voltage change in one Newton step.
    pub max_step: f64,
    /// Upper bound on continuation steps when source stepping.
    pub source_steps: usize,
    /// Conductance from every node to ground. Zero by default because
    /// retention analysis works with sub-femtoamp currents.
    pub gmin: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            abstol: 1e-9,
            reltol: 1e-3,
            vntol: 1e-6,
            max_iterations: 150,
            max_step: 0.3,
            source_steps: 100,
            gmin: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
enum Stamp {
    Mos {
        id: String,
        nodes: [Option<usize>; 4],
        polarity: Polarity,
        w: f64,
        l: f64,
        vth_shift: f64,
    },
    Resistor {
        a: Option<usize>,
        b: Option<usize>,
        g: f64,
    },
    Capacitor {
        a: Option<usize>,
        b: Option<usize>,
        c: f64,
    },
    Vsource {
        id: String,
        p: Option<usize>,
        n: Option<usize>,
        stimulus: Stimulus,
        branch: usize,
    },
    Isource {
        id: String,
        p: Option<usize>,
        n: Option<usize>,
        stimulus: Stimulus,
    },
}

/// Per-capacitor companion model for one time step: `i = geq·v − hist`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Companion {
    pub geq: f64,
    pub hist: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EvalContext<'a> {
    pub time: f64,
    /// Multiplier on every independent source (source stepping).
    pub scale: f64,
    /// `None` in DC: capacitors are open.
    pub companions: Option<&'a [Companion]>,
    /// Conductance from every node to its value in a reference state
    /// (pseudo-transient continuation).
    pub anchor: Option<(f64, &'a [f64])>,
}

impl EvalContext<'_> {
    pub(crate) fn dc() -> Self {
        EvalContext {
            time: 0.0,
            scale: 1.0,
            companions: None,
            anchor: None,
        }
    }
}

/// A netlist compiled into MNA form. Degenerate elements are dropped.
#[derive(Debug, Clone)]
pub struct Circuit {
    nodes: Arc<Vec<String>>,
    index: HashMap<String, usize>,
    stamps: Vec<Stamp>,
    branches: Vec<String>,
    params: TechnologyParams,
    pub options: SolverOptions,
}

/// A converged operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct DcSolution {
    node_names: Arc<Vec<String>>,
    branch_names: Vec<String>,
    /// Node voltages followed by voltage-source branch currents.
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Largest KCL residual at the solution, A.
    pub max_residual: f64,
}

impl DcSolution {
    /// Voltage at a node; ground reads 0.
    pub fn voltage(&self, node: &str) -> Option<f64> {
        if node == crate::netlist::GROUND {
            return Some(0.0);
        }
        self.node_names.iter().position(|n| n == node).map(|i| self.x[i])
    }

    /// Current through a voltage source, flowing from its positive node
    /// through the source to its negative node.
    pub fn source_current(&self, id: &str) -> Option<f64> {
        let n = self.node_names.len();
        self.branch_names
            .iter()
            .position(|b| b.eq_ignore_ascii_case(id))
            .map(|k| self.x[n + k])
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn voltages(&self) -> BTreeMap<String, f64> {
        self.node_names.iter().cloned().zip(self.x.iter().copied()).collect()
    }

    /// One row: every node voltage, then every source current.
    pub fn to_csv(&self) -> String {
        let header = self
            .node_names
            .iter()
            .cloned()
            .chain(self.branch_names.iter().map(|b| format!("i({b})")))
            .collect();
        write_csv(header, std::iter::once(self.x.clone()))
    }
}

fn node_index(index: &HashMap<String, usize>, node: &Node) -> Option<usize> {
    match node {
        Node::Named(name) => index.get(name).copied(),
        Node::Placeholder => None,
    }
}

impl Circuit {
    pub fn new(netlist: &Netlist, params: &TechnologyParams) -> Result<Self> {
        let live: Vec<&Element> = netlist.elements().filter(|e| !e.is_degenerate()).collect();
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        for e in &live {
            for n in e.nodes() {
                if let Node::Named(name) = n {
                    if !n.is_ground() && !index.contains_key(name) {
                        index.insert(name.clone(), nodes.len());
                        nodes.push(name.clone());
                    }
                }
            }
        }
        if nodes.is_empty() {
            return Err(Error::Configuration("netlist has no non-ground nodes to simulate".into()));
        }
        let mut stamps = Vec::with_capacity(live.len());
        let mut branches = Vec::new();
        for e in live {
            let idx = |n: &Node| node_index(&index, n);
            stamps.push(match e {
                Element::Mos(m) => Stamp::Mos {
                    id: m.id.clone(),
                    nodes: [idx(&m.drain), idx(&m.gate), idx(&m.source), idx(&m.bulk)],
                    polarity: m.polarity,
                    w: m.w,
                    l: m.l,
                    vth_shift: 0.0,
                },
                Element::Resistor(r) => {
                    if r.value <= 0.0 {
                        return Err(Error::Semantic(format!("{}: resistance must be positive", r.id)));
                    }
                    Stamp::Resistor {
                        a: idx(&r.a),
                        b: idx(&r.b),
                        g: 1.0 / r.value,
                    }
                }
                Element::Capacitor(c) => Stamp::Capacitor {
                    a: idx(&c.a),
                    b: idx(&c.b),
                    c: c.value,
                },
                Element::Vsource(s) => {
                    branches.push(s.id.clone());
                    Stamp::Vsource {
                        id: s.id.clone(),
                        p: idx(&s.pos),
                        n: idx(&s.neg),
                        stimulus: s.stimulus.clone(),
                        branch: nodes.len() + branches.len() - 1,
                    }
                }
                Element::Isource(s) => Stamp::Isource {
                    id: s.id.clone(),
                    p: idx(&s.pos),
                    n: idx(&s.neg),
                    stimulus: s.stimulus.clone(),
                },
            });
        }
        Ok(Circuit {
            nodes: Arc::new(nodes),
            index,
            stamps,
            branches,
            params: params.clone(),
            options: SolverOptions::default(),
        })
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn source_names(&self) -> &[String] {
        &self.branches
    }

    /// Number of MNA unknowns.
    pub fn size(&self) -> usize {
        self.nodes.len() + self.branches.len()
    }

    pub fn params(&self) -> &TechnologyParams {
        &self.params
    }

    /// Replaces the waveform of a voltage or current source.
    pub fn set_source(&mut self, id: &str, value: Stimulus) -> Result<()> {
        for s in &mut self.stamps {
            match s {
                Stamp::Vsource { id: sid, stimulus, .. } | Stamp::Isource { id: sid, stimulus, .. }
                    if sid.eq_ignore_ascii_case(id) =>
                {
                    *stimulus = value;
                    return Ok(());
                }
                _ => {}
            }
        }
        Err(Error::Configuration(format!("no source named {id}")))
    }

    /// Adds `dv` to the threshold of one transistor (mismatch studies).
    pub fn set_vth_shift(&mut self, id: &str, dv: f64) -> Result<()> {
        for s in &mut self.stamps {
            if let Stamp::Mos { id: mid, vth_shift, .. } = s {
                if mid.eq_ignore_ascii_case(id) {
                    *vth_shift = dv;
                    return Ok(());
                }
            }
        }
        Err(Error::Configuration(format!("no transistor named {id}")))
    }

    pub(crate) fn capacitors(&self) -> Vec<(Option<usize>, Option<usize>, f64)> {
        self.stamps
            .iter()
            .filter_map(|s| match *s {
                Stamp::Capacitor { a, b, c } => Some((a, b, c)),
                _ => None,
            })
            .collect()
    }

    pub(crate) fn stimuli(&self) -> impl Iterator<Item = (&str, &Stimulus)> {
        self.stamps.iter().filter_map(|s| match s {
            Stamp::Vsource { id, stimulus, .. } | Stamp::Isource { id, stimulus, .. } => Some((id.as_str(), stimulus)),
            _ => None,
        })
    }

    /// DC residual at `x` (capacitors open, sources at t = 0).
    pub fn residual(&self, x: &[f64]) -> DVector<f64> {
        self.assemble(x, &EvalContext::dc()).0
    }

    /// DC Jacobian of [`Circuit::residual`].
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        self.assemble(x, &EvalContext::dc()).1
    }

    pub(crate) fn assemble(&self, x: &[f64], ctx: &EvalContext) -> (DVector<f64>, DMatrix<f64>) {
        let size = self.size();
        let mut f = DVector::zeros(size);
        let mut j = DMatrix::zeros(size, size);
        let v = |n: Option<usize>| n.map_or(0.0, |i| x[i]);
        let vt = self.params.thermal().v_t;
        let model: MosModel = self.params.model;

        // conductance between a and b carrying current i = g·(va − vb) − i0
        let two_terminal = |f: &mut DVector<f64>, j: &mut DMatrix<f64>, a: Option<usize>, b: Option<usize>, g: f64, i: f64| {
            if let Some(a) = a {
                f[a] += i;
                j[(a, a)] += g;
                if let Some(b) = b {
                    j[(a, b)] -= g;
                }
            }
            if let Some(b) = b {
                f[b] -= i;
                j[(b, b)] += g;
                if let Some(a) = a {
                    j[(b, a)] -= g;
                }
            }
        };

        let mut cap_index = 0;
        for s in &self.stamps {
            match s {
                Stamp::Mos {
                    nodes,
                    polarity,
                    w,
                    l,
                    vth_shift,
                    ..
                } => {
                    let p = self.params.device(*polarity);
                    let volts = nodes.map(v);
                    let id = terminal_current(p, model, vt, *polarity, *w, *l, volts, *vth_shift);
                    if let Some(d) = nodes[0] {
                        f[d] += id.re;
                        for (k, t) in nodes.iter().enumerate() {
                            if let Some(t) = t {
                                j[(d, *t)] += id.eps[k];
                            }
                        }
                    }
                    if let Some(src) = nodes[2] {
                        f[src] -= id.re;
                        for (k, t) in nodes.iter().enumerate() {
                            if let Some(t) = t {
                                j[(src, *t)] -= id.eps[k];
                            }
                        }
                    }
                }
                Stamp::Resistor { a, b, g } => {
                    let i = g * (v(*a) - v(*b));
                    two_terminal(&mut f, &mut j, *a, *b, *g, i);
                }
                Stamp::Capacitor { a, b, .. } => {
                    if let Some(comp) = ctx.companions {
                        let c = comp[cap_index];
                        let i = c.geq * (v(*a) - v(*b)) - c.hist;
                        two_terminal(&mut f, &mut j, *a, *b, c.geq, i);
                    }
                    cap_index += 1;
                }
                Stamp::Vsource {
                    p, n, stimulus, branch, ..
                } => {
                    let current = x[*branch];
                    if let Some(p) = p {
                        f[*p] += current;
                        j[(*p, *branch)] += 1.0;
                        j[(*branch, *p)] += 1.0;
                    }
                    if let Some(n) = n {
                        f[*n] -= current;
                        j[(*n, *branch)] -= 1.0;
                        j[(*branch, *n)] -= 1.0;
                    }
                    f[*branch] += v(*p) - v(*n) - ctx.scale * stimulus.value_at(ctx.time);
                }
                Stamp::Isource { p, n, stimulus, .. } => {
                    let i = ctx.scale * stimulus.value_at(ctx.time);
                    if let Some(p) = p {
                        f[*p] += i;
                    }
                    if let Some(n) = n {
                        f[*n] -= i;
                    }
                }
            }
        }
        if self.options.gmin > 0.0 {
            for i in 0..self.nodes.len() {
                f[i] += self.options.gmin * x[i];
                j[(i, i)] += self.options.gmin;
            }
        }
        if let Some((g, x_ref)) = ctx.anchor {
            for i in 0..self.nodes.len() {
                f[i] += g * (x[i] - x_ref[i]);
                j[(i, i)] += g;
            }
        }
        (f, j)
    }

    fn unknown_name(&self, i: usize) -> String {
        match self.nodes.get(i) {
            Some(n) => n.clone(),
            None => format!("branch of {}", self.branches[i - self.nodes.len()]),
        }
    }

    fn singular_error(&self, j: &DMatrix<f64>) -> Error {
        // a row of zeros is a node nothing conducts into
        let row = (0..j.nrows()).find(|&r| j.row(r).iter().all(|&a| a == 0.0));
        let col = (0..j.ncols()).find(|&c| j.column(c).iter().all(|&a| a == 0.0));
        let i = row.or(col).unwrap_or_else(|| {
            let u = j.clone().lu().u();
            (0..u.nrows())
                .min_by(|&a, &b| u[(a, a)].abs().total_cmp(&u[(b, b)].abs()))
                .unwrap_or(0)
        });
        Error::Singular {
            node: self.unknown_name(i),
        }
    }

    fn worst_node(&self, f: &DVector<f64>) -> (String, f64) {
        let n = self.nodes.len();
        let (i, r) = f
            .iter()
            .take(n)
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, r)| (i, r.abs()))
            .unwrap_or((0, 0.0));
        (self.unknown_name(i), r)
    }

    /// Plain damped Newton from `x0`.
    pub(crate) fn newton(&self, x0: &[f64], ctx: &EvalContext) -> Result<DcSolution> {
        let o = &self.options;
        let n = self.nodes.len();
        let mut x = DVector::from_column_slice(x0);
        let (mut f, mut j) = self.assemble(x.as_slice(), ctx);
        for it in 1..=o.max_iterations {
            let lu = j.clone().lu();
            let mut dx = match lu.solve(&-&f) {
                Some(dx) if dx.iter().all(|d| d.is_finite()) => dx,
                _ => return Err(self.singular_error(&j)),
            };
            for d in dx.iter_mut().take(n) {
                *d = d.clamp(-o.max_step, o.max_step);
            }
            x += &dx;
            (f, j) = self.assemble(x.as_slice(), ctx);
            let kcl = f.iter().take(n).fold(0.0f64, |m, r| m.max(r.abs()));
            let branch_ok = f.iter().skip(n).all(|r| r.abs() < o.vntol);
            let step_ok = dx.iter().zip(x.iter()).enumerate().all(|(i, (d, v))| {
                let floor = if i < n { o.vntol } else { o.abstol };
                d.abs() <= o.reltol * v.abs() + floor
            });
            if kcl < o.abstol && branch_ok && step_ok {
                return Ok(DcSolution {
                    node_names: Arc::clone(&self.nodes),
                    branch_names: self.branches.clone(),
                    x: x.as_slice().to_vec(),
                    iterations: it,
                    max_residual: kcl,
                });
            }
        }
        let (node, residual) = self.worst_node(&f);
        Err(Error::Convergence {
            iterations: o.max_iterations,
            node,
            residual,
        })
    }

    /// Relaxes from `x0` as if every node had a capacitor to ground, taking
    /// ever longer steps until the anchor no longer matters. Follows the
    /// circuit's own dynamics, so a state that has ceased to exist decays
    /// into the one the circuit would actually reach.
    fn pseudo_transient(&self, x0: &[f64], ctx: &EvalContext) -> Result<DcSolution> {
        const G_START: f64 = 1e-3;
        const G_END: f64 = 1e-12;
        const G_GIVE_UP: f64 = 1e3;
        let mut x = x0.to_vec();
        let mut g = G_START;
        let mut iterations = 0;
        for _ in 0..self.options.source_steps * 4 {
            let c = EvalContext {
                anchor: Some((g, &x)),
                ..*ctx
            };
            match self.newton(&x, &c) {
                Ok(s) => {
                    iterations += s.iterations;
                    x = s.x;
                    if g < G_END {
                        let s = self.newton(&x, ctx)?;
                        return Ok(DcSolution {
                            iterations: iterations + s.iterations,
                            ..s
                        });
                    }
                    g /= if s.iterations <= 5 { 4.0 } else { 2.0 };
                }
                Err(e @ Error::Singular { .. }) => return Err(e),
                Err(e) => {
                    g *= 8.0;
                    if g > G_GIVE_UP {
                        return Err(e);
                    }
                }
            }
        }
        self.newton(&x, ctx)
    }

    /// Newton, then pseudo-transient relaxation from the guess, then source
    /// stepping from zero.
    pub(crate) fn solve_with(&self, guess: Option<&[f64]>, ctx: &EvalContext) -> Result<DcSolution> {
        let zeros = vec![0.0; self.size()];
        let x0 = guess.unwrap_or(&zeros);
        let first = match self.newton(x0, ctx) {
            Ok(s) => return Ok(s),
            Err(e @ Error::Singular { .. }) => return Err(e),
            Err(e) => e,
        };
        if let Ok(s) = self.pseudo_transient(x0, ctx) {
            return Ok(s);
        }
        let mut x = zeros.clone();
        let mut scale = 0.0f64;
        let mut step = 0.1f64;
        let mut iterations = 0;
        for _ in 0..self.options.source_steps {
            let target = (scale + step).min(1.0);
            let c = EvalContext { scale: target, ..*ctx };
            match self.newton(&x, &c) {
                Ok(s) => {
                    iterations += s.iterations;
                    x = s.x.clone();
                    scale = target;
                    if scale >= 1.0 {
                        return Ok(DcSolution { iterations, ..s });
                    }
                    step = (step * 1.5).min(0.25);
                }
                Err(e @ Error::Singular { .. }) => return Err(e),
                Err(_) => {
                    step /= 4.0;
                    if step < 1e-4 {
                        break;
                    }
                }
            }
        }
        Err(first)
    }

    /// Operating point from an optional starting vector (length [`Circuit::size`]).
    pub fn solve_dc(&self, guess: Option<&[f64]>) -> Result<DcSolution> {
        self.solve_with(guess, &EvalContext::dc())
    }

    /// Starting vector from named node voltages; unnamed unknowns start at 0.
    pub fn guess_from(&self, voltages: &BTreeMap<String, f64>) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for (name, v) in voltages {
            if let Some(i) = self.node_index(name) {
                x[i] = *v;
            }
        }
        x
    }

    /// Sweeps a source from `from` to `to` in increments of `step`, using
    /// each solution as the next starting point. The last point is `to`.
    pub fn sweep(&mut self, source: &str, from: f64, to: f64, step: f64, guess: Option<&[f64]>) -> Result<DcSweep> {
        if !(step > 0.0) {
            return Err(Error::Domain(format!("sweep step must be positive, got {step}")));
        }
        let original = self
            .stimuli()
            .find(|(id, _)| id.eq_ignore_ascii_case(source))
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::Configuration(format!("no source named {source}")))?;
        let count = ((to - from).abs() / step - 1e-9).ceil().max(0.0) as usize;
        let dir = if to >= from { 1.0 } else { -1.0 };
        let mut inputs = Vec::with_capacity(count + 1);
        let mut points = Vec::with_capacity(count + 1);
        let mut x: Option<Vec<f64>> = guess.map(<[f64]>::to_vec);
        let mut result = Ok(());
        for k in 0..=count {
            let value = if k == count { to } else { from + dir * step * k as f64 };
            self.set_source(source, Stimulus::Dc(value))?;
            match self.solve_dc(x.as_deref()) {
                Ok(s) => {
                    x = Some(s.x.clone());
                    inputs.push(value);
                    points.push(s.x);
                }
                Err(e) => {
                    result = Err(e.annotate(format!("{source} = {value}")));
                    break;
                }
            }
        }
        self.set_source(source, original)?;
        result?;
        Ok(DcSweep::new(source, inputs, Arc::clone(&self.nodes), points))
    }
}

/// Operating point of a netlist. `guess` seeds Newton per node name, which
/// selects the state of a bistable circuit.
pub fn solve_dc(netlist: &Netlist, params: &TechnologyParams, guess: Option<&BTreeMap<String, f64>>) -> Result<DcSolution> {
    let c = Circuit::new(netlist, params)?;
    let x0 = guess.map(|g| c.guess_from(g));
    c.solve_dc(x0.as_deref())
}

/// DC transfer sweep of one source.
pub fn dc_sweep(netlist: &Netlist, params: &TechnologyParams, source: &str, from: f64, to: f64, step: f64) -> Result<DcSweep> {
    Circuit::new(netlist, params)?.sweep(source, from, to, step, None)
}

/// Adds a DC voltage source pinning `node` to `value` (initial conditions,
/// testbenches).
pub(crate) fn pin(netlist: &mut Netlist, id: &str, node: &str, value: f64) {
    netlist.push(Element::Vsource(SourceElement::dc(id, node, crate::netlist::GROUND, value)));
}
