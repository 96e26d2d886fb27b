// SPDX-License-Identifier: Apache-2.0

//! Python bindings: netlists, the simulator and the stability analyses.
//!
//! Input problems raise `ValueError`; analyses that run and fail raise
//! `SramlabError` or one of its subclasses.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sramlab_core::devices::{MosModel, TechnologyParams};
use sramlab_core::engine::{Integrator, TransientOptions};
use sramlab_core::genlib::{self, CellGeometry, PeripheryKind};
use sramlab_core::netlist::{self, Netlist};
use sramlab_core::stability::{self, Mode, VariationModel};
use sramlab_core::{config, engine, metrics, Error};

create_exception!(sramlab, SramlabError, PyRuntimeError);
create_exception!(sramlab, ConvergenceError, SramlabError);
create_exception!(sramlab, NotWritableError, SramlabError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.root() {
        Error::Domain(_) => PyValueError::new_err(msg),
        _ if e.is_input_error() => PyValueError::new_err(msg),
        Error::Convergence { .. } | Error::Singular { .. } => ConvergenceError::new_err(msg),
        Error::NotWritable(_) => NotWritableError::new_err(msg),
        _ => SramlabError::new_err(msg),
    }
}

fn mode(name: &str) -> PyResult<Mode> {
    match name {
        "hold" => Ok(Mode::Hold),
        "read" => Ok(Mode::Read),
        other => Err(PyValueError::new_err(format!("mode must be 'hold' or 'read', got {other:?}"))),
    }
}

/// A parsed or generated netlist.
#[pyclass(module = "sramlab", name = "Netlist", frozen)]
#[derive(Clone)]
struct PyNetlist(Netlist);

#[pymethods]
impl PyNetlist {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        netlist::parse_netlist(text).map(PyNetlist).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)?;
        Self::parse(&text)
    }

    #[getter]
    fn title(&self) -> String {
        self.0.title.clone()
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn element_count(&self) -> usize {
        self.0.element_count()
    }

    fn node_names(&self) -> Vec<String> {
        self.0.node_names()
    }

    fn element_ids(&self) -> Vec<String> {
        self.0.elements().map(|e| e.id().to_string()).collect()
    }

    fn count_warnings(&self) -> Vec<String> {
        self.0.count_warnings()
    }

    /// `(name, value, verdict)` per check; verdict is None, True or False.
    fn validate(&self) -> Vec<(String, f64, Option<bool>)> {
        netlist::validate(&self.0)
            .entries
            .into_iter()
            .map(|e| (e.name, e.value, e.verdict.map(|v| v == sramlab_core::report::Verdict::Pass)))
            .collect()
    }

    fn to_spice(&self) -> String {
        netlist::print_netlist(&self.0)
    }

    fn __str__(&self) -> String {
        self.to_spice()
    }

    fn __repr__(&self) -> String {
        format!("<Netlist {:?}: {} nodes, {} elements>", self.0.title, self.0.node_count(), self.0.element_count())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// Device parameters for both polarities.
#[pyclass(module = "sramlab", name = "Technology")]
#[derive(Clone)]
struct PyTechnology(TechnologyParams);

#[pymethods]
impl PyTechnology {
    #[new]
    fn new() -> Self {
        PyTechnology(TechnologyParams::default())
    }

    /// Parses `key = value` lines.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        config::parse_config(text).map(PyTechnology).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)?;
        Self::from_text(&text)
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.0.temperature
    }

    #[getter]
    fn thermal_voltage(&self) -> f64 {
        self.0.thermal().v_t
    }

    #[getter]
    fn model(&self) -> &'static str {
        match self.0.model {
            MosModel::Blended => "blended",
            MosModel::SubthresholdOnly => "subthreshold",
        }
    }

    #[setter]
    fn set_model(&mut self, name: &str) -> PyResult<()> {
        self.0.model = match name {
            "blended" => MosModel::Blended,
            "subthreshold" => MosModel::SubthresholdOnly,
            other => return Err(PyValueError::new_err(format!("unknown model {other:?}"))),
        };
        Ok(())
    }

    fn describe(&self) -> Vec<String> {
        self.0.describe()
    }
}

/// Transistor sizes of the 6T cell as `(W, L)` pairs in metres.
#[pyclass(module = "sramlab", name = "CellGeometry", get_all, set_all)]
#[derive(Clone)]
struct PyGeometry {
    pu: (f64, f64),
    pd: (f64, f64),
    pg: (f64, f64),
}

impl PyGeometry {
    fn core(&self) -> PyResult<CellGeometry> {
        let g = CellGeometry {
            pu: self.pu,
            pd: self.pd,
            pg: self.pg,
        };
        g.validate().map_err(to_py)?;
        Ok(g)
    }
}

#[pymethods]
impl PyGeometry {
    #[new]
    #[pyo3(signature = (pu=None, pd=None, pg=None))]
    fn new(pu: Option<(f64, f64)>, pd: Option<(f64, f64)>, pg: Option<(f64, f64)>) -> Self {
        let d = CellGeometry::default();
        PyGeometry {
            pu: pu.unwrap_or(d.pu),
            pd: pd.unwrap_or(d.pd),
            pg: pg.unwrap_or(d.pg),
        }
    }

    /// `{"cr_left", "cr_right", "pr_left", "pr_right", "read_stable", "write_stable"}`.
    fn ratios<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let r = metrics::cell_ratios(&self.core()?).map_err(to_py)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("cr_left", r.cr_left)?;
        d.set_item("cr_right", r.cr_right)?;
        d.set_item("pr_left", r.pr_left)?;
        d.set_item("pr_right", r.pr_right)?;
        d.set_item("read_stable", r.read_stable)?;
        d.set_item("write_stable", r.write_stable)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("CellGeometry(pu={:?}, pd={:?}, pg={:?})", self.pu, self.pd, self.pg)
    }
}

fn tech(t: Option<&PyTechnology>) -> TechnologyParams {
    t.map(|t| t.0.clone()).unwrap_or_default()
}

fn geometry(g: Option<&PyGeometry>) -> PyResult<CellGeometry> {
    g.map(PyGeometry::core).unwrap_or_else(|| Ok(CellGeometry::default()))
}

#[pyfunction]
#[pyo3(signature = (geometry=None, parasitics=false))]
fn build_cell(geometry: Option<&PyGeometry>, parasitics: bool) -> PyResult<PyNetlist> {
    let g = self::geometry(geometry)?;
    let caps = parasitics.then(genlib::extracted_parasitics);
    Ok(PyNetlist(genlib::build_6t_cell(&g, caps.as_ref())))
}

#[pyfunction]
#[pyo3(signature = (rows, cols, geometry=None))]
fn build_array(rows: usize, cols: usize, geometry: Option<&PyGeometry>) -> PyResult<PyNetlist> {
    let g = self::geometry(geometry)?;
    genlib::build_array(rows, cols, &g).map(PyNetlist).map_err(to_py)
}

/// `kind` is one of "sense-amp", "precharge", "write-driver", "decoder".
#[pyfunction]
#[pyo3(signature = (kind, geometry=None))]
fn build_periphery(kind: &str, geometry: Option<&PyGeometry>) -> PyResult<PyNetlist> {
    let kind: PeripheryKind = kind.parse().map_err(to_py)?;
    Ok(PyNetlist(genlib::build_periphery(kind, &self::geometry(geometry)?)))
}

/// Node voltages and source currents (`i(<id>)`) at the operating point.
#[pyfunction]
#[pyo3(signature = (netlist, technology=None))]
fn solve_dc(py: Python<'_>, netlist: &PyNetlist, technology: Option<&PyTechnology>) -> PyResult<BTreeMap<String, f64>> {
    let p = tech(technology);
    let s = py.detach(|| engine::solve_dc(&netlist.0, &p, None)).map_err(to_py)?;
    let mut out = s.voltages();
    for e in netlist.0.elements() {
        if let Some(i) = s.source_current(e.id()) {
            out.insert(format!("i({})", e.id()), i);
        }
    }
    Ok(out)
}

/// Swept values under the source id, then one list per node.
#[pyfunction]
#[pyo3(signature = (netlist, source, start, stop, step, technology=None))]
fn dc_sweep(
    py: Python<'_>,
    netlist: &PyNetlist,
    source: &str,
    start: f64,
    stop: f64,
    step: f64,
    technology: Option<&PyTechnology>,
) -> PyResult<BTreeMap<String, Vec<f64>>> {
    let p = tech(technology);
    let sw = py
        .detach(|| engine::dc_sweep(&netlist.0, &p, source, start, stop, step))
        .map_err(to_py)?;
    let mut out = BTreeMap::new();
    out.insert(sw.source.clone(), sw.inputs.clone());
    for name in sw.node_names() {
        let curve = sw.curve(name).expect("listed node");
        out.insert(name.clone(), curve.output);
    }
    Ok(out)
}

/// `"time"` plus one list per node.
#[pyfunction]
#[pyo3(signature = (netlist, t_stop, dt, method="be", initial_conditions=None, technology=None))]
fn transient(
    py: Python<'_>,
    netlist: &PyNetlist,
    t_stop: f64,
    dt: f64,
    method: &str,
    initial_conditions: Option<BTreeMap<String, f64>>,
    technology: Option<&PyTechnology>,
) -> PyResult<BTreeMap<String, Vec<f64>>> {
    let mut o = TransientOptions::new(t_stop, dt);
    o.method = match method {
        "be" => Integrator::BackwardEuler,
        "trap" => Integrator::Trapezoidal,
        other => return Err(PyValueError::new_err(format!("method must be 'be' or 'trap', got {other:?}"))),
    };
    o.initial_conditions = initial_conditions.unwrap_or_default().into_iter().collect();
    let p = tech(technology);
    let w = py.detach(|| engine::transient(&netlist.0, &p, &o)).map_err(to_py)?;
    let mut out: BTreeMap<String, Vec<f64>> = w.node_names.into_iter().zip(w.voltages).collect();
    out.insert("time".into(), w.times);
    Ok(out)
}

/// Butterfly curves and the inscribed-square noise margins.
#[pyclass(module = "sramlab", name = "Butterfly", frozen, get_all)]
struct PyButterfly {
    snm: f64,
    snm_high: f64,
    snm_low: f64,
    crossings: usize,
    /// `(Vin, Vout)` of the first inverter.
    curve_a: (Vec<f64>, Vec<f64>),
    /// `(Vin, Vout)` of the second inverter.
    curve_b: (Vec<f64>, Vec<f64>),
}

#[pymethods]
impl PyButterfly {
    fn __repr__(&self) -> String {
        format!("<Butterfly snm={:.6} high={:.6} low={:.6}>", self.snm, self.snm_high, self.snm_low)
    }
}

#[pyfunction]
#[pyo3(signature = (cell, vdd=1.8, mode="hold", grid=1e-3, technology=None))]
fn butterfly(
    py: Python<'_>,
    cell: &PyNetlist,
    vdd: f64,
    mode: &str,
    grid: f64,
    technology: Option<&PyTechnology>,
) -> PyResult<PyButterfly> {
    let (m, p) = (self::mode(mode)?, tech(technology));
    let b = py.detach(|| stability::butterfly(&cell.0, &p, m, vdd, grid)).map_err(to_py)?;
    Ok(PyButterfly {
        snm: b.snm,
        snm_high: b.snm_high,
        snm_low: b.snm_low,
        crossings: b.crossings,
        curve_a: (b.curve_a.input, b.curve_a.output),
        curve_b: (b.curve_b.input, b.curve_b.output),
    })
}

/// Closed-form terms `{"drv0", "v1", "v2", "drv"}` from the cell's leakages.
#[pyfunction]
#[pyo3(signature = (cell, technology=None))]
fn drv_closed_form(cell: &PyNetlist, technology: Option<&PyTechnology>) -> PyResult<BTreeMap<&'static str, f64>> {
    let inputs = stability::drv_inputs_from_cell(&cell.0, &tech(technology)).map_err(to_py)?;
    let t = stability::drv_terms(&inputs).map_err(to_py)?;
    Ok(BTreeMap::from([("drv0", t.drv0), ("v1", t.v1), ("v2", t.v2), ("drv", t.drv)]))
}

/// Closed form with the same leakage and slope factor on every device.
#[pyfunction]
fn drv_matched(i_off: f64, n: f64, v_t: f64) -> PyResult<f64> {
    stability::drv_closed_form(&stability::DrvInputs::matched(i_off, n, v_t)).map_err(to_py)
}

#[pyfunction]
fn drv_ideal(n: f64, v_t: f64) -> f64 {
    stability::drv_ideal(n, v_t)
}

/// Lowest supply with a positive hold SNM, by bisection on butterflies.
#[pyfunction]
#[pyo3(signature = (cell, technology=None))]
fn drv_bruteforce(py: Python<'_>, cell: &PyNetlist, technology: Option<&PyTechnology>) -> PyResult<f64> {
    let p = tech(technology);
    py.detach(|| stability::drv_bruteforce(&cell.0, &p)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (cell, vdd=1.8, wordline=None, technology=None))]
fn write_margin(
    py: Python<'_>,
    cell: &PyNetlist,
    vdd: f64,
    wordline: Option<f64>,
    technology: Option<&PyTechnology>,
) -> PyResult<f64> {
    let p = tech(technology);
    py.detach(|| stability::write_margin_with_wordline(&cell.0, &p, vdd, wordline.unwrap_or(vdd)))
        .map_err(to_py)
}

/// Summary statistics plus the per-sample SNM list under `"values"`.
#[pyfunction]
#[pyo3(signature = (cell, samples=200, seed=1, a_vth=None, vdd=1.8, mode="hold", grid=1e-3, technology=None))]
#[allow(clippy::too_many_arguments)]
fn monte_carlo<'py>(
    py: Python<'py>,
    cell: &PyNetlist,
    samples: usize,
    seed: u64,
    a_vth: Option<f64>,
    vdd: f64,
    mode: &str,
    grid: f64,
    technology: Option<&PyTechnology>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    let (m, p) = (self::mode(mode)?, tech(technology));
    let vm = VariationModel {
        a_vth: a_vth.unwrap_or(p.nmos.a_vth),
        samples,
        seed,
    };
    let s = py.detach(|| stability::monte_carlo_snm(&cell.0, &p, &vm, m, vdd, grid)).map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("nominal", s.nominal)?;
    d.set_item("mean", s.mean)?;
    d.set_item("stddev", s.stddev)?;
    d.set_item("min", s.min)?;
    d.set_item("max", s.max)?;
    d.set_item("failures", s.failures)?;
    d.set_item("values", s.values)?;
    d.set_item("histogram", (s.histogram.edges, s.histogram.counts))?;
    Ok(d)
}

#[pyfunction]
fn sigma_vth(a_vth: f64, w: f64, l: f64) -> f64 {
    stability::sigma_vth(a_vth, w, l)
}

#[pyfunction]
fn dynamic_power(c_load: f64, vdd: f64, f_sw: f64) -> f64 {
    metrics::dynamic_power(c_load, vdd, f_sw)
}

/// Average of the two edge delays.
#[pyfunction]
fn propagation_delay(t_plh: f64, t_phl: f64) -> f64 {
    metrics::DelayMeasurement::from_edges(t_plh, t_phl).t_p
}

#[pyfunction]
fn bitline_delay(c_bitline: f64, dv: f64, i_cell: f64) -> PyResult<f64> {
    metrics::bitline_delay(c_bitline, dv, i_cell).map_err(to_py)
}

/// Per-rectangle areas and their total.
#[pyfunction]
fn area(rects: Vec<(f64, f64)>) -> PyResult<(Vec<f64>, f64)> {
    let a = metrics::area_report(&rects).map_err(to_py)?;
    Ok((a.areas, a.total))
}

#[pymodule]
fn sramlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SramlabError", py.get_type::<SramlabError>())?;
    m.add("ConvergenceError", py.get_type::<ConvergenceError>())?;
    m.add("NotWritableError", py.get_type::<NotWritableError>())?;
    m.add_class::<PyNetlist>()?;
    m.add_class::<PyTechnology>()?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyButterfly>()?;
    m.add_function(wrap_pyfunction!(build_cell, m)?)?;
    m.add_function(wrap_pyfunction!(build_array, m)?)?;
    m.add_function(wrap_pyfunction!(build_periphery, m)?)?;
    m.add_function(wrap_pyfunction!(solve_dc, m)?)?;
    m.add_function(wrap_pyfunction!(dc_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(transient, m)?)?;
    m.add_function(wrap_pyfunction!(butterfly, m)?)?;
    m.add_function(wrap_pyfunction!(drv_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(drv_matched, m)?)?;
    m.add_function(wrap_pyfunction!(drv_ideal, m)?)?;
    m.add_function(wrap_pyfunction!(drv_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(write_margin, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_vth, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_power, m)?)?;
    m.add_function(wrap_pyfunction!(propagation_delay, m)?)?;
    m.add_function(wrap_pyfunction!(bitline_delay, m)?)?;
    m.add_function(wrap_pyfunction!(area, m)?)?;
    Ok(())
}
