// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use sramlab_core::config::load_config;
use sramlab_core::devices::TechnologyParams;
use sramlab_core::engine::{dc_sweep, solve_dc, transient, Integrator, TransientOptions};
use sramlab_core::genlib::{build_6t_cell, build_array, build_periphery, extracted_parasitics, CellGeometry, PeripheryKind};
use sramlab_core::metrics::{area_report, check_ratios, dynamic_power, propagation_delay, DelayMeasurement};
use sramlab_core::netlist::{parse_netlist, print_netlist, validate, Netlist};
use sramlab_core::report::{AnalysisReport, Unit};
use sramlab_core::stability::{
    butterfly, drv_bruteforce, drv_ideal, drv_inputs_from_cell, drv_terms, monte_carlo_snm, snm_macro, write_margin_with_wordline,
    Mode, VariationModel,
};
use sramlab_core::Error;

use crate::{Cli, Command, GeometryArgs, KindArg, MethodArg, ModeArg};

/// Agreement required between the closed-form and searched DRV.
const DRV_TOLERANCE: f64 = 0.02;

pub struct Failure {
    pub error: anyhow::Error,
    /// Partial results, printed before the error.
    pub report: Option<AnalysisReport>,
}

impl Failure {
    /// 2 for bad input (files, syntax, arguments), 1 for failed analyses.
    pub fn code(&self) -> u8 {
        let input = self.error.chain().any(|e| {
            e.is::<std::io::Error>()
                || e.is::<BadInput>()
                || e.downcast_ref::<Error>()
                    .is_some_and(|e| e.is_input_error() || matches!(e.root(), Error::Domain(_)))
        });
        if input {
            2
        } else {
            1
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure {
            error: e.into(),
            report: None,
        }
    }
}

/// Usage problem the argument parser cannot catch.
#[derive(Debug)]
struct BadInput(String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

type Outcome = Result<AnalysisReport, Failure>;

fn read_netlist(path: &Path) -> anyhow::Result<Netlist> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("in {}", path.display()))
}

fn write_out(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn geometry(g: &GeometryArgs) -> CellGeometry {
    let d = CellGeometry::default();
    CellGeometry {
        pu: g.pu.unwrap_or(d.pu),
        pd: g.pd.unwrap_or(d.pd),
        pg: g.pg.unwrap_or(d.pg),
    }
}

fn cell(args: &crate::CellArgs) -> anyhow::Result<Netlist> {
    match &args.netlist {
        Some(p) => read_netlist(p),
        None => {
            let g = geometry(&args.geometry);
            g.validate()?;
            Ok(build_6t_cell(&g, None))
        }
    }
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Hold => Mode::Hold,
        ModeArg::Read => Mode::Read,
    }
}

fn header(name: &str, params: &TechnologyParams) -> AnalysisReport {
    let mut r = AnalysisReport::new();
    r.header.push(format!("sramlab {name}"));
    r.header.extend(params.describe());
    r
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse { .. } => "parse",
        Command::Validate { .. } => "validate",
        Command::Generate { .. } => "generate",
        Command::Dc { .. } => "dc",
        Command::Sweep { .. } => "sweep",
        Command::Tran { .. } => "tran",
        Command::Snm { .. } => "snm",
        Command::Drv { .. } => "drv",
        Command::WriteMargin { .. } => "write-margin",
        Command::Power { .. } => "power",
        Command::Delay { .. } => "delay",
        Command::Ratios { .. } => "ratios",
        Command::Area { .. } => "area",
        Command::Montecarlo { .. } => "montecarlo",
    }
}

pub fn run(cli: Cli) -> Outcome {
    let params = match &cli.config {
        Some(p) => load_config(p)?,
        None => TechnologyParams::default(),
    };
    let mut r = header(command_name(&cli.command), &params);
    match cli.command {
        Command::Parse { file, out } => {
            let n = read_netlist(&file)?;
            r.add("nodes", n.node_count() as f64, Unit::Count, "parse_netlist");
            r.add("elements", n.element_count() as f64, Unit::Count, "parse_netlist");
            for w in n.count_warnings() {
                r.note(w);
            }
            if let Some(out) = out {
                write_out(&out, &print_netlist(&n))?;
            }
        }
        Command::Validate { file } => {
            let n = read_netlist(&file)?;
            r.extend(validate(&n));
            if !r.all_pass() {
                return Err(Failure {
                    error: anyhow!("{} failed validation", file.display()),
                    report: Some(r),
                });
            }
        }
        Command::Generate {
            kind,
            rows,
            cols,
            parasitics,
            geometry: g,
            out,
        } => {
            let g = geometry(&g);
            g.validate()?;
            let n = match kind {
                KindArg::Cell => build_6t_cell(&g, parasitics.then(extracted_parasitics).as_ref()),
                KindArg::Array => build_array(rows, cols, &g)?,
                KindArg::SenseAmp => build_periphery(PeripheryKind::SenseAmp, &g),
                KindArg::Precharge => build_periphery(PeripheryKind::Precharge, &g),
                KindArg::WriteDriver => build_periphery(PeripheryKind::WriteDriver, &g),
                KindArg::Decoder => build_periphery(PeripheryKind::Decoder2to4, &g),
            };
            let text = print_netlist(&n);
            match out {
                Some(out) => {
                    write_out(&out, &text)?;
                    r.add("nodes", n.node_count() as f64, Unit::Count, "generate");
                    r.add("elements", n.element_count() as f64, Unit::Count, "generate");
                }
                // the netlist itself is the output
                None => {
                    print!("{text}");
                    return Ok(AnalysisReport::new());
                }
            }
        }
        Command::Dc { file, out } => {
            let n = read_netlist(&file)?;
            let s = solve_dc(&n, &params, None)?;
            for (node, v) in s.voltages() {
                r.add(format!("v({node})"), v, Unit::Volt, "solve_dc");
            }
            for e in n.elements() {
                if let Some(i) = s.source_current(e.id()) {
                    r.add(format!("i({})", e.id()), i, Unit::Ampere, "solve_dc");
                }
            }
            r.add("iterations", s.iterations as f64, Unit::Count, "solve_dc");
            if let Some(out) = out {
                write_out(&out, &s.to_csv())?;
            }
        }
        Command::Sweep {
            file,
            source,
            from,
            to,
            step,
            probe,
            out,
        } => {
            let n = read_netlist(&file)?;
            let sw = dc_sweep(&n, &params, &source, from, to, step)?;
            r.add("points", sw.inputs.len() as f64, Unit::Count, "dc_sweep");
            let csv = sw.to_csv(&probe)?;
            if let Some(out) = out {
                write_out(&out, &csv)?;
            }
        }
        Command::Tran {
            file,
            tstop,
            dt,
            method,
            ic,
            probe,
            out,
        } => {
            let n = read_netlist(&file)?;
            let mut o = TransientOptions::new(tstop, dt);
            o.method = match method {
                MethodArg::Be => Integrator::BackwardEuler,
                MethodArg::Trap => Integrator::Trapezoidal,
            };
            o.initial_conditions = ic;
            let w = transient(&n, &params, &o)?;
            r.add("time_points", w.times.len() as f64, Unit::Count, "transient");
            let last = *w.times.last().expect("at least t = 0");
            r.add("t_stop", last, Unit::Second, "transient");
            let csv = w.to_csv(&probe)?;
            for (name, series) in w.node_names.iter().zip(&w.voltages) {
                if probe.is_empty() || probe.contains(name) {
                    r.add(format!("v({name})@t_stop"), *series.last().expect("non-empty"), Unit::Volt, "transient");
                }
            }
            for warning in &w.warnings {
                r.note(warning.clone());
            }
            if let Some(out) = out {
                write_out(&out, &csv)?;
            }
        }
        Command::Snm {
            cell: c,
            mode: m,
            vdd,
            grid,
            out,
        } => {
            let b = butterfly(&cell(&c)?, &params, mode(m), vdd, grid)?;
            r.add("snm_high", b.snm_high, Unit::Volt, "butterfly");
            r.add("snm_low", b.snm_low, Unit::Volt, "butterfly");
            r.add_checked("snm", b.snm, Unit::Volt, b.snm > 0.0, "butterfly");
            r.add("crossings", b.crossings as f64, Unit::Count, "butterfly");
            if let Some(out) = out {
                write_out(&out, &b.to_csv())?;
            }
        }
        Command::Drv {
            cell: c,
            closed_form_only,
            vdd,
        } => {
            let c = cell(&c)?;
            let inputs = drv_inputs_from_cell(&c, &params)?;
            let t = drv_terms(&inputs)?;
            r.add("drv0", t.drv0, Unit::Volt, "drv_closed_form");
            r.add("v1", t.v1, Unit::Volt, "drv_closed_form");
            r.add("v2", t.v2, Unit::Volt, "drv_closed_form");
            r.add("drv_closed_form", t.drv, Unit::Volt, "drv_closed_form");
            r.add("drv_ideal", drv_ideal(inputs.n[1], inputs.v_t), Unit::Volt, "drv_ideal");
            if !closed_form_only {
                let brute = drv_bruteforce(&c, &params)?;
                r.add("drv_bruteforce", brute, Unit::Volt, "drv_bruteforce");
                let diff = t.drv - brute;
                r.add_checked("drv_difference", diff, Unit::Volt, diff.abs() <= DRV_TOLERANCE, "drv_bruteforce");
            }
            if let Some(vdd) = vdd {
                r.add("snm_macro", snm_macro(vdd, t.drv, inputs.n[1])?, Unit::Volt, "snm_macro");
            }
        }
        Command::WriteMargin { cell: c, vdd, wl } => {
            let m = write_margin_with_wordline(&cell(&c)?, &params, vdd, wl.unwrap_or(vdd));
            match m {
                Ok(m) => {
                    r.add("write_margin", m, Unit::Volt, "write_margin");
                }
                Err(e) => {
                    return Err(Failure {
                        error: e.into(),
                        report: Some(r),
                    })
                }
            }
        }
        Command::Power { cl, vdd, fsw } => {
            if cl < 0.0 || vdd < 0.0 || fsw < 0.0 {
                return Err(BadInput("power inputs must be non-negative".into()).into());
            }
            r.add("dynamic_power", dynamic_power(cl, vdd, fsw), Unit::Watt, "dynamic_power");
        }
        Command::Delay {
            tplh,
            tphl,
            netlist,
            input,
            output,
            tstop,
            dt,
            vlow,
            vhigh,
        } => {
            let d = match (tplh, tphl, netlist) {
                (Some(lh), Some(hl), _) => DelayMeasurement::from_edges(lh, hl),
                (_, _, Some(path)) => {
                    let n = read_netlist(&path)?;
                    let (tstop, dt) = (tstop.expect("required by clap"), dt.expect("required by clap"));
                    let w = transient(&n, &params, &TransientOptions::new(tstop, dt))?;
                    for warning in &w.warnings {
                        r.note(warning.clone());
                    }
                    let (i, o) = (input.expect("required by clap"), output.expect("required by clap"));
                    propagation_delay(&w, &i, &o, vlow, vhigh)?
                }
                _ => return Err(BadInput("give --tplh and --tphl, or --netlist with --input/--output".into()).into()),
            };
            r.add("t_plh", d.t_plh, Unit::Second, "propagation_delay");
            r.add("t_phl", d.t_phl, Unit::Second, "propagation_delay");
            r.add("t_p", d.t_p, Unit::Second, "propagation_delay");
        }
        Command::Ratios {
            geometry: g,
            pd_right,
            pu_right,
            pg_right,
        } => {
            let g = geometry(&g);
            let rr = check_ratios(
                [g.pd, pd_right.unwrap_or(g.pd)],
                [g.pu, pu_right.unwrap_or(g.pu)],
                [g.pg, pg_right.unwrap_or(g.pg)],
            )?;
            r.add("cr_left", rr.cr_left, Unit::Ratio, "check_ratios");
            r.add("cr_right", rr.cr_right, Unit::Ratio, "check_ratios");
            r.add("pr_left", rr.pr_left, Unit::Ratio, "check_ratios");
            r.add("pr_right", rr.pr_right, Unit::Ratio, "check_ratios");
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            r.add_checked("read_stable", flag(rr.read_stable), Unit::Count, rr.read_stable, "check_ratios");
            r.add_checked("write_stable", flag(rr.write_stable), Unit::Count, rr.write_stable, "check_ratios");
        }
        Command::Area { rects } => {
            let a = area_report(&rects)?;
            for (k, area) in a.areas.iter().enumerate() {
                r.add(format!("area_{}", k + 1), *area, Unit::LambdaSquared, "area_report");
            }
            r.add("area_total", a.total, Unit::LambdaSquared, "area_report");
        }
        Command::Montecarlo {
            cell: c,
            avth,
            samples,
            seed,
            mode: m,
            vdd,
            grid,
            out,
        } => {
            let vm = VariationModel {
                a_vth: avth.unwrap_or(params.nmos.a_vth),
                samples,
                seed,
            };
            let s = monte_carlo_snm(&cell(&c)?, &params, &vm, mode(m), vdd, grid)?;
            r.note(format!("a_vth {:e} V*m", vm.a_vth));
            r.add("samples", s.samples as f64, Unit::Count, "monte_carlo_snm");
            r.add("failures", s.failures as f64, Unit::Count, "monte_carlo_snm");
            r.add("snm_nominal", s.nominal, Unit::Volt, "monte_carlo_snm");
            r.add("snm_mean", s.mean, Unit::Volt, "monte_carlo_snm");
            r.add("snm_stddev", s.stddev, Unit::Volt, "monte_carlo_snm");
            r.add("snm_min", s.min, Unit::Volt, "monte_carlo_snm");
            r.add("snm_max", s.max, Unit::Volt, "monte_carlo_snm");
            let h = &s.histogram;
            for (k, count) in h.counts.iter().enumerate() {
                r.note(format!("bin [{:e}, {:e}] {count}", h.edges[k], h.edges[k + 1]));
            }
            if let Some(out) = out {
                write_out(&out, &s.to_csv())?;
            }
        }
    }
    Ok(r)
}
