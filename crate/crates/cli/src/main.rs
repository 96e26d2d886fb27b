// SPDX-License-Identifier: Apache-2.0

//! `sramlab`: netlist tools, circuit simulation and SRAM cell analysis.
//!
//! Every subcommand prints a plain-text report (`name value unit [verdict]`)
//! headed by the technology in use. `--out` writes the CSV or netlist side
//! output. Exit status is 0 on success, 1 when an analysis fails and 2 for
//! bad input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "sramlab", version, about = "Transistor-level SRAM analysis")]
struct Cli {
    /// Technology file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// A number with an optional SPICE suffix (`35f`, `100meg`, `1.8`).
fn spice(s: &str) -> Result<f64, String> {
    sramlab_core::units::parse_value(s).ok_or_else(|| format!("not a number: {s:?}"))
}

/// `W/L`, each with an optional suffix: `10.5u/2u`.
fn geometry(s: &str) -> Result<(f64, f64), String> {
    let (w, l) = s.split_once('/').ok_or_else(|| format!("expected W/L, got {s:?}"))?;
    Ok((spice(w)?, spice(l)?))
}

/// `WxH` in lambda: `67.5x37`.
fn rect(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    Ok((spice(w)?, spice(h)?))
}

/// `node=value`.
fn initial_condition(s: &str) -> Result<(String, f64), String> {
    let (n, v) = s.split_once('=').ok_or_else(|| format!("expected node=value, got {s:?}"))?;
    Ok((n.trim().to_string(), spice(v.trim())?))
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Hold,
    Read,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Be,
    Trap,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Cell,
    Array,
    SenseAmp,
    Precharge,
    WriteDriver,
    Decoder,
}

/// Cell geometry overrides.
#[derive(Args, Debug, Clone)]
struct GeometryArgs {
    /// Pull-up W/L.
    #[arg(long, value_parser = geometry)]
    pu: Option<(f64, f64)>,
    /// Pull-down W/L.
    #[arg(long, value_parser = geometry)]
    pd: Option<(f64, f64)>,
    /// Access (pass-gate) W/L.
    #[arg(long, value_parser = geometry)]
    pg: Option<(f64, f64)>,
}

/// The cell under analysis: a netlist file, or the generated default cell.
#[derive(Args, Debug, Clone)]
struct CellArgs {
    /// Cell netlist with nodes named Q and Qbar.
    #[arg(long)]
    netlist: Option<PathBuf>,
    #[command(flatten)]
    geometry: GeometryArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a netlist and report its counts.
    Parse {
        file: PathBuf,
        /// Write the canonical form of the netlist here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural checks: degenerate devices, floating nodes, trailer counts.
    Validate { file: PathBuf },
    /// Write a generated netlist.
    Generate {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 2)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        /// Attach the extracted node capacitances (cell only).
        #[arg(long)]
        parasitics: bool,
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DC operating point.
    Dc {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DC sweep of one source.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        source: String,
        #[arg(long, value_parser = spice)]
        from: f64,
        #[arg(long, value_parser = spice)]
        to: f64,
        #[arg(long, value_parser = spice)]
        step: f64,
        /// Nodes to export (all when absent).
        #[arg(long)]
        probe: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transient analysis.
    Tran {
        file: PathBuf,
        #[arg(long, value_parser = spice)]
        tstop: f64,
        #[arg(long, value_parser = spice)]
        dt: f64,
        #[arg(long, value_enum, default_value = "be")]
        method: MethodArg,
        /// Initial node voltage, `node=value`; repeatable.
        #[arg(long, value_parser = initial_condition)]
        ic: Vec<(String, f64)>,
        #[arg(long)]
        probe: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Butterfly curves and static noise margin.
    Snm {
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long, value_enum, default_value = "hold")]
        mode: ModeArg,
        #[arg(long, value_parser = spice, default_value = "1.8")]
        vdd: f64,
        #[arg(long, value_parser = spice, default_value = "1m")]
        grid: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Data retention voltage: closed form and butterfly search.
    Drv {
        #[command(flatten)]
        cell: CellArgs,
        /// Skip the butterfly search.
        #[arg(long)]
        closed_form_only: bool,
        /// Also evaluate the linear SNM model at this supply.
        #[arg(long, value_parser = spice)]
        vdd: Option<f64>,
    },
    /// Highest bitline voltage that flips the cell.
    WriteMargin {
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long, value_parser = spice, default_value = "1.8")]
        vdd: f64,
        /// Wordline voltage; defaults to the supply.
        #[arg(long, value_parser = spice)]
        wl: Option<f64>,
    },
    /// Dynamic switching power C·V²·f.
    Power {
        #[arg(long, value_parser = spice)]
        cl: f64,
        #[arg(long, value_parser = spice)]
        vdd: f64,
        #[arg(long, value_parser = spice)]
        fsw: f64,
    },
    /// Propagation delay from edge times or from a simulated waveform.
    Delay {
        #[arg(long, value_parser = spice, requires = "tphl")]
        tplh: Option<f64>,
        #[arg(long, value_parser = spice, requires = "tplh")]
        tphl: Option<f64>,
        /// Netlist to simulate when edges are not given.
        #[arg(long, conflicts_with = "tplh", requires_all = ["input", "output", "tstop", "dt"])]
        netlist: Option<PathBuf>,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        output: Option<String>,
        #[arg(long, value_parser = spice)]
        tstop: Option<f64>,
        #[arg(long, value_parser = spice)]
        dt: Option<f64>,
        #[arg(long, value_parser = spice, default_value = "0")]
        vlow: f64,
        #[arg(long, value_parser = spice, default_value = "1.8")]
        vhigh: f64,
    },
    /// Cell and pull-up ratios.
    Ratios {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Right-side pull-down W/L when it differs from the left.
        #[arg(long, value_parser = geometry)]
        pd_right: Option<(f64, f64)>,
        #[arg(long, value_parser = geometry)]
        pu_right: Option<(f64, f64)>,
        #[arg(long, value_parser = geometry)]
        pg_right: Option<(f64, f64)>,
    },
    /// Layout areas of rectangles in lambda.
    Area {
        /// `WxH`; repeatable.
        #[arg(long = "rect", value_parser = rect, required = true)]
        rects: Vec<(f64, f64)>,
    },
    /// Static noise margin under random threshold mismatch.
    Montecarlo {
        #[command(flatten)]
        cell: CellArgs,
        /// Mismatch coefficient in V·m; the technology value when absent.
        #[arg(long, value_parser = spice)]
        avth: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "hold")]
        mode: ModeArg,
        #[arg(long, value_parser = spice, default_value = "1.8")]
        vdd: f64,
        #[arg(long, value_parser = spice, default_value = "1m")]
        grid: f64,
        /// Per-sample CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(report) = &failure.report {
                print!("{report}");
            }
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code())
        }
    }
}
