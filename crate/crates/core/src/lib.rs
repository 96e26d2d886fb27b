// SPDX-License-Identifier: Apache-2.0

//! Transistor-level SRAM analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`netlist`]: parser, printer and validator for the extracted-netlist dialect.
//! * [`devices`]: compact MOSFET models and technology parameters.
//! * [`engine`]: modified nodal analysis (DC, sweeps, transient).
//! * [`stability`]: butterfly SNM, data retention voltage, write margin, Monte Carlo.
//! * [`metrics`]: closed-form figures of merit (power, delay, ratios, area).
//! * [`genlib`]: netlist generators for the cell, array and periphery circuits.
//! * [`config`] and [`report`]: technology files and plain-text analysis reports.

pub mod config;
pub mod devices;
pub mod engine;
pub mod error;
pub mod genlib;
pub mod metrics;
pub mod netlist;
pub mod report;
pub mod stability;
pub mod units;

pub use error::{Error, Result};
