// SPDX-License-Identifier: Apache-2.0

//! SRAM cell stability: butterfly SNM, retention voltage, write margin and
//! threshold-mismatch Monte Carlo.

mod butterfly;
mod drv;
mod montecarlo;
mod square;
mod write;

pub use butterfly::{butterfly, identify_cell, ButterflyData, CellTopology, Mode, QBAR_NAMES};
pub use drv::{
    cell_roles, drv_bruteforce, drv_closed_form, drv_ideal, drv_inputs_from_cell, drv_terms, snm_macro, CellRole,
    DrvInputs, DrvTerms, DRV_INDEX, DRV_SEARCH_MAX,
};
pub use montecarlo::{monte_carlo_snm, Histogram, MonteCarloSummary, VariationModel};
pub use square::{inscribed_squares, SquareFit};
pub use write::{write_margin, write_margin_with_wordline};

use crate::engine::TransferCurve;

/// Ideal inverter switching at `vdd/2`, as a four-point curve.
pub fn ideal_inverter(vdd: f64) -> TransferCurve {
    let h = vdd / 2.0;
    TransferCurve::new(vec![0.0, h, h, vdd], vec![vdd, vdd, 0.0, 0.0])
}

/// Threshold mismatch `A_Vth/√(W·L)`.
pub fn sigma_vth(a_vth: f64, w: f64, l: f64) -> f64 {
    a_vth * (1.0 / (w * l)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_area_law() {
        assert_eq!(sigma_vth(3e-3, 1.0, 1.0), 3e-3);
        // 3 mV·µm on a 1 µm × 1 µm device
        assert!((sigma_vth(3e-9, 1e-6, 1e-6) - 3e-3).abs() < 1e-15);
        let s = sigma_vth(5e-9, 2e-6, 3e-6);
        assert!((sigma_vth(5e-9, 4e-6, 6e-6) - s / 2.0).abs() < 1e-15);
        assert!((sigma_vth(5e-9, 8e-6, 12e-6) - s / 4.0).abs() < 1e-15);
    }
}
