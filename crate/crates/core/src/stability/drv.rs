// SPDX-License-Identifier: Apache-2.0

//! Data retention voltage: the closed-form estimate from leakage currents
//! and subthreshold slopes, and a brute-force search on the butterfly.

use super::butterfly::{butterfly, identify_cell, Mode};
use crate::devices::{off_current, BiasPoint, TechnologyParams};
use crate::error::{Error, Result};
use crate::netlist::{MosElement, Netlist, Polarity};

/// Position of a transistor in the 6T cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellRole {
    PullDownLeft,
    PullUpLeft,
    PullDownRight,
    PullUpRight,
    PassLeft,
    PassRight,
}

/// Meaning of the indices 1..=6 in [`DrvInputs`]. "Left" is the inverter
/// driving Q and the access device on Q.
pub const DRV_INDEX: [CellRole; 6] = [
    CellRole::PullDownLeft,
    CellRole::PullUpLeft,
    CellRole::PullDownRight,
    CellRole::PullUpRight,
    CellRole::PassLeft,
    CellRole::PassRight,
];

/// Leakage and slope factor per transistor, in [`DRV_INDEX`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct DrvInputs {
    pub i_off: [f64; 6],
    pub n: [f64; 6],
    pub v_t: f64,
}

impl DrvInputs {
    /// Every transistor with the same leakage and slope.
    pub fn matched(i_off: f64, n: f64, v_t: f64) -> Self {
        DrvInputs {
            i_off: [i_off; 6],
            n: [n; 6],
            v_t,
        }
    }

    fn check(&self) -> Result<()> {
        for k in 0..6 {
            if !(self.i_off[k] > 0.0) {
                return Err(Error::Domain(format!("I_off,{} must be positive, got {:e}", k + 1, self.i_off[k])));
            }
            if !(self.n[k] >= 1.0) {
                return Err(Error::Domain(format!("n_{} must be >= 1, got {}", k + 1, self.n[k])));
            }
        }
        if !(self.v_t > 0.0) {
            return Err(Error::Domain(format!("thermal voltage must be positive, got {}", self.v_t)));
        }
        Ok(())
    }
}

/// Intermediate terms of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrvTerms {
    pub drv0: f64,
    pub v1: f64,
    pub v2: f64,
    pub drv: f64,
}

/// Closed-form DRV with its intermediate terms:
///
/// ```text
/// DRV0 = vT/(1/n2 + 1/n3) · ln[(1/n3 + 1/n4)·I4/(I2·I3)·(I5/n2 + I1·(1/n1 + 1/n2))]
/// V1   = vT·(I1 + I5)/I2 · exp(−DRV0/(n2·vT))
/// V2   = DRV0 − vT·I4/I3 · exp(−DRV0/(n3·vT))
/// DRV  = DRV0 + V1/2 + (DRV0 − V2)·n2/2
/// ```
pub fn drv_terms(d: &DrvInputs) -> Result<DrvTerms> {
    d.check()?;
    let [i1, i2, i3, i4, i5, _] = d.i_off;
    let [n1, n2, n3, n4, _, _] = d.n;
    let vt = d.v_t;
    let arg = (1.0 / n3 + 1.0 / n4) * i4 / (i2 * i3) * (i5 / n2 + i1 * (1.0 / n1 + 1.0 / n2));
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::Domain(format!("DRV0 logarithm argument is {arg:e}")));
    }
    let drv0 = vt / (1.0 / n2 + 1.0 / n3) * arg.ln();
    let v1 = vt * (i1 + i5) / i2 * (-drv0 / (n2 * vt)).exp();
    let v2 = drv0 - vt * i4 / i3 * (-drv0 / (n3 * vt)).exp();
    let drv = drv0 + v1 / 2.0 + (drv0 - v2) * n2 / 2.0;
    for (name, v) in [("DRV0", drv0), ("V1", v1), ("V2", v2), ("DRV", drv)] {
        if !v.is_finite() {
            return Err(Error::Domain(format!("{name} is not finite")));
        }
    }
    Ok(DrvTerms { drv0, v1, v2, drv })
}

pub fn drv_closed_form(d: &DrvInputs) -> Result<f64> {
    drv_terms(d).map(|t| t.drv)
}

/// Symmetric ideal-technology shortcut `2·vT·ln(1 + n)`.
pub fn drv_ideal(n: f64, v_t: f64) -> f64 {
    2.0 * v_t * (1.0 + n).ln()
}

/// Per-role transistor of a recognised 6T cell.
pub fn cell_roles(cell: &Netlist) -> Result<[MosElement; 6]> {
    let t = identify_cell(cell)?;
    let pick = |ids: &[String], polarity: Polarity, what: &str| -> Result<MosElement> {
        cell.mosfets()
            .find(|m| ids.contains(&m.id) && m.polarity == polarity)
            .cloned()
            .ok_or_else(|| Error::Configuration(format!("cell has no {what}")))
    };
    Ok([
        pick(&t.inverter_a, Polarity::Nmos, "left pull-down")?,
        pick(&t.inverter_a, Polarity::Pmos, "left pull-up")?,
        pick(&t.inverter_b, Polarity::Nmos, "right pull-down")?,
        pick(&t.inverter_b, Polarity::Pmos, "right pull-up")?,
        pick(&t.access_q, Polarity::Nmos, "access device on Q")?,
        pick(&t.access_qbar, Polarity::Nmos, "access device on Qbar")?,
    ])
}

/// Leakages `β·I0·exp(−Vth0/(n·vT))` at zero body and drain bias, and
/// slope factors, for each role of the cell.
pub fn drv_inputs_from_cell(cell: &Netlist, params: &TechnologyParams) -> Result<DrvInputs> {
    let th = params.thermal();
    let roles = cell_roles(cell)?;
    let mut d = DrvInputs::matched(0.0, 1.0, th.v_t);
    for (k, m) in roles.iter().enumerate() {
        let p = params.device(m.polarity);
        let b = BiasPoint {
            vgs: 0.0,
            vds: 0.0,
            vsb: 0.0,
            l: m.l,
            w: m.w,
        };
        d.i_off[k] = off_current(p, &b, th);
        d.n[k] = p.n;
    }
    Ok(d)
}

/// Upper end of the retention-voltage search.
pub const DRV_SEARCH_MAX: f64 = 1.8;

/// Smallest supply (to 1 mV) at which the hold butterfly still has a
/// square, found by bisection between 1 mV and [`DRV_SEARCH_MAX`].
pub fn drv_bruteforce(cell: &Netlist, params: &TechnologyParams) -> Result<f64> {
    let v_max = DRV_SEARCH_MAX;
    let retains = |vdd: f64| -> Result<bool> {
        let grid = vdd / 1000.0;
        let b = butterfly(cell, params, Mode::Hold, vdd, grid).map_err(|e| e.annotate(format!("vdd = {vdd}")))?;
        Ok(b.snm > 0.0)
    };
    if !retains(v_max)? {
        return Err(Error::Measurement(format!("cell does not retain data even at {v_max} V")));
    }
    let (mut lo, mut hi) = (1e-3, v_max);
    if retains(lo)? {
        return Ok(lo);
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if retains(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Linear SNM macro-model `k·(vdd − DRV)` with `k = 2/(3 + n)`.
pub fn snm_macro(vdd: f64, drv: f64, n: f64) -> Result<f64> {
    if vdd < drv {
        return Err(Error::Domain(format!("supply {vdd} V is below the retention voltage {drv} V")));
    }
    Ok(2.0 / (3.0 + n) * (vdd - drv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::devices::MosModel;
    use crate::genlib::{build_6t_cell, CellGeometry};

    #[test]
    fn matched_unit_slope_reference() {
        // every intermediate evaluated independently to 50 digits
        let t = drv_terms(&DrvInputs::matched(1e-12, 1.0, 0.026)).unwrap();
        let close = |a: f64, b: f64| ((a - b) / b).abs() < 1e-12;
        assert!(close(t.drv0, 0.023_292_873_099_964_715), "{}", t.drv0);
        assert!(close(t.v1, 0.021_228_911_104_120_877), "{}", t.v1);
        assert!(close(t.v2, 0.012_678_417_547_904_277), "{}", t.v2);
        assert!(close(t.drv, 0.039_214_556_428_055_373), "{}", t.drv);
    }

    #[test]
    fn result_is_independent_of_matched_leakage_level() {
        let a = drv_closed_form(&DrvInputs::matched(1e-12, 1.25, 0.026)).unwrap();
        let b = drv_closed_form(&DrvInputs::matched(3e-15, 1.25, 0.026)).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn ideal_shortcut() {
        assert!((drv_ideal(1.0, 0.026) - 0.036_043_653_389_117_156).abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs() {
        let mut d = DrvInputs::matched(1e-12, 1.0, 0.026);
        d.i_off[3] = 0.0;
        assert!(matches!(drv_closed_form(&d).unwrap_err(), Error::Domain(m) if m.contains("I_off,4")));
        let mut d = DrvInputs::matched(1e-12, 1.0, 0.026);
        d.n[0] = 0.5;
        assert!(drv_closed_form(&d).is_err());
    }

    #[test]
    fn macro_model() {
        assert_eq!(snm_macro(0.5, 0.5, 1.25).unwrap(), 0.0);
        assert!((snm_macro(1.8, 0.036, 1.0).unwrap() - 0.882).abs() < 1e-12);
        assert!((snm_macro(1.0, 0.0, 1.25).unwrap() - 2.0 / 4.25).abs() < 1e-15);
        assert!(matches!(snm_macro(0.01, 0.036, 1.0).unwrap_err(), Error::Domain(_)));
    }

    #[test]
    fn inputs_follow_device_sizes() {
        let p = TechnologyParams::default();
        let d = drv_inputs_from_cell(&build_6t_cell(&CellGeometry::default(), None), &p).unwrap();
        // PD 6/2, PU 10.5/2, PG 10.5/2.5 with a shared I0 and Vth0
        assert!((d.i_off[1] / d.i_off[0] - 5.25 / 3.0).abs() < 1e-12);
        assert!((d.i_off[4] / d.i_off[0] - 4.2 / 3.0).abs() < 1e-12);
        assert_eq!(d.i_off[0], d.i_off[2]);
        assert_eq!(d.n, [1.25; 6]);
    }

    #[test]
    fn bruteforce_brackets_the_retention_point() {
        let p = TechnologyParams::default().with_model(MosModel::SubthresholdOnly);
        let cell = build_6t_cell(&CellGeometry::default(), None);
        let drv = drv_bruteforce(&cell, &p).unwrap();
        let above = butterfly(&cell, &p, Mode::Hold, drv + 0.01, (drv + 0.01) / 1000.0).unwrap();
        let below = butterfly(&cell, &p, Mode::Hold, drv - 0.01, (drv - 0.01) / 1000.0).unwrap();
        assert!(above.snm > 0.0);
        assert_eq!(below.crossings, 1);
    }

    #[test]
    fn closed_form_agrees_with_bruteforce() {
        let p = TechnologyParams::default().with_model(MosModel::SubthresholdOnly);
        let cell = build_6t_cell(&CellGeometry::default(), None);
        let closed = drv_closed_form(&drv_inputs_from_cell(&cell, &p).unwrap()).unwrap();
        let brute = drv_bruteforce(&cell, &p).unwrap();
        assert!((closed - brute).abs() <= 0.02, "{closed} vs {brute}");
    }

    #[test]
    fn snm_grows_with_supply_above_retention() {
        let p = TechnologyParams::default();
        let cell = build_6t_cell(&CellGeometry::default(), None);
        let drv = drv_bruteforce(&cell, &p).unwrap();
        let mut last = 0.0;
        let mut vdd = drv;
        while vdd <= 1.8 {
            let snm = butterfly(&cell, &p, Mode::Hold, vdd, 0.005).unwrap().snm;
            assert!(snm >= last - 1e-9, "snm fell to {snm} at {vdd} V");
            last = snm;
            vdd += 0.05;
        }
    }

    #[test]
    fn retention_depends_on_leakage_ratios_only() {
        let p = TechnologyParams::default().with_model(MosModel::SubthresholdOnly);
        let mut doubled = p.clone();
        doubled.nmos.i0 *= 2.0;
        doubled.pmos.i0 *= 2.0;
        let cell = build_6t_cell(&CellGeometry::default(), None);
        let a = drv_bruteforce(&cell, &p).unwrap();
        let b = drv_bruteforce(&cell, &doubled).unwrap();
        assert!((a - b).abs() <= 0.002, "{a} vs {b}");
    }
}
