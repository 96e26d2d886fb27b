// SPDX-License-Identifier: Apache-2.0

//! Compact MOSFET models.
//!
//! Three pieces make up the drain current:
//!
//! * a threshold voltage with body effect and drain-induced barrier
//!   lowering, `Vth = Vth0 + γ(√|2|φF| + Vsb| − √(2|φF|)) − Vds·e^(−αL)`;
//! * the subthreshold current `β·I0·e^((Vgs − Vth)/(n·vT))·(1 − e^(−Vds/vT))`;
//! * a level-1 square law above `Vth + 3·n·vT`.
//!
//! Between `Vth` and `Vth + 3·n·vT` the logarithm of the current is
//! interpolated linearly, which keeps the current continuous in every bias.
//! All equations are written in the NMOS frame; PMOS devices are evaluated
//! by negating terminal voltages and current.

mod dual;

pub use dual::{Dual, Real};

use crate::error::{Error, Result};
use crate::netlist::Polarity;

pub const BOLTZMANN: f64 = 1.380649e-23;
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Default length used to set the DIBL coefficient: `α·L_MIN = 10`.
pub const DEFAULT_L_MIN: f64 = 2e-6;

/// Which current equation the simulator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MosModel {
    /// Subthreshold below Vth, square law above, log-blend in between.
    #[default]
    Blended,
    /// Subthreshold equation at every bias. Used for retention analysis.
    SubthresholdOnly,
}

/// Oxide and depletion charges for computing Vth0 from first principles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCharges {
    /// Work-function difference, V.
    pub phi_ms: f64,
    /// Depletion charge at zero body bias, C/m².
    pub q_b0: f64,
    /// Fixed oxide charge, C/m².
    pub q_ox: f64,
    /// Implant charge, C/m².
    pub q_i: f64,
}

/// Model constants for one polarity, SI units. Voltages are NMOS-frame
/// magnitudes: a PMOS with `vth0 = 0.4` has a threshold of −0.4 V.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    pub vth0: f64,
    /// Body-effect coefficient, √V.
    pub gamma: f64,
    /// Fermi potential. The sign follows the polarity convention
    /// (negative for NMOS); only the magnitude enters the equations.
    pub phi_f: f64,
    /// DIBL length coefficient, 1/m.
    pub alpha: f64,
    /// Process transconductance k', A/V².
    pub kp: f64,
    /// Channel-length modulation, 1/V.
    pub lambda: f64,
    /// Subthreshold slope factor.
    pub n: f64,
    /// Leakage of a unit-size device, A.
    pub i0: f64,
    /// Mismatch coefficient A_Vth, V·m.
    pub a_vth: f64,
    pub t_ox: f64,
    pub eps_ox: f64,
    pub eps_si: f64,
    /// Oxide capacitance per area, F/m² (derived from eps_ox / t_ox).
    pub c_ox: f64,
}

/// Technology as entered by the user: anything left `None` is derived
/// (when the inputs for it exist) or defaulted by [`derive_tech_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub vth0: Option<f64>,
    pub gamma: Option<f64>,
    pub phi_f: f64,
    pub alpha: f64,
    pub kp: f64,
    pub lambda: f64,
    pub n: f64,
    pub i0: f64,
    pub a_vth: f64,
    pub t_ox: f64,
    pub eps_ox: f64,
    pub eps_si: f64,
    /// Substrate doping, 1/m³.
    pub n_a: Option<f64>,
    pub charges: Option<ThresholdCharges>,
}

impl DeviceSpec {
    pub fn default_for(polarity: Polarity) -> Self {
        let (kp, phi_f) = match polarity {
            Polarity::Nmos => (100e-6, -0.35),
            Polarity::Pmos => (40e-6, 0.35),
        };
        DeviceSpec {
            vth0: None,
            gamma: None,
            phi_f,
            alpha: 10.0 / DEFAULT_L_MIN,
            kp,
            lambda: 0.05,
            n: 1.25,
            i0: 1e-12,
            a_vth: 5e-9,
            t_ox: 20e-9,
            eps_ox: 3.5e-11,
            eps_si: 1.04e-10,
            n_a: None,
            charges: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechnologySpec {
    pub nmos: DeviceSpec,
    pub pmos: DeviceSpec,
    /// Kelvin.
    pub temperature: f64,
    pub model: MosModel,
}

impl Default for TechnologySpec {
    fn default() -> Self {
        TechnologySpec {
            nmos: DeviceSpec::default_for(Polarity::Nmos),
            pmos: DeviceSpec::default_for(Polarity::Pmos),
            temperature: 300.15,
            model: MosModel::Blended,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyParams {
    pub nmos: DeviceParams,
    pub pmos: DeviceParams,
    pub temperature: f64,
    pub model: MosModel,
}

impl Default for TechnologyParams {
    fn default() -> Self {
        derive_tech_params(&TechnologySpec::default()).expect("defaults are valid")
    }
}

impl TechnologyParams {
    pub fn device(&self, polarity: Polarity) -> &DeviceParams {
        match polarity {
            Polarity::Nmos => &self.nmos,
            Polarity::Pmos => &self.pmos,
        }
    }

    pub fn device_mut(&mut self, polarity: Polarity) -> &mut DeviceParams {
        match polarity {
            Polarity::Nmos => &mut self.nmos,
            Polarity::Pmos => &mut self.pmos,
        }
    }

    pub fn thermal(&self) -> ThermalContext {
        ThermalContext::at(self.temperature)
    }

    pub fn with_model(mut self, model: MosModel) -> Self {
        self.model = model;
        self
    }

    /// `key = value` lines in the config-file vocabulary, for report headers.
    pub fn describe(&self) -> Vec<String> {
        let mut out = vec![
            format!("temperature = {}", self.temperature),
            format!(
                "model = {}",
                match self.model {
                    MosModel::Blended => "blended",
                    MosModel::SubthresholdOnly => "subthreshold",
                }
            ),
        ];
        for (prefix, d) in [("nmos", &self.nmos), ("pmos", &self.pmos)] {
            for (k, v) in [
                ("vth0", d.vth0),
                ("gamma", d.gamma),
                ("phi_f", d.phi_f),
                ("alpha", d.alpha),
                ("kp", d.kp),
                ("lambda", d.lambda),
                ("n", d.n),
                ("i0", d.i0),
                ("a_vth", d.a_vth),
                ("t_ox", d.t_ox),
                ("eps_ox", d.eps_ox),
                ("eps_si", d.eps_si),
                ("c_ox", d.c_ox),
            ] {
                out.push(format!("{prefix}.{k} = {v:e}"));
            }
        }
        out
    }
}

/// Fills in derived constants: `C_ox = ε_ox/t_ox`,
/// `γ = √(2·q·ε_si·N_A)/C_ox` when doping is given, and
/// `Vth0 = φ_ms − 2φ_F − (Q_B0 + Q_ox + Q_I)/C_ox` when the charges are.
/// Explicit `gamma` / `vth0` always win over derived values.
pub fn derive_tech_params(spec: &TechnologySpec) -> Result<TechnologyParams> {
    if !(spec.temperature > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {}", spec.temperature)));
    }
    Ok(TechnologyParams {
        nmos: derive_device(&spec.nmos).map_err(|e| e.annotate("nmos"))?,
        pmos: derive_device(&spec.pmos).map_err(|e| e.annotate("pmos"))?,
        temperature: spec.temperature,
        model: spec.model,
    })
}

const DEFAULT_VTH0: f64 = 0.4;
const DEFAULT_GAMMA: f64 = 0.3;

fn derive_device(s: &DeviceSpec) -> Result<DeviceParams> {
    if !(s.t_ox > 0.0) {
        return Err(Error::Domain(format!("t_ox must be positive, got {}", s.t_ox)));
    }
    if !(s.n >= 1.0) {
        return Err(Error::Domain(format!("subthreshold factor n must be >= 1, got {}", s.n)));
    }
    if !(s.kp > 0.0) {
        return Err(Error::Domain(format!("kp must be positive, got {}", s.kp)));
    }
    let c_ox = s.eps_ox / s.t_ox;
    let gamma = match (s.gamma, s.n_a) {
        (Some(g), _) => g,
        (None, Some(n_a)) => (2.0 * ELEMENTARY_CHARGE * s.eps_si * n_a).sqrt() / c_ox,
        (None, None) => DEFAULT_GAMMA,
    };
    let vth0 = match (s.vth0, s.charges) {
        (Some(v), _) => v,
        (None, Some(q)) => q.phi_ms - 2.0 * s.phi_f - (q.q_b0 + q.q_ox + q.q_i) / c_ox,
        (None, None) => DEFAULT_VTH0,
    };
    Ok(DeviceParams {
        vth0,
        gamma,
        phi_f: s.phi_f,
        alpha: s.alpha,
        kp: s.kp,
        lambda: s.lambda,
        n: s.n,
        i0: s.i0,
        a_vth: s.a_vth,
        t_ox: s.t_ox,
        eps_ox: s.eps_ox,
        eps_si: s.eps_si,
        c_ox,
    })
}

/// Thermal voltage kT/q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalContext {
    pub v_t: f64,
}

impl ThermalContext {
    pub fn at(temperature: f64) -> Self {
        ThermalContext {
            v_t: BOLTZMANN * temperature / ELEMENTARY_CHARGE,
        }
    }
}

/// NMOS-frame bias of one device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub vgs: f64,
    pub vds: f64,
    pub vsb: f64,
    pub l: f64,
    pub w: f64,
}

/// Threshold voltage with body effect and DIBL.
pub fn threshold_voltage(p: &DeviceParams, b: &BiasPoint) -> f64 {
    vth(p, b.vds, b.vsb, b.l, 0.0)
}

fn vth<T: Real>(p: &DeviceParams, vds: T, vsb: T, l: f64, shift: f64) -> T {
    let two_phi = 2.0 * p.phi_f.abs();
    (vsb + two_phi).abs().sqrt() * p.gamma - vds * (-p.alpha * l).exp() + (p.vth0 + shift - p.gamma * two_phi.sqrt())
}

/// Leakage scale `I_off = β·I0·e^(−Vth/(n·vT))` at the bias's threshold.
pub fn off_current(p: &DeviceParams, b: &BiasPoint, th: ThermalContext) -> f64 {
    b.w / b.l * p.i0 * (-threshold_voltage(p, b) / (p.n * th.v_t)).exp()
}

/// Subthreshold current `I_off·e^(Vgs/(n·vT))·(1 − e^(−Vds/vT))`.
pub fn subthreshold_current(p: &DeviceParams, b: &BiasPoint, th: ThermalContext) -> f64 {
    off_current(p, b, th) * (b.vgs / (p.n * th.v_t)).exp() * -(-b.vds / th.v_t).exp_m1()
}

/// Drain-to-source current of an NMOS-frame device for any sign of `vds`.
pub fn mos_current(p: &DeviceParams, b: &BiasPoint, th: ThermalContext, model: MosModel) -> f64 {
    oriented_current(p, model, th.v_t, b.w, b.l, b.vgs, b.vds, b.vsb, 0.0)
}

/// Current and its partial derivatives at a bias point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSignal {
    pub id: f64,
    /// ∂I/∂Vgs
    pub gm: f64,
    /// ∂I/∂Vds
    pub gds: f64,
    /// ∂I/∂Vbs
    pub gmb: f64,
}

pub fn mos_small_signal(p: &DeviceParams, b: &BiasPoint, th: ThermalContext, model: MosModel) -> SmallSignal {
    let vgs = Dual::<3>::variable(b.vgs, 0);
    let vds = Dual::<3>::variable(b.vds, 1);
    let vbs = Dual::<3>::variable(-b.vsb, 2);
    let i = oriented_current(p, model, th.v_t, b.w, b.l, vgs, vds, -vbs, 0.0);
    SmallSignal {
        id: i.re,
        gm: i.eps[0],
        gds: i.eps[1],
        gmb: i.eps[2],
    }
}

/// Handles reverse bias by swapping drain and source.
#[allow(clippy::too_many_arguments)]
fn oriented_current<T: Real>(p: &DeviceParams, model: MosModel, vt: f64, w: f64, l: f64, vgs: T, vds: T, vsb: T, shift: f64) -> T {
    if vds.value() >= 0.0 {
        channel_current(p, model, vt, w, l, vgs, vds, vsb, shift)
    } else {
        -channel_current(p, model, vt, w, l, vgs - vds, -vds, vsb + vds, shift)
    }
}

/// `x / (1 − e^(−x))`, finite at zero.
fn bernoulli_inv<T: Real>(x: T) -> T {
    if x.value().abs() < 1e-4 {
        x * x / 12.0 + x / 2.0 + 1.0
    } else {
        x / -(-x).exp_m1()
    }
}

#[allow(clippy::too_many_arguments)]
fn channel_current<T: Real>(p: &DeviceParams, model: MosModel, vt: f64, w: f64, l: f64, vgs: T, vds: T, vsb: T, shift: f64) -> T {
    let beta = w / l;
    let nvt = p.n * vt;
    let x = vds / vt;
    let drain_factor = -(-x).exp_m1();
    let vov = vgs - vth(p, vds, vsb, l, shift);
    let sub = || (vov / nvt).exp() * drain_factor * (beta * p.i0);
    if model == MosModel::SubthresholdOnly || vov.value() <= 0.0 {
        return sub();
    }
    let delta = 3.0 * nvt;
    let clm = vds * p.lambda + 1.0;
    if vov.value() >= delta {
        return if vds.value() < vov.value() {
            (vov * vds - vds * vds / 2.0) * clm * (p.kp * beta)
        } else {
            vov * vov * clm * (p.kp * beta / 2.0)
        };
    }
    // log-linear bridge from the subthreshold value at Vth to the square
    // law at Vth + delta, written as I_sub(Vth)·R^t to stay finite at Vds = 0
    let ratio = if vds.value() < delta {
        (-(vds / 2.0) + delta) * clm * bernoulli_inv(x) * (p.kp * vt / p.i0)
    } else {
        clm / drain_factor * (p.kp * delta * delta / (2.0 * p.i0))
    };
    let t = vov / delta;
    drain_factor * (t * ratio.ln()).exp() * (beta * p.i0)
}

/// Drain current of a placed device and its derivatives with respect to
/// the drain, gate, source and bulk voltages (in that order). Positive
/// current flows into the drain terminal.
#[allow(clippy::too_many_arguments)]
pub fn terminal_current(
    p: &DeviceParams,
    model: MosModel,
    vt: f64,
    polarity: Polarity,
    w: f64,
    l: f64,
    [vd, vg, vs, vb]: [f64; 4],
    vth_shift: f64,
) -> Dual<4> {
    let sign = match polarity {
        Polarity::Nmos => 1.0,
        Polarity::Pmos => -1.0,
    };
    // frame variables: NMOS as-is, PMOS negated
    let d = Dual::<4>::variable(vd, 0) * sign;
    let g = Dual::<4>::variable(vg, 1) * sign;
    let s = Dual::<4>::variable(vs, 2) * sign;
    let b = Dual::<4>::variable(vb, 3) * sign;
    oriented_current(p, model, vt, w, l, g - s, d - s, s - b, vth_shift) * sign
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nmos() -> DeviceParams {
        TechnologyParams::default().nmos
    }

    fn th() -> ThermalContext {
        ThermalContext::at(300.15)
    }

    fn bias(vgs: f64, vds: f64, vsb: f64) -> BiasPoint {
        BiasPoint { vgs, vds, vsb, l: 2e-6, w: 6e-6 }
    }

    #[test]
    fn thermal_voltage_near_26mv() {
        // 0.0258649... from kT/q at 300.15 K
        assert!((th().v_t - 0.025_864_925_786_328_75).abs() < 1e-15);
    }

    #[test]
    fn c_ox_from_oxide_constants() {
        // 3.5e-13 F/cm over 20 nm is 1.75e-7 F/cm², i.e. 1.75e-3 F/m²
        let p = TechnologyParams::default();
        assert!((p.nmos.c_ox - 1.75e-3).abs() < 1e-15);
        let mut spec = TechnologySpec::default();
        spec.nmos.t_ox *= 2.0;
        let q = derive_tech_params(&spec).unwrap();
        assert!((q.nmos.c_ox - p.nmos.c_ox / 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_from_doping() {
        let mut spec = TechnologySpec::default();
        spec.nmos.n_a = Some(1e23);
        // sqrt(2 q eps_si N_A)/C_ox evaluated to 50 digits with q = 1.602e-19
        // gives 1.04309742828652357; the library uses the exact SI q.
        let expected = (2.0 * ELEMENTARY_CHARGE * 1.04e-10 * 1e23f64).sqrt() / 1.75e-3;
        let p = derive_tech_params(&spec).unwrap();
        assert!((p.nmos.gamma - expected).abs() < 1e-12);
        assert!((p.nmos.gamma - 1.043_097_428_286_523_6).abs() < 1e-4);
        // explicit value wins
        spec.nmos.gamma = Some(0.5);
        assert_eq!(derive_tech_params(&spec).unwrap().nmos.gamma, 0.5);
    }

    #[test]
    fn vth0_from_charges() {
        let mut spec = TechnologySpec::default();
        spec.nmos.charges = Some(ThresholdCharges {
            phi_ms: -0.9,
            q_b0: -1.75e-3,
            q_ox: 0.0,
            q_i: 0.0,
        });
        let p = derive_tech_params(&spec).unwrap();
        // -0.9 + 0.7 + 1.0
        assert!((p.nmos.vth0 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = TechnologySpec::default();
        spec.pmos.t_ox = 0.0;
        assert!(matches!(derive_tech_params(&spec).unwrap_err().root(), Error::Domain(_)));
        let mut spec = TechnologySpec::default();
        spec.nmos.n = 0.9;
        assert!(derive_tech_params(&spec).is_err());
    }

    #[test]
    fn threshold_identities() {
        let p = nmos();
        assert_eq!(threshold_voltage(&p, &bias(0.0, 0.0, 0.0)), p.vth0);
        let mut far = bias(0.0, 1.5, 0.0);
        far.l = 1.0; // alpha * L enormous
        assert_eq!(threshold_voltage(&p, &far), p.vth0);
    }

    #[test]
    fn threshold_reference_value() {
        let p = DeviceParams {
            vth0: 0.4,
            gamma: 0.3,
            phi_f: -0.35,
            alpha: 1e7,
            ..nmos()
        };
        let b = BiasPoint { vgs: 0.0, vds: 1.2, vsb: 0.9, l: 130e-9, w: 1e-6 };
        // 50-digit evaluation: 0.2014371596191677317
        assert!((threshold_voltage(&p, &b) - 0.201_437_159_619_167_73).abs() < 1e-15);
    }

    #[test]
    fn subthreshold_reference_value() {
        // beta = 2, I0 = 1 pA, n = 1.25, Vth = 0.4 (no body effect, no DIBL)
        let p = DeviceParams {
            vth0: 0.4,
            i0: 1e-12,
            n: 1.25,
            alpha: 1e12,
            ..nmos()
        };
        let b = BiasPoint { vgs: 0.2, vds: 0.5, vsb: 0.0, l: 1e-6, w: 2e-6 };
        // 50-digit evaluation: 4.1161535202935149277e-15
        let i = subthreshold_current(&p, &b, th());
        assert!((i / 4.116_153_520_293_514_9e-15 - 1.0).abs() < 1e-13, "{i:e}");
    }

    #[test]
    fn subthreshold_limits() {
        let p = nmos();
        assert_eq!(subthreshold_current(&p, &bias(0.3, 0.0, 0.0), th()), 0.0);
        let vt = th().v_t;
        let b = bias(0.0, 10.0 * vt, 0.0);
        let ioff = off_current(&p, &b, th());
        let i = subthreshold_current(&p, &b, th());
        assert!((i / ioff - (1.0 - (-10f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn square_law_saturation_value() {
        let p = DeviceParams { kp: 100e-6, lambda: 0.0, alpha: 1e12, ..nmos() };
        let b = BiasPoint { vgs: p.vth0 + 0.5, vds: 1.0, vsb: 0.0, l: 1e-6, w: 3e-6 };
        let i = mos_current(&p, &b, th(), MosModel::Blended);
        assert!((i - 37.5e-6).abs() < 1e-15, "{i:e}");
    }

    #[test]
    fn zero_vds_gives_zero_current() {
        let p = nmos();
        for vgs in [-0.5, 0.0, 0.3, 0.41, 0.45, 1.0, 1.8] {
            assert_eq!(mos_current(&p, &bias(vgs, 0.0, 0.0), th(), MosModel::Blended), 0.0);
        }
    }

    #[test]
    fn triode_saturation_seam() {
        for lambda in [0.0, 0.05] {
            let p = DeviceParams { lambda, ..nmos() };
            let vgs = 1.2;
            let vov = vgs - threshold_voltage(&p, &bias(vgs, 0.8, 0.0));
            // Vth depends on Vds through DIBL; find the seam by fixed point
            let mut vds = vov;
            for _ in 0..50 {
                vds = vgs - threshold_voltage(&p, &bias(vgs, vds, 0.0));
            }
            let lo = mos_current(&p, &bias(vgs, vds * (1.0 - 1e-13), 0.0), th(), MosModel::Blended);
            let hi = mos_current(&p, &bias(vgs, vds * (1.0 + 1e-13), 0.0), th(), MosModel::Blended);
            assert!(((hi - lo) / hi).abs() < 1e-9, "lambda {lambda}: {lo:e} {hi:e} {vov}");
        }
    }

    #[test]
    fn blend_is_continuous() {
        let p = nmos();
        let vt = th().v_t;
        for vds in [1e-3, 0.05, 0.5, 1.8] {
            let vth = threshold_voltage(&p, &bias(0.0, vds, 0.0));
            for edge in [vth, vth + 3.0 * p.n * vt] {
                let lo = mos_current(&p, &bias(edge - 1e-12, vds, 0.0), th(), MosModel::Blended);
                let hi = mos_current(&p, &bias(edge + 1e-12, vds, 0.0), th(), MosModel::Blended);
                assert!(((hi - lo) / hi).abs() < 1e-9, "vds {vds} edge {edge}: {lo:e} {hi:e}");
            }
        }
    }

    #[test]
    fn reverse_bias_is_antisymmetric() {
        let p = nmos();
        let fwd = mos_current(&p, &bias(1.0, 0.5, 0.0), th(), MosModel::Blended);
        // same device with drain and source exchanged: gate 1.0 above the
        // (new) source at 0.5, Vds = -0.5, source 0.5 above bulk
        let rev = mos_current(&p, &bias(0.5, -0.5, 0.5), th(), MosModel::Blended);
        assert!((fwd + rev).abs() < 1e-18, "{fwd:e} {rev:e}");
    }

    #[test]
    fn pmos_mirrors_nmos() {
        let t = TechnologyParams::default();
        let pm = DeviceParams { kp: t.nmos.kp, phi_f: 0.35, ..t.pmos.clone() };
        let vt = th().v_t;
        let n = terminal_current(&t.nmos, MosModel::Blended, vt, Polarity::Nmos, 6e-6, 2e-6, [1.0, 1.5, 0.2, 0.0], 0.0);
        let p = terminal_current(&pm, MosModel::Blended, vt, Polarity::Pmos, 6e-6, 2e-6, [-1.0, -1.5, -0.2, 0.0], 0.0);
        assert!((n.re + p.re).abs() < 1e-18);
        for k in 0..4 {
            assert!((n.eps[k] - p.eps[k]).abs() < 1e-15);
        }
    }

    /// Five-point stencil; small currents need the wider step.
    fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-4;
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    proptest! {
        #[test]
        fn nmos_current_is_monotone(vgs in -0.3f64..1.8, vds in 0.0f64..1.8, vsb in 0.0f64..0.5) {
            let p = nmos();
            for model in [MosModel::Blended, MosModel::SubthresholdOnly] {
                let ss = mos_small_signal(&p, &bias(vgs, vds, vsb), th(), model);
                prop_assert!(ss.gm >= 0.0, "gm {}", ss.gm);
                prop_assert!(ss.gds >= 0.0, "gds {}", ss.gds);
                let f = |x: f64| mos_current(&p, &bias(x, vds, vsb), th(), model);
                prop_assert!(f(vgs + 1e-3) >= f(vgs));
                let g = |x: f64| mos_current(&p, &bias(vgs, x, vsb), th(), model);
                prop_assert!(g(vds + 1e-3) >= g(vds));
            }
        }

        #[test]
        fn conductances_match_finite_differences(
            vgs in -0.2f64..1.8,
            vds in 0.01f64..1.8,
            vsb in 0.0f64..0.6,
        ) {
            let p = nmos();
            let vt = th().v_t;
            let delta = 3.0 * p.n * vt;
            let vth_here = threshold_voltage(&p, &bias(vgs, vds, vsb));
            // stay off the C0 seams where the one-sided slopes differ
            let vov = vgs - vth_here;
            prop_assume!(vov.abs() > 1e-3 && (vov - delta).abs() > 1e-3 && (vds - vov).abs() > 1e-3 && vds > 1e-3);
            let ss = mos_small_signal(&p, &bias(vgs, vds, vsb), th(), MosModel::Blended);
            let gm = central(|x| mos_current(&p, &bias(x, vds, vsb), th(), MosModel::Blended), vgs);
            let gds = central(|x| mos_current(&p, &bias(vgs, x, vsb), th(), MosModel::Blended), vds);
            let gmb = central(|x| mos_current(&p, &bias(vgs, vds, -x), th(), MosModel::Blended), -vsb);
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()) + 1e-30;
            prop_assert!(close(ss.gm, gm), "gm {} fd {}", ss.gm, gm);
            prop_assert!(close(ss.gds, gds), "gds {} fd {}", ss.gds, gds);
            prop_assert!(close(ss.gmb, gmb), "gmb {} fd {}", ss.gmb, gmb);
        }

        #[test]
        fn dibl_and_body_effect_directions(vds in 0.0f64..1.8, vsb in 0.0f64..1.0) {
            let p = DeviceParams { alpha: 1e6, ..nmos() };
            let v = |vds, vsb| threshold_voltage(&p, &BiasPoint { vgs: 0.0, vds, vsb, l: 1e-6, w: 1e-6 });
            prop_assert!(v(vds + 0.01, vsb) <= v(vds, vsb));
            prop_assert!(v(vds, vsb + 0.01) >= v(vds, vsb));
        }
    }
}
