// SPDX-License-Identifier: Apache-2.0

//! Technology files.
//!
//! One `key = value` per line, SI units, `#` starts a comment. Values take
//! the netlist suffixes (`20n`, `100u`). A bare key applies to both
//! polarities; `nmos.key` or `pmos.key` sets one. Global keys are
//! `temperature` and `model` (`blended` or `subthreshold`).
//!
//! ```text
//! n = 1.25
//! t_ox = 20n
//! pmos.kp = 40u
//! ```

use std::path::Path;

use crate::devices::{derive_tech_params, DeviceSpec, MosModel, TechnologyParams, TechnologySpec, ThresholdCharges};
use crate::error::{Error, Result};
use crate::units::parse_value;

pub const DEVICE_KEYS: &[&str] = &[
    "vth0", "gamma", "phi_f", "alpha", "kp", "lambda", "n", "i0", "a_vth", "t_ox", "eps_ox", "eps_si", "n_a", "phi_ms",
    "q_b0", "q_ox", "q_i",
];

pub fn load_config(path: impl AsRef<Path>) -> Result<TechnologyParams> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<TechnologyParams> {
    derive_tech_params(&parse_config_spec(text)?)
}

/// Parses without deriving, so callers can adjust the spec first.
pub fn parse_config_spec(text: &str) -> Result<TechnologySpec> {
    let mut spec = TechnologySpec::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config { line, msg };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();

        match key.as_str() {
            "model" => {
                spec.model = match value.to_ascii_lowercase().as_str() {
                    "blended" => MosModel::Blended,
                    "subthreshold" => MosModel::SubthresholdOnly,
                    other => return Err(err(format!("unknown model `{other}`"))),
                };
                continue;
            }
            "temperature" | "t" => {
                spec.temperature = number(value).map_err(err)?;
                continue;
            }
            _ => {}
        }

        let (targets, name) = match key.split_once('.') {
            Some(("nmos", k)) => (vec![&mut spec.nmos], k),
            Some(("pmos", k)) => (vec![&mut spec.pmos], k),
            Some(_) => return Err(err(format!("unknown key `{key}`"))),
            None => (vec![&mut spec.nmos, &mut spec.pmos], key.as_str()),
        };
        if !DEVICE_KEYS.contains(&name) {
            return Err(err(format!("unknown key `{key}`")));
        }
        let v = number(value).map_err(err)?;
        for d in targets {
            set_device_key(d, name, v);
        }
    }
    Ok(spec)
}

fn number(text: &str) -> std::result::Result<f64, String> {
    parse_value(text).ok_or_else(|| format!("cannot parse number `{text}`"))
}

fn set_device_key(d: &mut DeviceSpec, key: &str, v: f64) {
    let charges = || ThresholdCharges {
        phi_ms: 0.0,
        q_b0: 0.0,
        q_ox: 0.0,
        q_i: 0.0,
    };
    match key {
        "vth0" => d.vth0 = Some(v),
        "gamma" => d.gamma = Some(v),
        "phi_f" => d.phi_f = v,
        "alpha" => d.alpha = v,
        "kp" => d.kp = v,
        "lambda" => d.lambda = v,
        "n" => d.n = v,
        "i0" => d.i0 = v,
        "a_vth" => d.a_vth = v,
        "t_ox" => d.t_ox = v,
        "eps_ox" => d.eps_ox = v,
        "eps_si" => d.eps_si = v,
        "n_a" => d.n_a = Some(v),
        "phi_ms" => d.charges.get_or_insert_with(charges).phi_ms = v,
        "q_b0" => d.charges.get_or_insert_with(charges).q_b0 = v,
        "q_ox" => d.charges.get_or_insert_with(charges).q_ox = v,
        "q_i" => d.charges.get_or_insert_with(charges).q_i = v,
        _ => unreachable!("key list checked by caller"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), TechnologyParams::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), TechnologyParams::default());
    }

    #[test]
    fn plain_key_sets_both_polarities() {
        let p = parse_config("n = 1.4\n").unwrap();
        assert_eq!(p.nmos.n, 1.4);
        assert_eq!(p.pmos.n, 1.4);
        let p = parse_config("n = 1.25").unwrap();
        assert_eq!((p.nmos.n, p.pmos.n), (1.25, 1.25));
    }

    #[test]
    fn prefixed_key_sets_one_polarity() {
        let p = parse_config("pmos.kp = 50u # stronger\n").unwrap();
        assert!((p.pmos.kp - 50e-6).abs() < 1e-18);
        assert_eq!(p.nmos.kp, 100e-6);
    }

    #[test]
    fn oxide_thickness_sets_c_ox() {
        let p = parse_config("t_ox = 20n\n").unwrap();
        // 1.75e-7 F/cm²
        assert!((p.nmos.c_ox * 1e-4 - 1.75e-7).abs() < 1e-20);
    }

    #[test]
    fn doping_and_charges_derive() {
        let p = parse_config("nmos.n_a = 1e23\nnmos.phi_ms = -0.9\nnmos.q_b0 = -1.75m\n").unwrap();
        assert!(p.nmos.gamma > 1.0);
        assert!((p.nmos.vth0 - 0.8).abs() < 1e-12);
        assert_eq!(p.pmos.vth0, 0.4);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("n = 1.25\nbogus = 3\n").unwrap_err();
        assert_eq!(e, Error::Config { line: 2, msg: "unknown key `bogus`".into() });
        assert!(matches!(parse_config("\n\nn 1.25").unwrap_err(), Error::Config { line: 3, .. }));
        assert!(matches!(parse_config("n = abc").unwrap_err(), Error::Config { line: 1, .. }));
        assert!(matches!(parse_config("cmos.n = 1").unwrap_err(), Error::Config { line: 1, .. }));
        assert!(matches!(parse_config("model = level3").unwrap_err(), Error::Config { .. }));
    }

    #[test]
    fn derived_domain_errors_surface() {
        assert!(matches!(parse_config("t_ox = 0").unwrap_err().root(), Error::Domain(_)));
    }
}
