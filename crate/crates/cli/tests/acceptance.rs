// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sramlab_core::devices::TechnologyParams;
use sramlab_core::engine::{transient, Circuit, TransientOptions};
use sramlab_core::genlib::{build_6t_cell, CellGeometry};
use sramlab_core::metrics::{check_ratios, DelayMeasurement};
use sramlab_core::netlist::{parse_netlist, print_netlist};
use sramlab_core::stability::{
    butterfly, drv_bruteforce, drv_closed_form, ideal_inverter, inscribed_squares, monte_carlo_snm, sigma_vth, DrvInputs, Mode,
    VariationModel,
};

type Verdict = Result<String, String>;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/corpus").join(name)
}

fn sramlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sramlab"))
        .args(args)
        .output()
        .expect("run sramlab")
}

/// Value of `name` in a report printed on stdout.
fn reported(out: &Output, name: &str) -> Option<f64> {
    String::from_utf8_lossy(&out.stdout).lines().find_map(|l| {
        let mut f = l.split_whitespace();
        (f.next() == Some(name)).then(|| f.next()?.parse().ok()).flatten()
    })
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn dynamic_power() -> Verdict {
    let t = Instant::now();
    let out = sramlab(&["power", "--cl", "35f", "--vdd", "1.8", "--fsw", "100meg"]);
    within(t.elapsed(), Duration::from_secs(1))?;
    let p = reported(&out, "dynamic_power").ok_or("no dynamic_power line")?;
    if p == 6.3e-6 {
        Ok(format!("{p:e} W"))
    } else {
        Err(format!("reported {p:e} W, expected 6.3e-6 W"))
    }
}

fn delay_arithmetic() -> Verdict {
    // edge times in ns
    let first = DelayMeasurement::from_edges(12.01, 12.15).t_p;
    let second = DelayMeasurement::from_edges(11.89, 12.09).t_p;
    if first == 12.08 && second == 11.99 {
        Ok(format!("{first} ns, {second} ns"))
    } else {
        Err(format!("{first} ns, {second} ns"))
    }
}

fn ratios() -> Verdict {
    let g = CellGeometry::default();
    let r = check_ratios([g.pd; 2], [g.pu; 2], [g.pg; 2]).map_err(|e| e.to_string())?;
    let ok = (r.pr_left - 1.25).abs() <= 1e-9
        && (r.pr_right - 1.25).abs() <= 1e-9
        && (r.cr_left - 0.714).abs() <= 1e-3
        && (r.cr_right - 0.714).abs() <= 1e-3
        && !r.read_stable
        && !r.write_stable;
    let detail = format!(
        "PR {} CR {} read_stable {} write_stable {}",
        r.pr_left, r.cr_left, r.read_stable, r.write_stable
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn drv_ideal_case() -> Verdict {
    let drv = drv_closed_form(&DrvInputs::matched(1e-12, 1.0, 0.026)).map_err(|e| e.to_string())?;
    let detail = format!("{:.3} mV", drv * 1e3);
    if (drv - 0.036).abs() <= 1e-4 {
        Ok(detail)
    } else {
        Err(format!("{detail}, expected 36.0 mV +- 0.1 mV"))
    }
}

fn parser_corpus() -> Verdict {
    let t = Instant::now();
    let mut detail = Vec::new();
    for (file, nodes, elements) in [("cell_extract.sp", Some(6), 10), ("array_extract.sp", None, 79)] {
        let path = corpus(file);
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let n = parse_netlist(&text).map_err(|e| format!("{file}: {e}"))?;
        if n.element_count() != elements || nodes.is_some_and(|k| n.node_count() != k) {
            return Err(format!("{file}: {} nodes, {} elements", n.node_count(), n.element_count()));
        }
        let trailer_ok = n.declared_node_count() == Some(n.node_count()) && n.declared_element_count() == Some(n.element_count());
        if !trailer_ok && n.count_warnings().is_empty() {
            return Err(format!("{file}: trailer mismatch without a warning"));
        }
        let once = print_netlist(&n);
        let again = parse_netlist(&once).map_err(|e| format!("{file} reprint: {e}"))?;
        if again != n || print_netlist(&again) != once {
            return Err(format!("{file}: round trip not stable"));
        }
        let out = sramlab(&["parse", path.to_str().expect("utf-8 path")]);
        if !out.status.success() || reported(&out, "elements") != Some(elements as f64) {
            return Err(format!("{file}: cli parse failed"));
        }
        detail.push(format!("{file} {}/{}", n.node_count(), n.element_count()));
    }
    within(t.elapsed(), Duration::from_secs(1))?;
    Ok(detail.join(", "))
}

fn random_circuit(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::from("VDD n0 0 1.8\nR0 n0 n1 10k\nR1 n1 n2 10k\nR2 n2 0 10k\nR3 n1 n3 20k\nR4 n3 0 30k\n");
    for k in 0..rng.random_range(1..5) {
        let mut node = || format!("n{}", rng.random_range(0..4));
        let (d, g, src) = (node(), node(), node());
        let line = if rng.random_bool(0.5) {
            format!("M{k} {d} {g} {src} 0 NMOS L=2u W=6u\n")
        } else {
            format!("M{k} {d} {g} {src} n0 PMOS L=2u W=10u\n")
        };
        s.push_str(&line);
    }
    s
}

fn engine_oracle() -> Verdict {
    let t = Instant::now();
    let params = TechnologyParams::default();
    // RC = 1 ns
    let rc = parse_netlist("V1 in 0 PWL(0 0 1e-15 1)\nR1 in out 1k\nC1 out 0 1p\n").map_err(|e| e.to_string())?;
    let w = transient(&rc, &params, &TransientOptions::new(1e-9, 1e-12)).map_err(|e| e.to_string())?;
    let v = *w.node("out").and_then(|v| v.last()).ok_or("no output")?;
    let exact = 1.0 - (-1.0f64).exp();
    let rel = (v - exact).abs() / exact;
    if rel >= 0.01 {
        return Err(format!("RC step {v} vs {exact}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let c = Circuit::new(&parse_netlist(&random_circuit(&mut rng)).map_err(|e| e.to_string())?, &params)
            .map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..c.size()).map(|_| rng.random_range(-0.2..2.0)).collect();
        let j = c.jacobian(&x);
        let f0 = c.residual(&x);
        let h = 1e-6;
        for col in 0..c.size() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[col] += h;
            xm[col] -= h;
            let fd = (c.residual(&xp) - c.residual(&xm)) / (2.0 * h);
            for row in 0..c.size() {
                let (a, b) = (j[(row, col)], fd[row]);
                // rounding floor of the difference quotient
                let noise = 4.0 * f64::EPSILON * f0[row].abs() / h + 1e-12;
                let err = ((a - b).abs() - noise).max(0.0) / a.abs().max(b.abs()).max(1e-300);
                worst = worst.max(err);
            }
        }
    }
    if worst > 1e-5 {
        return Err(format!("Jacobian relative error {worst:e}"));
    }
    within(t.elapsed(), Duration::from_secs(10))?;
    Ok(format!("RC error {:.3}%, worst Jacobian error {worst:.1e}", rel * 100.0))
}

fn butterfly_properties() -> Verdict {
    let t = Instant::now();
    let e = |e: sramlab_core::Error| e.to_string();
    let ideal = inscribed_squares(&ideal_inverter(1.8), &ideal_inverter(1.8)).snm();
    if ideal != 0.9 {
        return Err(format!("ideal inverter SNM {ideal}"));
    }
    let p = TechnologyParams::default();
    let cell = build_6t_cell(&CellGeometry::default(), None);
    let grid = 1e-3;
    let hold = butterfly(&cell, &p, Mode::Hold, 1.8, grid).map_err(e)?;
    if (hold.snm_high - hold.snm_low).abs() > 2.0 * grid {
        return Err(format!("lobes {} and {}", hold.snm_high, hold.snm_low));
    }
    let read = butterfly(&cell, &p, Mode::Read, 1.8, grid).map_err(e)?;
    if read.snm > hold.snm {
        return Err(format!("read SNM {} above hold SNM {}", read.snm, hold.snm));
    }
    let drv = drv_bruteforce(&cell, &p).map_err(e)?;
    let mut last = 0.0;
    let mut vdd = drv;
    while vdd <= 1.8 + 1e-12 {
        let snm = butterfly(&cell, &p, Mode::Hold, vdd, grid).map_err(e)?.snm;
        if snm < last {
            return Err(format!("SNM fell to {snm} at {vdd} V"));
        }
        last = snm;
        vdd += 0.05;
    }
    within(t.elapsed(), Duration::from_secs(60))?;
    Ok(format!("hold {:.4} V, read {:.4} V, monotone from {drv:.4} V", hold.snm, read.snm))
}

fn drv_cross_check() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sub.cfg");
    std::fs::write(&config, "model = subthreshold\n").map_err(|e| e.to_string())?;
    let out = sramlab(&["drv", "--config", config.to_str().expect("utf-8 path")]);
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let closed = reported(&out, "drv_closed_form").ok_or("no closed form")?;
    let brute = reported(&out, "drv_bruteforce").ok_or("no search result")?;
    let line = text.lines().find(|l| l.starts_with("drv_difference")).ok_or("difference not reported")?;
    let detail = format!("closed {:.2} mV, search {:.2} mV", closed * 1e3, brute * 1e3);
    if (closed - brute).abs() <= 0.02 && line.ends_with("PASS") {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn monte_carlo() -> Verdict {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = sramlab(&["montecarlo", "--samples", "200", "--seed", "7", "--out", path.to_str().expect("utf-8 path")]);
        (out, std::fs::read(path).unwrap_or_default())
    };
    let (a, csv_a) = run("a.csv");
    let (b, csv_b) = run("b.csv");
    within(t.elapsed(), Duration::from_secs(300))?;
    if !a.status.success() || a.stdout != b.stdout || csv_a.is_empty() || csv_a != csv_b {
        return Err("repeated runs differ".into());
    }
    let p = TechnologyParams::default();
    let cell = build_6t_cell(&CellGeometry::default(), None);
    let vm = VariationModel { a_vth: 0.0, samples: 16, seed: 7 };
    let s = monte_carlo_snm(&cell, &p, &vm, Mode::Hold, 1.8, 1e-3).map_err(|e| e.to_string())?;
    if s.values.iter().any(|v| (v - s.nominal).abs() > 1e-12) {
        return Err(format!("A_Vth = 0 spread {} to {}", s.min, s.max));
    }
    let ratio = sigma_vth(5e-9, 4.0 * 6e-6, 4.0 * 2e-6) / sigma_vth(5e-9, 6e-6, 2e-6);
    if (ratio - 0.25).abs() > 1e-12 {
        return Err(format!("sigma ratio {ratio}"));
    }
    Ok(format!("{} byte-identical CSV, zero-mismatch exact, sigma ratio {ratio}", csv_a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("dynamic power", dynamic_power),
        ("propagation delay arithmetic", delay_arithmetic),
        ("ratio ledger", ratios),
        ("DRV ideal case", drv_ideal_case),
        ("parser corpus", parser_corpus),
        ("engine oracle", engine_oracle),
        ("butterfly properties", butterfly_properties),
        ("DRV cross-check", drv_cross_check),
        ("Monte Carlo", monte_carlo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
