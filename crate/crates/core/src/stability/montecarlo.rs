// SPDX-License-Identifier: Apache-2.0

//! Static noise margin under random threshold mismatch.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::butterfly::{ButterflyBench, Mode};
use super::sigma_vth;
use crate::devices::TechnologyParams;
use crate::engine::write_csv;
use crate::error::{Error, Result};
use crate::netlist::Netlist;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationModel {
    /// Mismatch coefficient in V·m.
    pub a_vth: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Equal-width bins spanning `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

const BINS: usize = 20;
/// Largest tolerated share of failed samples.
const MAX_FAILURE_RATE: f64 = 0.1;

impl Histogram {
    fn of(values: &[f64], min: f64, max: f64) -> Self {
        let width = (max - min) / BINS as f64;
        let edges = (0..=BINS).map(|k| min + width * k as f64).collect();
        let mut counts = vec![0; BINS];
        for &v in values {
            let k = if width > 0.0 { ((v - min) / width) as usize } else { 0 };
            counts[k.min(BINS - 1)] += 1;
        }
        Histogram { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub nominal: f64,
    /// Nominal `(snm_high, snm_low)`.
    pub nominal_lobes: (f64, f64),
    /// SNM of each successful sample, in sample order.
    pub values: Vec<f64>,
    /// `(snm_high, snm_low)` of each successful sample.
    pub lobes: Vec<(f64, f64)>,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
    pub failures: usize,
    pub samples: usize,
}

impl MonteCarloSummary {
    /// `snm_high, snm_low, snm` per successful sample.
    pub fn to_csv(&self) -> String {
        let header = ["snm_high", "snm_low", "snm"].map(String::from).to_vec();
        write_csv(header, self.lobes.iter().map(|&(h, l)| vec![h, l, h.min(l)]))
    }

    fn new(nominal: (f64, f64), lobes: Vec<(f64, f64)>, samples: usize) -> Self {
        let values: Vec<f64> = lobes.iter().map(|&(h, l)| h.min(l)).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        MonteCarloSummary {
            nominal: nominal.0.min(nominal.1),
            nominal_lobes: nominal,
            lobes,
            histogram: Histogram::of(&values, min, max),
            failures: samples - values.len(),
            samples,
            mean,
            stddev: var.sqrt(),
            min,
            max,
            values,
        }
    }
}

/// Runs `vm.samples` butterflies, each with every transistor's threshold
/// shifted by an independent normal draw of standard deviation
/// `sigma_vth(a_vth, W, L)`. Sample `k` draws from stream `k` of a ChaCha
/// generator seeded with `vm.seed`, so results do not depend on scheduling.
pub fn monte_carlo_snm(
    cell: &Netlist,
    params: &TechnologyParams,
    vm: &VariationModel,
    mode: Mode,
    vdd: f64,
    grid: f64,
) -> Result<MonteCarloSummary> {
    if vm.samples == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    if !(vm.a_vth >= 0.0) {
        return Err(Error::Domain(format!("A_Vth must be non-negative, got {}", vm.a_vth)));
    }
    let mut bench = ButterflyBench::new(cell, params, mode, vdd)?;
    let nominal = bench.run(grid)?;
    let devices: Vec<(String, f64)> = cell
        .mosfets()
        .filter(|m| !m.is_degenerate())
        .map(|m| {
            if m.w * m.l > 0.0 {
                Ok((m.id.clone(), sigma_vth(vm.a_vth, m.w, m.l)))
            } else {
                Err(Error::Domain(format!("{} has zero area", m.id)))
            }
        })
        .collect::<Result<_>>()?;

    let results: Vec<Option<(f64, f64)>> = (0..vm.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(vm.seed);
            rng.set_stream(k as u64);
            let mut b = bench.clone();
            for (id, sigma) in &devices {
                let dv = if *sigma > 0.0 {
                    Normal::new(0.0, *sigma).expect("positive sigma").sample(&mut rng)
                } else {
                    0.0
                };
                b.circuit.set_vth_shift(id, dv).ok()?;
            }
            b.run(grid).ok().map(|d| (d.snm_high, d.snm_low))
        })
        .collect();

    let lobes: Vec<(f64, f64)> = results.into_iter().flatten().collect();
    let failed = vm.samples - lobes.len();
    if failed as f64 > MAX_FAILURE_RATE * vm.samples as f64 || lobes.is_empty() {
        return Err(Error::TooManyFailures {
            failed,
            total: vm.samples,
        });
    }
    Ok(MonteCarloSummary::new((nominal.snm_high, nominal.snm_low), lobes, vm.samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlib::{build_6t_cell, CellGeometry};

    fn cell() -> Netlist {
        build_6t_cell(&CellGeometry::default(), None)
    }

    fn run(a_vth: f64, samples: usize, seed: u64) -> MonteCarloSummary {
        let vm = VariationModel { a_vth, samples, seed };
        monte_carlo_snm(&cell(), &TechnologyParams::default(), &vm, Mode::Hold, 1.8, 0.01).unwrap()
    }

    #[test]
    fn zero_mismatch_reproduces_nominal() {
        let s = run(0.0, 8, 1);
        assert!(s.values.iter().all(|&v| v == s.nominal));
        assert!(s.stddev < 1e-12);
        assert_eq!(s.histogram.counts.iter().sum::<usize>(), 8);
    }

    #[test]
    fn same_seed_same_summary() {
        let a = run(5e-9, 12, 42);
        let b = run(5e-9, 12, 42);
        assert_eq!(a, b);
        let c = run(5e-9, 12, 43);
        assert_ne!(a.values, c.values);
    }

    fn mean_sd(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
        let n = v.clone().count() as f64;
        let m = v.clone().sum::<f64>() / n;
        (m, (v.map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
    }

    #[test]
    fn mean_is_consistent_with_nominal() {
        let s = run(5e-9, 200, 7);
        assert_eq!(s.failures, 0);
        let n = s.values.len() as f64;
        // each lobe is unbiased
        let (hm, hs) = mean_sd(s.lobes.iter().map(|l| l.0));
        let (lm, ls) = mean_sd(s.lobes.iter().map(|l| l.1));
        assert!((hm - s.nominal_lobes.0).abs() <= 4.0 * hs / n.sqrt(), "{hm}");
        assert!((lm - s.nominal_lobes.1).abs() <= 4.0 * ls / n.sqrt(), "{lm}");
        // the minimum of two lobes sits below nominal by up to σ/√π
        let bias = s.nominal - s.mean;
        let limit = hs.max(ls) / std::f64::consts::PI.sqrt() + 4.0 * s.stddev / n.sqrt();
        assert!(bias > -4.0 * s.stddev / n.sqrt() && bias <= limit, "bias {bias} limit {limit}");
        assert!(s.min <= s.mean && s.mean <= s.max);
    }

    #[test]
    fn histogram_counts_every_value() {
        let h = Histogram::of(&[0.0, 0.5, 1.0, 1.0], 0.0, 1.0);
        assert_eq!(h.edges.len(), BINS + 1);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[BINS / 2], 1);
        assert_eq!(h.counts[BINS - 1], 2);
    }

    #[test]
    fn rejects_empty_run() {
        let vm = VariationModel { a_vth: 1e-9, samples: 0, seed: 0 };
        assert!(monte_carlo_snm(&cell(), &TechnologyParams::default(), &vm, Mode::Hold, 1.8, 0.01).is_err());
    }
}
