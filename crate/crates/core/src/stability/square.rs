// SPDX-License-Identifier: Apache-2.0

//! Largest square inscribed in each lobe of a butterfly plot.
//!
//! Both curves are parametrised by `u = x − y`. A square whose diagonal
//! runs from `(x, y)` to `(x + s, y + s)` keeps `u` fixed, so the side of
//! the largest square in a lobe is the largest separation of the curves
//! along those 45° lines.

use crate::engine::TransferCurve;

/// Square sizes for both lobes. Anchors are lower-left corners.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFit {
    pub snm_high: f64,
    pub snm_low: f64,
    pub anchor_high: Option<(f64, f64)>,
    pub anchor_low: Option<(f64, f64)>,
    /// `u` of every place the curves cross, ascending.
    pub crossings: Vec<f64>,
}

impl SquareFit {
    pub fn snm(&self) -> f64 {
        self.snm_high.min(self.snm_low)
    }
}

/// A curve's points ordered by `u = x − y`.
struct Rotated {
    u: Vec<f64>,
    pts: Vec<(f64, f64)>,
}

impl Rotated {
    fn new(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut pts: Vec<(f64, f64)> = points.collect();
        pts.sort_by(|a, b| (a.0 - a.1).total_cmp(&(b.0 - b.1)));
        Rotated {
            u: pts.iter().map(|(x, y)| x - y).collect(),
            pts,
        }
    }

    /// Point of the curve on the line `x − y = u`. Sample points are
    /// returned unchanged so that exact inputs give exact squares.
    fn at(&self, u: f64) -> (f64, f64) {
        let k = self.u.partition_point(|&v| v < u);
        if k == self.u.len() {
            return self.pts[k - 1];
        }
        if k == 0 || self.u[k] == u {
            return self.pts[k];
        }
        let t = (u - self.u[k - 1]) / (self.u[k] - self.u[k - 1]);
        let (a, b) = (self.pts[k - 1], self.pts[k]);
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }
}

/// Squares between inverter A's forward curve `(x, fA(x))` and inverter B's
/// mirrored curve `(fB(y), y)`.
///
/// On a line `x − y = u` the two curves are a square's diagonal apart, so
/// the side is the difference of their `x` coordinates. The metastable
/// point is the median crossing. The high lobe is where A lies above B to
/// its left, the low lobe where B lies above A to its right; a cell whose
/// curves only cross once therefore gets zero.
pub fn inscribed_squares(curve_a: &TransferCurve, curve_b: &TransferCurve) -> SquareFit {
    let a = Rotated::new(curve_a.points());
    let b = Rotated::new(curve_b.points().map(|(y, fy)| (fy, y)));
    let lo = a.u[0].max(b.u[0]);
    let hi = a.u[a.u.len() - 1].min(b.u[b.u.len() - 1]);

    let mut us: Vec<f64> = a.u.iter().chain(&b.u).copied().filter(|u| (lo..=hi).contains(u)).collect();
    us.sort_by(f64::total_cmp);
    us.dedup();

    let gaps: Vec<f64> = us.iter().map(|&u| a.at(u).0 - b.at(u).0).collect();

    // sign changes between consecutive non-zero gaps
    let mut crossings = Vec::new();
    let mut last: Option<usize> = None;
    for (k, &g) in gaps.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        if let Some(p) = last {
            if gaps[p].signum() != g.signum() {
                let u = if k == p + 1 {
                    us[p] + (us[k] - us[p]) * gaps[p] / (gaps[p] - g)
                } else {
                    0.5 * (us[p + 1] + us[k - 1])
                };
                crossings.push(u);
            }
        }
        last = Some(k);
    }
    let meta = crossings.get(crossings.len() / 2).copied();

    let best = |sign: f64, keep: &dyn Fn(f64) -> bool| {
        us.iter()
            .zip(&gaps)
            .filter(|(u, _)| keep(**u))
            .map(|(u, g)| (*u, sign * g))
            .filter(|&(_, g)| g > 0.0)
            .max_by(|a, b| a.1.total_cmp(&b.1))
    };
    let (high, low) = match meta {
        Some(m) => (best(1.0, &|u| u <= m), best(-1.0, &|u| u >= m)),
        None => (best(1.0, &|_| true), best(-1.0, &|_| true)),
    };
    // lower-left corner lies on the lower curve of the lobe
    SquareFit {
        snm_high: high.map_or(0.0, |(_, g)| g),
        snm_low: low.map_or(0.0, |(_, g)| g),
        anchor_high: high.map(|(u, _)| b.at(u)),
        anchor_low: low.map(|(u, _)| a.at(u)),
        crossings,
    }
}
