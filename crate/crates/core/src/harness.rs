//! Agreement between computed zeros and predicted attractors, between exact
//! values and the leading-order estimates, and between the sampled phase
//! picture and the traced curves.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::AttractorSet;
use crate::error::{Error, Result};
use crate::partition::{eval, generate_one, ExponentSequence};
use crate::phase::{asymptotic_estimate, candidate_functions, classify_with, PhaseIndex, PhaseSample};
use crate::roots::RootSet;
use crate::specfun::{complex, PrecisionPolicy};

/// Default radius below which zeros count as interior.
pub const DEFAULT_INNER_CUT: f64 = 0.95;

/// Largest number of points a phase grid may hold.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    (p.0 - a.0 - t * dx).hypot(p.1 - a.1 - t * dy)
}

/// Distance from `p` to a polyline (a single point counts as a degenerate segment).
pub fn point_polyline_distance(p: (f64, f64), line: &[(f64, f64)]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [a] => (p.0 - a.0).hypot(p.1 - a.1),
        _ => line.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min),
    }
}

/// Polylines of an attractor, prepared for repeated distance queries.
#[derive(Debug, Clone)]
pub struct AttractorGeometry {
    /// Whether the unit circle belongs to the set.
    pub circle: bool,
    pub polylines: Vec<Vec<(f64, f64)>>,
}

impl AttractorGeometry {
    pub fn new(set: &AttractorSet) -> Self {
        AttractorGeometry { circle: true, polylines: set.polylines() }
    }

    /// The set without the unit circle.
    pub fn without_circle(set: &AttractorSet) -> Self {
        AttractorGeometry { circle: false, polylines: set.polylines() }
    }

    /// Distance from `p` to the set: `||p| - 1|` for the circle, segment-wise for polylines.
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        let circle = if self.circle { (p.0.hypot(p.1) - 1.0).abs() } else { f64::INFINITY };
        self.polylines.iter().map(|l| point_polyline_distance(p, l)).fold(circle, f64::min)
    }
}

/// Distance from `z` to the attractor including its unit circle.
pub fn point_to_set_distance(z: (f64, f64), attractor: &AttractorSet) -> f64 {
    AttractorGeometry::new(attractor).distance(z)
}

/// Summary of distances from a point set to an attractor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub n: u64,
    pub count_inside: usize,
    pub median_distance: f64,
    pub mean_distance: f64,
    pub max_distance: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Distance statistics for the points with `|z| <= inner_radius_cut`.
pub fn distance_profile(
    n: u64,
    points: &[(f64, f64)],
    geometry: &AttractorGeometry,
    inner_radius_cut: f64,
) -> Result<DistanceSummary> {
    let mut d: Vec<f64> = points
        .par_iter()
        .filter(|p| p.0.hypot(p.1) <= inner_radius_cut)
        .map(|&p| geometry.distance(p))
        .collect();
    if d.is_empty() {
        return Err(Error::EmptySelection(format!("no points with |z| <= {inner_radius_cut}")));
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let max = d.iter().copied().fold(0.0, f64::max);
    Ok(DistanceSummary {
        n,
        count_inside: d.len(),
        median_distance: median(&mut d),
        mean_distance: mean,
        max_distance: max,
    })
}

/// One-sided distances from the interior zeros of `roots` to `attractor`.
pub fn directed_distance_profile(
    roots: &RootSet,
    attractor: &AttractorSet,
    inner_radius_cut: f64,
) -> Result<DistanceSummary> {
    distance_profile(roots.n, &roots.roots_f64(), &AttractorGeometry::new(attractor), inner_radius_cut)
}

/// `count` points uniformly distributed in the disk of the given radius.
pub fn uniform_disk_points(count: usize, radius: f64, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = rng.random_range(0.0..2.0 * PI);
            (r * t.cos(), r * t.sin())
        })
        .collect()
}

/// Median of `|arg z - nearest spoke angle|` for the zeros with `lo <= |z| <= hi`,
/// where spokes sit at `pi (2j + 1) / p`.
pub fn spoke_angular_deviation(roots: &[(f64, f64)], p: u64, lo: f64, hi: f64) -> Result<f64> {
    let sector = 2.0 * PI / p as f64;
    let mut dev: Vec<f64> = roots
        .iter()
        .filter(|z| (lo..=hi).contains(&z.0.hypot(z.1)))
        .map(|z| {
            let shifted = (z.1.atan2(z.0) - PI / p as f64).rem_euclid(sector);
            shifted.min(sector - shifted)
        })
        .collect();
    if dev.is_empty() {
        return Err(Error::EmptySelection(format!("no zeros with {lo} <= |z| <= {hi}")));
    }
    Ok(median(&mut dev))
}

/// `|ln|F_n(z)| - ln|estimate(z, n)|| / sqrt(n)` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticCheck {
    pub z: (f64, f64),
    pub n: u64,
    pub winner: PhaseIndex,
    pub log_error: f64,
}

/// Log errors of the leading-order estimate at each point and weight.
///
/// Weights must be strictly increasing; points on a phase boundary are rejected.
pub fn asymptotic_report(
    seq: &ExponentSequence,
    points: &[(f64, f64)],
    weights: &[u64],
    policy: &PrecisionPolicy,
) -> Result<Vec<AsymptoticCheck>> {
    check_weights(weights)?;
    let functions = candidate_functions(seq)?;
    let polys: Vec<_> = weights.iter().map(|&n| generate_one(seq, n)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(points.len() * weights.len());
    for &(x, y) in points {
        let z = complex(x, y, policy.bits());
        let verdict = classify_with(&functions, &z, crate::phase::DEFAULT_BOUNDARY_TOL, policy)?;
        if verdict.tie {
            return Err(Error::Domain(format!("({x}, {y}) lies on a phase boundary")));
        }
        for poly in &polys {
            let n = poly.n();
            let exact = eval(poly, &z, policy)?;
            let estimate = asymptotic_estimate(seq, verdict.winner, n, &z, policy)?;
            let ln_exact = rug::Float::with_val(policy.bits(), exact.abs_ref()).ln().to_f64();
            let ln_est = rug::Float::with_val(policy.bits(), estimate.abs_ref()).ln().to_f64();
            out.push(AsymptoticCheck {
                z: (x, y),
                n,
                winner: verdict.winner,
                log_error: (ln_exact - ln_est).abs() / (n as f64).sqrt(),
            });
        }
    }
    Ok(out)
}

fn check_weights(weights: &[u64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Domain("at least one weight is needed".into()));
    }
    if weights.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("weights must be strictly increasing".into()));
    }
    Ok(())
}

/// Distance and asymptotic statistics for one family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub weights: Vec<u64>,
    pub per_n: Vec<DistanceSummary>,
    pub asymptotic_checks: Vec<AsymptoticCheck>,
}

impl ConvergenceReport {
    /// Assembles a report; `per_n` must follow `weights`.
    pub fn new(
        seq: &ExponentSequence,
        weights: Vec<u64>,
        per_n: Vec<DistanceSummary>,
        asymptotic_checks: Vec<AsymptoticCheck>,
    ) -> Result<Self> {
        check_weights(&weights)?;
        if per_n.iter().map(|s| s.n).ne(weights.iter().copied()) && !per_n.is_empty() {
            return Err(Error::Domain("distance summaries do not match the weights".into()));
        }
        Ok(ConvergenceReport { family: seq.label(), weights, per_n, asymptotic_checks })
    }

    /// Whether the median distance strictly decreases with `n`.
    pub fn median_strictly_decreasing(&self) -> bool {
        self.per_n.windows(2).all(|w| w[1].median_distance < w[0].median_distance)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Winners on a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub radial: usize,
    pub angular: usize,
    /// Row-major by radius, then angle.
    pub samples: Vec<PhaseSample>,
    /// `max(dr, r_max dt)`.
    pub spacing: f64,
}

impl PhaseGrid {
    fn at(&self, i: usize, j: usize) -> &PhaseSample {
        &self.samples[i * self.angular + j]
    }

    /// Ties, plus midpoints between angular or radial neighbours with different winners.
    pub fn boundary_cloud(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 0..self.radial {
            for j in 0..self.angular {
                let s = self.at(i, j);
                if s.tie {
                    out.push((s.re, s.im));
                    continue;
                }
                let mut neighbours = vec![self.at(i, (j + 1) % self.angular)];
                if i + 1 < self.radial {
                    neighbours.push(self.at(i + 1, j));
                }
                for t in neighbours {
                    if !t.tie && (t.winner_k, t.winner_h) != (s.winner_k, s.winner_h) {
                        out.push((0.5 * (s.re + t.re), 0.5 * (s.im + t.im)));
                    }
                }
            }
        }
        out
    }

    /// Largest distance from a boundary-cloud point to `geometry`.
    pub fn boundary_deviation(&self, geometry: &AttractorGeometry) -> f64 {
        self.boundary_cloud().par_iter().map(|&p| geometry.distance(p)).reduce(|| 0.0, f64::max)
    }
}

/// Classifies `z = r_i e^{i t_j}` with `r_i = (i + 1/2) / radial`, `t_j = 2 pi j / angular`.
pub fn phase_grid(
    seq: &ExponentSequence,
    radial: usize,
    angular: usize,
    boundary_tol: f64,
    policy: &PrecisionPolicy,
) -> Result<PhaseGrid> {
    if radial == 0 || angular == 0 {
        return Err(Error::Domain("grid resolution must be positive".into()));
    }
    if radial.saturating_mul(angular) > MAX_GRID_POINTS {
        return Err(Error::Resource(format!(
            "{radial} x {angular} grid exceeds the limit of {MAX_GRID_POINTS} points"
        )));
    }
    let functions = candidate_functions(seq)?;
    let nodes: Vec<(usize, usize)> = (0..radial).flat_map(|i| (0..angular).map(move |j| (i, j))).collect();
    let samples = nodes
        .par_iter()
        .map(|&(i, j)| {
            let r = (i as f64 + 0.5) / radial as f64;
            let t = 2.0 * PI * j as f64 / angular as f64;
            let (x, y) = (r * t.cos(), r * t.sin());
            let v = classify_with(&functions, &complex(x, y, policy.bits()), boundary_tol, policy)?;
            Ok(PhaseSample {
                re: x,
                im: y,
                winner_k: v.winner.k,
                winner_h: v.winner.h,
                margin: v.margin,
                tie: v.tie,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dr = 1.0 / radial as f64;
    let dt = 2.0 * PI / angular as f64;
    Ok(PhaseGrid { radial, angular, samples, spacing: dr.max(dt) })
}

/// CSV point cloud `re,im,label` for external plotting.
pub fn write_point_cloud_csv<W: Write>(points: &[(f64, f64, String)], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["re", "im", "label"])?;
    for (x, y, label) in points {
        writer.write_record([format!("{x:.17e}"), format!("{y:.17e}"), label.clone()])?;
    }
    writer.flush()?;
    Ok(())
}
