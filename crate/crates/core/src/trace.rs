//! Shrinking-ball traces of interior functions at boundary points.

use crate::error::{Error, Result};
use crate::extension::ExtensionResult;
use crate::geometry::Point;
use crate::norms::FieldFn;
use crate::space::{Discretization, Support};
use crate::sum;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Boundary-ball radius factor of the oscillation functional.
pub const OSCILLATION_FACTOR: f64 = 128.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Interior samples a ball needs to be admissible.
    pub n_min: usize,
    /// Oscillation of the reference data; the tolerance is
    /// `max(0.05·osc, 10·floor)`.
    pub osc: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { n_min: 20, osc: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub z_id: usize,
    /// Mean of `u` over the smallest admissible ball.
    pub value: f64,
    /// Admissible radii, decreasing.
    pub radii: Vec<f64>,
    /// `⨍_{B(z, r_m) ∩ Ω} |u − Tu(z)| dμ` for each admissible radius.
    pub residuals: Vec<f64>,
    pub final_residual: f64,
    /// Log-log slope over three of the finest residuals, when all are positive.
    pub slope: Option<f64>,
    pub tolerance: f64,
    pub converged: bool,
}

/// Interior samples in the open ball `B(z, r)`, ascending.
fn ball_members(disc: &Discretization, z: Point, r: f64) -> Vec<usize> {
    let mut m = Vec::new();
    disc.interior_index().for_each_within(z, r, |i, d| {
        if d < r {
            m.push(i);
        }
    });
    m.sort_unstable();
    m
}

fn weighted_mean(ids: &[usize], w: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mass = sum::sum(ids.iter().map(|&i| w[i]));
    sum::sum(ids.iter().map(|&i| w[i] * f(i))) / mass
}

/// Least-squares slope of `ln y` against `ln x`.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Trace candidate and residual sequence of `u` at boundary sample `z`.
pub fn trace_at(u: &FieldFn, disc: &Discretization, z: usize, radii: &[f64], opts: &TraceOptions) -> Result<TraceEntry> {
    u.check(disc, Some(Support::Interior))?;
    if z >= disc.n_boundary() {
        return Err(Error::IndexOutOfRange {
            index: z,
            len: disc.n_boundary(),
        });
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::NotDecreasing);
    }
    let zp = disc.boundary_points()[z];
    let balls: Vec<(f64, Vec<usize>)> = radii
        .iter()
        .map(|&r| (r, ball_members(disc, zp, r)))
        .filter(|(_, m)| m.len() >= opts.n_min)
        .collect();
    let Some((_, smallest)) = balls.last() else {
        return Err(Error::Unresolvable(z));
    };
    let w = disc.mu_weights();
    let v = u.values();
    // mean of the deviations from one member, so constant data comes back exactly
    let pivot = v[smallest[0]];
    let value = pivot + weighted_mean(smallest, w, |i| v[i] - pivot);
    let residuals: Vec<f64> = balls
        .iter()
        .map(|(_, m)| weighted_mean(m, w, |i| (v[i] - value).abs()))
        .collect();
    let floor = 1e-9 * v.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let tolerance = (0.05 * opts.osc).max(10.0 * floor);
    let final_residual = *residuals.last().unwrap();
    let tail = &residuals[residuals.len().saturating_sub(3)..];
    let nonincreasing = tail.windows(2).all(|p| p[1] <= p[0] + floor);
    let admissible: Vec<f64> = balls.iter().map(|(r, _)| *r).collect();
    // the finest residual is taken about its own mean, which biases it low;
    // leave it out of the fit when three coarser ones exist
    let end = if residuals.len() >= 4 { residuals.len() - 1 } else { residuals.len() };
    let fit = end.saturating_sub(3)..end;
    let slope = (end >= 3 && residuals[fit.clone()].iter().all(|e| *e > 0.0))
        .then(|| loglog_slope(&admissible[fit.clone()], &residuals[fit]));
    Ok(TraceEntry {
        z_id: z,
        value,
        radii: admissible,
        residuals,
        final_residual,
        slope,
        tolerance,
        converged: nonincreasing && final_residual <= tolerance,
    })
}

/// Radii `r₀·2^{−m}` from `r₀ = diam/10` for `count` steps, or, with `r_min`
/// given, the dyadic multiples `r_min·2^m ≤ diam/10` in decreasing order.
pub fn trace_radii(disc: &Discretization, r_min: Option<f64>, count: usize) -> Vec<f64> {
    let r0 = disc.diam() / 10.0;
    match r_min {
        None => (0..count).map(|m| r0 * 2f64.powi(-(m as i32))).collect(),
        Some(r) => {
            let mut out = vec![r];
            while out.last().unwrap() * 2.0 <= r0 {
                out.push(out.last().unwrap() * 2.0);
            }
            out.reverse();
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceReportOptions {
    pub sample_size: usize,
    pub seed: u64,
    pub r_min: f64,
    pub n_min: usize,
}

impl Default for TraceReportOptions {
    fn default() -> Self {
        TraceReportOptions {
            sample_size: 200,
            seed: 0,
            r_min: 1.0 / 16.0,
            n_min: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub z_id: usize,
    /// `None` when no radius was admissible at `z`.
    pub tu: Option<f64>,
    pub error: Option<f64>,
    pub final_residual: Option<f64>,
    pub slope: Option<f64>,
    /// Smallest admissible radius at `z`.
    pub finest_radius: Option<f64>,
    pub converged: bool,
    /// Within `2⁷·r_min` of a jump of `f`.
    pub is_jump_neighbor: bool,
    /// Distance to the nearest jump (infinite without jumps).
    pub jump_distance: f64,
    /// `⨍_{B(z, r_min) ∩ Ω} |F − f(z)| dμ`.
    pub lhs: Option<f64>,
    /// `⨍_{B(z, 2⁷ r_min) ∩ ∂Ω} |f − f(z)| d𝓗`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub r_min: f64,
    pub radii: Vec<f64>,
    pub rows: Vec<TraceRow>,
    pub jumps: Vec<Point>,
    /// `max |TF(z) − f(z)|` over resolved samples.
    pub max_error: f64,
    /// Same maximum over samples whose ball of radius `r_min` is admissible.
    pub max_error_at_r_min: f64,
    pub resolved_at_r_min: usize,
    pub fraction_converged: f64,
    pub unresolved: usize,
    /// All non-converged samples lie within `2⁷·r_min` of a jump.
    pub failures_near_jumps: bool,
    /// Largest jump distance among non-converged samples.
    pub max_failure_jump_distance: f64,
    /// `max lhs / rhs` over samples with `rhs` above the floor.
    pub constant_c: f64,
    /// Largest `lhs` where `rhs` is at the floor.
    pub flat_lhs_max: f64,
    pub floor: f64,
}

impl TraceReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["z_id", "Tu", "final_residual", "slope", "converged", "is_jump_neighbor"])?;
        for r in &self.rows {
            w.serialize((r.z_id, r.tu, r.final_residual, r.slope, r.converged, r.is_jump_neighbor))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

/// Midpoints between consecutive boundary samples (cyclically) where `f`
/// jumps by more than half its oscillation.
pub fn jump_points(f: &FieldFn, disc: &Discretization) -> Vec<Point> {
    let pts = disc.boundary_points();
    let v = f.values();
    let n = pts.len();
    let osc = f.oscillation();
    if n < 2 || osc == 0.0 {
        return Vec::new();
    }
    (0..n)
        .filter(|&i| (v[(i + 1) % n] - v[i]).abs() > 0.5 * osc)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
        })
        .collect()
}

/// Runs [`trace_at`] on `F` at a seeded sample of boundary points and
/// compares with the data `f`.
pub fn trace_identity_report(
    f: &FieldFn,
    result: &ExtensionResult,
    disc: &Discretization,
    opts: &TraceReportOptions,
) -> Result<TraceReport> {
    f.check(disc, Some(Support::Boundary))?;
    let big_f = &result.values;
    big_f.check(disc, Some(Support::Interior))?;
    let nb = disc.n_boundary();
    let ids: Vec<usize> = if nb <= opts.sample_size {
        (0..nb).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut v = sample(&mut rng, nb, opts.sample_size).into_vec();
        v.sort_unstable();
        v
    };
    let radii = trace_radii(disc, Some(opts.r_min), 0);
    let topts = TraceOptions {
        n_min: opts.n_min,
        osc: f.oscillation(),
    };
    let jumps = jump_points(f, disc);
    let near = OSCILLATION_FACTOR * opts.r_min;
    let fv = f.values();
    let hw = disc.h_weights();
    let floor = 1e-9 * big_f.values().iter().chain(fv).fold(1.0f64, |a, b| a.max(b.abs()));

    let rows: Vec<TraceRow> = ids
        .par_iter()
        .map(|&z| {
            let zp = disc.boundary_points()[z];
            let jump_distance = jumps.iter().map(|j| j.dist(zp)).fold(f64::INFINITY, f64::min);
            let mut bids = Vec::new();
            disc.boundary_index().for_each_within(zp, near, |i, d| {
                if d < near {
                    bids.push(i);
                }
            });
            bids.sort_unstable();
            let rhs = weighted_mean(&bids, hw, |i| (fv[i] - fv[z]).abs());
            let entry = match trace_at(big_f, disc, z, &radii, &topts) {
                Ok(e) => Some(e),
                Err(Error::Unresolvable(_)) => None,
                Err(e) => return Err(e),
            };
            let lhs = entry.as_ref().map(|e| {
                let r = *e.radii.last().unwrap();
                let m = ball_members(disc, zp, r);
                weighted_mean(&m, disc.mu_weights(), |i| (big_f.values()[i] - fv[z]).abs())
            });
            Ok(TraceRow {
                z_id: z,
                tu: entry.as_ref().map(|e| e.value),
                error: entry.as_ref().map(|e| (e.value - fv[z]).abs()),
                final_residual: entry.as_ref().map(|e| e.final_residual),
                slope: entry.as_ref().and_then(|e| e.slope),
                finest_radius: entry.as_ref().map(|e| *e.radii.last().unwrap()),
                converged: entry.as_ref().is_some_and(|e| e.converged),
                is_jump_neighbor: jump_distance <= near,
                jump_distance,
                lhs,
                rhs,
            })
        })
        .collect::<Result<_>>()?;

    let resolved: Vec<&TraceRow> = rows.iter().filter(|r| r.tu.is_some()).collect();
    let max_error = resolved.iter().filter_map(|r| r.error).fold(0.0, f64::max);
    let at_r_min: Vec<&&TraceRow> = resolved
        .iter()
        .filter(|r| r.finest_radius == Some(opts.r_min))
        .collect();
    let converged = rows.iter().filter(|r| r.converged).count();
    let failures: Vec<&TraceRow> = rows.iter().filter(|r| !r.converged).collect();
    let mut constant_c: f64 = 0.0;
    let mut flat_lhs_max: f64 = 0.0;
    for r in &resolved {
        let lhs = r.lhs.unwrap();
        if r.rhs > floor {
            constant_c = constant_c.max(lhs / r.rhs);
        } else {
            flat_lhs_max = flat_lhs_max.max(lhs);
        }
    }
    Ok(TraceReport {
        r_min: opts.r_min,
        radii,
        fraction_converged: converged as f64 / rows.len().max(1) as f64,
        unresolved: rows.len() - resolved.len(),
        failures_near_jumps: failures.iter().all(|r| r.is_jump_neighbor),
        max_failure_jump_distance: failures.iter().map(|r| r.jump_distance).fold(0.0, f64::max),
        max_error,
        max_error_at_r_min: at_r_min.iter().filter_map(|r| r.error).fold(0.0, f64::max),
        resolved_at_r_min: at_r_min.len(),
        constant_c,
        flat_lhs_max,
        floor,
        jumps,
        rows,
    })
}
