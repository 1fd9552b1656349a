//! Doubling, Ahlfors codimension-1 regularity and measure-density audit.

use super::Discretization;
use crate::error::{Error, Result};
use crate::sum;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Bounds the audit compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditBounds {
    pub ahlfors_min: f64,
    pub ahlfors_max: f64,
    pub max_spread: f64,
    pub density_min: f64,
}

impl Default for AuditBounds {
    fn default() -> Self {
        AuditBounds {
            ahlfors_min: 0.2,
            ahlfors_max: 5.0,
            max_spread: 25.0,
            density_min: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditOptions {
    /// Boundary points used when there are more than this many samples.
    pub max_points: usize,
    pub seed: u64,
    pub bounds: AuditBounds,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            max_points: 4096,
            seed: 0,
            bounds: AuditBounds::default(),
        }
    }
}

/// One `(x, r)` sample of the audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub x_id: usize,
    pub r: f64,
    /// Ambient `μ(B(x, r)) = πr²`.
    pub mu_ball: f64,
    /// `𝓗(B(x, r) ∩ ∂Ω)` from calibrated weights.
    pub h_ball: f64,
    /// `𝓗(B ∩ ∂Ω)·r / μ(B)`.
    pub ahlfors_ratio: f64,
    /// `μ(B ∩ Ω) / μ(B)`.
    pub density_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub radii: Vec<f64>,
    pub rows: Vec<AuditRow>,
    pub doubling_constant: f64,
    pub ahlfors_min: f64,
    pub ahlfors_max: f64,
    pub ahlfors_spread: f64,
    pub density_min: f64,
    pub bounds: AuditBounds,
    pub pass_ahlfors: bool,
    pub pass_spread: bool,
    pub pass_density: bool,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.pass_ahlfors && self.pass_spread && self.pass_density
    }
}

/// Geometric radii by factor √2 from `4·resolution` up to `diam/4`.
pub fn default_radii(disc: &Discretization) -> Vec<f64> {
    let mut r = 4.0 * disc.resolution();
    let mut out = Vec::new();
    while r <= disc.diam() / 4.0 {
        out.push(r);
        r *= std::f64::consts::SQRT_2;
    }
    out
}

/// Sweeps boundary points and radii, recording Ahlfors and density ratios.
///
/// Radii outside `[4·resolution, diam/2]` are discarded; `None` uses
/// [`default_radii`].
pub fn regularity_audit(
    disc: &Discretization,
    radii: Option<&[f64]>,
    opts: &AuditOptions,
) -> Result<RegularityReport> {
    let lo = 4.0 * disc.resolution();
    let hi = disc.diam() / 2.0;
    let radii: Vec<f64> = match radii {
        Some(r) => r.iter().copied().filter(|r| *r >= lo && *r <= hi).collect(),
        None => default_radii(disc),
    };
    if radii.is_empty() {
        return Err(Error::NoValidRadii { lo, hi });
    }
    let nb = disc.n_boundary();
    if nb == 0 {
        return Err(Error::Empty("boundary samples"));
    }
    let ids: Vec<usize> = if nb <= opts.max_points {
        (0..nb).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut v = sample(&mut rng, nb, opts.max_points).into_vec();
        v.sort_unstable();
        v
    };

    let per_point: Vec<(Vec<AuditRow>, f64)> = ids
        .par_iter()
        .map(|&x| {
            let z = disc.boundary_points()[x];
            let mut rows = Vec::with_capacity(radii.len());
            let mut doubling: f64 = 0.0;
            for &r in &radii {
                let mut hits = Vec::new();
                disc.boundary_index().for_each_within(z, r, |i, _| hits.push(i));
                hits.sort_unstable();
                let h_ball = sum::sum(hits.iter().map(|&i| disc.h_weights()[i]));
                let mu_ball = Discretization::ambient_ball_measure(r);
                let inside = disc.ball_measure(z, r);
                let inside2 = disc.ball_measure(z, 2.0 * r);
                if inside > 0.0 {
                    doubling = doubling.max(inside2 / inside);
                }
                rows.push(AuditRow {
                    x_id: x,
                    r,
                    mu_ball,
                    h_ball,
                    ahlfors_ratio: h_ball * r / mu_ball,
                    density_ratio: inside / mu_ball,
                });
            }
            (rows, doubling)
        })
        .collect();

    let mut rows = Vec::with_capacity(ids.len() * radii.len());
    let mut cd: f64 = 0.0;
    for (r, d) in per_point {
        rows.extend(r);
        cd = cd.max(d);
    }
    let amin = rows.iter().map(|r| r.ahlfors_ratio).fold(f64::INFINITY, f64::min);
    let amax = rows.iter().map(|r| r.ahlfors_ratio).fold(0.0, f64::max);
    let dmin = rows.iter().map(|r| r.density_ratio).fold(f64::INFINITY, f64::min);
    let b = opts.bounds;
    Ok(RegularityReport {
        radii,
        doubling_constant: cd,
        ahlfors_min: amin,
        ahlfors_max: amax,
        ahlfors_spread: amax / amin,
        density_min: dmin,
        bounds: b,
        pass_ahlfors: amin >= b.ahlfors_min && amax <= b.ahlfors_max,
        pass_spread: amax / amin < b.max_spread,
        pass_density: dmin >= b.density_min,
        rows,
    })
}

/// `μ(B(z, r) ∩ Ω) / μ(B(z, r))` at an arbitrary point.
pub fn density_ratio(disc: &Discretization, z: crate::geometry::Point, r: f64) -> f64 {
    disc.ball_measure(z, r) / Discretization::ambient_ball_measure(r)
}
