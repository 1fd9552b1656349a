//! Lipschitz approximation of boundary data by symmetrized inf-convolution.

use crate::error::{Error, Result};
use crate::norms::{l1_norm, lip_constant, FieldFn};
use crate::space::{Discretization, Support};
use rayon::prelude::*;

/// The Lipschitz parameter is searched on `L = LIP(f)·i / LIP_GRID_STEPS`.
pub const LIP_GRID_STEPS: u32 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzApprox {
    pub g: FieldFn,
    /// Grid parameter `L` used for the envelopes; `LIP(g) ≤ L`. Nondecreasing
    /// as the target shrinks.
    pub lip_bound: f64,
    /// Measured `LIP(g, ∂Ω)`.
    pub lip: f64,
    /// `‖f − g‖_{L¹(∂Ω)}`.
    pub error: f64,
}

/// Lower and upper `L`-Lipschitz envelopes `min_y f(y) + L·d` and
/// `max_y f(y) − L·d`, their mean, and the bound
/// `½(∫ f − lower + ∫ upper − f) ≥ ‖f − mean‖`.
fn envelopes(f: &FieldFn, disc: &Discretization, lip: f64) -> (Vec<f64>, f64) {
    let pts = disc.boundary_points();
    let w = disc.h_weights();
    let v = f.values();
    let rows: Vec<(f64, f64)> = (0..pts.len())
        .into_par_iter()
        .map(|x| {
            let (mut lo, mut hi) = (v[x], v[x]);
            for y in 0..pts.len() {
                let d = lip * pts[x].dist(pts[y]);
                lo = lo.min(v[y] + d);
                hi = hi.max(v[y] - d);
            }
            (lo, hi)
        })
        .collect();
    let mean = rows.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let bound = 0.5
        * crate::sum::sum(
            rows.iter()
                .zip(v)
                .zip(w)
                .map(|(((lo, hi), fv), w)| w * ((fv - lo) + (hi - fv))),
        );
    (mean, bound)
}

/// Smallest grid `L` whose envelope bound meets `target`, and the mean of
/// the two envelopes at that `L`.
///
/// At `L = LIP(f)` both envelopes equal `f`, so the search always succeeds.
pub fn lipschitz_approximation(f: &FieldFn, disc: &Discretization, target: f64) -> Result<LipschitzApprox> {
    f.check(disc, Some(Support::Boundary))?;
    if !(target > 0.0) {
        return Err(Error::InvalidParameter(format!("target {target} must be positive")));
    }
    if disc.n_boundary() == 0 {
        return Err(Error::Empty("boundary samples"));
    }
    let lip_f = if disc.n_boundary() > 1 {
        lip_constant(f, disc, None)?
    } else {
        0.0
    };
    let param = |i: u32| lip_f * f64::from(i) / f64::from(LIP_GRID_STEPS);
    let (mut lo, mut hi) = (0u32, LIP_GRID_STEPS);
    if envelopes(f, disc, 0.0).1 <= target {
        hi = 0;
    }
    // invariant: bound(param(hi)) ≤ target < bound(param(lo))
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if envelopes(f, disc, param(mid)).1 <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lip_bound = param(hi);
    let g = if hi == LIP_GRID_STEPS {
        f.clone()
    } else {
        FieldFn::new(Support::Boundary, envelopes(f, disc, lip_bound).0)?
    };
    let lip = if disc.n_boundary() > 1 {
        lip_constant(&g, disc, None)?
    } else {
        0.0
    };
    let error = l1_norm(&f.axpby(1.0, &g, -1.0)?, disc)?;
    Ok(LipschitzApprox { g, lip_bound, lip, error })
}
