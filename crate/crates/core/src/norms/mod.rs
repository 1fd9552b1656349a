//! Function-space energies on interior and boundary samples.

mod besov;
mod jn;

pub use besov::{besov_seminorm, min_boundary_gap, BesovMethod};
pub use jn::{jn_norm, JnOptions};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::space::{Discretization, Support};
use crate::sum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default neighbour radius factor for [`pointwise_lip`].
pub const DEFAULT_KAPPA: f64 = 1.5;

/// Real values sampled on the interior or boundary points of a discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFn {
    support: Support,
    values: Vec<f64>,
}

impl FieldFn {
    pub fn new(support: Support, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(FieldFn { support, values })
    }

    /// Samples `f` at every point of the given support.
    pub fn sample<F: Fn(Point) -> f64>(disc: &Discretization, support: Support, f: F) -> Result<Self> {
        Self::new(support, disc.points(support).iter().map(|p| f(*p)).collect())
    }

    pub fn interior<F: Fn(Point) -> f64>(disc: &Discretization, f: F) -> Result<Self> {
        Self::sample(disc, Support::Interior, f)
    }

    pub fn boundary<F: Fn(Point) -> f64>(disc: &Discretization, f: F) -> Result<Self> {
        Self::sample(disc, Support::Boundary, f)
    }

    pub fn constant(disc: &Discretization, support: Support, c: f64) -> Result<Self> {
        Self::new(support, vec![c; disc.points(support).len()])
    }

    pub fn zeros_like(&self) -> Self {
        FieldFn {
            support: self.support,
            values: vec![0.0; self.values.len()],
        }
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max − min`, zero for an empty field.
    pub fn oscillation(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.max() - self.min()
        }
    }

    /// `a·self + b·other`.
    pub fn axpby(&self, a: f64, other: &FieldFn, b: f64) -> Result<FieldFn> {
        if other.support != self.support {
            return Err(Error::SupportMismatch {
                expected: self.support.name(),
                found: other.support.name(),
            });
        }
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        FieldFn::new(
            self.support,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// Checks length against `disc` and, if given, the expected support.
    pub fn check(&self, disc: &Discretization, expected: Option<Support>) -> Result<()> {
        if let Some(s) = expected {
            if s != self.support {
                return Err(Error::SupportMismatch {
                    expected: s.name(),
                    found: self.support.name(),
                });
            }
        }
        let n = disc.points(self.support).len();
        if n != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Estimator family recorded in a [`NormReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    Besov,
    JohnNirenberg,
}

/// One row of a per-scale breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub scale: f64,
    pub contribution: f64,
    pub degenerate_ball_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub kind: NormKind,
    pub method: String,
    pub theta: f64,
    pub tau: Option<f64>,
    pub r_scale: f64,
    /// `l1 + seminorm`.
    pub value: f64,
    pub seminorm: f64,
    pub l1: f64,
    /// Besov: contributions summing to `seminorm`. John–Nirenberg: best
    /// packing value per radius, whose maximum is `seminorm`.
    pub table: Vec<ScaleRow>,
    pub degenerate_balls: usize,
}

fn masked<'a>(n: usize, mask: Option<&'a [bool]>) -> Result<Option<&'a [bool]>> {
    match mask {
        Some(m) if m.len() != n => Err(Error::MaskLength {
            expected: n,
            got: m.len(),
        }),
        other => Ok(other),
    }
}

/// `Σ |f| · weight` over the field's support.
pub fn l1_norm(f: &FieldFn, disc: &Discretization) -> Result<f64> {
    f.check(disc, None)?;
    let w = disc.weights(f.support());
    Ok(sum::sum(f.values().iter().zip(w).map(|(v, w)| v.abs() * w)))
}

/// `LIP(f, A) = max |f(x) − f(y)| / d(x, y)` over distinct masked points,
/// by exhaustive pairs.
pub fn lip_constant(f: &FieldFn, disc: &Discretization, mask: Option<&[bool]>) -> Result<f64> {
    f.check(disc, None)?;
    let pts = disc.points(f.support());
    let mask = masked(pts.len(), mask)?;
    let idx: Vec<usize> = (0..pts.len())
        .filter(|&i| mask.is_none_or(|m| m[i]))
        .collect();
    if idx.len() < 2 {
        return Err(Error::SingletonMask);
    }
    let v = f.values();
    Ok(idx
        .par_iter()
        .enumerate()
        .map(|(a, &i)| {
            let mut best: f64 = 0.0;
            for &j in &idx[a + 1..] {
                let d = pts[i].dist(pts[j]);
                if d > 0.0 {
                    best = best.max((v[i] - v[j]).abs() / d);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max))
}

/// Sampled pointwise Lipschitz quotient and the samples that had no neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseLip {
    pub values: FieldFn,
    pub isolated: Vec<usize>,
}

/// `Lip u(x) ≈ max |u(y) − u(x)| / d(x, y)` over `0 < d ≤ κ·spacing(x)`.
pub fn pointwise_lip(u: &FieldFn, disc: &Discretization, kappa: f64) -> Result<PointwiseLip> {
    u.check(disc, None)?;
    let kind = u.support();
    let pts = disc.points(kind);
    let tree = disc.index(kind);
    let v = u.values();
    let out: Vec<(f64, bool)> = (0..pts.len())
        .into_par_iter()
        .map(|x| {
            let rad = kappa * disc.spacing_at(kind, x);
            let mut best: f64 = 0.0;
            let mut any = false;
            tree.for_each_within(pts[x], rad, |y, d| {
                if d > 0.0 {
                    any = true;
                    best = best.max((v[y] - v[x]).abs() / d);
                }
            });
            (best, !any)
        })
        .collect();
    let isolated = out
        .iter()
        .enumerate()
        .filter(|(_, o)| o.1)
        .map(|(i, _)| i)
        .collect();
    Ok(PointwiseLip {
        values: FieldFn::new(kind, out.into_iter().map(|o| o.0).collect())?,
        isolated,
    })
}

/// `Σ Lip u · weight` over the mask (default all samples), with `κ = 1.5`.
pub fn bv_energy(u: &FieldFn, disc: &Discretization, mask: Option<&[bool]>) -> Result<f64> {
    let lip = pointwise_lip(u, disc, DEFAULT_KAPPA)?;
    weighted_sum(&lip.values, disc, mask)
}

/// `Σ value · weight` over the mask.
pub(crate) fn weighted_sum(f: &FieldFn, disc: &Discretization, mask: Option<&[bool]>) -> Result<f64> {
    let w = disc.weights(f.support());
    let mask = masked(w.len(), mask)?;
    Ok(sum::sum(
        f.values()
            .iter()
            .zip(w)
            .enumerate()
            .filter(|(i, _)| mask.is_none_or(|m| m[*i]))
            .map(|(_, (v, w))| v * w),
    ))
}

/// Weighted mean of `f` over the mask.
pub fn integral_mean(f: &FieldFn, mask: &[bool], disc: &Discretization) -> Result<f64> {
    f.check(disc, None)?;
    let w = disc.weights(f.support());
    masked(w.len(), Some(mask))?;
    let total = sum::sum(mask.iter().zip(w).filter(|(m, _)| **m).map(|(_, w)| *w));
    if total <= 0.0 {
        return Err(Error::ZeroWeight);
    }
    Ok(weighted_sum(f, disc, Some(mask))? / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_domain, DomainSpec, Shape};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn square(h: f64) -> Discretization {
        build_domain(&DomainSpec::new(Shape::UnitSquare, h)).unwrap()
    }

    #[test]
    fn l1_examples() {
        let d = square(1.0 / 128.0);
        let zero = FieldFn::constant(&d, Support::Boundary, 0.0).unwrap();
        assert_eq!(l1_norm(&zero, &d).unwrap(), 0.0);
        let one = FieldFn::constant(&d, Support::Boundary, 1.0).unwrap();
        assert_relative_eq!(l1_norm(&one, &d).unwrap(), 2.0 * PI, max_relative = 0.1);
        let bottom = FieldFn::boundary(&d, |p| f64::from(u8::from(p.y == 0.0))).unwrap();
        assert_relative_eq!(l1_norm(&bottom, &d).unwrap(), FRAC_PI_2, max_relative = 0.1);
    }

    #[test]
    fn lip_examples() {
        let d = square(1.0 / 32.0);
        let c = FieldFn::constant(&d, Support::Boundary, 3.0).unwrap();
        assert_eq!(lip_constant(&c, &d, None).unwrap(), 0.0);
        let x = FieldFn::boundary(&d, |p| p.x).unwrap();
        assert_relative_eq!(lip_constant(&x, &d, None).unwrap(), 1.0, epsilon = 1e-12);
        // indicator of part of the bottom edge: 1 / (smallest gap across the jump),
        // which is the corner pair at distance h/√2
        let inside = |p: &Point| p.y == 0.0 && p.x < 0.5;
        let arc = FieldFn::boundary(&d, |p| f64::from(u8::from(inside(&p)))).unwrap();
        let pts = d.boundary_points();
        let gap = pts
            .iter()
            .filter(|p| inside(p))
            .flat_map(|p| pts.iter().filter(|q| !inside(q)).map(move |q| p.dist(*q)))
            .fold(f64::INFINITY, f64::min);
        assert_relative_eq!(gap, std::f64::consts::FRAC_1_SQRT_2 / 32.0, max_relative = 1e-9);
        assert_relative_eq!(lip_constant(&arc, &d, None).unwrap(), 1.0 / gap, max_relative = 1e-9);
        let one = vec![true].into_iter().chain(std::iter::repeat_n(false, d.n_boundary() - 1)).collect::<Vec<_>>();
        assert!(matches!(lip_constant(&x, &d, Some(&one)), Err(Error::SingletonMask)));
    }

    #[test]
    fn pointwise_lip_examples() {
        let d = square(1.0 / 64.0);
        let c = FieldFn::constant(&d, Support::Interior, 2.0).unwrap();
        assert!(pointwise_lip(&c, &d, DEFAULT_KAPPA).unwrap().values.values().iter().all(|v| *v == 0.0));
        let x = FieldFn::interior(&d, |p| p.x).unwrap();
        let lx = pointwise_lip(&x, &d, DEFAULT_KAPPA).unwrap();
        assert!(lx.isolated.is_empty());
        assert!(lx.values.values().iter().all(|v| (v - 1.0).abs() <= 1e-9));
        let dist = FieldFn::new(Support::Interior, d.dist_values().to_vec()).unwrap();
        let ld = pointwise_lip(&dist, &d, DEFAULT_KAPPA).unwrap();
        assert!(ld.values.values().iter().all(|v| *v <= 1.0 + 1e-9));
    }

    #[test]
    fn bv_examples() {
        let d = square(1.0 / 64.0);
        let c = FieldFn::constant(&d, Support::Interior, 1.0).unwrap();
        assert_eq!(bv_energy(&c, &d, None).unwrap(), 0.0);
        let x = FieldFn::interior(&d, |p| p.x).unwrap();
        assert_relative_eq!(bv_energy(&x, &d, None).unwrap(), 1.0, max_relative = 0.05);
        let step = FieldFn::interior(&d, |p| f64::from(u8::from(p.x < 0.5))).unwrap();
        let e = bv_energy(&step, &d, None).unwrap();
        assert!((0.5..=2.0).contains(&e), "{e}");
    }

    #[test]
    fn mean_examples() {
        let d = square(1.0 / 64.0);
        let all = vec![true; d.n_interior()];
        let c = FieldFn::constant(&d, Support::Interior, 4.5).unwrap();
        assert_relative_eq!(integral_mean(&c, &all, &d).unwrap(), 4.5, epsilon = 1e-12);
        let half = FieldFn::interior(&d, |p| f64::from(u8::from(p.x < 0.5))).unwrap();
        assert_relative_eq!(integral_mean(&half, &all, &d).unwrap(), 0.5, epsilon = 1e-12);
        let bottom: Vec<bool> = d.boundary_points().iter().map(|p| p.y == 0.0).collect();
        let x = FieldFn::boundary(&d, |p| p.x).unwrap();
        assert_relative_eq!(integral_mean(&x, &bottom, &d).unwrap(), 0.5, epsilon = d.mesh_h());
        let none = vec![false; d.n_interior()];
        assert!(matches!(integral_mean(&c, &none, &d), Err(Error::ZeroWeight)));
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        assert!(matches!(FieldFn::new(Support::Interior, vec![1.0, f64::NAN]), Err(Error::NonFinite(1))));
        let d = square(1.0 / 16.0);
        let f = FieldFn::new(Support::Interior, vec![0.0; 3]).unwrap();
        assert!(matches!(l1_norm(&f, &d), Err(Error::LengthMismatch { .. })));
    }
}
