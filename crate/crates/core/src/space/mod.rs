//! Finite discretizations of planar domains: weighted interior samples,
//! weighted boundary samples and the distance to the complement.

mod audit;
mod domain;
mod hausdorff;

pub use audit::{default_radii, density_ratio, regularity_audit, AuditBounds, AuditOptions, AuditRow, RegularityReport};
pub use domain::{build_domain, Curve, DomainSpec, MeshMode, Shape};
pub use hausdorff::{codim1_hausdorff, default_delta_ladder, HausdorffEstimate, HausdorffRow};

use crate::error::{Error, Result};
use crate::geometry::{disc_rect_area, Point, Rect};
use crate::index::KdTree;
use crate::sum;
use std::f64::consts::PI;

/// Which point list a mask or field refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Interior,
    Boundary,
}

impl Support {
    pub fn name(self) -> &'static str {
        match self {
            Support::Interior => "interior",
            Support::Boundary => "boundary",
        }
    }
}

/// Per-sample bookkeeping for boundary points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    /// Index of the boundary curve the sample lies on.
    pub edge: usize,
    /// Arclength from the start of its curve.
    pub arclength: f64,
    /// Length of the boundary piece the sample represents.
    pub spacing: f64,
}

/// Immutable weighted samples of `(Ω, ∂Ω)`.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub(crate) shape: Shape,
    pub(crate) mode: MeshMode,
    pub(crate) interior: Vec<Point>,
    pub(crate) mu: Vec<f64>,
    pub(crate) spacing: Vec<f64>,
    pub(crate) dist: Vec<f64>,
    pub(crate) boundary: Vec<Point>,
    pub(crate) h_weights: Vec<f64>,
    pub(crate) bmeta: Vec<BoundarySample>,
    pub(crate) curves: Vec<Curve>,
    pub(crate) pieces: Vec<Rect>,
    pub(crate) mesh_h: f64,
    pub(crate) diam: f64,
    pub(crate) area: f64,
    pub(crate) interior_tree: KdTree,
    pub(crate) boundary_tree: KdTree,
}

impl Discretization {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }
    pub fn mode(&self) -> MeshMode {
        self.mode
    }
    pub fn interior_points(&self) -> &[Point] {
        &self.interior
    }
    pub fn mu_weights(&self) -> &[f64] {
        &self.mu
    }
    /// Local sample spacing at each interior point.
    pub fn interior_spacing(&self) -> &[f64] {
        &self.spacing
    }
    pub fn boundary_points(&self) -> &[Point] {
        &self.boundary
    }
    pub fn h_weights(&self) -> &[f64] {
        &self.h_weights
    }
    pub fn boundary_samples(&self) -> &[BoundarySample] {
        &self.bmeta
    }
    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }
    /// Disjoint rectangles tiling Ω (exact-geometry mode only).
    pub fn pieces(&self) -> &[Rect] {
        &self.pieces
    }
    pub fn dist_values(&self) -> &[f64] {
        &self.dist
    }
    pub fn mesh_h(&self) -> f64 {
        self.mesh_h
    }
    pub fn diam(&self) -> f64 {
        self.diam
    }
    /// Analytic area of Ω.
    pub fn analytic_area(&self) -> f64 {
        self.area
    }
    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }
    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }
    pub fn interior_index(&self) -> &KdTree {
        &self.interior_tree
    }
    pub fn boundary_index(&self) -> &KdTree {
        &self.boundary_tree
    }

    pub fn points(&self, kind: Support) -> &[Point] {
        match kind {
            Support::Interior => &self.interior,
            Support::Boundary => &self.boundary,
        }
    }

    pub fn weights(&self, kind: Support) -> &[f64] {
        match kind {
            Support::Interior => &self.mu,
            Support::Boundary => &self.h_weights,
        }
    }

    pub fn index(&self, kind: Support) -> &KdTree {
        match kind {
            Support::Interior => &self.interior_tree,
            Support::Boundary => &self.boundary_tree,
        }
    }

    /// Sample spacing used for neighbour searches on either point list.
    pub fn spacing_at(&self, kind: Support, i: usize) -> f64 {
        match kind {
            Support::Interior => self.spacing[i],
            Support::Boundary => self.bmeta[i].spacing,
        }
    }

    /// Total boundary length along the curves.
    pub fn perimeter(&self) -> f64 {
        self.curves.iter().map(Curve::length).sum()
    }

    /// Position of each boundary sample as a fraction of the total arclength.
    pub fn boundary_param(&self, i: usize) -> f64 {
        let s = &self.bmeta[i];
        let before: f64 = self.curves[..s.edge].iter().map(Curve::length).sum();
        (before + s.arclength) / self.perimeter()
    }

    /// Smallest length the discretization resolves.
    pub fn resolution(&self) -> f64 {
        match self.mode {
            MeshMode::Grid => self.mesh_h,
            MeshMode::Exact => self.spacing.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }

    /// `μ(B(z, r) ∩ Ω)`: exact over the rectangle pieces in exact mode,
    /// the weighted sample count otherwise.
    pub fn ball_measure(&self, z: Point, r: f64) -> f64 {
        if self.mode == MeshMode::Exact && !self.pieces.is_empty() {
            sum::sum(self.pieces.iter().map(|p| disc_rect_area(z, r, p)))
        } else {
            let mut hits = Vec::new();
            self.interior_tree.for_each_within(z, r, |i, _| hits.push(i));
            hits.sort_unstable();
            sum::sum(hits.iter().map(|&i| self.mu[i]))
        }
    }

    /// Exact `dist(p, X∖Ω)` for a point of Ω.
    pub fn complement_distance(&self, p: Point) -> f64 {
        self.curves
            .iter()
            .map(|c| c.dist_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Ambient planar measure of a ball.
    pub fn ambient_ball_measure(r: f64) -> f64 {
        PI * r * r
    }
}

/// Sum of weights over the masked points.
pub fn measure_of(disc: &Discretization, mask: &[bool], kind: Support) -> Result<f64> {
    let w = disc.weights(kind);
    if mask.len() != w.len() {
        return Err(Error::MaskLength {
            expected: w.len(),
            got: mask.len(),
        });
    }
    Ok(sum::sum(
        mask.iter().zip(w).filter(|(m, _)| **m).map(|(_, w)| *w),
    ))
}

/// Stored `dist(x, X∖Ω)` for interior sample `i`.
pub fn dist_to_complement(disc: &Discretization, i: usize) -> Result<f64> {
    disc.dist.get(i).copied().ok_or(Error::IndexOutOfRange {
        index: i,
        len: disc.dist.len(),
    })
}
