//! Domain shapes and their discretization.

use super::hausdorff::{codim1_on_samples, default_delta_ladder};
use super::{BoundarySample, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{point_in_polygon, polygon_area, Point, Rect, Segment};
use crate::index::KdTree;
use crate::sum;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Below this many samples an edge gets the closed-form straight-edge weight.
const MIN_CALIBRATION_SAMPLES: usize = 64;
/// Minimum cells per tube in exact mode, across and along the tube.
const TUBE_CELLS: (usize, usize) = (4, 8);
/// Minimum samples per boundary edge in exact mode.
const EXACT_EDGE_SAMPLES: usize = 8;

/// A boundary curve: a straight segment or a full circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Segment(Segment),
    Circle { center: Point, radius: f64 },
}

impl Curve {
    pub fn length(&self) -> f64 {
        match self {
            Curve::Segment(s) => s.length(),
            Curve::Circle { radius, .. } => 2.0 * PI * radius,
        }
    }

    /// Point at fraction `t ∈ [0, 1]` of the curve.
    pub fn point_at(&self, t: f64) -> Point {
        match self {
            Curve::Segment(s) => s.point_at(t),
            Curve::Circle { center, radius } => {
                let a = 2.0 * PI * t;
                Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
            }
        }
    }

    pub fn dist_to(&self, p: Point) -> f64 {
        match self {
            Curve::Segment(s) => s.dist_to(p),
            Curve::Circle { center, radius } => (p.dist(*center) - radius).abs(),
        }
    }
}

/// Supported domain shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    UnitSquare,
    /// Unit disc centered at the origin.
    Disc,
    /// Unit disc minus the segment `{(t, 0): 0 ≤ t < 1}`.
    SlitDisc,
    /// `[0,1]² ∖ [1/2,1]²`.
    LShape,
    /// Base `(−1,2)×(−1,0)` with tubes `(1/n² − 4⁻ⁿ, 1/n² + 4⁻ⁿ) × [0, 2⁻ⁿ)`, `n = 1..=N`.
    ThinTubes(usize),
    Polygon(Vec<Point>),
}

impl Shape {
    pub fn tag(&self) -> String {
        match self {
            Shape::UnitSquare => "unit-square".into(),
            Shape::Disc => "disc".into(),
            Shape::SlitDisc => "slit-disc".into(),
            Shape::LShape => "l-shape".into(),
            Shape::ThinTubes(n) => format!("thin-tubes({n})"),
            Shape::Polygon(_) => "custom-polygon".into(),
        }
    }

    /// Parses a shape tag. `thin-tubes` takes its count from `n` or from a
    /// `thin-tubes(N)` suffix; `custom-polygon` needs `vertices`.
    pub fn parse(tag: &str, n: Option<usize>, vertices: Option<&[Point]>) -> Result<Shape> {
        let tag = tag.trim();
        if let Some(rest) = tag.strip_prefix("thin-tubes") {
            let count = if rest.is_empty() {
                n.ok_or_else(|| Error::InvalidSpec("thin-tubes needs N".into()))?
            } else {
                rest.strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().parse().ok())
                    .ok_or_else(|| Error::UnknownShape(tag.into()))?
            };
            if count == 0 {
                return Err(Error::InvalidSpec("thin-tubes needs N ≥ 1".into()));
            }
            return Ok(Shape::ThinTubes(count));
        }
        match tag {
            "unit-square" => Ok(Shape::UnitSquare),
            "disc" => Ok(Shape::Disc),
            "slit-disc" => Ok(Shape::SlitDisc),
            "l-shape" => Ok(Shape::LShape),
            "custom-polygon" => {
                let v = vertices
                    .ok_or_else(|| Error::InvalidSpec("custom-polygon needs vertices".into()))?;
                if v.len() < 3 {
                    return Err(Error::InvalidSpec("polygon needs ≥ 3 vertices".into()));
                }
                Ok(Shape::Polygon(v.to_vec()))
            }
            other => Err(Error::UnknownShape(other.into())),
        }
    }

    /// Vertices for polygonal shapes, counter-clockwise.
    pub fn polygon(&self) -> Option<Vec<Point>> {
        let p = Point::new;
        match self {
            Shape::UnitSquare => Some(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]),
            Shape::LShape => Some(vec![
                p(0.0, 0.0),
                p(1.0, 0.0),
                p(1.0, 0.5),
                p(0.5, 0.5),
                p(0.5, 1.0),
                p(0.0, 1.0),
            ]),
            Shape::ThinTubes(n) => {
                let mut v = vec![p(-1.0, -1.0), p(2.0, -1.0), p(2.0, 0.0)];
                for t in tube_rects(*n).iter() {
                    v.extend([p(t.x1, 0.0), p(t.x1, t.y1), p(t.x0, t.y1), p(t.x0, 0.0)]);
                }
                v.push(p(-1.0, 0.0));
                Some(v)
            }
            Shape::Polygon(v) => Some(v.clone()),
            Shape::Disc | Shape::SlitDisc => None,
        }
    }

    fn curves(&self) -> Vec<Curve> {
        let circle = Curve::Circle {
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        };
        match self {
            Shape::Disc => vec![circle],
            Shape::SlitDisc => vec![
                circle,
                Curve::Segment(Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0))),
            ],
            _ => {
                let v = self.polygon().expect("polygonal shape");
                (0..v.len())
                    .map(|i| Curve::Segment(Segment::new(v[i], v[(i + 1) % v.len()])))
                    .collect()
            }
        }
    }

    fn area(&self) -> f64 {
        match self {
            Shape::Disc | Shape::SlitDisc => PI,
            _ => polygon_area(&self.polygon().expect("polygonal shape")),
        }
    }

    fn diam(&self) -> f64 {
        match self {
            Shape::Disc | Shape::SlitDisc => 2.0,
            _ => {
                let v = self.polygon().expect("polygonal shape");
                let mut d: f64 = 0.0;
                for a in &v {
                    for b in &v {
                        d = d.max(a.dist(*b));
                    }
                }
                d
            }
        }
    }

    fn contains(&self, p: Point) -> bool {
        match self {
            Shape::Disc => p.norm() < 1.0,
            Shape::SlitDisc => p.norm() < 1.0 && !(p.y == 0.0 && p.x >= 0.0),
            _ => point_in_polygon(p, &self.polygon().expect("polygonal shape")),
        }
    }
}

/// The tube rectangles `U_n`, `n = 1..=count`.
pub(crate) fn tube_rects(count: usize) -> Vec<Rect> {
    (1..=count)
        .map(|n| {
            let c = 1.0 / (n * n) as f64;
            let w = 4f64.powi(-(n as i32));
            Rect::new(c - w, 0.0, c + w, 2f64.powi(-(n as i32)))
        })
        .collect()
}

/// Uniform cell-center grid, or exact rectangle arithmetic (thin tubes only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshMode {
    #[default]
    Grid,
    Exact,
}

/// JSON-facing domain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub shape: String,
    pub h: f64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: MeshMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Point>>,
    /// Boundary sample spacing when it should differ from `h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_h: Option<f64>,
}

impl DomainSpec {
    pub fn new(shape: Shape, h: f64) -> Self {
        let (tag, n, vertices) = match &shape {
            Shape::ThinTubes(n) => ("thin-tubes".to_string(), Some(*n), None),
            Shape::Polygon(v) => (shape.tag(), None, Some(v.clone())),
            s => (s.tag(), None, None),
        };
        DomainSpec {
            shape: tag,
            h,
            n,
            seed: 0,
            mode: MeshMode::Grid,
            vertices,
            boundary_h: None,
        }
    }

    pub fn exact(mut self) -> Self {
        self.mode = MeshMode::Exact;
        self
    }

    pub fn with_boundary_h(mut self, bh: f64) -> Self {
        self.boundary_h = Some(bh);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn parsed_shape(&self) -> Result<Shape> {
        Shape::parse(&self.shape, self.n, self.vertices.as_deref())
    }
}

struct Interior {
    points: Vec<Point>,
    mu: Vec<f64>,
    spacing: Vec<f64>,
    pieces: Vec<Rect>,
}

fn grid_interior(shape: &Shape, curves: &[Curve], h: f64) -> Interior {
    let (x0, y0, x1, y1) = match shape.polygon() {
        Some(v) => v.iter().fold(
            (f64::MAX, f64::MAX, f64::MIN, f64::MIN),
            |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
        ),
        None => (-1.0, -1.0, 1.0, 1.0),
    };
    let nx = ((x1 - x0) / h).round().max(1.0) as usize;
    let ny = ((y1 - y0) / h).round().max(1.0) as usize;
    let mut points = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let p = Point::new(x0 + (i as f64 + 0.5) * h, y0 + (j as f64 + 0.5) * h);
            if shape.contains(p) && curves.iter().all(|c| c.dist_to(p) > 0.0) {
                points.push(p);
            }
        }
    }
    let n = points.len();
    Interior {
        points,
        mu: vec![h * h; n],
        spacing: vec![h; n],
        pieces: Vec::new(),
    }
}

fn exact_tube_interior(count: usize, h: f64) -> Interior {
    let mut pieces = vec![Rect::new(-1.0, -1.0, 2.0, 0.0)];
    pieces.extend(tube_rects(count));
    let mut out = Interior {
        points: Vec::new(),
        mu: Vec::new(),
        spacing: Vec::new(),
        pieces: pieces.clone(),
    };
    for (k, r) in pieces.iter().enumerate() {
        let (minx, miny) = if k == 0 { (1, 1) } else { TUBE_CELLS };
        let nx = ((r.width() / h).ceil() as usize).max(minx);
        let ny = ((r.height() / h).ceil() as usize).max(miny);
        let (dx, dy) = (r.width() / nx as f64, r.height() / ny as f64);
        for i in 0..nx {
            for j in 0..ny {
                out.points.push(Point::new(
                    r.x0 + (i as f64 + 0.5) * dx,
                    r.y0 + (j as f64 + 0.5) * dy,
                ));
                out.mu.push(dx * dy);
                out.spacing.push(dx.max(dy));
            }
        }
    }
    out
}

/// Builds the weighted discretization described by `spec`.
pub fn build_domain(spec: &DomainSpec) -> Result<Discretization> {
    let shape = spec.parsed_shape()?;
    let h = spec.h;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidSpec(format!("h must be positive, got {h}")));
    }
    let bh = spec.boundary_h.unwrap_or(h);
    if !(bh.is_finite() && bh > 0.0) {
        return Err(Error::InvalidSpec(format!("boundary_h must be positive, got {bh}")));
    }
    let curves = shape.curves();
    let diam = shape.diam();
    if h > diam / 4.0 {
        return Err(Error::MeshTooCoarse(format!("h = {h} exceeds diam/4")));
    }

    let interior = match (spec.mode, &shape) {
        (MeshMode::Exact, Shape::ThinTubes(n)) => exact_tube_interior(*n, h),
        (MeshMode::Exact, other) => {
            return Err(Error::InvalidSpec(format!(
                "exact mode is only available for thin-tubes, not {}",
                other.tag()
            )))
        }
        (MeshMode::Grid, Shape::ThinTubes(n)) => {
            let finest = 4f64.powi(-(*n as i32));
            if h > finest {
                return Err(Error::MeshTooCoarse(format!(
                    "h = {h} cannot resolve tube width 2·4^-{n}; use exact mode or h ≤ {finest}"
                )));
            }
            grid_interior(&shape, &curves, h)
        }
        (MeshMode::Grid, _) => grid_interior(&shape, &curves, h),
    };
    if interior.points.is_empty() {
        return Err(Error::MeshTooCoarse("no interior samples".into()));
    }
    let area = shape.area();
    let total = sum::sum(interior.mu.iter().copied());
    if (total - area).abs() > 0.02 * area {
        return Err(Error::MeshTooCoarse(format!(
            "sampled area {total} differs from {area} by more than 2%"
        )));
    }

    let min_edge = match spec.mode {
        MeshMode::Grid => 1,
        MeshMode::Exact => EXACT_EDGE_SAMPLES,
    };
    let mut boundary = Vec::new();
    let mut bmeta = Vec::new();
    let mut edge_counts = Vec::with_capacity(curves.len());
    for (e, c) in curves.iter().enumerate() {
        let len = c.length();
        let m = ((len / bh).ceil() as usize).max(min_edge);
        let s = len / m as f64;
        for k in 0..m {
            let t = (k as f64 + 0.5) / m as f64;
            boundary.push(c.point_at(t));
            bmeta.push(BoundarySample {
                edge: e,
                arclength: t * len,
                spacing: s,
            });
        }
        edge_counts.push(m);
    }

    // Calibrate each edge's weights against the covering estimator.
    let mut h_weights = vec![0.0; boundary.len()];
    let mut start = 0;
    for (e, &m) in edge_counts.iter().enumerate() {
        let idx: Vec<usize> = (start..start + m).collect();
        let total = if spec.mode == MeshMode::Grid && m >= MIN_CALIBRATION_SAMPLES {
            let s = bmeta[start].spacing;
            codim1_on_samples(&boundary, &idx, &default_delta_ladder(s)).value
        } else {
            FRAC_PI_2 * curves[e].length()
        };
        for w in &mut h_weights[start..start + m] {
            *w = total / m as f64;
        }
        start += m;
    }

    let dist: Vec<f64> = interior
        .points
        .iter()
        .map(|p| curves.iter().map(|c| c.dist_to(*p)).fold(f64::INFINITY, f64::min))
        .collect();

    Ok(Discretization {
        interior_tree: KdTree::new(&interior.points),
        boundary_tree: KdTree::new(&boundary),
        shape,
        mode: spec.mode,
        interior: interior.points,
        mu: interior.mu,
        spacing: interior.spacing,
        dist,
        boundary,
        h_weights,
        bmeta,
        curves,
        pieces: interior.pieces,
        mesh_h: h,
        diam,
        area,
    })
}
