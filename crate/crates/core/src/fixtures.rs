//! Named boundary data used by tests, scenarios and the CLI.
//!
//! Arclength-based fixtures use `t ∈ [0, 1)`, the position of a boundary
//! sample as a fraction of the perimeter.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::norms::FieldFn;
use crate::space::{build_domain, Discretization, DomainSpec, Shape, Support};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Above this many oscillations per sample cell the divergent fixture uses
/// the cell average 1/2 directly.
const UNRESOLVED_CYCLES: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fixture {
    Constant { value: f64 },
    CoordinateX,
    CoordinateY,
    /// `χ{x < x_mid}` with `x_mid` the middle of the bounding box.
    Step,
    /// `χ{start ≤ t < end}`.
    Arc { start: f64, end: f64 },
    /// `sin(2π·freq·t)`.
    Oscillatory { freq: u32 },
    /// Uniform noise in `[0, 1]` at the samples, inf-convolved to be `lip`-Lipschitz.
    RandomLipschitz { seed: u64, lip: f64 },
    /// `Σ_{j ≤ J} χ_{[1/(j+1), 1/j)}(t) u(4ʲ t)` with `u` the 1-periodic
    /// extension of `χ_{[0, 1/2)}`, averaged exactly over each sample cell.
    Divergent { terms: u32 },
    /// `Σ_{k=1}^{K} cos(2ᵏ π t) / 2^{kα}`.
    Weierstrass { alpha: f64, terms: u32 },
}

impl Fixture {
    /// Registry names accepted by [`Fixture::parse`].
    pub const NAMES: [&'static str; 9] = [
        "constant",
        "x",
        "y",
        "step",
        "arc",
        "oscillatory",
        "random-lipschitz",
        "divergent",
        "weierstrass",
    ];

    /// Fixture with default parameters for a registry name.
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "constant" => Fixture::Constant { value: 1.0 },
            "x" => Fixture::CoordinateX,
            "y" => Fixture::CoordinateY,
            "step" => Fixture::Step,
            "arc" => Fixture::Arc { start: 0.1, end: 0.35 },
            "oscillatory" => Fixture::Oscillatory { freq: 4 },
            "random-lipschitz" => Fixture::RandomLipschitz { seed: 0, lip: 4.0 },
            "divergent" => Fixture::Divergent { terms: 8 },
            "weierstrass" => Fixture::Weierstrass { alpha: 0.5, terms: 8 },
            _ => return Err(Error::UnknownFixture(name.to_string())),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Fixture::Constant { value } => format!("constant({value})"),
            Fixture::CoordinateX => "x".into(),
            Fixture::CoordinateY => "y".into(),
            Fixture::Step => "step".into(),
            Fixture::Arc { start, end } => format!("arc({start},{end})"),
            Fixture::Oscillatory { freq } => format!("oscillatory({freq})"),
            Fixture::RandomLipschitz { seed, lip } => format!("random-lipschitz({seed},{lip})"),
            Fixture::Divergent { terms } => format!("divergent({terms})"),
            Fixture::Weierstrass { alpha, terms } => format!("weierstrass({alpha},{terms})"),
        }
    }

    /// True for fixtures that are Lipschitz on the boundary.
    pub fn is_lipschitz(&self) -> bool {
        !matches!(self, Fixture::Step | Fixture::Arc { .. } | Fixture::Divergent { .. })
    }

    /// Values at the boundary samples of `disc`.
    pub fn sample(&self, disc: &Discretization) -> Result<FieldFn> {
        let pts = disc.boundary_points();
        let n = pts.len();
        let per = disc.perimeter();
        let values: Vec<f64> = match self {
            Fixture::Constant { value } => vec![*value; n],
            Fixture::CoordinateX => pts.iter().map(|p| p.x).collect(),
            Fixture::CoordinateY => pts.iter().map(|p| p.y).collect(),
            Fixture::Step => {
                let mid = bbox_mid_x(pts);
                pts.iter().map(|p| f64::from(u8::from(p.x < mid))).collect()
            }
            Fixture::Arc { start, end } => (0..n)
                .map(|i| {
                    let t = disc.boundary_param(i);
                    f64::from(u8::from(*start <= t && t < *end))
                })
                .collect(),
            Fixture::Oscillatory { freq } => (0..n)
                .map(|i| (2.0 * PI * f64::from(*freq) * disc.boundary_param(i)).sin())
                .collect(),
            Fixture::RandomLipschitz { seed, lip } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let noise: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                inf_convolution(pts, &noise, *lip)
            }
            Fixture::Divergent { terms } => (0..n)
                .map(|i| {
                    let t = disc.boundary_param(i);
                    let half = 0.5 * disc.spacing_at(Support::Boundary, i) / per;
                    divergent_cell_mean(*terms, t - half, t + half)
                })
                .collect(),
            Fixture::Weierstrass { alpha, terms } => (0..n)
                .map(|i| weierstrass(*alpha, *terms, disc.boundary_param(i)))
                .collect(),
        };
        FieldFn::new(Support::Boundary, values)
    }
}

fn bbox_mid_x(pts: &[Point]) -> f64 {
    let lo = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    0.5 * (lo + hi)
}

/// `min_y (v(y) + L·d(x, y))` at every sample.
pub(crate) fn inf_convolution(pts: &[Point], v: &[f64], lip: f64) -> Vec<f64> {
    (0..pts.len())
        .into_par_iter()
        .map(|x| {
            (0..pts.len())
                .map(|y| v[y] + lip * pts[x].dist(pts[y]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Antiderivative of the 1-periodic extension of `χ_{[0, 1/2)}`.
fn square_wave_integral(x: f64) -> f64 {
    let k = x.floor();
    0.5 * k + (x - k).min(0.5)
}

/// `∫_a^b u(4ʲ s) ds`.
fn square_wave_piece(j: u32, a: f64, b: f64) -> f64 {
    let scale = 4f64.powi(j as i32);
    if scale * (b - a) > UNRESOLVED_CYCLES {
        return 0.5 * (b - a);
    }
    (square_wave_integral(scale * b) - square_wave_integral(scale * a)) / scale
}

/// Mean of the divergent fixture over the parameter cell `[a, b)`, wrapped
/// around the circle.
fn divergent_cell_mean(terms: u32, a: f64, b: f64) -> f64 {
    let integral = |a: f64, b: f64| -> f64 {
        let mut total = 0.0;
        for j in 1..=terms {
            let (lo, hi) = (1.0 / f64::from(j + 1), 1.0 / f64::from(j));
            let (x, y) = (a.max(lo), b.min(hi));
            if y > x {
                total += square_wave_piece(j, x, y);
            }
        }
        total
    };
    let mut total = 0.0;
    for shift in [-1.0, 0.0, 1.0] {
        let (x, y) = ((a + shift).max(0.0), (b + shift).min(1.0));
        if y > x {
            total += integral(x, y);
        }
    }
    total / (b - a)
}

/// Weierstrass partial sum at parameter `t`.
pub fn weierstrass(alpha: f64, terms: u32, t: f64) -> f64 {
    (1..=terms as i32)
        .map(|k| (2f64.powi(k) * PI * t).cos() / 2f64.powf(f64::from(k) * alpha))
        .sum()
}

/// Unit disc with a coarse interior and `m` boundary samples, for
/// boundary-only experiments.
pub fn circle_domain(m: usize) -> Result<Discretization> {
    build_domain(&DomainSpec::new(Shape::Disc, 1.0 / 16.0).with_boundary_h(2.0 * PI / m as f64))
}

/// Seeded mix of Lipschitz, indicator and oscillatory fixtures.
pub fn fixture_family(seed: u64, count: usize) -> Vec<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| match i % 3 {
            0 => Fixture::RandomLipschitz {
                seed: rng.random(),
                lip: rng.random_range(1.0..8.0),
            },
            1 => {
                let start: f64 = rng.random_range(0.0..0.7);
                Fixture::Arc {
                    start,
                    end: start + rng.random_range(0.1..0.3),
                }
            }
            _ => Fixture::Oscillatory {
                freq: rng.random_range(1..=6),
            },
        })
        .collect()
}
