//! Greedy separated nets.

use crate::geometry::Point;
use crate::index::KdTree;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Uniform hash grid used for separation checks during greedy selection.
#[derive(Debug, Clone)]
pub(crate) struct SpatialHash {
    cell: f64,
    map: HashMap<(i64, i64), Vec<Point>>,
}

impl SpatialHash {
    pub(crate) fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            map: HashMap::new(),
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    /// True when no stored point lies strictly closer than `sep ≤ cell`.
    pub(crate) fn is_separated(&self, p: Point, sep: f64) -> bool {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(v) = self.map.get(&(kx + dx, ky + dy)) {
                    if v.iter().any(|q| q.dist(p) < sep) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub(crate) fn insert(&mut self, p: Point) {
        let k = self.key(p);
        self.map.entry(k).or_default().push(p);
    }
}

/// Centers of a greedy `r`-separated net and its `τr` covering statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallNet {
    /// Indices into the input point list, in selection order.
    pub centers: Vec<usize>,
    pub r: f64,
    pub tau: f64,
    /// Largest number of `τr`-balls containing one input point.
    pub overlap: usize,
    /// Fraction of input points inside some `τr`-ball.
    pub coverage: f64,
}

impl BallNet {
    /// Smallest distance between two centers (infinite for fewer than two).
    pub fn min_separation(&self, points: &[Point]) -> f64 {
        let mut best = f64::INFINITY;
        for (a, &i) in self.centers.iter().enumerate() {
            for &j in &self.centers[a + 1..] {
                best = best.min(points[i].dist(points[j]));
            }
        }
        best
    }
}

/// Selects centers in input order, keeping a point when it is at distance
/// `≥ r` from every center chosen so far.
pub fn greedy_net(points: &[Point], r: f64, tau: f64) -> BallNet {
    let mut grid = SpatialHash::new(r);
    let mut centers = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if grid.is_separated(*p, r) {
            grid.insert(*p);
            centers.push(i);
        }
    }
    let cpts: Vec<Point> = centers.iter().map(|&i| points[i]).collect();
    let tree = KdTree::new(&cpts);
    let big = tau * r;
    let mut overlap = 0;
    let mut covered = 0;
    for p in points {
        let mut k = 0;
        tree.for_each_within(*p, big, |_, d| {
            if d < big {
                k += 1;
            }
        });
        overlap = overlap.max(k);
        covered += usize::from(k > 0);
    }
    BallNet {
        centers,
        r,
        tau,
        overlap,
        coverage: if points.is_empty() {
            1.0
        } else {
            covered as f64 / points.len() as f64
        },
    }
}
