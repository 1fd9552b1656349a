//! Whitney ball covers of Ω, boundary shadows, layers and greedy nets.

mod net;
mod pou;

pub use net::{greedy_net, BallNet};
pub use pou::{partition_of_unity, PartitionOfUnity};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::space::Discretization;
pub(crate) use net::SpatialHash;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Factor between the shadow radius and the expanded shadow radius.
pub const EXPANDED_SHADOW_FACTOR: f64 = 64.0;

/// Dyadic level `j` with `2^{j−1} < r ≤ 2^j`.
pub fn dyadic_level(r: f64) -> i32 {
    let mut j = r.log2().ceil() as i32;
    while 2f64.powi(j) < r {
        j += 1;
    }
    while 2f64.powi(j - 1) >= r {
        j -= 1;
    }
    j
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyBall {
    /// Interior sample used as center.
    pub center: usize,
    pub p: Point,
    pub r: f64,
    pub level: i32,
    /// Nearest boundary sample to `p`, set by [`boundary_shadows`].
    pub q: Option<usize>,
    /// Boundary samples in `B(q, r)`, ascending.
    pub shadow: Vec<usize>,
    /// Boundary samples in `B(q, 64r)`, ascending.
    pub expanded: Vec<usize>,
}

/// Per-level statistics for the cover report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelStat {
    pub level: i32,
    pub count: usize,
    /// Largest number of this level's `2B` balls containing one sample.
    pub max_overlap: usize,
    pub dropped: usize,
}

/// JSON record of one ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub p: Point,
    pub r: f64,
    pub j: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyCover {
    pub balls: Vec<WhitneyBall>,
    pub top_level: i32,
    /// Measured `K = max_x Σ χ_{2B}(x)` over interior samples.
    pub overlap: usize,
    pub levels: Vec<LevelStat>,
    /// Balls removed by [`boundary_shadows`] because their shadow was empty.
    pub dropped: Vec<WhitneyBall>,
}

impl WhitneyCover {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn has_shadows(&self) -> bool {
        self.balls.iter().all(|b| b.q.is_some())
    }

    /// Fraction of interior samples inside some ball `B(p, r)`.
    pub fn coverage(&self, disc: &Discretization) -> f64 {
        let n = disc.n_interior();
        let mut hit = vec![false; n];
        for b in &self.balls {
            disc.interior_index().for_each_within(b.p, b.r, |i, d| {
                if d < b.r {
                    hit[i] = true;
                }
            });
        }
        hit.iter().filter(|h| **h).count() as f64 / n as f64
    }

    pub fn records(&self, disc: &Discretization) -> Vec<BallRecord> {
        self.balls
            .iter()
            .map(|b| BallRecord {
                p: b.p,
                r: b.r,
                j: b.level,
                q: b.q.map(|q| disc.boundary_points()[q]),
            })
            .collect()
    }

    pub fn to_json(&self, disc: &Discretization) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.records(disc))?)
    }

    /// Cover report CSV: `level,count,max_overlap,dropped`.
    pub fn report_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for l in &self.levels {
            w.serialize(l)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Pairs of balls at levels `j` and `j + 2` whose closed balls meet.
    pub fn level_violations(&self) -> usize {
        let mut by_level: BTreeMap<i32, Vec<&WhitneyBall>> = BTreeMap::new();
        for b in &self.balls {
            by_level.entry(b.level).or_default().push(b);
        }
        let mut bad = 0;
        for (j, lo) in &by_level {
            if let Some(hi) = by_level.get(&(j + 2)) {
                for a in lo {
                    for b in hi {
                        if a.p.dist(b.p) <= a.r + b.r {
                            bad += 1;
                        }
                    }
                }
            }
        }
        bad
    }
}

/// `2B` overlap counts per interior sample, in total and per level.
fn overlap_counts(balls: &[WhitneyBall], disc: &Discretization) -> (Vec<usize>, BTreeMap<i32, usize>) {
    let n = disc.n_interior();
    let mut total = vec![0usize; n];
    let mut per_level: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for b in balls {
        let lvl = per_level.entry(b.level).or_insert_with(|| vec![0; n]);
        disc.interior_index().for_each_within(b.p, 2.0 * b.r, |i, d| {
            if d < 2.0 * b.r {
                total[i] += 1;
                lvl[i] += 1;
            }
        });
    }
    let maxes = per_level
        .into_iter()
        .map(|(j, v)| (j, v.into_iter().max().unwrap_or(0)))
        .collect();
    (total, maxes)
}

/// Whitney cover with radii `dist/8`, centers chosen per dyadic level by
/// greedy `2^{j−1}`-separation in lexicographic point order.
///
/// Levels are visited from the finest up; a sample already inside a chosen
/// ball is never promoted to a center.
pub fn whitney_cover(disc: &Discretization) -> Result<WhitneyCover> {
    let n = disc.n_interior();
    if n == 0 {
        return Err(Error::Empty("interior samples"));
    }
    let pts = disc.interior_points();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].lex_cmp(&pts[b]).then(a.cmp(&b)));

    let mut by_level: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for &i in &order {
        let r = disc.dist_values()[i] / 8.0;
        by_level.entry(dyadic_level(r)).or_default().push(i);
    }

    let mut balls: Vec<WhitneyBall> = Vec::new();
    let mut covered = vec![false; n];
    for (&j, cands) in &by_level {
        let sep = 2f64.powi(j - 1);
        let mut grid = SpatialHash::new(sep);
        for &i in cands {
            if covered[i] || !grid.is_separated(pts[i], sep) {
                continue;
            }
            grid.insert(pts[i]);
            let r = disc.dist_values()[i] / 8.0;
            disc.interior_index().for_each_within(pts[i], r, |k, d| {
                if d < r {
                    covered[k] = true;
                }
            });
            balls.push(WhitneyBall {
                center: i,
                p: pts[i],
                r,
                level: j,
                q: None,
                shadow: Vec::new(),
                expanded: Vec::new(),
            });
        }
    }

    let (total, maxes) = overlap_counts(&balls, disc);
    let mut levels: Vec<LevelStat> = maxes
        .iter()
        .map(|(&level, &max_overlap)| LevelStat {
            level,
            count: balls.iter().filter(|b| b.level == level).count(),
            max_overlap,
            dropped: 0,
        })
        .collect();
    levels.sort_by_key(|l| l.level);
    Ok(WhitneyCover {
        top_level: balls.iter().map(|b| b.level).max().expect("nonempty"),
        overlap: total.into_iter().max().unwrap_or(0),
        balls,
        levels,
        dropped: Vec::new(),
    })
}

/// Fills `q`, `U = B(q, r) ∩ ∂Ω` and `U* = B(q, 64r) ∩ ∂Ω` for every ball.
///
/// `q` is the nearest boundary sample (lowest index on ties). A ball whose
/// shadow comes out empty is moved to `dropped` and counted in the level
/// statistics.
pub fn boundary_shadows(cover: WhitneyCover, disc: &Discretization) -> Result<WhitneyCover> {
    if disc.n_boundary() == 0 {
        return Err(Error::Empty("boundary samples"));
    }
    let tree = disc.boundary_index();
    let filled: Vec<WhitneyBall> = cover
        .balls
        .into_par_iter()
        .map(|mut b| {
            let (q, _) = tree.nearest(b.p).expect("nonempty boundary");
            let qp = disc.boundary_points()[q];
            let open = |r: f64| {
                let mut v = Vec::new();
                tree.for_each_within(qp, r, |i, d| {
                    if d < r {
                        v.push(i);
                    }
                });
                v.sort_unstable();
                v
            };
            b.q = Some(q);
            b.shadow = open(b.r);
            b.expanded = open(EXPANDED_SHADOW_FACTOR * b.r);
            b
        })
        .collect();
    let (balls, dropped): (Vec<_>, Vec<_>) = filled.into_iter().partition(|b| !b.shadow.is_empty());
    let mut levels = cover.levels;
    for l in &mut levels {
        l.dropped = dropped.iter().filter(|b| b.level == l.level).count();
        l.count -= l.dropped;
    }
    Ok(WhitneyCover {
        balls,
        top_level: cover.top_level,
        overlap: cover.overlap,
        levels,
        dropped,
    })
}

/// Mask of interior samples with `ρ₁ ≤ dist(x, X∖Ω) < ρ₂`.
pub fn layer(disc: &Discretization, rho1: f64, rho2: f64) -> Result<Vec<bool>> {
    if !(rho1 >= 0.0 && rho1 < rho2 && rho2 <= disc.diam() / 2.0) {
        return Err(Error::InvalidLayer { rho1, rho2 });
    }
    Ok(disc
        .dist_values()
        .iter()
        .map(|&d| d >= rho1 && d < rho2)
        .collect())
}
