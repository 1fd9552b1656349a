//! Covering estimate of the codimension-1 Hausdorff measure
//! `Σ μ(B_i)/rad(B_i)` over balls centered at boundary samples.

use super::Discretization;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::index::KdTree;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffRow {
    pub delta: f64,
    pub value: f64,
    pub balls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEstimate {
    /// Value at the smallest δ.
    pub value: f64,
    pub table: Vec<HausdorffRow>,
}

/// `(k + ½)·s` for `k = 32, 16, 8, 4, 2`: an odd number of samples per ball
/// on a straight run of spacing `s`.
pub fn default_delta_ladder(spacing: f64) -> Vec<f64> {
    [32.0, 16.0, 8.0, 4.0, 2.0]
        .iter()
        .map(|k| (k + 0.5) * spacing)
        .collect()
}

/// Number of balls chosen by greedy max-coverage over closed `δ`-balls
/// centered at the selected samples. Ties go to the lowest index.
fn greedy_cover(points: &[Point], idx: &[usize], delta: f64) -> usize {
    let local: Vec<Point> = idx.iter().map(|&i| points[i]).collect();
    let tree = KdTree::new(&local);
    let nbrs: Vec<Vec<usize>> = local.iter().map(|p| tree.within(*p, delta)).collect();
    let mut covered = vec![false; local.len()];
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        nbrs.iter().enumerate().map(|(i, n)| (n.len(), Reverse(i))).collect();
    let mut balls = 0;
    let mut left = local.len();
    while left > 0 {
        let Some((bound, Reverse(i))) = heap.pop() else {
            break;
        };
        let gain = nbrs[i].iter().filter(|&&j| !covered[j]).count();
        if gain == 0 {
            continue;
        }
        if gain < bound {
            heap.push((gain, Reverse(i)));
            continue;
        }
        for &j in &nbrs[i] {
            if !covered[j] {
                covered[j] = true;
                left -= 1;
            }
        }
        balls += 1;
    }
    balls
}

pub(crate) fn codim1_on_samples(points: &[Point], idx: &[usize], deltas: &[f64]) -> HausdorffEstimate {
    let table: Vec<HausdorffRow> = deltas
        .iter()
        .map(|&delta| {
            let balls = greedy_cover(points, idx, delta);
            // μ(B)/rad(B) = πδ²/δ for the ambient planar measure
            HausdorffRow {
                delta,
                value: balls as f64 * PI * delta,
                balls,
            }
        })
        .collect();
    HausdorffEstimate {
        value: table.last().map_or(0.0, |r| r.value),
        table,
    }
}

/// Covering estimate of `𝓗` of the masked boundary samples.
///
/// `deltas` must be strictly decreasing with smallest value at least twice the
/// largest masked sample spacing; `None` uses [`default_delta_ladder`].
pub fn codim1_hausdorff(
    disc: &Discretization,
    mask: &[bool],
    deltas: Option<&[f64]>,
) -> Result<HausdorffEstimate> {
    if mask.len() != disc.n_boundary() {
        return Err(Error::MaskLength {
            expected: disc.n_boundary(),
            got: mask.len(),
        });
    }
    let idx: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    if idx.is_empty() {
        return Ok(HausdorffEstimate {
            value: 0.0,
            table: Vec::new(),
        });
    }
    let spacing = idx
        .iter()
        .map(|&i| disc.boundary_samples()[i].spacing)
        .fold(0.0, f64::max);
    let ladder = match deltas {
        Some(d) => d.to_vec(),
        None => default_delta_ladder(spacing),
    };
    if ladder.is_empty() || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::NotDecreasing);
    }
    let min = *ladder.last().expect("nonempty");
    if min < 2.0 * spacing {
        return Err(Error::DeltaBelowResolution {
            delta: min,
            resolution: 2.0 * spacing,
        });
    }
    Ok(codim1_on_samples(disc.boundary_points(), &idx, &ladder))
}
