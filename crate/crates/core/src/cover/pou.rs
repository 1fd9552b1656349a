//! Partition of unity from normalized tent functions.

use super::WhitneyCover;
use crate::error::{Error, Result};
use crate::space::Discretization;
use rayon::prelude::*;

/// Neighbour radius, in units of the local spacing, for sampled quotients.
const QUOTIENT_RADIUS: f64 = 1.5;

/// `φ_b = t_b / Σ t`, with `t_b(x) = clamp(2 − d(x, p_b)/r_b, 0, 1)`.
///
/// Stored sample-major: the entries of sample `x` are
/// `balls[offsets[x]..offsets[x+1]]` (ascending) with matching `weights`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    offsets: Vec<usize>,
    balls: Vec<u32>,
    weights: Vec<f64>,
    /// Sampled difference quotient of each `φ_b` over neighbouring samples.
    lip: Vec<f64>,
    radii: Vec<f64>,
}

impl PartitionOfUnity {
    pub fn n_samples(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn n_balls(&self) -> usize {
        self.lip.len()
    }

    /// `(ball, φ_ball(x))` pairs with nonzero weight at sample `x`.
    pub fn at(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[x]..self.offsets[x + 1];
        self.balls[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&b, &w)| (b as usize, w))
    }

    pub fn phi(&self, ball: usize, x: usize) -> f64 {
        let r = self.offsets[x]..self.offsets[x + 1];
        match self.balls[r.clone()].binary_search(&(ball as u32)) {
            Ok(k) => self.weights[r][k],
            Err(_) => 0.0,
        }
    }

    /// `Σ_b φ_b(x)`.
    pub fn sum_at(&self, x: usize) -> f64 {
        crate::sum::sum(self.at(x).map(|(_, w)| w))
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lip
    }

    /// `C₀ = max_b r_b · quotient_b`.
    pub fn lipschitz_constant(&self) -> f64 {
        self.lip
            .iter()
            .zip(&self.radii)
            .map(|(l, r)| l * r)
            .fold(0.0, f64::max)
    }

    /// `Σ_b a_b φ_b(x)` at every sample.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.n_samples())
            .map(|x| crate::sum::sum(self.at(x).map(|(b, w)| coeffs[b] * w)))
            .collect()
    }
}

/// Builds the normalized-tent partition of unity subordinate to `cover`.
pub fn partition_of_unity(cover: &WhitneyCover, disc: &Discretization) -> Result<PartitionOfUnity> {
    let n = disc.n_interior();
    let hits: Vec<Vec<(usize, f64)>> = cover
        .balls
        .par_iter()
        .map(|b| {
            let mut v = Vec::new();
            disc.interior_index().for_each_within(b.p, 2.0 * b.r, |i, d| {
                let t = (2.0 - d / b.r).clamp(0.0, 1.0);
                if t > 0.0 {
                    v.push((i, t));
                }
            });
            v
        })
        .collect();

    let mut counts = vec![0usize; n + 1];
    for v in &hits {
        for &(i, _) in v {
            counts[i + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let offsets = counts;
    let mut fill = offsets.clone();
    let total = offsets[n];
    let mut balls = vec![0u32; total];
    let mut weights = vec![0.0; total];
    for (b, v) in hits.iter().enumerate() {
        for &(i, t) in v {
            balls[fill[i]] = b as u32;
            weights[fill[i]] = t;
            fill[i] += 1;
        }
    }
    for x in 0..n {
        let r = offsets[x]..offsets[x + 1];
        let s = crate::sum::sum(weights[r.clone()].iter().copied());
        if s <= 0.0 {
            return Err(Error::UncoveredSample(x));
        }
        for w in &mut weights[r] {
            *w /= s;
        }
    }

    let mut pou = PartitionOfUnity {
        offsets,
        balls,
        weights,
        lip: vec![0.0; cover.balls.len()],
        radii: cover.balls.iter().map(|b| b.r).collect(),
    };
    pou.lip = sampled_quotients(&pou, disc);
    Ok(pou)
}

/// Max over neighbouring sample pairs of `|φ_b(x) − φ_b(y)| / d(x, y)`.
fn sampled_quotients(pou: &PartitionOfUnity, disc: &Discretization) -> Vec<f64> {
    let pts = disc.interior_points();
    let mut lip = vec![0.0f64; pou.n_balls()];
    for x in 0..pts.len() {
        let rad = QUOTIENT_RADIUS * disc.interior_spacing()[x];
        let mut nbrs = Vec::new();
        disc.interior_index().for_each_within(pts[x], rad, |y, d| {
            if y > x && d > 0.0 {
                nbrs.push((y, d));
            }
        });
        for (y, d) in nbrs {
            let (mut a, mut b) = (pou.at(x).peekable(), pou.at(y).peekable());
            loop {
                let (ball, fx, fy) = match (a.peek().copied(), b.peek().copied()) {
                    (None, None) => break,
                    (Some((i, w)), None) => {
                        a.next();
                        (i, w, 0.0)
                    }
                    (None, Some((j, w))) => {
                        b.next();
                        (j, 0.0, w)
                    }
                    (Some((i, wi)), Some((j, wj))) => {
                        if i == j {
                            a.next();
                            b.next();
                            (i, wi, wj)
                        } else if i < j {
                            a.next();
                            (i, wi, 0.0)
                        } else {
                            b.next();
                            (j, 0.0, wj)
                        }
                    }
                };
                let q = (fx - fy).abs() / d;
                if q > lip[ball] {
                    lip[ball] = q;
                }
            }
        }
    }
    lip
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::whitney_cover;
    use crate::space::{build_domain, DomainSpec, Shape};

    fn setup(shape: Shape, h: f64) -> (Discretization, WhitneyCover, PartitionOfUnity) {
        let d = build_domain(&DomainSpec::new(shape, h)).unwrap();
        let c = whitney_cover(&d).unwrap();
        let p = partition_of_unity(&c, &d).unwrap();
        (d, c, p)
    }

    #[test]
    fn sums_to_one_with_support_in_2b() {
        let (d, c, p) = setup(Shape::UnitSquare, 1.0 / 64.0);
        for x in 0..d.n_interior() {
            assert!((p.sum_at(x) - 1.0).abs() <= 1e-9);
            for (b, w) in p.at(x) {
                assert!((0.0..=1.0).contains(&w));
                assert!(d.interior_points()[x].dist(c.balls[b].p) < 2.0 * c.balls[b].r);
            }
        }
    }

    #[test]
    fn quotients_bounded_by_ten_over_r() {
        let (_, c, p) = setup(Shape::LShape, 1.0 / 64.0);
        for (b, q) in p.lipschitz().iter().enumerate() {
            assert!(*q <= 10.0 / c.balls[b].r, "ball {b}: {q} vs {}", 10.0 / c.balls[b].r);
        }
        assert!(p.lipschitz_constant() <= 10.0);
    }

    #[test]
    fn lower_bound_on_own_ball() {
        let (d, c, p) = setup(Shape::Disc, 1.0 / 32.0);
        let k = c.overlap as f64;
        for (b, ball) in c.balls.iter().enumerate() {
            for x in d.interior_index().within(ball.p, ball.r) {
                if d.interior_points()[x].dist(ball.p) < ball.r {
                    assert!(p.phi(b, x) >= 1.0 / k - 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_ball_weight_is_one() {
        let (d, _, p) = setup(Shape::UnitSquare, 1.0 / 32.0);
        for x in 0..d.n_interior() {
            let entries: Vec<_> = p.at(x).collect();
            if entries.len() == 1 {
                assert_eq!(entries[0].1, 1.0);
            }
        }
    }
}
