//! Besov `B^θ_{1,1}` seminorm on the boundary: dyadic, kernel and
//! fixed-ball estimators.

use super::{l1_norm, FieldFn, NormKind, NormReport, ScaleRow};
use crate::cover::greedy_net;
use crate::error::{Error, Result};
use crate::space::{Discretization, Support};
use crate::sum::{self, Compensated};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesovMethod {
    Dyadic,
    Kernel,
    FixedBalls,
}

impl BesovMethod {
    pub fn name(self) -> &'static str {
        match self {
            BesovMethod::Dyadic => "dyadic",
            BesovMethod::Kernel => "kernel",
            BesovMethod::FixedBalls => "fixed-balls",
        }
    }

    pub const ALL: [BesovMethod; 3] = [BesovMethod::Dyadic, BesovMethod::Kernel, BesovMethod::FixedBalls];
}

/// Smallest distance between two distinct boundary samples.
pub fn min_boundary_gap(disc: &Discretization) -> f64 {
    let pts = disc.boundary_points();
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut best = f64::INFINITY;
            let rad = 2.0 * disc.spacing_at(Support::Boundary, i);
            disc.boundary_index().for_each_within(pts[i], rad, |_, d| {
                if d > 0.0 {
                    best = best.min(d);
                }
            });
            best
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Exponents `ℓ` with `2·gap ≤ 2^ℓ ≤ R`.
fn dyadic_exponents(gap: f64, r_scale: f64) -> Vec<i32> {
    let lo = (2.0 * gap).log2().ceil() as i32;
    let hi = r_scale.log2().floor() as i32;
    (lo..=hi).collect()
}

/// `Σ_ℓ 2^{−ℓθ} ∫ ⨍_{B(x, 2^ℓ)} |f(y) − f(x)| dν(y) dν(x)` and its variants.
///
/// Balls are closed. A ball holding only its center counts as degenerate and
/// contributes 0. The reported `value` adds the `L¹` part.
pub fn besov_seminorm(
    f: &FieldFn,
    disc: &Discretization,
    theta: f64,
    r_scale: f64,
    method: BesovMethod,
) -> Result<NormReport> {
    f.check(disc, Some(Support::Boundary))?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, 1]")));
    }
    if disc.n_boundary() == 0 {
        return Err(Error::Empty("boundary samples"));
    }
    let gap = min_boundary_gap(disc);
    if !(r_scale > 2.0 * gap && r_scale <= 2.0 * disc.diam()) {
        return Err(Error::InvalidParameter(format!(
            "R = {r_scale} outside ({}, {}]",
            2.0 * gap,
            2.0 * disc.diam()
        )));
    }
    let ells = dyadic_exponents(gap, r_scale);
    if ells.is_empty() {
        return Err(Error::InvalidParameter(format!("no dyadic scale in [{}, {r_scale}]", 2.0 * gap)));
    }
    let scales: Vec<f64> = ells.iter().map(|&l| 2f64.powi(l)).collect();
    let (contrib, degenerate) = match method {
        BesovMethod::Dyadic => dyadic(f, disc, &scales),
        BesovMethod::Kernel => kernel(f, disc, &scales, theta, r_scale),
        BesovMethod::FixedBalls => fixed_balls(f, disc, &scales),
    };
    let weight = |s: f64| match method {
        BesovMethod::Kernel => 1.0,
        _ => s.powf(-theta),
    };
    let table: Vec<ScaleRow> = scales
        .iter()
        .zip(&contrib)
        .zip(&degenerate)
        .map(|((&s, &c), &d)| ScaleRow {
            scale: s,
            contribution: weight(s) * c,
            degenerate_ball_count: d,
        })
        .collect();
    let seminorm = sum::sum(table.iter().map(|r| r.contribution));
    let l1 = l1_norm(f, disc)?;
    Ok(NormReport {
        kind: NormKind::Besov,
        method: method.name().to_string(),
        theta,
        tau: None,
        r_scale,
        value: l1 + seminorm,
        seminorm,
        l1,
        degenerate_balls: degenerate.iter().sum(),
        table,
    })
}

/// Index of the smallest scale `≥ d`, clamped to the last one.
fn bin(scales: &[f64], d: f64) -> usize {
    scales.partition_point(|&s| s < d).min(scales.len() - 1)
}

/// Accumulates per-scale totals from per-point vectors in point order.
fn gather(per_point: Vec<(Vec<f64>, Vec<bool>)>, n_scales: usize) -> (Vec<f64>, Vec<usize>) {
    let mut acc = vec![Compensated::new(); n_scales];
    let mut deg = vec![0usize; n_scales];
    for (c, d) in per_point {
        for k in 0..n_scales {
            acc[k].add(c[k]);
            deg[k] += usize::from(d[k]);
        }
    }
    (acc.iter().map(Compensated::value).collect(), deg)
}

fn dyadic(f: &FieldFn, disc: &Discretization, scales: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let pts = disc.boundary_points();
    let w = disc.h_weights();
    let v = f.values();
    let top = *scales.last().unwrap();
    let l = scales.len();
    let per_point: Vec<(Vec<f64>, Vec<bool>)> = (0..pts.len())
        .into_par_iter()
        .map(|x| {
            // shell sums: pairs with scales[k-1] < d ≤ scales[k]
            let mut num = vec![Compensated::new(); l];
            let mut den = vec![Compensated::new(); l];
            let mut cnt = vec![0usize; l];
            for y in 0..pts.len() {
                if y == x {
                    continue;
                }
                let d = pts[x].dist(pts[y]);
                if d > top {
                    continue;
                }
                let k = bin(scales, d);
                num[k].add(w[y] * (v[y] - v[x]).abs());
                den[k].add(w[y]);
                cnt[k] += 1;
            }
            let (mut n, mut m, mut c) = (Compensated::new(), Compensated::new(), 0usize);
            m.add(w[x]);
            let mut out = vec![0.0; l];
            let mut degenerate = vec![false; l];
            for k in 0..l {
                n.add(num[k].value());
                m.add(den[k].value());
                c += cnt[k];
                if c == 0 {
                    degenerate[k] = true;
                } else {
                    out[k] = w[x] * n.value() / m.value();
                }
            }
            (out, degenerate)
        })
        .collect();
    gather(per_point, l)
}

fn kernel(f: &FieldFn, disc: &Discretization, scales: &[f64], theta: f64, r_scale: f64) -> (Vec<f64>, Vec<usize>) {
    let pts = disc.boundary_points();
    let w = disc.h_weights();
    let v = f.values();
    let l = scales.len();
    let per_point: Vec<(Vec<f64>, Vec<bool>)> = (0..pts.len())
        .into_par_iter()
        .map(|x| {
            let mut near: Vec<(f64, usize)> = (0..pts.len())
                .filter(|&y| y != x)
                .map(|y| (pts[x].dist(pts[y]), y))
                .filter(|&(d, _)| d < r_scale)
                .collect();
            near.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut acc = vec![Compensated::new(); l];
            let mut ball = Compensated::new();
            ball.add(w[x]);
            let mut i = 0;
            while i < near.len() {
                // the closed ball at radius d takes in every tied sample first
                let d = near[i].0;
                let mut j = i;
                while j < near.len() && near[j].0 == d {
                    ball.add(w[near[j].1]);
                    j += 1;
                }
                if d > 0.0 {
                    let denom = ball.value() * d.powf(theta);
                    let k = bin(scales, d);
                    for &(_, y) in &near[i..j] {
                        acc[k].add(w[x] * w[y] * (v[x] - v[y]).abs() / denom);
                    }
                }
                i = j;
            }
            let mut degenerate = vec![false; l];
            if near.is_empty() {
                degenerate[0] = true;
            }
            (acc.iter().map(Compensated::value).collect(), degenerate)
        })
        .collect();
    gather(per_point, l)
}

/// Ball family at radius `t`: centers of a greedy `t/2`-net, balls `B(c, t)`.
fn fixed_balls(f: &FieldFn, disc: &Discretization, scales: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let pts = disc.boundary_points();
    let w = disc.h_weights();
    let v = f.values();
    let rows: Vec<(f64, usize)> = scales
        .par_iter()
        .map(|&t| {
            let net = greedy_net(pts, t / 2.0, 2.0);
            let mut acc = Compensated::new();
            let mut degenerate = 0;
            for &c in &net.centers {
                let mut members = Vec::new();
                disc.boundary_index().for_each_within(pts[c], t, |i, d| {
                    if d < t {
                        members.push(i);
                    }
                });
                members.sort_unstable();
                if members.len() < 2 {
                    degenerate += 1;
                    continue;
                }
                let mass = sum::sum(members.iter().map(|&i| w[i]));
                let mean = sum::sum(members.iter().map(|&i| w[i] * v[i])) / mass;
                acc.add(sum::sum(members.iter().map(|&i| w[i] * (v[i] - mean).abs())));
            }
            (acc.value(), degenerate)
        })
        .collect();
    rows.into_iter().unzip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_domain, DomainSpec, Shape};

    fn square(h: f64) -> Discretization {
        build_domain(&DomainSpec::new(Shape::UnitSquare, h)).unwrap()
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let d = square(1.0 / 64.0);
        let c = FieldFn::constant(&d, Support::Boundary, 2.0).unwrap();
        for m in BesovMethod::ALL {
            let rep = besov_seminorm(&c, &d, 0.5, 1.0, m).unwrap();
            assert_eq!(rep.seminorm, 0.0, "{m:?}");
            let s = sum::sum(rep.table.iter().map(|r| r.contribution));
            assert!((s - rep.seminorm).abs() <= 1e-9);
        }
    }

    #[test]
    fn half_indicator_dyadic_and_kernel_agree() {
        let d = square(1.0 / 128.0);
        let f = FieldFn::boundary(&d, |p| f64::from(u8::from(p.x < 0.5))).unwrap();
        let a = besov_seminorm(&f, &d, 0.0, 1.0, BesovMethod::Dyadic).unwrap().seminorm;
        let b = besov_seminorm(&f, &d, 0.0, 1.0, BesovMethod::Kernel).unwrap().seminorm;
        assert!(a > 0.0 && b > 0.0);
        assert!((0.1..=10.0).contains(&(a / b)), "{a} {b}");
    }

    /// Direct double sum for one scale, closed balls.
    fn brute_dyadic_scale(f: &FieldFn, d: &Discretization, t: f64) -> f64 {
        let (p, w, v) = (d.boundary_points(), d.h_weights(), f.values());
        let mut total = 0.0;
        for x in 0..p.len() {
            let (mut num, mut den) = (0.0, 0.0);
            for y in 0..p.len() {
                if p[x].dist(p[y]) <= t {
                    num += w[y] * (v[y] - v[x]).abs();
                    den += w[y];
                }
            }
            total += w[x] * num / den;
        }
        total
    }

    #[test]
    fn dyadic_rows_match_brute_force() {
        let d = square(1.0 / 32.0);
        let f = FieldFn::boundary(&d, |p| (3.0 * p.x).sin() + p.y * p.y).unwrap();
        let rep = besov_seminorm(&f, &d, 0.3, 1.0, BesovMethod::Dyadic).unwrap();
        for row in &rep.table {
            let want = row.scale.powf(-0.3) * brute_dyadic_scale(&f, &d, row.scale);
            assert!((row.contribution - want).abs() <= 1e-9 * want.max(1.0), "{row:?} {want}");
        }
    }

    #[test]
    fn kernel_matches_brute_force() {
        let d = square(1.0 / 16.0);
        let f = FieldFn::boundary(&d, |p| p.x * p.y + p.x).unwrap();
        let (p, w, v) = (d.boundary_points(), d.h_weights(), f.values());
        let r = 1.0;
        let mut want = 0.0;
        for x in 0..p.len() {
            for y in 0..p.len() {
                let dxy = p[x].dist(p[y]);
                if y == x || dxy >= r {
                    continue;
                }
                let ball: f64 = (0..p.len()).filter(|&z| p[x].dist(p[z]) <= dxy).map(|z| w[z]).sum();
                want += w[x] * w[y] * (v[x] - v[y]).abs() / (ball * dxy.powf(0.5));
            }
        }
        let got = besov_seminorm(&f, &d, 0.5, r, BesovMethod::Kernel).unwrap().seminorm;
        assert!((got - want).abs() <= 1e-9 * want, "{got} {want}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = square(1.0 / 32.0);
        let f = FieldFn::boundary(&d, |p| p.x).unwrap();
        assert!(besov_seminorm(&f, &d, 0.5, 1e-3, BesovMethod::Dyadic).is_err());
        assert!(besov_seminorm(&f, &d, 0.5, 10.0, BesovMethod::Dyadic).is_err());
        assert!(besov_seminorm(&f, &d, 1.5, 1.0, BesovMethod::Dyadic).is_err());
        let g = FieldFn::interior(&d, |p| p.x).unwrap();
        assert!(matches!(
            besov_seminorm(&g, &d, 0.5, 1.0, BesovMethod::Dyadic),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn nondecreasing_in_theta_with_unit_scale() {
        let d = square(1.0 / 32.0);
        let f = FieldFn::boundary(&d, |p| f64::from(u8::from(p.y > 0.5)) + p.x).unwrap();
        for m in BesovMethod::ALL {
            let vals: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&t| besov_seminorm(&f, &d, t, 1.0, m).unwrap().seminorm)
                .collect();
            assert!(vals.windows(2).all(|p| p[1] >= p[0]), "{m:?} {vals:?}");
        }
    }
}
