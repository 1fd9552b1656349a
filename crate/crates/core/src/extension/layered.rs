//! Layered extension of `L¹` boundary data: Lipschitz stages glued on
//! thinner and thinner collars.

use super::approx::lipschitz_approximation;
use super::{extend_values, ExtensionKind, ExtensionResult};
use crate::cover::{PartitionOfUnity, WhitneyCover};
use crate::error::{Error, Result};
use crate::norms::{l1_norm, lip_constant, pointwise_lip, FieldFn, DEFAULT_KAPPA};
use crate::space::{Discretization, Support};
use crate::sum::Compensated;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOptions {
    pub k_max: usize,
    /// Stop once the stage gap bound `2^{2−k}‖f‖` falls below this.
    pub tolerance: f64,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions {
            k_max: 20,
            tolerance: 0.0,
        }
    }
}

/// Report row for stage `k` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub k: usize,
    pub rho_k: f64,
    pub lip_fk: f64,
    /// `‖f_k − f‖_{L¹(∂Ω)}`.
    pub l1_err_k: f64,
}

/// Stages `f_1 ≡ 0, f_2, …, f_K`, radii `ρ_1 > … > ρ_K` and cutoffs
/// `ψ_1, …, ψ_{K−1}`; `ψ_K ≡ 0` closes the finite sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSchedule {
    pub stages: Vec<FieldFn>,
    pub lips: Vec<f64>,
    pub radii: Vec<f64>,
    pub cutoffs: Vec<FieldFn>,
    pub data_l1: f64,
    pub rows: Vec<ScheduleRow>,
}

impl LayerSchedule {
    pub fn depth(&self) -> usize {
        self.stages.len()
    }

    /// Builds a schedule from explicit stages and radii.
    pub fn from_stages(f: &FieldFn, disc: &Discretization, stages: Vec<FieldFn>, radii: Vec<f64>) -> Result<Self> {
        if stages.len() < 2 {
            return Err(Error::KMaxTooSmall(stages.len()));
        }
        if radii.len() != stages.len() {
            return Err(Error::LengthMismatch {
                expected: stages.len(),
                got: radii.len(),
            });
        }
        if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > 0.0 && w[1] <= 0.5 * w[0])) {
            return Err(Error::InvalidParameter("radii must halve at least at every stage".into()));
        }
        for s in &stages {
            s.check(disc, Some(Support::Boundary))?;
        }
        let lips = stages
            .iter()
            .map(|s| if disc.n_boundary() > 1 { lip_constant(s, disc, None) } else { Ok(0.0) })
            .collect::<Result<Vec<_>>>()?;
        let dist = disc.dist_values();
        let cutoffs = (0..stages.len() - 1)
            .map(|k| {
                let (a, b) = (radii[k], radii[k + 1]);
                FieldFn::new(
                    Support::Interior,
                    dist.iter().map(|d| ((a - d) / (a - b)).clamp(0.0, 1.0)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = stages
            .iter()
            .enumerate()
            .map(|(k, s)| {
                Ok(ScheduleRow {
                    k: k + 1,
                    rho_k: radii[k],
                    lip_fk: lips[k],
                    l1_err_k: l1_norm(&s.axpby(1.0, f, -1.0)?, disc)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerSchedule {
            stages,
            lips,
            radii,
            cutoffs,
            data_l1: l1_norm(f, disc)?,
            rows,
        })
    }

    /// `Σ_{k<K} ρ_k · LIP(f_{k+1})`.
    pub fn lip_sum(&self) -> f64 {
        crate::sum::sum((0..self.depth() - 1).map(|k| self.radii[k] * self.lips[k + 1]))
    }

    /// `max_k ‖f_{k+1} − f_k‖ / (2^{2−k}‖f‖)`, at most 1 when the decay holds.
    pub fn decay_ratio(&self, disc: &Discretization) -> Result<f64> {
        if self.data_l1 == 0.0 {
            return Ok(0.0);
        }
        let mut worst: f64 = 0.0;
        for k in 1..self.depth() {
            let diff = l1_norm(&self.stages[k].axpby(1.0, &self.stages[k - 1], -1.0)?, disc)?;
            worst = worst.max(diff / (2f64.powi(2 - k as i32) * self.data_l1));
        }
        Ok(worst)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rows)?)
    }
}

/// `f_{k+1}` approximates `f` to `2^{−k}‖f‖`, which makes consecutive stages
/// differ by at most `3·2^{−k}‖f‖ ≤ 2^{2−k}‖f‖`.
///
/// `ρ_1 = min(diam/4, ‖f‖/(2(1 + LIP f_2)))`,
/// `ρ_k = min(ρ_{k−1}/2, 2^{−k}‖f‖/(1 + LIP f_{k+1}))`, and the last radius is
/// half the previous one. Stops at `K_max` stages, when the next collar would
/// be thinner than the mesh, or when `2^{2−k}‖f‖` drops below the tolerance.
pub fn build_schedule(f: &FieldFn, disc: &Discretization, opts: &ScheduleOptions) -> Result<LayerSchedule> {
    f.check(disc, Some(Support::Boundary))?;
    if opts.k_max < 2 {
        return Err(Error::KMaxTooSmall(opts.k_max));
    }
    let norm = l1_norm(f, disc)?;
    let zero = f.zeros_like();
    if norm == 0.0 {
        let r = disc.diam() / 4.0;
        return LayerSchedule::from_stages(f, disc, vec![zero.clone(), zero], vec![r, r / 2.0]);
    }
    let mut stages = vec![zero];
    let mut radii: Vec<f64> = Vec::new();
    for k in 1i32.. {
        if k as usize + 1 > opts.k_max {
            break;
        }
        let approx = lipschitz_approximation(f, disc, 2f64.powi(-k) * norm)?;
        let cap = 2f64.powi(-k) * norm / (1.0 + approx.lip);
        let rho = match radii.last() {
            None => cap.min(disc.diam() / 4.0),
            Some(&prev) => {
                let rho = cap.min(prev / 2.0);
                if prev - rho < disc.mesh_h() {
                    break;
                }
                rho
            }
        };
        radii.push(rho);
        stages.push(approx.g);
        if 2f64.powi(1 - k) * norm < opts.tolerance {
            break;
        }
    }
    let last = *radii.last().expect("at least one radius");
    radii.push(last / 2.0);
    LayerSchedule::from_stages(f, disc, stages, radii)
}

/// `F = Σ_{k=2}^{K} (ψ_{k−1} − ψ_k) Ef_k` with `ψ_K ≡ 0`.
pub fn extend_with_schedule(
    schedule: LayerSchedule,
    cover: &WhitneyCover,
    pou: &PartitionOfUnity,
    disc: &Discretization,
) -> Result<ExtensionResult> {
    let k = schedule.depth();
    let stage_ext: Vec<Vec<f64>> = schedule.stages[1..]
        .par_iter()
        .map(|s| extend_values(s, cover, pou, disc).map(|(v, _)| v))
        .collect::<Result<_>>()?;
    let n = disc.n_interior();
    let values: Vec<f64> = (0..n)
        .map(|x| {
            let mut acc = Compensated::new();
            for stage in 2..=k {
                let outer = schedule.cutoffs[stage - 2].values()[x];
                let inner = if stage < k {
                    schedule.cutoffs[stage - 1].values()[x]
                } else {
                    0.0
                };
                let wgt = outer - inner;
                if wgt != 0.0 {
                    acc.add(wgt * stage_ext[stage - 2][x]);
                }
            }
            acc.value()
        })
        .collect();
    let values = FieldFn::new(Support::Interior, values)?;
    let lip = pointwise_lip(&values, disc, DEFAULT_KAPPA)?.values;
    Ok(ExtensionResult {
        kind: ExtensionKind::L1Layered,
        values,
        coefficients: Vec::new(),
        lip,
        schedule: Some(schedule),
    })
}

/// Builds the schedule for `f` and glues the stage extensions.
pub fn extend_l1(
    f: &FieldFn,
    cover: &WhitneyCover,
    pou: &PartitionOfUnity,
    disc: &Discretization,
    opts: &ScheduleOptions,
) -> Result<ExtensionResult> {
    let schedule = build_schedule(f, disc, opts)?;
    extend_with_schedule(schedule, cover, pou, disc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::ExtensionOperator;
    use crate::space::{build_domain, DomainSpec, Shape};

    fn setup(h: f64) -> (Discretization, ExtensionOperator) {
        let d = build_domain(&DomainSpec::new(Shape::UnitSquare, h)).unwrap();
        let op = ExtensionOperator::new(&d).unwrap();
        (d, op)
    }

    fn step(d: &Discretization) -> FieldFn {
        FieldFn::boundary(d, |p| f64::from(u8::from(p.x < 0.5))).unwrap()
    }

    #[test]
    fn zero_data_gives_trivial_schedule() {
        let (d, _) = setup(1.0 / 32.0);
        let f = FieldFn::constant(&d, Support::Boundary, 0.0).unwrap();
        let s = build_schedule(&f, &d, &ScheduleOptions::default()).unwrap();
        assert_eq!(s.depth(), 2);
        assert!(s.stages.iter().all(|g| g.values().iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn k_max_below_two_is_rejected() {
        let (d, _) = setup(1.0 / 32.0);
        let f = step(&d);
        let opts = ScheduleOptions { k_max: 1, ..Default::default() };
        assert!(matches!(build_schedule(&f, &d, &opts), Err(Error::KMaxTooSmall(1))));
    }

    #[test]
    fn schedule_invariants_for_step() {
        let (d, _) = setup(1.0 / 64.0);
        let f = step(&d);
        let s = build_schedule(&f, &d, &ScheduleOptions::default()).unwrap();
        assert!(s.depth() >= 3, "{}", s.depth());
        assert!(s.radii[0] <= d.diam() / 2.0);
        assert!(s.radii.windows(2).all(|w| w[1] > 0.0 && w[1] <= w[0] / 2.0));
        assert!(s.decay_ratio(&d).unwrap() <= 1.0);
        assert!(s.lip_sum() <= 2.0 * s.data_l1);
        assert!(s.stages[0].values().iter().all(|v| *v == 0.0));
        // cutoffs match the closed form at every sample
        for (k, psi) in s.cutoffs.iter().enumerate() {
            for (x, v) in psi.values().iter().enumerate() {
                let dist = d.dist_values()[x];
                let want = ((s.radii[k] - dist) / (s.radii[k] - s.radii[k + 1])).clamp(0.0, 1.0);
                assert_eq!(*v, want);
            }
        }
    }

    #[test]
    fn constant_data_is_reproduced_inside_second_radius() {
        let (d, op) = setup(1.0 / 32.0);
        let f = FieldFn::constant(&d, Support::Boundary, 1.5).unwrap();
        let e = extend_l1(&f, &op.cover, &op.pou, &d, &ScheduleOptions::default()).unwrap();
        let rho2 = e.schedule.as_ref().unwrap().radii[1];
        for (x, v) in e.values.values().iter().enumerate() {
            if d.dist_values()[x] <= rho2 {
                assert!((v - 1.5).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn two_stage_schedule_reproduces_linear_extension() {
        let (d, op) = setup(1.0 / 32.0);
        let f = FieldFn::boundary(&d, |p| p.x + 0.5 * p.y).unwrap();
        let s = LayerSchedule::from_stages(&f, &d, vec![f.zeros_like(), f.clone()], vec![0.25, 0.125]).unwrap();
        let layered = extend_with_schedule(s, &op.cover, &op.pou, &d).unwrap();
        let linear = op.apply(&f, &d).unwrap();
        for x in 0..d.n_interior() {
            if d.dist_values()[x] <= 0.125 {
                assert_eq!(layered.values.values()[x], linear.values.values()[x]);
            }
        }
    }

    #[test]
    fn range_band_holds() {
        let (d, op) = setup(1.0 / 32.0);
        let f = FieldFn::boundary(&d, |p| 2.0 * f64::from(u8::from(p.y > 0.5)) - 0.5).unwrap();
        let e = extend_l1(&f, &op.cover, &op.pou, &d, &ScheduleOptions::default()).unwrap();
        let k = e.schedule.as_ref().unwrap().depth();
        let eps = 2f64.powi(2 - k as i32) * l1_norm(&f, &d).unwrap();
        let (lo, hi) = (f.min().min(0.0) - eps, f.max().max(0.0) + eps);
        assert!(e.values.min() >= lo && e.values.max() <= hi);
    }

    #[test]
    fn outer_layers_depend_only_on_early_stages() {
        let (d, op) = setup(1.0 / 64.0);
        let f = step(&d);
        let s = build_schedule(&f, &d, &ScheduleOptions::default()).unwrap();
        let k = 2;
        let mut t = s.clone();
        for stage in t.stages.iter_mut().skip(k) {
            *stage = FieldFn::boundary(&d, |p| 10.0 * p.y).unwrap();
        }
        let a = extend_with_schedule(s.clone(), &op.cover, &op.pou, &d).unwrap();
        let b = extend_with_schedule(t, &op.cover, &op.pou, &d).unwrap();
        let mut checked = 0;
        for x in 0..d.n_interior() {
            if d.dist_values()[x] >= s.radii[k - 1] {
                assert_eq!(a.values.values()[x].to_bits(), b.values.values()[x].to_bits());
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
