//! Linear Whitney extension of boundary data and the layered extension of
//! `L¹` data.

mod approx;
mod layered;

pub use approx::{lipschitz_approximation, LipschitzApprox, LIP_GRID_STEPS};
pub use layered::{build_schedule, extend_l1, extend_with_schedule, LayerSchedule, ScheduleOptions, ScheduleRow};

use crate::cover::{boundary_shadows, layer, partition_of_unity, whitney_cover, PartitionOfUnity, WhitneyCover};
use crate::error::{Error, Result};
use crate::norms::{pointwise_lip, weighted_sum, FieldFn, DEFAULT_KAPPA};
use crate::space::{Discretization, Support};
use crate::sum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionKind {
    Besov,
    L1Layered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult {
    pub kind: ExtensionKind,
    /// `F` at the interior samples.
    pub values: FieldFn,
    /// Per-ball boundary means. Empty for layered results, whose stages
    /// each carry their own.
    pub coefficients: Vec<f64>,
    /// `Lip F` at the interior samples.
    pub lip: FieldFn,
    pub schedule: Option<LayerSchedule>,
}

impl ExtensionResult {
    /// `Σ Lip F · μ` over all interior samples.
    pub fn bv_energy(&self, disc: &Discretization) -> Result<f64> {
        weighted_sum(&self.lip, disc, None)
    }

    /// Rows `(x, y, F, Lip F)` for export.
    pub fn to_csv(&self, disc: &Discretization) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "y", "F", "LipF"])?;
        for (i, p) in disc.interior_points().iter().enumerate() {
            w.serialize((p.x, p.y, self.values.values()[i], self.lip.values()[i]))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8_lossy(&bytes).into_owned())
    }
}

/// Whitney cover with shadows and its partition of unity: everything the
/// linear extension needs besides the data.
#[derive(Debug, Clone)]
pub struct ExtensionOperator {
    pub cover: WhitneyCover,
    pub pou: PartitionOfUnity,
}

impl ExtensionOperator {
    pub fn new(disc: &Discretization) -> Result<Self> {
        let cover = boundary_shadows(whitney_cover(disc)?, disc)?;
        let pou = partition_of_unity(&cover, disc)?;
        Ok(ExtensionOperator { cover, pou })
    }

    pub fn apply(&self, f: &FieldFn, disc: &Discretization) -> Result<ExtensionResult> {
        extend_besov(f, &self.cover, &self.pou, disc)
    }
}

/// `F = Σ a_b φ_b` with `a_b` the `𝓗`-mean of `f` over the shadow of ball `b`.
pub fn extend_besov(
    f: &FieldFn,
    cover: &WhitneyCover,
    pou: &PartitionOfUnity,
    disc: &Discretization,
) -> Result<ExtensionResult> {
    let (values, coefficients) = extend_values(f, cover, pou, disc)?;
    let values = FieldFn::new(Support::Interior, values)?;
    let lip = pointwise_lip(&values, disc, DEFAULT_KAPPA)?.values;
    Ok(ExtensionResult {
        kind: ExtensionKind::Besov,
        values,
        coefficients,
        lip,
        schedule: None,
    })
}

/// `(F, coefficients)` without the `Lip F` pass.
pub(crate) fn extend_values(
    f: &FieldFn,
    cover: &WhitneyCover,
    pou: &PartitionOfUnity,
    disc: &Discretization,
) -> Result<(Vec<f64>, Vec<f64>)> {
    f.check(disc, Some(Support::Boundary))?;
    if pou.n_balls() != cover.len() || pou.n_samples() != disc.n_interior() {
        return Err(Error::InvalidParameter(
            "partition of unity does not match the cover".into(),
        ));
    }
    let w = disc.h_weights();
    let v = f.values();
    let coefficients = cover
        .balls
        .par_iter()
        .map(|b| {
            if b.shadow.is_empty() {
                return Err(Error::Empty("shadow set"));
            }
            let mass = sum::sum(b.shadow.iter().map(|&i| w[i]));
            if mass <= 0.0 {
                return Err(Error::ZeroWeight);
            }
            Ok(sum::sum(b.shadow.iter().map(|&i| w[i] * v[i])) / mass)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((pou.combine(&coefficients), coefficients))
}

/// Gradient and `L¹` parts of `F` over the layer `Ω(ρ₁, ρ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerEnergy {
    pub rho1: f64,
    pub rho2: f64,
    /// `∫ Lip F dμ` over the layer.
    pub gradient: f64,
    /// `∫ |F| dμ` over the layer.
    pub l1: f64,
}

pub fn layer_energy(result: &ExtensionResult, rho1: f64, rho2: f64, disc: &Discretization) -> Result<LayerEnergy> {
    result.values.check(disc, Some(Support::Interior))?;
    let mask = layer(disc, rho1, rho2)?;
    let abs = FieldFn::new(
        Support::Interior,
        result.values.values().iter().map(|v| v.abs()).collect(),
    )?;
    Ok(LayerEnergy {
        rho1,
        rho2,
        gradient: weighted_sum(&result.lip, disc, Some(&mask))?,
        l1: weighted_sum(&abs, disc, Some(&mask))?,
    })
}
