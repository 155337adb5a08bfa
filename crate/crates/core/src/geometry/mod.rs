//! Nil₃ geometry and finite-difference verification of generated surfaces.

pub mod fd;
pub mod gauss;
pub mod nil;
pub mod residuals;
pub mod spinors;

use thiserror::Error;

use crate::pipeline::PipelineError;

pub use gauss::{pi_minus_l3, pi_minus_l3_inv, pi_plus_nil, spinor_gauss_map, spinor_normal};
pub use nil::{metric, nil_metric_and_bracket, sym_bracket, NilPoint};
pub use residuals::{
    first_fundamental_form, mean_curvature_l3, minimality_residual, normal_residual, surface_field,
    ResidualField, ResidualReport, Space, SurfaceChannel, NOISE_MARGIN,
};
pub use spinors::{
    abresch_rosenberg, abresch_rosenberg_holomorphy, dirac_potential_real_part, dirac_residuals,
    flatness_residual, spinor_field, SpinorField, SpinorPoint,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("no sample at (s, t) = ({s}, {t})")]
    MissingSample { s: f64, t: f64 },
    #[error("{check}: finite-difference noise {noise:e} exceeds threshold {threshold:e}")]
    GridTooCoarse {
        check: String,
        noise: f64,
        threshold: f64,
    },
    #[error("degenerate metric at (s, t) = ({s}, {t})")]
    DegenerateMetric { s: f64, t: f64 },
    #[error("stereographic projection at its pole (x3 = {x3})")]
    ProjectionPole { x3: f64 },
    #[error("frame at (s, t) = ({s}, {t}) has non-positive h = {h}")]
    GaugeFailure { s: f64, t: f64, h: f64 },
    #[error("spinors vanish")]
    DegenerateSpinors,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}
