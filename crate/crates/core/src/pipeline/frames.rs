//! Per-gridpoint Iwasawa split and diagonal gauge normalization.

use nalgebra::Matrix2;
use rayon::prelude::*;

use super::ode::AxisFrames;
use super::PipelineError;
use crate::factorization::{iwasawa_double_tracked, FactorError};
use crate::loops::{LoopPair, TailMass, TwistedLoop};

/// Gauged extended frame at one gridpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePoint {
    pub s: f64,
    pub t: f64,
    /// `F₀·F̂·diag(d, d⁻¹)` in both slots.
    pub frame: LoopPair,
    pub h_hat: f64,
    /// `log d`.
    pub gauge_log: f64,
    pub conditioning: f64,
    pub tail: f64,
}

/// A gridpoint excluded from the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Hole {
    pub i: usize,
    pub j: usize,
    pub s: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct FrameGrid {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row-major with `i` (the `s` index) fastest.
    pub points: Vec<Option<FramePoint>>,
    pub holes: Vec<Hole>,
    pub axis: AxisFrames,
    pub initial: Option<LoopPair>,
}

impl FrameGrid {
    pub fn ns(&self) -> usize {
        self.s_grid.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.ns() + i
    }

    pub fn point(&self, i: usize, j: usize) -> Option<&FramePoint> {
        self.points[self.index(i, j)].as_ref()
    }

    /// Gridpoint at the given coordinates, matched up to rounding.
    pub fn find(&self, s: f64, t: f64) -> Option<&FramePoint> {
        let i = locate(&self.s_grid, s)?;
        let j = locate(&self.t_grid, t)?;
        self.point(i, j)
    }

    pub fn max_conditioning(&self) -> f64 {
        self.points
            .iter()
            .flatten()
            .map(|p| p.conditioning)
            .fold(0.0, f64::max)
    }

    pub fn max_tail(&self) -> f64 {
        self.points.iter().flatten().map(|p| p.tail).fold(0.0, f64::max)
    }
}

/// Index of `x` in a sorted grid, tolerating rounding noise.
pub fn locate(grid: &[f64], x: f64) -> Option<usize> {
    let tol = 1e-12 * x.abs().max(1.0);
    let k = grid.partition_point(|&g| g < x - tol);
    (k < grid.len() && (grid[k] - x).abs() <= tol).then_some(k)
}

/// Iwasawa-splits `(Φ^s, Φ^t)` and gauges so that `Û₁₂ = −λ⁻¹ĥ/4`, `V̂₂₁ = λĥ/4`.
///
/// Returns the gauged loop `F̂·diag(d, d⁻¹)`, `ĥ`, `log d` and the condition estimate.
pub fn gauged_frame(
    phi_s: &TwistedLoop,
    phi_t: &TwistedLoop,
    xi_s: &Matrix2<f64>,
    xi_t: &Matrix2<f64>,
    tail: &mut TailMass,
) -> Result<(TwistedLoop, f64, f64, f64), GaugeOrFactor> {
    let iw = iwasawa_double_tracked(phi_s, phi_t, tail)?;
    // Û has λ⁻¹ coefficient ξ^s; V̂ has λ coefficient M₀ ξ^t M₀⁻¹ with M₀ = V̂₋(∞).
    let u12 = xi_s[(0, 1)];
    let m0 = iw.vminus.coeff(0);
    let v21 = xi_t[(1, 0)] * m0[(1, 1)] / m0[(0, 0)];
    if !(-u12 > 0.0 && v21 > 0.0) {
        return Err(GaugeOrFactor::Gauge {
            ratio: -u12 / v21,
        });
    }
    let gauge_log = 0.25 * (-u12 / v21).ln();
    let d = gauge_log.exp();
    let h_hat = 4.0 * (-u12 * v21).sqrt();
    let dm = TwistedLoop::constant(phi_s.order(), Matrix2::new(d, 0.0, 0.0, 1.0 / d))?;
    let frame = iw.frame.slot_s.mul_tracked(&dm, tail)?;
    Ok((frame, h_hat, gauge_log, iw.conditioning))
}

#[derive(Debug)]
pub enum GaugeOrFactor {
    Gauge { ratio: f64 },
    Factor(FactorError),
}

impl From<FactorError> for GaugeOrFactor {
    fn from(e: FactorError) -> Self {
        GaugeOrFactor::Factor(e)
    }
}

impl From<crate::loops::LoopError> for GaugeOrFactor {
    fn from(e: crate::loops::LoopError) -> Self {
        GaugeOrFactor::Factor(FactorError::Loop(e))
    }
}

/// Frames at every `(s_i, t_j)`; big-cell failures become holes.
///
/// `initial` must be a diagonal pair `(F₀, F₀)`; it multiplies the frames on the
/// left, which is the same as starting both ODEs at `F₀`.
pub fn build_extended_frames(
    axis: &AxisFrames,
    initial: Option<&LoopPair>,
    tail_bound: f64,
) -> Result<FrameGrid, PipelineError> {
    if let Some(f0) = initial {
        if f0.slot_s != f0.slot_t {
            return Err(PipelineError::InvalidInitialFrame(
                "the two slots of the initial loop must agree".into(),
            ));
        }
        if f0.order() != axis.phi_s[0].order() {
            return Err(PipelineError::InvalidInitialFrame(format!(
                "initial loop has order {} but the run uses {}",
                f0.order(),
                axis.phi_s[0].order()
            )));
        }
    }
    let ns = axis.s_grid.len();
    let nt = axis.t_grid.len();
    let outcomes: Vec<Result<Result<FramePoint, Hole>, PipelineError>> = (0..ns * nt)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % ns, idx / ns);
            let (s, t) = (axis.s_grid[i], axis.t_grid[j]);
            let mut tail = TailMass::new(tail_bound);
            tail.record(axis.tail_s[i] + axis.tail_t[j])
                .map_err(|source| PipelineError::Loop { s, t, source })?;
            match gauged_frame(&axis.phi_s[i], &axis.phi_t[j], &axis.xi_s[i], &axis.xi_t[j], &mut tail) {
                Ok((frame, h_hat, gauge_log, conditioning)) => {
                    let frame = match initial {
                        Some(f0) => f0
                            .slot_s
                            .mul_tracked(&frame, &mut tail)
                            .map_err(|source| PipelineError::Loop { s, t, source })?,
                        None => frame,
                    };
                    Ok(Ok(FramePoint {
                        s,
                        t,
                        frame: LoopPair::diagonal(frame),
                        h_hat,
                        gauge_log,
                        conditioning,
                        tail: tail.accumulated,
                    }))
                }
                Err(GaugeOrFactor::Factor(e @ FactorError::OutsideBigCell { .. })) => Ok(Err(Hole {
                    i,
                    j,
                    s,
                    t,
                    reason: e.to_string(),
                })),
                Err(GaugeOrFactor::Factor(FactorError::Loop(source))) => {
                    Err(PipelineError::Loop { s, t, source })
                }
                Err(GaugeOrFactor::Gauge { ratio }) => Err(PipelineError::GaugeFailure { s, t, ratio }),
            }
        })
        .collect();
    let mut points = Vec::with_capacity(ns * nt);
    let mut holes = Vec::new();
    for o in outcomes {
        match o? {
            Ok(p) => points.push(Some(p)),
            Err(h) => {
                holes.push(h);
                points.push(None);
            }
        }
    }
    Ok(FrameGrid {
        s_grid: axis.s_grid.clone(),
        t_grid: axis.t_grid.clone(),
        points,
        holes,
        axis: axis.clone(),
        initial: initial.cloned(),
    })
}
