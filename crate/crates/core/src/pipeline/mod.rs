//! Potential → holomorphic frames → Iwasawa → gauge → Sym, and back.

pub mod builtins;
pub mod frames;
pub mod normalized;
pub mod ode;
pub mod potential;
pub mod sym;
pub mod weierstrass;

use thiserror::Error;

use crate::factorization::FactorError;
use crate::loops::{LoopError, LoopPair, DEFAULT_ORDER, DEFAULT_TAIL_BOUND};

pub use frames::{build_extended_frames, FrameGrid, FramePoint, Hole};
pub use normalized::{extract_normalized_potential, NormalizedPotential};
pub use ode::{solve_frame_ode, AxisFrames};
pub use potential::{constant_fn, translate_potential, PotentialSpec, Provenance, ScalarFn};
pub use sym::{sym_map, sym_point, SurfaceGrid, SymSample};
pub use weierstrass::{weierstrass_integral_l3, IntegralSurface, Quadrature};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("potential coefficient {which} vanishes at {at}")]
    DegeneratePotential { which: &'static str, at: f64 },
    #[error("potential coefficient {which} is not finite at {at}")]
    PotentialEval { which: &'static str, at: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid initial frame: {0}")]
    InvalidInitialFrame(String),
    #[error("at (s, t) = ({s}, {t}): {source}")]
    Loop {
        s: f64,
        t: f64,
        #[source]
        source: LoopError,
    },
    #[error("at (s, t) = ({s}, {t}): {source}")]
    Factor {
        s: f64,
        t: f64,
        #[source]
        source: FactorError,
    },
    #[error("gauge normalization fails at (s, t) = ({s}, {t}): -U12/V21 = {ratio}")]
    GaugeFailure { s: f64, t: f64, ratio: f64 },
    #[error("the {0} axis is not part of the grid")]
    AxisNotInGrid(&'static str),
    #[error("spinors degenerate (h = 0) at (s, t) = ({s}, {t})")]
    DegenerateSpinors { s: f64, t: f64 },
}

/// Numerical knobs shared by the pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub order: usize,
    pub steps_per_cell: usize,
    pub tail_bound: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            steps_per_cell: 16,
            tail_bound: DEFAULT_TAIL_BOUND,
        }
    }
}

/// ODE plus frames on a tensor grid.
pub fn frames_on_grid(
    p: &PotentialSpec,
    s_grid: &[f64],
    t_grid: &[f64],
    initial: Option<&LoopPair>,
    opts: &RunOptions,
) -> Result<FrameGrid, PipelineError> {
    let axis = solve_frame_ode(p, s_grid, t_grid, opts.steps_per_cell, opts.order, opts.tail_bound)?;
    build_extended_frames(&axis, initial, opts.tail_bound)
}

/// `n` equally spaced nodes from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|k| a + (b - a) * (k as f64) / ((n - 1) as f64))
            .collect(),
    }
}

/// Sorted union of `x + k·step` for `k ∈ {−4, …, 4}` over the samples, plus `0`.
pub fn stencil_axis(samples: &[f64], step: f64) -> Vec<f64> {
    let mut v: Vec<f64> = samples
        .iter()
        .flat_map(|&x| (-4..=4).map(move |k| x + (k as f64) * step))
        .chain(std::iter::once(0.0))
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite stencil nodes"));
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_zero_exactly() {
        let g = linspace(-2.0, 2.0, 41);
        assert_eq!(g[20], 0.0);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[40], 2.0);
    }

    #[test]
    fn stencil_axis_contains_offsets() {
        let g = stencil_axis(&[0.5, -0.25], 1e-3);
        assert_eq!(g.len(), 19);
        assert!(g.contains(&0.0));
        assert!(g.contains(&(0.5 + 4.0 * 1e-3)));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
