//! RK4 integration of `∂_sΦ^s = Φ^s ξ^s` and `∂_tΦ^t = Φ^t ξ^t` on loop coefficients.

use nalgebra::Matrix2;

use super::potential::PotentialSpec;
use super::PipelineError;
use crate::loops::{LoopError, TwistedLoop};

/// Minimum number of RK4 substeps per unit parameter.
pub const STEPS_PER_UNIT: f64 = 64.0;

/// Holomorphic frames along both coordinate axes.
#[derive(Debug, Clone)]
pub struct AxisFrames {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub phi_s: Vec<TwistedLoop>,
    pub phi_t: Vec<TwistedLoop>,
    /// `λ⁻¹` coefficient of `ξ^s` at each `s_grid` node.
    pub xi_s: Vec<Matrix2<f64>>,
    /// `λ` coefficient of `ξ^t` at each `t_grid` node.
    pub xi_t: Vec<Matrix2<f64>>,
    /// Relative tail mass accumulated from the basepoint.
    pub tail_s: Vec<f64>,
    pub tail_t: Vec<f64>,
    /// Largest `|det Φ(λ) − 1|` per unit length seen at `λ ∈ {½, 1, 2}`.
    pub det_drift: f64,
}

struct Axis {
    loops: Vec<TwistedLoop>,
    tails: Vec<f64>,
    drift: f64,
}

pub(crate) fn check_grid(name: &'static str, grid: &[f64]) -> Result<(), PipelineError> {
    if grid.is_empty() {
        return Err(PipelineError::InvalidGrid(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(PipelineError::InvalidGrid(format!("{name} grid has a non-finite node")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PipelineError::InvalidGrid(format!(
            "{name} grid is not strictly increasing"
        )));
    }
    Ok(())
}

fn det_error(y: &TwistedLoop) -> f64 {
    [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| (y.eval(l).determinant() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn integrate_axis(
    grid: &[f64],
    order: usize,
    steps_per_cell: usize,
    tail_bound: f64,
    degree: i32,
    gen: &dyn Fn(f64) -> Result<Matrix2<f64>, PipelineError>,
) -> Result<Axis, PipelineError> {
    let mut loops = vec![TwistedLoop::zero(order); grid.len()];
    let mut tails = vec![0.0; grid.len()];
    let mut drift: f64 = 0.0;
    let first_pos = grid.partition_point(|&x| x < 0.0);
    let forward: Vec<usize> = (first_pos..grid.len()).collect();
    let backward: Vec<usize> = (0..first_pos).rev().collect();
    for path in [forward, backward] {
        let mut x = 0.0;
        let mut y = TwistedLoop::identity(order);
        let mut tail = 0.0;
        for idx in path {
            let target = grid[idx];
            let width = (target - x).abs();
            if width > 0.0 {
                let n = steps_per_cell.max((width * STEPS_PER_UNIT).ceil() as usize);
                let h = (target - x) / n as f64;
                for k in 0..n {
                    let x0 = x + h * k as f64;
                    let a0 = gen(x0)?;
                    let am = gen(x0 + 0.5 * h)?;
                    let a1 = gen(if k + 1 == n { target } else { x0 + h })?;
                    let (k1, d1) = y.mul_monomial(&a0, degree);
                    let (k2, d2) = y.axpy(0.5 * h, &k1).mul_monomial(&am, degree);
                    let (k3, d3) = y.axpy(0.5 * h, &k2).mul_monomial(&am, degree);
                    let (k4, d4) = y.axpy(h, &k3).mul_monomial(&a1, degree);
                    let incr = k1.add(&k2.scaled(2.0)).add(&k3.scaled(2.0)).add(&k4);
                    y = y.axpy(h / 6.0, &incr);
                    let dropped = (d1 + 2.0 * d2 + 2.0 * d3 + d4) * h.abs() / 6.0;
                    if dropped > 0.0 {
                        tail += dropped / y.frobenius();
                    }
                }
                drift = drift.max(det_error(&y) / target.abs().max(1.0));
                if tail > tail_bound {
                    return Err(PipelineError::Loop {
                        s: if degree < 0 { target } else { 0.0 },
                        t: if degree < 0 { 0.0 } else { target },
                        source: LoopError::TruncationOverflow {
                            relative_tail: tail,
                            bound: tail_bound,
                        },
                    });
                }
            }
            x = target;
            loops[idx] = y.clone();
            tails[idx] = tail;
        }
    }
    Ok(Axis {
        loops,
        tails,
        drift,
    })
}

/// Integrates both axis frames from the basepoint `0` with `Φ(0) = I`.
///
/// Each grid interval gets `max(steps_per_cell, ⌈64·width⌉)` RK4 steps.
pub fn solve_frame_ode(
    p: &PotentialSpec,
    s_grid: &[f64],
    t_grid: &[f64],
    steps_per_cell: usize,
    order: usize,
    tail_bound: f64,
) -> Result<AxisFrames, PipelineError> {
    check_grid("s", s_grid)?;
    check_grid("t", t_grid)?;
    if steps_per_cell == 0 {
        return Err(PipelineError::InvalidGrid("stepsPerCell must be at least 1".into()));
    }
    p.validate(s_grid, t_grid)?;
    let xi_s = s_grid.iter().map(|&s| p.xi_s(s)).collect::<Result<Vec<_>, _>>()?;
    let xi_t = t_grid.iter().map(|&t| p.xi_t(t)).collect::<Result<Vec<_>, _>>()?;
    let sa = integrate_axis(s_grid, order, steps_per_cell, tail_bound, -1, &|s| p.xi_s(s))?;
    let ta = integrate_axis(t_grid, order, steps_per_cell, tail_bound, 1, &|t| p.xi_t(t))?;
    Ok(AxisFrames {
        s_grid: s_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        phi_s: sa.loops,
        phi_t: ta.loops,
        xi_s,
        xi_t,
        tail_s: sa.tails,
        tail_t: ta.tails,
        det_drift: sa.drift.max(ta.drift),
    })
}
