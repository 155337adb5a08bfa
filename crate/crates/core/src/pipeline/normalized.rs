//! Recovering the normalized potential from extended frames along the axes.

use nalgebra::Matrix2;

use super::frames::{locate, FrameGrid};
use super::PipelineError;
use crate::factorization::{birkhoff_split, SplitOrder};
use crate::paracomplex::ParaComplex;

/// Recovered data at one axis node: `(x, f, Q)` on `t = 0` or `(x, g, R)` on `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSample {
    pub x: f64,
    pub coupling: f64,
    pub hopf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPotential {
    /// `(s, f̃(s), Q̃(s))` along `t = 0`.
    pub s_axis: Vec<AxisSample>,
    /// `(t, g̃(t), R̃(t))` along `s = 0`.
    pub t_axis: Vec<AxisSample>,
}

impl NormalizedPotential {
    /// `b = −(i′/4)(f̃ℓ + g̃ℓ̄)` at `z = sℓ + tℓ̄`.
    pub fn b_hat(&self, s_sample: &AxisSample, t_sample: &AxisSample) -> ParaComplex {
        ParaComplex::from_null(-s_sample.coupling / 4.0, t_sample.coupling / 4.0)
    }

    /// `B = (Q̃ℓ + R̃ℓ̄)/4`.
    pub fn hopf_hat(&self, s_sample: &AxisSample, t_sample: &AxisSample) -> ParaComplex {
        ParaComplex::from_null(s_sample.hopf / 4.0, t_sample.hopf / 4.0)
    }

    pub fn s_at(&self, s: f64) -> Option<&AxisSample> {
        self.s_axis.iter().find(|a| (a.x - s).abs() <= 1e-12 * s.abs().max(1.0))
    }

    pub fn t_at(&self, t: f64) -> Option<&AxisSample> {
        self.t_axis.iter().find(|a| (a.x - t).abs() <= 1e-12 * t.abs().max(1.0))
    }
}

/// Weights of the first derivative at `x0` over `nodes` (Fornberg's recursion).
pub fn first_derivative_weights(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mx = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mx).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mx).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Degree `∓1` coefficient of the normalized Birkhoff factor at each axis node.
fn axis_coefficients(
    fr: &FrameGrid,
    along_s: bool,
) -> Result<Vec<Option<Matrix2<f64>>>, PipelineError> {
    let (grid, other, name) = if along_s {
        (&fr.s_grid, &fr.t_grid, "t = 0")
    } else {
        (&fr.t_grid, &fr.s_grid, "s = 0")
    };
    let k0 = locate(other, 0.0).ok_or(PipelineError::AxisNotInGrid(name))?;
    let f0_inv = fr
        .initial
        .as_ref()
        .map(|f0| f0.slot_s.inv())
        .transpose()
        .map_err(|source| PipelineError::Loop { s: 0.0, t: 0.0, source })?;
    let mut out = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let p = if along_s { fr.point(k, k0) } else { fr.point(k0, k) };
        let Some(p) = p else {
            out.push(None);
            continue;
        };
        let (s, t) = (p.s, p.t);
        let (slot_s, slot_t) = match &f0_inv {
            Some(g) => (
                g.mul(&p.frame.slot_s).map_err(|source| PipelineError::Loop { s, t, source })?,
                g.mul(&p.frame.slot_t).map_err(|source| PipelineError::Loop { s, t, source })?,
            ),
            None => (p.frame.slot_s.clone(), p.frame.slot_t.clone()),
        };
        let coeff = if along_s {
            birkhoff_split(&slot_s, SplitOrder::MinusStarPlus)
                .map_err(|source| PipelineError::Factor { s, t, source })?
                .minus
                .coeff(-1)
        } else {
            birkhoff_split(&slot_t, SplitOrder::PlusStarMinus)
                .map_err(|source| PipelineError::Factor { s, t, source })?
                .plus
                .coeff(1)
        };
        out.push(Some(coeff));
    }
    Ok(out)
}

/// Largest ratio of neighbouring spacings accepted in a five-point window.
const MAX_SPACING_RATIO: f64 = 4.0;

fn differentiate(grid: &[f64], coeffs: &[Option<Matrix2<f64>>]) -> Vec<(f64, Matrix2<f64>)> {
    let mut out = Vec::new();
    for k in 2..grid.len().saturating_sub(2) {
        let window = &coeffs[k - 2..=k + 2];
        if window.iter().any(|c| c.is_none()) {
            continue;
        }
        let gaps: Vec<f64> = grid[k - 2..=k + 2].windows(2).map(|w| w[1] - w[0]).collect();
        let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &g| (lo.min(g), hi.max(g)));
        if hi > MAX_SPACING_RATIO * lo {
            continue;
        }
        let w = first_derivative_weights(grid[k], &grid[k - 2..=k + 2]);
        let d = window
            .iter()
            .zip(&w)
            .fold(Matrix2::zeros(), |acc, (c, wi)| acc + c.unwrap() * *wi);
        out.push((grid[k], d));
    }
    out
}

/// Splits the frame along `t = 0` (minus factor) and `s = 0` (plus factor) and
/// differentiates the first nontrivial coefficient with five-point differences.
/// Nodes whose window is strongly non-uniform are skipped.
///
/// A recorded initial loop `F₀` is divided out first, so the split sees a frame
/// equal to the identity at the basepoint.
pub fn extract_normalized_potential(fr: &FrameGrid) -> Result<NormalizedPotential, PipelineError> {
    let cs = axis_coefficients(fr, true)?;
    let ct = axis_coefficients(fr, false)?;
    let s_axis = differentiate(&fr.s_grid, &cs)
        .into_iter()
        .map(|(x, d)| {
            let f = -4.0 * d[(0, 1)];
            AxisSample {
                x,
                coupling: f,
                hopf: f * d[(1, 0)],
            }
        })
        .collect();
    let t_axis = differentiate(&fr.t_grid, &ct)
        .into_iter()
        .map(|(x, d)| {
            let g = 4.0 * d[(1, 0)];
            AxisSample {
                x,
                coupling: g,
                hopf: -g * d[(0, 1)],
            }
        })
        .collect();
    Ok(NormalizedPotential { s_axis, t_axis })
}
