//! Sym formulas: from an extended frame to points of L³ and Nil₃.

use rayon::prelude::*;

use super::frames::{locate, FrameGrid};
use super::PipelineError;
use crate::loops::{LoopError, LoopPair};
use crate::paracomplex::{ParaComplex, PcMat2};

/// Surface data at one gridpoint and one spectral value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSample {
    pub nil: [f64; 3],
    pub l3: [f64; 3],
    pub normal: [f64; 3],
}

fn sigma3() -> PcMat2 {
    PcMat2::from_real(nalgebra::Matrix2::new(1.0, 0.0, 0.0, -1.0))
}

fn commutator(a: &PcMat2, b: &PcMat2) -> PcMat2 {
    *a * *b - *b * *a
}

/// `(x₁, x₂, x₃)` of a Lie algebra element under the standard identification.
pub fn l3_coordinates(x: &PcMat2) -> [f64; 3] {
    let x11 = x.entry(0, 0);
    let x12 = x.entry(0, 1);
    [-2.0 * x12.re, -2.0 * x12.im, 2.0 * x11.im]
}

/// Sym map at `μ = e^{i′θ}`.
///
/// `f_L³ = −i′·μ∂_μF·F⁻¹ − (i′/2)·Fσ₃F⁻¹` and
/// `f̂ = (f_L³)° − (i′/2)(μ∂_μ f_L³)ᵈ`.
pub fn sym_point(frame: &LoopPair, theta: f64) -> Result<SymSample, LoopError> {
    let [f, d1, d2] = frame.eval_mu_derivatives(theta);
    let finv = f.try_inverse().ok_or(LoopError::SingularLoop {
        min_pivot: 0.0,
        threshold: 0.0,
    })?;
    let i = ParaComplex::I;
    let half_i = ParaComplex::new(0.0, 0.5);
    let l = d1 * finv;
    let ad = f * sigma3() * finv;
    let f_l3 = l.scale(-i) - ad.scale(half_i);
    let df_l3 = (d2 * finv - l * l).scale(-i) - commutator(&l, &ad).scale(half_i);
    let normal = ad.scale(half_i);
    let h = -(half_i * df_l3.entry(0, 0));
    let l3 = l3_coordinates(&f_l3);
    Ok(SymSample {
        nil: [l3[1], l3[0], 2.0 * h.im],
        l3,
        normal: l3_coordinates(&normal),
    })
}

/// Sym samples indexed `[θ][j·ns + i]`.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub thetas: Vec<f64>,
    pub samples: Vec<Vec<Option<SymSample>>>,
}

impl SurfaceGrid {
    pub fn ns(&self) -> usize {
        self.s_grid.len()
    }

    pub fn nt(&self) -> usize {
        self.t_grid.len()
    }

    pub fn sample(&self, theta_index: usize, i: usize, j: usize) -> Option<&SymSample> {
        self.samples[theta_index][j * self.ns() + i].as_ref()
    }

    pub fn find(&self, theta_index: usize, s: f64, t: f64) -> Option<&SymSample> {
        let i = locate(&self.s_grid, s)?;
        let j = locate(&self.t_grid, t)?;
        self.sample(theta_index, i, j)
    }

    pub fn iter_theta(&self, theta_index: usize) -> impl Iterator<Item = (f64, f64, &SymSample)> {
        let ns = self.ns();
        self.samples[theta_index]
            .iter()
            .enumerate()
            .filter_map(move |(k, o)| {
                o.as_ref()
                    .map(|x| (self.s_grid[k % ns], self.t_grid[k / ns], x))
            })
    }
}

pub fn sym_map(fr: &FrameGrid, thetas: &[f64]) -> Result<SurfaceGrid, PipelineError> {
    let samples = thetas
        .iter()
        .map(|&theta| {
            fr.points
                .par_iter()
                .map(|p| match p {
                    Some(p) => sym_point(&p.frame, theta)
                        .map(Some)
                        .map_err(|source| PipelineError::Loop {
                            s: p.s,
                            t: p.t,
                            source,
                        }),
                    None => Ok(None),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SurfaceGrid {
        s_grid: fr.s_grid.clone(),
        t_grid: fr.t_grid.clone(),
        thetas: thetas.to_vec(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::TwistedLoop;
    use nalgebra::Matrix2;

    fn cylinder_frame(s: f64, t: f64) -> LoopPair {
        let k = Matrix2::new(0.0, -0.25, 0.25, 0.0);
        let a = TwistedLoop::exp_monomial(24, k * s, -1).unwrap();
        let b = TwistedLoop::exp_monomial(24, k * t, 1).unwrap();
        LoopPair::diagonal(a.mul(&b).unwrap())
    }

    #[test]
    fn cylinder_at_the_origin() {
        let p = sym_point(&cylinder_frame(0.0, 0.0), 0.0).unwrap();
        let close = |a: [f64; 3], b: [f64; 3]| (0..3).all(|k| (a[k] - b[k]).abs() < 1e-15);
        assert!(close(p.l3, [0.0, 0.0, -1.0]), "{:?}", p.l3);
        assert!(close(p.nil, [0.0, 0.0, 0.0]), "{:?}", p.nil);
    }

    #[test]
    fn cylinder_closed_form() {
        for &(s, t, th) in &[(0.4, -1.1, 0.0), (1.3, 0.2, 0.1), (-0.8, 0.9, -0.1)] {
            let p = sym_point(&cylinder_frame(s, t), th).unwrap();
            let lam = f64::exp(th);
            let a = (s / lam + t * lam) / 4.0;
            let want = [(2.0 * a).sin(), (s / lam - t * lam) / 2.0, -(2.0 * a).cos()];
            for k in 0..3 {
                assert!((p.l3[k] - want[k]).abs() < 1e-13, "{:?} vs {want:?}", p.l3);
            }
            let [x1, x2, x3] = p.nil;
            assert!((x3 - x1 * x2 / 2.0).abs() < 1e-13);
            let [n1, n2, n3] = p.normal;
            assert!((n1 * n1 - n2 * n2 + n3 * n3 - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn diagonal_gauge_does_not_move_the_surface() {
        let f = cylinder_frame(0.7, -0.3);
        let d = TwistedLoop::constant(24, Matrix2::new(1.7, 0.0, 0.0, 1.0 / 1.7)).unwrap();
        let g = LoopPair::diagonal(f.slot_s.mul(&d).unwrap());
        let a = sym_point(&f, 0.05).unwrap();
        let b = sym_point(&g, 0.05).unwrap();
        for k in 0..3 {
            assert!((a.nil[k] - b.nil[k]).abs() < 1e-12);
            assert!((a.l3[k] - b.l3[k]).abs() < 1e-12);
        }
    }
}
