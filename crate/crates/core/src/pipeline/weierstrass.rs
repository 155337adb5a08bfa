//! Integral representation of the L³ surface from generating spinors.

use nalgebra::Vector3;

use super::frames::locate;
use super::PipelineError;
use crate::geometry::SpinorField;
use crate::paracomplex::ParaComplex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    Trapezoid,
    /// Cubic interpolation on four neighbouring nodes, two-point Gauss per interval.
    #[default]
    Cubic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSurface {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Row-major with `i` fastest; `None` where a path crosses a hole.
    pub points: Vec<Option<[f64; 3]>>,
    /// Largest difference between the two integration paths.
    pub path_gap: f64,
}

impl IntegralSurface {
    pub fn find(&self, s: f64, t: f64) -> Option<[f64; 3]> {
        let i = locate(&self.s_grid, s)?;
        let j = locate(&self.t_grid, t)?;
        self.points[j * self.s_grid.len() + i]
    }
}

/// `Φ = (ψ̄₂² − ψ₁², i′(ψ̄₂² + ψ₁²), 2i′ψ₁ψ̄₂)` split into its `ℓ` and `ℓ̄` parts.
fn integrand(psi1: ParaComplex, psi2: ParaComplex) -> (Vector3<f64>, Vector3<f64>) {
    let a = psi2.conj() * psi2.conj();
    let b = psi1 * psi1;
    let phi = [a - b, ParaComplex::I * (a + b), ParaComplex::I * psi1 * psi2.conj() * 2.0];
    let n = phi.map(|z| z.to_null());
    (
        Vector3::new(n[0].p, n[1].p, n[2].p),
        Vector3::new(n[0].q, n[1].q, n[2].q),
    )
}

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

fn lagrange(nodes: &[f64], vals: &[Vector3<f64>], x: f64) -> Vector3<f64> {
    let mut out = Vector3::zeros();
    for (k, (&xk, vk)) in nodes.iter().zip(vals).enumerate() {
        let w: f64 = nodes
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != k)
            .map(|(_, &xm)| (x - xm) / (xk - xm))
            .product();
        out += vk * w;
    }
    out
}

/// Integral over `[x[k], x[k+1]]` using nodes `lo..hi` of the valid run.
fn interval(x: &[f64], y: &[Vector3<f64>], k: usize, lo: usize, hi: usize, q: Quadrature) -> Vector3<f64> {
    let h = x[k + 1] - x[k];
    if q == Quadrature::Trapezoid || hi - lo < 4 {
        return (y[k] + y[k + 1]) * (0.5 * h);
    }
    let start = k.saturating_sub(1).clamp(lo, hi - 4);
    let (nodes, vals) = (&x[start..start + 4], &y[start..start + 4]);
    let mid = 0.5 * (x[k] + x[k + 1]);
    GAUSS
        .iter()
        .map(|g| lagrange(nodes, vals, mid + 0.5 * h * g))
        .sum::<Vector3<f64>>()
        * (0.5 * h)
}

/// Cumulative integral along a line of samples, zero at `from`; stops at holes.
fn cumulative(x: &[f64], y: &[Option<Vector3<f64>>], from: usize, q: Quadrature) -> Vec<Option<Vector3<f64>>> {
    let n = x.len();
    let mut out = vec![None; n];
    if y[from].is_none() {
        return out;
    }
    let mut lo = from;
    while lo > 0 && y[lo - 1].is_some() {
        lo -= 1;
    }
    let mut hi = from + 1;
    while hi < n && y[hi].is_some() {
        hi += 1;
    }
    let vals: Vec<Vector3<f64>> = (0..n).map(|k| y[k].unwrap_or_else(Vector3::zeros)).collect();
    let mut acc = Vector3::zeros();
    out[from] = Some(acc);
    for k in from..hi - 1 {
        acc += interval(x, &vals, k, lo, hi, q);
        out[k + 1] = Some(acc);
    }
    acc = Vector3::zeros();
    for k in (lo..from).rev() {
        acc -= interval(x, &vals, k, lo, hi, q);
        out[k] = Some(acc);
    }
    out
}

/// `f = f₀ + 2 Re ∫ Φ dz` from `basepoint`, integrated along two paths:
/// first along `t = t₀` then in `t`, and first along `s = s₀` then in `s`.
pub fn weierstrass_integral_l3(
    sp: &SpinorField,
    basepoint: (f64, f64),
    base_value: [f64; 3],
    quadrature: Quadrature,
) -> Result<IntegralSurface, PipelineError> {
    let (ns, nt) = (sp.s_grid.len(), sp.t_grid.len());
    let i0 = locate(&sp.s_grid, basepoint.0)
        .ok_or_else(|| PipelineError::InvalidGrid(format!("basepoint s = {} is not a grid node", basepoint.0)))?;
    let j0 = locate(&sp.t_grid, basepoint.1)
        .ok_or_else(|| PipelineError::InvalidGrid(format!("basepoint t = {} is not a grid node", basepoint.1)))?;
    let mut fs = vec![None; ns * nt];
    let mut ft = vec![None; ns * nt];
    for j in 0..nt {
        for i in 0..ns {
            if let Some(p) = sp.get(i, j) {
                if p.h_from_spinors() == 0.0 {
                    return Err(PipelineError::DegenerateSpinors {
                        s: sp.s_grid[i],
                        t: sp.t_grid[j],
                    });
                }
                let (a, b) = integrand(p.psi1, p.psi2);
                fs[j * ns + i] = Some(a);
                ft[j * ns + i] = Some(b);
            }
        }
    }
    let row = |j: usize, data: &[Option<Vector3<f64>>]| -> Vec<Option<Vector3<f64>>> {
        (0..ns).map(|i| data[j * ns + i]).collect()
    };
    let col = |i: usize, data: &[Option<Vector3<f64>>]| -> Vec<Option<Vector3<f64>>> {
        (0..nt).map(|j| data[j * ns + i]).collect()
    };

    let base_row = cumulative(&sp.s_grid, &row(j0, &fs), i0, quadrature);
    let mut first = vec![None; ns * nt];
    for i in 0..ns {
        let Some(r) = base_row[i] else { continue };
        for (j, c) in cumulative(&sp.t_grid, &col(i, &ft), j0, quadrature).into_iter().enumerate() {
            first[j * ns + i] = c.map(|c| r + c);
        }
    }
    let base_col = cumulative(&sp.t_grid, &col(i0, &ft), j0, quadrature);
    let mut second = vec![None; ns * nt];
    for j in 0..nt {
        let Some(c) = base_col[j] else { continue };
        for (i, r) in cumulative(&sp.s_grid, &row(j, &fs), i0, quadrature).into_iter().enumerate() {
            second[j * ns + i] = r.map(|r| c + r);
        }
    }

    let base = Vector3::from(base_value);
    let mut path_gap: f64 = 0.0;
    let points = first
        .iter()
        .zip(&second)
        .map(|(a, b)| {
            if let (Some(a), Some(b)) = (a, b) {
                path_gap = path_gap.max((a - b).amax());
            }
            a.or(*b).map(|v| (base + v).into())
        })
        .collect();
    Ok(IntegralSurface {
        s_grid: sp.s_grid.clone(),
        t_grid: sp.t_grid.clone(),
        points,
        path_gap,
    })
}
