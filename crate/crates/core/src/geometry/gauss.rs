//! Stereographic projections of the normal Gauss map.

use super::GeometryError;
use crate::paracomplex::ParaComplex;

const POLE_TOL: f64 = 1e-14;

/// `π⁺(N) = (x₁ + i′x₂)/(1 − x₃)` on the Nil₃ de Sitter sphere.
pub fn pi_plus_nil(n: [f64; 3]) -> Result<ParaComplex, GeometryError> {
    let d = 1.0 - n[2];
    if d.abs() <= POLE_TOL {
        return Err(GeometryError::ProjectionPole { x3: n[2] });
    }
    Ok(ParaComplex::new(n[0] / d, n[1] / d))
}

/// `π⁻(N) = (x₁ + i′x₂)/(1 + x₃)` on the L³ de Sitter sphere.
pub fn pi_minus_l3(n: [f64; 3]) -> Result<ParaComplex, GeometryError> {
    let d = 1.0 + n[2];
    if d.abs() <= POLE_TOL {
        return Err(GeometryError::ProjectionPole { x3: n[2] });
    }
    Ok(ParaComplex::new(n[0] / d, n[1] / d))
}

/// `(π⁻)⁻¹(g) = (2 Re g, 2 Im g, 1 − gḡ)/(1 + gḡ)`.
pub fn pi_minus_l3_inv(g: ParaComplex) -> Result<[f64; 3], GeometryError> {
    let gg = g.modulus_form();
    let d = 1.0 + gg;
    if d.abs() <= POLE_TOL {
        return Err(GeometryError::ProjectionPole { x3: -1.0 });
    }
    Ok([2.0 * g.re / d, 2.0 * g.im / d, (1.0 - gg) / d])
}

/// Left-invariant unit normal in Nil₃ from the spinors:
/// `N = 2e^{−u/2}(−2 Im ψ₁ψ₂, 2 Re ψ₁ψ₂, −(ψ₂ψ̄₂ − ψ₁ψ̄₁))` with `e^{u/2} = 2(ψ₁ψ̄₁ + ψ₂ψ̄₂)`.
pub fn spinor_normal(psi1: ParaComplex, psi2: ParaComplex) -> Result<[f64; 3], GeometryError> {
    let (a, b) = (psi1.modulus_form(), psi2.modulus_form());
    let half = 2.0 * (a + b);
    if half.abs() <= POLE_TOL {
        return Err(GeometryError::DegenerateSpinors);
    }
    let w = psi1 * psi2;
    let k = 2.0 / half;
    Ok([-2.0 * k * w.im, 2.0 * k * w.re, -k * (b - a)])
}

/// `g = i′ψ̄₁/ψ₂`.
pub fn spinor_gauss_map(psi1: ParaComplex, psi2: ParaComplex) -> Result<ParaComplex, GeometryError> {
    ParaComplex::I
        .checked_div(psi2)
        .map(|q| q * psi1.conj())
        .map_err(|_| GeometryError::ProjectionPole { x3: 1.0 })
}
