//! Generating spinors, the Dirac equation and the Abresch–Rosenberg differential.

use nalgebra::Matrix2;
use rayon::prelude::*;

use super::fd::{Field, Stencil};
use super::residuals::{evaluate, ResidualField};
use super::GeometryError;
use crate::paracomplex::{NullPair, ParaComplex};
use crate::pipeline::frames::{locate, FrameGrid, FramePoint};
use crate::pipeline::PotentialSpec;

/// Spinors at one gridpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPoint {
    pub psi1: ParaComplex,
    pub psi2: ParaComplex,
    /// `ĥ` from the gauge normalization.
    pub h: f64,
    /// Dirac potential `U = (i′/4)h`.
    pub potential: ParaComplex,
}

impl SpinorPoint {
    /// `2(ψ₂ψ̄₂ − ψ₁ψ̄₁)`.
    pub fn h_from_spinors(&self) -> f64 {
        2.0 * (self.psi2.modulus_form() - self.psi1.modulus_form())
    }

    /// `e^{u/2} = 2(ψ₂ψ̄₂ + ψ₁ψ̄₁)`.
    pub fn half_conformal_factor(&self) -> f64 {
        2.0 * (self.psi2.modulus_form() + self.psi1.modulus_form())
    }
}

#[derive(Debug, Clone)]
pub struct SpinorField {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub theta: f64,
    /// Row-major with `i` fastest.
    pub points: Vec<Option<SpinorPoint>>,
}

impl SpinorField {
    pub fn ns(&self) -> usize {
        self.s_grid.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&SpinorPoint> {
        self.points[j * self.ns() + i].as_ref()
    }

    pub fn find(&self, s: f64, t: f64) -> Option<&SpinorPoint> {
        self.get(locate(&self.s_grid, s)?, locate(&self.t_grid, t)?)
    }

    pub fn psi1_field(&self) -> impl Fn(f64, f64) -> Option<ParaComplex> + Sync + '_ {
        move |s, t| self.find(s, t).map(|p| p.psi1)
    }

    pub fn psi2_field(&self) -> impl Fn(f64, f64) -> Option<ParaComplex> + Sync + '_ {
        move |s, t| self.find(s, t).map(|p| p.psi2)
    }

    /// Largest `|2(ψ₂ψ̄₂ − ψ₁ψ̄₁) − ĥ|`.
    pub fn h_gap(&self) -> f64 {
        self.points
            .iter()
            .flatten()
            .map(|p| (p.h_from_spinors() - p.h).abs())
            .fold(0.0, f64::max)
    }
}

/// `ψ₁ = F₂₁ μ^{−1/2} √(h/2)`, `ψ₂ = F₂₂ μ^{1/2} √(h/2)` at `μ = e^{i′θ}`.
pub fn spinor_point(p: &FramePoint, theta: f64) -> Result<SpinorPoint, GeometryError> {
    if !(p.h_hat > 0.0) {
        return Err(GeometryError::GaugeFailure {
            s: p.s,
            t: p.t,
            h: p.h_hat,
        });
    }
    let f = p.frame.eval(theta);
    let root = (0.5 * p.h_hat).sqrt();
    let half = ParaComplex::new(0.0, 0.5 * theta).exp();
    let half_inv = ParaComplex::new(0.0, -0.5 * theta).exp();
    Ok(SpinorPoint {
        psi1: f.entry(1, 0) * half_inv * root,
        psi2: f.entry(1, 1) * half * root,
        h: p.h_hat,
        potential: ParaComplex::new(0.0, 0.25 * p.h_hat),
    })
}

pub fn spinor_field(fr: &FrameGrid, theta: f64) -> Result<SpinorField, GeometryError> {
    let points = fr
        .points
        .par_iter()
        .map(|p| p.as_ref().map(|p| spinor_point(p, theta)).transpose())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpinorField {
        s_grid: fr.s_grid.clone(),
        t_grid: fr.t_grid.clone(),
        theta,
        points,
    })
}

/// Spinors and `ĥ` bundled for stencil lookups.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Bundle {
    psi1: ParaComplex,
    psi2: ParaComplex,
    h: f64,
}

impl std::ops::Add for Bundle {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            psi1: self.psi1 + o.psi1,
            psi2: self.psi2 + o.psi2,
            h: self.h + o.h,
        }
    }
}

impl std::ops::Sub for Bundle {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            psi1: self.psi1 - o.psi1,
            psi2: self.psi2 - o.psi2,
            h: self.h - o.h,
        }
    }
}

impl std::ops::Mul<f64> for Bundle {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            psi1: self.psi1 * k,
            psi2: self.psi2 * k,
            h: self.h * k,
        }
    }
}

impl super::fd::FieldValue for Bundle {
    fn magnitude(&self) -> f64 {
        self.psi1.magnitude().max(self.psi2.magnitude())
    }
}

fn bundle_field(sp: &SpinorField) -> impl Fn(f64, f64) -> Option<Bundle> + Sync + '_ {
    move |s, t| {
        sp.find(s, t).map(|p| Bundle {
            psi1: p.psi1,
            psi2: p.psi2,
            h: p.h,
        })
    }
}

/// `∂_z` from `∂_s`, `∂_t`: the null components are `(∂_s p, ∂_t q)`.
fn dz(ds: ParaComplex, dt: ParaComplex) -> ParaComplex {
    ParaComplex::from_null(ds.to_null().p, dt.to_null().q)
}

/// `∂_z̄`: null components `(∂_t p, ∂_s q)`.
fn dzbar(ds: ParaComplex, dt: ParaComplex) -> ParaComplex {
    ParaComplex::from_null(dt.to_null().p, ds.to_null().q)
}

/// Fourth-order first derivatives of the bundle at spacing `m·δ`.
fn derivs(st: &Stencil<Bundle>, m: i32) -> (Bundle, Bundle) {
    (st.ds4(m), st.dt4(m))
}

/// Dirac residuals `‖∂_zψ₂ + (i′h/4)ψ₁‖` and `‖−∂_z̄ψ₁ + (i′h/4)ψ₂‖`.
///
pub fn dirac_residuals(
    sp: &SpinorField,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    let field = bundle_field(sp);
    evaluate("Dirac equation", &field, points, step, 4, |st, m| {
        let (ds, dt) = derivs(st, m);
        let c = st.center();
        let u = ParaComplex::new(0.0, 0.25 * c.h);
        let r1 = dz(ds.psi2, dt.psi2) + u * c.psi1;
        let r2 = -dzbar(ds.psi1, dt.psi1) + u * c.psi2;
        let n = |z: ParaComplex| z.re.abs().max(z.im.abs());
        Ok((n(r1).max(n(r2)), st.roundoff1()))
    })
}

/// Dirac potential recovered from the spinors:
/// `U = (∂_z̄ψ₁·ψ̄₂ − ∂_zψ₂·ψ̄₁) / (ψ₁ψ̄₁ + ψ₂ψ̄₂)`; returns `|Re U|`.
pub fn dirac_potential_real_part(
    sp: &SpinorField,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    let field = bundle_field(sp);
    evaluate("Dirac potential real part", &field, points, step, 4, |st, m| {
        let (ds, dt) = derivs(st, m);
        let c = st.center();
        let den = c.psi1.modulus_form() + c.psi2.modulus_form();
        if den == 0.0 {
            return Err(GeometryError::DegenerateMetric { s: st.s, t: st.t });
        }
        let num = dzbar(ds.psi1, dt.psi1) * c.psi2.conj() - dz(ds.psi2, dt.psi2) * c.psi1.conj();
        Ok(((num.re / den).abs(), st.roundoff1()))
    })
}

/// `B = −(i′/2){ψ₁(ψ̄₂)_z − ψ̄₂(ψ₁)_z}` from first derivatives.
fn hopf(c: &Bundle, ds: &Bundle, dt: &Bundle) -> ParaComplex {
    let psi2bar_z = dz(ds.psi2.conj(), dt.psi2.conj());
    let psi1_z = dz(ds.psi1, dt.psi1);
    ParaComplex::new(0.0, -0.5) * (c.psi1 * psi2bar_z - c.psi2.conj() * psi1_z)
}

/// Abresch–Rosenberg differential at the points (fourth-order derivatives).
pub fn abresch_rosenberg(
    sp: &SpinorField,
    points: &[(f64, f64)],
    step: f64,
) -> Result<Vec<(f64, f64, ParaComplex)>, GeometryError> {
    let field = bundle_field(sp);
    points
        .iter()
        .map(|&(s, t)| {
            let st = Stencil::gather(&field, s, t, step)?;
            let (ds, dt) = derivs(&st, 1);
            Ok((s, t, hopf(&st.center(), &ds, &dt)))
        })
        .collect()
}

/// `‖∂_z̄B‖` with `B` from central differences at spacing `δ` and the outer
/// derivative at spacing `m·δ`; second order overall.
pub fn abresch_rosenberg_holomorphy(
    sp: &SpinorField,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    let field = bundle_field(sp);
    evaluate("Abresch-Rosenberg holomorphy", &field, points, step, 2, |st, m| {
        let b_at = |a: i32, b: i32| {
            let ds = st.ds_at(a, b, 1);
            let dt = st.dt_at(a, b, 1);
            hopf(&st.at(a, b), &ds, &dt)
        };
        let h = st.step * m as f64;
        let bs = (b_at(m, 0) - b_at(-m, 0)) * (0.5 / h);
        let bt = (b_at(0, m) - b_at(0, -m)) * (0.5 / h);
        let r = dzbar(bs, bt);
        Ok((r.re.abs().max(r.im.abs()), st.roundoff2()))
    })
}

/// Flatness residual of `α^μ` built from `ĥ`, `Q` and `R`:
/// `Û_t − V̂_s + [V̂, Û]` at each `λ = e^θ`.
pub fn flatness_residual(
    fr: &FrameGrid,
    potential: &PotentialSpec,
    points: &[(f64, f64)],
    step: f64,
    thetas: &[f64],
) -> Result<ResidualField, GeometryError> {
    let hfield = |s: f64, t: f64| fr.find(s, t).map(|p| p.h_hat);
    let mut qr = Vec::with_capacity(points.len());
    for &(s, t) in points {
        let q = potential.q_at(s).map_err(GeometryError::Pipeline)?;
        let r = potential.r_at(t).map_err(GeometryError::Pipeline)?;
        qr.push(((s, t), (q, r)));
    }
    let lookup = |s: f64, t: f64| {
        qr.iter()
            .find(|(p, _)| *p == (s, t))
            .map(|(_, v)| *v)
            .expect("Q and R were sampled at every point")
    };
    evaluate("flatness", &hfield, points, step, 4, |st, m| {
        let (q, r) = lookup(st.s, st.t);
        let h = st.center();
        let (hs, ht, hst) = (st.ds4(m), st.dt4(m), st.dst4(m));
        let lhs = hs / h;
        let lht = ht / h;
        let lhst = hst / h - hs * ht / (h * h);
        let mut worst: f64 = 0.0;
        for &th in thetas {
            let lam = th.exp();
            let u = Matrix2::new(0.5 * lhs, -0.25 * h / lam, q / (lam * h), -0.5 * lhs);
            let v = Matrix2::new(-0.5 * lht, -lam * r / h, 0.25 * lam * h, 0.5 * lht);
            let u_t = Matrix2::new(0.5 * lhst, -0.25 * ht / lam, -q * ht / (lam * h * h), -0.5 * lhst);
            let v_s = Matrix2::new(-0.5 * lhst, lam * r * hs / (h * h), 0.25 * lam * hs, 0.5 * lhst);
            let res = u_t - v_s + (v * u - u * v);
            worst = worst.max(res.amax());
        }
        Ok((worst, st.roundoff2()))
    })
}

/// Sampled spinor quantities as functions on the `(s, t)` plane.
pub fn spinor_scalar_field<'a>(
    sp: &'a SpinorField,
    f: impl Fn(&SpinorPoint) -> f64 + Sync + 'a,
) -> impl Field<f64> + 'a {
    move |s, t| sp.find(s, t).map(&f)
}

/// `(ψ₁ψ̄₁, ψ₂ψ̄₂)` as a null pair, convenient for golden checks.
pub fn spinor_norms(p: &SpinorPoint) -> NullPair {
    NullPair::new(p.psi1.modulus_form(), p.psi2.modulus_form())
}
