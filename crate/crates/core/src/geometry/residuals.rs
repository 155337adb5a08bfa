//! Finite-difference residuals of the structure equations.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::fd::{Field, Stencil};
use super::nil::{lie_bracket, metric, sym_bracket, NilPoint};
use super::GeometryError;
use crate::pipeline::SurfaceGrid;

/// A residual must sit within this factor of its noise floor to count as zero.
pub const NOISE_MARGIN: f64 = 10.0;

/// One evaluated point: value at spacing `δ` and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResidual {
    pub s: f64,
    pub t: f64,
    pub value: f64,
    pub noise: f64,
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub check: String,
    /// Largest residual or deviation.
    pub value: f64,
    pub noise_floor: f64,
    pub threshold: f64,
    pub points: usize,
    pub pass: bool,
}

impl ResidualReport {
    /// A plain comparison with no finite-difference content.
    pub fn exact(check: &str, value: f64, threshold: f64) -> Self {
        Self {
            check: check.to_string(),
            value,
            noise_floor: 0.0,
            threshold,
            points: 1,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub check: String,
    pub samples: Vec<PointResidual>,
}

impl ResidualField {
    pub fn max_value(&self) -> f64 {
        self.samples.iter().map(|p| p.value.abs()).fold(0.0, f64::max)
    }

    pub fn max_noise(&self) -> f64 {
        self.samples.iter().map(|p| p.noise).fold(0.0, f64::max)
    }

    /// Report for a quantity that should vanish.
    ///
    /// Passes when the residual is below `threshold` and within
    /// [`NOISE_MARGIN`] of the noise floor; a noise floor above the threshold
    /// means the grid cannot support the claim.
    pub fn vanishing(&self, threshold: f64) -> Result<ResidualReport, GeometryError> {
        let value = self.max_value();
        let noise = self.max_noise();
        if noise > threshold {
            return Err(GeometryError::GridTooCoarse {
                check: self.check.clone(),
                noise,
                threshold,
            });
        }
        Ok(ResidualReport {
            check: self.check.clone(),
            value,
            noise_floor: noise,
            threshold,
            points: self.samples.len(),
            pass: value <= threshold && value <= NOISE_MARGIN * noise,
        })
    }

    /// Report for `|value − target| ≤ tol` at every point.
    pub fn deviation(&self, target: f64, tol: f64) -> ResidualReport {
        let value = self
            .samples
            .iter()
            .map(|p| (p.value - target).abs())
            .fold(0.0, f64::max);
        ResidualReport {
            check: self.check.clone(),
            value,
            noise_floor: self.max_noise(),
            threshold: tol,
            points: self.samples.len(),
            pass: value <= tol,
        }
    }
}

/// Applies `eval` at spacings `δ` and `2δ` to every point and records `|R(δ)|`
/// with noise `|R(δ) − R(2δ)|/(2^order − 1) + roundoff`.
pub(crate) fn evaluate<T, F>(
    check: &str,
    field: &impl Field<T>,
    points: &[(f64, f64)],
    step: f64,
    order: i32,
    eval: F,
) -> Result<ResidualField, GeometryError>
where
    T: super::fd::FieldValue + Send + Sync,
    F: Fn(&Stencil<T>, i32) -> Result<(f64, f64), GeometryError> + Sync,
{
    let samples = points
        .par_iter()
        .map(|&(s, t)| {
            let st = Stencil::gather(field, s, t, step)?;
            let (fine, roundoff) = eval(&st, 1)?;
            let (coarse, _) = eval(&st, 2)?;
            Ok(PointResidual {
                s,
                t,
                value: fine,
                noise: (fine - coarse).abs() / (2f64.powi(order) - 1.0) + roundoff,
            })
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(ResidualField {
        check: check.to_string(),
        samples,
    })
}

/// Left-invariant components `A(v)` of a tangent `v` at `f`.
fn li(f: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    NilPoint::new(f.x, f.y, f.z).left_invariant(*v)
}

/// Null components of `Φ_z̄ ∓ Φ̄_z` plus the bracket terms.
fn structure_residuals(st: &Stencil<Vector3<f64>>, m: i32) -> (Vector3<f64>, Vector3<f64>) {
    let f = st.center();
    let (fs, ft, fst) = (st.ds4(m), st.dt4(m), st.dst4(m));
    let third = |a: &Vector3<f64>, b: &Vector3<f64>| {
        // ∂_b A(f_a) with mixed partial f_st.
        fst.z + 0.5 * (b.y * a.x + f.y * fst.x - b.x * a.y - f.x * fst.y)
    };
    let dt_as = Vector3::new(fst.x, fst.y, third(&fs, &ft));
    let ds_at = Vector3::new(fst.x, fst.y, third(&ft, &fs));
    let a_s = li(&f, &fs);
    let a_t = li(&f, &ft);
    let mc = dt_as - ds_at + lie_bracket(&a_t, &a_s);
    let minimal = dt_as + ds_at + sym_bracket(&a_s, &a_t);
    (mc, minimal)
}

/// Maurer–Cartan and minimality residuals of a map into Nil₃.
pub fn minimality_residual(
    field: &impl Field<Vector3<f64>>,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    evaluate("minimality", field, points, step, 4, |st, m| {
        let (mc, minimal) = structure_residuals(st, m);
        let scale = st.scale().max(1.0);
        Ok((mc.norm().max(minimal.norm()), st.roundoff2() * scale))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Nil,
    L3,
}

fn l3_metric(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    x.x * y.x - x.y * y.y + x.z * y.z
}

/// `(⟨f_x,f_x⟩, −⟨f_y,f_y⟩, ⟨f_x,f_y⟩)` at spacing `m`.
fn fundamental(st: &Stencil<Vector3<f64>>, m: i32, space: Space) -> [f64; 3] {
    let (fs, ft) = (st.ds4(m), st.dt4(m));
    let (fx, fy) = (fs + ft, fs - ft);
    match space {
        Space::Nil => {
            let c = st.center();
            let (a, b) = (li(&c, &fx), li(&c, &fy));
            [metric(&a, &a), -metric(&b, &b), metric(&a, &b)]
        }
        Space::L3 => [l3_metric(&fx, &fx), -l3_metric(&fy, &fy), l3_metric(&fx, &fy)],
    }
}

/// Conformal factor `e^u = ⟨f_x, f_x⟩` and conformality residual per point.
pub fn first_fundamental_form(
    field: &impl Field<Vector3<f64>>,
    space: Space,
    points: &[(f64, f64)],
    step: f64,
) -> Result<(ResidualField, ResidualField), GeometryError> {
    let factor = evaluate("conformal factor", field, points, step, 4, |st, m| {
        let [e, _, _] = fundamental(st, m, space);
        Ok((e, st.roundoff1() * st.scale()))
    })?;
    let conf = evaluate("conformality", field, points, step, 4, |st, m| {
        let [e, g, f] = fundamental(st, m, space);
        if e.abs() < 1e-300 {
            return Err(GeometryError::DegenerateMetric { s: st.s, t: st.t });
        }
        Ok(((e - g).abs().max(f.abs()), st.roundoff1() * st.scale()))
    })?;
    Ok((factor, conf))
}

fn cross(a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
    a.cross(b)
}

/// Mean curvature `H = (E·N − 2F·M + G·L) / (2(EG − F²))` in L³ with signature `(+, −, +)`.
fn mean_curvature_at(st: &Stencil<Vector3<f64>>, m: i32) -> Result<f64, GeometryError> {
    let (fs, ft) = (st.ds4(m), st.dt4(m));
    let (fss, ftt, fst) = (st.dss4(m), st.dtt4(m), st.dst4(m));
    let (fx, fy) = (fs + ft, fs - ft);
    let fxx = fss + fst * 2.0 + ftt;
    let fyy = fss - fst * 2.0 + ftt;
    let fxy = fss - ftt;
    let c = cross(&fx, &fy);
    let n = Vector3::new(c.x, -c.y, c.z);
    let nn = l3_metric(&n, &n);
    if !(nn > 0.0) {
        return Err(GeometryError::DegenerateMetric { s: st.s, t: st.t });
    }
    let n = n / nn.sqrt();
    let (e, f, g) = (l3_metric(&fx, &fx), l3_metric(&fx, &fy), l3_metric(&fy, &fy));
    let (l, mm, nq) = (l3_metric(&fxx, &n), l3_metric(&fxy, &n), l3_metric(&fyy, &n));
    let det = e * g - f * f;
    if det.abs() < 1e-300 {
        return Err(GeometryError::DegenerateMetric { s: st.s, t: st.t });
    }
    Ok((e * nq - 2.0 * f * mm + g * l) / (2.0 * det))
}

pub fn mean_curvature_l3(
    field: &impl Field<Vector3<f64>>,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    evaluate("mean curvature L3", field, points, step, 4, |st, m| {
        Ok((mean_curvature_at(st, m)?, st.roundoff2()))
    })
}

/// `max(|⟨N, f_x⟩|, |⟨N, f_y⟩|, |⟨N, N⟩ − 1|)` with a separately sampled normal.
pub fn normal_residual(
    surface: &impl Field<Vector3<f64>>,
    normal: &impl Field<Vector3<f64>>,
    points: &[(f64, f64)],
    step: f64,
) -> Result<ResidualField, GeometryError> {
    let paired = |s: f64, t: f64| -> Option<Vector3<f64>> {
        let _ = normal(s, t)?;
        surface(s, t)
    };
    evaluate("L3 normal", &paired, points, step, 4, |st, m| {
        let n = normal(st.s, st.t).ok_or(GeometryError::MissingSample { s: st.s, t: st.t })?;
        let (fs, ft) = (st.ds4(m), st.dt4(m));
        let (fx, fy) = (fs + ft, fs - ft);
        let r = l3_metric(&n, &fx)
            .abs()
            .max(l3_metric(&n, &fy).abs())
            .max((l3_metric(&n, &n) - 1.0).abs());
        Ok((r, st.roundoff1() * st.scale()))
    })
}

/// Sampler of one of the three point sets of a [`SurfaceGrid`].
pub fn surface_field(
    sg: &SurfaceGrid,
    theta_index: usize,
    space: SurfaceChannel,
) -> impl Fn(f64, f64) -> Option<Vector3<f64>> + Sync + '_ {
    move |s, t| {
        let x = sg.find(theta_index, s, t)?;
        let v = match space {
            SurfaceChannel::Nil => x.nil,
            SurfaceChannel::L3 => x.l3,
            SurfaceChannel::Normal => x.normal,
        };
        Some(Vector3::from(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceChannel {
    Nil,
    L3,
    Normal,
}
