//! Central differences on a 5×5 stencil in the null coordinates `(s, t)`.
//!
//! A stencil around `(s, t)` holds samples at `(s + aδ, t + bδ)` for
//! `a, b ∈ {−4, …, 4}`. Second-order differences are available at spacings
//! `δ` through `4δ`; Richardson combination of spacings `m` and `2m` is fourth
//! order, so fourth-order values exist at both `δ` and `2δ`.

use std::ops::{Add, Mul, Sub};

use nalgebra::Vector3;

use super::GeometryError;
use crate::paracomplex::ParaComplex;

pub trait FieldValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl FieldValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl FieldValue for Vector3<f64> {
    fn magnitude(&self) -> f64 {
        self.amax()
    }
}

impl FieldValue for ParaComplex {
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// Sampler over the `(s, t)` plane; `None` marks a hole.
pub trait Field<T>: Fn(f64, f64) -> Option<T> + Sync {}
impl<T, F: Fn(f64, f64) -> Option<T> + Sync> Field<T> for F {}

#[derive(Debug, Clone)]
pub struct Stencil<T> {
    pub s: f64,
    pub t: f64,
    pub step: f64,
    vals: Vec<T>,
}

/// Largest offset, in steps, sampled around the center.
pub const RADIUS: i32 = 4;
const WIDTH: usize = (2 * RADIUS + 1) as usize;

impl<T: FieldValue> Stencil<T> {
    /// Samples the full stencil; any hole is an error.
    pub fn gather(field: &impl Field<T>, s: f64, t: f64, step: f64) -> Result<Self, GeometryError> {
        let mut vals = Vec::with_capacity(WIDTH * WIDTH);
        for a in -RADIUS..=RADIUS {
            for b in -RADIUS..=RADIUS {
                let (x, y) = (s + (a as f64) * step, t + (b as f64) * step);
                vals.push(field(x, y).ok_or(GeometryError::MissingSample { s: x, t: y })?);
            }
        }
        Ok(Self { s, t, step, vals })
    }

    /// Sample at offset `(a, b)` in units of the step.
    pub fn at(&self, a: i32, b: i32) -> T {
        self.vals[(a + RADIUS) as usize * WIDTH + (b + RADIUS) as usize]
    }

    pub fn center(&self) -> T {
        self.at(0, 0)
    }

    /// Largest sample magnitude, for roundoff estimates.
    pub fn scale(&self) -> f64 {
        self.vals
            .iter()
            .map(|v| v.magnitude())
            .fold(0.0, f64::max)
    }

    fn h(&self, m: i32) -> f64 {
        self.step * m as f64
    }

    /// `∂_s` at offset `(a, b)` with spacing `m·δ`.
    pub fn ds_at(&self, a: i32, b: i32, m: i32) -> T {
        (self.at(a + m, b) - self.at(a - m, b)) * (0.5 / self.h(m))
    }

    pub fn dt_at(&self, a: i32, b: i32, m: i32) -> T {
        (self.at(a, b + m) - self.at(a, b - m)) * (0.5 / self.h(m))
    }

    pub fn ds(&self, m: i32) -> T {
        self.ds_at(0, 0, m)
    }

    pub fn dt(&self, m: i32) -> T {
        self.dt_at(0, 0, m)
    }

    pub fn dss(&self, m: i32) -> T {
        let h = self.h(m);
        (self.at(m, 0) - self.at(0, 0) * 2.0 + self.at(-m, 0)) * (1.0 / (h * h))
    }

    pub fn dtt(&self, m: i32) -> T {
        let h = self.h(m);
        (self.at(0, m) - self.at(0, 0) * 2.0 + self.at(0, -m)) * (1.0 / (h * h))
    }

    pub fn dst(&self, m: i32) -> T {
        let h = self.h(m);
        (self.at(m, m) - self.at(m, -m) - self.at(-m, m) + self.at(-m, -m)) * (0.25 / (h * h))
    }

    /// Fourth-order `∂_s` at spacing `m·δ`.
    pub fn ds4(&self, m: i32) -> T {
        richardson(self.ds(m), self.ds(2 * m))
    }

    pub fn dt4(&self, m: i32) -> T {
        richardson(self.dt(m), self.dt(2 * m))
    }

    pub fn dss4(&self, m: i32) -> T {
        richardson(self.dss(m), self.dss(2 * m))
    }

    pub fn dtt4(&self, m: i32) -> T {
        richardson(self.dtt(m), self.dtt(2 * m))
    }

    pub fn dst4(&self, m: i32) -> T {
        richardson(self.dst(m), self.dst(2 * m))
    }

    /// Roundoff floor of a first difference at spacing `δ`.
    pub fn roundoff1(&self) -> f64 {
        64.0 * f64::EPSILON * self.scale() / self.step
    }

    /// Roundoff floor of a second difference at spacing `δ`.
    pub fn roundoff2(&self) -> f64 {
        64.0 * f64::EPSILON * self.scale() / (self.step * self.step)
    }
}

/// Fourth-order combination of second-order differences at `δ` and `2δ`.
pub fn richardson<T: FieldValue>(fine: T, coarse: T) -> T {
    fine + (fine - coarse) * (1.0 / 3.0)
}
