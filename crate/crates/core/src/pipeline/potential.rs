//! Real-pair potentials `(f, g, Q, R)` and the holomorphic ODE generators.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;

use super::PipelineError;

/// Real scalar function of one real variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wraps a constant.
pub fn constant_fn(c: f64) -> ScalarFn {
    Arc::new(move |_| c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Built from normalized data `(b, B)`.
    Normalized,
    /// Given directly as `(f, g, Q, R)`.
    PairDirect,
}

/// Potential `ξ^s = λ⁻¹[[0, −f/4], [Q/f, 0]] ds`, `ξ^t = λ[[0, −R/g], [g/4, 0]] dt`.
#[derive(Clone)]
pub struct PotentialSpec {
    pub f: ScalarFn,
    pub g: ScalarFn,
    pub q: ScalarFn,
    pub r: ScalarFn,
    pub provenance: Provenance,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("f(0)", &(self.f)(0.0))
            .field("g(0)", &(self.g)(0.0))
            .field("Q(0)", &(self.q)(0.0))
            .field("R(0)", &(self.r)(0.0))
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl PotentialSpec {
    pub fn pair(f: ScalarFn, g: ScalarFn, q: ScalarFn, r: ScalarFn) -> Self {
        Self {
            f,
            g,
            q,
            r,
            provenance: Provenance::PairDirect,
        }
    }

    pub fn constant(f: f64, g: f64, q: f64, r: f64) -> Self {
        Self::pair(constant_fn(f), constant_fn(g), constant_fn(q), constant_fn(r))
    }

    fn value(func: &ScalarFn, name: &'static str, x: f64) -> Result<f64, PipelineError> {
        let v = func(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(PipelineError::PotentialEval { which: name, at: x })
        }
    }

    pub fn f_at(&self, s: f64) -> Result<f64, PipelineError> {
        Self::value(&self.f, "f", s)
    }

    pub fn g_at(&self, t: f64) -> Result<f64, PipelineError> {
        Self::value(&self.g, "g", t)
    }

    pub fn q_at(&self, s: f64) -> Result<f64, PipelineError> {
        Self::value(&self.q, "Q", s)
    }

    pub fn r_at(&self, t: f64) -> Result<f64, PipelineError> {
        Self::value(&self.r, "R", t)
    }

    /// Coefficient of `λ⁻¹` in `ξ^s`.
    pub fn xi_s(&self, s: f64) -> Result<Matrix2<f64>, PipelineError> {
        let f = self.f_at(s)?;
        if f == 0.0 {
            return Err(PipelineError::DegeneratePotential { which: "f", at: s });
        }
        Ok(Matrix2::new(0.0, -f / 4.0, self.q_at(s)? / f, 0.0))
    }

    /// Coefficient of `λ` in `ξ^t`.
    pub fn xi_t(&self, t: f64) -> Result<Matrix2<f64>, PipelineError> {
        let g = self.g_at(t)?;
        if g == 0.0 {
            return Err(PipelineError::DegeneratePotential { which: "g", at: t });
        }
        Ok(Matrix2::new(0.0, -self.r_at(t)? / g, g / 4.0, 0.0))
    }

    /// Checks finiteness everywhere and `f, g ≠ 0` on the samples.
    pub fn validate(&self, s_samples: &[f64], t_samples: &[f64]) -> Result<(), PipelineError> {
        for &s in s_samples {
            self.xi_s(s)?;
        }
        for &t in t_samples {
            self.xi_t(t)?;
        }
        Ok(())
    }
}

/// `f = Re b + Im b`, `g = Re b − Im b`, `Q = 4(Re B + Im B)`, `R = 4(Re B − Im B)`.
pub fn translate_potential(
    b_re: ScalarFn,
    b_im: ScalarFn,
    bb_re: ScalarFn,
    bb_im: ScalarFn,
) -> PotentialSpec {
    let (br, bi) = (b_re.clone(), b_im.clone());
    let f: ScalarFn = Arc::new(move |s| br(s) + bi(s));
    let g: ScalarFn = Arc::new(move |t| b_re(t) - b_im(t));
    let (qr, qi) = (bb_re.clone(), bb_im.clone());
    let q: ScalarFn = Arc::new(move |s| 4.0 * (qr(s) + qi(s)));
    let r: ScalarFn = Arc::new(move |t| 4.0 * (bb_re(t) - bb_im(t)));
    PotentialSpec {
        f,
        g,
        q,
        r,
        provenance: Provenance::Normalized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(p: &PotentialSpec, x: f64) -> [f64; 4] {
        [(p.f)(x), (p.g)(x), (p.q)(x), (p.r)(x)]
    }

    #[test]
    fn cylinder_translation() {
        let p = translate_potential(
            constant_fn(1.0),
            constant_fn(0.0),
            constant_fn(1.0 / 16.0),
            constant_fn(0.0),
        );
        assert_eq!(values(&p, 0.3), [1.0, 1.0, 0.25, 0.25]);
        assert_eq!(p.provenance, Provenance::Normalized);
    }

    #[test]
    fn plane_translation() {
        let p = translate_potential(
            constant_fn(4.0),
            constant_fn(0.0),
            constant_fn(0.0),
            constant_fn(0.0),
        );
        assert_eq!(values(&p, -0.8), [4.0, 4.0, 0.0, 0.0]);
    }

    #[test]
    fn equal_parts_of_b_kill_the_t_coupling() {
        let p = translate_potential(
            constant_fn(1.0),
            constant_fn(0.0),
            constant_fn(0.2),
            constant_fn(0.2),
        );
        assert_eq!(p.xi_t(0.5).unwrap()[(0, 1)], 0.0);
        assert_eq!(p.xi_s(0.5).unwrap()[(1, 0)], 1.6);
    }

    #[test]
    fn vanishing_f_is_degenerate() {
        let p = PotentialSpec::pair(
            Arc::new(|s| s - 0.5),
            constant_fn(1.0),
            constant_fn(0.0),
            constant_fn(0.0),
        );
        assert!(matches!(
            p.validate(&[0.0, 0.5], &[0.0]),
            Err(PipelineError::DegeneratePotential { which: "f", .. })
        ));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let p = PotentialSpec::pair(
            Arc::new(|s: f64| s.ln()),
            constant_fn(1.0),
            constant_fn(0.0),
            constant_fn(0.0),
        );
        assert!(matches!(
            p.xi_s(-1.0),
            Err(PipelineError::PotentialEval { which: "f", .. })
        ));
    }
}
