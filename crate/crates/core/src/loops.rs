//! Truncated σ₃-twisted matrix Laurent loops and their pair representation.
//!
//! A [`TwistedLoop`] of order `N` stores the coefficients `C_k`, `|k| ≤ N`, of
//! `Σ C_k λ^k`. Even coefficients are diagonal and odd ones off-diagonal. A
//! [`LoopPair`] `(S, T)` stands for the para-complex loop
//! `S(λ)·ℓ + star(T)(λ)·ℓ̄` at `μ = e^{i′θ}`, `λ = e^θ`, where
//! `star(X) = σ₃ (Xᵀ)⁻¹ σ₃` and on `SL₂` equals `[[X₂₂, X₂₁], [X₁₂, X₁₁]]`.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::paracomplex::PcMat2;

/// Default bound on accumulated relative tail mass.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-9;
/// Default truncation order.
pub const DEFAULT_ORDER: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoopError {
    #[error("coefficient at degree {degree} breaks the twisting parity")]
    ParityViolation { degree: i32 },
    #[error("degree {degree} lies outside the truncation window [-{order}, {order}]")]
    DegreeOutOfRange { degree: i32, order: usize },
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("relative dropped tail mass {relative_tail:.3e} exceeds bound {bound:.1e}")]
    TruncationOverflow { relative_tail: f64, bound: f64 },
    #[error("coefficient system is singular (pivot {min_pivot:.3e} <= {threshold:.3e})")]
    SingularLoop { min_pivot: f64, threshold: f64 },
}

/// Running sum of relative Frobenius tail mass dropped by truncated products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMass {
    pub accumulated: f64,
    pub bound: f64,
}

impl Default for TailMass {
    fn default() -> Self {
        Self::new(DEFAULT_TAIL_BOUND)
    }
}

impl TailMass {
    pub fn new(bound: f64) -> Self {
        Self {
            accumulated: 0.0,
            bound,
        }
    }

    pub fn record(&mut self, relative: f64) -> Result<(), LoopError> {
        self.accumulated += relative;
        self.check()
    }

    pub fn merge(&mut self, other: &TailMass) -> Result<(), LoopError> {
        self.record(other.accumulated)
    }

    pub fn check(&self) -> Result<(), LoopError> {
        if self.accumulated > self.bound || self.accumulated.is_nan() {
            Err(LoopError::TruncationOverflow {
                relative_tail: self.accumulated,
                bound: self.bound,
            })
        } else {
            Ok(())
        }
    }
}

/// Whether entry `(r, c)` may be nonzero at degree `k`.
#[inline]
pub fn parity_allows(r: usize, c: usize, k: i32) -> bool {
    (r == c) == (k.rem_euclid(2) == 0)
}

fn parity_ok(m: &Matrix2<f64>, k: i32) -> bool {
    (0..2).all(|r| (0..2).all(|c| parity_allows(r, c, k) || m[(r, c)] == 0.0))
}

fn frob_sq(m: &Matrix2<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

/// Adjugate-transpose involution, `[[X₂₂, X₂₁], [X₁₂, X₁₁]]`.
pub fn star_matrix(m: &Matrix2<f64>) -> Matrix2<f64> {
    Matrix2::new(m[(1, 1)], m[(1, 0)], m[(0, 1)], m[(0, 0)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedLoop {
    order: usize,
    coeffs: Vec<Matrix2<f64>>,
}

impl TwistedLoop {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![Matrix2::zeros(); 2 * order + 1],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut l = Self::zero(order);
        l.coeffs[order] = Matrix2::identity();
        l
    }

    /// Builds a loop from `(degree, coefficient)` terms; repeated degrees add up.
    pub fn from_terms<I>(order: usize, terms: I) -> Result<Self, LoopError>
    where
        I: IntoIterator<Item = (i32, Matrix2<f64>)>,
    {
        let mut l = Self::zero(order);
        for (k, m) in terms {
            if k.unsigned_abs() as usize > order {
                return Err(LoopError::DegreeOutOfRange { degree: k, order });
            }
            if !parity_ok(&m, k) {
                return Err(LoopError::ParityViolation { degree: k });
            }
            l.coeffs[(k + order as i32) as usize] += m;
        }
        Ok(l)
    }

    /// Constant loop; the matrix must be diagonal.
    pub fn constant(order: usize, m: Matrix2<f64>) -> Result<Self, LoopError> {
        Self::from_terms(order, [(0, m)])
    }

    /// Truncated `exp(λ^d·a)` for a single-degree generator.
    pub fn exp_monomial(order: usize, a: Matrix2<f64>, degree: i32) -> Result<Self, LoopError> {
        let gen = Self::from_terms(order, [(degree, a)])?;
        let mut out = Self::identity(order);
        let mut term = Self::identity(order);
        let mut tail = TailMass::new(f64::INFINITY);
        for n in 1..=(2 * order + 40) {
            term = term.mul_tracked(&gen, &mut tail)?.scaled(1.0 / n as f64);
            if term.frobenius() == 0.0 {
                break;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: i32) -> Matrix2<f64> {
        if k.unsigned_abs() as usize > self.order {
            Matrix2::zeros()
        } else {
            self.coeffs[(k + self.order as i32) as usize]
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        -(self.order as i32)..=(self.order as i32)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Matrix2<f64>)> {
        let n = self.order as i32;
        self.coeffs.iter().enumerate().map(move |(i, m)| (i as i32 - n, m))
    }

    pub fn frobenius(&self) -> f64 {
        self.coeffs.iter().map(frob_sq).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order.max(other.order) as i32;
        (-n..=n)
            .map(|k| (self.coeff(k) - other.coeff(k)).amax())
            .fold(0.0, f64::max)
    }

    /// All coefficients of positive degree vanish.
    pub fn is_minus(&self) -> bool {
        (1..=self.order as i32).all(|k| self.coeff(k) == Matrix2::zeros())
    }

    /// All coefficients of negative degree vanish.
    pub fn is_plus(&self) -> bool {
        (1..=self.order as i32).all(|k| self.coeff(-k) == Matrix2::zeros())
    }

    pub fn satisfies_parity(&self) -> bool {
        self.terms().all(|(k, m)| parity_ok(m, k))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|m| m * a).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order, "order mismatch in loop addition");
        Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scaled(-1.0))
    }

    /// `self + a·rhs`.
    pub fn axpy(&self, a: f64, rhs: &Self) -> Self {
        assert_eq!(self.order, rhs.order, "order mismatch in loop addition");
        Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(x, y)| x + y * a)
                .collect(),
        }
    }

    /// Keeps only the degrees in `range`.
    pub fn restricted(&self, range: std::ops::RangeInclusive<i32>) -> Self {
        let mut out = self.clone();
        for (i, m) in out.coeffs.iter_mut().enumerate() {
            if !range.contains(&(i as i32 - self.order as i32)) {
                *m = Matrix2::zeros();
            }
        }
        out
    }

    /// Same coefficients in a window of another order; fails if mass would be lost.
    pub fn with_order(&self, order: usize) -> Result<Self, LoopError> {
        Self::from_terms(
            order,
            self.terms()
                .filter(|(_, m)| **m != Matrix2::zeros())
                .map(|(k, m)| (k, *m)),
        )
    }

    /// Untruncated Cauchy product, window `2N`.
    pub fn mul_full(&self, rhs: &Self) -> Self {
        let n = self.order.max(rhs.order);
        let mut out = Self::zero(2 * n);
        for (i, a) in self.terms() {
            if *a == Matrix2::zeros() {
                continue;
            }
            for (j, b) in rhs.terms() {
                out.coeffs[(i + j + 2 * n as i32) as usize] += a * b;
            }
        }
        out
    }

    /// Truncated product; dropped mass relative to `‖a‖‖b‖` goes into `tail`.
    pub fn mul_tracked(&self, rhs: &Self, tail: &mut TailMass) -> Result<Self, LoopError> {
        if self.order != rhs.order {
            return Err(LoopError::OrderMismatch {
                left: self.order,
                right: rhs.order,
            });
        }
        let n = self.order as i32;
        let mut out = Self::zero(self.order);
        let mut dropped = 0.0;
        let full = self.mul_full(rhs);
        for (k, m) in full.terms() {
            if k.abs() <= n {
                out.coeffs[(k + n) as usize] = *m;
            } else {
                dropped += frob_sq(m);
            }
        }
        assert!(out.satisfies_parity(), "loop product broke the twisting parity");
        let scale = self.frobenius() * rhs.frobenius();
        if dropped > 0.0 {
            tail.record(dropped.sqrt() / scale)?;
        }
        Ok(out)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LoopError> {
        self.mul_tracked(rhs, &mut TailMass::default())
    }

    /// `self·(λ^d a)` with truncation; returns the product and the dropped Frobenius mass.
    pub fn mul_monomial(&self, a: &Matrix2<f64>, d: i32) -> (Self, f64) {
        let n = self.order as i32;
        let mut out = Self::zero(self.order);
        let mut dropped = 0.0;
        for (k, c) in self.terms() {
            let j = k + d;
            let p = c * a;
            if j.abs() <= n {
                out.coeffs[(j + n) as usize] += p;
            } else {
                dropped += frob_sq(&p);
            }
        }
        (out, dropped.sqrt())
    }

    /// Inverse from the coefficient system `(a·X)_k = δ_{k0}·I`, `|k| ≤ N`.
    pub fn inv(&self) -> Result<Self, LoopError> {
        let n = self.order as i32;
        let dim = 2 * self.order + 1;
        let scale = self.frobenius();
        let mut out = Self::zero(self.order);
        for c in 0..2 {
            // Unknown `i` is entry (r_i, c) of X at degree k_i, one per degree.
            let rows: Vec<usize> = (-n..=n)
                .map(|k| if parity_allows(0, c, k) { 0 } else { 1 })
                .collect();
            let mut m = DMatrix::zeros(dim, dim);
            let mut rhs = DVector::zeros(dim);
            for (eq, kp) in (-n..=n).enumerate() {
                let rp = rows[eq];
                for (un, k) in (-n..=n).enumerate() {
                    let d = kp - k;
                    if d.abs() <= n {
                        m[(eq, un)] = self.coeff(d)[(rp, rows[un])];
                    }
                }
                if kp == 0 && rp == c {
                    rhs[eq] = 1.0;
                }
            }
            let f = linalg::factor(m, scale, 1e-13).map_err(|e| LoopError::SingularLoop {
                min_pivot: e.min_pivot,
                threshold: e.threshold,
            })?;
            let x = f.solve(&rhs);
            for (un, _) in (-n..=n).enumerate() {
                out.coeffs[un][(rows[un], c)] = x[un];
            }
        }
        assert!(out.satisfies_parity(), "loop inverse broke the twisting parity");
        Ok(out)
    }

    pub fn eval(&self, lambda: f64) -> Matrix2<f64> {
        self.eval_with_derivatives(lambda)[0]
    }

    /// `[X, λX′, (λ∂_λ)²X]` at `λ`.
    pub fn eval_with_derivatives(&self, lambda: f64) -> [Matrix2<f64>; 3] {
        let mut out = [Matrix2::zeros(); 3];
        for (k, c) in self.terms() {
            if *c == Matrix2::zeros() {
                continue;
            }
            let p = c * lambda.powi(k);
            let kf = k as f64;
            out[0] += p;
            out[1] += p * kf;
            out[2] += p * (kf * kf);
        }
        out
    }

    /// Coefficientwise `star`; on loops of determinant 1 this is the group involution.
    pub fn star(&self) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(star_matrix).collect(),
        }
    }

    pub fn to_dump(&self) -> LoopDump {
        LoopDump {
            n: self.order,
            coeffs: self
                .terms()
                .filter(|(_, m)| **m != Matrix2::zeros())
                .map(|(k, m)| CoeffDump {
                    k,
                    m: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
                })
                .collect(),
        }
    }

    pub fn from_dump(d: &LoopDump) -> Result<Self, LoopError> {
        Self::from_terms(
            d.n,
            d.coeffs
                .iter()
                .map(|c| (c.k, Matrix2::new(c.m[0][0], c.m[0][1], c.m[1][0], c.m[1][1]))),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("loop dump serializes")
    }
}

/// JSON debug form `{"N":…, "coeffs":[{"k":…, "m":[[..],[..]]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopDump {
    #[serde(rename = "N")]
    pub n: usize,
    pub coeffs: Vec<CoeffDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffDump {
    pub k: i32,
    pub m: [[f64; 2]; 2],
}

/// An element of the para-complex loop group as two real twisted loops.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPair {
    pub slot_s: TwistedLoop,
    pub slot_t: TwistedLoop,
}

impl LoopPair {
    pub fn new(slot_s: TwistedLoop, slot_t: TwistedLoop) -> Result<Self, LoopError> {
        if slot_s.order() != slot_t.order() {
            return Err(LoopError::OrderMismatch {
                left: slot_s.order(),
                right: slot_t.order(),
            });
        }
        Ok(Self { slot_s, slot_t })
    }

    /// The pair `(X, X)`, i.e. a real loop with the reality condition built in.
    pub fn diagonal(x: TwistedLoop) -> Self {
        Self {
            slot_t: x.clone(),
            slot_s: x,
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::diagonal(TwistedLoop::identity(order))
    }

    pub fn order(&self) -> usize {
        self.slot_s.order()
    }

    pub fn mul_tracked(&self, rhs: &Self, tail: &mut TailMass) -> Result<Self, LoopError> {
        Ok(Self {
            slot_s: self.slot_s.mul_tracked(&rhs.slot_s, tail)?,
            slot_t: self.slot_t.mul_tracked(&rhs.slot_t, tail)?,
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LoopError> {
        self.mul_tracked(rhs, &mut TailMass::default())
    }

    pub fn inv(&self) -> Result<Self, LoopError> {
        Ok(Self {
            slot_s: self.slot_s.inv()?,
            slot_t: self.slot_t.inv()?,
        })
    }

    /// `F(μ)` at `μ = e^{i′θ}`.
    pub fn eval(&self, theta: f64) -> PcMat2 {
        let lambda = theta.exp();
        PcMat2::new(
            self.slot_s.eval(lambda),
            star_matrix(&self.slot_t.eval(lambda)),
        )
    }

    /// `[F, μ∂_μF, (μ∂_μ)²F]` at `μ = e^{i′θ}`.
    ///
    /// On the `ℓ̄` component `μ∂_μ` acts as `−λ∂_λ`.
    pub fn eval_mu_derivatives(&self, theta: f64) -> [PcMat2; 3] {
        let lambda = theta.exp();
        let s = self.slot_s.eval_with_derivatives(lambda);
        let t = self.slot_t.eval_with_derivatives(lambda);
        [
            PcMat2::new(s[0], star_matrix(&t[0])),
            PcMat2::new(s[1], -star_matrix(&t[1])),
            PcMat2::new(s[2], star_matrix(&t[2])),
        ]
    }

    /// `μ∂_μF·F⁻¹` from the Laurent coefficients.
    pub fn mu_log_derivative(&self, theta: f64) -> Result<PcMat2, LoopError> {
        let [f, d, _] = self.eval_mu_derivatives(theta);
        let inv = f.try_inverse().ok_or(LoopError::SingularLoop {
            min_pivot: 0.0,
            threshold: 0.0,
        })?;
        Ok(d * inv)
    }
}
