//! Birkhoff splitting of twisted loops and the double-loop Iwasawa split.
//!
//! Both splits solve for the inverse of the normalized factor. For
//! `plus_star_minus` the unknown is `X = plus⁻¹ ∈ Λ⁺_*` with `(X·w)_k = 0` for
//! `k = 1..N`; the mirror statement holds for `minus_star_plus`. Each row of
//! `X` only couples to itself, and the twisting leaves `N` unknowns per row.

use log::warn;
use nalgebra::{DMatrix, DVector, Matrix2};
use thiserror::Error;

use crate::linalg;
use crate::loops::{parity_allows, LoopError, LoopPair, TailMass, TwistedLoop};

/// Condition estimate above which a split is flagged as near the big-cell boundary.
pub const CONDITION_WARNING: f64 = 1e12;
/// Relative pivot floor for big-cell membership.
pub const PIVOT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactorError {
    #[error("loop lies outside the big cell (pivot {min_pivot:.3e} <= {threshold:.3e})")]
    OutsideBigCell { min_pivot: f64, threshold: f64 },
    #[error(transparent)]
    Loop(#[from] LoopError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOrder {
    /// `w = minus·plus` with `minus(∞) = I`.
    MinusStarPlus,
    /// `w = plus·minus` with `plus(0) = I`.
    PlusStarMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffResult {
    pub minus: TwistedLoop,
    pub plus: TwistedLoop,
    /// Inverse of the normalized factor, as solved for.
    pub normalized_inverse: TwistedLoop,
    pub conditioning: f64,
}

impl BirkhoffResult {
    pub fn near_boundary(&self) -> bool {
        self.conditioning > CONDITION_WARNING
    }
}

/// Splits `w`; see [`SplitOrder`] for which factor is normalized.
pub fn birkhoff_split(w: &TwistedLoop, order: SplitOrder) -> Result<BirkhoffResult, FactorError> {
    let n = w.order() as i32;
    let sigma = match order {
        SplitOrder::PlusStarMinus => 1,
        SplitOrder::MinusStarPlus => -1,
    };
    let scale = w.frobenius();
    let mut x = TwistedLoop::identity(w.order());
    let mut terms: Vec<(i32, Matrix2<f64>)> = vec![(0, Matrix2::identity())];
    let mut conditioning: f64 = 1.0;
    if n > 0 {
        for r in 0..2 {
            // Unknown j is X_{r, c_j} at degree σ·j; equation i is (Xw)_{r, c_i} at degree σ·i.
            let col = |j: i32| if parity_allows(r, 0, sigma * j) { 0 } else { 1 };
            let dim = n as usize;
            let mut m = DMatrix::zeros(dim, dim);
            let mut rhs = DVector::zeros(dim);
            for i in 1..=n {
                let ci = col(i);
                for j in 1..=n {
                    m[((i - 1) as usize, (j - 1) as usize)] =
                        w.coeff(sigma * (i - j))[(col(j), ci)];
                }
                rhs[(i - 1) as usize] = -w.coeff(sigma * i)[(r, ci)];
            }
            let f = linalg::factor(m, scale, PIVOT_FLOOR).map_err(|e| {
                FactorError::OutsideBigCell {
                    min_pivot: e.min_pivot,
                    threshold: e.threshold,
                }
            })?;
            conditioning = conditioning.max(f.condition);
            let sol = f.solve(&rhs);
            for j in 1..=n {
                let mut c = Matrix2::zeros();
                c[(r, col(j))] = sol[(j - 1) as usize];
                terms.push((sigma * j, c));
            }
        }
        x = TwistedLoop::from_terms(w.order(), terms)?;
    }
    let mut tail = TailMass::new(f64::INFINITY);
    let other = x.mul_tracked(w, &mut tail)?;
    let other = match order {
        SplitOrder::PlusStarMinus => other.restricted(-n..=0),
        SplitOrder::MinusStarPlus => other.restricted(0..=n),
    };
    let normalized = x.inv()?;
    if conditioning > CONDITION_WARNING {
        warn!("Birkhoff split near the big-cell boundary (condition {conditioning:.3e})");
    }
    let (minus, plus) = match order {
        SplitOrder::PlusStarMinus => (other, normalized),
        SplitOrder::MinusStarPlus => (normalized, other),
    };
    Ok(BirkhoffResult {
        minus,
        plus,
        normalized_inverse: x,
        conditioning,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaResult {
    /// `(F̂, F̂)`.
    pub frame: LoopPair,
    pub vplus: TwistedLoop,
    pub vminus: TwistedLoop,
    pub conditioning: f64,
    pub tail: TailMass,
}

/// `(Φ^s, Φ^t) = (F̂, F̂)·(V̂₊, V̂₋)` with `V̂₊(0) = I`.
pub fn iwasawa_double(phi_s: &TwistedLoop, phi_t: &TwistedLoop) -> Result<IwasawaResult, FactorError> {
    iwasawa_inner(phi_s, phi_t, TailMass::default())
}

pub(crate) fn iwasawa_double_tracked(
    phi_s: &TwistedLoop,
    phi_t: &TwistedLoop,
    tail: &mut TailMass,
) -> Result<IwasawaResult, FactorError> {
    let r = iwasawa_inner(phi_s, phi_t, *tail)?;
    *tail = r.tail;
    Ok(r)
}

fn iwasawa_inner(
    phi_s: &TwistedLoop,
    phi_t: &TwistedLoop,
    mut tail: TailMass,
) -> Result<IwasawaResult, FactorError> {
    let w = phi_s.inv()?.mul_tracked(phi_t, &mut tail)?;
    let split = birkhoff_split(&w, SplitOrder::PlusStarMinus)?;
    let vplus = split.normalized_inverse;
    let frame = phi_s.mul_tracked(&split.plus, &mut tail)?;
    Ok(IwasawaResult {
        frame: LoopPair::diagonal(frame),
        vplus,
        vminus: split.minus,
        conditioning: split.conditioning,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_cyl() -> Matrix2<f64> {
        Matrix2::new(0.0, -0.25, 0.25, 0.0)
    }

    #[test]
    fn identity_splits_trivially() {
        for o in [SplitOrder::MinusStarPlus, SplitOrder::PlusStarMinus] {
            let r = birkhoff_split(&TwistedLoop::identity(8), o).unwrap();
            assert!(r.minus.max_abs_diff(&TwistedLoop::identity(8)) < 1e-15);
            assert!(r.plus.max_abs_diff(&TwistedLoop::identity(8)) < 1e-15);
        }
    }

    #[test]
    fn split_reconstructs_and_has_supports() {
        let a = TwistedLoop::exp_monomial(16, Matrix2::new(0.0, 0.4, -0.3, 0.0), -1).unwrap();
        let b = TwistedLoop::exp_monomial(16, Matrix2::new(0.0, -0.2, 0.5, 0.0), 1).unwrap();
        let w = a.mul(&b).unwrap().mul(&a.star()).unwrap();
        for o in [SplitOrder::MinusStarPlus, SplitOrder::PlusStarMinus] {
            let r = birkhoff_split(&w, o).unwrap();
            assert!(r.minus.is_minus() && r.plus.is_plus());
            let back = match o {
                SplitOrder::MinusStarPlus => {
                    assert_eq!(r.minus.coeff(0), Matrix2::identity());
                    r.minus.mul(&r.plus).unwrap()
                }
                SplitOrder::PlusStarMinus => {
                    assert_eq!(r.plus.coeff(0), Matrix2::identity());
                    r.plus.mul(&r.minus).unwrap()
                }
            };
            assert!(back.max_abs_diff(&w) < 1e-11 * w.frobenius());
        }
    }

    #[test]
    fn cylinder_iwasawa_is_the_exponential_frame() {
        let (s, t) = (1.2, -0.7);
        let n = 20;
        let ps = TwistedLoop::exp_monomial(n, k_cyl() * s, -1).unwrap();
        let pt = TwistedLoop::exp_monomial(n, k_cyl() * t, 1).unwrap();
        let r = iwasawa_double(&ps, &pt).unwrap();
        let want = ps.mul(&pt).unwrap();
        assert!(r.frame.slot_s.max_abs_diff(&want) < 1e-13);
        let back = r.frame.slot_s.mul(&r.vplus).unwrap();
        assert!(back.max_abs_diff(&ps) < 1e-13);
        let back = r.frame.slot_s.mul(&r.vminus).unwrap();
        assert!(back.max_abs_diff(&pt) < 1e-13);
    }

    fn plane_input(s: f64, t: f64) -> (TwistedLoop, TwistedLoop) {
        let n = 12;
        let ps = TwistedLoop::from_terms(
            n,
            [(0, Matrix2::identity()), (-1, Matrix2::new(0.0, -s, 0.0, 0.0))],
        )
        .unwrap();
        let pt = TwistedLoop::from_terms(
            n,
            [(0, Matrix2::identity()), (1, Matrix2::new(0.0, 0.0, t, 0.0))],
        )
        .unwrap();
        (ps, pt)
    }

    #[test]
    fn plane_iwasawa_matches_closed_form_up_to_gauge() {
        let (s, t) = (0.6, -0.45);
        let (ps, pt) = plane_input(s, t);
        let r = iwasawa_double(&ps, &pt).unwrap();
        let c = 1.0 / (1.0 + s * t);
        let want = TwistedLoop::from_terms(
            12,
            [
                (0, Matrix2::new(c, 0.0, 0.0, 1.0)),
                (-1, Matrix2::new(0.0, -s, 0.0, 0.0)),
                (1, Matrix2::new(0.0, 0.0, t * c, 0.0)),
            ],
        )
        .unwrap();
        assert!(r.frame.slot_s.max_abs_diff(&want) < 1e-14);
        let vm = TwistedLoop::from_terms(
            12,
            [
                (0, Matrix2::new(1.0 + s * t, 0.0, 0.0, c)),
                (-1, Matrix2::new(0.0, s, 0.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(r.vminus.max_abs_diff(&vm) < 1e-14);
    }

    #[test]
    fn plane_outside_big_cell() {
        let (ps, pt) = plane_input(1.0, -1.0);
        assert!(matches!(
            iwasawa_double(&ps, &pt),
            Err(FactorError::OutsideBigCell { .. })
        ));
    }
}
