//! Oracles and randomized checks shared by the integration test targets.
#![allow(dead_code)]

use nalgebra::Matrix2;
use nilweier_core::factorization::{birkhoff_split, iwasawa_double, SplitOrder};
use nilweier_core::geometry::spinors::spinor_point;
use nilweier_core::loops::{LoopPair, TwistedLoop};
use nilweier_core::paracomplex::{epsilon_for_sqrt, ParaComplex};
use nilweier_core::pipeline::{frames_on_grid, sym_point, PotentialSpec, RunOptions};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Check = Result<(), TestCaseError>;

pub fn off_diagonal(b: f64, c: f64) -> Matrix2<f64> {
    Matrix2::new(0.0, b, c, 0.0)
}

/// `exp(λ⁻¹sK)·exp(λtK)` with `K = [[0, −1/4], [k21, 0]]`.
pub fn exponential_frame(order: usize, s: f64, t: f64, k21: f64) -> TwistedLoop {
    let k = off_diagonal(-0.25, k21);
    let a = TwistedLoop::exp_monomial(order, k * s, -1).unwrap();
    let b = TwistedLoop::exp_monomial(order, k * t, 1).unwrap();
    a.mul(&b).unwrap()
}

/// Iwasawa frame of the horizontal plane before gauging.
pub fn plane_frame(order: usize, s: f64, t: f64) -> TwistedLoop {
    let c = 1.0 / (1.0 + s * t);
    TwistedLoop::from_terms(
        order,
        [
            (0, Matrix2::new(c, 0.0, 0.0, 1.0)),
            (-1, off_diagonal(-s, 0.0)),
            (1, off_diagonal(0.0, t * c)),
        ],
    )
    .unwrap()
}

/// `max |X − Y·D|` over coefficients, with `D` the constant diagonal part of `Y⁻¹X`.
pub fn gauge_fit_error(x: &TwistedLoop, y: &TwistedLoop) -> f64 {
    let z = y.inv().unwrap().mul(x).unwrap();
    let c = z.coeff(0);
    let d = TwistedLoop::constant(x.order(), Matrix2::new(c[(0, 0)], 0.0, 0.0, c[(1, 1)])).unwrap();
    x.max_abs_diff(&y.mul(&d).unwrap())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub fn small() -> impl Strategy<Value = f64> {
    -0.6f64..0.6
}

pub fn pair4() -> impl Strategy<Value = [f64; 4]> {
    [small(), small(), small(), small()]
}

/// Birkhoff splitting of `exp(λ⁻¹A)·exp(λB)·exp(λ⁻¹C)` reconstructs the input.
pub fn birkhoff_reconstruction(v: [f64; 4], w: [f64; 2], order_pick: bool) -> Check {
    let n = 16;
    let a = TwistedLoop::exp_monomial(n, off_diagonal(v[0], v[1]), -1).unwrap();
    let b = TwistedLoop::exp_monomial(n, off_diagonal(v[2], v[3]), 1).unwrap();
    let c = TwistedLoop::exp_monomial(n, off_diagonal(w[0], w[1]), -1).unwrap();
    let x = a.mul(&b).unwrap().mul(&c).unwrap();
    let o = if order_pick {
        SplitOrder::MinusStarPlus
    } else {
        SplitOrder::PlusStarMinus
    };
    let r = birkhoff_split(&x, o).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back = match o {
        SplitOrder::MinusStarPlus => r.minus.mul(&r.plus).unwrap(),
        SplitOrder::PlusStarMinus => r.plus.mul(&r.minus).unwrap(),
    };
    let rel = back.max_abs_diff(&x) / x.frobenius();
    ensure(rel <= 1e-10 && r.minus.is_minus() && r.plus.is_plus(), || {
        format!("relative reconstruction error {rel:e}")
    })
}

/// Iwasawa factors reconstruct both inputs, keep the twisting parity and have unit determinant.
pub fn iwasawa_reconstruction(v: [f64; 4], theta: f64) -> Check {
    let n = 18;
    let ps = TwistedLoop::exp_monomial(n, off_diagonal(v[0], v[1]), -1).unwrap();
    let pt = TwistedLoop::exp_monomial(n, off_diagonal(v[2], v[3]), 1).unwrap();
    let r = iwasawa_double(&ps, &pt).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let f = &r.frame.slot_s;
    let e1 = f.mul(&r.vplus).unwrap().max_abs_diff(&ps) / ps.frobenius();
    let e2 = f.mul(&r.vminus).unwrap().max_abs_diff(&pt) / pt.frobenius();
    ensure(e1 <= 1e-10 && e2 <= 1e-10, || format!("relative errors {e1:e}, {e2:e}"))?;
    let lam = theta.exp();
    for x in [f, &r.vplus, &r.vminus] {
        ensure(x.satisfies_parity(), || "twisting parity violated".into())?;
        let d = x.eval(lam).determinant();
        ensure((d - 1.0).abs() <= 1e-10, || format!("det = {d}"))?;
    }
    Ok(())
}

pub fn pc() -> impl Strategy<Value = ParaComplex> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| ParaComplex::new(a, b))
}

/// Square root, exponential and logarithm domain laws.
pub fn paracomplex_laws(z: ParaComplex) -> Check {
    let close = |a: ParaComplex, b: ParaComplex, tol: f64| {
        let scale = b.re.abs().max(b.im.abs()).max(1.0);
        (a.re - b.re).abs() <= tol * scale && (a.im - b.im).abs() <= tol * scale
    };
    let n = z.to_null();
    match z.sqrt() {
        Ok(w) => {
            ensure(n.p >= 0.0 && n.q >= 0.0, || format!("sqrt accepted {z:?}"))?;
            ensure(close(w * w, z, 1e-14), || format!("sqrt({z:?})² = {:?}", w * w))?;
            let wn = w.to_null();
            ensure(wn.p >= 0.0 && wn.q >= 0.0, || "sqrt branch".into())?;
        }
        Err(_) => ensure(n.p < 0.0 || n.q < 0.0, || format!("sqrt rejected {z:?}"))?,
    }
    let e = z.exp();
    let back = e.ln().map_err(|err| TestCaseError::fail(err.to_string()))?;
    ensure(close(back, z, 1e-13), || format!("log(exp {z:?}) = {back:?}"))?;
    match z.ln() {
        Ok(l) => {
            ensure(n.p > 0.0 && n.q > 0.0, || format!("log accepted {z:?}"))?;
            ensure(close(l.exp(), z, 1e-13), || format!("exp(log {z:?})"))?;
        }
        Err(_) => ensure(n.p <= 0.0 || n.q <= 0.0, || format!("log rejected {z:?}"))?,
    }
    Ok(())
}

/// An `ε` from the fixed candidate list makes both `εx` and `εy` admit roots.
pub fn epsilon_selector(x: ParaComplex, y: ParaComplex) -> Check {
    let prod = x * y;
    match epsilon_for_sqrt(x, y) {
        Ok(eps) => {
            let e = eps.value();
            ensure((e * x).sqrt().is_ok() && (e * y).sqrt().is_ok(), || {
                format!("{eps:?} fails for {x:?}, {y:?}")
            })
        }
        Err(_) => ensure(!prod.admits_sqrt(), || format!("no ε for {x:?}, {y:?}")),
    }
}

/// Right multiplication by a constant diagonal loop leaves the Sym points unchanged.
pub fn sym_gauge_invariance(v: [f64; 4], c: f64, theta: f64) -> Check {
    let n = 16;
    let a = TwistedLoop::exp_monomial(n, off_diagonal(v[0], v[1]), -1).unwrap();
    let b = TwistedLoop::exp_monomial(n, off_diagonal(v[2], v[3]), 1).unwrap();
    let f = a.mul(&b).unwrap();
    let d = TwistedLoop::constant(n, Matrix2::new(c.exp(), 0.0, 0.0, (-c).exp())).unwrap();
    let g = f.mul(&d).unwrap();
    let p = sym_point(&LoopPair::diagonal(f), theta).unwrap();
    let q = sym_point(&LoopPair::diagonal(g), theta).unwrap();
    let gap = (0..3)
        .map(|k| (p.nil[k] - q.nil[k]).abs().max((p.l3[k] - q.l3[k]).abs()))
        .fold(0.0, f64::max);
    ensure(gap <= 1e-12, || format!("gauge moved the surface by {gap:e}"))
}

/// `ĥ` from the gauge equals `2(ψ₂ψ̄₂ − ψ₁ψ̄₁)` at any spectral parameter.
pub fn h_mu_independence(f: f64, g: f64, q: f64, r: f64, s: f64, t: f64, theta: f64) -> Check {
    let p = PotentialSpec::constant(f, g, q, r);
    let opts = RunOptions {
        order: 20,
        ..RunOptions::default()
    };
    let fr = frames_on_grid(&p, &[s], &[t], None, &opts).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let Some(pt) = fr.point(0, 0) else {
        return Err(TestCaseError::reject("outside the big cell"));
    };
    let sp = spinor_point(pt, theta).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let gap = (sp.h_from_spinors() - pt.h_hat).abs();
    ensure(gap <= 1e-9, || format!("h gap {gap:e} at theta {theta}"))
}

/// Observed order of the central difference of `θ ↦ F` against `mu_log_derivative`.
pub fn mu_log_derivative_order(v: [f64; 4], theta: f64) -> Result<f64, TestCaseError> {
    let n = 16;
    let a = TwistedLoop::exp_monomial(n, off_diagonal(v[0], v[1]), -1).unwrap();
    let b = TwistedLoop::exp_monomial(n, off_diagonal(v[2], v[3]), 1).unwrap();
    let c = TwistedLoop::exp_monomial(n, off_diagonal(v[1], -v[3]), -1).unwrap();
    let x = LoopPair::new(a.mul(&b).unwrap(), b.mul(&c).unwrap()).unwrap();
    let exact = x.mu_log_derivative(theta).unwrap();
    let inv = x.eval(theta).try_inverse().unwrap();
    let err = |h: f64| {
        let d = (x.eval(theta + h) - x.eval(theta - h)).scale(ParaComplex::real(0.5 / h));
        let approx = (d * inv).scale(ParaComplex::I);
        approx.max_abs_diff(&exact)
    };
    let (e1, e2) = (err(0.04), err(0.02));
    Ok((e1 / e2).log2())
}

pub fn mu_log_derivative_convergence(v: [f64; 4], theta: f64) -> Check {
    if v.iter().map(|x| x.abs()).sum::<f64>() < 0.2 {
        return Err(TestCaseError::reject("nearly constant loop"));
    }
    let order = mu_log_derivative_order(v, theta)?;
    ensure(order >= 1.9, || format!("observed order {order}"))
}

/// Runs one randomized property for `cases` cases; `Err` carries the first failure.
pub fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Check,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// All randomized property suites with `cases` cases each.
pub fn property_suites(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "Birkhoff reconstruction",
            run_property(cases, (pair4(), [small(), small()], any::<bool>()), |(v, w, o)| {
                birkhoff_reconstruction(v, w, o)
            }),
        ),
        (
            "Iwasawa reconstruction, parity, det",
            run_property(cases, (pair4(), -0.5f64..0.5), |(v, th)| iwasawa_reconstruction(v, th)),
        ),
        ("para-complex laws", run_property(cases, pc(), paracomplex_laws)),
        ("epsilon selector", run_property(cases, (pc(), pc()), |(x, y)| epsilon_selector(x, y))),
        (
            "Sym gauge invariance",
            run_property(cases, (pair4(), -1.0f64..1.0, -0.3f64..0.3), |(v, c, th)| {
                sym_gauge_invariance(v, c, th)
            }),
        ),
        (
            "h independent of mu",
            run_property(cases, h_inputs(), |(f, g, q, r, s, t, th)| {
                h_mu_independence(f, g, q, r, s, t, th)
            }),
        ),
        (
            "mu log-derivative convergence",
            run_property(cases, (pair4(), -0.5f64..0.5), |(v, th)| mu_log_derivative_convergence(v, th)),
        ),
    ]
}

pub fn h_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64, f64)> {
    (
        0.5f64..2.0,
        0.5f64..2.0,
        -0.5f64..0.5,
        -0.5f64..0.5,
        -0.8f64..0.8,
        -0.8f64..0.8,
        -0.3f64..0.3,
    )
}
