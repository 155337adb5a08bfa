//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use nalgebra::{Matrix2, Vector3};
use nilweier_core::factorization::{iwasawa_double, FactorError};
use nilweier_core::geometry::{
    abresch_rosenberg, mean_curvature_l3, minimality_residual, spinor_field, surface_field, SurfaceChannel,
};
use nilweier_core::loops::TwistedLoop;
use nilweier_core::pipeline::builtins::{builtin, builtins};
use nilweier_core::pipeline::{
    extract_normalized_potential, frames_on_grid, linspace, stencil_axis, sym_map, weierstrass_integral_l3,
    FrameGrid, PotentialSpec, Quadrature, RunOptions, SurfaceGrid,
};

use common::{exponential_frame, gauge_fit_error, plane_frame, property_suites};

const THETAS: [f64; 3] = [-0.1, 0.0, 0.1];
const FD_STEP: f64 = 1e-3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn opts(order: usize) -> RunOptions {
    RunOptions {
        order,
        ..RunOptions::default()
    }
}

fn builtin_run(name: &str, order: usize) -> (FrameGrid, SurfaceGrid) {
    let b = builtin(name).expect("builtin exists");
    let d = &b.domain;
    let s = linspace(d.s_min, d.s_max, d.ns);
    let t = linspace(d.t_min, d.t_max, d.nt);
    let initial = b.initial_frame(order).unwrap();
    let fr = frames_on_grid(&b.potential(), &s, &t, initial.as_ref(), &opts(order)).unwrap();
    let sg = sym_map(&fr, &THETAS).unwrap();
    (fr, sg)
}

/// Frames on a stencil grid around `samples × samples`.
fn stencil_run(p: &PotentialSpec, samples: &[f64], order: usize) -> (FrameGrid, Vec<(f64, f64)>) {
    let axis = stencil_axis(samples, FD_STEP);
    let fr = frames_on_grid(p, &axis, &axis, None, &opts(order)).unwrap();
    let pts = samples
        .iter()
        .flat_map(|&s| samples.iter().map(move |&t| (s, t)))
        .collect();
    (fr, pts)
}

fn max_over(sg: &SurfaceGrid, f: impl Fn(&[f64; 3], &[f64; 3]) -> f64) -> f64 {
    (0..sg.thetas.len())
        .flat_map(|k| sg.iter_theta(k).map(|(_, _, x)| f(&x.nil, &x.l3)).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let (fr, sg) = pool.install(|| builtin_run("cylinder", 20));
    let secs = start.elapsed().as_secs_f64();
    let frame = fr
        .points
        .iter()
        .flatten()
        .map(|p| gauge_fit_error(&p.frame.slot_s, &exponential_frame(20, p.s, p.t, 0.25)))
        .fold(0.0, f64::max);
    let para = max_over(&sg, |n, _| (n[2] - n[0] * n[1] / 2.0).abs());
    let cyl = max_over(&sg, |_, l| (l[0] * l[0] + l[2] * l[2] - 1.0).abs());
    let pass = fr.holes.is_empty() && frame <= 1e-8 && para <= 1e-6 && cyl <= 1e-6 && secs <= 30.0;
    outcome(
        pass,
        format!("frame {frame:.2e}, |x3 - x1x2/2| {para:.2e}, |x1^2 + x3^2 - 1| {cyl:.2e}, {secs:.2} s on one thread"),
    )
}

fn criterion_2() -> Outcome {
    let (fr, sg) = builtin_run("hyperbolic-cylinder", 20);
    let para = max_over(&sg, |n, _| (n[2] + n[0] * n[1] / 2.0).abs());
    let p = builtin("hyperbolic-cylinder").unwrap().potential();
    let (sfr, pts) = stencil_run(&p, &[-1.5, -0.4, 0.7, 1.6], 20);
    let sp = spinor_field(&sfr, 0.0).unwrap();
    let b = abresch_rosenberg(&sp, &pts, FD_STEP).unwrap();
    let dev = b
        .iter()
        .map(|(_, _, b)| (b.re + 1.0 / 16.0).abs().max(b.im.abs()))
        .fold(0.0, f64::max);
    outcome(
        fr.holes.is_empty() && para <= 1e-6 && dev <= 1e-7,
        format!("|x3 + x1x2/2| {para:.2e}, |B + 1/16| {dev:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let order = 24;
    let (fr, sg) = builtin_run("horizontal-plane", order);
    let flat = max_over(&sg, |n, _| n[2].abs());
    let frame = fr
        .points
        .iter()
        .flatten()
        .map(|p| gauge_fit_error(&p.frame.slot_s, &plane_frame(order, p.s, p.t)))
        .fold(0.0, f64::max);
    let p = builtin("horizontal-plane").unwrap().potential();
    let edge = frames_on_grid(&p, &[-1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0], None, &opts(order)).unwrap();
    let ax = &edge.axis;
    let raised = [(2, 0), (0, 2)].iter().all(|&(i, j)| {
        matches!(
            iwasawa_double(&ax.phi_s[i], &ax.phi_t[j]),
            Err(FactorError::OutsideBigCell { .. })
        )
    });
    let holes: Vec<_> = edge.holes.iter().map(|h| (h.s, h.t)).collect();
    let recorded = holes.contains(&(1.0, -1.0)) && holes.contains(&(-1.0, 1.0));
    outcome(
        fr.holes.is_empty() && flat <= 1e-8 && frame <= 1e-9 && raised && recorded,
        format!("|x3| {flat:.2e}, frame {frame:.2e}, OutsideBigCell at st = -1: {raised}, holes recorded: {recorded}"),
    )
}

fn criterion_4() -> Outcome {
    let cases = [
        ("cylinder", vec![-1.5, -0.3, 0.8, 1.6]),
        ("hyperbolic-cylinder", vec![-1.5, -0.3, 0.8, 1.6]),
        ("horizontal-plane", vec![-0.7, -0.2, 0.3, 0.7]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, samples) in cases {
        let p = builtin(name).unwrap().potential();
        let (fr, pts) = stencil_run(&p, &samples, 20);
        let sg = sym_map(&fr, &[0.0]).unwrap();
        let h = mean_curvature_l3(&surface_field(&sg, 0, SurfaceChannel::L3), &pts, FD_STEP).unwrap();
        let rep = h.deviation(0.5, 1e-3);
        pass &= rep.pass;
        parts.push(format!("{name} {:.2e}", rep.value));
    }
    outcome(pass, format!("max |H - 1/2|: {}", parts.join(", ")))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for b in builtins() {
        let d = &b.domain;
        let samples: Vec<f64> = [-0.6, -0.1, 0.4].iter().map(|x| x * d.s_max).collect();
        let axis = stencil_axis(&samples, FD_STEP);
        let initial = b.initial_frame(20).unwrap();
        let fr = frames_on_grid(&b.potential(), &axis, &axis, initial.as_ref(), &opts(20)).unwrap();
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .flat_map(|&s| samples.iter().map(move |&t| (s, t)))
            .filter(|&(s, t)| fr.find(s, t).is_some())
            .collect();
        let sg = sym_map(&fr, &THETAS).unwrap();
        for k in 0..THETAS.len() {
            let field = surface_field(&sg, k, SurfaceChannel::Nil);
            let base = minimality_residual(&field, &pts, FD_STEP).unwrap();
            let rep = match base.vanishing(1e-5) {
                Ok(r) => r,
                Err(e) => {
                    pass = false;
                    parts.push(format!("{}: {e}", b.name));
                    continue;
                }
            };
            let bent = |s: f64, t: f64| {
                let v = field(s, t)?;
                Some(v + Vector3::new(0.0, 0.0, v.x * v.x / 10.0))
            };
            let pert = minimality_residual(&bent, &pts, FD_STEP).unwrap();
            let separated = pert.max_value() >= 10.0 * rep.value && !pert.vanishing(1e-5).map(|r| r.pass).unwrap_or(false);
            pass &= rep.pass && separated;
            if k == 1 {
                parts.push(format!(
                    "{} {:.1e} (noise {:.1e}, perturbed {:.1e})",
                    b.name,
                    rep.value,
                    rep.noise_floor,
                    pert.max_value()
                ));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for b in builtins() {
        let d = &b.domain;
        let samples: Vec<f64> = [-0.8, -0.3, 0.3, 0.8].iter().map(|x| x * d.s_max).collect();
        let axis = stencil_axis(&samples, FD_STEP);
        let initial = b.initial_frame(24).unwrap();
        let p = b.potential();
        let fr = frames_on_grid(&p, &axis, &axis, initial.as_ref(), &opts(24)).unwrap();
        let np = extract_normalized_potential(&fr).unwrap();
        let mut worst: f64 = 0.0;
        for &x in &samples {
            let a = np.s_at(x).unwrap();
            let c = np.t_at(x).unwrap();
            worst = worst
                .max((a.coupling - p.f_at(x).unwrap()).abs())
                .max((a.hopf - p.q_at(x).unwrap()).abs())
                .max((c.coupling - p.g_at(x).unwrap()).abs())
                .max((c.hopf - p.r_at(x).unwrap()).abs());
        }
        pass &= worst <= 1e-7;
        parts.push(format!("{} {worst:.2e}", b.name));
    }
    outcome(pass, format!("max potential deviation: {}", parts.join(", ")))
}

fn criterion_7() -> Outcome {
    let b = builtin("bscroll").unwrap();
    let d = &b.domain;
    let order = 24;
    let s_grid = linspace(d.s_min, d.s_max, d.ns);
    let t_grid = linspace(d.t_min, d.t_max, d.nt);
    let fr = frames_on_grid(&b.potential(), &s_grid, &t_grid, None, &opts(order)).unwrap();
    let mut worst: f64 = 0.0;
    for p in fr.points.iter().flatten() {
        let j = fr.t_grid.iter().position(|&t| t == p.t).unwrap();
        let phi_t = &fr.axis.phi_t[j];
        let c1 = phi_t.coeff(1)[(1, 0)];
        let k = 1.0 + p.s * c1 / 4.0;
        let phi_minus = TwistedLoop::from_terms(
            order,
            [
                (0, Matrix2::new(1.0 / k, 0.0, 0.0, k)),
                (-1, Matrix2::new(0.0, -p.s / 4.0, 0.0, 0.0)),
            ],
        )
        .unwrap();
        let want = phi_t.mul(&phi_minus).unwrap();
        worst = worst.max(gauge_fit_error(&p.frame.slot_s, &want));
    }
    outcome(
        fr.holes.is_empty() && worst <= 1e-9,
        format!("max |F - Phi^t Phi_-| modulo diagonal gauge {worst:.2e}"),
    )
}

fn criterion_8() -> Outcome {
    let (fr, sg) = builtin_run("cylinder", 20);
    let k0 = THETAS.iter().position(|&t| t == 0.0).unwrap();
    let sp = spinor_field(&fr, 0.0).unwrap();
    let base = sg.find(k0, 0.0, 0.0).unwrap().l3;
    let surf = weierstrass_integral_l3(&sp, (0.0, 0.0), base, Quadrature::Cubic).unwrap();
    let mut worst: f64 = 0.0;
    for (s, t, x) in sg.iter_theta(k0) {
        let y = surf.find(s, t).unwrap();
        for k in 0..3 {
            worst = worst.max((x.l3[k] - y[k]).abs());
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max deviation from Sym {worst:.2e}, path gap {:.2e}", surf.path_gap),
    )
}

fn criterion_9() -> Outcome {
    let results = property_suites(100);
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    let detail = if failed.is_empty() {
        format!("{} suites x 100 cases", results.len())
    } else {
        failed.join("; ")
    };
    outcome(failed.is_empty(), detail)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("cylinder oracle", criterion_1),
        ("hyperbolic cylinder oracle", criterion_2),
        ("horizontal plane oracle", criterion_3),
        ("mean curvature duality", criterion_4),
        ("minimality", criterion_5),
        ("round trip", criterion_6),
        ("B-scroll", criterion_7),
        ("integral representation", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {} ({name}): {}: {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
