//! The `generate`, `verify`, `roundtrip` and `list-builtins` commands.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nalgebra::Matrix2;
use nilweier_core::geometry::{
    abresch_rosenberg_holomorphy, dirac_potential_real_part, dirac_residuals, first_fundamental_form,
    flatness_residual, mean_curvature_l3, minimality_residual, normal_residual, spinor_field, surface_field,
    GeometryError, ResidualField, ResidualReport, Space, SurfaceChannel,
};
use nilweier_core::paracomplex::PcMat2;
use nilweier_core::pipeline::builtins::builtins;
use nilweier_core::pipeline::{
    extract_normalized_potential, frames_on_grid, stencil_axis, sym_map, FrameGrid, NormalizedPotential,
    PotentialSpec,
};
use serde::Serialize;

use crate::config::{OutputKind, Prepared};
use crate::export::{export_csv, export_obj, Channel};

/// Finite-difference spacing of the verification stencils.
pub const VERIFY_STEP: f64 = 1e-3;
/// Candidate spacings for the second-derivative flatness check; each point
/// reports the spacing with the lowest noise floor.
pub const FLATNESS_STEPS: [f64; 4] = [2e-3, 2.5e-3, 3e-3, 4e-3];
pub const ROUNDTRIP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Conditioning {
    pub max_condition_number: f64,
    pub max_tail: f64,
    pub det_drift: f64,
    pub holes: usize,
}

impl Conditioning {
    fn of(fr: &FrameGrid) -> Self {
        Self {
            max_condition_number: fr.max_conditioning(),
            max_tail: fr.max_tail(),
            det_drift: fr.axis.det_drift,
            holes: fr.holes.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HoleEntry {
    pub i: usize,
    pub j: usize,
    pub s: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub potential: String,
    pub domain: crate::config::DomainConfig,
    pub truncation_n: usize,
    pub steps_per_cell: usize,
    pub thetas: Vec<f64>,
    pub initial_frame: bool,
    pub files: Vec<String>,
    pub conditioning: Conditioning,
    pub holes: Vec<HoleEntry>,
}

pub fn build_frames(p: &Prepared, s_grid: &[f64], t_grid: &[f64]) -> Result<FrameGrid> {
    frames_on_grid(&p.potential, s_grid, t_grid, p.initial.as_ref(), &p.options)
        .with_context(|| format!("building frames for {}", p.name))
}

/// Files produced by `generate`, as `(name, contents)` in write order.
pub fn generate_files(p: &Prepared) -> Result<(Manifest, Vec<(String, String)>)> {
    let fr = build_frames(p, &p.s_grid, &p.t_grid)?;
    for h in &fr.holes {
        log::warn!("hole at (s, t) = ({}, {}): {}", h.s, h.t, h.reason);
    }
    let sg = sym_map(&fr, &p.thetas)?;
    let mut files = Vec::new();
    if p.outputs.contains(&OutputKind::Obj) {
        for k in 0..p.thetas.len() {
            for ch in [Channel::Nil, Channel::L3] {
                files.push((format!("{}_theta{k}.obj", ch.name()), export_obj(&sg, k, ch)?));
            }
        }
    }
    if p.outputs.contains(&OutputKind::Csv) {
        files.push(("surface.csv".to_string(), export_csv(&sg)?));
    }
    let manifest = Manifest {
        potential: p.name.clone(),
        domain: p.domain,
        truncation_n: p.options.order,
        steps_per_cell: p.options.steps_per_cell,
        thetas: p.thetas.clone(),
        initial_frame: p.initial.is_some(),
        files: files.iter().map(|(n, _)| n.clone()).collect(),
        conditioning: Conditioning::of(&fr),
        holes: fr
            .holes
            .iter()
            .map(|h| HoleEntry {
                i: h.i,
                j: h.j,
                s: h.s,
                t: h.t,
                reason: h.reason.clone(),
            })
            .collect(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    files.push(("manifest.json".to_string(), text));
    Ok((manifest, files))
}

pub fn generate(p: &Prepared, out: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let (manifest, files) = generate_files(p)?;
    for (name, text) in files {
        let path: PathBuf = out.join(&name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckEntry {
    pub check: String,
    pub value: f64,
    pub noise_floor: f64,
    pub threshold: f64,
    pub points: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl From<ResidualReport> for CheckEntry {
    fn from(r: ResidualReport) -> Self {
        Self {
            check: r.check,
            value: r.value,
            noise_floor: r.noise_floor,
            threshold: r.threshold,
            points: r.points,
            pass: r.pass,
            detail: None,
        }
    }
}

impl CheckEntry {
    fn failed(check: String, threshold: f64, detail: String) -> Self {
        Self {
            check,
            value: f64::NAN,
            noise_floor: f64::NAN,
            threshold,
            points: 0,
            pass: false,
            detail: Some(detail),
        }
    }

    fn exact(check: &str, value: f64, threshold: f64) -> Self {
        ResidualReport::exact(check, value, threshold).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub potential: String,
    pub pass: bool,
    pub checks: Vec<CheckEntry>,
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        if self.pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn to_json(&self) -> String {
        // NaN marks a check that could not be evaluated; JSON has no NaN so it becomes null.
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn label(check: &str, theta: f64) -> String {
    format!("{check} (theta = {theta})")
}

fn vanishing(name: String, field: Result<ResidualField, GeometryError>, threshold: f64) -> CheckEntry {
    let field = match field {
        Ok(f) => f,
        Err(e) => return CheckEntry::failed(name, threshold, e.to_string()),
    };
    match field.vanishing(threshold) {
        Ok(r) => CheckEntry { check: name, ..r.into() },
        Err(e) => CheckEntry {
            check: name,
            value: field.max_value(),
            noise_floor: field.max_noise(),
            threshold,
            points: field.samples.len(),
            pass: false,
            detail: Some(e.to_string()),
        },
    }
}

fn deviation(name: String, field: Result<ResidualField, GeometryError>, target: f64, tol: f64) -> CheckEntry {
    match field {
        Ok(f) => CheckEntry { check: name, ..f.deviation(target, tol).into() },
        Err(e) => CheckEntry::failed(name, tol, e.to_string()),
    }
}

/// Interior sample points at a quarter, half and three quarters of each range.
pub fn sample_points(p: &Prepared) -> (Vec<f64>, Vec<f64>) {
    let at = |a: f64, b: f64| [0.25, 0.5, 0.75].map(|f| a + f * (b - a)).to_vec();
    (at(p.domain.s_min, p.domain.s_max), at(p.domain.t_min, p.domain.t_max))
}

/// Merges runs at several spacings, keeping each point's least noisy sample.
fn best_per_point(
    runs: impl Iterator<Item = Result<Result<ResidualField, GeometryError>>>,
) -> Result<Result<ResidualField, GeometryError>> {
    let mut best: Option<ResidualField> = None;
    let mut last_err = None;
    for run in runs {
        let field = match run? {
            Ok(f) => f,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match &mut best {
            None => best = Some(field),
            Some(b) => {
                for x in field.samples {
                    match b.samples.iter_mut().find(|y| y.s == x.s && y.t == x.t) {
                        Some(y) if x.noise < y.noise => *y = x,
                        Some(_) => {}
                        None => b.samples.push(x),
                    }
                }
            }
        }
    }
    Ok(match (best, last_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => Err(GeometryError::DegenerateSpinors),
    })
}

/// Stencil axis around the samples and the origin.
fn axis(samples: &[f64], step: f64) -> Vec<f64> {
    let mut with_origin = samples.to_vec();
    with_origin.push(0.0);
    stencil_axis(&with_origin, step)
}

/// Sample points whose whole stencil is free of holes.
fn usable(fr: &FrameGrid, s: &[f64], t: &[f64], step: f64) -> Vec<(f64, f64)> {
    let r = 4;
    s.iter()
        .flat_map(|&a| t.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| {
            (-r..=r).all(|i| (-r..=r).all(|j| fr.find(a + i as f64 * step, b + j as f64 * step).is_some()))
        })
        .collect()
}

fn sigma3() -> PcMat2 {
    PcMat2::from_real(Matrix2::new(1.0, 0.0, 0.0, -1.0))
}

/// `max |det F − 1|` and `max |σ₃ (F̄ᵀ)⁻¹ σ₃ − F|` over the grid.
fn frame_checks(fr: &FrameGrid, thetas: &[f64]) -> (f64, f64) {
    let (mut det, mut real) = (0.0f64, 0.0f64);
    for p in fr.points.iter().flatten() {
        for &theta in thetas {
            let f = p.frame.eval(theta);
            let d = f.det();
            det = det.max((d.re - 1.0).abs()).max(d.im.abs());
            real = match f.conj().transpose().try_inverse() {
                Some(inv) => real.max((sigma3() * inv * sigma3()).max_abs_diff(&f)),
                None => f64::INFINITY,
            };
        }
    }
    (det, real)
}

/// Largest differences `(|f̃ − f|, |g̃ − g|)` and `(|Q̃ − Q|/4, |R̃ − R|/4)` on the axes.
pub fn roundtrip_errors(np: &NormalizedPotential, p: &PotentialSpec) -> Result<(f64, f64)> {
    let (mut b, mut bb) = (0.0f64, 0.0f64);
    for a in &np.s_axis {
        b = b.max((a.coupling - p.f_at(a.x)?).abs());
        bb = bb.max((a.hopf - p.q_at(a.x)?).abs() / 4.0);
    }
    for a in &np.t_axis {
        b = b.max((a.coupling - p.g_at(a.x)?).abs());
        bb = bb.max((a.hopf - p.r_at(a.x)?).abs() / 4.0);
    }
    Ok((b, bb))
}

pub fn verify(p: &Prepared) -> Result<Report> {
    let mut checks = Vec::new();
    let mesh = build_frames(p, &p.s_grid, &p.t_grid)?;
    let (det, real) = frame_checks(&mesh, &p.thetas);
    checks.push(CheckEntry::exact("frame determinant", det, 1e-9));
    checks.push(CheckEntry::exact("frame reality", real, 1e-9));
    checks.push(CheckEntry::exact("holes", mesh.holes.len() as f64, 0.0));

    let (ss, ts) = sample_points(p);
    let fr = build_frames(p, &axis(&ss, VERIFY_STEP), &axis(&ts, VERIFY_STEP))?;
    let pts = usable(&fr, &ss, &ts, VERIFY_STEP);
    let step = VERIFY_STEP;
    let sg = sym_map(&fr, &p.thetas)?;
    for (k, &theta) in p.thetas.iter().enumerate() {
        let nil = surface_field(&sg, k, SurfaceChannel::Nil);
        let l3 = surface_field(&sg, k, SurfaceChannel::L3);
        let normal = surface_field(&sg, k, SurfaceChannel::Normal);
        checks.push(vanishing(label("minimality", theta), minimality_residual(&nil, &pts, step), 1e-5));
        checks.push(vanishing(
            label("conformality", theta),
            first_fundamental_form(&nil, Space::Nil, &pts, step).map(|(_, c)| c),
            1e-6,
        ));
        checks.push(deviation(label("mean curvature L3", theta), mean_curvature_l3(&l3, &pts, step), 0.5, 1e-3));
        checks.push(vanishing(label("L3 normal", theta), normal_residual(&l3, &normal, &pts, step), 1e-6));
        match spinor_field(&fr, theta) {
            Ok(sp) => {
                checks.push(CheckEntry::exact(&label("spinor h", theta), sp.h_gap(), 1e-9));
                checks.push(vanishing(label("Dirac equation", theta), dirac_residuals(&sp, &pts, step), 1e-6));
                checks.push(vanishing(
                    label("Dirac potential real part", theta),
                    dirac_potential_real_part(&sp, &pts, step),
                    1e-8,
                ));
                checks.push(vanishing(
                    label("Abresch-Rosenberg holomorphy", theta),
                    abresch_rosenberg_holomorphy(&sp, &pts, step),
                    1e-5,
                ));
            }
            Err(e) => checks.push(CheckEntry::failed(label("spinors", theta), 0.0, e.to_string())),
        }
    }

    let flat = best_per_point(FLATNESS_STEPS.iter().map(|&step| {
        let fr = build_frames(p, &axis(&ss, step), &axis(&ts, step))?;
        let pts = usable(&fr, &ss, &ts, step);
        Ok(flatness_residual(&fr, &p.potential, &pts, step, &p.thetas))
    }))?;
    checks.push(vanishing("flatness".to_string(), flat, 1e-8));

    match extract_normalized_potential(&fr) {
        Ok(np) => {
            let (b, bb) = roundtrip_errors(&np, &p.potential)?;
            checks.push(CheckEntry::exact("round trip b", b, ROUNDTRIP_TOL));
            checks.push(CheckEntry::exact("round trip B", bb, ROUNDTRIP_TOL));
        }
        Err(e) => checks.push(CheckEntry::failed("round trip".to_string(), ROUNDTRIP_TOL, e.to_string())),
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        potential: p.name.clone(),
        pass,
        checks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisRow {
    pub x: f64,
    pub recovered: [f64; 2],
    pub input: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundTrip {
    pub potential: String,
    /// `(s, [f̃, Q̃], [f, Q])` along `t = 0`.
    pub s_axis: Vec<AxisRow>,
    /// `(t, [g̃, R̃], [g, R])` along `s = 0`.
    pub t_axis: Vec<AxisRow>,
    pub b_error: f64,
    pub hopf_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn roundtrip(p: &Prepared) -> Result<RoundTrip> {
    let (ss, ts) = sample_points(p);
    let fr = build_frames(p, &axis(&ss, VERIFY_STEP), &axis(&ts, VERIFY_STEP))?;
    let np = extract_normalized_potential(&fr)?;
    let (b_error, hopf_error) = roundtrip_errors(&np, &p.potential)?;
    let rows = |axis: &[nilweier_core::pipeline::normalized::AxisSample],
                f: &dyn Fn(f64) -> Result<[f64; 2]>|
     -> Result<Vec<AxisRow>> {
        axis.iter()
            .filter(|a| ss.iter().chain(&ts).chain([0.0].iter()).any(|x| (x - a.x).abs() < 1e-12))
            .map(|a| {
                Ok(AxisRow {
                    x: a.x,
                    recovered: [a.coupling, a.hopf],
                    input: f(a.x)?,
                })
            })
            .collect()
    };
    let pot = &p.potential;
    Ok(RoundTrip {
        potential: p.name.clone(),
        s_axis: rows(&np.s_axis, &|x| Ok([pot.f_at(x)?, pot.q_at(x)?]))?,
        t_axis: rows(&np.t_axis, &|x| Ok([pot.g_at(x)?, pot.r_at(x)?]))?,
        b_error,
        hopf_error,
        tolerance: ROUNDTRIP_TOL,
        pass: b_error <= ROUNDTRIP_TOL && hopf_error <= ROUNDTRIP_TOL,
    })
}

pub fn list_builtins() -> String {
    let width = builtins().iter().map(|b| b.name.len()).max().unwrap_or(0);
    builtins()
        .iter()
        .map(|b| format!("{:width$}  {}\n", b.name, b.summary))
        .collect()
}
