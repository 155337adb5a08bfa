//! Run configuration and its translation into pipeline inputs.

use std::path::Path;
use std::sync::Arc;

use nalgebra::Matrix2;
use nilweier_core::loops::{LoopPair, TwistedLoop, DEFAULT_ORDER};
use nilweier_core::pipeline::builtins::{builtin, umbrella_frame};
use nilweier_core::pipeline::{linspace, translate_potential, PotentialSpec, RunOptions, ScalarFn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse_expression, EvalDomain, Expression, ParseError, Variable};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in {field}: {source}")]
    Parse {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("in {field}: {source}")]
    Domain {
        field: &'static str,
        #[source]
        source: EvalDomain,
    },
    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid initial frame: {0}")]
    InitialFrame(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    /// Defaults to the builtin's domain when omitted.
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default = "default_truncation")]
    pub truncation_n: usize,
    #[serde(default = "default_steps")]
    pub steps_per_cell: usize,
    #[serde(default = "default_thetas")]
    pub thetas: Vec<f64>,
    #[serde(default)]
    pub initial_frame: Option<InitialFrameConfig>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
}

fn default_truncation() -> usize {
    DEFAULT_ORDER
}

fn default_steps() -> usize {
    16
}

fn default_thetas() -> Vec<f64> {
    vec![0.0]
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Obj, OutputKind::Csv]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum PotentialConfig {
    Builtin(String),
    Normalized {
        b_re: String,
        b_im: String,
        #[serde(rename = "B_re")]
        bb_re: String,
        #[serde(rename = "B_im")]
        bb_im: String,
    },
    Pair {
        f: String,
        g: String,
        #[serde(rename = "Q")]
        q: String,
        #[serde(rename = "R")]
        r: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DomainConfig {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub ns: usize,
    pub nt: usize,
}

/// Constant loop used in both slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum InitialFrameConfig {
    /// `[[cosh a, μ⁻³ sinh a], [μ³ sinh a, cosh a]]`.
    Umbrella(f64),
    /// Coefficients `λ^degree · matrix`.
    Terms(Vec<LoopTerm>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopTerm {
    pub degree: i32,
    pub matrix: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Obj,
    Csv,
}

/// Everything the pipeline needs, validated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub name: String,
    pub potential: PotentialSpec,
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub domain: DomainConfig,
    pub thetas: Vec<f64>,
    pub initial: Option<LoopPair>,
    pub options: RunOptions,
    pub outputs: Vec<OutputKind>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn prepare(&self) -> Result<Prepared, ConfigError> {
        if !(4..=64).contains(&self.truncation_n) {
            return Err(ConfigError::Invalid(format!(
                "truncationN = {} is outside [4, 64]",
                self.truncation_n
            )));
        }
        if self.steps_per_cell == 0 {
            return Err(ConfigError::Invalid("stepsPerCell must be positive".into()));
        }
        if self.thetas.is_empty() || self.thetas.iter().any(|t| !t.is_finite()) {
            return Err(ConfigError::Invalid("thetas must be a non-empty list of finite numbers".into()));
        }
        let fixed = match &self.potential {
            PotentialConfig::Builtin(name) => {
                Some(builtin(name).ok_or_else(|| ConfigError::UnknownBuiltin(name.clone()))?)
            }
            _ => None,
        };
        let domain = match (self.domain, fixed) {
            (Some(d), _) => d,
            (None, Some(b)) => DomainConfig {
                s_min: b.domain.s_min,
                s_max: b.domain.s_max,
                t_min: b.domain.t_min,
                t_max: b.domain.t_max,
                ns: b.domain.ns,
                nt: b.domain.nt,
            },
            (None, None) => return Err(ConfigError::Invalid("domain is required".into())),
        };
        validate_domain(&domain)?;
        let s_grid = linspace(domain.s_min, domain.s_max, domain.ns);
        let t_grid = linspace(domain.t_min, domain.t_max, domain.nt);

        let both: Vec<f64> = s_grid.iter().chain(&t_grid).copied().collect();
        let (name, potential) = match (&self.potential, fixed) {
            (_, Some(b)) => (b.name.to_string(), b.potential()),
            (PotentialConfig::Normalized { b_re, b_im, bb_re, bb_im }, None) => (
                "normalized".to_string(),
                translate_potential(
                    scalar(compile_either("b_re", b_re, &both)?),
                    scalar(compile_either("b_im", b_im, &both)?),
                    scalar(compile_either("B_re", bb_re, &both)?),
                    scalar(compile_either("B_im", bb_im, &both)?),
                ),
            ),
            (PotentialConfig::Pair { f, g, q, r }, None) => (
                "pair".to_string(),
                PotentialSpec::pair(
                    scalar(compile("f", f, Variable::S, &s_grid)?),
                    scalar(compile("g", g, Variable::T, &t_grid)?),
                    scalar(compile("Q", q, Variable::S, &s_grid)?),
                    scalar(compile("R", r, Variable::T, &t_grid)?),
                ),
            ),
            (PotentialConfig::Builtin(name), None) => return Err(ConfigError::UnknownBuiltin(name.clone())),
        };

        let order = self.truncation_n;
        let initial = match &self.initial_frame {
            Some(InitialFrameConfig::Umbrella(a)) => {
                Some(umbrella_frame(*a, order).map_err(|e| ConfigError::InitialFrame(e.to_string()))?)
            }
            Some(InitialFrameConfig::Terms(terms)) => {
                let x = TwistedLoop::from_terms(
                    order,
                    terms.iter().map(|t| {
                        let m = t.matrix;
                        (t.degree, Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]))
                    }),
                )
                .map_err(|e| ConfigError::InitialFrame(e.to_string()))?;
                Some(LoopPair::diagonal(x))
            }
            None => fixed
                .map(|b| b.initial_frame(order))
                .transpose()
                .map_err(|e| ConfigError::InitialFrame(e.to_string()))?
                .flatten(),
        };

        Ok(Prepared {
            name,
            potential,
            s_grid,
            t_grid,
            domain,
            thetas: self.thetas.clone(),
            initial,
            options: RunOptions {
                order,
                steps_per_cell: self.steps_per_cell,
                ..RunOptions::default()
            },
            outputs: self.outputs.clone(),
        })
    }
}

fn validate_domain(d: &DomainConfig) -> Result<(), ConfigError> {
    if d.ns < 2 || d.nt < 2 {
        return Err(ConfigError::Invalid(format!("ns = {}, nt = {} must both be at least 2", d.ns, d.nt)));
    }
    let finite = [d.s_min, d.s_max, d.t_min, d.t_max].iter().all(|x| x.is_finite());
    if !finite || d.s_min >= d.s_max || d.t_min >= d.t_max {
        return Err(ConfigError::Invalid("domain bounds must be finite with min < max".into()));
    }
    if d.s_min > 0.0 || d.s_max < 0.0 || d.t_min > 0.0 || d.t_max < 0.0 {
        return Err(ConfigError::Invalid("domain must contain (0, 0)".into()));
    }
    Ok(())
}

/// Parses and checks the expression on the grid nodes.
fn compile(field: &'static str, src: &str, var: Variable, grid: &[f64]) -> Result<Expression, ConfigError> {
    let e = parse_expression(src, var).map_err(|source| ConfigError::Parse { field, source })?;
    for &x in grid.iter().chain([0.0].iter()) {
        e.eval(x).map_err(|source| ConfigError::Domain { field, source })?;
    }
    Ok(e)
}

/// Normalized data is a function of one real variable written in `s` or `t`.
fn compile_either(field: &'static str, src: &str, grid: &[f64]) -> Result<Expression, ConfigError> {
    match parse_expression(src, Variable::S) {
        Ok(_) => compile(field, src, Variable::S, grid),
        Err(first) => match parse_expression(src, Variable::T) {
            Ok(_) => compile(field, src, Variable::T, grid),
            Err(_) => Err(ConfigError::Parse { field, source: first }),
        },
    }
}

fn scalar(e: Expression) -> ScalarFn {
    Arc::new(move |x| e.eval(x).unwrap_or(f64::NAN))
}
