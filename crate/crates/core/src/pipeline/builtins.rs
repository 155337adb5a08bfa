//! Named example potentials and the horizontal-umbrella initial frame.

use std::sync::Arc;

use nalgebra::Matrix2;

use super::potential::{constant_fn, translate_potential, PotentialSpec};
use crate::loops::{LoopError, LoopPair, TwistedLoop};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub ns: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    pub domain: Domain,
    potential: fn() -> PotentialSpec,
    /// Umbrella parameter `a` of the initial loop, if any.
    pub umbrella: Option<f64>,
}

impl Builtin {
    pub fn potential(&self) -> PotentialSpec {
        (self.potential)()
    }

    pub fn initial_frame(&self, order: usize) -> Result<Option<LoopPair>, LoopError> {
        self.umbrella.map(|a| umbrella_frame(a, order)).transpose()
    }
}

fn normalized(b: f64, bb: f64) -> PotentialSpec {
    translate_potential(constant_fn(b), constant_fn(0.0), constant_fn(bb), constant_fn(0.0))
}

fn cylinder() -> PotentialSpec {
    normalized(1.0, 1.0 / 16.0)
}

fn hyperbolic_cylinder() -> PotentialSpec {
    normalized(1.0, -1.0 / 16.0)
}

fn horizontal_plane() -> PotentialSpec {
    normalized(4.0, 0.0)
}

fn bscroll() -> PotentialSpec {
    PotentialSpec::pair(
        constant_fn(1.0),
        constant_fn(1.0),
        constant_fn(0.0),
        Arc::new(|t| t),
    )
}

const SQUARE2: Domain = Domain {
    s_min: -2.0,
    s_max: 2.0,
    t_min: -2.0,
    t_max: 2.0,
    ns: 41,
    nt: 41,
};

const PLANE_BOX: Domain = Domain {
    s_min: -0.9,
    s_max: 0.9,
    t_min: -0.9,
    t_max: 0.9,
    ns: 37,
    nt: 37,
};

const UNIT_BOX: Domain = Domain {
    s_min: -1.0,
    s_max: 1.0,
    t_min: -1.0,
    t_max: 1.0,
    ns: 41,
    nt: 41,
};

static BUILTINS: [Builtin; 5] = [
    Builtin {
        name: "cylinder",
        summary: "b = 1, B = 1/16: hyperbolic paraboloid in Nil3, circular cylinder in L3",
        domain: SQUARE2,
        potential: cylinder,
        umbrella: None,
    },
    Builtin {
        name: "hyperbolic-cylinder",
        summary: "b = 1, B = -1/16: x3 = -x1 x2 / 2 in Nil3, hyperbolic cylinder in L3",
        domain: SQUARE2,
        potential: hyperbolic_cylinder,
        umbrella: None,
    },
    Builtin {
        name: "horizontal-plane",
        summary: "b = 4, B = 0: horizontal plane in Nil3",
        domain: PLANE_BOX,
        potential: horizontal_plane,
        umbrella: None,
    },
    Builtin {
        name: "bscroll",
        summary: "f = g = 1, Q = 0, R(t) = t: B-scroll",
        domain: UNIT_BOX,
        potential: bscroll,
        umbrella: None,
    },
    Builtin {
        name: "horizontal-umbrella",
        summary: "plane potential with initial loop [[cosh a, mu^-3 sinh a], [mu^3 sinh a, cosh a]], a = 0.3",
        domain: PLANE_BOX,
        potential: horizontal_plane,
        umbrella: Some(0.3),
    },
];

pub fn builtins() -> &'static [Builtin] {
    &BUILTINS
}

pub fn builtin(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name == name)
}

/// `[[cosh a, μ⁻³ sinh a], [μ³ sinh a, cosh a]]` as a diagonal pair.
pub fn umbrella_frame(a: f64, order: usize) -> Result<LoopPair, LoopError> {
    let x = TwistedLoop::from_terms(
        order,
        [
            (0, Matrix2::new(a.cosh(), 0.0, 0.0, a.cosh())),
            (-3, Matrix2::new(0.0, a.sinh(), 0.0, 0.0)),
            (3, Matrix2::new(0.0, 0.0, a.sinh(), 0.0)),
        ],
    )?;
    Ok(LoopPair::diagonal(x))
}
