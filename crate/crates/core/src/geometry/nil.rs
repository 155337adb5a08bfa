//! The Heisenberg group Nil₃ with `τ = ½` and its left-invariant Lorentz metric.

use nalgebra::Vector3;

/// A point of Nil₃.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NilPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl NilPoint {
    pub const IDENTITY: Self = Self {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self::new(x[0], x[1], x[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// `x·y = (x₁+y₁, x₂+y₂, x₃+y₃ + ½(x₁y₂ − y₁x₂))`.
    pub fn mul(self, y: Self) -> Self {
        Self::new(
            self.x1 + y.x1,
            self.x2 + y.x2,
            self.x3 + y.x3 + 0.5 * (self.x1 * y.x2 - y.x1 * self.x2),
        )
    }

    pub fn inv(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }

    /// Components of a coordinate tangent vector at `self` in the frame `E₁, E₂, E₃`.
    pub fn left_invariant(self, v: Vector3<f64>) -> Vector3<f64> {
        Vector3::new(v.x, v.y, v.z + 0.5 * (self.x2 * v.x - self.x1 * v.y))
    }
}

/// `g(X, Y)` with signature `(−, +, +)` on `(E₁, E₂, E₃)`.
pub fn metric(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    -x.x * y.x + x.y * y.y + x.z * y.z
}

/// Lie bracket: `[E₁, E₂] = E₃`, all others zero.
pub fn lie_bracket(x: &Vector3<f64>, y: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(0.0, 0.0, x.x * y.y - x.y * y.x)
}

/// `{X, Y} = ∇_X Y + ∇_Y X` for left-invariant fields.
///
/// Nonzero entries: `{E₁, E₃} = −E₂` and `{E₂, E₃} = −E₁`.
pub fn sym_bracket(x: &Vector3<f64>, y: &Vector3<f64>) -> Vector3<f64> {
    Vector3::new(
        -(x.y * y.z + x.z * y.y),
        -(x.x * y.z + x.z * y.x),
        0.0,
    )
}

/// Metric and symmetric bracket of two left-invariant vectors.
pub fn nil_metric_and_bracket(
    x: &Vector3<f64>,
    y: &Vector3<f64>,
    _at: NilPoint,
) -> (f64, Vector3<f64>) {
    (metric(x, y), sym_bracket(x, y))
}
