//! Para-complex (split-complex) scalars and 2×2 matrices.
//!
//! A para-complex number `x + y·i′` with `i′² = 1` splits as `p·ℓ + q·ℓ̄`
//! where `ℓ = ½(1+i′)`, `ℓ̄ = ½(1−i′)`, `p = x+y` and `q = x−y`. In the null
//! basis every ring operation is componentwise, and most of this crate works
//! there.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Matrix2;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParaComplexError {
    #[error("division by the zero divisor {0}")]
    ZeroDivisor(ParaComplex),
    #[error("{op} is undefined at {value}")]
    Domain { op: &'static str, value: ParaComplex },
    #[error("no ε in {{±1, ±i′}} makes both {x} and {y} admit square roots")]
    NoEpsilon { x: ParaComplex, y: ParaComplex },
    #[error("non-finite component in {0:?}")]
    NonFinite((f64, f64)),
}

/// `re + im·i′`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct ParaComplex {
    pub re: f64,
    pub im: f64,
}

/// Light-cone components: `p` on `ℓ`, `q` on `ℓ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NullPair {
    pub p: f64,
    pub q: f64,
}

impl NullPair {
    pub const fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn to_paracomplex(self) -> ParaComplex {
        ParaComplex::from_null(self.p, self.q)
    }
}

impl From<ParaComplex> for NullPair {
    fn from(z: ParaComplex) -> Self {
        z.to_null()
    }
}

impl From<NullPair> for ParaComplex {
    fn from(n: NullPair) -> Self {
        n.to_paracomplex()
    }
}

impl ParaComplex {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0 };
    /// The unit `i′`.
    pub const I: Self = Self { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Rejects NaN and infinite components.
    pub fn try_new(re: f64, im: f64) -> Result<Self, ParaComplexError> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(ParaComplexError::NonFinite((re, im)))
        }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn from_null(p: f64, q: f64) -> Self {
        Self {
            re: 0.5 * (p + q),
            im: 0.5 * (p - q),
        }
    }

    pub fn to_null(self) -> NullPair {
        NullPair {
            p: self.re + self.im,
            q: self.re - self.im,
        }
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    /// `z·z̄ = re² − im²`.
    pub fn modulus_form(self) -> f64 {
        self.re * self.re - self.im * self.im
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero_divisor(self) -> bool {
        self.modulus_form() == 0.0
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn inv(self) -> Result<Self, ParaComplexError> {
        let n = self.modulus_form();
        if n == 0.0 || !n.is_finite() {
            return Err(ParaComplexError::ZeroDivisor(self));
        }
        Ok(Self {
            re: self.re / n,
            im: -self.im / n,
        })
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, ParaComplexError> {
        Ok(self * rhs.inv()?)
    }

    /// Square root on the branch where both null components are nonnegative.
    pub fn sqrt(self) -> Result<Self, ParaComplexError> {
        let NullPair { p, q } = self.to_null();
        if !(p >= 0.0 && q >= 0.0) || !self.is_finite() {
            return Err(ParaComplexError::Domain {
                op: "sqrt",
                value: self,
            });
        }
        Ok(Self::from_null(p.sqrt(), q.sqrt()))
    }

    /// `e^x (cosh y + i′ sinh y)`.
    pub fn exp(self) -> Self {
        let NullPair { p, q } = self.to_null();
        Self::from_null(p.exp(), q.exp())
    }

    /// Principal logarithm; defined when `x+y > 0` and `x−y > 0`.
    pub fn ln(self) -> Result<Self, ParaComplexError> {
        let NullPair { p, q } = self.to_null();
        if !(p > 0.0 && q > 0.0) || !self.is_finite() {
            return Err(ParaComplexError::Domain {
                op: "log",
                value: self,
            });
        }
        Ok(Self::from_null(p.ln(), q.ln()))
    }

    pub fn admits_sqrt(self) -> bool {
        let NullPair { p, q } = self.to_null();
        p >= 0.0 && q >= 0.0
    }
}

impl fmt::Debug for ParaComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ParaComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0.0 {
            write!(f, "{} - {}i′", self.re, -self.im)
        } else {
            write!(f, "{} + {}i′", self.re, self.im)
        }
    }
}

impl Add for ParaComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for ParaComplex {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for ParaComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for ParaComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for ParaComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re + self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for ParaComplex {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

/// Unit `ε` making `εx` and `εy` admit square roots, tried in the order `+1, −1, +i′, −i′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epsilon {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Epsilon {
    pub const ORDER: [Epsilon; 4] = [
        Epsilon::PlusOne,
        Epsilon::MinusOne,
        Epsilon::PlusI,
        Epsilon::MinusI,
    ];

    pub fn value(self) -> ParaComplex {
        match self {
            Epsilon::PlusOne => ParaComplex::ONE,
            Epsilon::MinusOne => -ParaComplex::ONE,
            Epsilon::PlusI => ParaComplex::I,
            Epsilon::MinusI => -ParaComplex::I,
        }
    }
}

/// First `ε` such that both `εx` and `εy` have square roots, given that `xy` does.
pub fn epsilon_for_sqrt(x: ParaComplex, y: ParaComplex) -> Result<Epsilon, ParaComplexError> {
    if !(x * y).admits_sqrt() {
        return Err(ParaComplexError::NoEpsilon { x, y });
    }
    Epsilon::ORDER
        .into_iter()
        .find(|e| (e.value() * x).admits_sqrt() && (e.value() * y).admits_sqrt())
        .ok_or(ParaComplexError::NoEpsilon { x, y })
}

/// A 2×2 para-complex matrix held as its two real null components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcMat2 {
    pub ell: Matrix2<f64>,
    pub ell_bar: Matrix2<f64>,
}

impl PcMat2 {
    pub fn new(ell: Matrix2<f64>, ell_bar: Matrix2<f64>) -> Self {
        Self { ell, ell_bar }
    }

    pub fn identity() -> Self {
        Self::new(Matrix2::identity(), Matrix2::identity())
    }

    pub fn zeros() -> Self {
        Self::new(Matrix2::zeros(), Matrix2::zeros())
    }

    pub fn from_entries(e: [[ParaComplex; 2]; 2]) -> Self {
        let mut ell = Matrix2::zeros();
        let mut ell_bar = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                let n = e[i][j].to_null();
                ell[(i, j)] = n.p;
                ell_bar[(i, j)] = n.q;
            }
        }
        Self { ell, ell_bar }
    }

    /// Real matrix embedded as `m·ℓ + m·ℓ̄`.
    pub fn from_real(m: Matrix2<f64>) -> Self {
        Self::new(m, m)
    }

    pub fn entry(&self, i: usize, j: usize) -> ParaComplex {
        ParaComplex::from_null(self.ell[(i, j)], self.ell_bar[(i, j)])
    }

    pub fn entries(&self) -> [[ParaComplex; 2]; 2] {
        [
            [self.entry(0, 0), self.entry(0, 1)],
            [self.entry(1, 0), self.entry(1, 1)],
        ]
    }

    pub fn scale(&self, z: ParaComplex) -> Self {
        let n = z.to_null();
        Self::new(self.ell * n.p, self.ell_bar * n.q)
    }

    /// Entrywise conjugate; swaps the null components.
    pub fn conj(&self) -> Self {
        Self::new(self.ell_bar, self.ell)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.ell.transpose(), self.ell_bar.transpose())
    }

    pub fn det(&self) -> ParaComplex {
        ParaComplex::from_null(self.ell.determinant(), self.ell_bar.determinant())
    }

    pub fn try_inverse(&self) -> Option<Self> {
        Some(Self::new(
            self.ell.try_inverse()?,
            self.ell_bar.try_inverse()?,
        ))
    }

    /// Largest absolute difference over all entries, measured on `re` and `im`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let d = self.entry(i, j) - other.entry(i, j);
                m = m.max(d.re.abs()).max(d.im.abs());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::zeros())
    }
}

impl Add for PcMat2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.ell + rhs.ell, self.ell_bar + rhs.ell_bar)
    }
}

impl Sub for PcMat2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.ell - rhs.ell, self.ell_bar - rhs.ell_bar)
    }
}

impl Mul for PcMat2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.ell * rhs.ell, self.ell_bar * rhs.ell_bar)
    }
}

impl Neg for PcMat2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.ell, -self.ell_bar)
    }
}
