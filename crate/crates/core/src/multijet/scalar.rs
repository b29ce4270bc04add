//! Scalar arithmetic that jet functions are written against.
//!
//! Model code is generic over [`Scalar`] so the same closed-form expression
//! can be evaluated on plain `f64` values or on (nested) [`Dual`] numbers.
//! Nesting is what makes repeated prolongation exact: every total time
//! derivative adds one dual layer.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(value: f64) -> Self;

    /// The innermost real value.
    fn re(&self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    /// Four-quadrant arctangent of `self / x`.
    fn atan2(self, x: Self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }

    fn tan(self) -> Self {
        self.sin() / self.cos()
    }
}

impl Scalar for f64 {
    fn from_f64(value: f64) -> Self {
        value
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// `re + eps·ε` with `ε² = 0`, over any scalar (so duals nest).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub re: S,
    pub eps: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }

    pub fn constant(re: S) -> Self {
        Dual { re, eps: S::zero() }
    }

    /// A variable with unit seed.
    pub fn variable(re: S) -> Self {
        Dual { re, eps: S::one() }
    }
}

impl<S: Scalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.eps + rhs.eps)
    }
}

impl<S: Scalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.eps - rhs.eps)
    }
}

impl<S: Scalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.re * rhs.eps + self.eps * rhs.re)
    }
}

impl<S: Scalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = S::one() / rhs.re;
        let re = self.re * inv;
        Dual::new(re, (self.eps - re * rhs.eps) * inv)
    }
}

impl<S: Scalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<S: Scalar> Add<f64> for Dual<S> {
    type Output = Self;
    fn add(self, rhs: f64) -> Self {
        Dual::new(self.re + rhs, self.eps)
    }
}

impl<S: Scalar> Sub<f64> for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: f64) -> Self {
        Dual::new(self.re - rhs, self.eps)
    }
}

impl<S: Scalar> Mul<f64> for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Dual::new(self.re * rhs, self.eps * rhs)
    }
}

impl<S: Scalar> Div<f64> for Dual<S> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        Dual::new(self.re / rhs, self.eps / rhs)
    }
}

impl<S: Scalar> Scalar for Dual<S> {
    fn from_f64(value: f64) -> Self {
        Dual::constant(S::from_f64(value))
    }

    fn re(&self) -> f64 {
        self.re.re()
    }

    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }

    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }

    fn sqrt(self) -> Self {
        let root = self.re.sqrt();
        Dual::new(root, self.eps / (root * 2.0))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }

    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }

    fn atan2(self, x: Self) -> Self {
        let y = self;
        let denom = x.re * x.re + y.re * y.re;
        Dual::new(y.re.atan2(x.re), (x.re * y.eps - y.re * x.eps) / denom)
    }
}
