//! Scalar abstraction shared by plain and differentiated evaluation.
//!
//! Every loss in this crate is written once against [`Real`]. Evaluating it
//! with `f64` gives the plain value; evaluating it with [`DiffScalar<N>`]
//! carries the exact partial derivatives with respect to `N` seeded inputs
//! through the same arithmetic.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Numeric type the losses and geometry are generic over.
pub trait Real:
    nalgebra::Scalar
    + Copy
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
{
    /// Lifts a constant (zero derivative).
    fn cst(v: f64) -> Self;
    /// Primal value.
    fn val(&self) -> f64;

    /// Square root. At exactly zero the derivative is taken as zero
    /// (the subgradient used for norms of vanishing residuals).
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn cos(self) -> Self;
    fn sin(self) -> Self;

    /// Smaller of the two by value; ties return `self`.
    fn min_val(self, other: Self) -> Self {
        if other.val() < self.val() {
            other
        } else {
            self
        }
    }

    /// Larger of the two by value; ties return `self`.
    fn max_val(self, other: Self) -> Self {
        if other.val() > self.val() {
            other
        } else {
            self
        }
    }

    fn is_finite(&self) -> bool;
}

impl Real for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn val(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Dual number carrying a value and `N` partial derivatives.
///
/// `(a * b).grad = a.val * b.grad + b.val * a.grad`, and so on for every
/// operation. Constants carry a zero gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffScalar<const N: usize> {
    pub val: f64,
    pub grad: [f64; N],
}

/// Dual number over the seven pose parameters `(tx, ty, tz, qw, qx, qy, qz)`.
pub type PoseDual = DiffScalar<7>;

impl<const N: usize> DiffScalar<N> {
    pub const fn constant(val: f64) -> Self {
        Self { val, grad: [0.0; N] }
    }

    /// Independent variable seeded on slot `slot`.
    pub fn variable(val: f64, slot: usize) -> Self {
        let mut grad = [0.0; N];
        grad[slot] = 1.0;
        Self { val, grad }
    }

    /// Applies the chain rule for a unary function with value `f` and
    /// derivative `df` at `self.val`.
    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        let mut grad = self.grad;
        for g in &mut grad {
            *g *= df;
        }
        Self { val: f, grad }
    }
}

impl<const N: usize> Add for DiffScalar<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.val += rhs.val;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for DiffScalar<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.val -= rhs.val;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul for DiffScalar<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [0.0; N];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.val * rhs.grad[i] + rhs.val * self.grad[i];
        }
        Self {
            val: self.val * rhs.val,
            grad,
        }
    }
}

impl<const N: usize> Div for DiffScalar<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let val = self.val / rhs.val;
        let mut grad = [0.0; N];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = (self.grad[i] - val * rhs.grad[i]) / rhs.val;
        }
        Self { val, grad }
    }
}

impl<const N: usize> Neg for DiffScalar<N> {
    type Output = Self;
    #[inline]
    fn neg(mut self) -> Self {
        self.val = -self.val;
        for g in &mut self.grad {
            *g = -*g;
        }
        self
    }
}

macro_rules! assign_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<const N: usize> $tr for DiffScalar<N> {
            #[inline]
            fn $method(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    };
}

assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl<const N: usize> Zero for DiffScalar<N> {
    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn is_zero(&self) -> bool {
        self.val == 0.0 && self.grad.iter().all(|g| *g == 0.0)
    }
}

impl<const N: usize> One for DiffScalar<N> {
    fn one() -> Self {
        Self::constant(1.0)
    }
}

impl<const N: usize> Real for DiffScalar<N> {
    #[inline]
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    #[inline]
    fn val(&self) -> f64 {
        self.val
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        if r == 0.0 {
            self.chain(r, 0.0)
        } else {
            self.chain(r, 0.5 / r)
        }
    }
    #[inline]
    fn abs(self) -> Self {
        let s = if self.val > 0.0 {
            1.0
        } else if self.val < 0.0 {
            -1.0
        } else {
            0.0
        };
        self.chain(self.val.abs(), s)
    }
    #[inline]
    fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e)
    }
    #[inline]
    fn ln(self) -> Self {
        self.chain(self.val.ln(), 1.0 / self.val)
    }
    fn atan2(self, x: Self) -> Self {
        let y = self;
        let r2 = y.val * y.val + x.val * x.val;
        let val = y.val.atan2(x.val);
        let mut grad = [0.0; N];
        if r2 > 0.0 {
            for (i, g) in grad.iter_mut().enumerate() {
                *g = (x.val * y.grad[i] - y.val * x.grad[i]) / r2;
            }
        }
        Self { val, grad }
    }
    #[inline]
    fn cos(self) -> Self {
        self.chain(self.val.cos(), -self.val.sin())
    }
    #[inline]
    fn sin(self) -> Self {
        self.chain(self.val.sin(), self.val.cos())
    }
    #[inline]
    fn is_finite(&self) -> bool {
        self.val.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}
