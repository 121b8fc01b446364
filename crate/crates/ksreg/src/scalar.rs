//! Scalar abstraction for the numerical kernels.
//!
//! The series algebra and the Hamilton–Jacobi construction are written once,
//! generically, over the [`Scalar`] trait. Three families implement it:
//!
//! * `f64` / `f32` — plain floating point, routed through [`num_traits::Float`]
//!   so the trait stays a thin veneer over the standard numeric stack;
//! * [`Jet<K>`] — forward-mode first-order jets (dual numbers with `K`
//!   independent infinitesimal directions). Running a computation on jets
//!   yields the value *and* its exact partial derivatives with respect to the
//!   seeded inputs, with no truncation error. The crate uses [`Jet4`] for
//!   ∂/∂ν of series coefficients and [`Jet2`] for the planar ∂/∂(α, κ).
//!
//! # Design notes
//!
//! The trait is deliberately small: exactly the operations the kernels need.
//! `powf_const` takes the exponent as `f64` (not `Self`) because every
//! fractional power in this crate has a *constant* exponent; this keeps the
//! jet chain rule trivial and sidesteps `0⁰`-style generic corner cases.
//! `value()` exposes the principal (real) part, which is what stopping
//! criteria, pivot choices, and diagnostics must look at — convergence
//! decisions must never depend on derivative components.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar types usable by the generic numerical kernels.
///
/// Implementors: `f64`, `f32`, and [`Jet<K>`]. See the module docs for the
/// rationale behind each method.
pub trait Scalar:
    Copy
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Embed an `f64` constant (derivative parts zero for jets).
    fn from_f64(x: f64) -> Self;
    /// Principal (real) part.
    fn value(self) -> f64;
    /// Square root; caller guarantees a strictly positive principal part.
    fn sqrt(self) -> Self;
    /// Power with a *constant* real exponent; caller guarantees a strictly
    /// positive principal part.
    fn powf_const(self, r: f64) -> Self;
    /// Sine (used by rotation angles entering generic code).
    fn sin(self) -> Self;
    /// Cosine.
    fn cos(self) -> Self;
    /// True when every component (value and derivatives) is finite.
    fn is_finite_all(self) -> bool;
    /// Flush to exact zero when *every* component has magnitude below `eps`.
    /// A jet with a tiny value but significant derivatives is preserved.
    fn flush_tiny(self, eps: f64) -> Self;

    /// Absolute value of the principal part (diagnostics, pivoting).
    #[inline]
    fn abs_value(self) -> f64 {
        num_traits::Float::abs(self.value())
    }

    /// Integer power by repeated multiplication (small exponents only).
    #[inline]
    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc *= self;
        }
        acc
    }

    /// Multiplicative inverse.
    #[inline]
    fn recip(self) -> Self {
        Self::one() / self
    }
}

/// Implements [`Scalar`] for a primitive float through `num_traits::Float`,
/// keeping the crate's scalar layer aligned with the standard numeric traits.
macro_rules! impl_scalar_for_float {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn zero() -> Self {
                <$t as num_traits::Zero>::zero()
            }
            #[inline]
            fn one() -> Self {
                <$t as num_traits::One>::one()
            }
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn value(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                num_traits::Float::sqrt(self)
            }
            #[inline]
            fn powf_const(self, r: f64) -> Self {
                num_traits::Float::powf(self, r as $t)
            }
            #[inline]
            fn sin(self) -> Self {
                num_traits::Float::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                num_traits::Float::cos(self)
            }
            #[inline]
            fn is_finite_all(self) -> bool {
                num_traits::Float::is_finite(self)
            }
            #[inline]
            fn flush_tiny(self, eps: f64) -> Self {
                if num_traits::Float::abs(self) < eps as $t {
                    <$t as num_traits::Zero>::zero()
                } else {
                    self
                }
            }
        }
    };
}

impl_scalar_for_float!(f64);
impl_scalar_for_float!(f32);

// ─────────────────────────── forward-mode jets ───────────────────────────

/// First-order forward-mode jet with `K` derivative directions.
///
/// Represents `v + Σ_k d[k] ε_k` with `ε_j ε_k = 0`. Arithmetic propagates
/// exact first derivatives alongside the value. Construct independent
/// variables with [`Jet::variable`] and constants with [`Jet::constant`].
///
/// This is a *first-order* jet: second derivatives are not tracked. Where the
/// crate needs mixed second-order information (e.g. ∂²W/∂u∂ν), it
/// differentiates series coefficients with jets and takes the remaining
/// derivative analytically through the series structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const K: usize> {
    /// Value (principal part).
    pub v: f64,
    /// Partial derivatives with respect to the `K` seeded directions.
    pub d: [f64; K],
}

/// Jet with two derivative directions (planar parameters `(α, κ)`).
pub type Jet2 = Jet<2>;
/// Jet with four derivative directions (the asymptote parameter `ν ∈ R⁴`).
pub type Jet4 = Jet<4>;

impl<const K: usize> Jet<K> {
    /// A constant: value `v`, all derivatives zero.
    #[inline]
    pub fn constant(v: f64) -> Self {
        Jet { v, d: [0.0; K] }
    }

    /// The `k`-th independent variable at value `v`: `∂/∂x_k` seeded to 1.
    ///
    /// # Panics
    /// Panics if `k >= K`.
    #[inline]
    pub fn variable(v: f64, k: usize) -> Self {
        assert!(k < K, "jet direction {k} out of range (K = {K})");
        let mut d = [0.0; K];
        d[k] = 1.0;
        Jet { v, d }
    }

    /// Gradient part as a fixed-size array.
    #[inline]
    pub fn grad(self) -> [f64; K] {
        self.d
    }
}

impl<const K: usize> Add for Jet<K> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let mut d = self.d;
        for k in 0..K {
            d[k] += rhs.d[k];
        }
        Jet { v: self.v + rhs.v, d }
    }
}

impl<const K: usize> Sub for Jet<K> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let mut d = self.d;
        for k in 0..K {
            d[k] -= rhs.d[k];
        }
        Jet { v: self.v - rhs.v, d }
    }
}

impl<const K: usize> Mul for Jet<K> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        // Product rule: (a b)' = a' b + a b'.
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = self.d[k] * rhs.v + self.v * rhs.d[k];
        }
        Jet { v: self.v * rhs.v, d }
    }
}

impl<const K: usize> Div for Jet<K> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        // Quotient rule: (a/b)' = (a' b − a b') / b².
        let inv = 1.0 / rhs.v;
        let v = self.v * inv;
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = (self.d[k] - v * rhs.d[k]) * inv;
        }
        Jet { v, d }
    }
}

impl<const K: usize> Neg for Jet<K> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        let mut d = self.d;
        for k in 0..K {
            d[k] = -d[k];
        }
        Jet { v: -self.v, d }
    }
}

impl<const K: usize> AddAssign for Jet<K> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.v += rhs.v;
        for k in 0..K {
            self.d[k] += rhs.d[k];
        }
    }
}

impl<const K: usize> SubAssign for Jet<K> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.v -= rhs.v;
        for k in 0..K {
            self.d[k] -= rhs.d[k];
        }
    }
}

impl<const K: usize> MulAssign for Jet<K> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const K: usize> Scalar for Jet<K> {
    #[inline]
    fn zero() -> Self {
        Jet::constant(0.0)
    }
    #[inline]
    fn one() -> Self {
        Jet::constant(1.0)
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        Jet::constant(x)
    }
    #[inline]
    fn value(self) -> f64 {
        self.v
    }

    #[inline]
    fn sqrt(self) -> Self {
        // (√a)' = a' / (2√a).
        let s = self.v.sqrt();
        let half_inv = 0.5 / s;
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = self.d[k] * half_inv;
        }
        Jet { v: s, d }
    }

    #[inline]
    fn powf_const(self, r: f64) -> Self {
        // (a^r)' = r a^(r−1) a' for constant r.
        let vm1 = self.v.powf(r - 1.0);
        let v = vm1 * self.v;
        let coef = r * vm1;
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = coef * self.d[k];
        }
        Jet { v, d }
    }

    #[inline]
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = c * self.d[k];
        }
        Jet { v: s, d }
    }

    #[inline]
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        let mut d = [0.0; K];
        for k in 0..K {
            d[k] = -s * self.d[k];
        }
        Jet { v: c, d }
    }

    #[inline]
    fn is_finite_all(self) -> bool {
        self.v.is_finite() && self.d.iter().all(|x| x.is_finite())
    }

    #[inline]
    fn flush_tiny(self, eps: f64) -> Self {
        if self.v.abs() < eps && self.d.iter().all(|x| x.abs() < eps) {
            Self::zero()
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Central-difference reference for jet derivatives.
    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1.0);
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn jet_matches_finite_differences_on_a_composite_expression() {
        // f(x) = sin(x) * sqrt(x + 2) / (cos(x) + 3) + x^2.7
        let f = |x: f64| x.sin() * (x + 2.0).sqrt() / (x.cos() + 3.0) + x.powf(2.7);
        let x0 = 1.3_f64;
        let xj = Jet::<1>::variable(x0, 0);
        let two = Jet::<1>::constant(2.0);
        let three = Jet::<1>::constant(3.0);
        let val = xj.sin() * (xj + two).sqrt() / (xj.cos() + three) + xj.powf_const(2.7);
        assert!((val.v - f(x0)).abs() < 1e-14);
        assert!((val.d[0] - fd(f, x0)).abs() < 1e-8);
    }

    #[test]
    fn jet_multidirectional_partials_are_independent() {
        // g(a, b) = a² b + b³, ∂g/∂a = 2ab, ∂g/∂b = a² + 3b².
        let (a0, b0) = (0.7, -1.2);
        let a = Jet::<2>::variable(a0, 0);
        let b = Jet::<2>::variable(b0, 1);
        let g = a * a * b + b * b * b;
        assert!((g.v - (a0 * a0 * b0 + b0.powi(3))).abs() < 1e-15);
        assert!((g.d[0] - 2.0 * a0 * b0).abs() < 1e-15);
        assert!((g.d[1] - (a0 * a0 + 3.0 * b0 * b0)).abs() < 1e-15);
    }

    #[test]
    fn flush_preserves_jets_with_large_derivatives() {
        let j = Jet::<2> { v: 1e-320, d: [1.0, 0.0] };
        assert_eq!(j.flush_tiny(1e-300), j);
        let z = Jet::<2> { v: 1e-320, d: [1e-310, 0.0] };
        assert_eq!(z.flush_tiny(1e-300), Jet::<2>::zero());
    }

    #[test]
    fn float_impls_route_through_num_traits() {
        assert_eq!(<f64 as Scalar>::sqrt(4.0), 2.0);
        assert_eq!(<f32 as Scalar>::from_f64(0.5).value(), 0.5);
        assert_eq!(<f64 as Scalar>::powi(3.0, 3), 27.0);
        assert!(!<f64 as Scalar>::is_finite_all(f64::NAN));
    }
}
