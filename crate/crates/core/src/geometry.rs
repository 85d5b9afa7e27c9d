//! Parabolic geometry of the plane.
//!
//! Points carry an isotropic coordinate `x1` and a parabolic coordinate `x2`.
//! The dilation `δ_ρ(x1, x2) = (ρ x1, ρ² x2)` and the quasi-norm
//! `‖x‖ = |x1| + |x2|^{1/2}` are compatible: `‖δ_ρ x‖ = ρ ‖x‖`.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParaPoint<T> {
    pub x1: T,
    pub x2: T,
}

impl<T: Real> ParaPoint<T> {
    #[inline]
    pub fn new(x1: T, x2: T) -> Self {
        Self { x1, x2 }
    }

    #[inline]
    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn is_origin(&self) -> bool {
        self.x1 == T::zero() && self.x2 == T::zero()
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl<T: Real> Add for ParaPoint<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl<T: Real> Sub for ParaPoint<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl<T: Real> Neg for ParaPoint<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2)
    }
}

/// Parabolic quasi-norm `|x1| + |x2|^{1/2}`.
#[inline]
pub fn pnorm<T: Real>(p: ParaPoint<T>) -> T {
    p.x1.abs() + p.x2.abs().sqrt()
}

/// Parabolic dilation `δ_ρ`.
pub fn dilate<T: Real>(p: ParaPoint<T>, rho: T) -> Result<ParaPoint<T>> {
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {rho}")));
    }
    Ok(ParaPoint::new(rho * p.x1, rho * rho * p.x2))
}

/// Direction `σ` of a curve `t ↦ (t σ1, t² σ2)`.
///
/// Either a point of the unit circle or the non-unit pair `(1, 1)` that
/// yields the plain parabola `(t, t²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    s1: T,
    s2: T,
}

impl<T: Real> Direction<T> {
    /// Unit direction; `|σ| = 1` is enforced to `1e-12` (`1e-6` for `f32`).
    pub fn unit(s1: T, s2: T) -> Result<Self> {
        let tol = lit::<T>(1e-12).max(T::epsilon() * lit(16.0));
        let n2 = s1 * s1 + s2 * s2;
        if !n2.is_finite() || (n2 - T::one()).abs() > tol {
            return Err(Error::InvalidArgument(format!("direction ({s1}, {s2}) is not on the unit circle")));
        }
        Ok(Self { s1, s2 })
    }

    /// `σ = (cos θ, sin θ)`.
    pub fn from_angle(theta: T) -> Self {
        Self { s1: theta.cos(), s2: theta.sin() }
    }

    /// The parabola `γ(t) = (t, t²)`.
    pub fn parabola() -> Self {
        Self { s1: T::one(), s2: T::one() }
    }

    #[inline]
    pub fn s1(&self) -> T {
        self.s1
    }

    #[inline]
    pub fn s2(&self) -> T {
        self.s2
    }

    pub fn is_unit(&self) -> bool {
        (self.s1 * self.s1 + self.s2 * self.s2 - T::one()).abs() <= lit(1e-12)
    }

    /// `‖γ_σ(t)‖ / |t|` for `|t| = 1`; the pnorm of the curve is linear in `|t|`.
    pub fn pnorm_rate(&self) -> T {
        self.s1.abs() + self.s2.abs().sqrt()
    }
}

impl<T: Real> Default for Direction<T> {
    fn default() -> Self {
        Self::parabola()
    }
}

/// `γ_σ(t) = (t σ1, t² σ2)`.
#[inline]
pub fn gamma_sigma<T: Real>(t: T, sigma: &Direction<T>) -> ParaPoint<T> {
    ParaPoint::new(t * sigma.s1, t * t * sigma.s2)
}

/// `γ(t) = (t, t²)`.
#[inline]
pub fn gamma<T: Real>(t: T) -> ParaPoint<T> {
    ParaPoint::new(t, t * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCoords<T> {
    pub rho: T,
    pub sigma: Direction<T>,
}

/// Parabolic polar coordinates: `x1 = ρ σ1`, `x2 = ρ² σ2` with `|σ| = 1`.
///
/// `ρ² = (x1² + sqrt(x1⁴ + 4 x2²)) / 2` is the positive root of
/// `ρ⁴ − x1² ρ² − x2² = 0`.
pub fn to_polar<T: Real>(p: ParaPoint<T>) -> Result<PolarCoords<T>> {
    if p.is_origin() {
        return Err(Error::Degenerate("polar coordinates undefined at the origin".into()));
    }
    let a = p.x1 * p.x1;
    let rho2 = (a + a.hypot(lit::<T>(2.0) * p.x2)) * lit(0.5);
    let rho = rho2.sqrt();
    Ok(PolarCoords { rho, sigma: Direction { s1: p.x1 / rho, s2: p.x2 / rho2 } })
}

#[inline]
pub fn from_polar<T: Real>(pc: &PolarCoords<T>) -> ParaPoint<T> {
    gamma_sigma(pc.rho, &pc.sigma)
}

/// Parabolic polar radius `ρ(x)`, homogeneous of degree one under `δ_ρ`.
#[inline]
pub fn polar_radius<T: Real>(p: ParaPoint<T>) -> T {
    let a = p.x1 * p.x1;
    ((a + a.hypot(lit::<T>(2.0) * p.x2)) * lit(0.5)).sqrt()
}

/// Area density `ρ² (1 + σ2²)` of `dx = ρ² dρ (1 + σ2²) dσ`.
#[inline]
pub fn polar_weight<T: Real>(pc: &PolarCoords<T>) -> T {
    pc.rho * pc.rho * (T::one() + pc.sigma.s2 * pc.sigma.s2)
}

/// Parabolic cube `I_r(a, b) = [a − r/2, a + r/2) × [b − r²/2, b + r²/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParaCube<T> {
    pub a: T,
    pub b: T,
    pub r: T,
}

impl<T: Real> ParaCube<T> {
    pub fn new(a: T, b: T, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("bad cube I_{r}({a}, {b})")));
        }
        Ok(Self { a, b, r })
    }

    pub fn centered(center: ParaPoint<T>, r: T) -> Result<Self> {
        Self::new(center.x1, center.x2, r)
    }

    #[inline]
    pub fn center(&self) -> ParaPoint<T> {
        ParaPoint::new(self.a, self.b)
    }

    pub fn half_widths(&self) -> (T, T) {
        let h = lit::<T>(0.5);
        (h * self.r, h * self.r * self.r)
    }

    pub fn volume(&self) -> T {
        self.r * self.r * self.r
    }

    /// Half-open membership test.
    pub fn contains(&self, p: ParaPoint<T>) -> bool {
        let (w1, w2) = self.half_widths();
        p.x1 >= self.a - w1 && p.x1 < self.a + w1 && p.x2 >= self.b - w2 && p.x2 < self.b + w2
    }

    /// Dyadic children: the eight cubes of scale `r/2` tiling the parent.
    ///
    /// A child is `r/2 × r²/4`, so the parent splits into two columns in
    /// `x1` (offsets `±r/4`) and four rows in `x2` (offsets `±r²/8`, `±3r²/8`).
    pub fn dyadic_children(&self) -> [ParaCube<T>; 8] {
        let r = self.r * lit(0.5);
        let d1 = self.r * lit(0.25);
        let q = r * r;
        let bottom = self.b - self.r * self.r * lit(0.5);
        std::array::from_fn(|k| {
            let (row, col) = (k / 2, k % 2);
            let a = if col == 0 { self.a - d1 } else { self.a + d1 };
            let b = bottom + q * (lit::<T>(row as f64) + lit(0.5));
            ParaCube { a, b, r }
        })
    }
}
