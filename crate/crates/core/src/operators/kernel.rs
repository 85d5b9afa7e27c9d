//! Parabolically homogeneous kernels and the two discretizations of the
//! commutator they define: a direct lattice sum and the method of rotations.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::{commutator_t, BracketOp, CurveOpSpec, LinearOp, Taper};
use crate::error::{Error, Result};
use crate::geometry::{pnorm, polar_radius, to_polar, Direction, ParaPoint};
use crate::grid::{smooth_step, translate, Field2D};
use crate::scalar::{lit, Real};
use crate::symbols::SymbolA;

/// `x2⁻² exp(−x1² / (4 x2))` for `x2 > 0`, zero otherwise.
pub fn heat_kernel<T: Real>(x: ParaPoint<T>) -> Result<T> {
    if x.is_origin() {
        return Err(Error::Degenerate("heat kernel is singular at the origin".into()));
    }
    if x.x2 <= T::zero() {
        return Ok(T::zero());
    }
    Ok((-(x.x1 * x.x1) / (lit::<T>(4.0) * x.x2)).exp() / (x.x2 * x.x2))
}

type CircleFn<T> = dyn Fn(T, T) -> T + Send + Sync;

/// Restriction of a kernel homogeneous of degree −4 to the unit circle.
#[derive(Clone)]
pub struct HomKernelProfile<T> {
    name: String,
    k: Arc<CircleFn<T>>,
    even_in_x1: bool,
}

impl<T: Real> std::fmt::Debug for HomKernelProfile<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HomKernelProfile").field("name", &self.name).field("even_in_x1", &self.even_in_x1).finish()
    }
}

impl<T: Real> HomKernelProfile<T> {
    /// Wraps `K(σ1, σ2)`; evenness in `σ1` is detected on 720 sample angles.
    pub fn new<F>(name: impl Into<String>, k: F) -> Self
    where
        F: Fn(T, T) -> T + Send + Sync + 'static,
    {
        let mut even = true;
        for m in 0..720 {
            let th = lit::<T>(std::f64::consts::PI * m as f64 / 360.0);
            let (c, s) = (th.cos(), th.sin());
            let (a, b) = (k(c, s), k(-c, s));
            if (a - b).abs() > lit::<T>(1e-12) * a.abs().max(b.abs()).max(T::one()) {
                even = false;
                break;
            }
        }
        Self { name: name.into(), k: Arc::new(k), even_in_x1: even }
    }

    /// The heat kernel on the unit circle.
    pub fn heat() -> Self {
        Self::new("heat", |a: T, b: T| heat_kernel(ParaPoint::new(a, b)).unwrap_or(T::zero()))
    }

    /// `K(σ) = 1 + σ2²`.
    pub fn smooth() -> Self {
        Self::new("one_plus_s2sq", |_: T, b: T| T::one() + b * b)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn even_in_x1(&self) -> bool {
        self.even_in_x1
    }

    #[inline]
    pub fn eval(&self, sigma: &Direction<T>) -> T {
        (self.k)(sigma.s1(), sigma.s2())
    }

    /// `∫_{S¹} |K(σ)| (1 + σ2²) dσ` by the `n`-point trapezoid rule in angle.
    pub fn circle_mass(&self, n: usize) -> T {
        let dth = lit::<T>(2.0 * std::f64::consts::PI / n as f64);
        (0..n)
            .map(|m| {
                let s = Direction::from_angle(dth * T::from_usize_lossy(m));
                self.eval(&s).abs() * (T::one() + s.s2() * s.s2())
            })
            .fold(T::zero(), |a, b| a + b)
            * dth
    }
}

/// `K(x) = ρ⁻⁴ K(σ)` with `(ρ, σ)` the parabolic polar coordinates of `x`.
pub fn hom_extend<T: Real>(profile: &HomKernelProfile<T>, x: ParaPoint<T>) -> Result<T> {
    let pc = to_polar(x)?;
    let r2 = pc.rho * pc.rho;
    Ok(profile.eval(&pc.sigma) / (r2 * r2))
}

/// Radius used to excise the singularity and truncate the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excision {
    /// Parabolic polar radius `ρ`: along `γ_σ` with unit `σ`, `ρ = |t|`.
    Polar,
    /// `|x1| + |x2|^{1/2}`: along `γ_σ` this is `|t| (|σ1| + |σ2|^{1/2})`.
    ParabolicNorm,
}

/// Radial window `inner ≤ r(y) ≤ outer`, hard or smoothly tapered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWindow<T> {
    pub inner: T,
    pub outer: T,
    /// Width of the smooth ramps inside the window; 0 means hard edges.
    pub taper: T,
    pub excision: Excision,
    /// Sub-lattice refinement per axis for the direct sum.
    pub sub_samples: usize,
}

impl<T: Real> RadialWindow<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.inner > T::zero() && self.inner < self.outer) || self.taper < T::zero() || self.sub_samples == 0 {
            return Err(Error::InvalidArgument("radial window needs 0 < inner < outer, taper ≥ 0".into()));
        }
        Ok(())
    }

    pub fn weight(&self, r: T) -> T {
        if self.taper == T::zero() {
            if r >= self.inner && r <= self.outer {
                T::one()
            } else {
                T::zero()
            }
        } else {
            smooth_step((r - self.inner) / self.taper) * smooth_step((self.outer - r) / self.taper)
        }
    }

    fn radius(&self, y: ParaPoint<T>) -> T {
        match self.excision {
            Excision::Polar => polar_radius(y),
            Excision::ParabolicNorm => pnorm(y),
        }
    }

    fn rate(&self, sigma: &Direction<T>) -> T {
        match self.excision {
            Excision::Polar => T::one(),
            Excision::ParabolicNorm => sigma.pnorm_rate(),
        }
    }

    /// The `t`-window along `γ_σ` carved out by this radial window.
    pub fn curve_spec(&self, sigma: Direction<T>, n_quad: usize) -> CurveOpSpec<T> {
        let rate = self.rate(&sigma);
        let taper = if self.taper == T::zero() { Taper::Hard } else { Taper::Smooth { width: self.taper / rate } };
        CurveOpSpec { sigma, epsilon: self.inner / rate, r_max: self.outer / rate, n_quad, taper }
    }
}

fn require_even<T: Real>(profile: &HomKernelProfile<T>) -> Result<()> {
    if !profile.even_in_x1() {
        return Err(Error::InvalidArgument(format!("kernel profile `{}` is not even in x1", profile.name())));
    }
    Ok(())
}

/// `C_A f(x) = ∫ [A(x) − A(x − y)] K(y) f(x − y) ω(r(y)) dy` as a Riemann
/// sum over the (optionally refined) lattice of displacements `y`.
pub fn direct_ca<T: Real>(
    a: &SymbolA<T>,
    f: &Field2D<T>,
    profile: &HomKernelProfile<T>,
    window: &RadialWindow<T>,
) -> Result<Field2D<T>> {
    require_even(profile)?;
    window.validate()?;
    let grid = *f.grid();
    let (r, r2) = (window.outer, window.outer * window.outer);
    if r >= grid.l1() || r2 >= grid.l2() {
        return Err(Error::InvalidArgument("outer radius does not fit inside the torus".into()));
    }
    let m = window.sub_samples;
    let (h1, h2) = (grid.h1(), grid.h2());
    let inv_m = T::one() / T::from_usize_lossy(m);
    let cell = grid.cell_area() * inv_m * inv_m;
    let k1 = (r / h1).ceil().to_i64().unwrap_or(0) + 1;
    let k2 = (r2 / h2).ceil().to_i64().unwrap_or(0) + 1;

    // (sub-offset, lattice shift, displacement, weight)
    let mut terms: Vec<(usize, (i64, i64), ParaPoint<T>, T)> = Vec::new();
    let mut offsets = Vec::with_capacity(m * m);
    for p in 0..m {
        for q in 0..m {
            let delta = ParaPoint::new(h1 * T::from_usize_lossy(p) * inv_m, h2 * T::from_usize_lossy(q) * inv_m);
            let slot = offsets.len();
            offsets.push(delta);
            for b1 in -k1..=k1 {
                for b2 in -k2..=k2 {
                    let y = ParaPoint::new(h1 * lit::<T>(b1 as f64), h2 * lit::<T>(b2 as f64)) + delta;
                    if y.is_origin() {
                        continue;
                    }
                    let w = window.weight(window.radius(y));
                    if w == T::zero() {
                        continue;
                    }
                    terms.push((slot, (b1, b2), y, hom_extend(profile, y)? * w * cell));
                }
            }
        }
    }

    if a.sampled_field().is_some() {
        let nodes = terms.iter().map(|&(_, _, y, w)| (y, w)).collect();
        return Ok(BracketOp::from_nodes(a, &grid, nodes)?.apply(f));
    }

    let shifted: Vec<Field2D<T>> = offsets.iter().map(|&d| translate(f, d)).collect();
    let (n1, n2) = (grid.n1() as i64, grid.n2() as i64);
    let rows: Vec<Vec<Complex<T>>> = (0..grid.n1())
        .into_par_iter()
        .map(|i| {
            (0..grid.n2())
                .map(|j| {
                    let x = grid.point(i, j);
                    let ax = a.eval(x);
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for &(slot, (b1, b2), y, w) in &terms {
                        let si = (i as i64 - b1).rem_euclid(n1) as usize;
                        let sj = (j as i64 - b2).rem_euclid(n2) as usize;
                        acc = acc + shifted[slot].get(si, sj) * ((ax - a.eval(x - y)) * w);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Field2D::from_vec(grid, rows.into_iter().flatten().collect())
}

/// `½ ∫_{S¹} K(σ) (1 + σ2²) T^{γ_σ}_A f dσ` by the `n_sigma`-point trapezoid
/// rule in angle; each `T^{γ_σ}_A` integrates over `t ∈ ℝ` with the window
/// that [`RadialWindow::curve_spec`] derives from `window`.
pub fn rotations_ca<T: Real>(
    a: &SymbolA<T>,
    f: &Field2D<T>,
    profile: &HomKernelProfile<T>,
    n_sigma: usize,
    n_quad: usize,
    window: &RadialWindow<T>,
) -> Result<Field2D<T>> {
    require_even(profile)?;
    window.validate()?;
    if n_sigma < 16 {
        return Err(Error::InvalidArgument(format!("n_sigma must be ≥ 16, got {n_sigma}")));
    }
    let dth = 2.0 * std::f64::consts::PI / n_sigma as f64;
    let dirs: Vec<(Direction<T>, T)> = (0..n_sigma)
        .map(|k| {
            let s = Direction::from_angle(lit::<T>(dth * k as f64));
            let w = lit::<T>(0.5 * dth) * profile.eval(&s) * (T::one() + s.s2() * s.s2());
            (s, w)
        })
        .collect();

    if a.sampled_field().is_some() {
        let mut nodes = Vec::new();
        for (s, w) in &dirs {
            let spec = window.curve_spec(*s, n_quad);
            nodes.extend(super::window_nodes(&spec, 2)?.into_iter().map(|(d, c)| (d, c * *w)));
        }
        return Ok(BracketOp::from_nodes(a, f.grid(), nodes)?.apply(f));
    }

    let mut out = Field2D::zeros(*f.grid());
    for (s, w) in &dirs {
        let t = commutator_t(a, f, &window.curve_spec(*s, n_quad))?;
        out = &out + &t.scale(Complex::new(*w, T::zero()));
    }
    Ok(out)
}
