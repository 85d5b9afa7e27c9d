//! The symbol `A`: generators, seminorm estimates, parabolic fractional
//! derivatives and a BMO surrogate.

mod bmo;
mod condition;
mod frac;

pub use bmo::{bmo_parabolic, max_bmo_depth};
pub use condition::{check_symbol_conditions, lip_half_seminorm, ConditionReport};
pub use frac::{frac_diff, frac_diff_symbol, FracDiff};

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::grid::{Field2D, Interpolant, TorusGrid};
use crate::scalar::{lit, Real};

/// Behaviour of a closed-form symbol along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisPeriod<T> {
    /// Does not depend on this coordinate.
    Constant,
    /// Periodic with the given period.
    Period(T),
    Aperiodic,
}

impl<T: Real> AxisPeriod<T> {
    /// Whether the function is periodic with period `2 l`.
    fn fits(&self, l: T) -> bool {
        match *self {
            AxisPeriod::Constant => true,
            AxisPeriod::Aperiodic => false,
            AxisPeriod::Period(p) => {
                let q = (l + l) / p;
                (q - q.round()).abs() <= lit::<T>(1e-9) * q.max(T::one()) && q.round() >= T::one()
            }
        }
    }
}

type PointFn<T> = dyn Fn(ParaPoint<T>) -> T + Send + Sync;

#[derive(Clone)]
enum Repr<T: Real> {
    Closed { f: Arc<PointFn<T>>, periods: [AxisPeriod<T>; 2] },
    Sampled { field: Field2D<T>, interp: Arc<Interpolant<T>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    ClosedForm,
    Sampled,
}

/// A real-valued symbol, either as a closed form or as grid samples.
#[derive(Clone)]
pub struct SymbolA<T: Real> {
    name: String,
    repr: Repr<T>,
}

impl<T: Real> std::fmt::Debug for SymbolA<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolA").field("name", &self.name).field("kind", &self.kind()).finish()
    }
}

impl<T: Real> SymbolA<T> {
    pub fn closed<F>(name: impl Into<String>, f: F, periods: [AxisPeriod<T>; 2]) -> Self
    where
        F: Fn(ParaPoint<T>) -> T + Send + Sync + 'static,
    {
        Self { name: name.into(), repr: Repr::Closed { f: Arc::new(f), periods } }
    }

    /// Wraps real grid samples; imaginary parts are discarded.
    pub fn sampled(name: impl Into<String>, field: &Field2D<T>) -> Self {
        let field = field.map(|z| Complex::new(z.re, T::zero()));
        let interp = Arc::new(Interpolant::new(&field));
        Self { name: name.into(), repr: Repr::Sampled { field, interp } }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        match self.repr {
            Repr::Closed { .. } => SymbolKind::ClosedForm,
            Repr::Sampled { .. } => SymbolKind::Sampled,
        }
    }

    /// Point value; sampled symbols are evaluated by trigonometric interpolation.
    pub fn eval(&self, p: ParaPoint<T>) -> T {
        match &self.repr {
            Repr::Closed { f, .. } => f(p),
            Repr::Sampled { interp, .. } => interp.eval(p).re,
        }
    }

    /// Per-axis periodicity of a closed form; `None` for sampled symbols.
    pub fn periods(&self) -> Option<[AxisPeriod<T>; 2]> {
        match &self.repr {
            Repr::Closed { periods, .. } => Some(*periods),
            Repr::Sampled { .. } => None,
        }
    }

    /// Whether the symbol is constant (closed form with no dependence on `x`).
    pub fn is_constant(&self) -> bool {
        matches!(self.periods(), Some([AxisPeriod::Constant, AxisPeriod::Constant]))
    }

    pub fn is_periodic_on(&self, grid: &TorusGrid<T>) -> bool {
        match &self.repr {
            Repr::Closed { periods, .. } => periods[0].fits(grid.l1()) && periods[1].fits(grid.l2()),
            Repr::Sampled { field, .. } => field.grid().same_as(grid),
        }
    }

    /// Samples on `grid`; fails for symbols that are not periodic there.
    pub fn sample(&self, grid: &TorusGrid<T>) -> Result<Field2D<T>> {
        if !self.is_periodic_on(grid) {
            return Err(match &self.repr {
                Repr::Closed { .. } => Error::NonPeriodic(self.name.clone()),
                Repr::Sampled { .. } => Error::GridMismatch(format!("symbol `{}` sampled on another grid", self.name)),
            });
        }
        Ok(match &self.repr {
            Repr::Closed { f, .. } => Field2D::from_real_fn(*grid, |p| f(p)),
            Repr::Sampled { field, .. } => field.clone(),
        })
    }

    /// The sampled representation on `grid`.
    pub fn sampled_on(&self, grid: &TorusGrid<T>) -> Result<Self> {
        Ok(Self::sampled(self.name.clone(), &self.sample(grid)?))
    }

    pub(crate) fn sampled_field(&self) -> Option<&Field2D<T>> {
        match &self.repr {
            Repr::Sampled { field, .. } => Some(field),
            Repr::Closed { .. } => None,
        }
    }

    /// `x ↦ A(x) − A(x − d)` on the nodes of `grid`, at the literal points.
    pub(crate) fn bracket_on_grid(&self, grid: &TorusGrid<T>, d: ParaPoint<T>) -> Vec<T> {
        let mut out = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let p = grid.point(i, j);
                out.push(self.eval(p) - self.eval(p - d));
            }
        }
        out
    }

    /// `A(x + d)` at the literal points of `grid`.
    pub(crate) fn values_shifted(&self, grid: &TorusGrid<T>, d: ParaPoint<T>) -> Vec<T> {
        let mut out = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                out.push(self.eval(grid.point(i, j) + d));
            }
        }
        out
    }
}

/// Parameters shared by the generators in [`make_symbol`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolParams<T> {
    /// Amplitude for `constant` and slope for `linear_x1`.
    pub c: T,
    pub k1: i64,
    pub k2: i64,
    /// Half-periods the trigonometric generators are periodic on.
    pub l1: T,
    pub l2: T,
    pub seed: u64,
    /// Largest `|k|` per axis for `random_bandlimited`.
    pub band: i64,
}

impl<T: Real> Default for SymbolParams<T> {
    fn default() -> Self {
        Self { c: T::one(), k1: 1, k2: 1, l1: T::PI(), l2: T::PI(), seed: 7, band: 3 }
    }
}

impl<T: Real> SymbolParams<T> {
    /// Defaults with half-periods taken from `grid`.
    pub fn for_grid(grid: &TorusGrid<T>) -> Self {
        Self { l1: grid.l1(), l2: grid.l2(), ..Self::default() }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

pub const GENERATORS: [&str; 7] =
    ["zero", "constant", "linear_x1", "sine_x1", "sine_x2", "mixed", "random_bandlimited"];

/// Test symbols:
///
/// | name | `A(x)` |
/// |---|---|
/// | `zero` | `0` |
/// | `constant` | `c` |
/// | `linear_x1` | `c x1` (not periodic) |
/// | `sine_x1` | `sin(k1 π x1 / L1)` |
/// | `sine_x2` | `sin(k2 π x2 / L2)` |
/// | `mixed` | `½ sin(k1 π x1/L1) + ½ sin(k2 π x2/L2) + ¼ cos(π x1/L1 + π x2/L2)` |
/// | `random_bandlimited` | seeded cosine/sine series with `|k_i| ≤ band`, scaled so `sup |∂₁A| ≤ 1` |
pub fn make_symbol<T: Real>(name: &str, p: &SymbolParams<T>) -> Result<SymbolA<T>> {
    let (l1, l2) = (p.l1.to_f64_lossy(), p.l2.to_f64_lossy());
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::InvalidArgument("half-periods must be positive".into()));
    }
    let w1 = p.k1 as f64 * PI / l1;
    let w2 = p.k2 as f64 * PI / l2;
    let per = |w: f64| if w == 0.0 { AxisPeriod::Constant } else { AxisPeriod::Period(lit(2.0 * PI / w.abs())) };
    let c = p.c;
    use AxisPeriod::*;
    let sym = match name {
        "zero" => SymbolA::closed(name, |_| T::zero(), [Constant, Constant]),
        "constant" => SymbolA::closed(name, move |_| c, [Constant, Constant]),
        "linear_x1" => SymbolA::closed(name, move |x: ParaPoint<T>| c * x.x1, [Aperiodic, Constant]),
        "sine_x1" => {
            let w = lit::<T>(w1);
            SymbolA::closed(name, move |x: ParaPoint<T>| (w * x.x1).sin(), [per(w1), Constant])
        }
        "sine_x2" => {
            let w = lit::<T>(w2);
            SymbolA::closed(name, move |x: ParaPoint<T>| (w * x.x2).sin(), [Constant, per(w2)])
        }
        "mixed" => {
            let (a, b) = (lit::<T>(w1), lit::<T>(w2));
            let (u1, u2) = (lit::<T>(PI / l1), lit::<T>(PI / l2));
            let half = lit::<T>(0.5);
            let quarter = lit::<T>(0.25);
            SymbolA::closed(
                name,
                move |x: ParaPoint<T>| {
                    half * (a * x.x1).sin() + half * (b * x.x2).sin() + quarter * (u1 * x.x1 + u2 * x.x2).cos()
                },
                [Period(lit(2.0 * l1)), Period(lit(2.0 * l2))],
            )
        }
        "random_bandlimited" => random_bandlimited(p, l1, l2),
        other => return Err(Error::UnknownSymbol(other.to_string())),
    };
    Ok(sym)
}

fn random_bandlimited<T: Real>(p: &SymbolParams<T>, l1: f64, l2: f64) -> SymbolA<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut modes: Vec<(f64, f64, f64, f64)> = Vec::new();
    let band = p.band.max(1);
    for k1 in 0..=band {
        for k2 in -band..=band {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let decay = 1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64);
            let a = rng.gen_range(-1.0..1.0) * decay;
            let b = rng.gen_range(-1.0..1.0) * decay;
            modes.push((k1 as f64 * PI / l1, k2 as f64 * PI / l2, a, b));
        }
    }
    let bound: f64 = modes.iter().map(|&(w1, _, a, b)| (a.abs() + b.abs()) * w1.abs()).sum();
    let scale = if bound > 0.0 { 1.0 / bound } else { 1.0 };
    let modes: Vec<(T, T, T, T)> =
        modes.into_iter().map(|(w1, w2, a, b)| (lit(w1), lit(w2), lit(a * scale), lit(b * scale))).collect();
    SymbolA::closed(
        "random_bandlimited",
        move |x: ParaPoint<T>| {
            modes.iter().fold(T::zero(), |acc, &(w1, w2, a, b)| {
                let ph = w1 * x.x1 + w2 * x.x2;
                acc + a * ph.cos() + b * ph.sin()
            })
        },
        [AxisPeriod::Period(lit(2.0 * l1)), AxisPeriod::Period(lit(2.0 * l2))],
    )
}
