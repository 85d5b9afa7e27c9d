//! Operators along parabolic curves.
//!
//! Every curve operator is discretized as a finite sum over quadrature nodes
//! `t_n` with displacements `d_n = γ_σ(t_n)` and real coefficients `c_n`:
//!
//! ```text
//! T f = Σ_n c_n [A − A(· − d_n)] · f(· − d_n)
//! ```
//!
//! Translations are exact trigonometric interpolation, so on the torus the
//! discrete adjoint is `T* g = Σ_n c_n τ_{−d_n}([A − A(· − d_n)] g)`.

mod bracket;
mod kernel;
mod linear;

pub use bracket::BracketOp;
pub use kernel::{direct_ca, heat_kernel, hom_extend, rotations_ca, Excision, HomKernelProfile, RadialWindow};
pub use linear::{Compose, IdentityOp, LinearOp, MultiplierOp};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{gamma_sigma, Direction, ParaPoint};
use crate::grid::{build_psi_s, eta, smooth_step, Fft2, Field2D, SymbolTable, TorusGrid};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Real};
use crate::symbols::SymbolA;

/// How the `t`-window edges are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Taper<T> {
    /// Sharp truncation to `ε ≤ |t| ≤ R`.
    Hard,
    /// Weight `step((|t| − ε)/w) · step((R − |t|)/w)` with the smooth step.
    Smooth { width: T },
}

/// Direction, truncation window and quadrature resolution of a curve integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOpSpec<T> {
    pub sigma: Direction<T>,
    pub epsilon: T,
    pub r_max: T,
    /// Gauss–Legendre nodes per dyadic shell.
    pub n_quad: usize,
    pub taper: Taper<T>,
}

impl<T: Real> Default for CurveOpSpec<T> {
    fn default() -> Self {
        Self { sigma: Direction::parabola(), epsilon: lit(1.0 / 64.0), r_max: lit(2.0), n_quad: 16, taper: Taper::Hard }
    }
}

impl<T: Real> CurveOpSpec<T> {
    pub fn new(sigma: Direction<T>, epsilon: T, r_max: T, n_quad: usize) -> Result<Self> {
        let s = Self { sigma, epsilon, r_max, n_quad, taper: Taper::Hard };
        s.validate()?;
        Ok(s)
    }

    pub fn with_sigma(self, sigma: Direction<T>) -> Self {
        Self { sigma, ..self }
    }

    pub fn with_taper(self, taper: Taper<T>) -> Self {
        Self { taper, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > T::zero() && self.epsilon < self.r_max) || !self.r_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "window needs 0 < ε < R, got ε = {}, R = {}",
                self.epsilon, self.r_max
            )));
        }
        if self.n_quad < 8 {
            return Err(Error::InvalidArgument(format!("n_quad must be ≥ 8, got {}", self.n_quad)));
        }
        Ok(())
    }

    fn taper_weight(&self, t: T) -> T {
        match self.taper {
            Taper::Hard => T::one(),
            Taper::Smooth { width } => {
                let a = t.abs();
                smooth_step((a - self.epsilon) / width) * smooth_step((self.r_max - a) / width)
            }
        }
    }
}

/// Symmetric nodes and positive weights for `∫_{ε<|t|<R} g(t) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PvRule<T> {
    /// Ordered as `t_1, −t_1, t_2, −t_2, …`.
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> PvRule<T> {
    pub fn integrate<F: FnMut(T) -> T>(&self, mut g: F) -> T {
        self.nodes
            .chunks(2)
            .zip(self.weights.chunks(2))
            .map(|(t, w)| w[0] * g(t[0]) + w[1] * g(t[1]))
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre in `log t` on the shells `[2^k ε, 2^{k+1} ε]` (the last one
/// cut at `R`), mirrored to negative `t`. Weights include the `t` Jacobian,
/// so `∫ dt/|t|` is reproduced exactly.
pub fn pv_quadrature<T: Real>(epsilon: T, r_max: T, n_quad: usize) -> Result<PvRule<T>> {
    if !(epsilon > T::zero() && epsilon < r_max) || n_quad == 0 {
        return Err(Error::InvalidArgument("pv rule needs 0 < ε < R and n_quad ≥ 1".into()));
    }
    let positive = log_shells(epsilon, r_max, n_quad);
    let mut nodes = Vec::with_capacity(2 * positive.len());
    let mut weights = Vec::with_capacity(2 * positive.len());
    for (t, w) in positive {
        nodes.push(t);
        nodes.push(-t);
        weights.push(w);
        weights.push(w);
    }
    Ok(PvRule { nodes, weights })
}

fn log_shells<T: Real>(a: T, b: T, n: usize) -> Vec<(T, T)> {
    let gl = GaussLegendre::<f64>::new(n);
    let (a, b) = (a.to_f64_lossy(), b.to_f64_lossy());
    let mut out = Vec::new();
    let mut lo = a;
    while lo < b * (1.0 - 1e-15) {
        let hi = (2.0 * lo).min(b);
        for (u, w) in gl.on_interval(lo.ln(), hi.ln()) {
            let t = u.exp();
            out.push((lit(t), lit(w * t)));
        }
        lo = hi;
    }
    out
}

/// `(d_n, c_n)` for the truncated curve integral with `c_n = w_n · weight(t_n) / t_n^power`.
fn window_nodes<T: Real>(spec: &CurveOpSpec<T>, power: i32) -> Result<Vec<(ParaPoint<T>, T)>> {
    spec.validate()?;
    let rule = pv_quadrature(spec.epsilon, spec.r_max, spec.n_quad)?;
    Ok(rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| (gamma_sigma(t, &spec.sigma), w * spec.taper_weight(t) / t.powi(power)))
        .collect())
}

/// Nodes of `∫ η(t/2^j) (·) dt/t²` along `γ_σ`: the fixed rule on
/// `1/2 ≤ |t| ≤ 2` dilated by `2^j`.
fn dyadic_nodes<T: Real>(j: i32, spec: &CurveOpSpec<T>) -> Vec<(ParaPoint<T>, T)> {
    let scale = 2f64.powi(j);
    let mut out = Vec::new();
    for (t, w) in log_shells(0.5f64, 2.0, spec.n_quad) {
        let c = w * eta(t) / (scale * t * t);
        if c == 0.0 {
            continue;
        }
        for s in [t, -t] {
            out.push((gamma_sigma(lit::<T>(scale * s), &spec.sigma), lit(c)));
        }
    }
    out
}

/// Nodes of the single-scale piece: `t ∈ (1/2, 2)`, weight `η(t)/t²`.
fn t0_nodes<T: Real>(spec: &CurveOpSpec<T>) -> Vec<(ParaPoint<T>, T)> {
    log_shells(0.5f64, 2.0, spec.n_quad)
        .into_iter()
        .filter_map(|(t, w)| {
            let c = w * eta(t) / (t * t);
            (c != 0.0).then(|| (gamma_sigma(lit::<T>(t), &spec.sigma), lit(c)))
        })
        .collect()
}

/// Multiplier `Σ_n c_n e^{−i ξ·d_n}` of a weighted sum of translations.
pub(crate) fn translation_symbol<T: Real>(grid: &TorusGrid<T>, nodes: &[(ParaPoint<T>, T)]) -> SymbolTable<T> {
    use rayon::prelude::*;
    let (n1, n2) = (grid.n1(), grid.n2());
    let xi1 = grid.xi1_all();
    let xi2 = grid.xi2_all();
    let p2: Vec<Vec<Complex<T>>> =
        nodes.iter().map(|(d, c)| xi2.iter().map(|&b| Complex::from_polar(*c, -b * d.x2)).collect()).collect();
    let rows: Vec<Vec<Complex<T>>> = (0..n1)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![Complex::new(T::zero(), T::zero()); n2];
            for ((d, _), q) in nodes.iter().zip(&p2) {
                let a = Complex::from_polar(T::one(), -xi1[i] * d.x1);
                for (z, b) in row.iter_mut().zip(q) {
                    *z = *z + a * b;
                }
            }
            row
        })
        .collect();
    let flat: Vec<Complex<T>> = rows.into_iter().flatten().collect();
    let mut k = 0;
    SymbolTable::from_fn(grid, |_, _| {
        k += 1;
        flat[k - 1]
    })
    .expect("finite translation symbol")
}

/// `H_γ f(x) = p.v. ∫ f(x − γ_σ(t)) dt/t` over the window of `spec`.
pub fn hilbert_along<T: Real>(f: &Field2D<T>, spec: &CurveOpSpec<T>) -> Result<Field2D<T>> {
    let nodes = window_nodes(spec, 1)?;
    Ok(translation_symbol(f.grid(), &nodes).apply(f))
}

/// `T_A f(x) = p.v. ∫ [A(x) − A(x − γ_σ(t))] f(x − γ_σ(t)) dt/t²`.
pub fn commutator_t<T: Real>(a: &SymbolA<T>, f: &Field2D<T>, spec: &CurveOpSpec<T>) -> Result<Field2D<T>> {
    Ok(BracketOp::commutator(a, f.grid(), spec)?.apply(f))
}

/// `T_j f(x) = ∫ [A(x) − A(x − γ_σ(t))] f(x − γ_σ(t)) η(t/2^j) dt/t²`.
///
/// The window of `spec` is ignored; only `sigma` and `n_quad` are used.
pub fn dyadic_tj<T: Real>(a: &SymbolA<T>, f: &Field2D<T>, j: i32, spec: &CurveOpSpec<T>) -> Result<Field2D<T>> {
    Ok(BracketOp::dyadic(a, f.grid(), j, spec)?.apply(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Forward,
    Adjoint,
}

/// The single-scale operator on `1/2 < t < 2` and its adjoint
/// `−∫ [A(x) − A(x + γ(s))] g(x + γ(s)) η(s) ds/s²`.
pub fn t0_single<T: Real>(a: &SymbolA<T>, g: &Field2D<T>, side: Side, spec: &CurveOpSpec<T>) -> Result<Field2D<T>> {
    let op = BracketOp::single_scale(a, g.grid(), spec)?;
    Ok(match side {
        Side::Forward => op.apply(g),
        Side::Adjoint => op.apply_adjoint(g),
    })
}

fn check_psi_fits<T: Real>(grid: &TorusGrid<T>, s: T) -> Result<()> {
    if !(s > T::zero()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {s}")));
    }
    if s > lit::<T>(2.0) * grid.l1() || s * s > lit::<T>(2.0) * grid.l2() {
        return Err(Error::UnderResolved(format!("I_{s}(0) does not fit in the torus")));
    }
    Ok(())
}

/// Multiplier of `Q_s`: the transform of the periodized mollifier.
pub fn q_smooth_symbol<T: Real>(grid: &TorusGrid<T>, s: T) -> Result<SymbolTable<T>> {
    check_psi_fits(grid, s)?;
    crate::grid::psi_hat_table(s, grid)
}

/// `Q_s f = ψ_s ∗ f` on the torus, through the exact transform of `ψ_s`.
///
/// Valid at any resolution as long as `I_s(0)` fits in the torus.
pub fn q_smooth<T: Real>(f: &Field2D<T>, s: T) -> Result<Field2D<T>> {
    Ok(q_smooth_symbol(f.grid(), s)?.apply(f))
}

/// `Q_s f` as a circular convolution with the sampled `ψ_s`; needs the
/// support of `ψ_s` resolved by the grid.
pub fn q_smooth_sampled<T: Real>(f: &Field2D<T>, s: T) -> Result<Field2D<T>> {
    let grid = *f.grid();
    let psi = build_psi_s(s, &grid)?;
    let (n1, n2) = (grid.n1(), grid.n2());
    let mut kernel = vec![Complex::new(T::zero(), T::zero()); grid.len()];
    for i in 0..n1 {
        for j in 0..n2 {
            kernel[grid.index(i, j)] = psi.get((i + n1 / 2) % n1, (j + n2 / 2) % n2) * grid.cell_area();
        }
    }
    let plan = Fft2::for_grid(&grid);
    plan.forward(&mut kernel);
    let mut data = f.data().to_vec();
    plan.forward(&mut data);
    for (z, k) in data.iter_mut().zip(&kernel) {
        *z = *z * k;
    }
    plan.inverse(&mut data);
    Field2D::from_vec(grid, data)
}
