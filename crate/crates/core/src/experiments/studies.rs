use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{opnorm_power, DecayFit, OpNormResult};
use crate::error::{Error, Result};
use crate::geometry::{Direction, ParaCube, ParaPoint};
use crate::grid::{build_phi_class, smooth_step, trig_interpolate, BumpSpec, Field2D, TorusGrid};
use crate::operators::{
    commutator_t, direct_ca, q_smooth_symbol, rotations_ca, BracketOp, Compose, CurveOpSpec, HomKernelProfile,
    MultiplierOp, RadialWindow,
};
use crate::scalar::{lit, Real};
use crate::symbols::SymbolA;

const NORM_TOL: f64 = 1e-6;
const NORM_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QsRow {
    pub s: f64,
    pub norm: OpNormResult,
}

/// Norms of `Q_s T_j` over a list of scales and the fitted exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct QsDecay {
    pub j: i32,
    pub rows: Vec<QsRow>,
    /// `None` when every norm vanishes.
    pub fit: Option<DecayFit>,
}

impl QsDecay {
    pub const CSV_HEADER: &'static str = "symbol,j,s,norm,iterations,rel_change,converged,seed";

    pub fn csv_rows(&self, symbol: &str) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{symbol},{},{:.12e},{:.12e},{},{:.3e},{},{}",
                    self.j,
                    r.s,
                    r.norm.norm_estimate,
                    r.norm.iterations,
                    r.norm.rel_change_at_stop,
                    r.norm.converged,
                    r.norm.seed
                )
            })
            .collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.fit.is_none()
    }
}

/// `‖Q_s T_j‖` for each `s ≤ 2^j`, with a log-log fit of norm against `s`.
pub fn qs_tj_decay<T: Real>(
    a: &SymbolA<T>,
    j: i32,
    s_list: &[T],
    grid: &TorusGrid<T>,
    n_quad: usize,
    seed: u64,
) -> Result<QsDecay> {
    let top = lit::<T>(2f64.powi(j));
    if let Some(s) = s_list.iter().find(|&&s| !(s > T::zero() && s <= top)) {
        return Err(Error::InvalidArgument(format!("need 0 < s ≤ 2^j, got s = {s} at j = {j}")));
    }
    let spec = CurveOpSpec { n_quad, ..CurveOpSpec::default() };
    let tj = BracketOp::dyadic(a, grid, j, &spec)?;
    let mut rows = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let qs = MultiplierOp::new(q_smooth_symbol(grid, s)?);
        let op = Compose { outer: &qs, inner: &tj };
        rows.push(QsRow { s: s.to_f64_lossy(), norm: opnorm_power(&op, NORM_TOL, NORM_MAX_ITER, seed)? });
    }
    let fit = if rows.iter().all(|r| r.norm.norm_estimate == 0.0) {
        None
    } else {
        Some(DecayFit::from_scales(&rows.iter().map(|r| (r.s, r.norm.norm_estimate)).collect::<Vec<_>>())?)
    };
    Ok(QsDecay { j, rows, fit })
}

/// Runs the decay study twice: at `j = 1` with doubled scales on the grid
/// dilated by 2, and at `j = 0` for the rescaled symbol `½ A(δ₂ ·)` on `grid`.
/// Parabolic dilation maps one problem onto the other.
pub fn dilation_check<T: Real>(
    a: &SymbolA<T>,
    s_list: &[T],
    grid: &TorusGrid<T>,
    n_quad: usize,
    seed: u64,
) -> Result<(QsDecay, QsDecay)> {
    let two = lit::<T>(2.0);
    let big = grid.dilated(two)?;
    let a_big = a.sampled_on(&big)?;
    let samples = a.sample(&big)?;
    let half = Complex::new(lit::<T>(0.5), T::zero());
    let rescaled = Field2D::from_vec(*grid, samples.data().iter().map(|z| z * half).collect())?;
    let a_small = SymbolA::sampled(format!("{}_rescaled", a.name()), &rescaled);
    let doubled: Vec<T> = s_list.iter().map(|&s| s * two).collect();
    let at_one = qs_tj_decay(&a_big, 1, &doubled, &big, n_quad, seed)?;
    let at_zero = qs_tj_decay(&a_small, 0, s_list, grid, n_quad, seed)?;
    Ok((at_zero, at_one))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WbpRow {
    pub r: f64,
    /// `|⟨ψ, T φ⟩|`.
    pub pairing: f64,
    /// `pairing / r³`.
    pub ratio: f64,
}

impl WbpRow {
    pub const CSV_HEADER: &'static str = "symbol,r,pairing,ratio";

    pub fn csv_row(&self, symbol: &str) -> String {
        format!("{symbol},{:.12e},{:.12e},{:.12e}", self.r, self.pairing, self.ratio)
    }
}

/// Weak boundedness pairings `|⟨ψ, T φ⟩|` for the normalized bump `φ` of
/// `I_r(x₀)` and its odd partner `ψ = φ · (x1 − a)/(3r/2)`. Each scale runs on `base` dilated by `r` with the window of
/// `spec` dilated alongside, so every scale is resolved alike; `x₀` must lie
/// inside every dilated torus.
pub fn wbp_sweep<T: Real>(
    a: &SymbolA<T>,
    r_list: &[T],
    base: &TorusGrid<T>,
    spec: &CurveOpSpec<T>,
    x0: ParaPoint<T>,
) -> Result<Vec<WbpRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let grid = base.dilated(r)?;
        if x0.x1.abs() >= grid.l1() || x0.x2.abs() >= grid.l2() {
            return Err(Error::InvalidArgument(format!("centre lies outside the torus at r = {r}")));
        }
        let phi = build_phi_class(&BumpSpec::new(x0, r)?, &grid)?;
        let spec_r = CurveOpSpec { epsilon: spec.epsilon * r, r_max: spec.r_max * r, ..*spec };
        let psi = odd_partner(&phi, x0, r);
        let t_phi = commutator_t(a, &phi, &spec_r)?;
        let pairing = psi.inner(&t_phi).norm().to_f64_lossy();
        let rf = r.to_f64_lossy();
        rows.push(WbpRow { r: rf, pairing, ratio: pairing / rf.powi(3) });
    }
    Ok(rows)
}

/// `φ · (x1 − a)/(3r/2)`: odd in `x1` about the centre, same support, and
/// still within the normalized class. A symmetric pairing `⟨φ, Tφ⟩` nearly
/// cancels for curve operators, which would leave only rounding to measure.
pub fn odd_partner<T: Real>(phi: &Field2D<T>, x0: ParaPoint<T>, r: T) -> Field2D<T> {
    let grid = *phi.grid();
    let scale = T::one() / (lit::<T>(1.5) * r);
    let mut k = 0;
    phi.map(|z| {
        let (i, j) = (k / grid.n2(), k % grid.n2());
        k += 1;
        z * (grid.wrap(grid.point(i, j) - x0).x1 * scale)
    })
}

/// `1` on `I_{3r}(x₀)`, `0` off `I_{4r}(x₀)`, smooth in between.
fn plateau<T: Real>(grid: &TorusGrid<T>, cube: &ParaCube<T>) -> Result<Field2D<T>> {
    let r = cube.r;
    let (w1, w2) = (lit::<T>(2.0) * r, lit::<T>(8.0) * r * r);
    if w1 >= grid.l1() || w2 >= grid.l2() {
        return Err(Error::InvalidArgument("I_4 of the cube does not fit in the torus".into()));
    }
    let (g1, g2) = (r * lit(0.5), r * r * lit(3.5));
    let c = cube.center();
    Ok(Field2D::from_real_fn(*grid, |p| {
        let d = grid.wrap(p - c);
        smooth_step((w1 - d.x1.abs()) / g1) * smooth_step((w2 - d.x2.abs()) / g2)
    }))
}

/// Mean oscillation `|I|⁻¹ ∫_I |T1 − C_I|` of the truncated commutator applied
/// to `1`, where `C_I = T(1 − φ)(x₀)` for a cutoff `φ` equal to 1 on
/// `I_3(x₀)` and supported in `I_4(x₀)`. The truncation is the window of
/// `spec`; its upper end plays the role of the global cutoff `t_max`.
pub fn t1_oscillation<T: Real>(
    a: &SymbolA<T>,
    cube: &ParaCube<T>,
    grid: &TorusGrid<T>,
    spec: &CurveOpSpec<T>,
) -> Result<T> {
    let tmax = spec.r_max;
    if tmax >= grid.l1() || tmax * tmax >= grid.l2() {
        return Err(Error::InvalidArgument("t_max must satisfy γ(t_max) inside the torus".into()));
    }
    let one = Field2D::constant(*grid, Complex::new(T::one(), T::zero()));
    let phi = plateau(grid, cube)?;
    let g = commutator_t(a, &one, spec)?;
    let far = commutator_t(a, &(&one - &phi), spec)?;
    let c = trig_interpolate(&far, cube.center());
    let (mut acc, mut count) = (T::zero(), 0usize);
    for i in 0..grid.n1() {
        for j in 0..grid.n2() {
            let p = grid.point(i, j);
            let q = grid.wrap(p - cube.center()) + cube.center();
            if cube.contains(q) {
                acc = acc + (g.get(i, j) - c).norm();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::UnderResolved("no grid node inside the cube".into()));
    }
    Ok(acc / T::from_usize_lossy(count))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct T1Row {
    pub center: (f64, f64),
    pub r: f64,
    pub oscillation: f64,
}

impl T1Row {
    pub const CSV_HEADER: &'static str = "symbol,a,b,r,oscillation,seed";

    pub fn csv_row(&self, symbol: &str, seed: u64) -> String {
        format!(
            "{symbol},{:.12e},{:.12e},{:.12e},{:.12e},{seed}",
            self.center.0, self.center.1, self.r, self.oscillation
        )
    }
}

/// [`t1_oscillation`] over `n_cubes` seeded cubes of side `r` whose centres
/// are uniform over the middle half of the torus.
pub fn t1_sweep<T: Real>(
    a: &SymbolA<T>,
    n_cubes: usize,
    r: T,
    grid: &TorusGrid<T>,
    spec: &CurveOpSpec<T>,
    seed: u64,
) -> Result<Vec<T1Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (l1, l2) = (grid.l1().to_f64_lossy(), grid.l2().to_f64_lossy());
    (0..n_cubes)
        .map(|_| {
            let (a0, b0) = (rng.gen_range(-l1 / 2.0..l1 / 2.0), rng.gen_range(-l2 / 2.0..l2 / 2.0));
            let cube = ParaCube::centered(ParaPoint::new(lit(a0), lit(b0)), r)?;
            let osc = t1_oscillation(a, &cube, grid, spec)?;
            Ok(T1Row { center: (a0, b0), r: r.to_f64_lossy(), oscillation: osc.to_f64_lossy() })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaRow {
    pub theta: f64,
    pub sigma: (f64, f64),
    pub norm: OpNormResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSweep {
    pub rows: Vec<SigmaRow>,
}

impl SigmaSweep {
    pub const CSV_HEADER: &'static str = "symbol,theta,sigma1,sigma2,norm,iterations,converged,seed";

    pub fn csv_rows(&self, symbol: &str) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{symbol},{:.12e},{:.12e},{:.12e},{:.12e},{},{},{}",
                    r.theta,
                    r.sigma.0,
                    r.sigma.1,
                    r.norm.norm_estimate,
                    r.norm.iterations,
                    r.norm.converged,
                    r.norm.seed
                )
            })
            .collect()
    }

    pub fn max(&self) -> f64 {
        self.rows.iter().map(|r| r.norm.norm_estimate).fold(0.0, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.norm.norm_estimate).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        }
    }

    /// `max / median`, with `0` when every norm vanishes.
    pub fn max_over_median(&self) -> f64 {
        let (mx, md) = (self.max(), self.median());
        if mx == 0.0 {
            0.0
        } else {
            mx / md
        }
    }
}

/// `‖T^{γ_σ}_A‖` at `n` equally spaced angles.
pub fn sigma_uniformity<T: Real>(
    a: &SymbolA<T>,
    n: usize,
    spec: &CurveOpSpec<T>,
    grid: &TorusGrid<T>,
    seed: u64,
) -> Result<SigmaSweep> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 directions, got {n}")));
    }
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let sigma = Direction::from_angle(lit::<T>(theta));
        let op = BracketOp::commutator(a, grid, &spec.with_sigma(sigma))?;
        let norm = opnorm_power(&op, NORM_TOL, NORM_MAX_ITER, seed)?;
        rows.push(SigmaRow { theta, sigma: (sigma.s1().to_f64_lossy(), sigma.s2().to_f64_lossy()), norm });
    }
    Ok(SigmaSweep { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationsCompare {
    /// `‖direct − rotations‖₂ / ‖direct‖₂`, or 0 when both vanish.
    pub rel_error: f64,
    pub direct_norm: f64,
    pub rotations_norm: f64,
}

impl RotationsCompare {
    pub const CSV_HEADER: &'static str = "symbol,n_sigma,n_quad,sub_samples,direct_norm,rotations_norm,rel_error";

    pub fn csv_row(&self, symbol: &str, n_sigma: usize, n_quad: usize, sub: usize) -> String {
        format!(
            "{symbol},{n_sigma},{n_quad},{sub},{:.12e},{:.12e},{:.12e}",
            self.direct_norm, self.rotations_norm, self.rel_error
        )
    }
}

/// Compares the lattice sum with the method of rotations under the same
/// radial window.
pub fn rotations_vs_direct<T: Real>(
    a: &SymbolA<T>,
    f: &Field2D<T>,
    profile: &HomKernelProfile<T>,
    window: &RadialWindow<T>,
    n_sigma: usize,
    n_quad: usize,
) -> Result<RotationsCompare> {
    let direct = direct_ca(a, f, profile, window)?;
    let rot = rotations_ca(a, f, profile, n_sigma, n_quad, window)?;
    let (dn, rn) = (direct.norm_l2().to_f64_lossy(), rot.norm_l2().to_f64_lossy());
    let diff = (&direct - &rot).norm_l2().to_f64_lossy();
    let rel_error = if dn == 0.0 && diff == 0.0 { 0.0 } else { diff / dn };
    Ok(RotationsCompare { rel_error, direct_norm: dn, rotations_norm: rn })
}

/// [`rotations_vs_direct`] at the given resolution and with every
/// quadrature step halved (`n_sigma`, `n_quad` and the lattice refinement
/// all doubled).
pub fn rotations_refinement<T: Real>(
    a: &SymbolA<T>,
    f: &Field2D<T>,
    profile: &HomKernelProfile<T>,
    window: &RadialWindow<T>,
    n_sigma: usize,
    n_quad: usize,
) -> Result<(RotationsCompare, RotationsCompare)> {
    let coarse = rotations_vs_direct(a, f, profile, window, n_sigma, n_quad)?;
    let fine_window = RadialWindow { sub_samples: 2 * window.sub_samples, ..*window };
    let fine = rotations_vs_direct(a, f, profile, &fine_window, 2 * n_sigma, 2 * n_quad)?;
    Ok((coarse, fine))
}
