//! The change of variables `Φ_ω(s, t) = ω + γ(s) − γ(t)`, the explicit kernel
//! `K₀` of the near-diagonal-excised part of `T̃₀ T̃₀*`, and the quantities
//! that control its regularity in `x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{gamma, ParaPoint};
use crate::grid::eta;
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Real};
use crate::symbols::SymbolA;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellPair<T> {
    pub s: T,
    pub t: T,
}

/// `Φ_ω(s, t) = ω + γ(s) − γ(t) = (ω1 + s − t, ω2 + s² − t²)`.
#[inline]
pub fn phi_map<T: Real>(omega: ParaPoint<T>, s: T, t: T) -> ParaPoint<T> {
    ParaPoint::new(omega.x1 + s - t, omega.x2 + s * s - t * t)
}

/// `det DΦ_ω(s, t) = 2 (s − t)`.
#[inline]
pub fn phi_jacobian<T: Real>(s: T, t: T) -> T {
    lit::<T>(2.0) * (s - t)
}

/// Inverse of [`phi_map`]: with `u = y1 − ω1`, `v = y2 − ω2`,
/// `s = (u + v/u)/2`, `t = (v/u − u)/2`. `None` outside `[1/4, 4]²`.
pub fn phi_inverse<T: Real>(omega: ParaPoint<T>, y: ParaPoint<T>) -> Result<Option<ShellPair<T>>> {
    let u = y.x1 - omega.x1;
    if u == T::zero() {
        return Err(Error::Degenerate("Φ is not invertible where s = t".into()));
    }
    let q = (y.x2 - omega.x2) / u;
    let half = lit::<T>(0.5);
    let (s, t) = ((u + q) * half, (q - u) * half);
    let (lo, hi) = (lit::<T>(0.25), lit::<T>(4.0));
    Ok((s >= lo && s <= hi && t >= lo && t <= hi).then_some(ShellPair { s, t }))
}

/// `(s_h, t_h) = Φ_x⁻¹(Φ_{x+h}(s, t))`, independent of `x`.
///
/// Written as `s + ½{h1 + (h2 − h1(s+t))/(h1 + s − t)}` and
/// `t + ½{−h1 + (h2 − h1(s+t))/(h1 + s − t)}`, which equal the direct
/// solution of `γ(s_h) − γ(t_h) = h + γ(s) − γ(t)` and give `(s, t)`
/// exactly at `h = 0`.
pub fn sh_th<T: Real>(s: T, t: T, h: ParaPoint<T>) -> Result<ShellPair<T>> {
    let den = h.x1 + s - t;
    if den == T::zero() {
        return Err(Error::Degenerate("h1 + s − t vanishes".into()));
    }
    let half = lit::<T>(0.5);
    let c = (h.x2 - h.x1 * (s + t)) / den;
    Ok(ShellPair { s: s + half * (h.x1 + c), t: t + half * (c - h.x1) })
}

/// Minimum gap `15 λ^{1/3}` defining `E_λ`.
#[inline]
pub fn e_lambda_gap<T: Real>(lambda: T) -> T {
    lit::<T>(15.0) * lambda.cbrt()
}

/// Membership in `E_λ = {s − t ≥ 15 λ^{1/3}, 1/2 ≤ t < s ≤ 2}`.
#[inline]
pub fn in_e_lambda<T: Real>(s: T, t: T, lambda: T) -> bool {
    let half = lit::<T>(0.5);
    t >= half && s <= lit(2.0) && t < s && s - t >= e_lambda_gap(lambda)
}

/// `φ(t) = η(t) / t²`.
#[inline]
pub fn phi_weight<T: Real>(t: T) -> T {
    eta(t) / (t * t)
}

/// `B(x, s, t) = [A(x) − A(x − γ(t))] [A(x − γ(t)) − A(x + γ(s) − γ(t))]`.
pub fn b_quantity<T: Real>(x: ParaPoint<T>, s: T, t: T, a: &SymbolA<T>) -> T {
    let xt = x - gamma(t);
    let at = a.eval(xt);
    (a.eval(x) - at) * (at - a.eval(xt + gamma(s)))
}

/// `K₀(w, y) = −B(w, s, t) φ(s) φ(t) / (2 (s − t))` with `(s, t) = Φ_w⁻¹(y)`
/// restricted to `E_λ`, and 0 elsewhere.
pub fn k0_eval<T: Real>(w: ParaPoint<T>, y: ParaPoint<T>, a: &SymbolA<T>, lambda: T) -> T {
    let st = match phi_inverse(w, y) {
        Ok(Some(st)) => st,
        _ => return T::zero(),
    };
    if !in_e_lambda(st.s, st.t, lambda) {
        return T::zero();
    }
    -b_quantity(w, st.s, st.t, a) * phi_weight(st.s) * phi_weight(st.t) / phi_jacobian(st.s, st.t)
}

/// How the shift `h` is chosen in the sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftChoice<T> {
    /// `h = (λ, λ²)`.
    Corner,
    /// Uniform in `|h1| ≤ λ`, `|h2| ≤ λ²`.
    Random,
    Fixed(ParaPoint<T>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftBoundReport {
    pub lambda: f64,
    pub n_samples: usize,
    /// Largest `|t − t_h| / λ^{2/3}`.
    pub max_ratio_t: f64,
    /// Largest `|s − s_h| / λ^{2/3}`.
    pub max_ratio_s: f64,
    pub violations: usize,
}

fn sample_e_lambda<R: Rng>(rng: &mut R, gap: f64) -> (f64, f64) {
    let leg = (1.5 - gap).max(0.0);
    let (mut r1, mut r2): (f64, f64) = (rng.gen(), rng.gen());
    if r1 + r2 > 1.0 {
        r1 = 1.0 - r1;
        r2 = 1.0 - r2;
    }
    // Triangle (1/2 + gap, 1/2), (2, 1/2), (2, 2 − gap) in (s, t).
    let s = 0.5 + gap + leg * (r1 + r2);
    let t = 0.5 + leg * r2;
    (s.min(2.0), t)
}

fn draw_h<T: Real, R: Rng>(rng: &mut R, lambda: f64, choice: ShiftChoice<T>) -> (f64, f64) {
    match choice {
        ShiftChoice::Corner => (lambda, lambda * lambda),
        ShiftChoice::Random => (rng.gen_range(-lambda..=lambda), rng.gen_range(-lambda * lambda..=lambda * lambda)),
        ShiftChoice::Fixed(h) => (h.x1.to_f64_lossy(), h.x2.to_f64_lossy()),
    }
}

/// Samples `(s, t) ∈ E_λ` uniformly and measures `|t − t_h|`, `|s − s_h|`
/// against `λ^{2/3}`.
pub fn shift_bound_check<T: Real>(
    lambda: T,
    n_samples: usize,
    seed: u64,
    choice: ShiftChoice<T>,
) -> Result<ShiftBoundReport> {
    let lam = lambda.to_f64_lossy();
    check_lambda(lam)?;
    let gap = e_lambda_gap(lam);
    if gap > 1.5 {
        return Err(Error::Degenerate(format!("E_λ is empty at λ = {lam}")));
    }
    let scale = lam.powf(2.0 / 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mt, mut ms, mut bad) = (0.0f64, 0.0f64, 0usize);
    for _ in 0..n_samples {
        let (s, t) = sample_e_lambda(&mut rng, gap);
        let (h1, h2) = draw_h(&mut rng, lam, choice);
        let p = sh_th(s, t, ParaPoint::new(h1, h2))?;
        let (rt, rs) = ((t - p.t).abs() / scale, (s - p.s).abs() / scale);
        if rt > 1.0 || rs > 1.0 {
            bad += 1;
        }
        mt = mt.max(rt);
        ms = ms.max(rs);
    }
    Ok(ShiftBoundReport { lambda: lam, n_samples, max_ratio_t: mt, max_ratio_s: ms, violations: bad })
}

fn check_lambda(lam: f64) -> Result<()> {
    if !(lam > 0.0 && lam <= 1e-3) {
        return Err(Error::InvalidArgument(format!("λ must lie in (0, 1/1000], got {lam}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FLambdaEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: usize,
    pub n_mc: usize,
}

/// Monte Carlo measure of `F_λ = {(s, t) ∈ E_λ : (s_h, t_h) ∉ E_λ}` over
/// `[1/2, 2]²`. The point `x` does not enter: `(s_h, t_h)` is
/// independent of it.
pub fn f_lambda_measure<T: Real>(
    _x: ParaPoint<T>,
    h: ParaPoint<T>,
    lambda: T,
    n_mc: usize,
    seed: u64,
) -> Result<FLambdaEstimate> {
    let lam = lambda.to_f64_lossy();
    check_lambda(lam)?;
    let (h1, h2) = (h.x1.to_f64_lossy(), h.x2.to_f64_lossy());
    if h1.abs() > lam || h2.abs() > lam * lam {
        return Err(Error::InvalidArgument("h must satisfy |h1| ≤ λ, |h2| ≤ λ²".into()));
    }
    if n_mc == 0 {
        return Err(Error::InvalidArgument("n_mc must be positive".into()));
    }
    const BATCH: usize = 1 << 16;
    let batches = n_mc.div_ceil(BATCH);
    let hits: usize = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(n_mc - b * BATCH);
            let mut k = 0;
            for _ in 0..count {
                let s = rng.gen_range(0.5..=2.0);
                let t = rng.gen_range(0.5..=2.0);
                if !in_e_lambda(s, t, lam) {
                    continue;
                }
                match sh_th(s, t, ParaPoint::new(h1, h2)) {
                    Ok(p) if in_e_lambda(p.s, p.t, lam) => {}
                    _ => k += 1,
                }
            }
            k
        })
        .sum();
    let p = hits as f64 / n_mc as f64;
    let area = 2.25;
    Ok(FLambdaEstimate { estimate: area * p, std_error: area * (p * (1.0 - p) / n_mc as f64).sqrt(), hits, n_mc })
}

/// `∫ |K₀(x + h, y) − K₀(x, y)| dy`, evaluated in `(s, t)` coordinates.
///
/// With `y = Φ_x(s, t)` the first kernel sits at `(s', t') = (s, t)` shifted
/// by `−h`, whose gap is `s − t − h1`; the integral splits as
///
/// ```text
/// ∬_{E_λ} | B(x+h, s', t') φ(s') φ(t') (s−t)/(s'−t') 1[(s',t') ∈ E_λ] − B(x, s, t) φ(s) φ(t) | ds dt
///   + ∬_{E_λ} 1[(s_h, t_h) ∉ E_λ] |B(x+h, s, t)| φ(s) φ(t) ds dt
/// ```
///
/// in coordinates `u = s − t ∈ [gap, 3/2]`, `v = t ∈ [1/2, 2 − u]`, with
/// panel breaks where the indicators jump.
pub fn reg_integral<T: Real>(a: &SymbolA<T>, x: ParaPoint<T>, h: ParaPoint<T>, lambda: T, panels: usize) -> Result<T> {
    let lam = lambda.to_f64_lossy();
    check_lambda(lam)?;
    let gap = e_lambda_gap(lam);
    let top = 1.5;
    if gap >= top {
        return Ok(T::zero());
    }
    let panels = panels.max(1);
    let gl = GaussLegendre::<f64>::new(8);
    let (h1, h2) = (h.x1.to_f64_lossy(), h.x2.to_f64_lossy());
    let xh = x + h;
    let neg_h = ParaPoint::new(lit::<T>(-h1), lit::<T>(-h2));
    let edge = (4.0 * lam.powf(2.0 / 3.0)).min(0.25);

    let mut u_breaks = vec![gap];
    for b in [gap + h1.abs(), gap + 2.0 * h1.abs()] {
        if b > gap && b < top {
            u_breaks.push(b);
        }
    }
    u_breaks.push(top);

    let integrand = |u: f64, v: f64| -> f64 {
        let (s, t) = (lit::<T>(v + u), lit::<T>(v));
        let base = b_quantity(x, s, t, a) * phi_weight(s) * phi_weight(t);
        let shifted = match sh_th(s, t, neg_h) {
            Ok(p) if in_e_lambda(p.s, p.t, lambda) => {
                b_quantity(xh, p.s, p.t, a) * phi_weight(p.s) * phi_weight(p.t) * ((s - t) / (p.s - p.t))
            }
            _ => T::zero(),
        };
        let mut val = (shifted - base).abs();
        let leaves = match sh_th(s, t, h) {
            Ok(p) => !in_e_lambda(p.s, p.t, lambda),
            Err(_) => true,
        };
        if leaves {
            val = val + (b_quantity(xh, s, t, a) * phi_weight(s) * phi_weight(t)).abs();
        }
        val.to_f64_lossy()
    };

    let mut u_nodes = Vec::new();
    for w in u_breaks.windows(2) {
        let n = ((panels as f64) * (w[1] - w[0]) / (top - gap)).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for p in 0..n {
            let lo = w[0] + step * p as f64;
            u_nodes.extend(gl.on_interval(lo, lo + step));
        }
    }
    let total: f64 = u_nodes
        .par_iter()
        .map(|&(u, wu)| {
            let hi = 2.0 - u;
            let e = edge.min((hi - 0.5) / 3.0);
            let mut acc = 0.0;
            for (lo_v, hi_v, n) in [(0.5, 0.5 + e, 2), (0.5 + e, hi - e, panels), (hi - e, hi, 2)] {
                let step = (hi_v - lo_v) / n as f64;
                for p in 0..n {
                    let lo = lo_v + step * p as f64;
                    for (v, wv) in gl.on_interval(lo, lo + step) {
                        acc += wv * integrand(u, v);
                    }
                }
            }
            wu * acc
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(lit(total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegSweepRow {
    pub lambda: f64,
    pub h: (f64, f64),
    pub integral: f64,
    /// `integral / λ^{1/3}`.
    pub ratio: f64,
    /// Same integral with twice the panels.
    pub integral_refined: f64,
    pub panels: usize,
    pub seed: u64,
}

impl RegSweepRow {
    pub const CSV_HEADER: &'static str = "symbol,lambda,h1,h2,integral,ratio,integral_refined,n_quad,seed";

    pub fn csv_row(&self, symbol: &str) -> String {
        format!(
            "{symbol},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{}",
            self.lambda, self.h.0, self.h.1, self.integral, self.ratio, self.integral_refined, self.panels, self.seed
        )
    }

    /// Relative change of the ratio under panel doubling.
    pub fn refinement_change(&self) -> f64 {
        if self.integral_refined == 0.0 && self.integral == 0.0 {
            0.0
        } else {
            (self.integral_refined - self.integral).abs() / self.integral_refined.abs().max(f64::MIN_POSITIVE)
        }
    }
}

/// Regularity integral for each `λ`, with `h` chosen per `choice`.
pub fn reg_integral_sweep<T: Real>(
    a: &SymbolA<T>,
    x: ParaPoint<T>,
    lambdas: &[T],
    seed: u64,
    choice: ShiftChoice<T>,
    panels: usize,
) -> Result<Vec<RegSweepRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let lam = lambda.to_f64_lossy();
        check_lambda(lam)?;
        let (h1, h2) = draw_h(&mut rng, lam, choice);
        let h = ParaPoint::new(lit::<T>(h1), lit::<T>(h2));
        let integral = reg_integral(a, x, h, lambda, panels)?.to_f64_lossy();
        let integral_refined = reg_integral(a, x, h, lambda, 2 * panels)?.to_f64_lossy();
        rows.push(RegSweepRow {
            lambda: lam,
            h: (h1, h2),
            integral,
            ratio: integral / lam.cbrt(),
            integral_refined,
            panels,
            seed,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_symbol, SymbolParams};

    #[test]
    fn map_values() {
        assert_eq!(phi_map(ParaPoint::origin(), 1.0, 1.0), ParaPoint::origin());
        assert_eq!(phi_map(ParaPoint::origin(), 2.0, 1.0), ParaPoint::new(1.0, 3.0));
        assert_eq!(phi_jacobian(2.0, 1.0), 2.0);
    }

    #[test]
    fn inverse_pair() {
        let st = phi_inverse(ParaPoint::origin(), ParaPoint::new(1.0, 3.0)).unwrap().unwrap();
        assert_eq!((st.s, st.t), (2.0, 1.0));
        assert!(phi_inverse(ParaPoint::new(1.0, 0.0), ParaPoint::new(1.0, 5.0)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            let (a, b): (f64, f64) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
            let (s, t) = if a > b { (a, b) } else { (b, a) };
            if s == t {
                continue;
            }
            let w = ParaPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let y = phi_map(w, s, t);
            let back = phi_map(w, phi_inverse(w, y).unwrap().unwrap().s, phi_inverse(w, y).unwrap().unwrap().t);
            worst = worst.max((back - y).x1.abs()).max((back - y).x2.abs());
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn shifted_pair_identity_and_value() {
        let p = sh_th(1.7, 0.9, ParaPoint::origin()).unwrap();
        assert_eq!((p.s, p.t), (1.7, 0.9));
        let q = sh_th(2.0f64, 1.0, ParaPoint::new(1e-3, 1e-6)).unwrap();
        assert!((q.s - 1.999_001_998_001_998).abs() < 1e-12, "{q:?}");
        assert!((q.t - 0.998_001_998_001_998).abs() < 1e-12, "{q:?}");
    }

    #[test]
    fn shifted_pair_is_independent_of_base_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (s, t, h) = (1.8f64, 0.7f64, ParaPoint::new(3e-4, -5e-8));
        let p = sh_th(s, t, h).unwrap();
        for _ in 0..10 {
            let x = ParaPoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let q = phi_inverse(x, phi_map(x + h, s, t)).unwrap().unwrap();
            assert!((q.s - p.s).abs() < 1e-12 && (q.t - p.t).abs() < 1e-12);
        }
    }

    #[test]
    fn b_quantity_for_linear_symbol() {
        let a = make_symbol::<f64>("linear_x1", &SymbolParams::default()).unwrap();
        assert_eq!(b_quantity(ParaPoint::new(0.3, -1.0), 2.0, 1.0, &a), -2.0);
        let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
        assert_eq!(b_quantity(ParaPoint::new(0.3, -1.0), 2.0, 1.0, &c), 0.0);
    }

    #[test]
    fn b_difference_bound() {
        let p = SymbolParams::default();
        let a = make_symbol::<f64>("sine_x1", &p).unwrap();
        let b0 = crate::symbols::lip_half_seminorm(&a, 400, &[0.05, 0.2, 1.0], 3).unwrap();
        let c = 12.0 * b0 * b0 * 1.05;
        let lam = 1e-5;
        let pn = |v: ParaPoint<f64>| crate::geometry::pnorm(v);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let (s, t) = sample_e_lambda(&mut rng, e_lambda_gap(lam));
            let h = ParaPoint::new(rng.gen_range(-lam..lam), rng.gen_range(-lam * lam..lam * lam));
            let x = ParaPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let q = sh_th(s, t, h).unwrap();
            let lhs = (b_quantity(x, s, t, &a) - b_quantity(x, q.s, q.t, &a)).abs();
            let rhs = c * (pn(gamma(q.t) - gamma(t)) + pn(gamma(q.s) - gamma(s)));
            assert!(lhs <= rhs + 1e-15, "{lhs} > {rhs}");
        }
    }

    #[test]
    fn k0_support() {
        let a = make_symbol::<f64>("sine_x1", &SymbolParams::default()).unwrap();
        let lam = 1e-6;
        let w = ParaPoint::new(0.2, -0.4);
        let gap = e_lambda_gap(lam);
        let inside = phi_map(w, 1.8, 0.8);
        assert!(k0_eval(w, inside, &a, lam) != 0.0);
        let near = phi_map(w, 1.2, 1.2 - 0.5 * gap);
        assert_eq!(k0_eval(w, near, &a, lam), 0.0);
        let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
        assert_eq!(k0_eval(w, inside, &c, lam), 0.0);
    }

    #[test]
    fn k0_against_double_integral() {
        let a = make_symbol::<f64>("mixed", &SymbolParams::default()).unwrap();
        let lam = 1e-6;
        let w = ParaPoint::new(0.1, 0.3);
        let f = |y: ParaPoint<f64>| (0.7 * y.x1).cos() + 0.2 * (0.4 * y.x2).sin();
        let gap = e_lambda_gap(lam);
        let gl = GaussLegendre::<f64>::new(12);
        // y-space: u = y1 − w1 ∈ [gap, 3/2], v = y2 − w2 ∈ [u(1+u), u(4−u)].
        let lhs = gl.integrate(gap, 1.5, 40, |u| {
            gl.integrate(u * (1.0 + u), u * (4.0 - u), 40, |v| {
                let y = ParaPoint::new(w.x1 + u, w.x2 + v);
                k0_eval(w, y, &a, lam) * f(y)
            })
        });
        // (s, t)-space double integral restricted to E_λ.
        let rhs = -gl.integrate(0.5, 2.0 - gap, 40, |t| {
            gl.integrate(t + gap, 2.0, 40, |s| {
                b_quantity(w, s, t, &a) * phi_weight(s) * phi_weight(t) * f(phi_map(w, s, t))
            })
        });
        assert!((lhs - rhs).abs() <= 1e-4 * rhs.abs(), "{lhs} vs {rhs}");
    }

    #[test]
    fn shift_bound_zero_shift() {
        let r = shift_bound_check(1e-4, 1000, 1, ShiftChoice::Fixed(ParaPoint::origin())).unwrap();
        assert_eq!((r.max_ratio_s, r.max_ratio_t, r.violations), (0.0, 0.0, 0));
    }

    #[test]
    fn f_lambda_zero_shift() {
        let e = f_lambda_measure(ParaPoint::origin(), ParaPoint::origin(), 1e-5, 100_000, 3).unwrap();
        assert_eq!(e.estimate, 0.0);
    }

    #[test]
    fn reg_integral_trivial_cases() {
        let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
        let x = ParaPoint::new(0.1, 0.2);
        assert_eq!(reg_integral(&c, x, ParaPoint::new(1e-5, 1e-10), 1e-5, 16).unwrap(), 0.0);
        let a = make_symbol::<f64>("sine_x1", &SymbolParams::default()).unwrap();
        assert_eq!(reg_integral(&a, x, ParaPoint::origin(), 1e-5, 16).unwrap(), 0.0);
    }
}
