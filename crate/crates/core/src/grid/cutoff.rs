//! Smooth cutoffs: the glue step, `χ`, the dyadic piece `η`, bumps and the
//! mean-zero mollifier `ψ_s`.

use num_complex::Complex;
use once_cell::sync::Lazy;

use super::{Field2D, SymbolTable, TorusGrid};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Real};

#[inline]
fn glue<T: Real>(x: T) -> T {
    if x > T::zero() {
        (-x.recip()).exp()
    } else {
        T::zero()
    }
}

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, built from `e^{-1/x}`.
#[inline]
pub fn smooth_step<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x >= T::one() {
        T::one()
    } else {
        let a = glue(x);
        a / (a + glue(T::one() - x))
    }
}

/// Even cutoff: 1 on `[-1, 1]`, 0 off `[-2, 2]`.
#[inline]
pub fn chi<T: Real>(t: T) -> T {
    smooth_step(lit::<T>(2.0) - t.abs())
}

/// `η(t) = χ(t) − χ(2t)`, supported in `1/2 ≤ |t| ≤ 2`.
///
/// The dilates telescope: `Σ_{j=-J}^{J} η(t/2^j) = χ(t/2^J) − χ(2^{J+1} t)`.
#[inline]
pub fn eta<T: Real>(t: T) -> T {
    let a = t.abs();
    if a <= lit(0.5) || a >= lit(2.0) {
        return T::zero();
    }
    chi(t) - chi(lit::<T>(2.0) * t)
}

/// The dilate `t ↦ η(t / 2^j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicCutoff<T> {
    pub j: i32,
    scale: T,
}

impl<T: Real> DyadicCutoff<T> {
    pub fn new(j: i32) -> Self {
        Self { j, scale: lit::<T>(2.0).powi(j) }
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        eta(t / self.scale)
    }

    /// Support `[2^{j-1}, 2^{j+1}]` in `|t|`.
    pub fn support(&self) -> (T, T) {
        (self.scale * lit(0.5), self.scale * lit(2.0))
    }

    pub fn scale(&self) -> T {
        self.scale
    }
}

pub fn build_eta_partition<T: Real>(j: i32) -> DyadicCutoff<T> {
    DyadicCutoff::new(j)
}

/// Standard bump `exp(−1/(1 − u²))` on `(−1, 1)`.
#[inline]
pub fn bump<T: Real>(u: T) -> T {
    let q = T::one() - u * u;
    if q <= T::zero() {
        T::zero()
    } else {
        (-q.recip()).exp()
    }
}

fn bump_hat_f64(gl: &GaussLegendre<f64>, omega: f64) -> f64 {
    let panels = 8 + (omega.abs() / 2.0).ceil() as usize;
    2.0 * gl.integrate(0.0, 1.0, panels, |u| bump(u) * (omega * u).cos())
}

static GL16: Lazy<GaussLegendre<f64>> = Lazy::new(|| GaussLegendre::new(16));

/// `∫ bump`.
static BUMP_MASS: Lazy<f64> = Lazy::new(|| bump_hat_f64(&GL16, 0.0));

/// Continuum `‖φ − φ_{1/2}‖₁` for the mollifier template; see [`psi_hat`].
static PSI_TEMPLATE_L1: Lazy<f64> = Lazy::new(|| {
    let gl = GaussLegendre::<f64>::new(6);
    let panels = 384;
    let mut nodes = Vec::new();
    let step = 1.0 / panels as f64;
    for p in 0..panels {
        let lo = p as f64 * step;
        for (x, w) in gl.on_interval(lo, lo + step) {
            nodes.push((x, w));
        }
    }
    let b1: Vec<(f64, f64, f64)> = nodes.iter().map(|&(x, w)| (bump(x), bump(2.0 * x), w)).collect();
    let b2: Vec<(f64, f64, f64)> = nodes.iter().map(|&(x, w)| (bump(x), bump(4.0 * x), w)).collect();
    let mut total = 0.0;
    for &(a, a2, w1) in &b1 {
        let mut row = 0.0;
        for &(b, b4, w2) in &b2 {
            row += w2 * (a * b - 8.0 * a2 * b4).abs();
        }
        total += w1 * row;
    }
    let m = *BUMP_MASS;
    4.0 * total / (m * m)
});

/// Unit-mass template `φ(x) = 32/M² · bump(4 x1) bump(8 x2)`, supported in `I_{1/2}(0)`.
fn phi_template(x1: f64, x2: f64) -> f64 {
    let m = *BUMP_MASS;
    32.0 / (m * m) * bump(4.0 * x1) * bump(8.0 * x2)
}

/// Continuum Fourier transform of `ψ_s = c (φ_s − φ_{s/2})` at `ξ`, where
/// `φ_u(x) = u⁻³ φ(x1/u, x2/u²)` and `c` normalizes `‖ψ_s‖₁ = 1`.
///
/// On a torus this is exactly the symbol of circular convolution with the
/// periodized `ψ_s`, at any resolution.
pub fn psi_hat<T: Real>(s: T, xi1: T, xi2: T) -> T {
    let s = s.to_f64_lossy();
    let (a, b) = (xi1.to_f64_lossy(), xi2.to_f64_lossy());
    let phi_hat = |u: f64| -> f64 {
        let m = *BUMP_MASS;
        bump_hat_f64(&GL16, u * a / 4.0) * bump_hat_f64(&GL16, u * u * b / 8.0) / (m * m)
    };
    lit((phi_hat(s) - phi_hat(s / 2.0)) / *PSI_TEMPLATE_L1)
}

/// `ψ̂_s` tabulated on a grid (separable evaluation).
pub(crate) fn psi_hat_table<T: Real>(s: T, grid: &TorusGrid<T>) -> Result<SymbolTable<T>> {
    let s = s.to_f64_lossy();
    let m2 = *BUMP_MASS * *BUMP_MASS;
    let xi1: Vec<f64> = grid.xi1_all().into_iter().map(|x| x.to_f64_lossy()).collect();
    let xi2: Vec<f64> = grid.xi2_all().into_iter().map(|x| x.to_f64_lossy()).collect();
    let f1 = |u: f64| -> Vec<f64> { xi1.iter().map(|&a| bump_hat_f64(&GL16, u * a / 4.0)).collect() };
    let f2 = |u: f64| -> Vec<f64> { xi2.iter().map(|&b| bump_hat_f64(&GL16, u * u * b / 8.0)).collect() };
    let (a_s, a_h) = (f1(s), f1(s / 2.0));
    let (b_s, b_h) = (f2(s), f2(s / 2.0));
    let c = 1.0 / (*PSI_TEMPLATE_L1 * m2);
    let n2 = grid.n2();
    let mut k = 0usize;
    SymbolTable::from_fn(grid, |_, _| {
        let (i, j) = (k / n2, k % n2);
        k += 1;
        Complex::new(lit(c * (a_s[i] * b_s[j] - a_h[i] * b_h[j])), T::zero())
    })
}

/// Samples of `ψ_s` on a grid that resolves `I_s(0)`.
///
/// Each dilate is normalized to unit discrete mass before subtracting, so
/// the discrete mean is zero to rounding; the result is then scaled to unit
/// discrete `L¹` norm.
pub fn build_psi_s<T: Real>(s: T, grid: &TorusGrid<T>) -> Result<Field2D<T>> {
    if !(s > T::zero()) {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {s}")));
    }
    if s > lit::<T>(2.0) * grid.l1() || s * s > lit::<T>(2.0) * grid.l2() {
        return Err(Error::InvalidArgument(format!("I_{s}(0) does not fit in the torus")));
    }
    let min_samples = lit::<T>(8.0);
    if s / grid.h1() < min_samples || s * s / grid.h2() < min_samples {
        return Err(Error::UnderResolved(format!(
            "I_{s}(0) spans {} × {} samples, need ≥ 8 per axis",
            (s / grid.h1()).to_f64_lossy(),
            (s * s / grid.h2()).to_f64_lossy()
        )));
    }
    let area = grid.cell_area().to_f64_lossy();
    let dilate = |u: f64| -> Vec<f64> {
        let mut v: Vec<f64> = (0..grid.len())
            .map(|k| {
                let p = grid.point(k / grid.n2(), k % grid.n2());
                phi_template(p.x1.to_f64_lossy() / u, p.x2.to_f64_lossy() / (u * u)) / (u * u * u)
            })
            .collect();
        let mass: f64 = v.iter().sum::<f64>() * area;
        v.iter_mut().for_each(|x| *x /= mass);
        v
    };
    let s64 = s.to_f64_lossy();
    let a = dilate(s64);
    let b = dilate(s64 / 2.0);
    let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    let l1: f64 = diff.iter().map(|x| x.abs()).sum::<f64>() * area;
    let data = diff.into_iter().map(|x| Complex::new(lit(x / l1), T::zero())).collect();
    Ok(Field2D::from_vec_unchecked(*grid, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_support_and_value() {
        for t in [0.0, 0.3, 0.5, -0.5, 2.0, -2.5, 7.0] {
            assert_eq!(eta::<f64>(t), 0.0, "t = {t}");
        }
        assert_eq!(eta::<f64>(1.0), 1.0);
        assert!(eta::<f64>(1.5) > 0.0 && eta::<f64>(-0.7) > 0.0);
    }

    #[test]
    fn eta_partition_of_unity_at_sample_point() {
        let s: f64 = (-20..=20).map(|j| DyadicCutoff::<f64>::new(j).eval(0.37)).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eta_partition_holds_across_range() {
        let big_j = 12;
        let mut t = 2f64.powi(-big_j + 1);
        while t <= 2f64.powi(big_j - 1) {
            for sign in [1.0, -1.0] {
                let s: f64 = (-big_j..=big_j).map(|j| DyadicCutoff::<f64>::new(j).eval(sign * t)).sum();
                assert!((s - 1.0).abs() < 1e-12, "t = {t}: {s}");
            }
            t *= 1.0137;
        }
    }

    #[test]
    fn step_is_symmetric() {
        for x in [0.1, 0.25, 0.5, 0.8] {
            assert!((smooth_step::<f64>(x) + smooth_step::<f64>(1.0 - x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn psi_hat_vanishes_at_zero_and_is_bounded() {
        assert!(psi_hat::<f64>(0.5, 0.0, 0.0).abs() < 1e-15);
        for &(a, b) in &[(1.0, 0.0), (10.0, 3.0), (40.0, 200.0), (3.0, -900.0)] {
            assert!(psi_hat::<f64>(0.5, a, b).abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn psi_s_discrete_properties() {
        let grid = TorusGrid::<f64>::square(1.0, 0.5, 64).unwrap();
        let psi = build_psi_s(0.5, &grid).unwrap();
        let mean = psi.integral();
        assert!(mean.norm() < 1e-12, "mean = {mean}");
        let l1: f64 = psi.data().iter().map(|z| z.norm()).sum::<f64>() * grid.cell_area();
        assert!((l1 - 1.0).abs() < 1e-12);
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                let p = grid.point(i, j);
                if p.x1.abs() > 0.25 || p.x2.abs() > 0.125 {
                    assert_eq!(psi.get(i, j).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn psi_s_rejects_under_resolved_grid() {
        let grid = TorusGrid::<f64>::square(4.0, 4.0, 32).unwrap();
        assert!(matches!(build_psi_s(0.25, &grid), Err(Error::UnderResolved(_))));
        assert!(matches!(build_psi_s(20.0, &grid), Err(Error::InvalidArgument(_))));
    }
}
