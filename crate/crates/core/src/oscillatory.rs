//! The multiplier `m(ξ) = ∫ e^{i(ξ1 t + ξ2 t²)} η(t) dt` of the averaging
//! operator `f ↦ ∫ f(x − γ(t)) η(t) dt`, and sweeps of its decay.

use num_complex::Complex;
use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::eta;
use crate::quadrature::GaussLegendre;
use crate::scalar::{lit, Real};

static GL16: Lazy<GaussLegendre<f64>> = Lazy::new(|| GaussLegendre::new(16));

/// Composite 16-point Gauss–Legendre on both halves of `supp η`, with at
/// least 16 nodes per local wavelength of the phase.
fn m_xi_f64(xi1: f64, xi2: f64, density: f64) -> Complex<f64> {
    let mut acc = Complex::new(0.0, 0.0);
    for (a, b) in [(-2.0, -0.5), (0.5, 2.0)] {
        let dphase = (xi1 + 2.0 * xi2 * a).abs().max((xi1 + 2.0 * xi2 * b).abs());
        let cycles = dphase * (b - a) / (2.0 * std::f64::consts::PI);
        let panels = 48usize.max((density * cycles).ceil() as usize);
        let step = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + step * p as f64;
            let mut part = Complex::new(0.0, 0.0);
            for (t, w) in GL16.on_interval(lo, lo + step) {
                part += Complex::from_polar(w * eta(t), xi1 * t + xi2 * t * t);
            }
            acc += part;
        }
    }
    acc
}

/// `m(ξ)`, evaluated in `f64` with absolute error near `1e-12`.
pub fn m_xi<T: Real>(xi1: T, xi2: T) -> Complex<T> {
    let z = m_xi_f64(xi1.to_f64_lossy(), xi2.to_f64_lossy(), 1.0);
    Complex::new(lit(z.re), lit(z.im))
}

/// Same integral with `density`× more panels; used as a refinement oracle.
pub fn m_xi_refined(xi1: f64, xi2: f64, density: f64) -> Complex<f64> {
    m_xi_f64(xi1, xi2, density.max(1.0))
}

/// Which side of `|ξ1| = 40 |ξ2|` a frequency lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `|ξ1| > 40 |ξ2|`.
    Transversal,
    /// `|ξ1| ≤ 40 |ξ2|`.
    Curved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscResult {
    pub k: u32,
    pub xi: (f64, f64),
    pub value: Complex<f64>,
    /// `|m(ξ)| (|ξ1| + |ξ2|^{1/2})`.
    pub decay_product: f64,
    /// `|m(ξ)| |ξ2|^{1/2}` (0 when `ξ2 = 0`).
    pub curved_product: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySweep {
    pub ray: (f64, f64),
    pub rows: Vec<OscResult>,
}

impl DecaySweep {
    pub fn max_product(&self) -> f64 {
        self.rows.iter().map(|r| r.decay_product).fold(0.0, f64::max)
    }

    pub fn max_over_min(&self) -> f64 {
        let min = self.rows.iter().map(|r| r.decay_product).fold(f64::INFINITY, f64::min);
        self.max_product() / min
    }

    /// Least-squares slope of `ln(decay_product)` against `k`.
    pub fn log_slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> =
            self.rows.iter().map(|r| (r.k as f64, r.decay_product.max(f64::MIN_POSITIVE).ln())).collect();
        ols_slope(&pts)
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.decay_product.is_finite())
    }

    pub const CSV_HEADER: &'static str = "ray1,ray2,k,xi1,xi2,abs_m,decay_product,regime";

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{:.6e},{:.6e},{:.12e},{:.12e},{}",
                    self.ray.0,
                    self.ray.1,
                    r.k,
                    r.xi.0,
                    r.xi.1,
                    r.value.norm(),
                    r.decay_product,
                    match r.regime {
                        Regime::Transversal => "transversal",
                        Regime::Curved => "curved",
                    }
                )
            })
            .collect()
    }
}

pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// `m` at `ξ = 2^k · ray` for `k = 0..=k_max`.
pub fn decay_sweep(ray: (f64, f64), k_max: u32) -> Result<DecaySweep> {
    if k_max < 4 {
        return Err(Error::InvalidArgument(format!("k_max must be ≥ 4, got {k_max}")));
    }
    if !(ray.0.is_finite() && ray.1.is_finite()) || (ray.0 == 0.0 && ray.1 == 0.0) {
        return Err(Error::InvalidArgument("ray must be a finite nonzero vector".into()));
    }
    let rows = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let s = 2f64.powi(k as i32);
            let xi = (s * ray.0, s * ray.1);
            let value = m_xi_f64(xi.0, xi.1, 1.0);
            let a = value.norm();
            OscResult {
                k,
                xi,
                value,
                decay_product: a * (xi.0.abs() + xi.1.abs().sqrt()),
                curved_product: a * xi.1.abs().sqrt(),
                regime: if xi.0.abs() > 40.0 * xi.1.abs() { Regime::Transversal } else { Regime::Curved },
            }
        })
        .collect();
    Ok(DecaySweep { ray, rows })
}
