//! Operator-norm estimation and the quantitative studies built on it.

mod norm;
mod studies;

pub use norm::{check_linearity, opnorm_power, random_field, DenseOp, OpNormResult};
pub use studies::{
    dilation_check, odd_partner, qs_tj_decay, rotations_refinement, rotations_vs_direct, sigma_uniformity,
    t1_oscillation, t1_sweep, wbp_sweep, QsDecay, QsRow, RotationsCompare, SigmaRow, SigmaSweep, T1Row, WbpRow,
};

use crate::error::{Error, Result};

/// Least-squares line through `(log scale, log norm)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

impl DecayFit {
    pub const MIN_POINTS: usize = 4;

    /// Fits `log norm = exponent · log scale + intercept` to `(scale, norm)` pairs.
    pub fn from_scales(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.iter().any(|&(s, v)| !(s > 0.0 && v > 0.0 && v.is_finite())) {
            return Err(Error::Degenerate("log-log fit needs positive finite values".into()));
        }
        Self::fit(pairs.iter().map(|&(s, v)| (s.ln(), v.ln())).collect())
    }

    /// Ordinary least squares on already-logged points.
    pub fn fit(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < Self::MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "a decay fit needs ≥ {} points, got {}",
                Self::MIN_POINTS,
                points.len()
            )));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
        if sxx == 0.0 {
            return Err(Error::Degenerate("all scales coincide".into()));
        }
        let exponent = sxy / sxx;
        let intercept = my - exponent * mx;
        let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum();
        let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
        Ok(Self { exponent, intercept, r_squared, points })
    }
}

#[cfg(test)]
mod tests;
