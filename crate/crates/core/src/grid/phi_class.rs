//! Normalized bumps adapted to a parabolic cube, and a sampled membership check.

use num_complex::Complex;
use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{translate, Fft2, Field2D, TorusGrid};
use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::scalar::{lit, Real};

/// A bump centred at `center` whose support is the cube `I_r(center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec<T> {
    pub center: ParaPoint<T>,
    pub r: T,
}

impl<T: Real> BumpSpec<T> {
    pub fn new(center: ParaPoint<T>, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("bump scale must be positive, got {r}")));
        }
        Ok(Self { center, r })
    }
}

fn bump_derivs(u: f64) -> [f64; 3] {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        return [0.0; 3];
    }
    let b = (-1.0 / q).exp();
    let d1 = -2.0 * u * b / (q * q);
    let d2 = b * (4.0 * u * u / q.powi(4) - 2.0 / (q * q) - 8.0 * u * u / q.powi(3));
    [b, d1, d2]
}

/// Sup norms of the 1-D bump and its first two derivatives.
static BUMP_SUPS: Lazy<[f64; 3]> = Lazy::new(|| {
    let n = 200_000;
    let mut s = [0.0f64; 3];
    for k in 0..=n {
        let u = -1.0 + 2.0 * k as f64 / n as f64;
        let d = bump_derivs(u);
        for m in 0..3 {
            s[m] = s[m].max(d[m].abs());
        }
    }
    s
});

/// The single scalar `κ` applied to `b(2u1) b(2u2)` so that every scaled
/// derivative of order ≤ 2 is at most 1 (with a 2% margin).
pub fn phi_template_scale() -> f64 {
    let [s0, s1, s2] = *BUMP_SUPS;
    let worst = [s0 * s0, 2.0 * s1 * s0, 4.0 * s2 * s0, 4.0 * s1 * s1].into_iter().fold(0.0, f64::max);
    1.0 / (1.02 * worst)
}

/// Samples `κ b(2 (x1−a)/r) b(2 (x2−b)/r²)` on `grid`, with `x − center`
/// taken on the torus.
pub fn build_phi_class<T: Real>(b: &BumpSpec<T>, grid: &TorusGrid<T>) -> Result<Field2D<T>> {
    check_resolution(grid, b.r)?;
    let kappa = phi_template_scale();
    let (r, r2) = (b.r.to_f64_lossy(), (b.r * b.r).to_f64_lossy());
    Ok(Field2D::from_real_fn(*grid, |p| {
        let d = grid.wrap(p - b.center);
        let u1 = 2.0 * d.x1.to_f64_lossy() / r;
        let u2 = 2.0 * d.x2.to_f64_lossy() / r2;
        lit(kappa * bump_derivs(u1)[0] * bump_derivs(u2)[0])
    }))
}

fn check_resolution<T: Real>(grid: &TorusGrid<T>, r: T) -> Result<()> {
    if r > lit::<T>(2.0) * grid.l1() || r * r > lit::<T>(2.0) * grid.l2() {
        return Err(Error::InvalidArgument(format!("I_{r} does not fit in the torus")));
    }
    let eight = lit::<T>(8.0);
    if r / grid.h1() < eight || r * r / grid.h2() < eight {
        return Err(Error::UnderResolved(format!("I_{r} needs ≥ 8 samples per axis")));
    }
    Ok(())
}

/// Outcome of [`phi_class_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhiClassReport {
    /// `‖φ‖_∞`.
    pub sup: f64,
    /// `max |φ(y+h) − φ(y)| / ρ` over the sampled shifts.
    pub lip_raw: f64,
    /// `r · lip_raw`; condition (ii) asks for ≤ 1.
    pub lip_scaled: f64,
    /// `r^{k+2m} ‖∂₁^k ∂₂^m φ‖_∞` for `(k, m)` in
    /// `(1,0), (0,1), (2,0), (1,1), (0,2)`.
    pub scaled_derivs: [f64; 5],
    /// `‖∂₁^k ∂₂^m φ‖_∞` without the scale factor, same order.
    pub literal_derivs: [f64; 5],
    /// Largest sample outside `I_r(x0)`.
    pub outside_support: f64,
}

impl PhiClassReport {
    pub fn passes_sup(&self) -> bool {
        self.sup <= 1.0 + 1e-12
    }
    pub fn passes_lip(&self) -> bool {
        self.lip_scaled <= 1.0 + 1e-9
    }
    pub fn passes_derivs(&self) -> bool {
        self.scaled_derivs.iter().all(|&d| d <= 1.0 + 1e-9)
    }
    pub fn passes(&self) -> bool {
        self.passes_sup() && self.passes_lip() && self.passes_derivs() && self.outside_support == 0.0
    }
}

const DERIV_ORDERS: [(i32, i32); 5] = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Checks the three size/smoothness conditions at scale `r` around `x0`:
/// sup norm, parabolic Lipschitz quotient over random shifts, and spectral
/// derivatives of order ≤ 2.
pub fn phi_class_check<T: Real>(f: &Field2D<T>, x0: ParaPoint<T>, r: T) -> Result<PhiClassReport> {
    let grid = *f.grid();
    check_resolution(&grid, r)?;
    let sup = f.norm_sup().to_f64_lossy();
    let r64 = r.to_f64_lossy();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0fb0);
    let mut lip_raw = 0.0f64;
    for k in 0..40 {
        let rho = r64 * 2f64.powf(-3.0 + 4.0 * (k as f64) / 39.0);
        let h = ParaPoint::new(lit::<T>(rng.gen_range(-rho..=rho)), lit::<T>(rng.gen_range(-rho * rho..=rho * rho)));
        let shifted = translate(f, -h);
        lip_raw = lip_raw.max(shifted.max_abs_diff(f).to_f64_lossy() / rho);
    }

    let plan = Fft2::for_grid(&grid);
    let mut spec = f.data().to_vec();
    plan.forward(&mut spec);
    let xi1 = grid.xi1_all();
    let xi2 = grid.xi2_all();
    let mut scaled_derivs = [0.0; 5];
    let mut literal_derivs = [0.0; 5];
    for (slot, &(k, m)) in DERIV_ORDERS.iter().enumerate() {
        let mut buf = spec.clone();
        for (i, row) in buf.chunks_mut(grid.n2()).enumerate() {
            let a = Complex::new(T::zero(), xi1[i]).powi(k);
            for (j, z) in row.iter_mut().enumerate() {
                *z = *z * a * Complex::new(T::zero(), xi2[j]).powi(m);
            }
        }
        plan.inverse(&mut buf);
        let d = buf.iter().map(|z| z.norm()).fold(T::zero(), T::max).to_f64_lossy();
        literal_derivs[slot] = d;
        scaled_derivs[slot] = d * r64.powi(k + 2 * m);
    }

    let (hw1, hw2) = (r64 / 2.0, r64 * r64 / 2.0);
    let mut outside_support = 0.0f64;
    for i in 0..grid.n1() {
        for j in 0..grid.n2() {
            let d = grid.wrap(grid.point(i, j) - x0);
            if d.x1.to_f64_lossy().abs() >= hw1 || d.x2.to_f64_lossy().abs() >= hw2 {
                outside_support = outside_support.max(f.get(i, j).norm().to_f64_lossy());
            }
        }
    }

    Ok(PhiClassReport { sup, lip_raw, lip_scaled: lip_raw * r64, scaled_derivs, literal_derivs, outside_support })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_for(r: f64) -> TorusGrid<f64> {
        TorusGrid::square(r, r * r, 64).unwrap()
    }

    #[test]
    fn template_passes_own_check() {
        let g = grid_for(4.0);
        let b = BumpSpec::new(ParaPoint::origin(), 4.0).unwrap();
        let f = build_phi_class(&b, &g).unwrap();
        let rep = phi_class_check(&f, ParaPoint::origin(), 4.0).unwrap();
        assert!(rep.passes(), "{rep:?}");
    }

    #[test]
    fn doubled_template_fails_derivative_bound() {
        let g = grid_for(4.0);
        let b = BumpSpec::new(ParaPoint::origin(), 4.0).unwrap();
        let f = build_phi_class(&b, &g).unwrap().scale(Complex::new(2.0, 0.0));
        let rep = phi_class_check(&f, ParaPoint::origin(), 4.0).unwrap();
        assert!(!rep.passes_derivs() && !rep.passes());
    }

    #[test]
    fn rescaled_to_sup_two_fails_sup_bound() {
        let g = grid_for(4.0);
        let b = BumpSpec::new(ParaPoint::origin(), 4.0).unwrap();
        let f = build_phi_class(&b, &g).unwrap();
        let f = f.scale(Complex::new(2.0 / f.norm_sup(), 0.0));
        let rep = phi_class_check(&f, ParaPoint::origin(), 4.0).unwrap();
        assert!(!rep.passes_sup());
    }

    #[test]
    fn translated_center_stays_in_class() {
        let g = grid_for(2.0);
        let c = ParaPoint::new(0.7, -1.3);
        let f = build_phi_class(&BumpSpec::new(c, 2.0).unwrap(), &g).unwrap();
        assert!(phi_class_check(&f, c, 2.0).unwrap().passes());
    }

    #[test]
    fn rejects_unresolved_scale() {
        let g = TorusGrid::square(4.0, 16.0, 32).unwrap();
        let b = BumpSpec::new(ParaPoint::origin(), 0.5).unwrap();
        assert!(matches!(build_phi_class(&b, &g), Err(Error::UnderResolved(_))));
    }
}
