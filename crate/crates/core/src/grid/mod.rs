//! Periodic grids, sampled fields and their spectral machinery.
//!
//! A [`TorusGrid`] samples `[-L1, L1) × [-L2, L2)` at `x = -L + i h`,
//! `h = 2L / N`. Frequencies are `ξ_k = π k / L` with `k ∈ [-N/2, N/2)`.
//! Fields are stored row-major: index `i * N2 + j` with `i` along `x1`.

mod cutoff;
mod fft;
mod interp;
pub mod io;
mod multiplier;
mod phi_class;

pub(crate) use cutoff::psi_hat_table;
pub use cutoff::{build_eta_partition, build_psi_s, bump, chi, eta, psi_hat, smooth_step, DyadicCutoff};
pub use fft::{spectral_transform, Fft2, TransformDirection};
pub use interp::{trig_interpolate, Interpolant};
pub(crate) use multiplier::shift_phases;
pub use multiplier::{apply_multiplier, translate, MultiplierSpec, SymbolTable};
pub use phi_class::{build_phi_class, phi_class_check, phi_template_scale, BumpSpec, PhiClassReport};

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid<T> {
    l1: T,
    l2: T,
    n1: usize,
    n2: usize,
}

impl<T: Real> TorusGrid<T> {
    pub fn new(l1: T, l2: T, n1: usize, n2: usize) -> Result<Self> {
        if !(l1 > T::zero() && l2 > T::zero()) || !l1.is_finite() || !l2.is_finite() {
            return Err(Error::InvalidArgument(format!("half-periods must be positive: {l1}, {l2}")));
        }
        if n1 == 0 || n2 == 0 || !n1.is_multiple_of(2) || !n2.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("sample counts must be even and positive: {n1}, {n2}")));
        }
        Ok(Self { l1, l2, n1, n2 })
    }

    /// Square sample count on both axes.
    pub fn square(l1: T, l2: T, n: usize) -> Result<Self> {
        Self::new(l1, l2, n, n)
    }

    #[inline]
    pub fn l1(&self) -> T {
        self.l1
    }
    #[inline]
    pub fn l2(&self) -> T {
        self.l2
    }
    #[inline]
    pub fn n1(&self) -> usize {
        self.n1
    }
    #[inline]
    pub fn n2(&self) -> usize {
        self.n2
    }
    #[inline]
    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    #[inline]
    pub fn h1(&self) -> T {
        lit::<T>(2.0) * self.l1 / T::from_usize_lossy(self.n1)
    }
    #[inline]
    pub fn h2(&self) -> T {
        lit::<T>(2.0) * self.l2 / T::from_usize_lossy(self.n2)
    }
    #[inline]
    pub fn cell_area(&self) -> T {
        self.h1() * self.h2()
    }
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }
    #[inline]
    pub fn x1(&self, i: usize) -> T {
        -self.l1 + self.h1() * T::from_usize_lossy(i)
    }
    #[inline]
    pub fn x2(&self, j: usize) -> T {
        -self.l2 + self.h2() * T::from_usize_lossy(j)
    }
    #[inline]
    pub fn point(&self, i: usize, j: usize) -> ParaPoint<T> {
        ParaPoint::new(self.x1(i), self.x2(j))
    }

    /// Signed lattice index of FFT bin `m` on an axis with `n` samples.
    #[inline]
    pub fn signed_index(m: usize, n: usize) -> i64 {
        if m < n / 2 {
            m as i64
        } else {
            m as i64 - n as i64
        }
    }

    #[inline]
    pub fn xi1(&self, m: usize) -> T {
        T::PI() * lit::<T>(Self::signed_index(m, self.n1) as f64) / self.l1
    }
    #[inline]
    pub fn xi2(&self, m: usize) -> T {
        T::PI() * lit::<T>(Self::signed_index(m, self.n2) as f64) / self.l2
    }

    pub fn xi1_all(&self) -> Vec<T> {
        (0..self.n1).map(|m| self.xi1(m)).collect()
    }
    pub fn xi2_all(&self) -> Vec<T> {
        (0..self.n2).map(|m| self.xi2(m)).collect()
    }

    /// Wraps a point into the fundamental domain `[-L1, L1) × [-L2, L2)`.
    pub fn wrap(&self, p: ParaPoint<T>) -> ParaPoint<T> {
        fn w<T: Real>(x: T, l: T) -> T {
            let p = l + l;
            let y = (x + l) % p;
            let y = if y < T::zero() { y + p } else { y };
            y - l
        }
        ParaPoint::new(w(p.x1, self.l1), w(p.x2, self.l2))
    }

    /// Grid dilated parabolically: half-periods `(ρ L1, ρ² L2)`, same counts.
    pub fn dilated(&self, rho: T) -> Result<Self> {
        Self::new(rho * self.l1, rho * rho * self.l2, self.n1, self.n2)
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n1 == other.n1
            && self.n2 == other.n2
            && (self.l1 - other.l1).abs() <= T::epsilon() * lit(8.0) * self.l1
            && (self.l2 - other.l2).abs() <= T::epsilon() * lit(8.0) * self.l2
    }
}

/// Complex-valued samples on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D<T> {
    grid: TorusGrid<T>,
    data: Vec<Complex<T>>,
}

impl<T: Real> Field2D<T> {
    pub fn zeros(grid: TorusGrid<T>) -> Self {
        Self { grid, data: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn constant(grid: TorusGrid<T>, value: Complex<T>) -> Self {
        Self { grid, data: vec![value; grid.len()] }
    }

    pub fn from_vec(grid: TorusGrid<T>, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("field sample".into()));
        }
        Ok(Self { grid, data })
    }

    pub(crate) fn from_vec_unchecked(grid: TorusGrid<T>, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn from_fn<F: FnMut(ParaPoint<T>) -> Complex<T>>(grid: TorusGrid<T>, mut f: F) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                data.push(f(grid.point(i, j)));
            }
        }
        Self { grid, data }
    }

    pub fn from_real_fn<F: FnMut(ParaPoint<T>) -> T>(grid: TorusGrid<T>, mut f: F) -> Self {
        Self::from_fn(grid, |p| Complex::new(f(p), T::zero()))
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }
    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }
    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }
    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[self.grid.index(i, j)]
    }

    pub fn map<F: FnMut(Complex<T>) -> Complex<T>>(&self, f: F) -> Self {
        Self { grid: self.grid, data: self.data.iter().copied().map(f).collect() }
    }

    pub fn zip_with<F: FnMut(Complex<T>, Complex<T>) -> Complex<T>>(&self, other: &Self, mut f: F) -> Self {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        Self { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scale(&self, alpha: Complex<T>) -> Self {
        self.map(|z| z * alpha)
    }

    pub fn real_part(&self) -> Vec<T> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Discrete inner product `Σ f conj(g) · h1 h2`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        let s: Complex<T> = self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum();
        s * self.grid.cell_area()
    }

    /// Discrete `L²` norm with cell-area weight.
    pub fn norm_l2(&self) -> T {
        let s: T = self.data.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    /// Plain Euclidean norm of the sample vector.
    pub fn norm_samples(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn norm_sup(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Discrete integral `Σ f · h1 h2`.
    pub fn integral(&self) -> Complex<T> {
        self.data.iter().copied().sum::<Complex<T>>() * self.grid.cell_area()
    }

    /// `‖self − other‖₂ / ‖other‖₂` (absolute when `other` vanishes).
    pub fn rel_l2_error(&self, reference: &Self) -> T {
        let diff = self - reference;
        let d = diff.norm_samples();
        let r = reference.norm_samples();
        if r > T::zero() {
            d / r
        } else {
            d
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max)
    }
}

impl<T: Real> Add for &Field2D<T> {
    type Output = Field2D<T>;
    fn add(self, o: &Field2D<T>) -> Field2D<T> {
        self.zip_with(o, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Field2D<T> {
    type Output = Field2D<T>;
    fn sub(self, o: &Field2D<T>) -> Field2D<T> {
        self.zip_with(o, |a, b| a - b)
    }
}

/// Pointwise product.
impl<T: Real> Mul for &Field2D<T> {
    type Output = Field2D<T>;
    fn mul(self, o: &Field2D<T>) -> Field2D<T> {
        self.zip_with(o, |a, b| a * b)
    }
}
