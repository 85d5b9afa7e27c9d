use std::sync::Arc;

use num_complex::Complex;

use super::{Fft2, Field2D, TorusGrid};
use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::scalar::Real;

type SymbolFn<T> = dyn Fn(T, T) -> Complex<T> + Send + Sync;

/// Fourier multiplier `m(ξ1, ξ2)` with an explicit value at `ξ = 0`.
#[derive(Clone)]
pub struct MultiplierSpec<T> {
    symbol: Arc<SymbolFn<T>>,
    pub dc_value: Complex<T>,
}

impl<T: Real> MultiplierSpec<T> {
    pub fn new<F>(symbol: F, dc_value: Complex<T>) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Send + Sync + 'static,
    {
        Self { symbol: Arc::new(symbol), dc_value }
    }

    /// Symbol whose value at the origin is taken from the closure itself.
    pub fn continuous<F>(symbol: F) -> Self
    where
        F: Fn(T, T) -> Complex<T> + Send + Sync + 'static,
    {
        let dc = symbol(T::zero(), T::zero());
        Self::new(symbol, dc)
    }

    #[inline]
    pub fn eval(&self, xi1: T, xi2: T) -> Complex<T> {
        if xi1 == T::zero() && xi2 == T::zero() {
            self.dc_value
        } else {
            (self.symbol)(xi1, xi2)
        }
    }

    pub fn tabulate(&self, grid: &TorusGrid<T>) -> Result<SymbolTable<T>> {
        SymbolTable::from_fn(grid, |a, b| self.eval(a, b))
    }
}

impl<T> std::fmt::Debug for MultiplierSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MultiplierSpec { .. }")
    }
}

/// Multiplier values at every lattice frequency of a grid, in FFT bin order.
#[derive(Debug, Clone)]
pub struct SymbolTable<T> {
    grid: TorusGrid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SymbolTable<T> {
    pub fn from_fn<F: FnMut(T, T) -> Complex<T>>(grid: &TorusGrid<T>, mut f: F) -> Result<Self> {
        let xi1 = grid.xi1_all();
        let xi2 = grid.xi2_all();
        let mut values = Vec::with_capacity(grid.len());
        for &a in &xi1 {
            for &b in &xi2 {
                let v = f(a, b);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite(format!("multiplier at ξ = ({a}, {b})")));
                }
                values.push(v);
            }
        }
        Ok(Self { grid: *grid, values })
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    /// Largest modulus over the lattice; the `L²` operator norm of the multiplier.
    pub fn max_modulus(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        assert!(self.grid.same_as(f.grid()), "multiplier tabulated on a different grid");
        let plan = Fft2::for_grid(f.grid());
        let mut data = f.data().to_vec();
        plan.forward(&mut data);
        for (z, m) in data.iter_mut().zip(&self.values) {
            *z = *z * m;
        }
        plan.inverse(&mut data);
        Field2D::from_vec_unchecked(*f.grid(), data)
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|z| z.conj()).collect() }
    }

    pub fn compose(&self, other: &Self) -> Self {
        assert!(self.grid.same_as(&other.grid));
        Self { grid: self.grid, values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect() }
    }
}

/// Forward transform, pointwise multiplication, inverse transform.
pub fn apply_multiplier<T: Real>(f: &Field2D<T>, m: &MultiplierSpec<T>) -> Result<Field2D<T>> {
    Ok(m.tabulate(f.grid())?.apply(f))
}

/// Separable phase factors `e^{-i ξ1 d1}` and `e^{-i ξ2 d2}` of a translation.
pub(crate) fn shift_phases<T: Real>(grid: &TorusGrid<T>, d: ParaPoint<T>) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let p1 = (0..grid.n1()).map(|m| Complex::from_polar(T::one(), -grid.xi1(m) * d.x1)).collect();
    let p2 = (0..grid.n2()).map(|m| Complex::from_polar(T::one(), -grid.xi2(m) * d.x2)).collect();
    (p1, p2)
}

/// Multiplies a spectrum in place by the translation phase `e^{-i ξ·d}`.
pub(crate) fn apply_shift_phase<T: Real>(spec: &mut [Complex<T>], p1: &[Complex<T>], p2: &[Complex<T>]) {
    let n2 = p2.len();
    for (row, a) in spec.chunks_mut(n2).zip(p1) {
        for (z, b) in row.iter_mut().zip(p2) {
            *z = *z * (a * b);
        }
    }
}

/// Spectral translation `x ↦ f(x − d)`: exact trigonometric interpolation.
pub fn translate<T: Real>(f: &Field2D<T>, d: ParaPoint<T>) -> Field2D<T> {
    let plan = Fft2::for_grid(f.grid());
    let mut data = f.data().to_vec();
    plan.forward(&mut data);
    let (p1, p2) = shift_phases(f.grid(), d);
    apply_shift_phase(&mut data, &p1, &p2);
    plan.inverse(&mut data);
    Field2D::from_vec_unchecked(*f.grid(), data)
}
