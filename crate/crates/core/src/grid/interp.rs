use num_complex::Complex;

use super::{spectral_transform, Field2D, TorusGrid, TransformDirection};
use crate::geometry::ParaPoint;
use crate::scalar::Real;

/// Trigonometric interpolant of a periodic field, evaluable anywhere.
#[derive(Debug, Clone)]
pub struct Interpolant<T> {
    grid: TorusGrid<T>,
    spectrum: Vec<Complex<T>>,
}

impl<T: Real> Interpolant<T> {
    pub fn new(f: &Field2D<T>) -> Self {
        let spec = spectral_transform(f, TransformDirection::Forward);
        let n = T::from_usize_lossy(f.grid().len());
        Self { grid: *f.grid(), spectrum: spec.data().iter().map(|z| z / n).collect() }
    }

    pub fn eval(&self, p: ParaPoint<T>) -> Complex<T> {
        let g = &self.grid;
        let p = g.wrap(p);
        let u1 = p.x1 + g.l1();
        let u2 = p.x2 + g.l2();
        let e2: Vec<Complex<T>> = (0..g.n2()).map(|m| Complex::from_polar(T::one(), g.xi2(m) * u2)).collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m1, row) in self.spectrum.chunks(g.n2()).enumerate() {
            let inner: Complex<T> = row.iter().zip(&e2).map(|(a, b)| a * b).sum();
            acc = acc + inner * Complex::from_polar(T::one(), g.xi1(m1) * u1);
        }
        acc
    }
}

/// Spectral interpolation of `f` at an arbitrary point (wrapped into the torus).
pub fn trig_interpolate<T: Real>(f: &Field2D<T>, p: ParaPoint<T>) -> Complex<T> {
    Interpolant::new(f).eval(p)
}
