use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use super::{Field2D, TorusGrid};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformDirection {
    Forward,
    Inverse,
}

/// Two-dimensional FFT plans for an `n1 × n2` row-major buffer.
///
/// Forward is the plain sum `Σ f e^{-2πi(mi/n1 + kj/n2)}`; inverse divides
/// by `n1 n2`.
pub struct Fft2<T: Real> {
    n1: usize,
    n2: usize,
    fwd1: Arc<dyn Fft<T>>,
    inv1: Arc<dyn Fft<T>>,
    fwd2: Arc<dyn Fft<T>>,
    inv2: Arc<dyn Fft<T>>,
}

type PlanCache = Mutex<HashMap<(TypeId, usize, usize), Arc<dyn Any + Send + Sync>>>;

static PLANS: Lazy<PlanCache> = Lazy::new(|| Mutex::new(HashMap::new()));

impl<T: Real> Fft2<T> {
    fn build(n1: usize, n2: usize) -> Self {
        let mut planner = FftPlanner::<T>::new();
        Self {
            n1,
            n2,
            fwd1: planner.plan_fft_forward(n1),
            inv1: planner.plan_fft_inverse(n1),
            fwd2: planner.plan_fft_forward(n2),
            inv2: planner.plan_fft_inverse(n2),
        }
    }

    /// Shared plan for the given shape.
    pub fn for_shape(n1: usize, n2: usize) -> Arc<Self> {
        let key = (TypeId::of::<T>(), n1, n2);
        let mut cache = PLANS.lock().expect("fft plan cache poisoned");
        if let Some(p) = cache.get(&key) {
            if let Ok(p) = Arc::clone(p).downcast::<Self>() {
                return p;
            }
        }
        let plan = Arc::new(Self::build(n1, n2));
        cache.insert(key, plan.clone() as Arc<dyn Any + Send + Sync>);
        plan
    }

    pub fn for_grid(grid: &TorusGrid<T>) -> Arc<Self> {
        Self::for_shape(grid.n1(), grid.n2())
    }

    pub fn forward(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &*self.fwd1, &*self.fwd2);
    }

    /// Inverse transform including the `1/(n1 n2)` factor.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        self.run(buf, &*self.inv1, &*self.inv2);
        let s = T::one() / T::from_usize_lossy(self.n1 * self.n2);
        for z in buf.iter_mut() {
            *z = *z * s;
        }
    }

    fn run(&self, buf: &mut [Complex<T>], p1: &dyn Fft<T>, p2: &dyn Fft<T>) {
        assert_eq!(buf.len(), self.n1 * self.n2, "buffer does not match plan shape");
        let zero = Complex::new(T::zero(), T::zero());
        let mut scratch = vec![zero; p1.get_inplace_scratch_len().max(p2.get_inplace_scratch_len())];
        p2.process_with_scratch(buf, &mut scratch);
        let mut t = vec![zero; buf.len()];
        transpose(buf, &mut t, self.n1, self.n2);
        p1.process_with_scratch(&mut t, &mut scratch);
        transpose(&t, buf, self.n2, self.n1);
    }
}

fn transpose<T: Copy>(src: &[T], dst: &mut [T], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Forward (plain sum) or inverse (`/ N1 N2`) discrete Fourier transform.
pub fn spectral_transform<T: Real>(f: &Field2D<T>, direction: TransformDirection) -> Field2D<T> {
    let plan = Fft2::for_grid(f.grid());
    let mut data = f.data().to_vec();
    match direction {
        TransformDirection::Forward => plan.forward(&mut data),
        TransformDirection::Inverse => plan.inverse(&mut data),
    }
    Field2D::from_vec_unchecked(*f.grid(), data)
}
