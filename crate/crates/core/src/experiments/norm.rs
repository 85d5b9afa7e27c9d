use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Field2D, TorusGrid};
use crate::operators::LinearOp;
use crate::scalar::{lit, Real};

/// Outcome of [`opnorm_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpNormResult {
    pub norm_estimate: f64,
    pub iterations: usize,
    pub rel_change_at_stop: f64,
    pub converged: bool,
    pub seed: u64,
}

/// Field with independent uniform real and imaginary parts in `[−1, 1]`.
pub fn random_field<T: Real>(grid: TorusGrid<T>, seed: u64) -> Field2D<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field2D::from_fn(grid, |_| Complex::new(lit(rng.gen_range(-1.0..1.0)), lit(rng.gen_range(-1.0..1.0))))
}

fn combine<T: Real>(a: Complex<T>, f: &Field2D<T>, b: Complex<T>, g: &Field2D<T>) -> Field2D<T> {
    f.zip_with(g, |x, y| a * x + b * y)
}

/// Checks `T(αf + βg) = αTf + βTg` on `n_triples` random triples, relative
/// to `|α| ‖Tf‖ + |β| ‖Tg‖` floored at `1e-3 (|α| ‖f‖ + |β| ‖g‖)` so that
/// maps with rounding-level output are not flagged.
pub fn check_linearity<T: Real, L: LinearOp<T> + ?Sized>(op: &L, n_triples: usize, seed: u64, tol: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_11ea);
    let mut worst = 0.0f64;
    for k in 0..n_triples {
        let f = random_field(*op.grid(), rng.gen());
        let g = random_field(*op.grid(), rng.gen());
        let a = Complex::new(lit::<T>(rng.gen_range(-2.0..2.0)), lit(rng.gen_range(-2.0..2.0)));
        let b = Complex::new(lit::<T>(rng.gen_range(-2.0..2.0)), lit(rng.gen_range(-2.0..2.0)));
        let (tf, tg) = (op.apply(&f), op.apply(&g));
        let lhs = op.apply(&combine(a, &f, b, &g));
        let rhs = combine(a, &tf, b, &tg);
        let out = (a.norm() * tf.norm_l2() + b.norm() * tg.norm_l2()).to_f64_lossy();
        let inp = (a.norm() * f.norm_l2() + b.norm() * g.norm_l2()).to_f64_lossy();
        let scale = out.max(1e-3 * inp);
        let err = (&lhs - &rhs).norm_l2().to_f64_lossy();
        let rel = err / scale;
        if !(rel <= tol) {
            return Err(Error::InvalidArgument(format!(
                "operator is not linear: triple {k} has relative defect {rel:e}"
            )));
        }
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Largest singular value by power iteration on `T*T` from a seeded start.
///
/// Stops when the estimate `‖T v‖` changes by less than `tol` relatively;
/// hitting `max_iter` is reported through `converged`, not as an error.
pub fn opnorm_power<T: Real, L: LinearOp<T> + ?Sized>(
    op: &L,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<OpNormResult> {
    let lin_tol = if std::mem::size_of::<T>() == 4 { 1e-4 } else { 1e-9 };
    check_linearity(op, 2, seed, lin_tol)?;
    let mut v = random_field(*op.grid(), seed);
    let n = v.norm_l2();
    v = v.scale(Complex::new(T::one() / n, T::zero()));
    let mut est = 0.0f64;
    let mut change = f64::INFINITY;
    for it in 1..=max_iter {
        let w = op.apply(&v);
        let next = w.norm_l2().to_f64_lossy();
        let u = op.apply_adjoint(&w);
        let un = u.norm_l2();
        if next == 0.0 || un == T::zero() {
            return Ok(OpNormResult {
                norm_estimate: 0.0,
                iterations: it,
                rel_change_at_stop: 0.0,
                converged: true,
                seed,
            });
        }
        change = (next - est).abs() / next;
        est = next;
        if change <= tol {
            return Ok(OpNormResult {
                norm_estimate: est,
                iterations: it,
                rel_change_at_stop: change,
                converged: true,
                seed,
            });
        }
        v = u.scale(Complex::new(T::one() / un, T::zero()));
    }
    Ok(OpNormResult { norm_estimate: est, iterations: max_iter, rel_change_at_stop: change, converged: false, seed })
}

/// Column-by-column matrix of a linear map on a small grid.
#[derive(Debug, Clone)]
pub struct DenseOp<T> {
    grid: TorusGrid<T>,
    /// Row-major `n × n`.
    m: Vec<Complex<T>>,
}

impl<T: Real> DenseOp<T> {
    pub const MAX_DIM: usize = 4096;

    pub fn from_op<L: LinearOp<T> + ?Sized>(op: &L) -> Result<Self> {
        let grid = *op.grid();
        let n = grid.len();
        if n > Self::MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "matrixization limited to {} unknowns, got {n}",
                Self::MAX_DIM
            )));
        }
        let cols: Vec<Vec<Complex<T>>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut e = Field2D::zeros(grid);
                e.data_mut()[k] = Complex::new(T::one(), T::zero());
                op.apply(&e).into_data()
            })
            .collect();
        let mut m = vec![Complex::new(T::zero(), T::zero()); n * n];
        for (k, col) in cols.iter().enumerate() {
            for (i, z) in col.iter().enumerate() {
                m[i * n + k] = *z;
            }
        }
        Ok(Self { grid, m })
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn entry(&self, i: usize, k: usize) -> Complex<T> {
        self.m[i * self.dim() + k]
    }
}

impl<T: Real> LinearOp<T> for DenseOp<T> {
    fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn apply(&self, f: &Field2D<T>) -> Field2D<T> {
        let n = self.dim();
        let x = f.data();
        let y = self
            .m
            .par_chunks(n)
            .map(|row| row.iter().zip(x).fold(Complex::new(T::zero(), T::zero()), |a, (m, v)| a + m * v))
            .collect();
        Field2D::from_vec_unchecked(self.grid, y)
    }

    fn apply_adjoint(&self, g: &Field2D<T>) -> Field2D<T> {
        let n = self.dim();
        let x = g.data();
        let y = (0..n)
            .into_par_iter()
            .map(|k| (0..n).fold(Complex::new(T::zero(), T::zero()), |a, i| a + self.m[i * n + k].conj() * x[i]))
            .collect();
        Field2D::from_vec_unchecked(self.grid, y)
    }
}
