//! Mean oscillation over a dyadic family of parabolic boxes on the torus.
//!
//! Level `ℓ` uses boxes of scale `r = r0 / 2^ℓ` (`r × r²`), with
//! `r0 = min(2 L1, √(2 L2))`. Box corners sit on the lattice
//! `(−L1 + a r, −L2 + b r²)` and on the same lattice shifted by half a box in
//! either or both axes; boxes wrap around the torus.

use crate::error::{Error, Result};
use crate::grid::{Field2D, TorusGrid};
use crate::scalar::Real;

fn root_scale<T: Real>(grid: &TorusGrid<T>) -> f64 {
    let (l1, l2) = (grid.l1().to_f64_lossy(), grid.l2().to_f64_lossy());
    (2.0 * l1).min((2.0 * l2).sqrt())
}

fn widths<T: Real>(grid: &TorusGrid<T>, level: u32) -> (usize, usize, f64) {
    let r = root_scale(grid) / 2f64.powi(level as i32);
    let w1 = (r / grid.h1().to_f64_lossy()).round() as usize;
    let w2 = (r * r / grid.h2().to_f64_lossy()).round() as usize;
    (w1, w2, r)
}

/// Deepest level at which every box still spans ≥ 4 samples per axis.
pub fn max_bmo_depth<T: Real>(grid: &TorusGrid<T>) -> u32 {
    let mut d = 0;
    while {
        let (w1, w2, _) = widths(grid, d + 1);
        w1 >= 4 && w2 >= 4
    } {
        d += 1;
    }
    d
}

fn starts(n: usize, w: usize, shift: usize) -> Vec<usize> {
    let count = n.div_ceil(w);
    (0..count).map(|a| (a * w + shift) % n).collect()
}

/// `max_I (1/|I|) Σ_{x∈I} |b(x) − m_I b|` over levels `0..=depth`.
///
/// Samples are differenced against the first sample of each box before
/// averaging, so constant fields give exactly 0.
pub fn bmo_parabolic<T: Real>(b: &Field2D<T>, depth: u32) -> Result<T> {
    if depth < 1 {
        return Err(Error::InvalidArgument("depth must be ≥ 1".into()));
    }
    let grid = *b.grid();
    let (n1, n2) = (grid.n1(), grid.n2());
    let data = b.data();
    let mut best = T::zero();
    for level in 0..=depth {
        let (w1, w2, r) = widths(&grid, level);
        if w1 < 4 || w2 < 4 {
            return Err(Error::UnderResolved(format!("boxes of scale {r} span {w1} × {w2} samples at level {level}")));
        }
        let (w1, w2) = (w1.min(n1), w2.min(n2));
        let inv = T::one() / T::from_usize_lossy(w1 * w2);
        for (s1, s2) in [(0, 0), (w1 / 2, 0), (0, w2 / 2), (w1 / 2, w2 / 2)] {
            for &i0 in &starts(n1, w1, s1) {
                for &j0 in &starts(n2, w2, s2) {
                    let base = data[grid.index(i0, j0)];
                    let idx = |a: usize, c: usize| grid.index((i0 + a) % n1, (j0 + c) % n2);
                    let mut sum = num_complex::Complex::new(T::zero(), T::zero());
                    for a in 0..w1 {
                        for c in 0..w2 {
                            sum = sum + (data[idx(a, c)] - base);
                        }
                    }
                    let mean = sum * inv;
                    let mut osc = T::zero();
                    for a in 0..w1 {
                        for c in 0..w2 {
                            osc = osc + (data[idx(a, c)] - base - mean).norm();
                        }
                    }
                    best = best.max(osc * inv);
                }
            }
        }
    }
    Ok(best)
}
