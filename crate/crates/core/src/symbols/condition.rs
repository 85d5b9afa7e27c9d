use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bmo_parabolic, frac_diff, max_bmo_depth, AxisPeriod, FracDiff, SymbolA};
use crate::error::{Error, Result};
use crate::geometry::ParaPoint;
use crate::grid::{translate, TorusGrid};
use crate::scalar::{lit, Real};

fn sampling_box<T: Real>(a: &SymbolA<T>) -> (f64, f64) {
    let half = |p: AxisPeriod<T>| match p {
        AxisPeriod::Period(p) => p.to_f64_lossy() / 2.0,
        _ => 4.0,
    };
    match (a.periods(), a.sampled_field()) {
        (Some([p1, p2]), _) => (half(p1), half(p2)),
        (None, Some(f)) => (f.grid().l1().to_f64_lossy(), f.grid().l2().to_f64_lossy()),
        (None, None) => (4.0, 4.0),
    }
}

/// Lower estimate of the least `B₀` with `|A(x+h) − A(x)| ≤ B₀ r` whenever
/// `|h1| ≤ r`, `|h2| ≤ r²`.
///
/// For each `r` and each of `n_samples` random base points, tests the eight
/// box corners and edge midpoints plus one uniform random `h`.
pub fn lip_half_seminorm<T: Real>(a: &SymbolA<T>, n_samples: usize, r_set: &[T], seed: u64) -> Result<T> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    if r_set.iter().any(|r| !(*r > T::zero())) {
        return Err(Error::InvalidArgument("scales must be positive".into()));
    }
    let (b1, b2) = sampling_box(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = T::zero();
    for &r in r_set {
        let r64 = r.to_f64_lossy();
        let r2 = r64 * r64;
        let fixed =
            [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
        for _ in 0..n_samples {
            let x = ParaPoint::new(lit::<T>(rng.gen_range(-b1..b1)), lit::<T>(rng.gen_range(-b2..b2)));
            let ax = a.eval(x);
            let random = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            for (u, v) in fixed.iter().copied().chain(std::iter::once(random)) {
                let h = ParaPoint::new(lit::<T>(u * r64), lit::<T>(v * r2));
                best = best.max((a.eval(x + h) - ax).abs() / r);
            }
        }
    }
    Ok(best)
}

/// Constants of the two-part sufficient condition on `A`, plus the
/// `Lip_{1,1/2}` estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub name: String,
    /// Estimated `Lip_{1,1/2}` constant.
    pub lip_half: f64,
    /// `sup |A(x1 + h, x2) − A(x)| / |h|` over grid points and shifts.
    pub sup_dx1: f64,
    /// Parabolic BMO surrogate of `𝔻₂ A`.
    pub bmo_d2a: f64,
    pub n_lip_samples: usize,
    pub n_shifts: usize,
    pub bmo_depth: u32,
    pub grid: (f64, f64, usize, usize),
    pub seed: u64,
}

impl ConditionReport {
    pub const CSV_HEADER: &'static str = "name,lip_half,sup_dx1,bmo_d2a,grid,seed";

    pub fn csv_row(&self) -> String {
        let (l1, l2, n1, n2) = self.grid;
        format!(
            "{},{:.12e},{:.12e},{:.12e},{}x{}@{}x{},{}",
            self.name, self.lip_half, self.sup_dx1, self.bmo_d2a, n1, n2, l1, l2, self.seed
        )
    }
}

const LIP_SAMPLES: usize = 400;
const CHECK_SEED: u64 = 0x17;

/// Evaluates the report for `A` on `grid`.
///
/// `bmo_d2a` needs `A` sampled on the grid; symbols that do not depend on
/// `x2` get `𝔻₂A = 0` without sampling, which covers `linear_x1`.
pub fn check_symbol_conditions<T: Real>(a: &SymbolA<T>, grid: &TorusGrid<T>) -> Result<ConditionReport> {
    let periodic = a.is_periodic_on(grid);
    let shifts: Vec<T> = (-3..=3)
        .flat_map(|k| {
            let h = grid.h1() * lit::<T>(2f64.powi(k));
            [h, -h]
        })
        .collect();
    let base: Vec<T> = a.values_shifted(grid, ParaPoint::origin());
    let sampled = if periodic { Some(a.sample(grid)?) } else { None };
    let mut sup_dx1 = T::zero();
    for &h in &shifts {
        let d = ParaPoint::new(h, T::zero());
        let moved: Vec<T> = match &sampled {
            Some(f) => translate(f, -d).real_part(),
            None => a.values_shifted(grid, d),
        };
        for (x, y) in base.iter().zip(&moved) {
            sup_dx1 = sup_dx1.max((*y - *x).abs() / h.abs());
        }
    }

    let depth = max_bmo_depth(grid).clamp(1, 3);
    let bmo_d2a = match &sampled {
        Some(f) => bmo_parabolic(&frac_diff(f, FracDiff::Partial), depth)?,
        None => match a.periods() {
            Some([_, AxisPeriod::Constant]) => T::zero(),
            _ => return Err(Error::NonPeriodic(a.name().to_string())),
        },
    };

    let top = grid.l1().min(grid.l2().sqrt()).to_f64_lossy();
    let r_set: Vec<T> = (0..6).map(|k| lit::<T>(top * 2f64.powi(-k))).collect();
    let lip_half = lip_half_seminorm(a, LIP_SAMPLES, &r_set, CHECK_SEED)?;

    Ok(ConditionReport {
        name: a.name().to_string(),
        lip_half: lip_half.to_f64_lossy(),
        sup_dx1: sup_dx1.to_f64_lossy(),
        bmo_d2a: bmo_d2a.to_f64_lossy(),
        n_lip_samples: LIP_SAMPLES * r_set.len(),
        n_shifts: shifts.len(),
        bmo_depth: depth,
        grid: (grid.l1().to_f64_lossy(), grid.l2().to_f64_lossy(), grid.n1(), grid.n2()),
        seed: CHECK_SEED,
    })
}
