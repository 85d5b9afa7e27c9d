use num_complex::Complex;

use crate::grid::{Field2D, MultiplierSpec};
use crate::scalar::Real;

/// Which parabolic fractional derivative to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracDiff {
    /// Symbol `√(ξ1² − i ξ2)`.
    Full,
    /// Symbol `ξ2 / √(ξ1² − i ξ2)`.
    Partial,
}

/// Principal branch (`Re ≥ 0`), value 0 at the origin.
pub fn frac_diff_symbol<T: Real>(which: FracDiff) -> MultiplierSpec<T> {
    let zero = Complex::new(T::zero(), T::zero());
    match which {
        FracDiff::Full => MultiplierSpec::new(|a: T, b: T| Complex::new(a * a, -b).sqrt(), zero),
        FracDiff::Partial => {
            MultiplierSpec::new(|a: T, b: T| Complex::new(b, T::zero()) / Complex::new(a * a, -b).sqrt(), zero)
        }
    }
}

pub fn frac_diff<T: Real>(a: &Field2D<T>, which: FracDiff) -> Field2D<T> {
    frac_diff_symbol(which).tabulate(a.grid()).expect("fractional symbols are finite off the origin").apply(a)
}
