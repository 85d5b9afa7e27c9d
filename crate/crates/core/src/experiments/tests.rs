use nalgebra::DMatrix;
use num_complex::Complex;

use super::*;
use crate::geometry::ParaPoint;
use crate::grid::{Field2D, SymbolTable, TorusGrid};
use crate::operators::{BracketOp, CurveOpSpec, IdentityOp, LinearOp, MultiplierOp};
use crate::symbols::{make_symbol, SymbolParams};

fn small_grid() -> TorusGrid<f64> {
    TorusGrid::square(std::f64::consts::PI, std::f64::consts::PI, 16).unwrap()
}

#[test]
fn identity_has_unit_norm() {
    let g = TorusGrid::square(1.0, 1.0, 32).unwrap();
    let r = opnorm_power(&IdentityOp { grid: g }, 1e-6, 500, 1).unwrap();
    assert!((r.norm_estimate - 1.0).abs() < 1e-6, "{r:?}");
}

#[test]
fn diagonal_multiplier_norm() {
    let g = small_grid();
    let t =
        SymbolTable::from_fn(&g, |a, b| Complex::new(1.0 + 2.0 * (a * a + b * b).sqrt().sin().powi(2), 0.0)).unwrap();
    let max = t.max_modulus();
    let r = opnorm_power(&MultiplierOp::new(t), 1e-10, 2000, 2).unwrap();
    assert!((r.norm_estimate - max).abs() < 1e-4 * max, "{} vs {max}", r.norm_estimate);
    let t3 = SymbolTable::from_fn(&g, |a, _| Complex::new(if a == 0.0 { 3.0 } else { 1.0 }, 0.0)).unwrap();
    let r3 = opnorm_power(&MultiplierOp::new(t3), 1e-10, 2000, 2).unwrap();
    assert!((r3.norm_estimate - 3.0).abs() < 1e-4, "{r3:?}");
}

#[test]
fn nonlinear_map_is_rejected() {
    struct Square(TorusGrid<f64>);
    impl LinearOp<f64> for Square {
        fn grid(&self) -> &TorusGrid<f64> {
            &self.0
        }
        fn apply(&self, f: &Field2D<f64>) -> Field2D<f64> {
            f.map(|z| z * z)
        }
        fn apply_adjoint(&self, g: &Field2D<f64>) -> Field2D<f64> {
            g.clone()
        }
    }
    assert!(opnorm_power(&Square(small_grid()), 1e-6, 10, 1).is_err());
}

#[test]
fn matrixization_agrees_with_operator_and_svd() {
    let g = small_grid();
    let a = make_symbol::<f64>("mixed", &SymbolParams::for_grid(&g)).unwrap();
    let op = BracketOp::commutator(&a, &g, &CurveOpSpec::default()).unwrap();
    let dense = DenseOp::from_op(&op).unwrap();
    let f = random_field(g, 3);
    assert!(dense.apply(&f).max_abs_diff(&op.apply(&f)) < 1e-10);
    assert!(dense.apply_adjoint(&f).max_abs_diff(&op.apply_adjoint(&f)) < 1e-10);
    let by_op = opnorm_power(&op, 1e-10, 5000, 4).unwrap().norm_estimate;
    let by_dense = opnorm_power(&dense, 1e-10, 5000, 4).unwrap().norm_estimate;
    assert!((by_op - by_dense).abs() < 1e-4 * by_op, "{by_op} vs {by_dense}");
    let n = dense.dim();
    let m = DMatrix::from_fn(n, n, |i, k| {
        let z = dense.entry(i, k);
        nalgebra::Complex::new(z.re, z.im)
    });
    let top = m.singular_values().max();
    assert!((by_op - top).abs() < 1e-4 * top, "{by_op} vs svd {top}");
}

#[test]
fn decay_fit_recovers_power_law() {
    let pts: Vec<(f64, f64)> = (1..=5).map(|k| (2f64.powi(-k), 3.0 * 2f64.powi(-k).powf(0.4))).collect();
    let fit = DecayFit::from_scales(&pts).unwrap();
    assert!((fit.exponent - 0.4).abs() < 1e-12 && (fit.r_squared - 1.0).abs() < 1e-12);
    assert!(DecayFit::fit(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).is_err());
}

#[test]
fn qs_decay_constant_symbol_is_degenerate() {
    let g = TorusGrid::square(4.0, 4.0, 32).unwrap();
    let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
    let s: Vec<f64> = (1..=5).map(|k| 2f64.powi(-k)).collect();
    let d = qs_tj_decay(&c, 0, &s, &g, 16, 1).unwrap();
    assert!(d.is_degenerate());
    assert!(d.rows.iter().all(|r| r.norm.norm_estimate == 0.0));
    assert!(qs_tj_decay(&c, 0, &[2.0], &g, 16, 1).is_err());
}

#[test]
fn qs_norm_is_bounded_by_modal_symbol() {
    let g = TorusGrid::square(4.0, 4.0, 32).unwrap();
    let t = crate::operators::q_smooth_symbol(&g, 0.25).unwrap();
    let r = opnorm_power(&MultiplierOp::new(t.clone()), 1e-10, 3000, 5).unwrap();
    assert!(r.norm_estimate > 0.0 && r.norm_estimate <= 1.0);
    assert!((r.norm_estimate - t.max_modulus()).abs() < 1e-4 * t.max_modulus());
}

#[test]
fn wbp_constant_and_linear() {
    let base = TorusGrid::new(3.0, 4.0, 64, 64).unwrap();
    let spec = CurveOpSpec { epsilon: 1.0 / 64.0, r_max: 1.5, ..CurveOpSpec::default() };
    let rs = [0.25, 0.5, 1.0, 2.0, 4.0];
    let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
    assert!(wbp_sweep(&c, &rs, &base, &spec, ParaPoint::origin()).unwrap().iter().all(|r| r.ratio == 0.0));
    let l = make_symbol::<f64>("linear_x1", &SymbolParams::default()).unwrap();
    let rows = wbp_sweep(&l, &rs, &base, &spec, ParaPoint::origin()).unwrap();
    let (lo, hi) = rows.iter().fold((f64::MAX, 0.0f64), |(a, b), r| (a.min(r.ratio), b.max(r.ratio)));
    assert!(lo > 0.0 && hi / lo - 1.0 < 1e-2, "{rows:?}");
}

#[test]
fn t1_oscillation_trivial_cases() {
    let g = TorusGrid::new(8.0, 12.0, 64, 64).unwrap();
    let spec = CurveOpSpec { r_max: 2.5, ..CurveOpSpec::default() };
    let cube = crate::geometry::ParaCube::new(0.3, -0.2, 1.0).unwrap();
    let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
    assert_eq!(t1_oscillation(&c, &cube, &g, &spec).unwrap(), 0.0);
    let a = make_symbol::<f64>("sine_x1", &SymbolParams::default()).unwrap();
    let shifted = crate::symbols::SymbolA::closed(
        "sine_plus_3",
        |x: ParaPoint<f64>| (x.x1).sin() + 3.0,
        [crate::symbols::AxisPeriod::Period(2.0 * std::f64::consts::PI), crate::symbols::AxisPeriod::Constant],
    );
    let (u, v) = (t1_oscillation(&a, &cube, &g, &spec).unwrap(), t1_oscillation(&shifted, &cube, &g, &spec).unwrap());
    assert!(u > 0.0 && (u - v).abs() < 1e-12 * u.max(1.0), "{u} vs {v}");
}

#[test]
fn sigma_sweep_constant_is_zero() {
    let g = small_grid();
    let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
    let sw = sigma_uniformity(&c, 16, &CurveOpSpec::default(), &g, 1).unwrap();
    assert!(sw.rows.iter().all(|r| r.norm.norm_estimate == 0.0));
    assert_eq!(sw.max_over_median(), 0.0);
    assert!(sigma_uniformity(&c, 8, &CurveOpSpec::default(), &g, 1).is_err());
}

#[test]
fn rotations_compare_constant_is_zero() {
    let g = TorusGrid::new(2.5, 4.5, 32, 32).unwrap();
    let c = make_symbol::<f64>("constant", &SymbolParams::default()).unwrap();
    let f = Field2D::from_real_fn(g, |p| (std::f64::consts::PI * p.x1 / 2.5).cos());
    let w = crate::operators::RadialWindow {
        inner: 1.0,
        outer: 2.0,
        taper: 0.25,
        excision: crate::operators::Excision::Polar,
        sub_samples: 1,
    };
    let r = rotations_vs_direct(&c, &f, &crate::operators::HomKernelProfile::smooth(), &w, 16, 8).unwrap();
    assert_eq!(r.rel_error, 0.0);
}

#[test]
fn runs_are_reproducible() {
    let g = small_grid();
    let a = make_symbol::<f64>("sine_x1", &SymbolParams::for_grid(&g)).unwrap();
    let op = BracketOp::commutator(&a, &g, &CurveOpSpec::default()).unwrap();
    let x = opnorm_power(&op, 1e-6, 500, 9).unwrap();
    let y = opnorm_power(&op, 1e-6, 500, 9).unwrap();
    assert_eq!(x, y);
}

#[test]
fn odd_partner_stays_in_class() {
    let g = TorusGrid::new(3.0, 4.0, 64, 64).unwrap();
    let x0 = ParaPoint::new(0.4, 0.1);
    let phi = crate::grid::build_phi_class(&crate::grid::BumpSpec::new(x0, 1.0).unwrap(), &g).unwrap();
    let psi = odd_partner(&phi, x0, 1.0);
    let rep = crate::grid::phi_class_check(&psi, x0, 1.0).unwrap();
    assert!(rep.passes(), "{rep:?}");
}
