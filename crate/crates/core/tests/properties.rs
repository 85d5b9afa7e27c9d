use approx::{assert_abs_diff_eq, assert_relative_eq};
use num_complex::Complex;
use proptest::prelude::*;

use paracomm::experiments::{random_field, DecayFit};
use paracomm::geometry::{dilate, from_polar, gamma, pnorm, to_polar, ParaCube, ParaPoint};
use paracomm::grid::{apply_multiplier, eta, translate, Field2D, MultiplierSpec, TorusGrid};
use paracomm::operators::{
    commutator_t, dyadic_tj, hilbert_along, hom_extend, t0_single, CurveOpSpec, HomKernelProfile, Side,
};
use paracomm::oscillatory::m_xi;
use paracomm::regularity::{phi_inverse, phi_map, sh_th};
use paracomm::symbols::{bmo_parabolic, frac_diff, make_symbol, FracDiff, SymbolA, SymbolParams};

fn grid16() -> TorusGrid<f64> {
    TorusGrid::square(std::f64::consts::PI, std::f64::consts::PI, 16).unwrap()
}

fn point() -> impl Strategy<Value = ParaPoint<f64>> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| ParaPoint::new(a, b))
}

fn symbol_name() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("sine_x1"), Just("sine_x2"), Just("mixed"), Just("random_bandlimited")]
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg(256))]

    #[test]
    fn pnorm_is_homogeneous(p in point(), rho in 0.01f64..100.0) {
        let lhs = pnorm(dilate(p, rho).unwrap());
        assert_relative_eq!(lhs, rho * pnorm(p), max_relative = 1e-12);
    }

    #[test]
    fn cube_volume_is_cubic(r in 0.01f64..50.0) {
        let c = ParaCube::new(0.0, 0.0, r).unwrap();
        let (w1, w2) = c.half_widths();
        assert_relative_eq!(4.0 * w1 * w2, r * r * r, max_relative = 1e-14);
        assert_relative_eq!(c.volume(), r * r * r, max_relative = 1e-14);
    }

    #[test]
    fn polar_roundtrip(p in point()) {
        prop_assume!(!p.is_origin());
        let q = from_polar(&to_polar(p).unwrap());
        assert_abs_diff_eq!(q.x1, p.x1, epsilon = 1e-12 * (1.0 + p.x1.abs()));
        assert_abs_diff_eq!(q.x2, p.x2, epsilon = 1e-12 * (1.0 + p.x2.abs()));
    }

    #[test]
    fn hom_extend_scales(p in point(), k in -3i32..=3) {
        prop_assume!(p.x2 > 0.05);
        let prof = HomKernelProfile::<f64>::heat();
        let rho = 2f64.powi(k);
        let lhs = hom_extend(&prof, dilate(p, rho).unwrap()).unwrap();
        let rhs = rho.powi(-4) * hom_extend(&prof, p).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-300);
    }

    #[test]
    fn eta_partition(t in 0.01f64..100.0) {
        let s: f64 = (-12..=12).map(|j| eta(t / 2f64.powi(j))).sum();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn multiplier_conjugate_symmetry(xi1 in -200.0f64..200.0, xi2 in -200.0f64..200.0) {
        let (a, b) = (m_xi(xi1, xi2), m_xi(-xi1, -xi2));
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, -b.im, epsilon = 1e-12);
        prop_assert!(a.norm() <= 1.5 + 1e-12);
    }

    #[test]
    fn phi_inverse_roundtrip(w in point(), a in 0.5f64..2.0, b in 0.5f64..2.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let (s, t) = if a > b { (a, b) } else { (b, a) };
        let y = phi_map(w, s, t);
        let st = phi_inverse(w, y).unwrap().unwrap();
        let back = phi_map(w, st.s, st.t);
        assert_abs_diff_eq!(back.x1, y.x1, epsilon = 1e-12);
        assert_abs_diff_eq!(back.x2, y.x2, epsilon = 1e-12);
    }

    #[test]
    fn shifted_pair_identity_and_independence(
        x in point(), a in 0.5f64..2.0, b in 0.5f64..2.0, u in -1.0f64..1.0, v in -1.0f64..1.0, k in 3i32..7
    ) {
        prop_assume!((a - b).abs() > 0.1);
        let (s, t) = if a > b { (a, b) } else { (b, a) };
        let zero = sh_th(s, t, ParaPoint::origin()).unwrap();
        prop_assert_eq!((zero.s, zero.t), (s, t));
        let lam = 10f64.powi(-k);
        let h = ParaPoint::new(u * lam, v * lam * lam);
        let p = sh_th(s, t, h).unwrap();
        let q = phi_inverse(x, phi_map(x + h, s, t)).unwrap().unwrap();
        assert_abs_diff_eq!(p.s, q.s, epsilon = 1e-11);
        assert_abs_diff_eq!(p.t, q.t, epsilon = 1e-11);
        let lhs = gamma(p.s) - gamma(p.t);
        let rhs = h + gamma(s) - gamma(t);
        assert_abs_diff_eq!(lhs.x1, rhs.x1, epsilon = 1e-13);
        assert_abs_diff_eq!(lhs.x2, rhs.x2, epsilon = 1e-12);
    }

    #[test]
    fn decay_fit_is_exact_on_power_laws(eps in -2.0f64..2.0, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = (1..=6).map(|k| { let s = 2f64.powi(-k); (s, c * s.powf(eps)) }).collect();
        let fit = DecayFit::from_scales(&pts).unwrap();
        assert_abs_diff_eq!(fit.exponent, eps, epsilon = 1e-10);
        prop_assert!(fit.r_squared > 1.0 - 1e-10);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn multiplier_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid16();
        let m = MultiplierSpec::continuous(|x: f64, y: f64| Complex::new((x * 0.3).cos(), y.sin() * 0.2));
        let (f, h) = (random_field(g, s1), random_field(g, s2));
        let (ca, cb) = (Complex::new(a, 0.0), Complex::new(b, 0.0));
        let lhs = apply_multiplier(&f.zip_with(&h, |p, q| ca * p + cb * q), &m).unwrap();
        let (mf, mh) = (apply_multiplier(&f, &m).unwrap(), apply_multiplier(&h, &m).unwrap());
        let rhs = mf.zip_with(&mh, |p, q| ca * p + cb * q);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn frac_diff_commutes_with_translation(seed in any::<u64>(), d1 in -2.0f64..2.0, d2 in -2.0f64..2.0) {
        let g = grid16();
        let f = random_field(g, seed);
        let d = ParaPoint::new(d1, d2);
        let lhs = frac_diff(&translate(&f, d), FracDiff::Full);
        let rhs = translate(&frac_diff(&f, FracDiff::Full), d);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.norm_sup()));
    }

    #[test]
    fn bmo_shift_and_scale(seed in any::<u64>(), c in -5.0f64..5.0, alpha in -4.0f64..4.0) {
        let g = TorusGrid::square(std::f64::consts::PI, std::f64::consts::PI, 64).unwrap();
        let b = Field2D::from_vec(g, random_field(g, seed).data().iter().map(|z| Complex::new(z.re, 0.0)).collect()).unwrap();
        let base = bmo_parabolic(&b, 2).unwrap();
        let shifted = bmo_parabolic(&b.map(|z| z + Complex::new(c, 0.0)), 2).unwrap();
        assert_relative_eq!(shifted, base, max_relative = 1e-12);
        let scaled = bmo_parabolic(&b.scale(Complex::new(alpha, 0.0)), 2).unwrap();
        assert_relative_eq!(scaled, alpha.abs() * base, max_relative = 1e-12);
    }

    #[test]
    fn commutator_is_additive_in_symbol(x in symbol_name(), y in symbol_name(), seed in any::<u64>()) {
        let g = grid16();
        let p = SymbolParams::for_grid(&g);
        let (a, b) = (make_symbol::<f64>(x, &p).unwrap(), make_symbol::<f64>(y, &p).unwrap());
        let sum = {
            let periods = a.periods().unwrap();
            let (a, b) = (a.clone(), b.clone());
            SymbolA::closed("sum", move |z| a.eval(z) + b.eval(z), periods)
        };
        let f = random_field(g, seed);
        let spec = CurveOpSpec::default();
        let lhs = commutator_t(&sum, &f, &spec).unwrap();
        let rhs = &commutator_t(&a, &f, &spec).unwrap() + &commutator_t(&b, &f, &spec).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.norm_sup()));
    }

    #[test]
    fn single_scale_duality(name in symbol_name(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let g = grid16();
        let a = make_symbol::<f64>(name, &SymbolParams::for_grid(&g)).unwrap();
        let (f, h) = (random_field(g, s1), random_field(g, s2));
        let spec = CurveOpSpec::default();
        let lhs = t0_single(&a, &f, Side::Forward, &spec).unwrap().inner(&h);
        let rhs = f.inner(&t0_single(&a, &h, Side::Adjoint, &spec).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn linear_symbol_is_hilbert(seed in any::<u64>(), eps_k in 4i32..8) {
        let g = grid16();
        let a = make_symbol::<f64>("linear_x1", &SymbolParams::default()).unwrap();
        let f = random_field(g, seed);
        let spec = CurveOpSpec { epsilon: 2f64.powi(-eps_k), ..CurveOpSpec::default() };
        let lhs = commutator_t(&a, &f, &spec).unwrap();
        let rhs = hilbert_along(&f, &spec).unwrap();
        prop_assert!(lhs.rel_l2_error(&rhs) <= 1e-12);
    }

    #[test]
    fn dyadic_piece_ignores_window(name in symbol_name(), seed in any::<u64>(), j in -1i32..=1) {
        let g = grid16();
        let a = make_symbol::<f64>(name, &SymbolParams::for_grid(&g)).unwrap();
        let f = random_field(g, seed);
        let narrow = CurveOpSpec::default();
        let wide = CurveOpSpec { epsilon: 1e-3, r_max: 50.0, ..narrow };
        let x = dyadic_tj(&a, &f, j, &narrow).unwrap();
        let y = dyadic_tj(&a, &f, j, &wide).unwrap();
        prop_assert_eq!(x.data(), y.data());
    }
}
