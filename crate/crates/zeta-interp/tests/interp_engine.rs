use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use zeta_interp::analytic_nt::{first_zeros, ZeroTable};
use zeta_interp::dirichlet_kernels::contour_residue;
use zeta_interp::interp_engine::*;
use zeta_interp::modforms::Sign;
use zeta_interp::quad::adaptive;

fn zeros() -> ZeroTable {
    first_zeros(101).unwrap()
}

fn fns() -> Vec<TestFunction> {
    vec![
        TestFunction::gaussian(20.0).unwrap(),
        TestFunction::modulated_gaussian(12.0, 0.3).unwrap(),
        TestFunction::mixture(vec![(1.0, 10.0), (-0.5, 25.0)]).unwrap(),
    ]
}

#[test]
fn fourier_transform_round_trip() {
    for f in fns() {
        let r = f.support_radius(1e-18);
        for xi in [0.0, 0.013, 0.05, -0.08, 0.2] {
            let mut g = |x: f64| f.f(C::new(x, 0.0)) * C::from_polar(1.0, -2.0 * PI * x * xi);
            let q = adaptive(&mut g, -r, r, 1e-12, 20, 20);
            let exact = f.fhat(C::new(xi, 0.0));
            assert!((q.value - exact).norm() < 1e-8, "{:?} ξ={xi}: {} vs {}", f.kind, q.value, exact);
        }
    }
}

#[test]
fn decay_certificate_covers_the_strip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in fns() {
        let cert = f.certificate;
        for _ in 0..400 {
            let x: f64 = rng.gen_range(-200.0..200.0);
            let y: f64 = rng.gen_range(-cert.strip..cert.strip);
            let v = f.f(C::new(x, y)).norm() * (1.0 + x.abs()).powi(2);
            assert!(v <= cert.c, "{:?} at {x}+{y}i: {v} > {}", f.kind, cert.c);
        }
    }
}

#[test]
fn test_function_parsing() {
    assert_eq!(TestFunction::parse("gaussian:20").unwrap(), TestFunction::gaussian(20.0).unwrap());
    assert_eq!(TestFunction::parse("modgauss:10,0.5").unwrap(), TestFunction::modulated_gaussian(10.0, 0.5).unwrap());
    for bad in ["gaussian:-1", "gaussian", "cauchy:2", "gaussian:x", "modgauss:1"] {
        assert!(TestFunction::parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn operator_identity_three_ways() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let pts = zero_points(&zs, 40).unwrap();
    let s = C::new(0.5, 0.3);
    let r = r_operator(&f, s, Sign::Plus, 3.0, 400, &pts).unwrap();
    let d = r.dirichlet_vs_residue();
    assert!(d <= 1e-3 && d <= r.envelope() + 1e-12, "{r:?}");
    assert!((r.line.value - r.dirichlet.value).norm() <= r.line.err + r.dirichlet.err + 1e-10, "{r:?}");
    assert!(r.envelope() < 1e-3);
}

#[test]
fn operator_rejects_invalid_configurations() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let s = C::new(0.5, 0.3);
    assert!(r_line_integral(&f, s, Sign::Plus, 2.0).is_err());
    assert!(r_line_integral(&f, C::new(3.5, 0.0), Sign::Plus, 3.0).is_err());
    assert!(r_operator(&f, s, Sign::Minus, 3.0, 10, &[]).is_err());
}

#[test]
fn reconstruction_residual_trend() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let res: Vec<f64> =
        [10, 20, 40].iter().map(|&t| (theorem1_rhs(&f, C::new(0.0, 0.0), 400, t, &zs).unwrap().value - f.f(C::new(0.0, 0.0))).norm()).collect();
    for w in res.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{res:?}");
    }
    assert!(res[2] < 1e-8, "{res:?}");
}

#[test]
fn reconstruction_at_first_zero_node() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let z = C::new(zs.ordinates[0], 0.0);
    let r = theorem1_rhs(&f, z, 100, 5, &zs).unwrap();
    assert!(r.u_part.norm() < 1e-6, "{r:?}");
    assert!((r.value - f.f(z)).norm() < 1e-5, "{r:?} vs {}", f.f(z));
}

#[test]
fn dropped_u_terms_stay_below_envelope() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let z = C::new(0.3, 0.1);
    let a = theorem1_rhs(&f, z, 400, 10, &zs).unwrap();
    let b = theorem1_rhs(&f, z, 6, 10, &zs).unwrap();
    assert!((a.value - b.value).norm() <= b.u_tail, "{} vs {}", (a.value - b.value).norm(), b.u_tail);
    assert!(theorem1_rhs(&f, C::new(0.0, 0.5), 10, 10, &zs).is_err());
}

#[test]
fn theorem1_heights_sit_between_zeros() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let r = theorem1_rhs(&f, C::new(0.0, 0.0), 10, 3, &zs).unwrap();
    assert!(zs.ordinates[2] < r.t && r.t < zs.ordinates[3]);
}

#[test]
fn choose_tk_picks_widest_gap() {
    let zs = zeros();
    let t = choose_tk(&zs, 4).unwrap();
    assert!((16.0..=32.0).contains(&t));
    let g = &zs.ordinates;
    let i = g.iter().position(|&x| x > t).unwrap();
    let gap = g[i] - g[i - 1];
    let widest = g
        .windows(2)
        .filter(|p| (16.0..=32.0).contains(&(0.5 * (p[0] + p[1]))))
        .map(|p| p[1] - p[0])
        .fold(0.0, f64::max);
    assert!((gap - widest).abs() < 1e-12);
    assert!(t - g[i - 1] >= 0.5 * widest - 1e-12 && g[i] - t >= 0.5 * widest - 1e-12);
    assert!(g.iter().all(|&x| (x - t).abs() > 1e3 * zs.precision));
    assert!(choose_tk(&zs, 8).is_err());
}

#[test]
fn gap_heights_avoid_small_zeta() {
    let zs = zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut wins = 0;
    let trials = 10;
    for _ in 0..trials {
        let k = rng.gen_range(4..7);
        let t = choose_tk(&zs, k).unwrap();
        let (lo, hi) = (2f64.powi(k as i32), 2f64.powi(k as i32 + 1));
        let other = loop {
            let u: f64 = rng.gen_range(lo..hi);
            if (u - t).abs() > 1.0 {
                break u;
            }
        };
        if zeta_segment_min(t).unwrap() > zeta_segment_min(other).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 9, "{wins}/{trials}");
}

#[test]
fn explicit_formula_flagship() {
    let f = TestFunction::gaussian(20.0).unwrap();
    let zs = zeros();
    let r100 = riemann_weil(&f, &zs, 100, 100_000).unwrap();
    assert!(r100.residual <= 1e-5 && !r100.inconclusive, "{r100:?}");
    let r50 = riemann_weil(&f, &zs, 50, 100_000).unwrap();
    assert!(r100.residual <= r50.residual + 1e-12);
    assert!(r100.residual <= r100.envelope);
}

#[test]
fn explicit_formula_zero_tail_model() {
    let f = TestFunction::gaussian(30.0).unwrap();
    let zs = zeros();
    let mut last = f64::INFINITY;
    for count in [2, 4, 8, 16] {
        let r = riemann_weil(&f, &zs, count, 100_000).unwrap();
        let model: f64 = zs.ordinates[count..].iter().map(|&g| 2.0 * f.f(C::new(g, 0.0)).re).sum();
        assert!((r.residual - model).abs() <= 1e-9 + 1e-6 * model, "count {count}: {} vs {model}", r.residual);
        assert!(r.residual <= r.zero_tail);
        assert!(r.residual < last);
        last = r.residual;
    }
}

#[test]
fn explicit_formula_is_reflection_invariant() {
    let zs = zeros();
    let a = riemann_weil(&TestFunction::modulated_gaussian(15.0, 0.2).unwrap(), &zs, 100, 10_000).unwrap();
    let b = riemann_weil(&TestFunction::modulated_gaussian(15.0, -0.2).unwrap(), &zs, 100, 10_000).unwrap();
    assert!((a.lhs - b.lhs).norm() < 1e-14 && (a.rhs - b.rhs).norm() < 1e-14);
    assert!(a.residual < 1e-5);
}

#[test]
fn w_functional_on_basis() {
    let zs = zeros();
    let w = w_on_basis(&[Basis::V(zs.ordinates[0]), Basis::U(3), Basis::U(4)]).unwrap();
    assert!((w[0].value - 2.0).norm() < 1e-3, "{:?}", w[0]);
    assert!(w[1].value.norm() < 1e-4, "{:?}", w[1]);
    let (literal, alternative) = w_u_candidates(4).unwrap();
    let (dl, da) = ((w[2].value.re - literal).abs(), (w[2].value.re - alternative).abs());
    assert!(da < 1e-4 && dl > 1e-2, "W U_4 = {:?}: literal {literal}, alternative {alternative}", w[2]);
    assert!(w_u_candidates(3).is_none());
}

#[test]
fn paley_wiener_closed_forms() {
    let c = paley_wiener_check(0.0, C::new(0.3, 2.0), 0.1).unwrap();
    assert!(c.residuals().0 < 1e-8 && c.residuals().1 < 1e-8, "{c:?}");
    assert!(c.e_integral.norm() < 1e-12);
    assert!((c.e_printed - c.e_integral).norm() > 1.0);
    for (x, z, xi) in [(0.37, C::new(0.3, 0.7), -0.2), (-1.3, C::new(2.1, 1.1), 0.45)] {
        let c = paley_wiener_check(x, z, xi).unwrap();
        assert!(c.residuals().0 < 1e-8 && c.residuals().1 < 1e-8, "{c:?}");
    }
    assert!(paley_wiener_check(0.0, C::new(0.3, -1.0), 0.0).is_err());
}

#[test]
fn dual_kernel_residue_and_periodicity() {
    for xi in [-0.4, 0.0, 0.25] {
        let r = contour_residue(|w| Ok(ehat_closed(xi, w, Sign::Plus)), C::new(xi, 0.0), 0.1, 64).unwrap();
        assert!((r - 1.0).norm() < 1e-10, "ξ={xi}: {r}");
    }
    assert_eq!(ehat_closed(0.7, C::new(0.1, 0.2), Sign::Plus), C::new(0.0, 0.0));
    let z = C::new(0.31, 0.4);
    assert!((ehat_closed(0.1, z + 2.0, Sign::Plus) - ehat_closed(0.1, z, Sign::Plus)).norm() < 1e-12);
    let g = |z: C| PI * (C::i() * PI * z).exp() / (PI * z).sin();
    assert!((g(z + 2.0) - g(z)).norm() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_part_is_symmetric(sigma in 5.0f64..40.0, re in -2.0f64..3.0, im in -30.0f64..30.0) {
        let f = TestFunction::gaussian(sigma).unwrap();
        let s = C::new(re, im);
        let a = f_delta(&f, s, Sign::Plus);
        let b = f_delta(&f, C::new(1.0, 0.0) - s, Sign::Plus);
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        prop_assert!(f_delta(&f, s, Sign::Minus).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn fhat_is_even_and_bounded(sigma in 1.0f64..40.0, beta in -1.0f64..1.0, xi in -2.0f64..2.0) {
        let f = TestFunction::modulated_gaussian(sigma, beta).unwrap();
        let a = f.fhat(C::new(xi, 0.0));
        prop_assert!((a - f.fhat(C::new(-xi, 0.0))).norm() <= 1e-12 * sigma);
        prop_assert!(a.norm() <= sigma + 1e-12);
    }
}
