use num_complex::Complex64 as C;
use proptest::prelude::*;
use zeta_interp::modforms::*;
use zeta_interp::qseries::{q_int, FracPowerSeries};

fn p(re: f64, im: f64) -> PointUH {
    PointUH::new(re, im).unwrap()
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn cusp_expansions_leading_triples() {
    let th = cusp1_series(CuspForm::Theta, 4);
    assert_eq!(th.denom(), 8);
    for e in [1i64, 9, 25] {
        assert_eq!(th.coeff_u(e).unwrap(), q_int(1));
    }
    let j = cusp1_series(CuspForm::J, 4);
    let jd = j.lift(2).unwrap();
    assert_eq!(jd.coeff_u(2).unwrap(), q_int(1));
    assert_eq!(jd.coeff_u(4).unwrap(), q_int(24));
    assert_eq!(jd.coeff_u(6).unwrap(), q_int(300));
    let jm = cusp1_series(CuspForm::Jminus, 4);
    assert_eq!(jm.denom(), 2);
    assert_eq!(jm.coeff_u(-1).unwrap(), q_int(1));
    assert_eq!(jm.coeff_u(1).unwrap(), q_int(20));
    assert_eq!(jm.coeff_u(3).unwrap(), q_int(-62));
}

#[test]
fn jminus_squared_identity_to_order_40() {
    let jm = jminus_series(40);
    let jinv = j_series(42).invert().unwrap().truncate(40);
    let lhs = jm.mul(&jm).add(&jinv.scale(&q_int(64)));
    assert_eq!(lhs, FracPowerSeries::one(2, 40));
}

#[test]
fn inverse_of_j_starts_at_t() {
    let ji = j_series(10).invert().unwrap();
    assert_eq!(ji.base_exp(), 1);
    assert_eq!(ji.coeff_u(1).unwrap(), q_int(1));
}

#[test]
fn theta_at_i_matches_direct_sum() {
    let direct: f64 = 1.0 + 2.0 * (1..20).map(|n| (-std::f64::consts::PI * (n * n) as f64).exp()).sum::<f64>();
    let v = theta(p(0.0, 1.0)).unwrap();
    assert!((v.re - direct).abs() < 1e-14 && v.im.abs() < 1e-15);
}

#[test]
fn charts_agree_on_overlap() {
    // points with both Im z and Im 1/(1-z) at least 0.35
    for (x, y) in [(0.3, 0.9), (0.5, 0.8), (0.55, 0.6), (0.7, 0.5)] {
        let (b, c) = chart_pair(C::new(x, y)).expect("overlap");
        assert!(rel(c.j, b.j) < 1e-10, "J at {x}+{y}i");
        assert!(rel(c.jm, b.jm) < 1e-10);
        assert!(rel(c.theta, b.theta) < 1e-10);
        assert!((c.log_theta - b.log_theta).norm() < 1e-10);
    }
}

#[test]
fn jderiv_identity() {
    let h = 1e-5;
    for (x, y) in [(0.1, 1.2), (-0.4, 0.7), (0.8, 0.3), (0.97, 0.05), (-0.2, 0.02)] {
        let z = C::new(x, y);
        let f = |w: C| j_eval(PointUH::from_c(w).unwrap()).unwrap();
        let d = (f(z + h) - f(z - h) - (f(z + C::i() * h) - f(z - C::i() * h)) * C::i()) / (4.0 * h);
        let v = eval_all(p(x, y)).unwrap();
        let want = -C::i() * std::f64::consts::PI * v.theta.powi(4) * v.j * v.jm;
        assert!(rel(d, want) < 1e-8, "{x}+{y}i: {d} vs {want}");
    }
}

#[test]
fn theta4dz_identity() {
    // θ⁴ dz = π^{-1} w^{-1/2} (64-w)^{-1/2} dw with w = J, up to the sign fixed by J₋
    for (x, y) in [(0.2, 1.1), (-0.6, 0.9), (0.9, 0.2), (0.3, 2.0), (-0.95, 0.1), (0.0, 1.5), (0.5, 0.5), (-0.3, 0.6), (0.75, 0.7), (0.1, 3.0)] {
        let v = eval_all(p(x, y)).unwrap();
        let dj = -C::i() * std::f64::consts::PI * v.theta.powi(4) * v.j * v.jm;
        let lhs = v.theta.powi(4);
        let rhs_mag = dj / (std::f64::consts::PI * (v.j * (64.0 - v.j)).sqrt());
        // J₋² = 1 - 64/J gives w(64-w) = -J² J₋², so the two sides agree up to sign
        assert!((lhs - rhs_mag).norm().min((lhs + rhs_mag).norm()) < 1e-7 * lhs.norm(), "{x}+{y}i");
    }
}

#[test]
fn basis_is_holomorphic_at_both_cusps() {
    for two_k in 0..12 {
        let k = num_rational::Ratio::new(two_k, 2);
        for s in [Sign::Plus, Sign::Minus] {
            let b = mf_basis(k, s);
            assert_eq!(b.len() as i64, mf_dim(two_k as f64 / 2.0, s));
            for f in &b {
                let e = f.q_expansion(6).unwrap();
                assert!(e.base_exp() >= 0);
                assert!(f.cusp1_order() >= 0.0, "k={k} {s:?}");
            }
        }
    }
}

#[test]
fn form_above_dimension_vanishes() {
    // the next element past the basis has a pole at the cusp 1
    let f = ModularFormRep {
        weight: num_rational::Ratio::from_integer(2),
        sign: Sign::Minus,
        jminus_power: 1,
        j_poly: vec![(-1, q_int(1))],
    };
    assert!(f.cusp1_order() < 0.0);
}

#[test]
fn eval_rejects_near_real_axis() {
    assert!(eval_all(p(0.3, 1e-12)).is_err());
    assert!(PointUH::new(0.0, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn j_is_theta_group_invariant(x in -1.0f64..1.0, y in 0.4f64..2.0) {
        let z = C::new(x, y);
        let a = j_eval(PointUH::from_c(z).unwrap()).unwrap();
        let b = j_eval(PointUH::from_c(-1.0 / z).unwrap()).unwrap();
        let c = j_eval(PointUH::from_c(z + 2.0).unwrap()).unwrap();
        prop_assert!(rel(b, a) < 1e-10);
        prop_assert!(rel(c, a) < 1e-10);
    }

    #[test]
    fn theta_weight_half(x in -1.0f64..1.0, y in 0.4f64..2.0) {
        let z = C::new(x, y);
        let a = theta(PointUH::from_c(z).unwrap()).unwrap();
        let b = theta(PointUH::from_c(-1.0 / z).unwrap()).unwrap();
        prop_assert!(rel(b, (z / C::i()).sqrt() * a) < 1e-10);
    }
}
