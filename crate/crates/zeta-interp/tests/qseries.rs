use num_rational::Ratio;
use num_traits::{One, Zero};
use proptest::prelude::*;
use zeta_interp::modforms::{j_series, theta_series};
use zeta_interp::qseries::*;

fn ints(denom: u64, base: i64, c: &[i64], trunc: i64) -> FracPowerSeries {
    FracPowerSeries::from_ints(denom, base, c, trunc).unwrap()
}

fn coeffs_upto(a: &FracPowerSeries, from: i64, to: i64) -> Vec<Q> {
    (from..to).map(|e| a.coeff_u(e).unwrap()).collect()
}

fn brute_mul(a: &FracPowerSeries, b: &FracPowerSeries) -> (i64, Vec<Q>, i64) {
    assert_eq!(a.denom(), b.denom());
    let base = a.base_exp() + b.base_exp();
    let trunc = (a.trunc_order() + b.base_exp()).min(b.trunc_order() + a.base_exp());
    let mut out = Vec::new();
    for e in base..trunc {
        let mut acc = Q::zero();
        for i in a.base_exp()..a.trunc_order() {
            let j = e - i;
            if j >= b.base_exp() && j < b.trunc_order() {
                acc += a.coeff_u(i).unwrap() * b.coeff_u(j).unwrap();
            }
        }
        out.push(acc);
    }
    (base, out, trunc)
}

#[test]
fn theta_squared_counts_two_squares() {
    let th = theta_series(12);
    let t2 = th.mul(&th);
    let got: Vec<i64> = (0..6).map(|e| q_to_f64(&t2.coeff_u(e).unwrap()) as i64).collect();
    assert_eq!(got, vec![1, 4, 4, 0, 4, 8]);
    assert_eq!(t2.coeff(&Ratio::new(5, 2)).unwrap(), q_int(8));
}

#[test]
fn theta_cubed_counts_three_squares() {
    let th = theta_series(12);
    let t3 = th.pow_rational(&q_int(3)).unwrap();
    let got: Vec<Q> = coeffs_upto(&t3, 0, 6);
    let want: Vec<Q> = [1, 6, 12, 8, 6, 24].iter().map(|&x| q_int(x)).collect();
    assert_eq!(got, want);
    assert_eq!(t3, th.mul(&th).mul(&th));
}

#[test]
fn theta_coefficients() {
    let th = theta_series(10);
    assert_eq!(th.coeff(&Ratio::from_integer(0)).unwrap(), q_int(1));
    assert_eq!(th.coeff(&Ratio::new(1, 2)).unwrap(), q_int(2));
    assert!(th.coeff(&Ratio::from_integer(5)).is_err());
    assert!(th.coeff(&Ratio::new(1, 3)).is_err());
}

#[test]
fn monomials_cancel() {
    let a = FracPowerSeries::monomial(2, -1, q_int(1), 10);
    let b = FracPowerSeries::monomial(2, 1, q_int(1), 10);
    let p = a.mul(&b);
    assert_eq!(p.base_exp(), 0);
    assert_eq!(p.coeffs(), &[Q::one()]);
}

#[test]
fn geometric_inverse() {
    let a = ints(2, 0, &[1, -1], 20);
    let inv = a.invert().unwrap();
    assert_eq!(coeffs_upto(&inv, 0, 20), vec![Q::one(); 20]);
    assert!(ints(2, 0, &[0], 5).invert().is_err());
}

#[test]
fn theta_inverse_round_trip() {
    let th = theta_series(30);
    assert_eq!(th.invert().unwrap().mul(&th), FracPowerSeries::one(2, 30));
}

#[test]
fn j_inverse_starts_at_t() {
    let j = j_series(20);
    let inv = j.invert().unwrap();
    assert_eq!(inv.base_exp(), 1);
    assert_eq!(inv.coeffs()[0], Q::one());
}

#[test]
fn binomial_square_root() {
    let a = ints(2, 0, &[1, 1], 10);
    let r = a.pow_rational(&q_frac(1, 2)).unwrap();
    assert_eq!(coeffs_upto(&r, 0, 3), vec![q_int(1), q_frac(1, 2), q_frac(-1, 8)]);
    let th = theta_series(30);
    let h = th.pow_rational(&q_frac(1, 2)).unwrap();
    assert_eq!(h.mul(&h), th);
    assert_eq!(th.pow_rational(&q_int(1)).unwrap(), th);
    assert!(ints(2, 0, &[2, 1], 10).pow_rational(&q_frac(1, 2)).is_err());
}

#[test]
fn mixed_denominators_lift() {
    let a = ints(2, 0, &[1, 1], 6);
    let b = ints(3, 0, &[1, 1], 9);
    let p = a.mul(&b);
    assert_eq!(p.denom(), 6);
    assert_eq!(p.coeff(&Ratio::new(1, 2)).unwrap(), q_int(1));
    assert_eq!(p.coeff(&Ratio::new(1, 3)).unwrap(), q_int(1));
    assert_eq!(p.coeff(&Ratio::new(5, 6)).unwrap(), q_int(1));
}

#[test]
fn dump_round_trip() {
    let a = theta_series(20).invert().unwrap();
    assert_eq!(FracPowerSeries::parse_dump(&a.dump()).unwrap(), a);
}

fn series(denom: u64) -> impl Strategy<Value = FracPowerSeries> {
    (-3i64..3, prop::collection::vec((-20i64..20, 1i64..6), 1..10), 0i64..4).prop_map(move |(base, c, extra)| {
        let coeffs: Vec<Q> = c.iter().map(|&(n, d)| q_frac(n, d)).collect();
        let trunc = base + coeffs.len() as i64 + extra;
        FracPowerSeries::new(denom, base, coeffs, trunc).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mul_matches_brute_force_convolution(a in series(2), b in series(2)) {
        let p = a.mul(&b);
        let (base, want, trunc) = brute_mul(&a, &b);
        prop_assert_eq!(p.trunc_order(), trunc);
        prop_assert_eq!(coeffs_upto(&p, base, trunc), want);
    }

    #[test]
    fn ring_axioms(a in series(2), b in series(2), c in series(2)) {
        let l = a.mul(&b).mul(&c);
        let r = a.mul(&b.mul(&c));
        let t = l.trunc_order().min(r.trunc_order());
        prop_assert_eq!(l.truncate(t), r.truncate(t));
        let l = a.mul(&b.add(&c));
        let r = a.mul(&b).add(&a.mul(&c));
        let t = l.trunc_order().min(r.trunc_order());
        prop_assert_eq!(l.truncate(t), r.truncate(t));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }

    #[test]
    fn one_is_identity(a in series(2)) {
        let one = FracPowerSeries::one(2, 40);
        prop_assert_eq!(one.mul(&a), a);
    }

    #[test]
    fn inverse_round_trip(a in series(2)) {
        prop_assume!(!a.is_zero());
        let p = a.mul(&a.invert().unwrap());
        let t = p.trunc_order();
        prop_assert_eq!(p, FracPowerSeries::one(2, t));
    }

    #[test]
    fn truncation_is_sound(order in 8i64..30, extra in 1i64..20) {
        let lo = theta_series(order).invert().unwrap();
        let hi = theta_series(order + extra).invert().unwrap();
        prop_assert_eq!(hi.truncate(lo.trunc_order()), lo.clone());
        let lo3 = theta_series(order).pow_rational(&q_frac(3, 2)).unwrap();
        let hi3 = theta_series(order + extra).pow_rational(&q_frac(3, 2)).unwrap();
        prop_assert_eq!(hi3.truncate(lo3.trunc_order()), lo3);
    }
}
