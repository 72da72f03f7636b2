use num_complex::Complex64 as C;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use std::f64::consts::PI;
use zeta_interp::analytic_nt::*;
use zeta_interp::modforms::theta_series;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn zeta_classical_values() {
    assert!((zeta(c(2.0, 0.0)).unwrap() - PI * PI / 6.0).norm() < 1e-12);
    assert!((zeta(c(0.0, 0.0)).unwrap() + 0.5).norm() < 1e-12);
    assert!(zeta(c(1.0, 0.0)).is_err());
}

#[test]
fn completed_zeta_reflection() {
    let s = c(0.3, 7.0);
    let d = zeta_star(s).unwrap() - zeta_star(C::new(1.0, 0.0) - s).unwrap();
    assert!(d.norm() < 1e-10, "{d}");
}

#[test]
fn zeta_agrees_with_alternating_series() {
    for &sigma in &[-0.5, 0.0, 0.25, 0.5, 0.75, 1.5, 2.5] {
        for &t in &[0.5, 3.0, 14.0, 30.0, 60.0] {
            let s = c(sigma, t);
            let a = zeta(s).unwrap();
            let b = zeta_eta(s).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm().max(1.0), "s={s}: {a} vs {b}");
        }
    }
}

#[test]
fn gamma_and_digamma() {
    assert!((gamma_c(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() < 1e-12);
    assert!(gamma_c(c(-2.0, 0.0)).is_err());
    let n = 1_000_000u64;
    let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let oracle = -(h - (n as f64).ln() - 0.5 / n as f64);
    let psi = digamma(c(1.0, 0.0)).unwrap();
    assert!((psi.re - oracle).abs() < 1e-10, "{psi} vs {oracle}");
}

#[test]
fn first_zero_and_counts() {
    let z = find_zeros(200.0).unwrap();
    assert!((z.ordinates[0] - 14.134725141734).abs() < 1e-8);
    assert!(z.multiplicities.iter().all(|&m| m == 1));
    assert_eq!(count_n(100.0).unwrap(), 29);
    for &t in &[50.0, 100.0, 200.0] {
        let n = z.ordinates.iter().filter(|&&g| g <= t).count() as f64;
        assert!((n - rvm_main(t)).abs() <= 8.0 * f64::ln(t), "T={t}");
    }
}

#[test]
fn zero_table_integrity() {
    let z = find_zeros(100.0).unwrap();
    for w in z.ordinates.windows(2) {
        assert!(w[1] - w[0] > 10.0 * z.precision);
    }
    let step = 0.005;
    let mut changes = 0;
    let mut prev = hardy_z(step);
    let mut t = 2.0 * step;
    while t <= 100.0 {
        let v = hardy_z(t);
        if v.signum() != prev.signum() {
            changes += 1;
        }
        prev = v;
        t += step;
    }
    assert_eq!(changes, z.len());
}

#[test]
fn zero_file_round_trip() {
    let z = first_zeros(30).unwrap();
    assert_eq!(z.len(), 30);
    let path = std::env::temp_dir().join(format!("zeros_round_trip_{}.txt", std::process::id()));
    z.write(&path).unwrap();
    let r = ZeroTable::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(r.len(), 30);
    assert_eq!(r.precision, z.precision);
    for (a, b) in r.ordinates.iter().zip(&z.ordinates) {
        assert!((a - b).abs() < 1e-11);
    }
}

#[test]
fn zero_file_rejects_bad_input() {
    let path = std::env::temp_dir().join(format!("zeros_bad_{}.txt", std::process::id()));
    std::fs::write(&path, "14.1\n21.0\n").unwrap();
    assert!(ZeroTable::read(&path).is_err());
    std::fs::write(&path, "precision=1e-9\n14.1\n14.1\n").unwrap();
    assert!(ZeroTable::read(&path).is_err());
    std::fs::remove_file(&path).ok();
}

#[test]
fn arithmetic_values() {
    assert!((von_mangoldt(8) - 2f64.ln()).abs() < 1e-15);
    assert_eq!(von_mangoldt(12), 0.0);
    assert_eq!(mobius(12), 0);
    assert_eq!(mobius(30), -1);
    assert_eq!(mobius(1), 1);
    assert_eq!(sigma(12), 28);
}

#[test]
fn divisor_sum_identities() {
    for n in 1..=10_000u64 {
        let d = divisors(n);
        let l: f64 = d.iter().map(|&k| von_mangoldt(k)).sum();
        assert!((l - (n as f64).ln()).abs() < 1e-9, "n={n}");
        let m: i64 = d.iter().map(|&k| mobius(k)).sum();
        assert_eq!(m, (n == 1) as i64, "n={n}");
        assert_eq!(sigma(n), d.iter().sum::<u64>());
    }
}

#[test]
fn sums_of_squares_match_theta_powers() {
    let order = 42;
    let th = theta_series(order);
    let th3 = th.mul(&th).mul(&th);
    for n in 0..=20u64 {
        let coeff = th3.coeff_u(n as i64).unwrap().to_integer().to_u64().unwrap();
        assert_eq!(r_squares(3, n), coeff, "n={n}");
    }
    assert_eq!(r_squares(3, 3), 8);
    assert_eq!(r_squares(3, 7), 0);
}

#[test]
fn dirichlet_l_values() {
    let chi4 = primitive_characters(4).unwrap();
    assert_eq!(chi4.len(), 1);
    assert!(!chi4[0].even);
    let l = l_chi(c(1.0, 0.0), &chi4[0]).unwrap();
    assert!((l - PI / 4.0).norm() < 1e-12, "{l}");
}

#[test]
fn characters_are_consistent() {
    for q in 3..=12u64 {
        for chi in characters(q).unwrap() {
            for a in 0..q {
                for b in 0..q {
                    let d = chi.value(a * b) - chi.value(a) * chi.value(b);
                    assert!(d.norm() < 1e-12);
                }
            }
            let m1 = chi.value(q - 1);
            assert!((m1 - if chi.even { 1.0 } else { -1.0 }).norm() < 1e-12);
            if chi.primitive {
                let w = root_number(&chi).unwrap();
                assert!((w.norm() - 1.0).abs() < 1e-12, "q={q}");
            } else {
                assert!(root_number(&chi).is_err());
            }
        }
    }
}

#[test]
fn completed_l_functional_equation() {
    let chars = primitive_characters(5).unwrap();
    assert_eq!(chars.len(), 3);
    for chi in &chars {
        let w = root_number(chi).unwrap();
        for &s in &[c(0.3, 2.0), c(0.7, -5.0), c(0.5, 11.0)] {
            let lhs = l_star(s, chi).unwrap();
            let rhs = w * l_star(C::new(1.0, 0.0) - s, &chi.conj()).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "s={s}: {lhs} vs {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recurrence(re in -4.5f64..6.0, im in -20.0f64..20.0) {
        prop_assume!(im.abs() > 0.1 || (re - re.round()).abs() > 0.1);
        let s = c(re, im);
        let r = gamma_c(s + 1.0).unwrap() / gamma_c(s).unwrap() - s;
        prop_assert!(r.norm() < 1e-10 * s.norm().max(1.0));
    }

    #[test]
    fn zeta_conjugate_symmetry(re in -2.0f64..3.0, im in 0.5f64..50.0) {
        let s = c(re, im);
        let d = zeta(s.conj()).unwrap() - zeta(s).unwrap().conj();
        prop_assert!(d.norm() < 1e-12 * zeta(s).unwrap().norm().max(1.0));
    }
}
