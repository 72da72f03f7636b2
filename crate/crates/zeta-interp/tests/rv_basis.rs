use num_complex::Complex64 as C;
use std::f64::consts::PI;
use zeta_interp::interp_engine::TestFunction;
use zeta_interp::modforms::Sign;
use zeta_interp::quad::gauss_legendre;
use zeta_interp::rv_basis::*;

fn bv(n: usize, s: Sign, x: f64) -> f64 {
    b(n, s, x).unwrap().value.re
}

#[test]
fn even_basis_deltas() {
    assert!((bv(3, Sign::Plus, 3f64.sqrt()) - 1.0).abs() < 1e-6);
    assert!(bv(3, Sign::Plus, 5f64.sqrt()).abs() < 1e-6);
    for m in 1..=8usize {
        let x = (m as f64).sqrt();
        for n in 1..=8usize {
            for s in [Sign::Plus, Sign::Minus] {
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((bv(n, s, x) - want).abs() < 1e-6, "b n={n} m={m} {s:?}");
            }
        }
    }
}

#[test]
fn odd_basis_deltas_carry_the_node_factor() {
    for m in 1..=8usize {
        let x = (m as f64).sqrt();
        for n in 1..=8usize {
            for s in [Sign::Plus, Sign::Minus] {
                let want = if n == m { x } else { 0.0 };
                let v = d(n, s, x).unwrap().value.re;
                assert!((v - want).abs() < 1e-6, "d n={n} m={m} {s:?}: {v}");
            }
        }
    }
}

#[test]
fn values_at_origin() {
    for n in 1..=9usize {
        assert!(bv(n, Sign::Minus, 0.0).abs() < 1e-8, "n={n}");
        let sq = [1, 4, 9].contains(&n);
        assert!((bv(n, Sign::Plus, 0.0) - if sq { -2.0 } else { 0.0 }).abs() < 1e-8, "n={n}");
    }
}

#[test]
fn poisson_values() {
    for n in 0..=9usize {
        let (a, ah) = a_pair(n, 0.0).unwrap();
        let (wa, wh) = match n {
            0 => (0.5, 0.5),
            1 | 4 | 9 => (-1.0, 1.0),
            _ => (0.0, 0.0),
        };
        assert!((a.value.re - wa).abs() < 1e-6 && (ah.value.re - wh).abs() < 1e-6, "n={n}");
    }
}

#[test]
fn parity_of_evaluators() {
    for x in [0.3, 1.1, 2.5] {
        assert_eq!(bv(2, Sign::Plus, x), bv(2, Sign::Plus, -x));
        let e = RVBasisEntry { n: 2, sign: Sign::Minus, parity: BasisParity::Odd };
        assert_eq!(e.eval(x).unwrap().value.re, -e.eval(-x).unwrap().value.re);
    }
}

fn fourier_even(vals: &[f64], xi: f64, nodes: &[(f64, f64)]) -> C {
    C::new(2.0 * nodes.iter().zip(vals).map(|(&(x, w), v)| w * v * (2.0 * PI * x * xi).cos()).sum::<f64>(), 0.0)
}

fn fourier_odd(vals: &[f64], xi: f64, nodes: &[(f64, f64)]) -> C {
    C::new(0.0, -2.0 * nodes.iter().zip(vals).map(|(&(x, w), v)| w * v * (2.0 * PI * x * xi).sin()).sum::<f64>())
}

fn nodes(top: f64, panels: usize) -> Vec<(f64, f64)> {
    let rule = gauss_legendre(16);
    let h = top / panels as f64;
    let mut out = vec![];
    for p in 0..panels {
        for (x, w) in rule.0.iter().zip(rule.1.iter()) {
            out.push((h * (p as f64 + 0.5 * (x + 1.0)), 0.5 * h * w));
        }
    }
    out
}

#[test]
fn fourier_eigenfunctions() {
    let nd = nodes(7.0, 28);
    let xis: Vec<f64> = (0..20).map(|i| 0.05 + 0.13 * i as f64).collect();
    for n in [1usize, 2] {
        for s in [Sign::Plus, Sign::Minus] {
            let vals: Vec<f64> = nd.iter().map(|&(x, _)| bv(n, s, x)).collect();
            let ev = -s.val();
            for &xi in &xis {
                let ft = fourier_even(&vals, xi, &nd);
                assert!((ft - ev * bv(n, s, xi)).norm() < 1e-5, "b n={n} {s:?} ξ={xi}");
            }
            let dv: Vec<f64> = nd.iter().map(|&(x, _)| d(n, s, x).unwrap().value.re).collect();
            let ev = C::new(0.0, s.val());
            for &xi in &xis {
                let ft = fourier_odd(&dv, xi, &nd);
                assert!((ft - ev * d(n, s, xi).unwrap().value.re).norm() < 1e-5, "d n={n} {s:?} ξ={xi}");
            }
        }
    }
}

#[test]
fn schwartz_decay_proxy() {
    for n in 1..=5usize {
        for s in [Sign::Plus, Sign::Minus] {
            let w: Vec<f64> = (0..=40).map(|i| 0.5 * i as f64).map(|x| bv(n, s, x).abs() * (1.0 + x).powi(4)).collect();
            assert!(w.iter().all(|&v| v <= 1e3), "n={n} {s:?}: {w:?}");
            assert!(w[24..].iter().all(|&v| v < 1e-6), "n={n} {s:?}: {w:?}");
        }
    }
}

#[test]
fn reconstruction_of_self_dual_gaussian() {
    let f = TestFunction::gaussian(1.0).unwrap();
    let r = theorem_a_reconstruct(&f, 0.7, 60).unwrap();
    assert!(r.residual.abs() < 1e-4, "{r:?}");
    // Poisson summation at the origin
    let r0 = theorem_a_reconstruct(&f, 0.0, 60).unwrap();
    assert!(r0.residual.abs() < 1e-4, "{r0:?}");
}

#[test]
fn reconstruction_contains_node_value() {
    let f = TestFunction::gaussian(1.3).unwrap();
    let x = 5f64.sqrt();
    for n in [5usize, 12] {
        let tp = b_table(Sign::Plus, x, n).unwrap();
        let tm = b_table(Sign::Minus, x, n).unwrap();
        for m in 0..=n {
            let a = 0.5 * (tp.values[m].re + tm.values[m].re);
            let ah = 0.5 * (tm.values[m].re - tp.values[m].re);
            assert!((a - if m == 5 { 1.0 } else { 0.0 }).abs() < 1e-8, "a_{m}");
            assert!(ah.abs() < 1e-8, "â_{m}");
        }
        let r = theorem_a_reconstruct(&f, x, n).unwrap();
        assert!((r.approx - f.f(C::new(x, 0.0)).re).abs() < 1e-8);
    }
}

#[test]
fn reconstruction_residual_does_not_grow() {
    let f = TestFunction::gaussian(1.0 / 2f64.sqrt()).unwrap();
    let r: Vec<f64> = [20, 40, 80].iter().map(|&n| theorem_a_reconstruct(&f, 0.7, n).unwrap().residual.abs()).collect();
    assert!(r[1] <= r[0] && r[2] <= r[1] + 1e-15, "{r:?}");
    assert!(r[2] < 1e-10);
}

#[test]
fn partial_sums_at_origin() {
    for n in [1usize, 10, 64, 100, 500] {
        let p = partial_sum_b(n, Sign::Plus, 0.0).unwrap();
        assert!((p.sum + 2.0 * (n as f64).sqrt().floor()).abs() < 1e-6, "N={n}");
        let m = partial_sum_b(n, Sign::Minus, 0.0).unwrap();
        assert!(m.sum.abs() < 1e-6, "N={n}");
    }
}

#[test]
fn partial_sum_envelope() {
    for x in [2.0, 1.7, 0.5] {
        let norms: Vec<f64> = [64, 256, 1024].iter().map(|&n| partial_sum_b(n, Sign::Minus, x).unwrap().normalized.abs()).collect();
        let c = norms[0];
        assert!(norms.iter().all(|&v| v <= c + 1e-12), "x={x}: {norms:?}");
    }
}
