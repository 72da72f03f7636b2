//! Gauss–Legendre rules and adaptive panel quadrature for complex integrands.

use num_complex::Complex64 as C;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> std::sync::Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    let r = std::sync::Arc::new((x, w));
    cache.lock().unwrap().insert(n, r.clone());
    r
}

/// Fixed rule on [a, b].
pub fn gl_fixed<F: FnMut(f64) -> C>(mut f: F, a: f64, b: f64, n: usize) -> C {
    let rule = gauss_legendre(n);
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    let mut acc = C::new(0.0, 0.0);
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        acc += f(m + h * x) * *w;
    }
    acc * h
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: C,
    pub err: f64,
}

/// Adaptive bisection with an n-point rule; error estimated against the two-half refinement.
pub fn adaptive<F: FnMut(f64) -> C>(f: &mut F, a: f64, b: f64, tol: f64, n: usize, max_depth: u32) -> QuadResult {
    let whole = gl_fixed(&mut *f, a, b, n);
    adaptive_rec(f, a, b, whole, tol, n, max_depth)
}

fn adaptive_rec<F: FnMut(f64) -> C>(f: &mut F, a: f64, b: f64, whole: C, tol: f64, n: usize, depth: u32) -> QuadResult {
    let m = 0.5 * (a + b);
    let l = gl_fixed(&mut *f, a, m, n);
    let r = gl_fixed(&mut *f, m, b, n);
    let err = (l + r - whole).norm();
    if err <= tol || depth == 0 {
        return QuadResult { value: l + r, err };
    }
    let ql = adaptive_rec(f, a, m, l, 0.5 * tol, n, depth - 1);
    let qr = adaptive_rec(f, m, b, r, 0.5 * tol, n, depth - 1);
    QuadResult { value: ql.value + qr.value, err: ql.err + qr.err }
}

/// Integrates over consecutive breakpoints, each panel adaptively.
pub fn adaptive_panels<F: FnMut(f64) -> C>(f: &mut F, breaks: &[f64], tol: f64, n: usize) -> QuadResult {
    let mut value = C::new(0.0, 0.0);
    let mut err = 0.0;
    let per = tol / (breaks.len().max(2) - 1) as f64;
    for w in breaks.windows(2) {
        let q = adaptive(f, w[0], w[1], per, n, 18);
        value += q.value;
        err += q.err;
    }
    QuadResult { value, err }
}

/// Trapezoid rule for the closed circle |w - c| = r: returns (1/2πi)∮ f(w) dw.
pub fn circle_mean<F: FnMut(C) -> C>(mut f: F, c: C, r: f64, m: usize) -> C {
    let mut acc = C::new(0.0, 0.0);
    for j in 0..m {
        let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let e = C::from_polar(1.0, th);
        acc += f(c + e * r) * e * r;
    }
    acc / m as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64] {
            let deg = 2 * n - 1;
            let v = gl_fixed(|x| C::new(x.powi(deg as i32) + 1.0, 0.0), 0.0, 1.0, n);
            assert!((v.re - (1.0 / (deg as f64 + 1.0) + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let mut f = |x: f64| C::new(1.0 / (1e-4 + x * x), 0.0);
        let q = adaptive(&mut f, -1.0, 1.0, 1e-10, 16, 30);
        let exact = 2.0 * (1.0 / 1e-4f64).sqrt() * (1.0 / 1e-4f64.sqrt()).atan();
        assert!((q.value.re - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn circle_residue() {
        let v = circle_mean(|w| 3.0 / (w - C::new(0.1, 0.2)) + w * w, C::new(0.0, 0.0), 1.0, 64);
        assert!((v - C::new(3.0, 0.0)).norm() < 1e-12);
    }
}
