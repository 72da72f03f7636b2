//! The √n interpolation basis `b±_n`, `d±_n` and the assembled `a_n`, `â_n`.

use crate::alpha_coeffs::{coeff_with_error, mod_table, Estimate, ModTable};
use crate::error::{Result, ZiError};
use crate::interp_engine::{Parity, TestFunction};
use crate::modforms::Sign;
use crate::modint::Phi;
use num_complex::Complex64 as C;
use std::sync::Arc;

/// Evaluation tolerance for single basis values.
pub const BASIS_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisParity {
    /// `b±_n`, even in `x`
    Even,
    /// `d±_n`, odd in `x`
    Odd,
}

/// One basis function `b±_n` or `d±_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RVBasisEntry {
    pub n: usize,
    pub sign: Sign,
    pub parity: BasisParity,
}

impl RVBasisEntry {
    pub fn eval(&self, x: f64) -> Result<Estimate> {
        match self.parity {
            BasisParity::Even => b(self.n, self.sign, x),
            BasisParity::Odd => d(self.n, self.sign, x),
        }
    }
}

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(ZiError::InvalidInput(format!("x = {x}")));
    }
    Ok(())
}

/// `b±_n(x) = ½∫ g±_{n,1/2}(z) e^{πizx²} dz`.
pub fn b(n: usize, sign: Sign, x: f64) -> Result<Estimate> {
    check_x(x)?;
    let e = coeff_with_error(n, 0.5, sign, Phi::Gauss(x.abs()), BASIS_TOL)?;
    Ok(Estimate { value: C::new(e.value.re, 0.0), err: e.err + e.value.im.abs() })
}

/// `d±_n(x) = ½∫ g±_{n,3/2}(z) x e^{πizx²} dz`.
pub fn d(n: usize, sign: Sign, x: f64) -> Result<Estimate> {
    check_x(x)?;
    let e = coeff_with_error(n, 1.5, sign, Phi::Gauss(x.abs()), BASIS_TOL / x.abs().max(1.0))?;
    Ok(Estimate { value: C::new(e.value.re * x, 0.0), err: (e.err + e.value.im.abs()) * x.abs() })
}

/// All `b±_n(x)`, `n ≤ n_max`, from one table.
pub fn b_table(sign: Sign, x: f64, n_max: usize) -> Result<Arc<ModTable>> {
    check_x(x)?;
    mod_table(0.5, sign, Phi::Gauss(x.abs()), n_max)
}

/// `(a_n(x), â_n(x)) = ((b⁺_n + b⁻_n)/2, (b⁻_n - b⁺_n)/2)`.
pub fn a_pair(n: usize, x: f64) -> Result<(Estimate, Estimate)> {
    let p = b(n, Sign::Plus, x)?;
    let m = b(n, Sign::Minus, x)?;
    let err = 0.5 * (p.err + m.err);
    Ok((Estimate { value: (p.value + m.value) * 0.5, err }, Estimate { value: (m.value - p.value) * 0.5, err }))
}

/// Truncated interpolation sum and its deviation from `f(x)`.
#[derive(Clone, Copy, Debug)]
pub struct Reconstruction {
    pub approx: f64,
    pub target: f64,
    pub residual: f64,
    pub err: f64,
}

fn kahan(vals: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in vals {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `Σ_{n≤N} f(√n) a_n(x) + Σ_{n≤N} f̂(√n) â_n(x)` for an even test function.
pub fn theorem_a_reconstruct(f: &TestFunction, x: f64, n_max: usize) -> Result<Reconstruction> {
    if f.parity != Parity::Even {
        return Err(ZiError::InvalidInput("reconstruction needs an even test function".into()));
    }
    let tp = b_table(Sign::Plus, x, n_max)?;
    let tm = b_table(Sign::Minus, x, n_max)?;
    let terms: Vec<(f64, f64)> = (0..=n_max)
        .map(|n| {
            let r = (n as f64).sqrt();
            let (fv, gv) = (f.f(C::new(r, 0.0)).re, f.fhat(C::new(r, 0.0)).re);
            let (bp, bm) = (tp.values[n].re, tm.values[n].re);
            let a = 0.5 * (bp + bm);
            let ah = 0.5 * (bm - bp);
            let e = 0.5 * (tp.quad_error[n] + tm.quad_error[n]);
            (fv * a + gv * ah, (fv.abs() + gv.abs()) * e)
        })
        .collect();
    let approx = kahan(terms.iter().map(|t| t.0));
    let err = terms.iter().map(|t| t.1).sum();
    let target = f.f(C::new(x, 0.0)).re;
    Ok(Reconstruction { approx, target, residual: approx - target, err })
}

/// `Σ_{n≤N} b±_n(x)` and its deviation from `±2 b±_0(x) √N`.
#[derive(Clone, Copy, Debug)]
pub struct PartialSumB {
    pub sum: f64,
    pub main: f64,
    pub residual: f64,
    /// `residual / (N^{1/4} log³ N)`
    pub normalized: f64,
}

pub fn partial_sum_b(n_max: usize, sign: Sign, x: f64) -> Result<PartialSumB> {
    if n_max < 1 || !(x >= 0.0) {
        return Err(ZiError::InvalidInput(format!("need N ≥ 1 and x ≥ 0, got N = {n_max}, x = {x}")));
    }
    let t = b_table(sign, x, n_max)?;
    let sum = kahan(t.values[1..=n_max].iter().map(|v| v.re));
    let nf = n_max as f64;
    let main = sign.val() * 2.0 * t.values[0].re * nf.sqrt();
    let residual = sum - main;
    let scale = nf.powf(0.25) * nf.ln().max(1.0).powi(3);
    Ok(PartialSumB { sum, main, residual, normalized: residual / scale })
}
