//! The coefficients `α±_{n,k}(s)` of the modular integrals `F±_k(τ, s)`, and `F` itself.

use crate::analytic_nt::gamma_c;
use crate::error::{Result, ZiError};
use crate::kernel_forms::{g_form, two_k_of, KernelCoefficientForm};
use crate::modforms::Sign;
use crate::modint::{panel, ModIntegral, Phi, CONTOURS};
use num_complex::Complex64 as C;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// A value with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: C,
    pub err: f64,
}

/// Default absolute tolerance for `α_n`.
pub fn default_tol(n: usize) -> f64 {
    if n <= 100 {
        1e-9
    } else {
        1e-7
    }
}

/// `c(s) = 2^{k+1} e^{π|Im s|/2}`, the growth constant of the coefficient bounds.
pub fn growth_constant(k: f64, s: C) -> f64 {
    2f64.powf(k + 1.0) * (PI * s.im.abs() / 2.0).exp()
}

/// `½∫ g(z)φ(z)dz` over one contour from `-1` to `1`, with a rounding bound.
fn contour_integral(g: &KernelCoefficientForm, phi: Phi, ai: usize) -> (C, f64) {
    let a = CONTOURS[ai];
    let mut acc = C::new(0.0, 0.0);
    let mut round = 0.0;
    let mut abs_total = 0.0;
    let mut quiet = 0;
    for idx in 0..4000 {
        let p = panel(ai, idx);
        let mut part = C::new(0.0, 0.0);
        let mut part_abs = 0.0;
        for i in 0..p.v.len() {
            let sigma = C::new(a, p.v[i]);
            let zr = 1.0 - 1.0 / sigma;
            let zl = -zr.conj();
            let dzr = C::i() / (sigma * sigma) * p.w[i] * 0.5;
            let dzl = -C::i() / (sigma.conj() * sigma.conj()) * p.w[i] * 0.5;
            let (gr, br) = g.eval_values_with_bound(&p.vals[i]);
            let (gl, bl) = g.eval_values_with_bound(&p.vals[i].conj());
            let (fr, fl) = (phi.eval(zr) * dzr, phi.eval(zl) * dzl);
            let t = gr * fr + gl * fl;
            if t.is_finite() {
                part += t;
                part_abs += t.norm();
            }
            round += br * fr.norm() + bl * fl.norm();
        }
        acc += part;
        abs_total += part_abs;
        if p.v[0] > 2.0 && part_abs <= 1e-18 * abs_total.max(1.0) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    (acc, round + 1e-16 * abs_total)
}

/// `½∫_{-1}^{1} g(z)φ(z)dz` along the unit semicircle; the error estimate compares the
/// semicircle with a deformed contour and adds the rounding bound.
pub fn semicircle_integral(g: &KernelCoefficientForm, phi: Phi) -> Estimate {
    let (v0, r0) = contour_integral(g, phi, 0);
    let (v1, r1) = contour_integral(g, phi, 1);
    Estimate { value: v0, err: (v0 - v1).norm() + r0.max(r1) }
}

/// Coefficient `n` of `F±_k(·, φ)` by direct quadrature of `g±_{n,k}`; zero below `ν`.
pub fn coeff_direct(n: usize, k: f64, sign: Sign, phi: Phi) -> Result<Estimate> {
    if (n as i64) < sign.nu(k) {
        two_k_of(k)?;
        return Ok(Estimate { value: C::new(0.0, 0.0), err: 0.0 });
    }
    let g = g_form(n as i64, k, sign)?;
    Ok(semicircle_integral(&g, phi))
}

/// Coefficient `n` of `F±_k(·, φ)` to tolerance `tol`: direct quadrature where it is accurate
/// enough, otherwise the tabulated Fourier coefficient.
pub fn coeff_with_error(n: usize, k: f64, sign: Sign, phi: Phi, tol: f64) -> Result<Estimate> {
    if !(tol > 0.0) {
        return Err(ZiError::InvalidInput(format!("tolerance {tol} is not positive")));
    }
    let mut best: Option<Estimate> = None;
    if n <= 8 {
        let d = coeff_direct(n, k, sign, phi)?;
        if d.err <= tol {
            return Ok(d);
        }
        best = Some(d);
    }
    let t = mod_table(k, sign, phi, n)?;
    let e = Estimate { value: t.values[n], err: t.quad_error[n] };
    let e = match best {
        Some(d) if d.err < e.err => d,
        _ => e,
    };
    if e.err > tol {
        return Err(ZiError::Tolerance { requested: tol, achieved: e.err });
    }
    Ok(e)
}

/// `α±_{n,k}(s)` by direct quadrature of `g±_{n,k}`; zero below `ν`.
pub fn alpha_direct(n: usize, k: f64, sign: Sign, s: C) -> Result<Estimate> {
    coeff_direct(n, k, sign, Phi::Power(s))
}

/// Fourier coefficients `c_0..c_N` of `F±_k(·, φ)` for fixed `(k, sign, φ)`.
#[derive(Debug)]
pub struct ModTable {
    pub k: f64,
    pub sign: Sign,
    pub phi: Phi,
    pub values: Vec<C>,
    pub quad_error: Vec<f64>,
    engine: Arc<ModIntegral>,
}

/// The table of `α±_{n,k}(s)`, i.e. the case `φ(z) = (z/i)^{-s}`.
pub type AlphaTable = ModTable;

impl ModTable {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// The exponent `s` when `φ(z) = (z/i)^{-s}`.
    pub fn s(&self) -> Option<C> {
        match self.phi {
            Phi::Power(s) => Some(s),
            Phi::Gauss(_) => None,
        }
    }

    /// `F(τ)` for `τ` in the closed fundamental domain by contour quadrature.
    fn contour(&self, tau: C) -> Result<Estimate> {
        let v = self.engine.eval_domain(tau)?;
        Ok(Estimate { value: v, err: 1e-11 * v.norm().max(1.0) })
    }
}

type Key = (i64, Sign, u8, u64, u64);

fn key(k: f64, sign: Sign, phi: Phi) -> Result<Key> {
    let two_k = two_k_of(k)?;
    Ok(match phi {
        Phi::Power(s) => (two_k, sign, 0, s.re.to_bits(), s.im.to_bits()),
        Phi::Gauss(x) => (two_k, sign, 1, x.abs().to_bits(), 0),
    })
}

fn engine(k: f64, sign: Sign, phi: Phi) -> Result<Arc<ModIntegral>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<ModIntegral>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let kk = key(k, sign, phi)?;
    let mut c = cache.lock().unwrap();
    if let Some(e) = c.get(&kk) {
        return Ok(e.clone());
    }
    let e = Arc::new(ModIntegral::new(k, sign, phi)?);
    c.insert(kk, e.clone());
    Ok(e)
}

/// The cached coefficient table for `(k, sign, φ)`, grown to at least `n_max`.
pub fn mod_table(k: f64, sign: Sign, phi: Phi, n_max: usize) -> Result<Arc<ModTable>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<ModTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let kk = key(k, sign, phi)?;
    let old = cache.lock().unwrap().get(&kk).cloned();
    if let Some(t) = &old {
        if t.n_max() >= n_max {
            return Ok(t.clone());
        }
    }
    let target = n_max.max(64).max(old.as_ref().map_or(0, |t| 2 * t.n_max()));
    let eng = engine(k, sign, phi)?;
    let (mut values, quad_error) = eng.fourier(target)?;
    let nu = sign.nu(k).max(0) as usize;
    for v in values.iter_mut().take(nu) {
        *v = C::new(0.0, 0.0);
    }
    let t = Arc::new(ModTable { k, sign, phi, values, quad_error, engine: eng });
    let mut c = cache.lock().unwrap();
    let keep = match c.get(&kk) {
        Some(cur) if cur.n_max() >= t.n_max() => cur.clone(),
        _ => {
            c.insert(kk, t.clone());
            t
        }
    };
    Ok(keep)
}

/// The cached table of `α±_{n,k}(s)`, grown to at least `n_max`.
pub fn alpha_table(k: f64, sign: Sign, s: C, n_max: usize) -> Result<Arc<AlphaTable>> {
    mod_table(k, sign, Phi::Power(s), n_max)
}

/// `α±_{n,k}(s)` to absolute tolerance `tol`: direct quadrature where it is accurate enough,
/// otherwise the Fourier coefficient of the tabulated modular integral.
pub fn alpha_with_error(n: usize, k: f64, sign: Sign, s: C, tol: f64) -> Result<Estimate> {
    coeff_with_error(n, k, sign, Phi::Power(s), tol)
}

pub fn alpha(n: usize, k: f64, sign: Sign, s: C, tol: f64) -> Result<C> {
    Ok(alpha_with_error(n, k, sign, s, tol)?.value)
}

fn in_fundamental_domain(tau: C) -> bool {
    tau.re.abs() <= 1.0 + 1e-12 && tau.norm() >= 1.0 - 1e-12
}

/// Fourier sum of a table at `τ`, with tail bound; `None` if the table is too short.
fn fourier_sum(t: &ModTable, tau: C) -> Option<Estimate> {
    let q = (C::i() * PI * tau).exp();
    let r = q.norm();
    let mut acc = C::new(0.0, 0.0);
    let mut err = 0.0;
    let mut p = C::new(1.0, 0.0);
    for (v, e) in t.values.iter().zip(&t.quad_error) {
        acc += v * p;
        err += e * p.norm();
        p *= q;
    }
    // tail: |α_n| ≤ A n^{k} beyond the table, with A fitted on the last entries
    let n = t.n_max() as f64;
    let a = t.values.iter().enumerate().skip(t.n_max() / 2).map(|(i, v)| v.norm() / (i.max(1) as f64).powf(t.k)).fold(0.0, f64::max);
    let tail = a * (2.0 * n).powf(t.k) * r.powf(n + 1.0) / (1.0 - r) * (1.0 + (t.k / n) / (1.0 - r));
    if tail > 1e-12 {
        return None;
    }
    Some(Estimate { value: acc, err: err + tail })
}

/// `F±_k(τ, s)`: Fourier sum when `Im τ ≥ 1/2`, contour integral on the fundamental domain.
pub fn f_eval(tau: C, k: f64, sign: Sign, s: C) -> Result<Estimate> {
    if tau.im >= 0.5 {
        let mut n = ((36.0 / (PI * tau.im)).ceil() as usize).max(64);
        loop {
            let t = alpha_table(k, sign, s, n)?;
            if let Some(e) = fourier_sum(&t, tau) {
                return Ok(e);
            }
            n = 2 * t.n_max();
        }
    }
    if in_fundamental_domain(tau) {
        return alpha_table(k, sign, s, 64)?.contour(tau);
    }
    Err(ZiError::Unsupported(format!("{tau} lies below Im τ = 1/2 and outside the fundamental domain")))
}

/// `F(τ)` from a given table.
pub fn f_eval_with_table(tau: C, table: &ModTable) -> Result<Estimate> {
    if tau.im >= 0.5 {
        return fourier_sum(table, tau).ok_or_else(|| ZiError::Tolerance { requested: 1e-12, achieved: f64::INFINITY });
    }
    if in_fundamental_domain(tau) {
        return table.contour(tau);
    }
    Err(ZiError::Unsupported(format!("{tau} lies below Im τ = 1/2 and outside the fundamental domain")))
}

/// Partial sum of the coefficients and its deviation from the two main terms.
#[derive(Clone, Copy, Debug)]
pub struct PartialSum {
    pub sum: C,
    pub main: C,
    pub residual: C,
}

/// `Σ_{n≤x} α_n` against `±α_0 (πx)^k/Γ(k+1) + (πx)^s/Γ(s+1)`.
pub fn partial_sum_alpha(x: f64, k: f64, sign: Sign, s: C) -> Result<PartialSum> {
    if !(k > 0.0 && k < 2.0) || s.re < k / 2.0 - 1e-12 || s.re > k + 1e-12 || !(x >= 1.0) {
        return Err(ZiError::InvalidInput(format!("need 0 < k < 2, k/2 ≤ Re s ≤ k and x ≥ 1; got k = {k}, s = {s}, x = {x}")));
    }
    let n = x.floor() as usize;
    let t = alpha_table(k, sign, s, n)?;
    let mut sum = C::new(0.0, 0.0);
    let mut comp = C::new(0.0, 0.0);
    for v in &t.values[..=n] {
        // compensated summation
        let y = v - comp;
        let u = sum + y;
        comp = (u - sum) - y;
        sum = u;
    }
    let px = PI * x;
    let main = t.values[0] * sign.val() * px.powf(k) / gamma_c(C::new(k + 1.0, 0.0))?
        + (s * px.ln()).exp() / gamma_c(s + 1.0)?;
    Ok(PartialSum { sum, main, residual: sum - main })
}
