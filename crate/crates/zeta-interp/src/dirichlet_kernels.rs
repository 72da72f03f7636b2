//! The Mellin kernels `A±_k(w, s)`, the Dirichlet series kernels `H±`, `D±`, their coefficients
//! `h±_n`, the basis functions `U_n`, `V_{ρ,j}` and the character kernels.

use crate::alpha_coeffs::{alpha_table, AlphaTable, Estimate};
use crate::analytic_nt::{l_star, lgamma_c, mobius, root_number, zeta, zeta_star, CharacterRep, ZeroTable};
use crate::error::{Result, ZiError};
use crate::modforms::Sign;
use crate::quad::gauss_legendre;
use crate::rv_basis::b_table;
use num_complex::Complex64 as C;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

const POLE_TOL: f64 = 1e-8;
/// `e^{-TAIL}` is the truncation level of the theta-type sums.
const TAIL: f64 = 42.0;

/// Evaluation context for `A±_k(·, s)` at one `(k, sign, s)`.
#[derive(Clone, Debug)]
pub struct KernelContext {
    pub k: f64,
    pub sign: Sign,
    pub s: C,
    /// End of the unrotated integration ray.
    pub t_max: f64,
    /// Minimum number of Fourier terms.
    pub depth: usize,
    table: Arc<AlphaTable>,
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

impl KernelContext {
    pub fn new(k: f64, sign: Sign, s: C) -> Result<Self> {
        let depth = 48;
        let table = alpha_table(k, sign, s, depth)?;
        Ok(KernelContext { k, sign, s, t_max: 14.0, depth, table })
    }

    pub fn alpha0(&self) -> C {
        self.table.values[0]
    }

    pub fn alpha(&self, n: usize) -> Result<C> {
        Ok(self.table_for(n)?.values[n])
    }

    fn table_for(&self, n: usize) -> Result<Arc<AlphaTable>> {
        if self.table.n_max() >= n {
            Ok(self.table.clone())
        } else {
            alpha_table(self.k, self.sign, self.s, n)
        }
    }

    /// `∫_{e^{iφ}}^{∞e^{iφ}} (F(iz) - α_0) z^{a-1} dz`.
    fn ray_integral(&self, a: C, phi: f64) -> Result<Estimate> {
        let c = phi.cos();
        let n_top = ((TAIL / (PI * c)).ceil() as usize + 2).max(self.depth);
        let table = self.table_for(n_top)?;
        let emax = table.quad_error[1..=n_top].iter().cloned().fold(0.0, f64::max);
        let ar = a.re.max(0.0);
        let mut r_end = if phi == 0.0 { self.t_max } else { 1.0 };
        while PI * r_end * c - ar * r_end.ln() < TAIL {
            r_end *= 1.05;
        }
        // panels in u = log r
        let u_end = r_end.ln();
        let mut breaks = vec![0.0];
        let mut u = 0.0;
        while u < u_end {
            let rc = u.exp() * c;
            u = (u + 0.2f64.min(0.24 * c).min(2.0 / (a.im.abs() + 1.0)).min(3.0 / (PI * rc + 1.0))).min(u_end);
            breaks.push(u);
        }
        let rule = gauss_legendre(20);
        let rot = C::from_polar(1.0, phi);
        let vals = &table.values;
        let parts: Vec<(C, f64, f64)> = breaks
            .par_windows(2)
            .map(|b| {
                let (hw, mid) = (0.5 * (b[1] - b[0]), 0.5 * (b[1] + b[0]));
                let mut acc = C::new(0.0, 0.0);
                let (mut abs, mut terr) = (0.0, 0.0);
                for (x, w) in rule.0.iter().zip(rule.1.iter()) {
                    let u = mid + hw * x;
                    let z = rot * u.exp();
                    let q = (-PI * z).exp();
                    let n = ((TAIL / (PI * z.re)).ceil() as usize + 2).min(n_top);
                    let mut g = C::new(0.0, 0.0);
                    for m in (1..=n).rev() {
                        g = (g + vals[m]) * q;
                    }
                    let za = (a * z.ln()).exp();
                    let t = g * za * (w * hw);
                    acc += t;
                    abs += t.norm();
                    let qn = q.norm();
                    terr += emax * qn / (1.0 - qn) * za.norm() * w * hw;
                }
                (acc, abs, terr)
            })
            .collect();
        let mut value = C::new(0.0, 0.0);
        let (mut abs, mut terr) = (0.0, 0.0);
        for p in &parts {
            value += p.0;
            abs += p.1;
            terr += p.2;
        }
        Ok(Estimate { value, err: terr + 1e-15 * abs })
    }

    /// `A±_k(w, s)` for any `w` off the poles `0, k, s, k - s`, split at `e^{iφ}` on a rotated ray.
    pub fn a_eval(&self, w: C) -> Result<Estimate> {
        let (k, sg, s, a0) = (self.k, self.sign.val(), self.s, self.alpha0());
        let poles = [(re(0.0), -a0), (re(k), a0 * sg), (s, re(1.0)), (re(k) - s, re(-sg))];
        for (p, r) in poles {
            if (w - p).norm() < POLE_TOL && (p != re(0.0) && p != re(k) || r.norm() > 0.0) {
                return Err(ZiError::Pole { at: format!("{p}"), residue: format!("{r}") });
            }
        }
        let phi = if w.im.abs() > 1.0 { w.im.signum() * (PI / 2.0 - 1.5 / w.im.abs()) } else { 0.0 };
        let mut value = C::new(0.0, 0.0);
        for (b, coef) in poles {
            if coef.norm() > 0.0 {
                value += coef * (C::new(0.0, -phi) * (b - w)).exp() / (w - b);
            }
        }
        let i1 = self.ray_integral(w, phi)?;
        let i2 = self.ray_integral(re(k) - w, -phi)?;
        Ok(Estimate { value: value + i1.value + sg * i2.value, err: i1.err + i2.err })
    }

    /// `π^{-w}Γ(w) Σ_{n≤N} α_n n^{-w}`, meaningful where the series converges.
    pub fn a_series(&self, w: C, n_max: usize) -> Result<C> {
        let t = self.table_for(n_max)?;
        let sum: C = (1..=n_max).map(|n| t.values[n] * (-w * (n as f64).ln()).exp()).sum();
        Ok((lgamma_c(w)? - w * PI.ln()).exp() * sum)
    }
}

/// `A±_k(w, s)` with a fresh context.
pub fn a_eval(w: C, s: C, k: f64, sign: Sign) -> Result<Estimate> {
    KernelContext::new(k, sign, s)?.a_eval(w)
}

/// `(2πi)^{-1}∮ f` over `M` points of the circle `|w - c| = r`.
pub fn contour_residue<F: Fn(C) -> Result<C> + Sync>(f: F, c: C, r: f64, m: usize) -> Result<C> {
    let vals: Vec<Result<C>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let e = C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            f(c + e * r).map(|v| v * e * r)
        })
        .collect();
    let mut acc = C::new(0.0, 0.0);
    for v in vals {
        acc += v?;
    }
    Ok(acc / m as f64)
}

/// `ζ*(w)`, through `ζ*(1 - w)` left of the critical line.
fn zstar(w: C) -> Result<C> {
    if w.re < 0.5 {
        zeta_star(re(1.0) - w)
    } else {
        zeta_star(w)
    }
}

fn gamma_r(w: C) -> Result<C> {
    Ok((lgamma_c(w / 2.0)? - w / 2.0 * PI.ln()).exp())
}

fn near_special_s(s: C) -> Option<C> {
    [re(0.0), re(1.0)].into_iter().find(|&p| (s - p).norm() < 1e-6)
}

/// Value at a removable point `s0` as the mean over a small circle.
fn removable<F: Fn(C) -> Result<Estimate> + Sync>(f: F, s0: C) -> Result<Estimate> {
    let m = 16;
    let r = 0.05;
    let vals: Vec<Result<Estimate>> = (0..m).into_par_iter().map(|j| f(s0 + C::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / m as f64))).collect();
    let mut value = C::new(0.0, 0.0);
    let mut err = 0.0;
    for v in vals {
        let v = v?;
        value += v.value;
        err += v.err;
    }
    Ok(Estimate { value: value / m as f64, err: err / m as f64 })
}

/// `H±(w, s) = (ζ*(s)/2)(A±_{1/2}(w/2, s/2)/ζ*(w) - [+] α⁺_1(s/2))`.
pub fn h_eval(w: C, s: C, sign: Sign) -> Result<Estimate> {
    if let Some(s0) = near_special_s(s) {
        return removable(|t| h_eval(w, t, sign), s0);
    }
    if (w - 1.0).norm() < POLE_TOL || w.norm() < POLE_TOL {
        return Err(ZiError::Unsupported(format!("w = {w} is a pole of ζ*")));
    }
    let ctx = KernelContext::new(0.5, sign, s / 2.0)?;
    let a = ctx.a_eval(w / 2.0).map_err(|e| match e {
        ZiError::Pole { at, residue } => ZiError::Pole { at: format!("w/2 = {at}"), residue },
        e => e,
    })?;
    let zw = zstar(w)?;
    if zeta(w)?.norm() < 1e-12 {
        return Err(ZiError::Pole { at: format!("{w}"), residue: "zero of ζ".into() });
    }
    let zs = zeta_star(s)? / 2.0;
    let mut value = a.value / zw;
    if sign == Sign::Plus {
        value -= ctx.alpha(1)?;
    }
    Ok(Estimate { value: zs * value, err: (zs / zw).norm() * a.err })
}

/// `D±(w, s) = H±(w, s) ζ(w)/ζ(s)`.
pub fn d_eval(w: C, s: C, sign: Sign) -> Result<Estimate> {
    let ctx = KernelContext::new(0.5, sign, s / 2.0)?;
    let a = ctx.a_eval(w / 2.0)?;
    let gw = gamma_r(w)?;
    let gs = gamma_r(s)? / 2.0;
    let mut value = a.value / gw;
    if sign == Sign::Plus {
        value -= ctx.alpha(1)? * zeta(w)?;
    }
    Ok(Estimate { value: gs * value, err: (gs / gw).norm() * a.err })
}

/// `Σ_{d²|n} μ(d) α_{n/d²}` from a table.
fn moebius_alpha(n: usize, t: &AlphaTable) -> C {
    let mut acc = C::new(0.0, 0.0);
    let mut d = 1;
    while d * d <= n {
        if n % (d * d) == 0 {
            acc += mobius(d as u64) as f64 * t.values[n / (d * d)];
        }
        d += 1;
    }
    acc
}

/// `h±_n(s) = (ζ*(s)/2) Σ_{d²|n} μ(d) α±_{n/d²,1/2}(s/2)`, with `h⁺_1 = 0`.
pub fn h_coeff(n: usize, sign: Sign, s: C) -> Result<Estimate> {
    if n == 0 {
        return Err(ZiError::InvalidInput("h_n needs n ≥ 1".into()));
    }
    if sign == Sign::Plus && n == 1 {
        return Ok(Estimate { value: re(0.0), err: 0.0 });
    }
    if let Some(s0) = near_special_s(s) {
        return removable(|t| h_coeff(n, sign, t), s0);
    }
    let t = alpha_table(0.5, sign, s / 2.0, n)?;
    let zs = zeta_star(s)? / 2.0;
    let err: f64 = (1..=n).filter(|m| n % m == 0).map(|m| t.quad_error[m]).sum();
    Ok(Estimate { value: zs * moebius_alpha(n, &t), err: zs.norm() * err })
}

/// All `h±_n(s)` for `1 ≤ n ≤ N` (index 0 unused).
pub fn h_coeffs(n_max: usize, sign: Sign, s: C) -> Result<Vec<C>> {
    if let Some(s0) = near_special_s(s) {
        let m = 16;
        let mut acc = vec![C::new(0.0, 0.0); n_max + 1];
        for j in 0..m {
            let v = h_coeffs(n_max, sign, s0 + C::from_polar(0.05, 2.0 * PI * (j as f64 + 0.5) / m as f64))?;
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b / m as f64;
            }
        }
        return Ok(acc);
    }
    let t = alpha_table(0.5, sign, s / 2.0, n_max)?;
    let zs = zeta_star(s)? / 2.0;
    let mut out: Vec<C> = (0..=n_max).map(|n| if n == 0 { re(0.0) } else { zs * moebius_alpha(n, &t) }).collect();
    if sign == Sign::Plus && n_max >= 1 {
        out[1] = re(0.0);
    }
    Ok(out)
}

/// `U_n(z) = h⁻_n(1/2 + iz)/(2π n^{1/4})`.
pub fn u_basis(n: usize, z: C) -> Result<Estimate> {
    let h = h_coeff(n, Sign::Minus, C::new(0.5, 0.0) + C::i() * z)?;
    let c = 2.0 * PI * (n as f64).powf(0.25);
    Ok(Estimate { value: h.value / c, err: h.err / c })
}

/// `u±_n(x) = Σ_{k≥1} Σ_{d²|n} μ(d) b±_{n/d²}(kx)` for `x > 0`.
pub fn u_fourier_side(n: usize, sign: Sign, x: f64) -> Result<f64> {
    if !(x > 0.0) || n == 0 {
        return Err(ZiError::InvalidInput(format!("need n ≥ 1 and x > 0, got n = {n}, x = {x}")));
    }
    let mut acc = 0.0;
    let mut k = 1;
    loop {
        let t = b_table(sign, k as f64 * x, n)?;
        let mut term = 0.0;
        let mut d = 1;
        while d * d <= n {
            if n % (d * d) == 0 {
                term += mobius(d as u64) as f64 * t.values[n / (d * d)].re;
            }
            d += 1;
        }
        acc += term;
        if k as f64 * x > 14.0 {
            return Ok(acc);
        }
        k += 1;
    }
}

/// `Res_{w=ρ} H±(w, s) = (ζ*(s)/2) A±_{1/2}(ρ/2, s/2)/ζ*'(ρ)` for a simple zero.
pub fn residue_at_zero(rho: C, s: C, sign: Sign) -> Result<Estimate> {
    if let Some(s0) = near_special_s(s) {
        return removable(|t| residue_at_zero(rho, t, sign), s0);
    }
    let dz = contour_residue(|w| Ok(zeta_star(w)? / ((w - rho) * (w - rho))), rho, 0.1, 48)?;
    let a = KernelContext::new(0.5, sign, s / 2.0)?.a_eval(rho / 2.0)?;
    let zs = zeta_star(s)? / 2.0;
    Ok(Estimate { value: zs * a.value / dz, err: (zs / dz).norm() * a.err })
}

/// Number of trapezoid points on the `V` circles.
pub const V_POINTS: usize = 64;

/// `V_{ρ,j}(z) = -(2πi)^{-1}∮_{|w-ρ|=ε} i^{-j}(w-ρ)^j/j! H₋(w, 1/2+iz) dw`.
pub fn v_basis(rho: C, j: usize, z: C, eps: f64, zeros: &ZeroTable) -> Result<Estimate> {
    let s = C::new(0.5, 0.0) + C::i() * z;
    let guard = [(rho - s).norm(), (rho - (re(1.0) - s)).norm(), gap_to_other_zeros(rho, zeros), (rho - 1.0).norm(), rho.norm()];
    if guard.iter().any(|&g| !(eps < g)) || !(eps > 0.0) {
        return Err(ZiError::InvalidInput(format!("ε = {eps} violates the guard distances {guard:?}")));
    }
    v_contour(rho, j, s, eps, &[])
}

fn gap_to_other_zeros(rho: C, zeros: &ZeroTable) -> f64 {
    zeros
        .ordinates
        .iter()
        .filter(|&&g| (g - rho.im).abs() > 1e-6)
        .flat_map(|&g| [(C::new(0.5, g) - rho).norm(), (C::new(0.5, -g) - rho).norm()])
        .fold(f64::INFINITY, f64::min)
}

/// Contour value minus the residues at the listed kernel poles inside the circle.
fn v_contour(rho: C, j: usize, s: C, eps: f64, inside: &[C]) -> Result<Estimate> {
    let fact: f64 = (1..=j).map(|x| x as f64).product();
    let ij = C::i().powi(-(j as i32));
    let weight = |w: C| ij * (w - rho).powi(j as i32) / fact;
    let vals: Vec<Result<(C, f64)>> = (0..V_POINTS)
        .into_par_iter()
        .map(|m| {
            let e = C::from_polar(1.0, 2.0 * PI * m as f64 / V_POINTS as f64);
            let w = rho + e * eps;
            let h = h_eval(w, s, Sign::Minus)?;
            Ok((weight(w) * h.value * e * eps, h.err * eps * weight(w).norm()))
        })
        .collect();
    let mut acc = C::new(0.0, 0.0);
    let mut err = 0.0;
    for v in vals {
        let (a, e) = v?;
        acc += a;
        err += e;
    }
    acc /= V_POINTS as f64;
    err /= V_POINTS as f64;
    // the kernel poles at s and 1 - s both carry residue +1
    for &p in inside {
        acc -= weight(p);
    }
    Ok(Estimate { value: -acc, err: err + 1e-13 })
}

/// `V_{ρ,j}(z)` with an automatic radius; kernel poles close to `ρ` are enclosed and removed.
pub fn v_basis_auto(rho: C, j: usize, z: C, zeros: &ZeroTable) -> Result<Estimate> {
    let s = C::new(0.5, 0.0) + C::i() * z;
    let gap = gap_to_other_zeros(rho, zeros).min((rho - 1.0).norm()).min(rho.norm());
    let cap = (0.4 * gap).min(1.0);
    let pts = [s, re(1.0) - s];
    let d = pts.iter().map(|p| (p - rho).norm()).fold(f64::INFINITY, f64::min);
    // keep every pole at least 0.3 ε away from the circle
    let mut eps = cap;
    if d >= cap * 1.3 {
        return v_contour(rho, j, s, eps, &[]);
    }
    if d > 0.5 * cap {
        eps = 0.4 * d;
        return v_contour(rho, j, s, eps, &[]);
    }
    let inside: Vec<C> = pts.iter().cloned().filter(|p| (p - rho).norm() < 0.7 * eps).collect();
    if inside.iter().chain(pts.iter()).any(|p| ((p - rho).norm() - eps).abs() < 0.3 * eps) {
        eps = cap * 0.6;
    }
    let inside: Vec<C> = pts.iter().cloned().filter(|p| (p - rho).norm() < eps).collect();
    v_contour(rho, j, s, eps, &inside)
}

/// `H_δ(w, s; χ)`: `L*(s,χ)/(2L*(w,χ)) A^δ_{1/2}(w/2, s/2)` for even `χ`,
/// `L*(s,χ)/(2L*(w,χ)) A^δ_{3/2}((w+1)/2, (s+1)/2)` for odd `χ`.
pub fn h_chi_eval(w: C, s: C, delta: Sign, chi: &CharacterRep) -> Result<Estimate> {
    if !chi.primitive {
        return Err(ZiError::InvalidInput(format!("character modulo {} is not primitive", chi.q)));
    }
    let (k, ww, ss) = if chi.even { (0.5, w / 2.0, s / 2.0) } else { (1.5, (w + 1.0) / 2.0, (s + 1.0) / 2.0) };
    let a = KernelContext::new(k, delta, ss)?.a_eval(ww)?;
    let lw = if w.re < -0.5 { root_number(chi)? * l_star(re(1.0) - w, &chi.conj())? } else { l_star(w, chi)? };
    let f = l_star(s, chi)? / (lw * 2.0);
    Ok(Estimate { value: f * a.value, err: f.norm() * a.err })
}

/// `H_δ(w,s;χ)/L*(s,χ) - δ w̄(χ) H_δ(1-w,s;χ̄)/L*(s,χ̄)`, which vanishes identically; for real `χ`
/// this is the plain reflection `H_δ(w,s;χ) - δ w(χ) H_δ(1-w,s;χ)` up to the factor `L*(s,χ)`.
pub fn h_chi_fe_residual(w: C, s: C, delta: Sign, chi: &CharacterRep) -> Result<C> {
    let cb = chi.conj();
    let a = h_chi_eval(w, s, delta, chi)?.value / l_star(s, chi)?;
    let b = h_chi_eval(re(1.0) - w, s, delta, &cb)?.value / l_star(s, &cb)?;
    Ok(a - delta.val() * root_number(chi)?.conj() * b)
}

/// `Σ_{n≤N} h_n n^{-w/2}`.
pub fn h_series(w: C, coeffs: &[C]) -> C {
    coeffs.iter().enumerate().skip(1).map(|(n, h)| h * (-w / 2.0 * (n as f64).ln()).exp()).sum()
}

/// Derivative of an analytic function by a Cauchy integral.
pub fn cauchy_derivative<F: Fn(C) -> Result<C> + Sync>(f: F, at: C, r: f64) -> Result<C> {
    contour_residue(|w| Ok(f(w)? / ((w - at) * (w - at))), at, r, 32)
}
