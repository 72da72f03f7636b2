//! Modular integrals `F±_k(τ, φ) = ½∫ K±_k(τ, z) φ(z) dz` and their Fourier coefficients.
//!
//! For τ in the closed fundamental domain the contour integral is evaluated on a curve
//! `Re σ = a` in the cusp coordinate `σ = 1/(1 - z)` (the unit semicircle is `a = 1/2`),
//! mirrored to the left half. Any other τ is reduced into the domain with
//! `F(τ + 2) = F(τ)` and `F(τ) = ±(τ/i)^{-k} F(-1/τ) + ψ(τ)`.
//! Fourier coefficients then come from an FFT of `F` on a horizontal line.

use crate::error::{Result, ZiError};
use crate::modforms::{eval_cusp_sigma, eval_all, FormValues, PointUH, Sign};
use crate::quad::gauss_legendre;
use num_complex::Complex64 as C;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

/// Test function in the contour integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phi {
    /// `(z/i)^{-s}`
    Power(C),
    /// `e^{πizx²}`
    Gauss(f64),
}

impl Phi {
    pub fn eval(&self, z: C) -> C {
        match *self {
            Phi::Power(s) => (-s * (z / C::i()).ln()).exp(),
            Phi::Gauss(x) => (C::i() * PI * z * x * x).exp(),
        }
    }
}

pub(crate) const H: f64 = 0.2;
const GL: usize = 20;
pub(crate) const CONTOURS: [f64; 4] = [0.5, 0.35, 0.2, 0.1];
const MIN_POLE_DIST: f64 = 0.1;

pub(crate) fn v0(a: f64) -> f64 {
    (a - a * a).sqrt()
}

/// Form values on one panel of the right half of `C_a`.
pub(crate) struct Panel {
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub vals: Vec<FormValues>,
}

pub(crate) fn panel(ai: usize, idx: usize) -> Arc<Panel> {
    type Cache = RwLock<HashMap<(usize, usize), Arc<Panel>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&(ai, idx)) {
        return p.clone();
    }
    let a = CONTOURS[ai];
    let lo = v0(a) + idx as f64 * H;
    let rule = gauss_legendre(GL);
    let v: Vec<f64> = rule.0.iter().map(|x| lo + 0.5 * H * (x + 1.0)).collect();
    let w: Vec<f64> = rule.1.iter().map(|x| 0.5 * H * x).collect();
    let vals = v.iter().map(|&vv| eval_cusp_sigma(C::new(a, vv))).collect();
    let p = Arc::new(Panel { v, w, vals });
    cache.write().unwrap().insert((ai, idx), p.clone());
    p
}

/// Node data of one engine: coefficients of `1/(1 - J(z)/J(τ))` for both halves.
struct NodePanel {
    lj: Vec<C>,
    j: Vec<C>,
    lc_r: Vec<C>,
    lc_l: Vec<C>,
    c_r: Vec<C>,
    c_l: Vec<C>,
}

/// Evaluator of `F±_k(·, φ)` on the whole upper half-plane.
pub struct ModIntegral {
    pub two_k: i64,
    pub sign: Sign,
    pub phi: Phi,
    nu: i64,
    l_lo: f64,
    l_hi: f64,
    panels: Vec<RwLock<Arc<Vec<Arc<NodePanel>>>>>,
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `log(1 - e^l)` on any branch, without overflow for large `Re l`.
fn ln1m_exp(l: C) -> C {
    if l.re > 30.0 {
        l + C::new(0.0, PI) + (1.0 - (-l).exp()).ln()
    } else {
        (1.0 - l.exp()).ln()
    }
}

impl std::fmt::Debug for ModIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModIntegral").field("two_k", &self.two_k).field("sign", &self.sign).field("phi", &self.phi).finish()
    }
}

impl ModIntegral {
    pub fn new(k: f64, sign: Sign, phi: Phi) -> Result<Self> {
        let two_k = crate::kernel_forms::two_k_of(k)?;
        let nu = sign.nu(k);
        let f = match sign {
            Sign::Plus => frac(k / 4.0),
            Sign::Minus => frac((k + 2.0) / 4.0),
        };
        let l_lo = if f > 0.0 { 42.0 / (2.0 * PI * f) + 2.0 } else { f64::INFINITY };
        let l_hi = 42.0 / (2.0 * PI * (1.0 - f)) + 2.0;
        Ok(ModIntegral {
            two_k,
            sign,
            phi,
            nu,
            l_lo,
            l_hi,
            panels: CONTOURS.iter().map(|_| RwLock::new(Arc::new(Vec::new()))).collect(),
        })
    }

    pub fn k(&self) -> f64 {
        self.two_k as f64 / 2.0
    }

    /// Snapshot of the node panels of contour `ai`, grown to at least `len` panels.
    fn node_panels(&self, ai: usize, len: usize) -> Arc<Vec<Arc<NodePanel>>> {
        {
            let cur = self.panels[ai].read().unwrap();
            if cur.len() >= len {
                return cur.clone();
            }
        }
        let mut w = self.panels[ai].write().unwrap();
        if w.len() < len {
            let start = w.len();
            let target = len.max(2 * start);
            let extra: Vec<Arc<NodePanel>> =
                (start..target).into_par_iter().map(|idx| Arc::new(self.build_panel(ai, idx))).collect();
            let mut v: Vec<Arc<NodePanel>> = w.as_ref().clone();
            v.extend(extra);
            *w = Arc::new(v);
        }
        w.clone()
    }

    fn build_panel(&self, ai: usize, idx: usize) -> NodePanel {
        let a = CONTOURS[ai];
        let raw = panel(ai, idx);
        let n = raw.v.len();
        let mut np = NodePanel {
            lj: Vec::with_capacity(n),
            j: Vec::with_capacity(n),
            lc_r: Vec::with_capacity(n),
            lc_l: Vec::with_capacity(n),
            c_r: Vec::with_capacity(n),
            c_l: Vec::with_capacity(n),
        };
        let wz = (4 - self.two_k) as f64;
        for i in 0..n {
            let fv = &raw.vals[i];
            let sigma = C::new(a, raw.v[i]);
            let zr = C::new(1.0, 0.0) - 1.0 / sigma;
            let zl = -zr.conj();
            let jm_r = if self.sign == Sign::Plus { fv.log_jm } else { C::new(0.0, 0.0) };
            let base_r = fv.log_theta * wz + fv.log_j * self.nu as f64 + jm_r;
            let base_l = base_r.conj();
            let dzr = C::i() / (sigma * sigma) * raw.w[i] * 0.5;
            let dzl = -C::i() / (sigma.conj() * sigma.conj()) * raw.w[i] * 0.5;
            let lr = base_r + (self.phi.eval(zr) * dzr).ln();
            let ll = base_l + (self.phi.eval(zl) * dzl).ln();
            np.lj.push(fv.log_j);
            np.j.push(fv.j);
            np.lc_r.push(lr);
            np.lc_l.push(ll);
            np.c_r.push(lr.exp());
            np.c_l.push(ll.exp());
        }
        np
    }

    fn pole_dist(a: f64, s: C) -> f64 {
        let top = v0(a);
        let dy = if s.im < top { top - s.im } else { 0.0 };
        ((s.re - a).powi(2) + dy * dy).sqrt()
    }

    /// `F(τ)` for τ in the closed fundamental domain.
    pub fn eval_domain(&self, tau: C) -> Result<C> {
        let pt = PointUH::from_c(tau)?;
        let fv = eval_all(pt)?;
        let sig = |w: C| C::new(1.0, 0.0) / (1.0 - w);
        // poles seen by the right and left halves: τ and -τ̄ with their T^{±2} translates
        let pr = [sig(tau), sig(tau + 2.0), sig(tau - 2.0)];
        let mt = -tau.conj();
        let pl = [sig(mt), sig(mt + 2.0), sig(mt - 2.0)];
        let (ai, d) = CONTOURS
            .iter()
            .enumerate()
            .map(|(i, &a)| (i, pr.iter().chain(pl.iter()).map(|&p| Self::pole_dist(a, p)).fold(f64::INFINITY, f64::min)))
            .fold((0, -1.0), |b, x| if x.1 > b.1 { x } else { b });
        if d < MIN_POLE_DIST {
            return Err(ZiError::Integrity(format!("no contour keeps distance from the pole at {tau}")));
        }
        let a = CONTOURS[ai];
        let inside = if tau.re >= 0.0 { pr[0].re > a } else { pl[0].re > a };
        let jm = if self.sign == Sign::Minus { fv.log_jm } else { C::new(0.0, 0.0) };
        let lhead = fv.log_theta * self.two_k as f64 - fv.log_j * self.nu as f64 + jm;
        let top = v0(a);
        let range = |ps: &[C; 3]| -> (usize, usize) {
            let mut lo = usize::MAX;
            let mut hi = 0;
            for p in ps {
                let vt = p.im.max(top);
                lo = lo.min(((vt - self.l_lo - top) / H).floor().max(0.0) as usize);
                hi = hi.max(((vt + self.l_hi - top) / H).ceil() as usize);
            }
            (lo, hi)
        };
        let (lo_r, hi_r) = range(&pr);
        let (lo_l, hi_l) = range(&pl);
        let fast = pr.iter().chain(pl.iter()).all(|p| p.im < 25.0) && tau.im < 25.0;
        let inv_j = 1.0 / fv.j;
        let head = lhead.exp();
        let panels = self.node_panels(ai, hi_r.max(hi_l));
        let mut acc = C::new(0.0, 0.0);
        let mut go = |lo: usize, hi: usize, right: bool| {
            for p in &panels[lo..hi] {
                let (lc, c) = if right { (&p.lc_r, &p.c_r) } else { (&p.lc_l, &p.c_l) };
                for i in 0..p.j.len() {
                    let (jz, ljz) = if right { (p.j[i], p.lj[i]) } else { (p.j[i].conj(), p.lj[i].conj()) };
                    if fast {
                        acc += head * c[i] / (1.0 - jz * inv_j);
                    } else {
                        let t = (lhead + lc[i] - ln1m_exp(ljz - fv.log_j)).exp();
                        if t.is_finite() {
                            acc += t;
                        }
                    }
                }
            }
        };
        go(lo_r, hi_r, true);
        go(lo_l, hi_l, false);
        if inside {
            acc += self.phi.eval(tau);
        }
        Ok(acc)
    }

    fn psi(&self, tau: C) -> C {
        let m = (-self.k() * (tau / C::i()).ln()).exp();
        self.phi.eval(tau) - self.sign.val() * m * self.phi.eval(-1.0 / tau)
    }

    /// `F(τ)` anywhere in the upper half-plane, by reduction into the fundamental domain.
    pub fn eval(&self, tau: C) -> Result<C> {
        if !(tau.im > 0.0) {
            return Err(ZiError::InvalidInput(format!("{tau} is not in the upper half-plane")));
        }
        let mut t = tau;
        let mut acc = C::new(0.0, 0.0);
        let mut mult = C::new(1.0, 0.0);
        for _ in 0..10_000 {
            t.re -= 2.0 * (t.re / 2.0).round();
            if t.norm_sqr() >= 1.0 {
                return Ok(acc + mult * self.eval_domain(t)?);
            }
            acc += mult * self.psi(t);
            mult *= self.sign.val() * (-self.k() * (t / C::i()).ln()).exp();
            t = -1.0 / t;
        }
        Err(ZiError::Integrity(format!("reduction of {tau} did not terminate")))
    }

    /// Fourier coefficients `c_0..c_{n_max}` of `F(τ) = Σ c_n e^{πinτ}` with error estimates.
    pub fn fourier(&self, n_max: usize) -> Result<(Vec<C>, Vec<f64>)> {
        let nm = n_max.max(8);
        let y = 1.5 / nm as f64;
        let need = nm as f64 + 45.0 / (PI * y);
        let m = (need / 64.0).ceil() as usize * 64;
        let vals: Vec<Result<C>> =
            (0..m).into_par_iter().map(|j| self.eval(C::new(-1.0 + 2.0 * j as f64 / m as f64, y))).collect();
        let mut buf: Vec<C> = Vec::with_capacity(m);
        for v in vals {
            buf.push(v?);
        }
        let scale = buf.iter().map(|v| v.norm()).sum::<f64>() / m as f64;
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let mut out = Vec::with_capacity(n_max + 1);
        let mut err = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            let g = (PI * n as f64 * y).exp();
            out.push(buf[n] * (sgn * g / m as f64));
            err.push(g * scale * 1e-14);
        }
        Ok((out, err))
    }
}
