//! Verification of the zeta-zero interpolation formula: test functions, the operator `R_δ`,
//! the reconstruction sum, the explicit formula and the functional `W`.

use crate::alpha_coeffs::Estimate;
use crate::analytic_nt::{digamma, von_mangoldt, zeta, zeta_star, ZeroTable};
use crate::dirichlet_kernels::{cauchy_derivative, h_coeffs, h_eval, KernelContext};
use crate::error::{Result, ZiError};
use crate::modforms::Sign;
use crate::quad::{adaptive, adaptive_panels, gauss_legendre, gl_fixed};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Test function families; all are entire.
#[derive(Clone, Debug, PartialEq)]
pub enum TestKind {
    /// `e^{-πx²/σ²}`
    Gaussian { sigma: f64 },
    /// `e^{-πx²/σ²} cos(2πβx)`
    ModulatedGaussian { sigma: f64, beta: f64 },
    /// `Σ c_j e^{-πx²/σ_j²}` with entries `(c_j, σ_j)`
    Mixture(Vec<(f64, f64)>),
}

/// Constants with `|f(x+iy)| ≤ c (1+|x|)^{-2}` for `|y| ≤ strip`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayCertificate {
    pub c: f64,
    pub strip: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    pub parity: Parity,
    pub strip_halfwidth: f64,
    pub certificate: DecayCertificate,
}

fn gauss(z: C, sigma: f64) -> C {
    (-PI * z * z / (sigma * sigma)).exp()
}

impl TestFunction {
    fn build(kind: TestKind) -> Result<Self> {
        let ok = match &kind {
            TestKind::Gaussian { sigma } => *sigma > 0.0,
            TestKind::ModulatedGaussian { sigma, beta } => *sigma > 0.0 && beta.is_finite(),
            TestKind::Mixture(v) => !v.is_empty() && v.iter().all(|(c, s)| c.is_finite() && *s > 0.0),
        };
        if !ok {
            return Err(ZiError::InvalidInput(format!("bad test function parameters {kind:?}")));
        }
        let strip = 1.0;
        let mut f = TestFunction {
            kind,
            parity: Parity::Even,
            strip_halfwidth: f64::INFINITY,
            certificate: DecayCertificate { c: 0.0, strip },
        };
        f.certificate.c = f.decay_constant(strip);
        Ok(f)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::build(TestKind::Gaussian { sigma })
    }

    pub fn modulated_gaussian(sigma: f64, beta: f64) -> Result<Self> {
        Self::build(TestKind::ModulatedGaussian { sigma, beta })
    }

    pub fn mixture(terms: Vec<(f64, f64)>) -> Result<Self> {
        Self::build(TestKind::Mixture(terms))
    }

    /// Parses `gaussian:SIGMA` or `modgauss:SIGMA,BETA`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, args) = text.split_once(':').ok_or_else(|| ZiError::InvalidInput(format!("test function {text}")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>().map_err(|e| ZiError::InvalidInput(format!("{a}: {e}"))))
            .collect::<Result<_>>()?;
        match (name, nums.as_slice()) {
            ("gaussian", [s]) => Self::gaussian(*s),
            ("modgauss", [s, b]) => Self::modulated_gaussian(*s, *b),
            _ => Err(ZiError::InvalidInput(format!("unknown test function {text}"))),
        }
    }

    fn widest_sigma(&self) -> f64 {
        match &self.kind {
            TestKind::Gaussian { sigma } | TestKind::ModulatedGaussian { sigma, .. } => *sigma,
            TestKind::Mixture(v) => v.iter().map(|t| t.1).fold(0.0, f64::max),
        }
    }

    /// Bound on `|f(x+iy)|(1+|x|)²` for `|y| ≤ strip`, by termwise majorants on a grid.
    fn decay_constant(&self, strip: f64) -> f64 {
        let env = |x: f64| -> f64 {
            let terms: Vec<(f64, f64, f64)> = match &self.kind {
                TestKind::Gaussian { sigma } => vec![(1.0, *sigma, 0.0)],
                TestKind::ModulatedGaussian { sigma, beta } => vec![(1.0, *sigma, *beta)],
                TestKind::Mixture(v) => v.iter().map(|&(c, s)| (c.abs(), s, 0.0)).collect(),
            };
            terms
                .iter()
                .map(|&(c, s, b)| c * (PI * (strip * strip - x * x) / (s * s)).exp() * (2.0 * PI * b.abs() * strip).cosh())
                .sum::<f64>()
                * (1.0 + x).powi(2)
        };
        let top = 12.0 * self.widest_sigma() + 10.0;
        (0..=4000).map(|i| env(top * i as f64 / 4000.0)).fold(0.0, f64::max) * 1.01
    }

    pub fn f(&self, z: C) -> C {
        match &self.kind {
            TestKind::Gaussian { sigma } => gauss(z, *sigma),
            TestKind::ModulatedGaussian { sigma, beta } => gauss(z, *sigma) * (2.0 * PI * beta * z).cos(),
            TestKind::Mixture(v) => v.iter().map(|&(c, s)| gauss(z, s) * c).sum(),
        }
    }

    pub fn df(&self, z: C) -> C {
        let dg = |z: C, s: f64| gauss(z, s) * (-2.0 * PI * z / (s * s));
        match &self.kind {
            TestKind::Gaussian { sigma } => dg(z, *sigma),
            TestKind::ModulatedGaussian { sigma, beta } => {
                let w = 2.0 * PI * beta;
                dg(z, *sigma) * (w * z).cos() - gauss(z, *sigma) * w * (w * z).sin()
            }
            TestKind::Mixture(v) => v.iter().map(|&(c, s)| dg(z, s) * c).sum(),
        }
    }

    /// `f̂(ξ) = ∫ f(x) e^{-2πixξ} dx`.
    pub fn fhat(&self, xi: C) -> C {
        match &self.kind {
            TestKind::Gaussian { sigma } => gauss(xi * *sigma, 1.0) * *sigma,
            TestKind::ModulatedGaussian { sigma, beta } => {
                (gauss((xi - *beta) * *sigma, 1.0) + gauss((xi + *beta) * *sigma, 1.0)) * (0.5 * sigma)
            }
            TestKind::Mixture(v) => v.iter().map(|&(c, s)| gauss(xi * s, 1.0) * (c * s)).sum(),
        }
    }

    /// Half-width beyond which `|f(x)|` is below `tol` on the real line.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let s = self.widest_sigma();
        s * ((self.certificate.c.max(1.0) / tol).ln() / PI).sqrt()
    }
}

/// `F(s) = f((s - 1/2)/i)`.
pub fn big_f(f: &TestFunction, s: C) -> C {
    f.f((s - 0.5) / C::i())
}

/// `F_δ(s) = (F(s) ± F(1 - s))/2`.
pub fn f_delta(f: &TestFunction, s: C, delta: Sign) -> C {
    (big_f(f, s) + delta.val() * big_f(f, C::new(1.0, 0.0) - s)) / 2.0
}

fn s_of(z: C) -> C {
    C::new(0.5, 0.0) + C::i() * z
}

fn z_of(s: C) -> C {
    (s - 0.5) / C::i()
}

/// A simple zero `ρ = 1/2 + iγ` with `ζ*'(ρ)`.
#[derive(Clone, Copy, Debug)]
pub struct ZeroPoint {
    pub rho: C,
    pub dstar: C,
}

impl ZeroPoint {
    pub fn new(gamma: f64) -> Result<Self> {
        let rho = C::new(0.5, gamma);
        let dstar = cauchy_derivative(zeta_star, rho, 0.1)?;
        Ok(ZeroPoint { rho, dstar })
    }

    /// `Res_{w=ρ} H₋(w, s)`; singular in `s` only at removable points.
    fn residue_raw(&self, s: C) -> Result<Estimate> {
        let a = KernelContext::new(0.5, Sign::Minus, s / 2.0)?.a_eval(self.rho / 2.0)?;
        let zs = zeta_star(s)? / 2.0;
        Ok(Estimate { value: zs * a.value / self.dstar, err: (zs / self.dstar).norm() * a.err })
    }

    /// `V_{ρ,0}(z) = -Res_{w=ρ} H₋(w, 1/2 + iz)`.
    pub fn v(&self, z: C) -> Result<Estimate> {
        let bad = [self.rho, C::new(1.0, 0.0) - self.rho, C::new(0.0, 0.0), C::new(1.0, 0.0)].map(z_of);
        let r = entire_eval(|z| self.residue_raw(s_of(z)), z, &bad)?;
        Ok(Estimate { value: -r.value, err: r.err })
    }
}

/// Value of an entire function, by a circle mean when `z` is close to a removable point.
fn entire_eval<F: Fn(C) -> Result<Estimate>>(f: F, z: C, bad: &[C]) -> Result<Estimate> {
    if bad.iter().all(|b| (z - b).norm() >= 0.3) {
        return f(z);
    }
    let m = 24;
    let mut value = C::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..m {
        let e = f(z + C::from_polar(0.4, 2.0 * PI * (j as f64 + 0.5) / m as f64))?;
        value += e.value;
        err += e.err;
    }
    Ok(Estimate { value: value / m as f64, err: err / m as f64 + 1e-13 })
}

pub fn zero_points(zeros: &ZeroTable, count: usize) -> Result<Vec<ZeroPoint>> {
    if count > zeros.len() {
        return Err(ZiError::InvalidInput(format!("{count} zeros requested, table has {}", zeros.len())));
    }
    zeros.ordinates[..count].iter().map(|&g| ZeroPoint::new(g)).collect()
}

/// `U_n(z)` for `1 ≤ n ≤ N` from one coefficient table (index 0 unused).
pub fn u_values(n_max: usize, z: C) -> Result<Vec<C>> {
    let h = h_coeffs(n_max, Sign::Minus, s_of(z))?;
    Ok(h.iter().enumerate().map(|(n, v)| if n == 0 { *v } else { v / (2.0 * PI * (n as f64).powf(0.25)) }).collect())
}

/// Line integral `(1/4πi)∫_{c-i∞}^{c+i∞} [H_{-δ}(w,s) - H_{-δ}(1-w,s)] F_δ(w) dw`.
pub fn r_line_integral(f: &TestFunction, s: C, delta: Sign, c: f64) -> Result<Estimate> {
    if !(c >= 3.0 && 1.0 - c < s.re && s.re < c) {
        return Err(ZiError::InvalidInput(format!("need c ≥ 3 and 1 - c < Re s < c, got c = {c}, s = {s}")));
    }
    let kern = delta.flip();
    let integrand = |v: f64| -> Result<(C, f64)> {
        let w = C::new(c, v);
        let fw = f_delta(f, w, delta);
        if fw.norm() < 1e-30 {
            return Ok((C::new(0.0, 0.0), 0.0));
        }
        let a = h_eval(w, s, kern)?;
        let b = h_eval(C::new(1.0, 0.0) - w, s, kern)?;
        Ok(((a.value - b.value) * fw, (a.err + b.err) * fw.norm()))
    };
    // trapezoid in v: the nearest kernel pole sits c - Re s away from the line
    let v_max = f.support_radius(1e-17) + 2.0;
    let h = 0.5;
    let m = (v_max / h).ceil() as i64;
    let mut fine = C::new(0.0, 0.0);
    let mut coarse = C::new(0.0, 0.0);
    let mut err = 0.0;
    for j in -m..=m {
        let (val, e) = integrand(j as f64 * h)?;
        fine += val * h;
        err += e * h;
        if j % 2 == 0 {
            coarse += val * 2.0 * h;
        }
    }
    let scale = 1.0 / (4.0 * PI);
    let edge = f_delta(f, C::new(c, v_max), delta).norm() * 10.0;
    Ok(Estimate { value: fine * scale, err: ((fine - coarse).norm() * 1e-3 + err + edge) * scale })
}

/// Dirichlet side `Σ_{n≤N} (M^{-1}F₊)(√n) h⁻_n(s) = Σ_{n≤N} f̂((log n)/(4π)) U_n(z)`, with the tail envelope.
pub fn r_dirichlet_side(f: &TestFunction, s: C, n_max: usize) -> Result<Estimate> {
    let u = u_values(n_max, z_of(s))?;
    let value = (1..=n_max).map(|n| f.fhat(C::new((n as f64).ln() / (4.0 * PI), 0.0)) * u[n]).sum();
    Ok(Estimate { value, err: u_tail_envelope(f, n_max, H_ENVELOPE) })
}

/// Constant `C` in `|Σ_{n≤x} h_n| ≤ C√x log x` used by the tail envelopes.
pub const H_ENVELOPE: f64 = 5.0;

/// Bound on `Σ_{n>N} |f̂((log n)/(4π))| |U_n|` from `|h_n| ≤ 2C√n log n`.
pub fn u_tail_envelope(f: &TestFunction, n_max: usize, c: f64) -> f64 {
    let mut acc = 0.0;
    let mut n = n_max + 1;
    loop {
        let x = n as f64;
        let a = f.fhat(C::new(x.ln() / (4.0 * PI), 0.0)).norm() / (2.0 * PI * x.powf(0.25));
        let term = a * 2.0 * c * x.sqrt() * x.ln().max(1.0);
        acc += term;
        if term < 1e-20 * acc.max(1e-300) || term < 1e-300 || n > n_max + 100_000_000 {
            return acc;
        }
        n = if n < 4 * n_max.max(16) { n + 1 } else { n + n / 64 };
        if n > 4 * n_max.max(16) {
            // coarse steps: weight the sampled term by the step length
            acc += term * (n as f64 / 64.0 - 1.0).max(0.0);
        }
    }
}

/// Residue side `F₊(s) + Σ_{0<γ≤T} Res_{w=ρ} H₋(w,s) F₊(w)` with the neglected zero contribution as envelope.
pub fn r_residue_side(f: &TestFunction, s: C, zeros: &[ZeroPoint]) -> Result<Estimate> {
    let z = z_of(s);
    let mut value = f_delta(f, s, Sign::Plus);
    let mut err = 0.0;
    for zp in zeros {
        let v = zp.v(z)?;
        let fr = f_delta(f, zp.rho, Sign::Plus);
        value -= fr * v.value;
        err += fr.norm() * v.err;
    }
    let last = zeros.last().map_or(0.0, |z| z.rho.im);
    Ok(Estimate { value, err: err + zero_tail_bound(f, last) })
}

/// `Σ_{γ>T} |f(γ)|` bounded through the zero density `log(t/2π)/2π + 1`.
pub fn zero_tail_bound(f: &TestFunction, t: f64) -> f64 {
    let t0 = t.max(14.0);
    let top = t0 + f.support_radius(1e-300).max(50.0);
    let mut g = |x: f64| C::new(f.f(C::new(x, 0.0)).norm() * ((x / (2.0 * PI)).ln() / (2.0 * PI) + 1.0), 0.0);
    let q = adaptive(&mut g, t0, top, 1e-18, 16, 20);
    q.value.re + q.err + f.f(C::new(t0, 0.0)).norm() * 8.0 * t0.ln()
}

/// The operator `R_δ` computed three ways.
#[derive(Clone, Debug)]
pub struct RReport {
    pub line: Estimate,
    pub dirichlet: Estimate,
    pub residue: Estimate,
}

impl RReport {
    pub fn dirichlet_vs_residue(&self) -> f64 {
        (self.dirichlet.value - self.residue.value).norm()
    }

    pub fn envelope(&self) -> f64 {
        self.dirichlet.err + self.residue.err
    }
}

/// `R_δ F_δ(s)`; the Dirichlet and residue sides exist for `δ = +` only, since `H₊(1-w,s) = H₊(w,s)`
/// makes the bracket vanish for `δ = -`.
pub fn r_operator(f: &TestFunction, s: C, delta: Sign, c: f64, n_max: usize, zeros: &[ZeroPoint]) -> Result<RReport> {
    if delta == Sign::Minus {
        return Err(ZiError::Unsupported("the δ = - bracket vanishes identically".into()));
    }
    Ok(RReport { line: r_line_integral(f, s, delta, c)?, dirichlet: r_dirichlet_side(f, s, n_max)?, residue: r_residue_side(f, s, zeros)? })
}

/// Truncated reconstruction `Σ_{n≤N} f̂((log n)/(4π)) U_n(z) + Σ f(γ) V_{ρ,0}(z)`.
#[derive(Clone, Debug)]
pub struct Theorem1Rhs {
    pub value: C,
    pub u_part: C,
    pub v_part: C,
    /// Height between the last used zero and the next one.
    pub t: f64,
    /// Bound on the dropped `U` terms.
    pub u_tail: f64,
    pub err: f64,
}

/// `theorem1_rhs` with the first `t_index` zeros; `T` is the midpoint to the next ordinate.
pub fn theorem1_rhs(f: &TestFunction, z: C, n_max: usize, t_index: usize, zeros: &ZeroTable) -> Result<Theorem1Rhs> {
    if z.im.abs() >= 0.5 {
        return Err(ZiError::InvalidInput(format!("need |Im z| < 1/2, got {z}")));
    }
    if f.parity != Parity::Even {
        return Err(ZiError::InvalidInput("theorem1_rhs needs an even test function".into()));
    }
    if t_index >= zeros.len() {
        return Err(ZiError::InvalidInput(format!("T_index {t_index} needs {} zeros, table has {}", t_index + 1, zeros.len())));
    }
    let pts = zero_points(zeros, t_index)?;
    let u = u_values(n_max, z)?;
    let u_part: C = (1..=n_max).map(|n| f.fhat(C::new((n as f64).ln() / (4.0 * PI), 0.0)) * u[n]).sum();
    let mut v_part = C::new(0.0, 0.0);
    let mut err = 0.0;
    for zp in &pts {
        let v = zp.v(z)?;
        let fg = f.f(C::new(zp.rho.im, 0.0));
        v_part += fg * v.value;
        err += fg.norm() * v.err;
    }
    let t = match t_index {
        0 => 0.5 * zeros.ordinates[0],
        i => 0.5 * (zeros.ordinates[i - 1] + zeros.ordinates[i]),
    };
    let u_tail = u_tail_envelope(f, n_max, H_ENVELOPE);
    Ok(Theorem1Rhs { value: u_part + v_part, u_part, v_part, t, u_tail, err })
}

/// Midpoint of the widest gap between consecutive ordinates whose midpoint lies in `[2^k, 2^{k+1}]`.
pub fn choose_tk(table: &ZeroTable, k: u32) -> Result<f64> {
    let (lo, hi) = (2f64.powi(k as i32), 2f64.powi(k as i32 + 1));
    let g = &table.ordinates;
    if g.last().is_none_or(|&l| l <= hi) {
        return Err(ZiError::InvalidInput(format!("zero table does not extend beyond {hi}")));
    }
    g.windows(2)
        .map(|p| (p[1] - p[0], 0.5 * (p[0] + p[1])))
        .filter(|&(_, m)| lo <= m && m <= hi)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, m)| m)
        .ok_or_else(|| ZiError::InvalidInput(format!("no gap with midpoint in [{lo}, {hi}]")))
}

/// `min_{1/2≤u≤2} |ζ(u + iT)|` on a grid.
pub fn zeta_segment_min(t: f64) -> Result<f64> {
    let mut m = f64::INFINITY;
    for j in 0..=30 {
        m = m.min(zeta(C::new(0.5 + 1.5 * j as f64 / 30.0, t))?.norm());
    }
    Ok(m)
}

/// Both sides of the explicit formula.
#[derive(Clone, Debug)]
pub struct RwReport {
    pub archimedean: Estimate,
    pub poles: C,
    pub prime_sum: C,
    pub prime_tail: f64,
    pub zero_sum: C,
    pub zero_tail: f64,
    pub lhs: C,
    pub rhs: C,
    pub residual: f64,
    pub envelope: f64,
    pub inconclusive: bool,
}

/// `(1/2π)∫ g(t)(ψ(1/4 + it/2) - log π) dt`.
fn archimedean<G: FnMut(f64) -> C>(mut g: G, t_max: f64) -> Estimate {
    let mut integrand = |t: f64| g(t) * (digamma(C::new(0.25, t / 2.0)).unwrap_or(C::new(f64::NAN, 0.0)) - PI.ln());
    let mut breaks = vec![-t_max];
    let mut x = -t_max;
    while x < t_max {
        x = (x + 4.0).min(t_max);
        breaks.push(x);
    }
    let q = adaptive_panels(&mut integrand, &breaks, 1e-13, 20);
    Estimate { value: q.value / (2.0 * PI), err: q.err / (2.0 * PI) }
}

/// Explicit formula with `count` zeros from the table and the prime sum over `n ≤ n_max`.
pub fn riemann_weil(f: &TestFunction, table: &ZeroTable, count: usize, n_max: usize) -> Result<RwReport> {
    if count > table.len() {
        return Err(ZiError::InvalidInput(format!("{count} zeros requested, table has {}", table.len())));
    }
    let t_max = f.support_radius(1e-18);
    let arch = archimedean(|t| f.f(C::new(t, 0.0)), t_max);
    let poles = f.f(C::new(0.0, 0.5)) + f.f(C::new(0.0, -0.5));
    let pair = |n: f64| {
        let xi = n.ln() / (2.0 * PI);
        f.fhat(C::new(xi, 0.0)) + f.fhat(C::new(-xi, 0.0))
    };
    let mut prime_sum = C::new(0.0, 0.0);
    for n in 2..=n_max as u64 {
        let l = von_mangoldt(n);
        if l > 0.0 {
            prime_sum += pair(n as f64) * (l / (n as f64).sqrt());
        }
    }
    prime_sum /= 2.0 * PI;
    // Σ_{n>N} Λ(n)/√n |...| ≤ ∫_{log N}^∞ u e^{u/2} |f̂(±u/2π)| du, with a factor 2 for the prime count
    let mut tail = |u: f64| C::new(2.0 * u * (u / 2.0).exp() * pair(u.exp()).norm(), 0.0);
    let u0 = (n_max.max(2) as f64).ln();
    let pt = adaptive(&mut tail, u0, u0 + 400.0, 1e-30, 16, 20);
    let prime_tail = (pt.value.re + pt.err) / (2.0 * PI);
    let zero_sum: C = table.ordinates[..count].iter().map(|&g| f.f(C::new(g, 0.0)) + f.f(C::new(-g, 0.0))).sum();
    let zero_tail = 2.0 * zero_tail_bound(f, table.ordinates[..count].last().copied().unwrap_or(0.0));
    let lhs = arch.value + poles;
    let rhs = prime_sum + zero_sum;
    let residual = (lhs - rhs).norm();
    let envelope = arch.err + prime_tail + zero_tail + 1e-13 * (lhs.norm() + rhs.norm());
    Ok(RwReport {
        archimedean: arch,
        poles,
        prime_sum,
        prime_tail,
        zero_sum,
        zero_tail,
        lhs,
        rhs,
        residual,
        envelope,
        inconclusive: envelope > 1e-5,
    })
}

/// Basis functions accepted by [`w_on_basis`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis {
    U(usize),
    /// `V_{ρ,0}` for the zero with the given ordinate.
    V(f64),
}

/// `Wg = (1/π)∫_0^∞ g(t)(Re ψ(1/4 + it/2) - log π) dt + g(i/2) + g(-i/2)` for even `g`,
/// evaluated on several basis functions over one set of nodes.
pub fn w_on_basis(items: &[Basis]) -> Result<Vec<Estimate>> {
    let n_max = items.iter().map(|b| if let Basis::U(n) = b { *n } else { 1 }).max().unwrap_or(1);
    if items.iter().any(|b| matches!(b, Basis::U(0))) {
        return Err(ZiError::InvalidInput("U_n needs n ≥ 1".into()));
    }
    let zps: Vec<Option<ZeroPoint>> =
        items.iter().map(|b| if let Basis::V(g) = b { ZeroPoint::new(*g).map(Some) } else { Ok(None) }).collect::<Result<_>>()?;
    let eval = |z: C| -> Result<Vec<Estimate>> {
        let u = u_values(n_max, z)?;
        items
            .iter()
            .zip(&zps)
            .map(|(b, zp)| match (b, zp) {
                (Basis::U(n), _) => Ok(Estimate { value: u[*n], err: 0.0 }),
                (Basis::V(_), Some(zp)) => zp.v(z),
                _ => unreachable!(),
            })
            .collect()
    };
    let weight = |t: f64| -> Result<f64> { Ok(digamma(C::new(0.25, t / 2.0))?.re - PI.ln()) };
    let mut breaks = vec![0.0, 1.0, 3.0, 6.0];
    while *breaks.last().unwrap() < W_T_MAX {
        breaks.push(breaks.last().unwrap() + 12.0);
    }
    let k = items.len();
    let mut hi = vec![C::new(0.0, 0.0); k];
    let mut lo = vec![C::new(0.0, 0.0); k];
    let mut err = vec![0.0; k];
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        for (n, acc) in [(20usize, &mut hi), (10usize, &mut lo)] {
            let rule = gauss_legendre(n);
            let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
            for (x, wt) in rule.0.iter().zip(rule.1.iter()) {
                let t = m + h * x;
                let g = eval(C::new(t, 0.0))?;
                let wv = weight(t)? * wt * h / PI;
                for (i, e) in g.iter().enumerate() {
                    acc[i] += e.value * wv;
                    if n == 20 {
                        err[i] += e.err * wv.abs();
                    }
                }
            }
        }
    }
    let top = eval(C::new(W_T_MAX, 0.0))?;
    let plus = eval(C::new(0.0, 0.5))?;
    let minus = eval(C::new(0.0, -0.5))?;
    Ok((0..k)
        .map(|i| {
            let tail = top[i].value.norm() * 20.0 * weight(W_T_MAX).unwrap_or(10.0).abs() / PI;
            Estimate {
                value: hi[i] + plus[i].value + minus[i].value,
                err: err[i] + (hi[i] - lo[i]).norm() * 1e-2 + tail + plus[i].err + minus[i].err,
            }
        })
        .collect())
}

/// End of the integration range for [`w_on_basis`].
pub const W_T_MAX: f64 = 102.0;

/// The two readings of `W U_n` for square `n`, in the normalisation of `U_n`.
pub fn w_u_candidates(n: usize) -> Option<(f64, f64)> {
    let r = (n as f64).sqrt().round() as u64;
    if r * r != n as u64 {
        return None;
    }
    let literal = von_mangoldt(n as u64) / (n as f64).sqrt() / PI;
    let alternative = von_mangoldt(r) / (n as f64).powf(0.25) / PI;
    Some((literal, alternative))
}

/// Closed forms of the band-limited kernels and their defining integral or series.
#[derive(Clone, Copy, Debug)]
pub struct PwCheck {
    /// `E₊(x, z)` by summing the defining integral over unit intervals.
    pub e_integral: C,
    /// `E₊` in the printed closed form `-(e^{πi(z-x)}/(z-x) - π e^{-πiz} sinc π(z-x)/sin πz)`.
    pub e_printed: C,
    /// `E₊` in the form obtained by summing the integral: `-e^{πi(z-x)}/(z-x) + π e^{πiz} sinc π(z-x)/sin πz`.
    pub e_derived: C,
    /// `Ê*₊(ξ, z)` from its series.
    pub ehat_series: C,
    /// `π cot π(z - ξ)`.
    pub ehat_closed: C,
}

impl PwCheck {
    /// `(|E integral - E derived|, |Ê series + Ê closed|)`.
    pub fn residuals(&self) -> (f64, f64) {
        ((self.e_integral - self.e_derived).norm(), (self.ehat_series + self.ehat_closed).norm())
    }
}

fn sinc(x: C) -> C {
    if x.norm() < 1e-8 {
        C::new(1.0, 0.0) - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn e_plus_printed(x: f64, z: C) -> C {
    let u = z - x;
    -((C::i() * PI * u).exp() / u - PI * (-C::i() * PI * z).exp() / (PI * z).sin() * sinc(PI * u))
}

pub fn e_plus_derived(x: f64, z: C) -> C {
    let u = z - x;
    -(C::i() * PI * u).exp() / u + PI * (C::i() * PI * z).exp() / (PI * z).sin() * sinc(PI * u)
}

/// `±π 1_{[-1/2,1/2]}(ξ) cot π(w - ξ)`.
pub fn ehat_closed(xi: f64, w: C, sign: Sign) -> C {
    if xi.abs() > 0.5 {
        return C::new(0.0, 0.0);
    }
    sign.val() * PI * (PI * (w - xi)).cos() / (PI * (w - xi)).sin()
}

pub fn paley_wiener_check(x: f64, z: C, xi: f64) -> Result<PwCheck> {
    if z.im <= 0.05 {
        return Err(ZiError::InvalidInput(format!("the defining integral and series need Im z > 0, got {z}")));
    }
    let mut e_integral = C::new(0.0, 0.0);
    let mut n = -1i64;
    loop {
        let nf = n as f64;
        let factor = C::new(1.0, 0.0) - C::from_polar(1.0, -2.0 * PI * x * nf);
        let piece = gl_fixed(|y| (-2.0 * PI * C::i() * y * (z - x)).exp(), nf - 0.5, nf + 0.5, 30);
        e_integral += factor * piece;
        if (2.0 * PI * (nf + 0.5) * z.im).exp() < 1e-18 {
            break;
        }
        n -= 1;
    }
    e_integral *= 2.0 * PI * C::i();
    let mut ehat_series = C::new(0.0, 0.0);
    if xi.abs() <= 0.5 {
        let q = (2.0 * PI * C::i() * (z - xi)).exp();
        let mut p = q;
        let mut acc = C::new(0.0, 0.0);
        while p.norm() > 1e-18 {
            acc += p;
            p *= q;
        }
        ehat_series = PI * C::i() + 2.0 * PI * C::i() * acc;
    }
    Ok(PwCheck {
        e_integral,
        e_printed: e_plus_printed(x, z),
        e_derived: e_plus_derived(x, z),
        ehat_series,
        ehat_closed: ehat_closed(xi, z, Sign::Plus),
    })
}
