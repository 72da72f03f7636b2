//! θ, λ, J and J₋ for the theta group: exact expansions and numerical evaluators.
//!
//! Throughout, `t = q^{1/2} = e^{πiz}`. Exact series use denominator 2 in `q`.
//! Numerical evaluation uses two charts: the direct `t`-series when `Im z ≥ 0.35`
//! and the expansion at the cusp 1 in `σ = 1/(1 - z)` (mirrored for the cusp -1).
//! Any other point of the upper half-plane is first moved into one of these charts
//! by `z ↦ z + 2` and `z ↦ -1/z`.

use crate::error::{Result, ZiError};
use crate::qseries::{q_frac, q_int, q_to_f64, FracPowerSeries, Q};
use num_complex::Complex64 as C;
use num_rational::Ratio;
use num_traits::{One, Zero};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Lower bound on `Im z` for the direct series chart.
pub const Y_BULK: f64 = 0.35;

/// Point of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointUH {
    re: f64,
    im: f64,
}

impl PointUH {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(ZiError::InvalidInput(format!("point {re}+{im}i is not in the upper half-plane")));
        }
        Ok(PointUH { re, im })
    }
    pub fn from_c(z: C) -> Result<Self> {
        Self::new(z.re, z.im)
    }
    pub fn re(&self) -> f64 {
        self.re
    }
    pub fn im(&self) -> f64 {
        self.im
    }
    pub fn c(&self) -> C {
        C::new(self.re, self.im)
    }
}

// ---------------------------------------------------------------- exact series

/// θ = Σ t^{n²} known below `t^order`.
pub fn theta_series(order: i64) -> FracPowerSeries {
    let mut c = vec![Q::zero(); order.max(0) as usize];
    let mut n = 0i64;
    while n * n < order {
        c[(n * n) as usize] += q_int(if n == 0 { 1 } else { 2 });
        n += 1;
    }
    FracPowerSeries::new(2, 0, c, order).expect("theta")
}

/// λ = 16t Π (1+t^{2n})^8 (1+t^{2n-1})^{-8} known below `t^order`.
pub fn lambda_series(order: i64) -> FracPowerSeries {
    let rel = (order - 1).max(1);
    let mut prod = FracPowerSeries::one(2, rel);
    let mut m = 1i64;
    while m < rel {
        let f = FracPowerSeries::one(2, rel).add(&FracPowerSeries::monomial(2, m, q_int(1), rel));
        let p = if m % 2 == 0 { 8 } else { -8 };
        prod = prod.mul(&f.pow_int(p).expect("unit"));
        m += 1;
    }
    prod.scale(&q_int(16)).shift(1)
}

/// J = 16/(λ(1-λ)) = t^{-1} + 24 + 276t + … known below `t^order`.
pub fn j_series(order: i64) -> FracPowerSeries {
    let lam = lambda_series(order + 2);
    let one = FracPowerSeries::one(2, order + 2);
    let d = lam.mul(&one.sub(&lam));
    d.invert().expect("lambda invertible").scale(&q_int(16)).truncate(order)
}

/// J₋ = (1 - 64/J)^{1/2} with constant term +1, known below `t^order`.
pub fn jminus_series(order: i64) -> FracPowerSeries {
    let jinv = j_series(order.max(1) + 1).invert().expect("J invertible").truncate(order);
    let arg = FracPowerSeries::one(2, order).sub(&jinv.scale(&q_int(64)));
    arg.pow_rational(&q_frac(1, 2)).expect("unit series")
}

/// Forms whose expansions at the cusp 1 are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspForm {
    /// ½(τ/i)^{-1/2} θ(1 - 1/τ), a series in q^{1/8}.
    Theta,
    /// -2^{-12} J(1 - 1/τ), a series in q.
    J,
    /// 8 J₋(1 - 1/τ), a series in q^{1/2}.
    Jminus,
}

/// Normalized expansion at the cusp 1 in `q = e^{2πiτ}`, known below `q^{order}`.
pub fn cusp1_series(form: CuspForm, order: i64) -> FracPowerSeries {
    match form {
        CuspForm::Theta => {
            let tr = 8 * order;
            let mut c = vec![Q::zero(); tr as usize];
            let mut n = 0i64;
            while (2 * n + 1) * (2 * n + 1) < tr {
                c[((2 * n + 1) * (2 * n + 1)) as usize] = q_int(1);
                n += 1;
            }
            FracPowerSeries::new(8, 0, c, tr).expect("theta cusp")
        }
        CuspForm::J => {
            // 16λ²/(λ-1) in t = q^{1/2}; leading term -4096 t².
            let tt = 2 * order + 2;
            let lam = lambda_series(tt);
            let num = lam.mul(&lam).scale(&q_int(16));
            let den = lam.sub(&FracPowerSeries::one(2, tt));
            let v = num.mul(&den.invert().expect("unit")).scale(&q_frac(-1, 4096));
            v.truncate(2 * order).reduce_denom()
        }
        CuspForm::Jminus => {
            // (2-λ)/λ in t; leading term t^{-1}/8.
            let tt = 2 * order + 2;
            let lam = lambda_series(tt);
            let num = FracPowerSeries::one(2, tt).scale(&q_int(2)).sub(&lam);
            let v = num.mul(&lam.invert().expect("unit")).scale(&q_int(8));
            v.truncate(2 * order)
        }
    }
}

// ---------------------------------------------------------------- numerics

/// Values of the basic forms at one point; `log_theta` is the branch continuous from `i∞`.
#[derive(Clone, Copy, Debug)]
pub struct FormValues {
    pub theta: C,
    pub log_theta: C,
    pub lambda: C,
    pub j: C,
    pub jm: C,
    /// Logarithms of `J` and `J₋` on arbitrary branches; usable where the values under- or overflow.
    pub log_j: C,
    pub log_jm: C,
}

impl FormValues {
    pub fn conj(self) -> Self {
        FormValues {
            theta: self.theta.conj(),
            log_theta: self.log_theta.conj(),
            lambda: self.lambda.conj(),
            j: self.j.conj(),
            jm: self.jm.conj(),
            log_j: self.log_j.conj(),
            log_jm: self.log_jm.conj(),
        }
    }

    /// Principal-branch θ^{2k}.
    pub fn theta_pow(&self, two_k: f64) -> C {
        (self.log_theta * two_k).exp()
    }
}

/// (θ₃, θ₂, log θ₂) at nome `e^{πiτ}`; `log θ₂` uses `log 2 + πiτ/4 + Log(1 + …)`.
fn thetas(tau: C) -> (C, C, C) {
    let t = (C::i() * PI * tau).exp();
    let tn = t.norm();
    let mut th3 = C::new(1.0, 0.0);
    let mut n = 1i64;
    loop {
        let e = (n * n) as i32;
        let term = t.powi(e);
        th3 += term * 2.0;
        if tn.powi(e) < 1e-18 {
            break;
        }
        n += 1;
    }
    // θ₂ = 2 e^{πiτ/4} Σ_{n≥0} t^{n(n+1)}
    let mut s = C::new(1.0, 0.0);
    let mut n = 1i64;
    loop {
        let e = (n * (n + 1)) as i32;
        s += t.powi(e);
        if tn.powi(e) < 1e-18 {
            break;
        }
        n += 1;
    }
    let pre = (C::i() * PI * tau / 4.0).exp() * 2.0;
    let log2 = C::new(2f64.ln(), 0.0) + C::i() * PI * tau / 4.0 + s.ln();
    (th3, pre * s, log2)
}

fn bulk_values(z: C) -> FormValues {
    let (th3, _, lth2) = thetas(z);
    let log_theta = th3.ln();
    let ll = (lth2 - log_theta) * 4.0;
    let lambda = ll.exp();
    let log_j = C::new(16f64.ln(), 0.0) - ll - (1.0 - lambda).ln();
    let jm = 1.0 - lambda * 2.0;
    FormValues { theta: th3, log_theta, lambda, j: log_j.exp(), jm, log_j, log_jm: jm.ln() }
}

fn cusp_raw(sigma: C) -> FormValues {
    // λ(σ) is kept in log form so that deep cusp points neither under- nor overflow
    let (th3, _, lth2) = thetas(sigma);
    let lls = (lth2 - th3.ln()) * 4.0;
    let ls = lls.exp();
    let log_theta = 0.5 * (sigma / C::i()).ln() + lth2;
    let log_j = C::new(16f64.ln(), 0.0) + lls * 2.0 - (ls - 1.0).ln();
    let log_jm = (2.0 - ls).ln() - lls;
    FormValues {
        theta: log_theta.exp(),
        log_theta,
        lambda: 1.0 - (-lls).exp(),
        j: log_j.exp(),
        jm: log_jm.exp(),
        log_j,
        log_jm,
    }
}

fn cusp_offset() -> C {
    static OFF: OnceLock<f64> = OnceLock::new();
    let m = *OFF.get_or_init(|| {
        let z = C::i();
        let b = bulk_values(z).log_theta;
        let c = cusp_raw(C::new(1.0, 0.0) / (1.0 - z)).log_theta;
        ((b - c).im / (2.0 * PI)).round()
    });
    C::new(0.0, 2.0 * PI * m)
}

/// Values at `z = 1 - 1/σ` computed in the cusp chart; needs `Im σ ≥ Y_BULK`.
pub fn eval_cusp_sigma(sigma: C) -> FormValues {
    let mut v = cusp_raw(sigma);
    v.log_theta += cusp_offset();
    v
}

/// Values at any point of the upper half-plane.
pub fn eval_all(z: PointUH) -> Result<FormValues> {
    if z.im < 1e-9 {
        return Err(ZiError::PrecisionLoss {
            where_: format!("{}+{}i", z.re, z.im),
            bound: f64::INFINITY,
        });
    }
    let mut w = z.c();
    // accumulated: θ(z) = fac·θ(w), log θ(z) = lfac + log θ(w), J₋(z) = sgn·J₋(w)
    let mut lfac = C::new(0.0, 0.0);
    let mut sgn = 1.0;
    for _ in 0..10_000 {
        let shift = (w.re / 2.0).round() * 2.0;
        w.re -= shift;
        if w.re > 1.0 {
            w.re -= 2.0;
        } else if w.re < -1.0 {
            w.re += 2.0;
        }
        let v = if w.im >= Y_BULK {
            Some(bulk_values(w))
        } else {
            let s1 = C::new(1.0, 0.0) / (1.0 - w);
            let wm = C::new(-w.re, w.im);
            let s2 = C::new(1.0, 0.0) / (1.0 - wm);
            if s1.im >= Y_BULK {
                Some(eval_cusp_sigma(s1))
            } else if s2.im >= Y_BULK {
                Some(eval_cusp_sigma(s2).conj())
            } else {
                None
            }
        };
        if let Some(mut v) = v {
            v.log_theta += lfac;
            v.theta *= lfac.exp();
            if sgn < 0.0 {
                v.jm = -v.jm;
                v.log_jm += C::new(0.0, PI);
            }
            return Ok(v);
        }
        // θ(w) = (w/i)^{-1/2} θ(-1/w), J₋(w) = -J₋(-1/w)
        lfac += -0.5 * (w / C::i()).ln();
        sgn = -sgn;
        w = -1.0 / w;
    }
    Err(ZiError::Integrity("form evaluation did not reach a chart".into()))
}

pub fn theta(z: PointUH) -> Result<C> {
    Ok(eval_all(z)?.theta)
}
pub fn j_eval(z: PointUH) -> Result<C> {
    Ok(eval_all(z)?.j)
}
pub fn jminus_eval(z: PointUH) -> Result<C> {
    Ok(eval_all(z)?.jm)
}
pub fn lambda_eval(z: PointUH) -> Result<C> {
    Ok(eval_all(z)?.lambda)
}
/// θ^{2k} on the branch continuous from `i∞`.
pub fn theta_pow(z: PointUH, two_k: f64) -> Result<C> {
    Ok(eval_all(z)?.theta_pow(two_k))
}

/// Bulk and cusp-chart values at the same point, for overlap checks.
pub fn chart_pair(z: C) -> Option<(FormValues, FormValues)> {
    if z.im < Y_BULK {
        return None;
    }
    let s = C::new(1.0, 0.0) / (1.0 - z);
    if s.im < Y_BULK {
        return None;
    }
    Some((bulk_values(z), eval_cusp_sigma(s)))
}

// ---------------------------------------------------------------- form spaces

pub fn nu_minus(k: f64) -> i64 {
    ((k + 2.0) / 4.0).floor() as i64
}
pub fn nu_plus(k: f64) -> i64 {
    ((k + 4.0) / 4.0).floor() as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn val(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    pub fn nu(self, k: f64) -> i64 {
        match self {
            Sign::Plus => nu_plus(k),
            Sign::Minus => nu_minus(k),
        }
    }
    pub fn parse(s: &str) -> Result<Sign> {
        match s {
            "+" | "plus" | "p" => Ok(Sign::Plus),
            "-" | "minus" | "m" => Ok(Sign::Minus),
            _ => Err(ZiError::InvalidInput(format!("unknown sign {s}"))),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

pub fn mf_dim(k: f64, sign: Sign) -> i64 {
    sign.nu(k)
}

/// θ^{2k} · J₋^{jminus_power} · Σ c_m J^m with exact rational `c_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularFormRep {
    /// Weight as an exact rational (half-integers in practice).
    pub weight: Ratio<i64>,
    /// Character value at S.
    pub sign: Sign,
    pub jminus_power: u8,
    /// Pairs (m, c_m), sorted by m.
    pub j_poly: Vec<(i64, Q)>,
}

impl ModularFormRep {
    pub fn weight_f64(&self) -> f64 {
        *self.weight.numer() as f64 / *self.weight.denom() as f64
    }

    /// Exact q-expansion known below `t^order`.
    pub fn q_expansion(&self, order: i64) -> Result<FracPowerSeries> {
        let two_k = self.weight * Ratio::from_integer(2);
        let extra = self.j_poly.iter().map(|(m, _)| *m).max().unwrap_or(0).max(0) + 1;
        let work = order + extra + 1;
        let th = theta_series(work);
        let thp = th.pow_rational(&Q::new((*two_k.numer()).into(), (*two_k.denom()).into()))?;
        let j = j_series(work);
        let mut poly = FracPowerSeries::zero(2, work);
        for (m, c) in &self.j_poly {
            poly = poly.add(&j.pow_int(*m)?.scale(c));
        }
        let mut r = thp.mul(&poly);
        if self.jminus_power == 1 {
            r = r.mul(&jminus_series(work));
        }
        Ok(r.truncate(order))
    }

    /// Lowest q-exponent at the cusp 1 (negative means a pole there).
    pub fn cusp1_order(&self) -> f64 {
        let k = self.weight_f64();
        self.j_poly
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, _)| *m as f64 + k / 4.0 - 0.5 * self.jminus_power as f64)
            .fold(f64::INFINITY, f64::min)
    }

    /// Numerical value from precomputed form values.
    pub fn eval_values(&self, v: &FormValues) -> C {
        let two_k = 2.0 * self.weight_f64();
        let mut p = C::new(0.0, 0.0);
        for (m, c) in &self.j_poly {
            p += v.j.powi(*m as i32) * q_to_f64(c);
        }
        let jm = if self.jminus_power == 1 { v.log_jm } else { C::new(0.0, 0.0) };
        (v.log_theta * two_k + jm).exp() * p
    }

    pub fn eval(&self, z: PointUH) -> Result<C> {
        Ok(self.eval_values(&eval_all(z)?))
    }
}

/// Basis θ^{2k} J_ε J^{-m}, m < ν_ε(k), of the holomorphic space; `k` must be a half-integer.
pub fn mf_basis(k: Ratio<i64>, sign: Sign) -> Vec<ModularFormRep> {
    let kf = *k.numer() as f64 / *k.denom() as f64;
    (0..sign.nu(kf))
        .map(|m| ModularFormRep {
            weight: k,
            sign,
            jminus_power: if sign == Sign::Minus { 1 } else { 0 },
            j_poly: vec![(-m, Q::one())],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_leading() {
        let l = lambda_series(6);
        let want = [0i64, 16, -128, 704, -3072, 11488];
        for (e, w) in want.iter().enumerate() {
            assert_eq!(l.coeff_u(e as i64).unwrap(), q_int(*w), "t^{e}");
        }
    }

    #[test]
    fn j_leading() {
        let j = j_series(4);
        assert_eq!(j.coeff_u(-1).unwrap(), q_int(1));
        assert_eq!(j.coeff_u(0).unwrap(), q_int(24));
        assert_eq!(j.coeff_u(1).unwrap(), q_int(276));
    }

    #[test]
    fn jminus_is_one_minus_two_lambda() {
        let a = jminus_series(20);
        let b = FracPowerSeries::one(2, 20).sub(&lambda_series(20).scale(&q_int(2)));
        assert_eq!(a, b);
    }

    #[test]
    fn values_at_i() {
        let i = PointUH::new(0.0, 1.0).unwrap();
        let v = eval_all(i).unwrap();
        assert!((v.j - 64.0).norm() < 1e-11);
        assert!(v.jm.norm() < 1e-13);
        assert!((v.theta.re - 1.086434811213308).abs() < 1e-14);
    }

    #[test]
    fn dims() {
        assert_eq!(mf_dim(0.5, Sign::Minus), 0);
        assert_eq!(mf_dim(0.5, Sign::Plus), 1);
        assert_eq!(mf_dim(2.0, Sign::Minus), 1);
    }
}
