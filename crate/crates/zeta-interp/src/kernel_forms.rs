//! The weakly holomorphic forms `g±_{n,k}`: τ-Fourier coefficients of the kernels
//! `K±_k(τ, z)`, built exactly and evaluated numerically.

use crate::error::{Result, ZiError};
use crate::modforms::{eval_all, j_series, jminus_series, theta_series, FormValues, ModularFormRep, PointUH, Sign};
use crate::qseries::{q_to_f64, FracPowerSeries, Q};
use num_bigint::BigInt;
use num_complex::Complex64 as C;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Validates `k` as a nonnegative half-integer and returns `2k`.
pub fn two_k_of(k: f64) -> Result<i64> {
    let t = 2.0 * k;
    if !(k >= 0.0) || (t - t.round()).abs() > 1e-12 {
        return Err(ZiError::InvalidInput(format!("weight {k} is not a nonnegative half-integer")));
    }
    Ok(t.round() as i64)
}

fn nu_of(two_k: i64, sign: Sign) -> i64 {
    match sign {
        Sign::Plus => (two_k + 8).div_euclid(8),
        Sign::Minus => (two_k + 4).div_euclid(8),
    }
}

/// `g±_{n,k}` together with a Chebyshev form of its J-polynomial for stable evaluation.
#[derive(Clone, Debug)]
pub struct KernelCoefficientForm {
    pub n: i64,
    pub two_k: i64,
    pub sign: Sign,
    pub rep: ModularFormRep,
    cheb: Vec<f64>,
}

impl KernelCoefficientForm {
    pub fn k(&self) -> f64 {
        self.two_k as f64 / 2.0
    }

    /// Value from precomputed form values at the point.
    pub fn eval_values(&self, v: &FormValues) -> C {
        let x = v.j / 32.0 - 1.0;
        let p = clenshaw(&self.cheb, x);
        let jm = if self.rep.jminus_power == 1 { v.log_jm } else { C::new(0.0, 0.0) };
        (v.log_theta * (4 - self.two_k) as f64 + jm).exp() * p
    }

    pub fn eval(&self, z: PointUH) -> Result<C> {
        Ok(self.eval_values(&eval_all(z)?))
    }

    /// Value together with a bound on the rounding error of the polynomial evaluation.
    pub fn eval_values_with_bound(&self, v: &FormValues) -> (C, f64) {
        let x = v.j / 32.0 - 1.0;
        let xi = x.norm() + (x.norm_sqr() + 1.0).sqrt();
        let mut growth = 0.0;
        for c in self.cheb.iter().rev() {
            growth = growth * xi + c.abs();
        }
        let jm = if self.rep.jminus_power == 1 { v.log_jm } else { C::new(0.0, 0.0) };
        let head = (v.log_theta * (4 - self.two_k) as f64 + jm).exp();
        let p = clenshaw(&self.cheb, x);
        (head * p, 4.0 * f64::EPSILON * (self.cheb.len() as f64 + 1.0) * growth * head.norm())
    }
}

fn clenshaw(c: &[f64], x: C) -> C {
    let mut b1 = C::new(0.0, 0.0);
    let mut b2 = C::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = x * b1 * 2.0 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

fn binom(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for i in 0..n {
        let mut next = vec![BigInt::one(); i + 2];
        for j in 1..=i {
            next[j] = &row[j - 1] + &row[j];
        }
        row = next;
    }
    row
}

/// Chebyshev coefficients (in `x = J/32 - 1`) of `Σ c_m J^m`, `m ≥ 0`.
fn chebyshev_of(poly: &[(i64, Q)]) -> Vec<f64> {
    let deg = poly.iter().map(|(m, _)| *m).max().unwrap_or(0).max(0) as usize;
    // power basis in x
    let mut px = vec![Q::zero(); deg + 1];
    for (m, c) in poly {
        let m = *m as usize;
        let b = binom(m);
        let scale = c * Q::from_integer(BigInt::from(32u32).pow(m as u32));
        for (i, bi) in b.iter().enumerate() {
            px[i] += &scale * Q::from_integer(bi.clone());
        }
    }
    // x^m = 2^{1-m} Σ_j C(m,j) T_{|m-2j|}, halved at T_0
    let mut t = vec![Q::zero(); deg + 1];
    for (m, a) in px.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let b = binom(m);
        let f = a / Q::from_integer(BigInt::from(2u32).pow(m as u32));
        for (j, bj) in b.iter().enumerate() {
            let idx = (m as i64 - 2 * j as i64).unsigned_abs() as usize;
            t[idx] += &f * Q::from_integer(bj.clone());
        }
    }
    t.iter().map(q_to_f64).collect()
}

fn weight_series(two_k: i64, sign: Sign, order: i64) -> Result<FracPowerSeries> {
    // θ^{2k} J₋^{[sign = -]} J^{-ν} in the τ variable
    let nu = nu_of(two_k, sign);
    let work = order + 2;
    let mut p = theta_series(work).pow_int(two_k)?;
    if sign == Sign::Minus {
        p = p.mul(&jminus_series(work));
    }
    let jinv = j_series(work + nu + 1).invert()?.truncate(work);
    p = p.mul(&jinv.pow_int(nu)?);
    Ok(p.truncate(order))
}

fn build(n: i64, two_k: i64, sign: Sign, j_poly: Vec<(i64, Q)>) -> KernelCoefficientForm {
    let rep = ModularFormRep {
        weight: Ratio::new(4 - two_k, 2),
        sign: sign.flip(),
        jminus_power: if sign == Sign::Plus { 1 } else { 0 },
        j_poly,
    };
    let cheb = chebyshev_of(&rep.j_poly);
    KernelCoefficientForm { n, two_k, sign, rep, cheb }
}

/// All `g±_{n,k}` with `ν ≤ n ≤ n_max` from the geometric expansion of `1/(J(τ) - J(z))`.
pub fn g_forms(n_max: i64, k: f64, sign: Sign) -> Result<Vec<KernelCoefficientForm>> {
    let two_k = two_k_of(k)?;
    let nu = nu_of(two_k, sign);
    if n_max < nu {
        return Ok(vec![]);
    }
    let order = n_max + 1;
    let base = weight_series(two_k, sign, order)?;
    let jinv = j_series(order + 1).invert()?.truncate(order);
    // series S_j = base · J^{-j}; c_{n,j} = coeff of t^n
    let mut sj = base;
    let mut coeffs: Vec<Vec<Q>> = vec![Vec::new(); (n_max - nu + 1) as usize];
    for j in 0..=(n_max - nu) {
        for n in nu..=n_max {
            if n >= nu + j {
                coeffs[(n - nu) as usize].push(sj.coeff_u(n)?);
            }
        }
        sj = sj.mul(&jinv);
    }
    Ok(coeffs
        .into_iter()
        .enumerate()
        .map(|(i, cs)| {
            let n = nu + i as i64;
            let poly = cs.into_iter().enumerate().map(|(j, c)| (nu + j as i64, c)).filter(|(_, c)| !c.is_zero()).collect();
            build(n, two_k, sign, poly)
        })
        .collect())
}

pub fn g_form(n: i64, k: f64, sign: Sign) -> Result<KernelCoefficientForm> {
    let two_k = two_k_of(k)?;
    let nu = nu_of(two_k, sign);
    if n < nu {
        return Err(ZiError::InvalidInput(format!("n = {n} is below ν = {nu}")));
    }
    Ok(g_forms(n, k, sign)?.pop().expect("nonempty"))
}

/// Reconstruction by principal-part matching: the element of `θ^{4-2k} J_∓ Σ_{m≥ν} a_m J^m`
/// with expansion `t^{-n} + O(t^{-(ν-1)})`.
pub fn g_form_by_matching(n: i64, k: f64, sign: Sign) -> Result<KernelCoefficientForm> {
    let two_k = two_k_of(k)?;
    let nu = nu_of(two_k, sign);
    if n < nu {
        return Err(ZiError::InvalidInput(format!("n = {n} is below ν = {nu}")));
    }
    let order = 1;
    let work = n + 3;
    let mut head = theta_series(work).pow_int(4 - two_k)?;
    if sign == Sign::Plus {
        head = head.mul(&jminus_series(work));
    }
    let j = j_series(work);
    let basis = |m: i64| -> Result<FracPowerSeries> { Ok(head.mul(&j.pow_int(m)?).truncate(order)) };
    let mut a = vec![(n, Q::one())];
    let mut resid = basis(n)?;
    for m in (nu..n).rev() {
        let c = resid.coeff_u(-m)?;
        if !c.is_zero() {
            let am = -c;
            resid = resid.add(&basis(m)?.scale(&am));
            a.push((m, am));
        }
    }
    a.reverse();
    Ok(build(n, two_k, sign, a))
}

pub fn g_eval(n: i64, k: f64, sign: Sign, z: PointUH) -> Result<C> {
    g_form(n, k, sign)?.eval(z)
}

/// The closed-form kernel `K±_k(τ, z)`.
pub fn kernel_eval(tau: PointUH, z: PointUH, k: f64, sign: Sign) -> Result<C> {
    let two_k = two_k_of(k)?;
    let nu = nu_of(two_k, sign);
    let a = eval_all(tau)?;
    let b = eval_all(z)?;
    let jm = if sign == Sign::Plus { b.log_jm } else { a.log_jm };
    let lr = b.log_j - a.log_j;
    let head = a.log_theta * two_k as f64 + b.log_theta * (4 - two_k) as f64 + lr * nu as f64 + jm;
    Ok(head.exp() / (1.0 - lr.exp()))
}

/// Coefficient of `t^e` in the q-expansion of `g`.
pub fn g_qexp_coeff(g: &KernelCoefficientForm, e: i64) -> Result<Q> {
    g.rep.q_expansion(e + 1)?.coeff_u(e)
}
