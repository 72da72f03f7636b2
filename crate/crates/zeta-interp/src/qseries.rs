//! Exact truncated Laurent series in a fractional power of the nome.
//!
//! A [`FracPowerSeries`] with `denom = d` is a series in `u = q^{1/d}`.
//! Every coefficient is an exact rational and every series carries its own
//! truncation order: coefficients at u-exponents `>= trunc_order` are unknown.

use crate::error::{Result, ZiError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    // Direct ratio conversion keeps precision for huge numerators and denominators.
    let n = x.numer();
    let d = x.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = nb - db - 60;
    let (nn, dd) = if shift > 0 {
        (n.clone(), d.clone() << (shift as usize))
    } else {
        (n.clone() << ((-shift) as usize), d.clone())
    };
    let r = (&nn / &dd).to_f64().unwrap_or(f64::NAN);
    r * 2f64.powi(shift as i32)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracPowerSeries {
    denom: u64,
    base_exp: i64,
    coeffs: Vec<Q>,
    trunc_order: i64,
}

impl FracPowerSeries {
    /// Builds a series from raw coefficients, stripping leading zeros.
    pub fn new(denom: u64, base_exp: i64, coeffs: Vec<Q>, trunc_order: i64) -> Result<Self> {
        if denom == 0 {
            return Err(ZiError::InvalidInput("denom must be positive".into()));
        }
        if base_exp + coeffs.len() as i64 > trunc_order {
            return Err(ZiError::InvalidInput(format!(
                "base {} + {} coefficients exceeds truncation order {}",
                base_exp,
                coeffs.len(),
                trunc_order
            )));
        }
        let mut s = FracPowerSeries { denom, base_exp, coeffs, trunc_order };
        s.normalize();
        Ok(s)
    }

    pub fn from_ints(denom: u64, base_exp: i64, coeffs: &[i64], trunc_order: i64) -> Result<Self> {
        Self::new(denom, base_exp, coeffs.iter().map(|&c| q_int(c)).collect(), trunc_order)
    }

    pub fn zero(denom: u64, trunc_order: i64) -> Self {
        FracPowerSeries { denom, base_exp: trunc_order, coeffs: Vec::new(), trunc_order }
    }

    /// `c * u^e` known up to (not including) `trunc_order`.
    pub fn monomial(denom: u64, e: i64, c: Q, trunc_order: i64) -> Self {
        if c.is_zero() || e >= trunc_order {
            return Self::zero(denom, trunc_order);
        }
        FracPowerSeries { denom, base_exp: e, coeffs: vec![c], trunc_order }
    }

    pub fn one(denom: u64, trunc_order: i64) -> Self {
        Self::monomial(denom, 0, Q::one(), trunc_order)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.base_exp = self.trunc_order;
            }
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(0..k);
                    self.base_exp += k as i64;
                }
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }
    pub fn base_exp(&self) -> i64 {
        self.base_exp
    }
    pub fn trunc_order(&self) -> i64 {
        self.trunc_order
    }
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `u^e` for an integer exponent in this series' variable.
    pub fn coeff_u(&self, e: i64) -> Result<Q> {
        if e >= self.trunc_order {
            return Err(ZiError::OutOfRange {
                exponent: format!("{}/{}", e, self.denom),
                trunc: format!("{}/{}", self.trunc_order, self.denom),
            });
        }
        if e < self.base_exp {
            return Ok(Q::zero());
        }
        Ok(self.coeffs.get((e - self.base_exp) as usize).cloned().unwrap_or_else(Q::zero))
    }

    /// Coefficient of `q^e`.
    pub fn coeff(&self, e: &num_rational::Ratio<i64>) -> Result<Q> {
        let scaled = e * num_rational::Ratio::from_integer(self.denom as i64);
        if !scaled.is_integer() {
            return Err(ZiError::InvalidInput(format!(
                "exponent {} not representable at denom {}",
                e, self.denom
            )));
        }
        self.coeff_u(scaled.to_integer())
    }

    /// Re-expresses the series in `q^{1/new_denom}`; `new_denom` must be a multiple.
    pub fn lift(&self, new_denom: u64) -> Result<Self> {
        if new_denom % self.denom != 0 {
            return Err(ZiError::InvalidInput(format!("{} does not divide {}", self.denom, new_denom)));
        }
        let m = (new_denom / self.denom) as i64;
        if m == 1 {
            return Ok(self.clone());
        }
        let mut coeffs = Vec::new();
        if !self.coeffs.is_empty() {
            coeffs = vec![Q::zero(); (self.coeffs.len() - 1) * m as usize + 1];
            for (i, c) in self.coeffs.iter().enumerate() {
                coeffs[i * m as usize] = c.clone();
            }
        }
        let base = if self.coeffs.is_empty() { self.trunc_order * m } else { self.base_exp * m };
        // Truncation scales exactly: unknown from trunc*m on.
        let trunc = self.trunc_order * m;
        let mut s = FracPowerSeries { denom: new_denom, base_exp: base, coeffs, trunc_order: trunc };
        s.normalize();
        Ok(s)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let d = a.denom.lcm(&b.denom);
        (a.lift(d).expect("lcm lift"), b.lift(d).expect("lcm lift"))
    }

    /// Drops every coefficient at exponent `>= order`.
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.trunc_order {
            return self.clone();
        }
        let keep = (order - self.base_exp).max(0) as usize;
        let coeffs = self.coeffs.iter().take(keep).cloned().collect();
        let mut s = FracPowerSeries { denom: self.denom, base_exp: self.base_exp.min(order), coeffs, trunc_order: order };
        s.normalize();
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let trunc = a.trunc_order.min(b.trunc_order);
        let base = a.base_exp.min(b.base_exp).min(trunc);
        let len = (trunc - base).max(0) as usize;
        let mut coeffs = vec![Q::zero(); len];
        for s in [&a, &b] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let e = s.base_exp + i as i64;
                if e < trunc {
                    coeffs[(e - base) as usize] += c;
                }
            }
        }
        let mut r = FracPowerSeries { denom: a.denom, base_exp: base, coeffs, trunc_order: trunc };
        r.normalize();
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in r.coeffs.iter_mut() {
            *c = -c.clone();
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.denom, self.trunc_order);
        }
        let mut r = self.clone();
        for x in r.coeffs.iter_mut() {
            *x = &*x * c;
        }
        r
    }

    /// Multiplies by `u^e`.
    pub fn shift(&self, e: i64) -> Self {
        let mut r = self.clone();
        r.base_exp += e;
        r.trunc_order += e;
        r
    }

    /// Exact Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let trunc = (a.trunc_order + b.base_exp).min(b.trunc_order + a.base_exp);
        if a.is_zero() || b.is_zero() {
            return Self::zero(a.denom, trunc);
        }
        let base = a.base_exp + b.base_exp;
        let len = (trunc - base).max(0) as usize;
        let mut coeffs = vec![Q::zero(); len];
        for (i, x) in a.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !y.is_zero() {
                    coeffs[i + j] += x * y;
                }
            }
        }
        let mut r = FracPowerSeries { denom: a.denom, base_exp: base, coeffs, trunc_order: trunc };
        r.normalize();
        r
    }

    /// Splits `a = c u^b (1 + x)` and returns `(c, b, 1 + x)` with the unit part at exponent 0.
    fn unit_part(&self) -> Result<(Q, i64, Self)> {
        if self.is_zero() {
            return Err(ZiError::InvalidInput("series has no invertible leading term".into()));
        }
        let c = self.coeffs[0].clone();
        let inv = Q::one() / &c;
        let unit = FracPowerSeries {
            denom: self.denom,
            base_exp: 0,
            coeffs: self.coeffs.iter().map(|x| x * &inv).collect(),
            trunc_order: self.trunc_order - self.base_exp,
        };
        Ok((c, self.base_exp, unit))
    }

    pub fn invert(&self) -> Result<Self> {
        self.pow_int(-1)
    }

    /// Integer power; negative exponents need an invertible leading monomial.
    pub fn pow_int(&self, r: i64) -> Result<Self> {
        if r >= 0 && r <= 2 {
            return Ok(match r {
                0 => Self::one(self.denom, self.trunc_order - self.base_exp),
                1 => self.clone(),
                _ => self.mul(self),
            });
        }
        let (c, b, unit) = self.unit_part()?;
        let p = unit.unit_power(&Q::from_integer(BigInt::from(r)));
        let cr = pow_q(&c, r);
        Ok(p.scale(&cr).shift(b * r))
    }

    /// `a^r` for a series with constant term 1, by the binomial recurrence.
    pub fn pow_rational(&self, r: &Q) -> Result<Self> {
        if r.is_integer() {
            if let Some(ri) = r.to_integer().to_i64() {
                if self.is_zero() {
                    return Err(ZiError::InvalidInput("zero series".into()));
                }
                return self.pow_int(ri);
            }
        }
        if self.is_zero() || self.base_exp != 0 || !self.coeffs[0].is_one() {
            return Err(ZiError::InvalidInput(
                "rational power needs base exponent 0 and constant term 1".into(),
            ));
        }
        Ok(self.unit_power(r))
    }

    fn unit_power(&self, r: &Q) -> Self {
        let len = self.trunc_order.max(0) as usize;
        let a = |k: usize| -> Q { self.coeffs.get(k).cloned().unwrap_or_else(Q::zero) };
        let mut b: Vec<Q> = Vec::with_capacity(len);
        if len > 0 {
            b.push(Q::one());
        }
        let r1 = r + Q::one();
        for n in 1..len {
            let mut acc = Q::zero();
            for k in 1..=n {
                let ak = a(k);
                if ak.is_zero() {
                    continue;
                }
                let w = &r1 * Q::from_integer(BigInt::from(k as i64)) - Q::from_integer(BigInt::from(n as i64));
                acc += w * ak * &b[n - k];
            }
            b.push(acc / Q::from_integer(BigInt::from(n as i64)));
        }
        let mut s = FracPowerSeries { denom: self.denom, base_exp: 0, coeffs: b, trunc_order: self.trunc_order };
        s.normalize();
        s
    }

    /// Substitutes `u -> u^m` (the series variable stays `q^{1/denom}`).
    pub fn dilate(&self, m: u64) -> Self {
        let lifted = self.lift(self.denom * m).expect("multiple");
        FracPowerSeries { denom: self.denom, ..lifted }
    }

    /// Rewrites the series with a smaller denominator when all exponents allow it.
    pub fn reduce_denom(&self) -> Self {
        let mut g = self.denom as i64;
        g = g.gcd(&self.trunc_order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                g = g.gcd(&(self.base_exp + i as i64));
            }
        }
        let g = g.unsigned_abs().max(1);
        if g == 1 {
            return self.clone();
        }
        let gi = g as i64;
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if (self.base_exp + i as i64) % gi == 0 {
                coeffs.push(c.clone());
            }
        }
        let mut s = FracPowerSeries {
            denom: self.denom / g,
            base_exp: self.base_exp.div_euclid(gi),
            coeffs,
            trunc_order: self.trunc_order / gi,
        };
        s.normalize();
        s
    }

    /// Textual dump: header line then `e:num/den` per nonzero coefficient.
    pub fn dump(&self) -> String {
        let mut out = format!("denom={} base={} trunc={}\n", self.denom, self.base_exp, self.trunc_order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out.push_str(&format!("{}:{}/{}\n", self.base_exp + i as i64, c.numer(), c.denom()));
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| ZiError::InvalidInput("empty dump".into()))?;
        let mut denom = None;
        let mut trunc = None;
        for part in header.split_whitespace() {
            let (k, v) = part.split_once('=').ok_or_else(|| ZiError::InvalidInput(part.into()))?;
            let v: i64 = v.parse().map_err(|_| ZiError::InvalidInput(part.into()))?;
            match k {
                "denom" => denom = Some(v as u64),
                "trunc" => trunc = Some(v),
                "base" => {}
                _ => return Err(ZiError::InvalidInput(format!("unknown key {k}"))),
            }
        }
        let denom = denom.ok_or_else(|| ZiError::InvalidInput("missing denom".into()))?;
        let trunc = trunc.ok_or_else(|| ZiError::InvalidInput("missing trunc".into()))?;
        let mut terms: Vec<(i64, Q)> = Vec::new();
        for l in lines {
            let (e, c) = l.split_once(':').ok_or_else(|| ZiError::InvalidInput(l.into()))?;
            let e: i64 = e.trim().parse().map_err(|_| ZiError::InvalidInput(l.into()))?;
            let (n, d) = c.trim().split_once('/').ok_or_else(|| ZiError::InvalidInput(l.into()))?;
            let n: BigInt = n.parse().map_err(|_| ZiError::InvalidInput(l.into()))?;
            let d: BigInt = d.parse().map_err(|_| ZiError::InvalidInput(l.into()))?;
            terms.push((e, Q::new(n, d)));
        }
        if terms.is_empty() {
            return Ok(Self::zero(denom, trunc));
        }
        let base = terms.iter().map(|t| t.0).min().unwrap();
        let mut coeffs = vec![Q::zero(); (trunc - base).max(0) as usize];
        for (e, c) in terms {
            if e >= trunc {
                return Err(ZiError::InvalidInput(format!("term {e} beyond trunc")));
            }
            coeffs[(e - base) as usize] = c;
        }
        Self::new(denom, base, coeffs, trunc)
    }

    /// Floating evaluation at a complex value of `u`.
    pub fn eval_u(&self, u: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * u + q_to_f64(c);
        }
        acc * u.powi(self.base_exp as i32)
    }
}

fn pow_q(c: &Q, r: i64) -> Q {
    let mut base = if r < 0 { Q::one() / c } else { c.clone() };
    let mut e = r.unsigned_abs();
    let mut acc = Q::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

impl fmt::Display for FracPowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.base_exp + i as i64;
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{} u^{}", sign, a, e)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(u^{}) [u=q^(1/{})]", self.trunc_order, self.denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(order: i64) -> FracPowerSeries {
        let mut c = vec![0i64; order as usize];
        let mut n = 0i64;
        while n * n < order {
            c[(n * n) as usize] += if n == 0 { 1 } else { 2 };
            n += 1;
        }
        FracPowerSeries::from_ints(2, 0, &c, order).unwrap()
    }

    #[test]
    fn monomial_cancellation() {
        let a = FracPowerSeries::monomial(2, -1, q_int(1), 10);
        let b = FracPowerSeries::monomial(2, 1, q_int(1), 10);
        let p = a.mul(&b);
        assert_eq!(p.coeff_u(0).unwrap(), q_int(1));
        assert_eq!(p.base_exp(), 0);
    }

    #[test]
    fn geometric_inverse() {
        let a = FracPowerSeries::from_ints(2, 0, &[1, -1], 12).unwrap();
        let inv = a.invert().unwrap();
        for e in 0..12 {
            assert_eq!(inv.coeff_u(e).unwrap(), q_int(1));
        }
    }

    #[test]
    fn sqrt_binomial() {
        let a = FracPowerSeries::from_ints(2, 0, &[1, 1], 6).unwrap();
        let r = a.pow_rational(&q_frac(1, 2)).unwrap();
        assert_eq!(r.coeff_u(1).unwrap(), q_frac(1, 2));
        assert_eq!(r.coeff_u(2).unwrap(), q_frac(-1, 8));
        assert_eq!(r.coeff_u(3).unwrap(), q_frac(1, 16));
    }

    #[test]
    fn theta_coeff_half() {
        let t = theta(10);
        assert_eq!(t.coeff(&num_rational::Ratio::new(0, 1)).unwrap(), q_int(1));
        assert_eq!(t.coeff(&num_rational::Ratio::new(1, 2)).unwrap(), q_int(2));
        assert!(t.coeff(&num_rational::Ratio::new(5, 1)).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let t = theta(20).pow_int(3).unwrap();
        let back = FracPowerSeries::parse_dump(&t.dump()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn rational_power_rejects_bad_leading() {
        let a = FracPowerSeries::from_ints(2, 1, &[2, 1], 6).unwrap();
        assert!(a.pow_rational(&q_frac(1, 2)).is_err());
        assert!(a.pow_rational(&q_int(-2)).is_ok());
    }

    #[test]
    fn mixed_denominators_lift() {
        let a = FracPowerSeries::monomial(2, 1, q_int(1), 4);
        let b = FracPowerSeries::monomial(8, 1, q_int(1), 16);
        let p = a.mul(&b);
        assert_eq!(p.denom(), 8);
        assert_eq!(p.coeff(&num_rational::Ratio::new(5, 8)).unwrap(), q_int(1));
    }

    #[test]
    fn f64_conversion_of_large_ratio() {
        let big = Q::new(BigInt::from(10).pow(400) + 1u32, BigInt::from(10).pow(399));
        assert!((q_to_f64(&big) - 10.0).abs() < 1e-12);
    }
}
