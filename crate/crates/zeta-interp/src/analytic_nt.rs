//! Classical analytic number theory: Γ, ψ, ζ, Hardy Z and its zeros, arithmetic functions,
//! Dirichlet characters and their L-functions.

use crate::error::{Result, ZiError};
use crate::qseries::{q_int, q_to_f64, Q};
use num_complex::Complex64 as C;
use num_integer::Integer;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Bernoulli numbers `B_0..B_{2·40}` as floats.
fn bernoulli() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        let n = 81;
        // Akiyama–Tanigawa
        let mut a: Vec<Q> = Vec::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        for m in 0..n {
            a.push(Q::new(1.into(), ((m + 1) as i64).into()));
            for j in (1..=m).rev() {
                a[j - 1] = (&a[j - 1] - &a[j]) * q_int(j as i64);
            }
            out.push(q_to_f64(&a[0]));
        }
        // the recurrence yields B_1 = +1/2
        out[1] = -0.5;
        out
    })
}

fn pole_check(s: C, at: f64) -> Result<()> {
    if (s - at).norm() < 1e-8 {
        return Err(ZiError::Pole { at: format!("{s}"), residue: "see definition".into() });
    }
    Ok(())
}

/// `log Γ(s)` on a branch continuous in `s` away from the negative axis.
pub fn lgamma_c(s: C) -> Result<C> {
    if s.im == 0.0 && s.re <= 0.0 && (s.re - s.re.round()).abs() < 1e-12 {
        return Err(ZiError::Pole { at: format!("{s}"), residue: "gamma pole".into() });
    }
    let mut z = s;
    let mut shift = C::new(0.0, 0.0);
    while z.re < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let b = bernoulli();
    let mut acc = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
    let zi = 1.0 / z;
    let z2 = zi * zi;
    let mut p = zi;
    for k in 1..=12 {
        acc += p * (b[2 * k] / ((2 * k) * (2 * k - 1)) as f64);
        p *= z2;
    }
    Ok(acc - shift)
}

pub fn gamma_c(s: C) -> Result<C> {
    Ok(lgamma_c(s)?.exp())
}

pub fn digamma(s: C) -> Result<C> {
    if s.im == 0.0 && s.re <= 0.0 && (s.re - s.re.round()).abs() < 1e-12 {
        return Err(ZiError::Pole { at: format!("{s}"), residue: "-1".into() });
    }
    let mut z = s;
    let mut shift = C::new(0.0, 0.0);
    while z.re < 15.0 {
        shift += 1.0 / z;
        z += 1.0;
    }
    let b = bernoulli();
    let mut acc = z.ln() - 0.5 / z;
    let z2 = 1.0 / (z * z);
    let mut p = z2;
    for k in 1..=12 {
        acc -= p * (b[2 * k] / (2 * k) as f64);
        p *= z2;
    }
    Ok(acc - shift)
}

/// `Σ_{n≥0} (n+a)^{-s}` without its pole term `(N+a)^{1-s}/(s-1)`; returns the remaining
/// part and the anchor `N + a` at which the pole term must be evaluated.
fn hurwitz_regular(s: C, a: f64) -> (C, f64) {
    let n = (30.0 + s.im.abs() + (-s.re).max(0.0)).ceil() as usize;
    let mut acc = C::new(0.0, 0.0);
    for j in 0..n {
        acc += (-s * (j as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    acc += 0.5 * (-s * lx).exp();
    let b = bernoulli();
    // B_{2k}/(2k)! · s(s+1)…(s+2k-2) x^{-s-2k+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut xp = (-(s + 1.0) * lx).exp();
    for k in 1..=15 {
        acc += poch * xp * (b[2 * k] / fact);
        poch *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        xp /= x * x;
    }
    (acc, x)
}

/// `ζ(s)` by Euler–Maclaurin summation.
pub fn zeta(s: C) -> Result<C> {
    pole_check(s, 1.0)?;
    if s.re < -10.0 {
        // ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s)
        let t = 1.0 - s;
        let f = (s * (2.0 * PI).ln() - (2.0 * PI).ln() + lgamma_c(t)?).exp() * (PI * s / 2.0).sin();
        return Ok(f * zeta(t)?);
    }
    let (r, x) = hurwitz_regular(s, 1.0);
    Ok(r + ((1.0 - s) * x.ln()).exp() / (s - 1.0))
}

/// `ζ*(s) = π^{-s/2}Γ(s/2)ζ(s)`.
pub fn zeta_star(s: C) -> Result<C> {
    pole_check(s, 0.0)?;
    pole_check(s, 1.0)?;
    Ok((-s / 2.0 * PI.ln() + lgamma_c(s / 2.0)?).exp() * zeta(s)?)
}

/// `ζ(s)` from the alternating series of `η` with Borwein acceleration.
pub fn zeta_eta(s: C) -> Result<C> {
    pole_check(s, 1.0)?;
    let n = 60 + (1.2 * s.im.abs()) as usize;
    let mut d = vec![0.0f64; n + 1];
    let mut term = 1.0 / n as f64;
    let mut sum = term;
    d[0] = sum;
    for i in 1..=n {
        term *= ((n + i - 1) * 4 * (n - i + 1)) as f64 / ((2 * i - 1) * 2 * i) as f64;
        sum += term * 1.0;
        d[i] = sum * n as f64;
    }
    // d_k = n Σ_{i≤k} (n+i-1)! 4^i / ((n-i)!(2i)!)
    let dn = d[n];
    let mut acc = C::new(0.0, 0.0);
    for k in 0..n {
        let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += (-s * ((k + 1) as f64).ln()).exp() * (sg * (d[k] - dn));
    }
    let eta = -acc / dn;
    let f = 1.0 - ((1.0 - s) * 2f64.ln()).exp();
    if f.norm() < 1e-12 {
        return Err(ZiError::Pole { at: format!("{s}"), residue: "eta factor vanishes".into() });
    }
    Ok(eta / f)
}

/// Riemann–Siegel phase `θ(t) = arg Γ(1/4 + it/2) - (t/2) log π`, continuous in `t`.
pub fn rs_theta(t: f64) -> f64 {
    if t.abs() >= 10.0 {
        let a = t.abs();
        let v = a / 2.0 * (a / (2.0 * PI)).ln() - a / 2.0 - PI / 8.0 + 1.0 / (48.0 * a) + 7.0 / (5760.0 * a.powi(3));
        return if t < 0.0 { -v } else { v };
    }
    lgamma_c(C::new(0.25, t / 2.0)).expect("regular").im - t / 2.0 * PI.ln()
}

/// Hardy's `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.
pub fn hardy_z(t: f64) -> f64 {
    let z = zeta(C::new(0.5, t)).expect("critical line is regular");
    (C::new(0.0, rs_theta(t)).exp() * z).re
}

/// Main term of the Riemann–von Mangoldt formula.
pub fn rvm_main(t: f64) -> f64 {
    t / (2.0 * PI) * (t / (2.0 * PI * std::f64::consts::E)).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroSource {
    Computed,
    File,
}

#[derive(Clone, Debug)]
pub struct ZeroTable {
    pub ordinates: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub precision: f64,
    pub source: ZeroSource,
}

impl ZeroTable {
    fn check(&self) -> Result<()> {
        for w in self.ordinates.windows(2) {
            if !(w[1] - w[0] > 10.0 * self.precision) {
                return Err(ZiError::Integrity(format!("zeros {} and {} are not separated", w[0], w[1])));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        let mut s = format!("# ordinates of nontrivial zeta zeros\nprecision={:e}\n", self.precision);
        for g in &self.ordinates {
            s.push_str(&format!("{g:.12}\n"));
        }
        std::fs::write(path, s).map_err(|e| ZiError::InvalidInput(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ZiError::InvalidInput(format!("{}: {e}", path.display())))?;
        let mut precision = None;
        let mut ordinates = Vec::new();
        for line in text.lines() {
            let l = line.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if let Some(p) = l.strip_prefix("precision=") {
                precision = Some(p.parse::<f64>().map_err(|e| ZiError::InvalidInput(format!("precision: {e}")))?);
                continue;
            }
            ordinates.push(l.parse::<f64>().map_err(|e| ZiError::InvalidInput(format!("ordinate {l}: {e}")))?);
        }
        let precision = precision.ok_or_else(|| ZiError::InvalidInput("missing precision header".into()))?;
        let t = ZeroTable { multiplicities: vec![1; ordinates.len()], ordinates, precision, source: ZeroSource::File };
        t.check()?;
        Ok(t)
    }
}

fn refine_zero(mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    // Illinois false position
    let mut side = 0i32;
    for _ in 0..200 {
        if b - a < 1e-12 {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = hardy_z(c);
        if fc == 0.0 {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of `Z` on `(lo, hi]`, scanning with a step tied to the mean zero spacing
/// and subdividing where `|Z|` dips without changing sign.
fn sign_change_brackets(lo: f64, hi: f64) -> Result<Vec<(f64, f64, f64, f64)>> {
    let mut out = Vec::new();
    let mut t = lo;
    let mut zt = hardy_z(t);
    let mut prev: Option<(f64, f64)> = None;
    while t < hi {
        let spacing = 2.0 * PI / (t.max(8.0) / (2.0 * PI)).ln().max(0.5);
        let h = (spacing / 12.0).min(hi - t).max(1e-6);
        let u = t + h;
        let zu = hardy_z(u);
        if (zt > 0.0) != (zu > 0.0) {
            out.push((t, u, zt, zu));
        } else if let Some((tp, zp)) = prev {
            // local minimum of |Z| at t: look for a hidden pair of zeros
            if zt.abs() < zp.abs() && zt.abs() < zu.abs() {
                let sub = scan_dense(tp, u, 64)?;
                out.extend(sub);
            }
        }
        prev = Some((t, zt));
        t = u;
        zt = zu;
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 || (a.1 > b.0 && a.0 < b.1));
    Ok(out)
}

fn scan_dense(a: f64, b: f64, m: usize) -> Result<Vec<(f64, f64, f64, f64)>> {
    let pts: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&t| hardy_z(t)).collect();
    let mut out = Vec::new();
    for i in 0..m {
        if (vals[i] > 0.0) != (vals[i + 1] > 0.0) {
            out.push((pts[i], pts[i + 1], vals[i], vals[i + 1]));
        }
    }
    let min = vals.iter().fold(f64::INFINITY, |x, v| x.min(v.abs()));
    if out.is_empty() && min < 1e-9 {
        return Err(ZiError::Integrity(format!("possible multiple zero in [{a}, {b}]")));
    }
    Ok(out)
}

/// Zeros of `ζ(1/2 + it)` with `0 < t ≤ T`.
pub fn find_zeros(t_max: f64) -> Result<ZeroTable> {
    if !(t_max > 0.0) || t_max > 500.0 {
        return Err(ZiError::InvalidInput(format!("T = {t_max} is outside (0, 500]")));
    }
    let w = 25.0;
    let windows: Vec<(f64, f64)> =
        (0..(t_max / w).ceil() as usize).map(|i| (i as f64 * w, ((i + 1) as f64 * w).min(t_max))).filter(|(a, b)| b > a).collect();
    let parts: Vec<Result<Vec<f64>>> = windows
        .par_iter()
        .map(|&(a, b)| {
            let br = sign_change_brackets(a.max(1.0), b)?;
            Ok(br.into_iter().map(|(x, y, fx, fy)| refine_zero(x, y, fx, fy)).collect())
        })
        .collect();
    let mut ordinates = Vec::new();
    for p in parts {
        ordinates.extend(p?);
    }
    ordinates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ordinates.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    let t = ZeroTable {
        multiplicities: vec![1; ordinates.len()],
        ordinates,
        precision: 1e-9,
        source: ZeroSource::Computed,
    };
    t.check()?;
    // N(T) = θ(T)/π + 1 + S(T) with |S(T)| < 1 in this range
    let smooth = rs_theta(t_max) / PI + 1.0;
    if (t.len() as f64 - smooth).abs() > 2.5 {
        return Err(ZiError::Integrity(format!("found {} zeros up to {t_max}, expected about {smooth:.1}", t.len())));
    }
    Ok(t)
}

/// The first `count` zeros.
pub fn first_zeros(count: usize) -> Result<ZeroTable> {
    let mut t = 20.0;
    loop {
        if rvm_main(t) + 2.0 > count as f64 || t >= 500.0 {
            let mut z = find_zeros(t.min(500.0))?;
            if z.len() >= count {
                z.ordinates.truncate(count);
                z.multiplicities.truncate(count);
                return Ok(z);
            }
            if t >= 500.0 {
                return Err(ZiError::InvalidInput(format!("{count} zeros exceed the configured range")));
            }
        }
        t += 10.0;
    }
}

pub fn count_n(t: f64) -> Result<usize> {
    Ok(find_zeros(t)?.len())
}

pub fn mobius(n: u64) -> i64 {
    let mut m = n;
    let mut r = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if m > 1 {
        r = -r;
    }
    r
}

pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { (p as f64).ln() } else { 0.0 };
        }
        p += 1;
    }
    (n as f64).ln()
}

/// `σ_1(n)`; zero for `n = 0`.
pub fn sigma(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

/// Number of representations of `n` as an ordered sum of `l` signed squares.
pub fn r_squares(l: u32, n: u64) -> u64 {
    let mut row = vec![0u64; n as usize + 1];
    row[0] = 1;
    for _ in 0..l {
        let mut next = vec![0u64; n as usize + 1];
        for (m, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mut j = 0u64;
            while m as u64 + j * j <= n {
                next[m + (j * j) as usize] += if j == 0 { c } else { 2 * c };
                j += 1;
            }
        }
        row = next;
    }
    row[n as usize]
}

/// Primes up to `n`.
pub fn primes_upto(n: usize) -> Vec<usize> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// A Dirichlet character by its value table on `0..q`.
#[derive(Clone, Debug)]
pub struct CharacterRep {
    pub q: u64,
    pub values: Vec<C>,
    pub even: bool,
    pub primitive: bool,
}

impl CharacterRep {
    pub fn value(&self, n: u64) -> C {
        self.values[(n % self.q) as usize]
    }

    pub fn conj(&self) -> CharacterRep {
        CharacterRep { q: self.q, values: self.values.iter().map(|v| v.conj()).collect(), even: self.even, primitive: self.primitive }
    }

    pub fn parity(&self) -> f64 {
        if self.even {
            0.0
        } else {
            1.0
        }
    }

    pub fn is_principal(&self) -> bool {
        self.values.iter().all(|v| v.norm() < 1e-12 || (v - 1.0).norm() < 1e-12)
    }
}

/// All Dirichlet characters modulo `q`.
pub fn characters(q: u64) -> Result<Vec<CharacterRep>> {
    if q == 0 {
        return Err(ZiError::InvalidInput("modulus 0".into()));
    }
    let units: Vec<u64> = (0..q).filter(|a| a.gcd(&q) == 1).collect();
    // a generating set with orders, by greedy extension of the generated subgroup
    let mut gens: Vec<(u64, u64)> = Vec::new();
    let mut group: Vec<u64> = vec![1 % q];
    for &u in &units {
        if group.contains(&u) {
            continue;
        }
        // relative order of u modulo the current subgroup
        let mut r = 1;
        let mut x = u;
        while !group.contains(&x) {
            x = x * u % q;
            r += 1;
        }
        // only accept when the subgroup is a direct product
        if x != 1 % q {
            continue;
        }
        let mut ng = Vec::new();
        let mut p = 1 % q;
        for _ in 0..r {
            for &g in &group {
                ng.push(g * p % q);
            }
            p = p * u % q;
        }
        group = ng;
        gens.push((u, r));
    }
    if group.len() != units.len() {
        // greedy choice failed; fall back to an exhaustive generator search
        return characters_exhaustive(q, &units);
    }
    Ok(build_characters(q, &gens))
}

fn build_characters(q: u64, gens: &[(u64, u64)]) -> Vec<CharacterRep> {
    let total: u64 = gens.iter().map(|g| g.1).product();
    let mut out = Vec::new();
    for idx in 0..total {
        let mut e = Vec::new();
        let mut r = idx;
        for &(_, ord) in gens {
            e.push(r % ord);
            r /= ord;
        }
        let mut values = vec![C::new(0.0, 0.0); q as usize];
        // walk the group as products of generator powers
        let mut stack = vec![(1 % q, C::new(1.0, 0.0), 0usize)];
        while let Some((x, v, d)) = stack.pop() {
            if d == gens.len() {
                values[x as usize] = v;
                continue;
            }
            let (g, ord) = gens[d];
            let step = C::from_polar(1.0, 2.0 * PI * e[d] as f64 / ord as f64);
            let mut p = x;
            let mut pv = v;
            for _ in 0..ord {
                stack.push((p, pv, d + 1));
                p = p * g % q;
                pv *= step;
            }
        }
        let even = (values[(q - 1) as usize] - 1.0).norm() < 1e-9 || q <= 2;
        let mut c = CharacterRep { q, values, even, primitive: false };
        c.primitive = is_primitive(&c);
        out.push(c);
    }
    out
}

fn characters_exhaustive(q: u64, units: &[u64]) -> Result<Vec<CharacterRep>> {
    Err(ZiError::Unsupported(format!("character group modulo {q} with {} units", units.len())))
}

fn is_primitive(c: &CharacterRep) -> bool {
    let q = c.q;
    for d in 1..q {
        if q % d != 0 {
            continue;
        }
        let induced = (1..q).filter(|a| a.gcd(&q) == 1 && a % d == 1 % d).all(|a| (c.value(a) - 1.0).norm() < 1e-9);
        if induced {
            return false;
        }
    }
    true
}

/// Primitive characters modulo `q`.
pub fn primitive_characters(q: u64) -> Result<Vec<CharacterRep>> {
    Ok(characters(q)?.into_iter().filter(|c| c.primitive).collect())
}

/// `w(χ) = τ(χ)/(i^a √q)`.
pub fn root_number(chi: &CharacterRep) -> Result<C> {
    if !chi.primitive {
        return Err(ZiError::InvalidInput(format!("character modulo {} is not primitive", chi.q)));
    }
    let q = chi.q;
    let mut g = C::new(0.0, 0.0);
    for a in 1..q {
        g += chi.value(a) * C::from_polar(1.0, 2.0 * PI * a as f64 / q as f64);
    }
    let ia = if chi.even { C::new(1.0, 0.0) } else { C::i() };
    Ok(g / (ia * (q as f64).sqrt()))
}

/// `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)`.
pub fn l_chi(s: C, chi: &CharacterRep) -> Result<C> {
    let q = chi.q as f64;
    let mut acc = C::new(0.0, 0.0);
    let mut pole = C::new(0.0, 0.0);
    let mut tot = C::new(0.0, 0.0);
    let near = (s - 1.0).norm() < 1e-6;
    for a in 1..=chi.q {
        let c = chi.value(a);
        if c.norm() == 0.0 {
            continue;
        }
        let (r, x) = hurwitz_regular(s, a as f64 / q);
        acc += c * r;
        tot += c;
        let lx = x.ln();
        pole += if near {
            // (x^{1-s} - 1)/(s - 1) to second order
            let u = (1.0 - s) * lx;
            c * (-lx) * (1.0 + u / 2.0 + u * u / 6.0)
        } else {
            c * ((1.0 - s) * lx).exp() / (s - 1.0)
        };
    }
    if tot.norm() > 1e-9 {
        pole_check(s, 1.0)?;
        if near {
            pole += tot / (s - 1.0);
        }
    }
    Ok(((-s) * q.ln()).exp() * (acc + pole))
}

/// `L*(s, χ) = (q/π)^{(s+a)/2} Γ((s+a)/2) L(s, χ)`.
pub fn l_star(s: C, chi: &CharacterRep) -> Result<C> {
    let h = (s + chi.parity()) / 2.0;
    Ok((h * (chi.q as f64 / PI).ln() + lgamma_c(h)?).exp() * l_chi(s, chi)?)
}

/// Divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            lo.push(d);
            if d * d != n {
                hi.push(n / d);
            }
        }
        d += 1;
    }
    hi.reverse();
    lo.extend(hi);
    lo
}

/// `Σ_{d|n} μ(d) f(n/d)`-style helper: exact `σ(n) - 5σ(n/2) + 4σ(n/4)` with `σ(x) = 0` off the integers.
pub fn e2_combination(n: u64) -> i64 {
    let s = |m: u64, d: u64| if m % d == 0 { sigma(m / d) as i64 } else { 0 };
    s(n, 1) - 5 * s(n, 2) + 4 * s(n, 4)
}
