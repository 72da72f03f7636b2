//! Reduction to the fundamental domain of the theta group and the statistics of the
//! height `𝐈(τ)` and the inversion count `𝐍(τ)`.

use crate::analytic_nt::zeta;
use crate::dirichlet_kernels::cauchy_derivative;
use crate::error::{Result, ZiError};
use crate::modforms::PointUH;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Boundary tolerance for `|τ| = 1`.
pub const TIE_TOL: f64 = 1e-12;
const MAX_STEPS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    S,
    /// `T^{2m}`
    T2(i64),
}

/// `(a, b, c, d)` with `ad - bc = 1`.
pub type Matrix = [i64; 4];

pub fn mobius(m: &Matrix, tau: C) -> C {
    (tau * m[0] as f64 + m[1] as f64) / (tau * m[2] as f64 + m[3] as f64)
}

fn mul(x: &Matrix, y: &Matrix) -> Matrix {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

pub fn letter_matrix(l: Letter) -> Matrix {
    match l {
        Letter::S => [0, -1, 1, 0],
        Letter::T2(m) => [1, 2 * m, 0, 1],
    }
}

/// Product of a word, leftmost letter outermost.
pub fn word_matrix(word: &[Letter]) -> Matrix {
    word.iter().fold([1, 0, 0, 1], |acc, &l| mul(&acc, &letter_matrix(l)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult {
    /// Canonical word of `γ_τ`, leftmost letter applied last.
    pub word: Vec<Letter>,
    pub matrix: Matrix,
    pub reduced: C,
    /// `𝐍(τ)`
    pub inversions: u32,
    /// `𝐈(τ)`
    pub height: f64,
}

pub fn in_closed_domain(tau: C, slack: f64) -> bool {
    tau.re.abs() <= 1.0 + slack && tau.norm() >= 1.0 - slack
}

/// Greedy reduction: translate by a power of `T²` into `|Re τ| ≤ 1`, invert while `|τ| < 1`.
pub fn reduce(tau: PointUH) -> Result<ReductionResult> {
    let t = tau.c();
    let mut m: Matrix = [1, 0, 0, 1];
    let mut applied = Vec::new();
    let mut s_count = 0u32;
    for _ in 0..MAX_STEPS {
        let p = mobius(&m, t);
        let k = (p.re / 2.0).round() as i64;
        if k != 0 {
            m = mul(&letter_matrix(Letter::T2(-k)), &m);
            applied.push(Letter::T2(-k));
        }
        let p = mobius(&m, t);
        if p.norm() < 1.0 - TIE_TOL {
            m = mul(&letter_matrix(Letter::S), &m);
            applied.push(Letter::S);
            s_count += 1;
            continue;
        }
        let tie = (p.norm() - 1.0).abs() <= TIE_TOL;
        applied.reverse();
        return Ok(ReductionResult {
            word: applied,
            matrix: m,
            reduced: p,
            inversions: 1 + s_count + tie as u32,
            height: p.im,
        });
    }
    Err(ZiError::Integrity(format!("reduction of {t} did not terminate")))
}

/// Maximisers of `Im γτ` over reduced words with at most `max_letters` letters and `|m| ≤ max_shift`.
#[derive(Clone, Debug)]
pub struct BfsResult {
    pub height: f64,
    /// Maximising matrices whose image has `|Re| ≤ 1`, each with its `S` count.
    pub best: Vec<(Matrix, u32)>,
}

impl BfsResult {
    pub fn inversions(&self) -> u32 {
        1 + self.best.iter().map(|b| b.1).max().unwrap_or(0)
    }
}

/// Breadth-first search over reduced words in `S` and `T^{2m}`.
pub fn bfs_reduce(tau: PointUH, max_letters: usize, max_shift: i64) -> BfsResult {
    let t = tau.c();
    // (matrix, S count, last letter was S)
    let mut level: Vec<(Matrix, u32, Option<bool>)> = vec![([1, 0, 0, 1], 0, None)];
    let mut height = t.im;
    let mut best: Vec<(Matrix, u32)> = Vec::new();
    let consider = |m: &Matrix, s: u32, height: &mut f64, best: &mut Vec<(Matrix, u32)>| {
        let p = mobius(m, t);
        if p.re.abs() > 1.0 + TIE_TOL {
            return;
        }
        if p.im > *height * (1.0 + 1e-10) {
            *height = p.im;
            best.clear();
        }
        if (p.im - *height).abs() <= 1e-10 * *height {
            best.push((*m, s));
        }
    };
    consider(&[1, 0, 0, 1], 0, &mut height, &mut best);
    for _ in 0..max_letters {
        let mut next = Vec::new();
        for (m, s, last_s) in &level {
            if *last_s != Some(true) {
                let n = mul(&letter_matrix(Letter::S), m);
                consider(&n, s + 1, &mut height, &mut best);
                next.push((n, s + 1, Some(true)));
            }
            if *last_s != Some(false) {
                for k in (-max_shift..=max_shift).filter(|&k| k != 0) {
                    let n = mul(&letter_matrix(Letter::T2(k)), m);
                    consider(&n, *s, &mut height, &mut best);
                    next.push((n, *s, Some(false)));
                }
            }
        }
        level = next;
    }
    BfsResult { height, best }
}

/// Matrices equal up to sign.
pub fn same_psl(a: &Matrix, b: &Matrix) -> bool {
    a == b || a.iter().zip(b).all(|(x, y)| *x == -*y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampler {
    /// Shifted lattice on `[0, 1]`, folded by the evenness of `𝐍` and `𝐈` in `x`.
    Lattice,
    MonteCarlo { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mean {
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct StatEstimate {
    pub y: f64,
    pub samples: usize,
    /// `∫_{-1}^{1} 𝐍(x+iy) dx`
    pub n_integral: Mean,
    /// `(α, ∫_{-1}^{1} 𝐈(x+iy)^α dx)`
    pub i_integrals: Vec<(f64, Mean)>,
    /// `max 𝐍(x+iy)·y` over the sample.
    pub max_n_times_y: f64,
}

const BATCHES: usize = 16;

/// Estimates of `∫𝐍` and `∫𝐈^α` over `x ∈ [-1, 1]`; error bars from 16 interleaved batches.
pub fn stat_integrals(y: f64, samples: usize, alphas: &[f64], sampler: Sampler) -> Result<StatEstimate> {
    if !(y > 0.0 && y < 0.5) {
        return Err(ZiError::InvalidInput(format!("need 0 < y < 1/2, got {y}")));
    }
    if samples < BATCHES {
        return Err(ZiError::InvalidInput(format!("need at least {BATCHES} samples")));
    }
    let xs: Vec<f64> = match sampler {
        Sampler::Lattice => {
            let shift = 0.5 * (5f64.sqrt() - 1.0);
            (0..samples).map(|j| (j as f64 + shift) / samples as f64).collect()
        }
        Sampler::MonteCarlo { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    let k = alphas.len();
    // per batch: count, Σ𝐍, Σ𝐈^α..., max 𝐍
    let batches: Vec<Result<(usize, f64, Vec<f64>, u32)>> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut cnt = 0;
            let mut sn = 0.0;
            let mut si = vec![0.0; k];
            let mut mx = 0;
            for x in xs.iter().skip(b).step_by(BATCHES) {
                let r = reduce(PointUH::new(*x, y)?)?;
                cnt += 1;
                sn += r.inversions as f64;
                mx = mx.max(r.inversions);
                for (acc, a) in si.iter_mut().zip(alphas) {
                    *acc += r.height.powf(*a);
                }
            }
            Ok((cnt, sn, si, mx))
        })
        .collect();
    let mut per_n = Vec::with_capacity(BATCHES);
    let mut per_i = vec![Vec::with_capacity(BATCHES); k];
    let mut max_n = 0;
    for b in batches {
        let (cnt, sn, si, mx) = b?;
        per_n.push(2.0 * sn / cnt as f64);
        for (v, s) in per_i.iter_mut().zip(si) {
            v.push(2.0 * s / cnt as f64);
        }
        max_n = max_n.max(mx);
    }
    Ok(StatEstimate {
        y,
        samples,
        n_integral: batch_mean(&per_n),
        i_integrals: alphas.iter().cloned().zip(per_i.iter().map(|v| batch_mean(v))).collect(),
        max_n_times_y: max_n as f64 * y,
    })
}

fn batch_mean(v: &[f64]) -> Mean {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Mean { estimate: m, stderr: (var / n).sqrt() }
}

/// Least-squares fit `value ≈ a L² + b L + c` with `L = log y`.
pub fn log2_fit(points: &[(f64, f64)]) -> Result<[f64; 3]> {
    if points.len() < 3 {
        return Err(ZiError::InvalidInput("a quadratic fit needs three points".into()));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &(y, v) in points {
        let l = y.ln();
        let row = [l * l, l, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * v;
        }
    }
    solve3(ata, atb).ok_or_else(|| ZiError::InvalidInput("degenerate fit abscissae".into()))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        x[r] = (b[r] - (r + 1..3).map(|c| a[r][c] * x[c]).sum::<f64>()) / a[r][r];
    }
    Some(x)
}

/// `2/π²`
pub const LEADING: f64 = 2.0 / (PI * PI);

/// `c₂ = (12 + 4 log 2 - 24 log π - 288 ζ'(-1))/(3π²)`.
pub fn c2_constant() -> Result<f64> {
    let dz = cauchy_derivative(zeta, C::new(-1.0, 0.0), 0.25)?.re;
    Ok((12.0 + 4.0 * 2f64.ln() - 24.0 * PI.ln() - 288.0 * dz) / (3.0 * PI * PI))
}

/// Fitted `-b` against `c₂`: `(fitted, c₂, fitted - c₂)`.
pub fn c2_probe(fit: &[f64; 3]) -> Result<(f64, f64, f64)> {
    let c2 = c2_constant()?;
    Ok((-fit[1], c2, -fit[1] - c2))
}
