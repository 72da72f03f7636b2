use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C;
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;
use zeta_interp::acceptance;
use zeta_interp::alpha_coeffs::{alpha_with_error, default_tol};
use zeta_interp::analytic_nt::{find_zeros, first_zeros, primitive_characters, ZeroTable};
use zeta_interp::dirichlet_kernels::{a_eval, d_eval, h_chi_eval, h_eval};
use zeta_interp::domain_stats::{stat_integrals, Sampler};
use zeta_interp::interp_engine::{choose_tk, riemann_weil, theorem1_rhs, w_on_basis, w_u_candidates, Basis, TestFunction};
use zeta_interp::kernel_forms::g_form;
use zeta_interp::modforms::{cusp1_series, j_series, jminus_series, lambda_series, theta_series, CuspForm, Sign};
use zeta_interp::rv_basis::{b, d, partial_sum_b, theorem_a_reconstruct};
use zeta_interp::{Result, ZiError};

#[derive(Parser)]
#[command(name = "zi", version, about = "Fourier interpolation bases from modular integrals for the theta group")]
struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report time_ms as 0 so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact q-expansions of θ, λ, J and J₋ at the cusps ∞ and 1, in the series dump format.
    Qexp(QexpArgs),
    /// The kernel coefficient form g_n of weight k, a polynomial in J times θ^{2k} J₋^δ, with principal part t^{-n} at ∞.
    Gform(GformArgs),
    /// Fourier coefficient α±_{n,k}(s) of the modular integral F±_k(τ,s), with its achieved error.
    Alpha(AlphaArgs),
    /// The √n interpolation basis b±_n, d±_n: values, the interpolation sum of an even function, partial sums (CSV).
    Rv(RvArgs),
    /// Ordinates of the nontrivial zeros of ζ from sign changes of Hardy's Z function.
    Zeros(ZerosArgs),
    /// Dirichlet series kernels A±_k(w,s), D±(w,s), H±(w,s) and the character kernels H_δ(w,s;χ).
    Kernel(KernelArgs),
    /// Interpolation of f(z) from f̂ at log n/4π and f at the rotated zeta zeros, truncated at a gap height T.
    Interp(InterpArgs),
    /// The Riemann–Weil explicit formula for a test function: archimedean term, primes, poles and zeros.
    RwCheck(RwArgs),
    /// The functional W applied to the basis functions U_n and V_{ρ,0}.
    WBasis(WArgs),
    /// Integrals over x of the inversion count 𝐍(x+iy) and of powers of the reduced height 𝐈(x+iy) (CSV).
    Stats(StatsArgs),
    /// Runs the thirteen acceptance checks; exit 0 only when every row passes.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Serialize)]
struct QexpArgs {
    /// theta | lambda | J | Jminus
    #[arg(long)]
    form: String,
    /// inf | one
    #[arg(long, default_value = "inf")]
    cusp: String,
    #[arg(long)]
    order: i64,
}

#[derive(Args, Serialize)]
struct GformArgs {
    #[arg(long)]
    n: i64,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    sign: String,
    /// Also emit the q-expansion below t^ORDER.
    #[arg(long)]
    qexp: Option<i64>,
}

#[derive(Args, Serialize)]
struct AlphaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    sign: String,
    /// Complex exponent, e.g. 0.3 or 0.5+2i.
    #[arg(long)]
    s: String,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Serialize)]
struct RvArgs {
    /// value | reconstruct | partial
    #[arg(long)]
    op: String,
    /// Basis index for value, truncation N for reconstruct and partial.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "plus")]
    sign: String,
    /// even (b) | odd (d)
    #[arg(long, default_value = "even")]
    parity: String,
    /// Comma-separated evaluation points.
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Even test function for reconstruct, e.g. gaussian:0.7.
    #[arg(long)]
    f: Option<String>,
}

#[derive(Args, Serialize)]
struct ZerosArgs {
    #[arg(long, conflicts_with = "upto")]
    count: Option<usize>,
    #[arg(long)]
    upto: Option<f64>,
}

#[derive(Args, Serialize)]
struct KernelArgs {
    /// A | D | H | Hchi
    #[arg(long)]
    which: String,
    #[arg(long, allow_hyphen_values = true)]
    w: String,
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Weight for A.
    #[arg(long, default_value_t = 0.5)]
    k: f64,
    /// Sign, or δ for Hchi.
    #[arg(long, default_value = "minus")]
    sign: String,
    /// Primitive character as q,index.
    #[arg(long)]
    chi: Option<String>,
}

#[derive(Args, Serialize)]
struct InterpArgs {
    /// gaussian:SIGMA | modgauss:SIGMA,BETA
    #[arg(long)]
    f: String,
    /// X or X,Y for z = X + iY.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long = "N", default_value_t = 400)]
    n: usize,
    /// Zeros file; computed when absent.
    #[arg(long)]
    zeros: Option<PathBuf>,
    /// Truncate at the widest zero gap in [2^K, 2^{K+1}].
    #[arg(long = "Tk", default_value_t = 5)]
    tk: u32,
}

#[derive(Args, Serialize)]
struct RwArgs {
    #[arg(long)]
    f: String,
    #[arg(long)]
    zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    nmax: usize,
    /// Number of zeros used (default: 100 or the whole file).
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args, Serialize)]
struct WArgs {
    /// U:n or V:j (j-th zero, from 1).
    #[arg(long)]
    which: String,
}

#[derive(Args, Serialize)]
struct StatsArgs {
    /// Comma-separated heights in (0, 1/2).
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Integrate 𝐈^A instead of 𝐍.
    #[arg(long)]
    alpha: Option<f64>,
    /// Monte Carlo seed; a shifted lattice is used when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    /// Fewer random samples.
    #[arg(long)]
    fast: bool,
    /// Comma-separated row numbers.
    #[arg(long)]
    only: Option<String>,
}

enum Output {
    Json { results: Vec<Value>, envelopes: Vec<f64> },
    Text(String),
}

fn invalid(msg: impl Into<String>) -> ZiError {
    ZiError::InvalidInput(msg.into())
}

fn parse_complex(s: &str) -> Result<C> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || invalid(format!("complex number {s}"));
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C::new(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(C::new(body[..i].parse::<f64>().map_err(|_| bad())?, num(&body[i..])?)),
        None => Ok(C::new(0.0, num(body)?)),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|x| x.trim().parse::<T>().map_err(|_| invalid(format!("list entry {x}")))).collect()
}

fn cz(z: C) -> Value {
    json!([z.re, z.im])
}

fn cache_file() -> Option<PathBuf> {
    std::env::var_os("ZI_CACHE_DIR").map(|d| PathBuf::from(d).join("zeros.txt"))
}

/// Zeros up to height `t`, through the cache directory when one is configured.
fn zeros_upto(t: f64) -> Result<ZeroTable> {
    let cache = cache_file();
    if let Some(p) = cache.as_ref().filter(|p| p.exists()) {
        if let Ok(z) = ZeroTable::read(p) {
            if z.ordinates.last().is_some_and(|&l| l > t) {
                return Ok(z);
            }
        }
    }
    let z = find_zeros(t)?;
    if let Some(p) = cache {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
        }
        z.write(&p)?;
    }
    Ok(z)
}

fn zeros_count(n: usize) -> Result<ZeroTable> {
    if let Some(p) = cache_file().filter(|p| p.exists()) {
        if let Ok(mut z) = ZeroTable::read(&p) {
            if z.len() >= n {
                z.ordinates.truncate(n);
                z.multiplicities.truncate(n);
                return Ok(z);
            }
        }
    }
    let z = first_zeros(n)?;
    if let Some(p) = cache_file() {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
        }
        z.write(&p)?;
    }
    Ok(z)
}

fn qexp(a: &QexpArgs) -> Result<Output> {
    let s = match (a.cusp.as_str(), a.form.as_str()) {
        ("inf", "theta") => theta_series(a.order),
        ("inf", "lambda") => lambda_series(a.order),
        ("inf", "J") => j_series(a.order),
        ("inf", "Jminus") => jminus_series(a.order),
        ("one", "theta") => cusp1_series(CuspForm::Theta, a.order),
        ("one", "J") => cusp1_series(CuspForm::J, a.order),
        ("one", "Jminus") => cusp1_series(CuspForm::Jminus, a.order),
        (c, f) => return Err(invalid(format!("no expansion of {f} at cusp {c}"))),
    };
    Ok(Output::Text(s.dump()))
}

fn gform(a: &GformArgs) -> Result<Output> {
    let g = g_form(a.n, a.k, Sign::parse(&a.sign)?)?;
    let poly: Vec<Value> = g.rep.j_poly.iter().map(|(m, c)| json!([m, c.to_string()])).collect();
    let mut r = json!({
        "n": g.n,
        "weight": g.rep.weight.to_string(),
        "jminus_power": g.rep.jminus_power,
        "j_poly": poly,
    });
    if let Some(o) = a.qexp {
        r["qexp"] = Value::String(g.rep.q_expansion(o)?.dump());
    }
    Ok(Output::Json { results: vec![r], envelopes: vec![0.0] })
}

fn alpha(a: &AlphaArgs) -> Result<Output> {
    let s = parse_complex(&a.s)?;
    let e = alpha_with_error(a.n, a.k, Sign::parse(&a.sign)?, s, a.tol.unwrap_or_else(|| default_tol(a.n)))?;
    Ok(Output::Json { results: vec![json!({"n": a.n, "re": e.value.re, "im": e.value.im})], envelopes: vec![e.err] })
}

fn rv(a: &RvArgs) -> Result<Output> {
    let sign = Sign::parse(&a.sign)?;
    let xs: Vec<f64> = parse_list(&a.x)?;
    let mut csv = String::from("n,x,value,err\n");
    for x in xs {
        let (value, err) = match a.op.as_str() {
            "value" => {
                let e = match a.parity.as_str() {
                    "even" => b(a.n, sign, x)?,
                    "odd" => d(a.n, sign, x)?,
                    p => return Err(invalid(format!("parity {p}"))),
                };
                (e.value.re, e.err)
            }
            "reconstruct" => {
                let f = TestFunction::parse(a.f.as_deref().ok_or_else(|| invalid("reconstruct needs --f"))?)?;
                let r = theorem_a_reconstruct(&f, x, a.n)?;
                (r.approx, r.err + r.residual.abs())
            }
            "partial" => {
                let p = partial_sum_b(a.n, sign, x)?;
                (p.sum, p.residual.abs())
            }
            op => return Err(invalid(format!("rv op {op}"))),
        };
        csv.push_str(&format!("{},{},{},{}\n", a.n, fmt15(x), fmt15(value), fmt15(err)));
    }
    Ok(Output::Text(csv))
}

fn zeros(a: &ZerosArgs, out: Option<&Path>) -> Result<Output> {
    let z = match (a.count, a.upto) {
        (Some(n), None) => zeros_count(n)?,
        (None, Some(t)) => {
            let mut z = zeros_upto(t)?;
            let keep = z.ordinates.iter().filter(|&&g| g <= t).count();
            z.ordinates.truncate(keep);
            z.multiplicities.truncate(keep);
            z
        }
        _ => return Err(invalid("give exactly one of --count and --upto")),
    };
    if let Some(p) = out {
        z.write(p)?;
        return Ok(Output::Text(String::new()));
    }
    let envelopes = vec![z.precision; z.len()];
    Ok(Output::Json { results: z.ordinates.iter().map(|&g| json!(g)).collect(), envelopes })
}

fn kernel(a: &KernelArgs) -> Result<Output> {
    let w = parse_complex(&a.w)?;
    let s = parse_complex(&a.s)?;
    let sign = Sign::parse(&a.sign)?;
    let (est, poles) = match a.which.as_str() {
        "A" => (a_eval(w, s, a.k, sign)?, vec![C::new(0.0, 0.0), C::new(a.k, 0.0), s, C::new(a.k, 0.0) - s]),
        "D" => (d_eval(w, s, sign)?, vec![s, 1.0 - s, C::new(1.0, 0.0)]),
        "H" => (h_eval(w, s, sign)?, vec![s, 1.0 - s]),
        "Hchi" => {
            let chi_arg = a.chi.as_deref().ok_or_else(|| invalid("Hchi needs --chi q,index"))?;
            let qi: Vec<u64> = parse_list(chi_arg)?;
            let [q, i] = qi[..] else { return Err(invalid("--chi expects q,index")) };
            let chars = primitive_characters(q)?;
            let chi = chars.get(i as usize).ok_or_else(|| invalid(format!("modulus {q} has {} primitive characters", chars.len())))?;
            (h_chi_eval(w, s, sign, chi)?, vec![s, 1.0 - s])
        }
        x => return Err(invalid(format!("kernel {x}"))),
    };
    let near: Vec<Value> = poles.into_iter().filter(|p| (p - w).norm() < 0.5).map(cz).collect();
    Ok(Output::Json { results: vec![json!({"value": cz(est.value), "err": est.err, "poles_nearby": near})], envelopes: vec![est.err] })
}

fn load_table(file: &Option<PathBuf>, upto: f64) -> Result<ZeroTable> {
    match file {
        Some(p) => ZeroTable::read(p),
        None => zeros_upto(upto),
    }
}

fn interp(a: &InterpArgs) -> Result<Output> {
    let f = TestFunction::parse(&a.f)?;
    let xy: Vec<f64> = parse_list(&a.z)?;
    let z = match xy[..] {
        [x] => C::new(x, 0.0),
        [x, y] => C::new(x, y),
        _ => return Err(invalid("--z expects X or X,Y")),
    };
    let hi = 2f64.powi(a.tk as i32 + 1);
    let table = load_table(&a.zeros, hi + 10.0)?;
    let t = choose_tk(&table, a.tk)?;
    let count = table.ordinates.iter().filter(|&&g| g < t).count();
    let r = theorem1_rhs(&f, z, a.n, count, &table)?;
    let target = f.f(z);
    Ok(Output::Json {
        results: vec![json!({
            "value": cz(r.value),
            "target": cz(target),
            "residual": (r.value - target).norm(),
            "T": r.t,
            "zeros_used": count,
        })],
        envelopes: vec![r.err + r.u_tail],
    })
}

fn rw_check(a: &RwArgs) -> Result<Output> {
    let f = TestFunction::parse(&a.f)?;
    let table = match &a.zeros {
        Some(p) => ZeroTable::read(p)?,
        None => zeros_count(a.count.unwrap_or(100))?,
    };
    let count = a.count.unwrap_or(table.len());
    let r = riemann_weil(&f, &table, count, a.nmax)?;
    Ok(Output::Json {
        results: vec![json!({
            "value": cz(r.lhs),
            "target": cz(r.rhs),
            "residual": r.residual,
            "inconclusive": r.inconclusive,
            "zeros_used": count,
        })],
        envelopes: vec![r.envelope],
    })
}

fn w_basis(a: &WArgs) -> Result<Output> {
    let (kind, idx) = a.which.split_once(':').ok_or_else(|| invalid("--which expects U:n or V:j"))?;
    let idx: usize = idx.parse().map_err(|_| invalid(format!("index {idx}")))?;
    let (basis, target, literal) = match kind {
        "U" if idx >= 1 => match w_u_candidates(idx) {
            Some((lit, alt)) => (Basis::U(idx), alt, Some(lit)),
            None => (Basis::U(idx), 0.0, None),
        },
        "V" if idx >= 1 => (Basis::V(*zeros_count(idx)?.ordinates.last().expect("zeros")), 2.0, None),
        _ => return Err(invalid(format!("basis {}", a.which))),
    };
    let e = w_on_basis(&[basis])?[0];
    let mut r = json!({"value": cz(e.value), "target": target, "residual": (e.value - target).norm()});
    if let Some(l) = literal {
        r["printed_target"] = json!(l);
    }
    Ok(Output::Json { results: vec![r], envelopes: vec![e.err] })
}

fn stats(a: &StatsArgs) -> Result<Output> {
    let ys: Vec<f64> = parse_list(&a.y)?;
    let sampler = a.seed.map_or(Sampler::Lattice, |seed| Sampler::MonteCarlo { seed });
    let alphas: Vec<f64> = a.alpha.into_iter().collect();
    let mut csv = String::from("y,estimate,stderr\n");
    for y in ys {
        let e = stat_integrals(y, a.samples, &alphas, sampler)?;
        let m = if alphas.is_empty() { e.n_integral } else { e.i_integrals[0].1 };
        csv.push_str(&format!("{},{},{}\n", fmt15(y), fmt15(m.estimate), fmt15(m.stderr)));
    }
    Ok(Output::Text(csv))
}

fn verify_all(a: &VerifyArgs) -> Result<(Output, bool)> {
    let ids: Vec<usize> = match &a.only {
        Some(s) => parse_list(s)?,
        None => (1..=13).collect(),
    };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=13).contains(&i)) {
        return Err(invalid(format!("no row {bad}")));
    }
    let mut rows = Vec::new();
    let mut all = true;
    for id in ids {
        let r = acceptance::run(id, a.fast);
        eprintln!("{}", r.line());
        all &= r.pass;
        rows.push(json!({"id": r.id, "title": r.title, "pass": r.pass, "detail": r.detail}));
    }
    Ok((Output::Json { results: rows, envelopes: vec![] }, all))
}

/// Shortest decimal that rounds `x` to 15 significant digits.
fn round15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

fn fmt15(x: f64) -> String {
    serde_json::to_string(&round15(x)).unwrap_or_else(|_| "null".into())
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = json!(round15(n.as_f64().unwrap_or(f64::NAN)));
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn exit_code(e: &ZiError) -> u8 {
    match e {
        ZiError::Integrity(_) | ZiError::PrecisionLoss { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let out = cli.out.as_deref();
    let mut verdict = true;
    let (name, params, result) = match &cli.cmd {
        Cmd::Qexp(a) => ("qexp", json!(a), qexp(a)),
        Cmd::Gform(a) => ("gform", json!(a), gform(a)),
        Cmd::Alpha(a) => ("alpha", json!(a), alpha(a)),
        Cmd::Rv(a) => ("rv", json!(a), rv(a)),
        Cmd::Zeros(a) => ("zeros", json!(a), zeros(a, out)),
        Cmd::Kernel(a) => ("kernel", json!(a), kernel(a)),
        Cmd::Interp(a) => ("interp", json!(a), interp(a)),
        Cmd::RwCheck(a) => ("rw-check", json!(a), rw_check(a)),
        Cmd::WBasis(a) => ("w-basis", json!(a), w_basis(a)),
        Cmd::Stats(a) => ("stats", json!(a), stats(a)),
        Cmd::VerifyAll(a) => (
            "verify-all",
            json!(a),
            verify_all(a).map(|(o, ok)| {
                verdict = ok;
                o
            }),
        ),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match output {
        Output::Text(t) => t,
        Output::Json { results, envelopes } => {
            let time_ms = if cli.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
            let mut report = json!({
                "cmd": name,
                "version": env!("CARGO_PKG_VERSION"),
                "params": params,
                "results": results,
                "envelopes": envelopes,
                "time_ms": time_ms,
            });
            round_json(&mut report);
            let mut s = serde_json::to_string_pretty(&report).expect("serializable report");
            s.push('\n');
            s
        }
    };
    let written = match (out, &cli.cmd) {
        (Some(_), Cmd::Zeros(_)) => Ok(()),
        (Some(p), _) => std::fs::write(p, &text),
        (None, _) => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
