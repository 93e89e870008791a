//! Command-line front end. Every subcommand writes its results and a
//! manifest into the output directory and nowhere else.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analytic::{a_coordinates, period_lattice, rational_reconstruct, theta_map, AnalyticError};
use crate::arith::ring::{format_rational, parse_rational};
use crate::counting::{compute_delta, count_rational_points, CompactSetSpec, CountConfig, CountingError};
use crate::cyclotomic::sl2::confirm_order;
use crate::cyclotomic::{sl2_torsion_order, CyclotomicNumber, Sl2Order};
use crate::elliptic::{EllipticScheme, SchemeJson};
use crate::precise::Complex;
use crate::search::{certify, enumerate_tuples, run_search, SearchConfig, SearchError, TorsionCertificate};

pub const MANIFEST_SCHEMA: &str = "cyclotorsion/manifest/v1";
const DEFAULT_PRECISION: u32 = 256;

#[derive(Parser, Debug)]
#[command(name = "cyclotorsion", version, about = "Torsion specializations at sums of roots of unity")]
struct Cli {
    /// Output directory; nothing is written outside it.
    #[arg(long, global = true, default_value = "cyclotorsion-out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Working precision in bits.
    #[arg(long = "precision-bits", global = true, env = "CYCLOTORSION_PRECISION_BITS")]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Search for torsion specializations and write certificates.
    Search(SearchArgs),
    /// Re-verify a certificate file.
    Certify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Betti and a-coordinates of the section at a parameter value.
    Betti(BettiArgs),
    /// Period lattice of a fiber.
    Periods(PeriodsArgs),
    /// Count rational points on the logarithm set.
    Count(CountArgs),
    /// The excluded-ball radius δ.
    Delta(DeltaArgs),
    /// Order of [[0, 1], [-1, λ]] in SL_2.
    Sl2 {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// List root-of-unity tuples.
    Tuples(TuplesArgs),
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    resume: Option<String>,
}

#[derive(Args, Debug)]
struct BettiArgs {
    /// Parameter as an expression in roots of unity, e.g. `-4+4(z8+z8^7)`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// Comma-separated roots of unity for the a-coordinates.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Largest denominator tried when recognizing rationals.
    #[arg(long, default_value_t = 1000)]
    qmax: u64,
}

#[derive(Args, Debug)]
struct PeriodsArgs {
    #[arg(long, allow_hyphen_values = true, conflicts_with = "coeffs")]
    lambda: Option<String>,
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// `a,b,c` of `y² = x³ + a x² + b x + c`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long, default_value_t = 32)]
    tmax: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long)]
    scheme: Option<PathBuf>,
    #[arg(long, default_value = "lambda")]
    f: String,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    #[arg(long, default_value_t = 64)]
    cap: u64,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[arg(long)]
    a: f64,
    /// Comma-separated rational bad points; defaults to the scheme's bad set.
    #[arg(long, allow_hyphen_values = true)]
    bad: Option<String>,
    #[arg(long)]
    scheme: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    kdeg: u32,
}

#[derive(Args, Debug)]
struct TuplesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    nmax: u64,
    #[arg(long)]
    skip_vanishing: bool,
    #[arg(long)]
    all_orders: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Precision(_) => Failure::Resource(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<CountingError> for Failure {
    fn from(e: CountingError) -> Self {
        match e {
            CountingError::NeedsPrecision { .. } | CountingError::Cap { .. } => Failure::Resource(e.to_string()),
            CountingError::Search(s) => s.into(),
            CountingError::Degenerate(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<AnalyticError> for Failure {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::NoConvergence { .. } | AnalyticError::Unstable { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects result files and inputs for the manifest.
struct Output {
    dir: PathBuf,
    results: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), results: Vec::new(), inputs: Vec::new() })
    }

    fn write(&mut self, rel: &str, contents: &str) -> Result<(), Failure> {
        if rel.split('/').any(|c| c.is_empty() || c == "..") || rel.starts_with('/') {
            return Err(Failure::Usage(format!("refusing to write {rel}")));
        }
        let path = self.dir.join(rel);
        if let Some(p) = path.parent() {
            fs::create_dir_all(p)?;
        }
        fs::write(&path, contents)?;
        self.results.push((rel.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, rel: &str, v: &T) -> Result<(), Failure> {
        let s = serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))?;
        self.write(rel, &(s + "\n"))
    }

    fn read_input(&mut self, path: &Path) -> Result<String, Failure> {
        let s = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        self.inputs.push((path.display().to_string(), sha256_hex(s.as_bytes())));
        Ok(s)
    }

    fn finish(mut self, command: &str, settings: Value, started: Instant) -> Result<(), Failure> {
        self.results.sort();
        let config_hash = sha256_hex(serde_json::to_string(&json!({ "command": command, "settings": settings, "inputs": self.inputs })).unwrap().as_bytes());
        let manifest = json!({
            "schema": MANIFEST_SCHEMA,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config_hash": config_hash,
            "inputs": self.inputs.iter().map(|(p, h)| json!({ "path": p, "sha256": h })).collect::<Vec<_>>(),
            "settings": settings,
            "wall_time_s": started.elapsed().as_secs_f64(),
            "results": self.results.iter().map(|(p, h)| json!({ "file": p, "sha256": h })).collect::<Vec<_>>(),
        });
        let s = serde_json::to_string_pretty(&manifest).unwrap();
        fs::write(self.dir.join("manifest.json"), s + "\n")?;
        Ok(())
    }
}

fn load_scheme(out: &mut Output, path: &Option<PathBuf>) -> Result<EllipticScheme, Failure> {
    match path {
        None => Ok(EllipticScheme::legendre(2)),
        Some(p) => {
            let s = out.read_input(p)?;
            let j: SchemeJson = serde_json::from_str(&s).map_err(|e| Failure::Usage(format!("scheme: {e}")))?;
            EllipticScheme::from_json(&j).map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn parse_cyc(s: &str) -> Result<CyclotomicNumber, Failure> {
    CyclotomicNumber::parse(s).map_err(|e| Failure::Usage(format!("{s:?}: {e}")))
}

fn embed(c: &CyclotomicNumber, prec: u32) -> Complex {
    c.embed(1, prec).expect("embedding 1 is always valid")
}

fn dec(c: &Complex) -> [String; 2] {
    [c.re.to_decimal(40), c.im.to_decimal(40)]
}

/// Runs the command line and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let run = || run(&cli);
    let res = match cli.jobs {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure::Resource(e.to_string())),
        },
        None => run(),
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Verification(m) | Failure::Resource(m) => m,
            };
            eprintln!("error: {msg}");
            f.code()
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let started = Instant::now();
    let mut out = Output::new(&cli.out)?;
    let prec = cli.precision_bits.unwrap_or(DEFAULT_PRECISION);
    if prec < 64 {
        return Err(Failure::Usage("precision must be at least 64 bits".into()));
    }
    let (name, settings) = match &cli.cmd {
        Cmd::Search(a) => ("search", cmd_search(cli, a, &mut out)?),
        Cmd::Certify { file } => ("certify", cmd_certify(file, &mut out)?),
        Cmd::Betti(a) => ("betti", cmd_betti(a, prec, &mut out)?),
        Cmd::Periods(a) => ("periods", cmd_periods(a, prec, &mut out)?),
        Cmd::Count(a) => ("count", cmd_count(a, prec, &mut out)?),
        Cmd::Delta(a) => ("delta", cmd_delta(a, &mut out)?),
        Cmd::Sl2 { lambda } => ("sl2", cmd_sl2(lambda, &mut out)?),
        Cmd::Tuples(a) => ("tuples", cmd_tuples(a, &mut out)?),
    };
    let verdict = settings.get("verification_failed").and_then(Value::as_str).map(str::to_string);
    out.finish(name, settings, started)?;
    match verdict {
        Some(m) => Err(Failure::Verification(m)),
        None => Ok(()),
    }
}

fn cert_file_name(c: &TorsionCertificate) -> String {
    let e: Vec<String> = c.tuple.exponents.iter().map(|x| x.to_string()).collect();
    let mut stem = format!("N{}_e{}_r{}", c.tuple.order, e.join("-"), c.root_index);
    if stem.len() > 120 {
        stem = format!("N{}_h{}_r{}", c.tuple.order, &sha256_hex(e.join(",").as_bytes())[..16], c.root_index);
    }
    format!("certificates/{stem}.json")
}

fn cmd_search(cli: &Cli, a: &SearchArgs, out: &mut Output) -> Result<Value, Failure> {
    let text = out.read_input(&a.config)?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config: {e}")))?;
    // the scheme may be given inline or as a path relative to the config
    if let Some(Value::String(p)) = v.get("scheme").cloned() {
        let base = a.config.parent().unwrap_or(Path::new("."));
        let s = out.read_input(&base.join(p))?;
        v["scheme"] = serde_json::from_str(&s).map_err(|e| Failure::Usage(format!("scheme: {e}")))?;
    }
    let mut cfg: SearchConfig = serde_json::from_value(v).map_err(|e| Failure::Usage(format!("config: {e}")))?;
    if let Some(p) = cli.precision_bits {
        cfg.precision_bits = p;
    }
    let res = run_search(&cfg, a.resume.as_deref())?;
    let mut index = String::from("# cyclotorsion/index/v1\nN,exponents,lambda_minpoly,curve_order,tuple_order,T,degree,degree_certified,file\n");
    for c in &res.certificates {
        let f = cert_file_name(c);
        out.write_json(&f, c)?;
        let e: Vec<String> = c.tuple.exponents.iter().map(|x| x.to_string()).collect();
        index += &format!(
            "{},{},{},{},{},{},{},{},{}\n",
            c.tuple.order,
            e.join(" "),
            c.lambda_minpoly.join(" "),
            c.curve_order,
            c.tuple_order,
            c.combined_order,
            c.degree.absolute,
            c.degree.certified,
            f
        );
    }
    out.write("index.csv", &index)?;
    out.write_json(
        "search.json",
        &json!({
            "schema": "cyclotorsion/search/v1",
            "config": cfg,
            "certificates": res.certificates.len(),
            "duplicates": res.duplicates,
            "stats": res.stats,
            "resume": res.resume,
            "complete_up_to_t_max": res.complete_up_to_t_max,
        }),
    )?;
    println!("{} certificate(s); complete only for curve orders up to T_max = {}", res.certificates.len(), res.complete_up_to_t_max);
    for c in &res.certificates {
        println!("  {}  λ: {}  m = {}  T = {}", cert_file_name(c), c.lambda_minpoly.join(" "), c.curve_order, c.combined_order);
    }
    if let Some(t) = &res.resume {
        println!("budget reached; resume with --resume {t}");
    }
    Ok(json!({ "precision_bits": cfg.precision_bits, "t_max": cfg.t_max, "budget": cfg.budget, "config_digest": cfg.digest(), "resume": a.resume }))
}

fn cmd_certify(file: &Path, out: &mut Output) -> Result<Value, Failure> {
    let text = out.read_input(file)?;
    let cert: TorsionCertificate = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("certificate: {e}")))?;
    let report = certify(&cert);
    for c in &report.checks {
        println!("{} {:<22} {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    out.write_json("certify.json", &json!({ "schema": "cyclotorsion/certify/v1", "passed": report.passed, "checks": report.checks }))?;
    let mut s = json!({ "precision_bits": cert.betti.precision_bits * 2 });
    if !report.passed {
        let why: Vec<String> = report.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        s["verification_failed"] = Value::String(why.join("; "));
    }
    println!("{}", if report.passed { "certificate verified" } else { "certificate REJECTED" });
    Ok(s)
}

fn cmd_betti(a: &BettiArgs, prec: u32, out: &mut Output) -> Result<Value, Failure> {
    let scheme = load_scheme(out, &a.scheme)?;
    let lam = parse_cyc(&a.lambda)?;
    let eps: Vec<Complex> = match &a.eps {
        Some(s) => s.split(',').map(|e| parse_cyc(e.trim()).map(|c| embed(&c, prec))).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let lp = theta_map::<Complex>(&scheme, &embed(&lam, prec), &eps, None)?;
    let rec = |x: &Complex| rational_reconstruct(&x.re, a.qmax, 1e-20).ok().flatten().map(|r| format_rational(&r));
    let acoords = a_coordinates(&eps)?;
    let v = json!({
        "schema": "cyclotorsion/betti/v1",
        "lambda": a.lambda,
        "precision_bits": prec,
        "b1": lp.betti.b1.re.to_decimal(40),
        "b2": lp.betti.b2.re.to_decimal(40),
        "err_log2": lp.betti.err_log2,
        "b1_rational": rec(&lp.betti.b1),
        "b2_rational": rec(&lp.betti.b2),
        "a": acoords.iter().map(|x| x.re.to_decimal(40)).collect::<Vec<_>>(),
        "a_rational": acoords.iter().map(rec).collect::<Vec<_>>(),
        "z": dec(&lp.z),
    });
    println!("b1 = {}  b2 = {}  (error ≤ 2^{:.1})", v["b1"].as_str().unwrap(), v["b2"].as_str().unwrap(), lp.betti.err_log2);
    if let (Some(x), Some(y)) = (rec(&lp.betti.b1), rec(&lp.betti.b2)) {
        println!("rational: ({x}, {y})");
    }
    out.write_json("betti.json", &v)?;
    Ok(json!({ "precision_bits": prec, "qmax": a.qmax }))
}

fn cmd_periods(a: &PeriodsArgs, prec: u32, out: &mut Output) -> Result<Value, Failure> {
    let [ca, cb, cc] = match (&a.lambda, &a.coeffs) {
        (_, Some(s)) => {
            let v: Vec<Complex> = s.split(',').map(|e| parse_cyc(e.trim()).map(|c| embed(&c, prec))).collect::<Result<_, _>>()?;
            <[Complex; 3]>::try_from(v).map_err(|_| Failure::Usage("--coeffs needs exactly a,b,c".into()))?
        }
        (Some(l), None) => {
            let scheme = load_scheme(out, &a.scheme)?;
            let lam = embed(&parse_cyc(l)?, prec);
            crate::analytic::betti::specialize_numeric(&scheme, &lam)?.0
        }
        (None, None) => return Err(Failure::Usage("give --lambda or --coeffs".into())),
    };
    let lat = period_lattice(&ca, &cb, &cc)?;
    let v = json!({
        "schema": "cyclotorsion/periods/v1",
        "precision_bits": prec,
        "w1": dec(&lat.w1),
        "w2": dec(&lat.w2),
        "tau": dec(&lat.tau),
        "g2": dec(&lat.g2),
        "g3": dec(&lat.g3),
        "err_log2": lat.err_log2,
    });
    for k in ["w1", "w2", "tau"] {
        println!("{k:<3} = {} + {} i", v[k][0].as_str().unwrap(), v[k][1].as_str().unwrap());
    }
    out.write_json("periods.json", &v)?;
    Ok(json!({ "precision_bits": prec }))
}

fn cmd_count(a: &CountArgs, prec: u32, out: &mut Output) -> Result<Value, Failure> {
    let scheme = load_scheme(out, &a.scheme)?;
    let spec = CompactSetSpec::for_scheme(&scheme, &a.f, a.a, 1)?;
    let cfg = CountConfig { n: a.n, t_max: a.tmax, precision_bits: prec, cap: a.cap, ..CountConfig::default() };
    let r = count_rational_points(&scheme, &spec, &cfg)?;
    out.write("count.csv", &r.to_csv())?;
    out.write_json("count.json", &json!({ "spec": spec, "report": r }))?;
    print!("{}", r.to_csv());
    match r.slope_nosubsum {
        Some(s) => println!("log-log slope (no vanishing subsum): {s:.4}{}", if r.slope_warning { "  WARNING: exceeds 0.7" } else { "" }),
        None => println!("log-log slope: not enough nonzero counts"),
    }
    let mut s = json!({ "precision_bits": prec, "t_max": a.tmax, "n": a.n, "cap": a.cap, "f": a.f, "a": a.a });
    if !r.recertified {
        s["verification_failed"] = Value::String("a counted point failed re-certification".into());
    }
    Ok(s)
}

fn rational_height(r: &num_rational::BigRational) -> f64 {
    let m: BigInt = std::cmp::max(r.numer().abs(), r.denom().abs());
    m.to_string().parse::<f64>().unwrap_or(f64::INFINITY).ln()
}

fn describe_bad(poly: &[String]) -> String {
    match poly {
        [c0, c1] => {
            let r = parse_rational(&format!("-{c0}/{c1}").replace("--", "")).map(|r| format_rational(&r));
            r.unwrap_or_else(|| format!("root of {}", poly.join(" ")))
        }
        _ => format!("root of [{}]", poly.join(", ")),
    }
}

fn cmd_delta(a: &DeltaArgs, out: &mut Output) -> Result<Value, Failure> {
    let (points, heights): (Vec<String>, Vec<f64>) = match &a.bad {
        Some(s) if !s.trim().is_empty() => s
            .split(',')
            .map(|x| {
                let r = parse_rational(x.trim()).ok_or_else(|| Failure::Usage(format!("bad point {x:?} is not a rational")))?;
                Ok((format_rational(&r), rational_height(&r)))
            })
            .collect::<Result<Vec<_>, Failure>>()?
            .into_iter()
            .unzip(),
        Some(_) => (Vec::new(), Vec::new()),
        None => {
            let scheme = load_scheme(out, &a.scheme)?;
            let spec = CompactSetSpec::for_scheme(&scheme, "lambda", a.a.max(f64::MIN_POSITIVE), a.kdeg.max(1))?;
            spec.bad.iter().map(|b| (describe_bad(&b.poly), b.height)).unzip()
        }
    };
    let d = compute_delta(a.a, &heights, a.kdeg)?;
    println!("B = {{{}}}, heights {:?}", points.join(", "), heights);
    println!("l = #B + 1 = {}, K degree = {}, a = {}", d.l, d.k_degree, d.a);
    println!("δ = exp(−2·{}·{}·({} + {} + ln 2)) = exp(−{:.6}) ≈ {:.6e}", d.l, d.k_degree, d.a, heights.iter().copied().fold(0.0, f64::max), d.exponent, d.delta);
    out.write_json("delta.json", &json!({ "schema": "cyclotorsion/delta/v1", "bad": points, "report": d }))?;
    Ok(json!({ "a": a.a, "kdeg": a.kdeg }))
}

fn cmd_sl2(lambda: &str, out: &mut Output) -> Result<Value, Failure> {
    let lam = parse_cyc(lambda)?;
    let o = sl2_torsion_order(&lam);
    let confirmed = match o {
        Sl2Order::Finite(m) => confirm_order(&lam, m),
        Sl2Order::Infinite => true,
    };
    println!("order {o}");
    out.write_json("sl2.json", &json!({ "schema": "cyclotorsion/sl2/v1", "lambda": lambda, "order": o, "confirmed_by_powering": confirmed }))?;
    let mut s = json!({});
    if !confirmed {
        s["verification_failed"] = Value::String("matrix powering disagrees".into());
    }
    Ok(s)
}

fn cmd_tuples(a: &TuplesArgs, out: &mut Output) -> Result<Value, Failure> {
    if a.n == 0 || a.nmax == 0 {
        return Err(Failure::Usage("need n ≥ 1 and N_max ≥ 1".into()));
    }
    let mut csv = String::from("# cyclotorsion/tuples/v1\nN,exponents,tuple_order,vanishing_subsum\n");
    let mut count = 0;
    for t in enumerate_tuples(a.n, a.nmax, a.skip_vanishing, a.all_orders) {
        let e: Vec<String> = t.exponents.iter().map(|x| x.to_string()).collect();
        csv += &format!("{},{},{},{}\n", t.order, e.join(" "), t.tuple_order(), t.has_vanishing_subsum().unwrap_or(true));
        count += 1;
    }
    out.write("tuples.csv", &csv)?;
    print!("{csv}");
    println!("{count} tuple(s)");
    Ok(json!({ "n": a.n, "N_max": a.nmax, "skip_vanishing": a.skip_vanishing, "all_orders": a.all_orders }))
}
