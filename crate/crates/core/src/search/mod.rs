//! Enumerate `ζ = Σ ε_i`, solve `f(P) = ζ`, decide torsion of `s(P)` and
//! emit certificates.

pub mod certificate;
pub mod enumerate;
pub mod fiber;

pub use certificate::{certify, BettiRecord, CertifyReport, Check, DegreeInfo, DivisionIdentity, TorsionCertificate, CERT_SCHEMA};
pub use enumerate::{enumerate_tuples, MultisetIter, ResumeToken, TokenError};
pub use fiber::{solve_fiber, FiberError, FiberSolution};

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::analytic::{rational_reconstruct, theta_map, AnalyticError};
use crate::arith::ratfunc::RationalFunction;
use crate::arith::ring::format_rational;
use crate::cyclotomic::RootOfUnityTuple;
use crate::elliptic::prescreen::good_reductions;
use crate::elliptic::{DivisionValues, EllipticScheme, SchemeError, SchemeJson, Specialization, SpecializeError};
use crate::extension::{make_tower, BasePoly, FieldTower, TowerError};
use crate::precise::Complex;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dedupe {
    /// Tuples giving the same `λ` are reported once.
    #[default]
    Lambda,
    None,
}

fn default_scheme() -> SchemeJson {
    EllipticScheme::legendre(2).to_json()
}
fn default_f() -> String {
    "lambda".into()
}
fn default_t_max() -> u64 {
    64
}
fn default_precision() -> u32 {
    256
}
fn default_primes() -> usize {
    6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    #[serde(default = "default_scheme")]
    pub scheme: SchemeJson,
    #[serde(default = "default_f")]
    pub f: String,
    pub n: usize,
    #[serde(rename = "N_max")]
    pub n_max: u64,
    #[serde(default = "default_t_max")]
    pub t_max: u64,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_primes")]
    pub prescreen_primes: usize,
    #[serde(default)]
    pub dedupe: Dedupe,
    #[serde(default)]
    pub skip_vanishing_subsums: bool,
    /// Union over all exact orders up to `N_max` instead of `μ_{N_max}`.
    #[serde(default)]
    pub all_orders: bool,
    /// Explicit tuples to examine instead of the enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<RootOfUnityTuple>>,
    /// Maximum number of tuples per run; the rest is left to a resume token.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

impl SearchConfig {
    pub fn new(n: usize, n_max: u64, t_max: u64) -> Self {
        SearchConfig {
            scheme: default_scheme(),
            f: default_f(),
            n,
            n_max,
            t_max,
            precision_bits: default_precision(),
            prescreen_primes: default_primes(),
            dedupe: Dedupe::default(),
            skip_vanishing_subsums: false,
            all_orders: false,
            tuples: None,
            budget: None,
        }
    }

    /// Examine exactly the given tuples.
    pub fn certify_only(tuples: Vec<RootOfUnityTuple>, t_max: u64) -> Self {
        let n = tuples.first().map_or(1, |t| t.n);
        let n_max = tuples.iter().map(|t| t.order).max().unwrap_or(1);
        SearchConfig { tuples: Some(tuples), ..SearchConfig::new(n, n_max, t_max) }
    }

    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.budget = None;
        hex::encode(Sha256::digest(serde_json::to_vec(&c).unwrap()))
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.n < 1 || self.n_max < 1 || self.t_max < 2 {
            return Err(SearchError::Config("need n ≥ 1, N_max ≥ 1, T_max ≥ 2".into()));
        }
        if self.precision_bits < 64 {
            return Err(SearchError::Config("precision must be at least 64 bits".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Token(#[from] TokenError),
    #[error("precision exhausted: {0}")]
    Precision(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub tuples: u64,
    pub components: u64,
    pub splits: u64,
    pub bad_fibers: u64,
    pub prescreen_rejections: u64,
    pub exact_tests: u64,
}

impl SearchStats {
    fn merge(&mut self, o: &SearchStats) {
        self.tuples += o.tuples;
        self.components += o.components;
        self.splits += o.splits;
        self.bad_fibers += o.bad_fibers;
        self.prescreen_rejections += o.prescreen_rejections;
        self.exact_tests += o.exact_tests;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Duplicate {
    pub kept: RootOfUnityTuple,
    pub dropped: RootOfUnityTuple,
    pub root_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub certificates: Vec<TorsionCertificate>,
    pub duplicates: Vec<Duplicate>,
    pub stats: SearchStats,
    /// Present when the budget stopped the run early.
    pub resume: Option<String>,
    /// The search is complete only for curve orders up to this bound.
    pub complete_up_to_t_max: u64,
}

struct Prepared {
    scheme: EllipticScheme,
    f: RationalFunction,
    cfg: SearchConfig,
}

/// Exact order of the section on one tower component, or the factor that
/// splits the component.
enum ComponentResult {
    Bad,
    Order(Option<u64>),
    Split(BasePoly),
}

fn component_order(p: &Prepared, tower: &FieldTower, irreducible: bool, stats: &mut SearchStats) -> ComponentResult {
    let lam = tower.generator();
    let sp: Specialization = match p.scheme.specialize(tower, &lam) {
        Ok(sp) => sp,
        Err(SpecializeError::ZeroDivisor(g)) => return ComponentResult::Split(g),
        Err(_) => return ComponentResult::Bad,
    };
    let t_max = p.cfg.t_max;
    // modulo a prime the killing set is the multiples of ord(P mod q); on
    // a field the exact order must be a multiple of each of them
    let mut step = 1u64;
    if irreducible {
        let floor = 4 * t_max + 100;
        for (_, mut r) in good_reductions(&p.scheme, tower, &lam, p.cfg.prescreen_primes, floor) {
            match r.order(t_max) {
                Some(o) => step = step.lcm(&o),
                None => {
                    stats.prescreen_rejections += 1;
                    return ComponentResult::Order(None);
                }
            }
            if step > t_max {
                stats.prescreen_rejections += 1;
                return ComponentResult::Order(None);
            }
        }
    }
    let mut dv = DivisionValues::new(&sp.curve, &sp.x0, &sp.y0_sq);
    let mut m = step;
    while m <= t_max {
        stats.exact_tests += 1;
        match dv.kills(m) {
            Ok(true) => return ComponentResult::Order(Some(m)),
            Ok(false) => {}
            Err(g) => return ComponentResult::Split(g),
        }
        m += step;
    }
    ComponentResult::Order(None)
}

/// Betti coordinates of the section at root `root_index` of the tower,
/// reconstructed as rationals with denominator dividing `m`.
pub fn betti_record(scheme: &EllipticScheme, tower: &FieldTower, root_index: usize, m: u64, prec: u32) -> Result<BettiRecord, SearchError> {
    let mut last = String::new();
    let mut p = prec;
    for _ in 0..3 {
        match betti_at(scheme, tower, root_index, m, p) {
            Ok(b) => return Ok(b),
            Err(e) => last = e,
        }
        p *= 2;
    }
    Err(SearchError::Precision(last))
}

fn betti_at(scheme: &EllipticScheme, tower: &FieldTower, root_index: usize, m: u64, prec: u32) -> Result<BettiRecord, String> {
    let roots = tower.complex_roots(1, prec).map_err(|e| e.to_string())?;
    let lam = &roots.get(root_index).ok_or("root index out of range")?.value;
    let lp = theta_map::<Complex>(scheme, lam, &[], None).map_err(|e: AnalyticError| e.to_string())?;
    if lp.betti.err_log2 > -70.0 {
        return Err(format!("Betti error 2^{:.1} too large", lp.betti.err_log2));
    }
    let rec = |b: &Complex| -> Result<String, String> {
        let r = rational_reconstruct(&b.re, m, 1e-20).map_err(|e| e.to_string())?.ok_or("Betti coordinate not rational within 1e-20")?;
        let r = if *r.numer() == r.denom().clone() { num_rational::BigRational::from_integer(0.into()) } else { r };
        if m % r.denom().iter_u64_digits().next().unwrap_or(1) != 0 {
            return Err(format!("denominator of {r} does not divide {m}"));
        }
        Ok(format_rational(&r))
    };
    Ok(BettiRecord {
        precision_bits: prec,
        b1: lp.betti.b1.re.to_decimal(40),
        b2: lp.betti.b2.re.to_decimal(40),
        err_log2: (lp.betti.err_log2 * 100.0).round() / 100.0,
        b1_rational: rec(&lp.betti.b1)?,
        b2_rational: rec(&lp.betti.b2)?,
    })
}

fn certificates_for(p: &Prepared, t: &RootOfUnityTuple, tower: &FieldTower, irr: Option<u64>, m: u64) -> Result<Vec<TorsionCertificate>, SearchError> {
    let prec = p.cfg.precision_bits;
    let roots = tower.complex_roots(1, prec).or_else(|_| tower.complex_roots(1, prec * 4)).map_err(|e| SearchError::Precision(e.to_string()))?;
    let zeta = t.sum_of_roots();
    let minpoly: Vec<String> = tower.minimal_polynomial(&tower.generator()).coeffs().iter().map(format_rational).collect();
    let base = tower.base().degree();
    let rel = tower.relative_degree();
    let tuple_order = t.tuple_order();
    let mut out = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        let betti = betti_record(&p.scheme, tower, i, m, prec)?;
        out.push(TorsionCertificate {
            schema: CERT_SCHEMA.into(),
            scheme: p.cfg.scheme.clone(),
            f: p.cfg.f.clone(),
            tuple: t.clone(),
            zeta: zeta.to_json(),
            tower: tower.to_json(),
            irreducibility_prime: irr,
            root_index: i,
            lambda_approx: [r.value.re.to_decimal(30), r.value.im.to_decimal(30)],
            lambda_minpoly: minpoly.clone(),
            curve_order: m,
            division_identity: DivisionIdentity {
                m,
                vanishing: if m % 2 == 0 && p.scheme_y0_zero(tower) { "y0^2 = 0".into() } else { "f_m(x0) = 0".into() },
                proper_divisors_nonvanishing: crate::cyclotomic::field::divisors(m).into_iter().filter(|&d| d < m).collect(),
            },
            tuple_order,
            combined_order: m.lcm(&tuple_order),
            degree: DegreeInfo { base, relative: rel, absolute: base * rel, certified: irr.is_some() },
            vanishing_subsum: t.has_vanishing_subsum().unwrap_or(true),
            betti,
        });
    }
    Ok(out)
}

impl Prepared {
    fn scheme_y0_zero(&self, tower: &FieldTower) -> bool {
        self.scheme.specialize(tower, &tower.generator()).map(|sp| crate::arith::ring::Ring::is_zero(&sp.y0_sq)).unwrap_or(false)
    }
}

fn process_tuple(p: &Prepared, t: &RootOfUnityTuple) -> Result<(Vec<TorsionCertificate>, SearchStats), SearchError> {
    let mut stats = SearchStats { tuples: 1, ..Default::default() };
    let t = t.normalized();
    let zeta = t.sum_of_roots();
    let fiber = solve_fiber(&p.f, &zeta)?;
    let Some(tower) = fiber.tower else { return Ok((Vec::new(), stats)) };
    let mut stack = vec![tower];
    let mut certs = Vec::new();
    while let Some(tower) = stack.pop() {
        stats.components += 1;
        let irr = tower.irreducible_by_reduction(12);
        match component_order(p, &tower, irr.is_some(), &mut stats) {
            ComponentResult::Bad => stats.bad_fibers += 1,
            ComponentResult::Order(None) => {}
            ComponentResult::Order(Some(m)) => certs.extend(certificates_for(p, &t, &tower, irr, m)?),
            ComponentResult::Split(h) => {
                stats.splits += 1;
                let g = tower.defining_poly();
                let (q, _) = g.divrem(&h).expect("field coefficients");
                for part in [h, q] {
                    let part = part.monic().expect("field coefficients");
                    stack.push(make_tower(tower.base(), &part).map_err(|e: TowerError| SearchError::Fiber(e.into()))?);
                }
            }
        }
    }
    Ok((certs, stats))
}

pub fn run_search(cfg: &SearchConfig, resume: Option<&str>) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    let digest = cfg.digest();
    let start = match resume {
        Some(tok) => ResumeToken::decode(tok, &digest)?.next,
        None => 0,
    };
    let p = Prepared {
        scheme: EllipticScheme::from_json(&cfg.scheme)?,
        f: RationalFunction::parse(&cfg.f).map_err(|e| SearchError::Config(format!("f: {e}")))?,
        cfg: cfg.clone(),
    };
    if p.f.is_constant() {
        return Err(FiberError::ConstantF.into());
    }
    let stream: Box<dyn Iterator<Item = RootOfUnityTuple>> = match &cfg.tuples {
        Some(ts) => {
            for t in ts {
                t.validate().map_err(|e| SearchError::Config(e.to_string()))?;
            }
            Box::new(ts.clone().into_iter())
        }
        None => Box::new(enumerate_tuples(cfg.n, cfg.n_max, cfg.skip_vanishing_subsums, cfg.all_orders)),
    };
    let budget = cfg.budget.unwrap_or(u64::MAX);
    let mut batch: Vec<RootOfUnityTuple> = stream.skip(start as usize).take(budget.saturating_add(1).min(usize::MAX as u64) as usize).collect();
    let resume = if batch.len() as u64 > budget {
        batch.pop();
        Some(ResumeToken { config: digest, next: start + budget }.encode())
    } else {
        None
    };

    let results: Vec<_> = batch.par_iter().map(|t| process_tuple(&p, t)).collect();
    let mut certs = Vec::new();
    let mut stats = SearchStats::default();
    for r in results {
        let (c, s) = r?;
        certs.extend(c);
        stats.merge(&s);
    }
    certs.sort_by_key(|c| c.sort_key());

    let mut duplicates = Vec::new();
    if cfg.dedupe == Dedupe::Lambda {
        let mut seen: HashMap<(Vec<String>, [String; 2]), RootOfUnityTuple> = HashMap::new();
        certs.retain(|c| {
            let key = (c.lambda_minpoly.clone(), c.lambda_approx.clone());
            match seen.get(&key) {
                Some(kept) => {
                    duplicates.push(Duplicate { kept: kept.clone(), dropped: c.tuple.clone(), root_index: c.root_index });
                    false
                }
                None => {
                    seen.insert(key, c.tuple.clone());
                    true
                }
            }
        });
    }
    Ok(SearchOutcome { certificates: certs, duplicates, stats, resume, complete_up_to_t_max: cfg.t_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_two() {
        let cfg = SearchConfig::new(2, 2, 4);
        let out = run_search(&cfg, None).unwrap();
        let c = out.certificates.iter().find(|c| c.tuple.exponents == vec![0, 0]).expect("λ = 2 certificate");
        assert_eq!(c.curve_order, 2);
        assert_eq!(c.combined_order, 2);
        assert_eq!(c.lambda_minpoly, vec!["-2", "1"]);
        assert!(certify(c).passed, "{:?}", certify(c));
    }

    #[test]
    fn budget_and_resume() {
        let mut cfg = SearchConfig::new(1, 4, 8);
        cfg.budget = Some(2);
        let a = run_search(&cfg, None).unwrap();
        let tok = a.resume.clone().unwrap();
        let b = run_search(&cfg, Some(&tok)).unwrap();
        assert!(b.resume.is_none());
        assert_eq!(a.stats.tuples + b.stats.tuples, 4);
    }
}
