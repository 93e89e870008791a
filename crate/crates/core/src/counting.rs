//! The compact set `S`, counting of rational points on its logarithm set,
//! and the degree-bound reports.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::betti::eval_rf;
use crate::arith::fp::{element_of_order, primes_one_mod, roots_in_fq, Fq, FqPoly};
use crate::arith::poly::Poly;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::ring::{format_rational, parse_rational, Ring};
use crate::cyclotomic::{euler_phi, RootOfUnityTuple};
use crate::elliptic::{EllipticScheme, ReducedSection};
use crate::extension::FieldTower;
use crate::precise::{Complex, Real};
use crate::search::{certify, run_search, Dedupe, SearchConfig, SearchError, TorsionCertificate};

pub const COUNT_SCHEMA: &str = "cyclotorsion/count/v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountingError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("needs more precision than {bits} bits")]
    NeedsPrecision { bits: u32 },
    #[error("T_max = {t_max} exceeds the cap {cap}")]
    Cap { t_max: u64, cap: u64 },
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub a: f64,
    pub bad_heights: Vec<f64>,
    pub k_degree: u32,
    /// Number of defining inequalities, `#B + 1`.
    pub l: usize,
    /// `2 l K (a + max h(β) + ln 2)`, so that `δ = exp(−exponent)`.
    pub exponent: f64,
    pub delta: f64,
}

impl DeltaReport {
    /// Upper bound on the share of conjugates of a point of height `≤ a`
    /// that fall into one excluded region around a bad point of height `h`.
    pub fn excluded_share_bound(&self, h: f64) -> f64 {
        (self.a + h + std::f64::consts::LN_2) / self.exponent
    }

    pub fn delta_real(&self, prec: u32) -> Real {
        Real::from_f64(self.exponent, prec).neg().exp()
    }
}

/// `δ = exp(−2 l K (a + max h(β) + ln 2))` with `l = #B + 1`.
pub fn compute_delta(a: f64, bad_heights: &[f64], k_degree: u32) -> Result<DeltaReport, CountingError> {
    if !(a > 0.0) {
        return Err(CountingError::Degenerate(format!("height bound a = {a} must be positive")));
    }
    if k_degree == 0 {
        return Err(CountingError::Degenerate("[K:Q] must be at least 1".into()));
    }
    if bad_heights.iter().any(|h| !(*h >= 0.0)) {
        return Err(CountingError::Degenerate("heights are nonnegative".into()));
    }
    let l = bad_heights.len() + 1;
    let hmax = bad_heights.iter().copied().fold(0.0, f64::max);
    let exponent = 2.0 * l as f64 * k_degree as f64 * (a + hmax + std::f64::consts::LN_2);
    Ok(DeltaReport { a, bad_heights: bad_heights.to_vec(), k_degree, l, exponent, delta: (-exponent).exp() })
}

#[derive(Debug, Clone, Serialize)]
pub struct BadCenter {
    pub poly: Vec<String>,
    pub approx: [String; 2],
    pub height: f64,
    #[serde(skip)]
    value: Complex,
    #[serde(skip)]
    radius_log2: f64,
}

/// `S = K¹_δ ×_{A¹} K²`: `‖λ‖ ≤ 1/δ`, `|λ − β| ≥ δ` for `β ∈ B`, and
/// `1/2 ≤ |ε_i| ≤ 3/2`, joined by `f(λ) = Σ ε_i`.
#[derive(Debug, Clone, Serialize)]
pub struct CompactSetSpec {
    pub delta: DeltaReport,
    pub bad: Vec<BadCenter>,
    pub annulus: [String; 2],
    pub f: String,
    #[serde(skip)]
    fmap: RationalFunction,
}

impl CompactSetSpec {
    /// Bad set taken from the scheme: discriminant zeros, coefficient poles
    /// and section poles, with their heights.
    pub fn for_scheme(scheme: &EllipticScheme, f: &str, a: f64, k_degree: u32) -> Result<Self, CountingError> {
        let fmap = RationalFunction::parse(f).map_err(|e| CountingError::Degenerate(format!("f: {e}")))?;
        let bs = scheme.bad_reduction_set(320);
        let bad: Vec<BadCenter> = bs
            .points
            .iter()
            .chain(&bs.section_poles)
            .map(|p| BadCenter {
                poly: p.poly.iter().map(|c| c.to_string()).collect(),
                approx: [p.approx.re.to_decimal(25), p.approx.im.to_decimal(25)],
                height: p.height,
                value: p.approx.clone(),
                radius_log2: p.radius_log2,
            })
            .collect();
        let heights: Vec<f64> = bad.iter().map(|b| b.height).collect();
        let delta = compute_delta(a, &heights, k_degree)?;
        Ok(CompactSetSpec { delta, bad, annulus: ["1/2".into(), "3/2".into()], f: f.into(), fmap })
    }

    pub fn legendre_default() -> Self {
        CompactSetSpec::for_scheme(&EllipticScheme::legendre(2), "lambda", 1.0, 1).unwrap()
    }

    pub fn fiber_map(&self) -> &RationalFunction {
        &self.fmap
    }
}

/// `Some(ordering)` of `x` against `bound` when the gap exceeds `band`.
fn compare(x: &Real, bound: &Real, band: f64) -> Option<Ordering> {
    let d = x.sub(bound);
    if d.to_f64().abs() <= band {
        None
    } else {
        Some(if d.is_negative() { Ordering::Less } else { Ordering::Greater })
    }
}

/// Membership of `(λ, ε)` in `S`. A distance within the error band of a
/// boundary gives [`CountingError::NeedsPrecision`].
pub fn membership_in_s(spec: &CompactSetSpec, lambda: &Complex, lambda_err_log2: f64, eps: &[Complex]) -> Result<bool, CountingError> {
    let prec = lambda.prec();
    let band = lambda_err_log2.exp2() + (8.0 - prec as f64).exp2();
    let undecided = || CountingError::NeedsPrecision { bits: prec };
    let delta = spec.delta.delta_real(prec);
    if compare(&lambda.abs(), &delta.recip(), band * 2.0).ok_or_else(undecided)? == Ordering::Greater {
        return Ok(false);
    }
    for b in &spec.bad {
        let d = lambda.sub(&b.value.with_prec(prec)).abs();
        if compare(&d, &delta, band + b.radius_log2.exp2()).ok_or_else(undecided)? == Ordering::Less {
            return Ok(false);
        }
    }
    let (lo, hi) = (Real::from_f64(0.5, prec), Real::from_f64(1.5, prec));
    for e in eps {
        let r = e.abs();
        let eb = (8.0 - prec as f64).exp2();
        if compare(&r, &lo, eb).ok_or_else(undecided)? == Ordering::Less || compare(&r, &hi, eb).ok_or_else(undecided)? == Ordering::Greater {
            return Ok(false);
        }
    }
    let sum = eps.iter().fold(Complex::zero(prec), |s, e| s.add(e));
    let fl = match eval_rf(&spec.fmap, lambda) {
        Ok(v) => v,
        Err(_) => return Ok(false),
    };
    let resid = fl.sub(&sum).abs().to_f64();
    let tol = (lambda_err_log2 + 16.0).exp2().max((-(prec as f64) / 2.0).exp2()) * (1.0 + sum.abs().to_f64());
    Ok(resid <= tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateFraction {
    pub in_s: usize,
    pub total: usize,
    pub fraction: String,
}

impl ConjugateFraction {
    pub fn as_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.in_s), BigInt::from(self.total.max(1)))
    }

    pub fn at_least_half(&self) -> bool {
        2 * self.in_s >= self.total
    }
}

/// Share of the conjugates `(σP, σε)` that lie in `S`, over all embeddings
/// `ζ_N ↦ e^{2πij/N}` and all roots of the conjugated `g`.
pub fn conjugate_fraction_in_s(spec: &CompactSetSpec, tower: &FieldTower, tuple: &RootOfUnityTuple, prec: u32) -> Result<ConjugateFraction, CountingError> {
    let mut in_s = 0;
    let mut total = 0;
    for j in tower.base().units() {
        let roots = tower.complex_roots(j, prec).map_err(|_| CountingError::NeedsPrecision { bits: prec })?;
        let eps: Vec<Complex> = tuple.exponents.iter().map(|&e| Complex::root_of_unity((e * j % tuple.order) as i64, tuple.order, prec)).collect();
        for r in roots {
            total += 1;
            if membership_in_s(spec, &r.value, r.radius_log2, &eps)? {
                in_s += 1;
            }
        }
    }
    let frac = BigRational::new(BigInt::from(in_s), BigInt::from(total.max(1)));
    Ok(ConjugateFraction { in_s, total, fraction: format_rational(&frac) })
}

/// Conjugate fraction for the point recorded in a certificate.
pub fn certificate_conjugate_fraction(spec: &CompactSetSpec, cert: &TorsionCertificate, prec: u32) -> Result<ConjugateFraction, CountingError> {
    let tower = FieldTower::from_json(&cert.tower).map_err(|e| CountingError::Degenerate(e.to_string()))?;
    conjugate_fraction_in_s(spec, &tower, &cert.tuple, prec)
}

/// `φ(x) ≥ √(x/2)`, checked exactly as `2 φ(x)² ≥ x`.
pub fn phi_bound_holds(x: u64) -> bool {
    let p = euler_phi(x) as u128;
    2 * p * p >= x as u128
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GmCheck {
    pub h: u64,
    /// `T/h` with `T = lcm(h, ord ε)`.
    pub t_over_h: u64,
    /// `[Q(ε^h):Q]`, from the orders of the individual `ε_i^h`.
    pub degree: u64,
    pub bound: f64,
    pub holds: bool,
}

/// `[Q(ε^h):Q] ≥ (1/√2)(T/h)^{1/2}`, decided exactly.
pub fn gm_side_check(tuple: &RootOfUnityTuple, h: u64) -> GmCheck {
    let n = tuple.order;
    let ord = tuple.exponents.iter().map(|&e| n / n.gcd(&(e * h % n))).fold(1u64, |a, b| a.lcm(&b));
    let degree = euler_phi(ord);
    let t = h.lcm(&tuple.tuple_order());
    let t_over_h = t / h;
    let holds = 2 * (degree as u128) * (degree as u128) >= t_over_h as u128;
    GmCheck { h, t_over_h, degree, bound: (t_over_h as f64 / 2.0).sqrt(), holds }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRow {
    pub tuple: RootOfUnityTuple,
    pub root_index: usize,
    pub curve_order: u64,
    pub tuple_order: u64,
    pub t: u64,
    pub degree: usize,
    pub degree_certified: bool,
    /// `degree / T^{1/6}`
    pub ratio: f64,
    pub gm: GmCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub rows: Vec<DegreeRow>,
    /// Smallest observed `degree / T^{1/6}`; an empirical stand-in for the
    /// elliptic-side constant.
    pub calibrated_c: Option<f64>,
    pub gm_violations: Vec<usize>,
}

pub fn degree_bound_report(certs: &[TorsionCertificate]) -> DegreeReport {
    let rows: Vec<DegreeRow> = certs
        .iter()
        .map(|c| {
            let t = c.curve_order.lcm(&c.tuple.tuple_order());
            DegreeRow {
                tuple: c.tuple.clone(),
                root_index: c.root_index,
                curve_order: c.curve_order,
                tuple_order: c.tuple.tuple_order(),
                t,
                degree: c.degree.absolute,
                degree_certified: c.degree.certified,
                ratio: c.degree.absolute as f64 / (t as f64).powf(1.0 / 6.0),
                gm: gm_side_check(&c.tuple, c.curve_order),
            }
        })
        .collect();
    let calibrated_c = rows.iter().filter(|r| r.degree_certified).map(|r| r.ratio).reduce(f64::min);
    let gm_violations = rows.iter().enumerate().filter(|(_, r)| !r.gm.holds).map(|(i, _)| i).collect();
    DegreeReport { rows, calibrated_c, gm_violations }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountConfig {
    pub n: usize,
    pub t_max: u64,
    pub precision_bits: u32,
    /// Primes used by the exact `F_q` filter.
    pub filter_primes: usize,
    pub cap: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { n: 2, t_max: 32, precision_bits: 256, filter_primes: 2, cap: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CountedPoint {
    pub height: u64,
    pub b: [String; 2],
    pub a: Vec<String>,
    pub vanishing_subsum: bool,
    pub lambda_minpoly: Vec<String>,
    pub root_index: usize,
    pub curve_order: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CountStats {
    pub multisets: u64,
    pub filter_survivors: u64,
    pub certificates: u64,
    pub outside_s: u64,
}

/// Constants of the two-sided chain, calibrated from the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCalibration {
    /// `c` in `degree ≥ c T^{1/6}`.
    pub lower_c: Option<f64>,
    pub lower_exponent: f64,
    /// `c` and exponent in `N(T) ≤ c T^e`.
    pub upper_c: f64,
    pub upper_exponent: f64,
    /// Least `T` where `½ lower_c T^{1/6}` exceeds `upper_c T^e`.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub schema: String,
    pub n: usize,
    pub t_max: u64,
    pub grid: Vec<u64>,
    pub n_nosubsum: Vec<u64>,
    pub n_subsum: Vec<u64>,
    pub slope_nosubsum: Option<f64>,
    /// The no-subsum slope exceeded `0.7`; a warning, not a failure.
    pub slope_warning: bool,
    pub stabilization_t: Option<u64>,
    pub points: Vec<CountedPoint>,
    pub certificates: Vec<TorsionCertificate>,
    pub recertified: bool,
    pub chain: ChainCalibration,
    pub degrees: DegreeReport,
    pub stats: CountStats,
}

impl CountReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("# {}\nT,N_nosubsum,N_subsum\n", COUNT_SCHEMA);
        for (i, t) in self.grid.iter().enumerate() {
            s += &format!("{},{},{}\n", t, self.n_nosubsum[i], self.n_subsum[i]);
        }
        s
    }
}

fn fractions(t: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(0, 1)];
    for d in 2..=t {
        out.extend((1..d).filter(|k| k.gcd(&d) == 1).map(|k| (k, d)));
    }
    out
}

/// Distinct orderings of a multiset given in nondecreasing order.
fn permutations<T: Clone + Ord>(v: &[T]) -> Vec<Vec<T>> {
    let mut cur = v.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

fn neg_mod1(r: &BigRational) -> BigRational {
    let one = BigRational::from_integer(1.into());
    let z = BigRational::from_integer(0.into());
    if *r == z {
        z
    } else {
        one - r
    }
}

fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Primes and an element of order `N` modulo each, for the filter.
struct PrimeTable {
    by_order: HashMap<u64, Vec<(u64, Fq)>>,
}

impl PrimeTable {
    fn new(orders: impl Iterator<Item = u64>, count: usize, floor: u64) -> Self {
        let by_order = orders
            .map(|n| {
                let ps = primes_one_mod(n, floor).take(count).map(|q| (q, element_of_order(n, q).unwrap())).collect();
                (n, ps)
            })
            .collect();
        PrimeTable { by_order }
    }
}

/// Roots in `F_q` of `num − ζ̄·den`, when they account for every root of
/// the fiber polynomial (full degree and split into distinct linear
/// factors). `None` when this prime says nothing.
fn fiber_roots_mod(f: &RationalFunction, zeta: Fq) -> Option<Vec<Fq>> {
    let q = zeta.modulus();
    let red = |p: &Poly<BigRational>| -> Option<FqPoly> {
        let c: Option<Vec<Fq>> = p.coeffs().iter().map(|r| Fq::from_ratio(r.numer(), r.denom(), q)).collect();
        Some(Poly::new(c?))
    };
    let num = red(f.num())?;
    let den = red(f.den())?;
    let g = num.sub(&den.scale(&zeta));
    let deg = f.num().degree().unwrap_or(0).max(f.den().degree().unwrap_or(0));
    if g.degree() != Some(deg) || deg == 0 {
        return None;
    }
    if deg == 1 {
        let c = g.coeffs();
        return Some(vec![c[0].neg_ref().mul_ref(&c[1].pow(q - 2))]);
    }
    let roots = roots_in_fq(&g, q);
    (roots.len() == deg).then_some(roots)
}

/// Exact necessary condition for a point of height `≤ T`: modulo each
/// prime, the reduced section order divides some admissible curve order.
fn passes_filter(scheme: &EllipticScheme, f: &RationalFunction, primes: &[(u64, Fq)], exps: &[u64], admissible: &[bool]) -> bool {
    let bound = admissible.len() as u64 - 1;
    let mut joint = 1u64;
    let single = f.num().degree().unwrap_or(0).max(f.den().degree().unwrap_or(0)) == 1;
    for &(q, w) in primes {
        let zeta = exps.iter().fold(Fq::from_u64(0, q), |s, &e| s.add_ref(&w.pow(e)));
        let Some(roots) = fiber_roots_mod(f, zeta) else { continue };
        let mut any = false;
        for r in roots {
            let Some(mut sec) = ReducedSection::at_fq(scheme, r) else {
                any = true;
                continue;
            };
            let Some(o) = sec.order(bound) else { continue };
            if single {
                joint = joint.lcm(&o);
                any = joint <= bound && admissible[joint as usize];
            } else {
                any |= admissible[o as usize];
            }
        }
        if !any {
            return false;
        }
    }
    true
}

/// Counts rational points `(b₁, b₂, a₁, …, a_n)` of height `≤ T` on the
/// logarithm set of `S`, for every `T ≤ T_max`.
pub fn count_rational_points(scheme: &EllipticScheme, spec: &CompactSetSpec, cfg: &CountConfig) -> Result<CountReport, CountingError> {
    if cfg.t_max > cfg.cap {
        return Err(CountingError::Cap { t_max: cfg.t_max, cap: cfg.cap });
    }
    if cfg.n == 0 || cfg.t_max == 0 {
        return Err(CountingError::Degenerate("need n ≥ 1 and T_max ≥ 1".into()));
    }
    let t_max = cfg.t_max;
    let f = spec.fiber_map();
    // a point of height ≤ T has Betti denominators d₁, d₂ ≤ T, so its
    // order is lcm(d₁, d₂)
    let bound = t_max * t_max;
    let mut admissible = vec![false; bound as usize + 1];
    for d1 in 1..=t_max {
        for d2 in 1..=t_max {
            let m = d1.lcm(&d2);
            for o in crate::cyclotomic::field::divisors(m) {
                admissible[o as usize] = true;
            }
        }
    }
    admissible[1] = false;

    let fr = fractions(t_max);
    let multisets: Vec<Vec<usize>> = crate::search::MultisetIter::new(cfg.n, fr.len() as u64).map(|v| v.into_iter().map(|i| i as usize).collect()).collect();
    let order_of = |ms: &[usize]| ms.iter().map(|&i| fr[i].1).fold(1u64, |a, b| a.lcm(&b));
    let orders: BTreeSet<u64> = multisets.iter().map(|m| order_of(m)).collect();
    let table = PrimeTable::new(orders.into_iter(), cfg.filter_primes, 4 * bound + 100);

    let survivors: Vec<RootOfUnityTuple> = multisets
        .par_iter()
        .filter_map(|ms| {
            let n = order_of(ms);
            let exps: Vec<u64> = ms.iter().map(|&i| fr[i].0 * (n / fr[i].1)).collect();
            passes_filter(scheme, f, &table.by_order[&n], &exps, &admissible).then(|| RootOfUnityTuple { n: cfg.n, order: n, exponents: exps })
        })
        .collect();

    let mut stats = CountStats { multisets: multisets.len() as u64, filter_survivors: survivors.len() as u64, ..Default::default() };
    let mut scfg = SearchConfig::certify_only(survivors.clone(), bound.max(2));
    scfg.scheme = scheme.to_json();
    scfg.f = spec.f.clone();
    scfg.n = cfg.n;
    scfg.precision_bits = cfg.precision_bits;
    scfg.dedupe = Dedupe::None;
    let certs = if survivors.is_empty() { Vec::new() } else { run_search(&scfg, None)?.certificates };
    stats.certificates = certs.len() as u64;

    let results: Vec<Result<(Vec<CountedPoint>, bool, bool), CountingError>> = certs.par_iter().map(|c| points_of(spec, c, cfg.precision_bits, t_max)).collect();
    let mut points = BTreeSet::new();
    let mut recertified = true;
    let mut kept = Vec::new();
    for (r, c) in results.into_iter().zip(certs) {
        let (ps, in_s, ok) = r?;
        recertified &= ok;
        if !in_s {
            stats.outside_s += 1;
            continue;
        }
        if !ps.is_empty() {
            kept.push(c);
        }
        points.extend(ps);
    }
    let points: Vec<CountedPoint> = points.into_iter().collect();

    let grid: Vec<u64> = (1..=t_max).collect();
    let count = |sub: bool| -> Vec<u64> { grid.iter().map(|&t| points.iter().filter(|p| p.height <= t && p.vanishing_subsum == sub).count() as u64).collect() };
    let n_nosubsum = count(false);
    let n_subsum = count(true);
    let xy: Vec<(f64, f64)> = grid.iter().zip(&n_nosubsum).filter(|(_, &n)| n > 0).map(|(&t, &n)| ((t as f64).ln(), (n as f64).ln())).collect();
    let slope = least_squares_slope(&xy);
    let total: Vec<u64> = n_nosubsum.iter().zip(&n_subsum).map(|(a, b)| a + b).collect();
    let stabilization_t = total.last().map(|last| {
        let i = total.iter().position(|v| v == last).unwrap();
        grid[i]
    });

    let degrees = degree_bound_report(&kept);
    let upper_exponent = slope.unwrap_or(0.0).max(0.0);
    let upper_c = grid.iter().zip(&n_nosubsum).map(|(&t, &n)| n as f64 / (t as f64).powf(upper_exponent)).fold(0.0, f64::max);
    let lower_exponent = 1.0 / 6.0;
    let threshold = match degrees.calibrated_c {
        Some(c) if upper_exponent < lower_exponent && c > 0.0 => Some((2.0 * upper_c.max(f64::MIN_POSITIVE) / c).powf(1.0 / (lower_exponent - upper_exponent))),
        _ => None,
    };
    Ok(CountReport {
        schema: COUNT_SCHEMA.into(),
        n: cfg.n,
        t_max,
        grid,
        n_nosubsum,
        n_subsum,
        slope_nosubsum: slope,
        slope_warning: slope.is_some_and(|s| s >= 0.7),
        stabilization_t,
        points,
        certificates: kept,
        recertified,
        chain: ChainCalibration { lower_c: degrees.calibrated_c, lower_exponent, upper_c, upper_exponent, threshold },
        degrees,
        stats,
    })
}

/// Points contributed by one certificate: every ordering of the `a`'s and
/// both signs of `y`. Also reports membership of `λ` in `K¹_δ` and whether
/// the certificate and membership re-verify at doubled precision.
fn points_of(spec: &CompactSetSpec, c: &TorsionCertificate, prec: u32, t_max: u64) -> Result<(Vec<CountedPoint>, bool, bool), CountingError> {
    let tower = FieldTower::from_json(&c.tower).map_err(|e| CountingError::Degenerate(e.to_string()))?;
    let eps: Vec<Complex> = c.tuple.exponents.iter().map(|&e| Complex::root_of_unity(e as i64, c.tuple.order, prec)).collect();
    let member = |p: u32| -> Result<bool, CountingError> {
        let mut p = p;
        loop {
            let roots = tower.complex_roots(1, p).map_err(|_| CountingError::NeedsPrecision { bits: p })?;
            let r = &roots[c.root_index];
            let e: Vec<Complex> = eps.iter().map(|x| x.with_prec(p)).collect();
            match membership_in_s(spec, &r.value, r.radius_log2, &e) {
                Err(CountingError::NeedsPrecision { .. }) if p < 4 * prec => p *= 2,
                other => return other,
            }
        }
    };
    let in_s = member(prec)?;
    if !in_s {
        return Ok((Vec::new(), false, true));
    }
    let ok = certify(c).passed && member(2 * prec)?;

    let parse = |s: &str| parse_rational(s).ok_or_else(|| CountingError::Degenerate(format!("bad rational {s}")));
    let b1 = parse(&c.betti.b1_rational)?;
    let b2 = parse(&c.betti.b2_rational)?;
    let n = c.tuple.order;
    let a: Vec<BigRational> = c.tuple.exponents.iter().map(|&e| BigRational::new(BigInt::from(e), BigInt::from(n))).collect();
    let den = |r: &BigRational| r.denom().to_string().parse::<u64>().unwrap_or(u64::MAX);
    let mut out = Vec::new();
    for (x1, x2) in [(b1.clone(), b2.clone()), (neg_mod1(&b1), neg_mod1(&b2))] {
        for perm in permutations(&a) {
            let height = perm.iter().chain([&x1, &x2]).map(den).max().unwrap();
            if height > t_max {
                continue;
            }
            out.push(CountedPoint {
                height,
                b: [format_rational(&x1), format_rational(&x2)],
                a: perm.iter().map(format_rational).collect(),
                vanishing_subsum: c.vanishing_subsum,
                lambda_minpoly: c.lambda_minpoly.clone(),
                root_index: c.root_index,
                curve_order: c.curve_order,
            });
        }
    }
    Ok((out, true, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        let d = compute_delta(1.0, &[0.0, 0.0], 1).unwrap();
        assert_eq!(d.l, 3);
        assert!((d.delta - 3.87e-5).abs() < 5e-8);
        let e = compute_delta(1.0, &[], 1).unwrap();
        assert!((e.delta - (-2.0 * (1.0 + std::f64::consts::LN_2)).exp()).abs() < 1e-15);
        let d2 = compute_delta(1.0, &[0.0, 0.0], 2).unwrap();
        assert!((d2.delta - d.delta * d.delta).abs() < 1e-20);
        assert!(compute_delta(0.0, &[], 1).is_err());
    }

    #[test]
    fn permutations_distinct() {
        assert_eq!(permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(permutations(&[1, 2, 3]).len(), 6);
        assert_eq!(permutations(&[4]).len(), 1);
    }

    #[test]
    fn fractions_count() {
        assert_eq!(fractions(1), vec![(0, 1)]);
        assert_eq!(fractions(4).len(), 1 + 1 + 2 + 2);
    }
}
