use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::betti_record;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::ring::Ring;
use crate::cyclotomic::field::{divisors, CyclotomicJson, CyclotomicNumber};
use crate::cyclotomic::RootOfUnityTuple;
use crate::elliptic::{DivisionValues, EllipticScheme, SchemeJson, SpecializeError};
use crate::extension::{FieldTower, TowerElement, TowerJson};

pub const CERT_SCHEMA: &str = "cyclotorsion/certificate/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisionIdentity {
    pub m: u64,
    /// `"f_m(x0) = 0"` or `"y0^2 = 0"` (even `m`).
    pub vanishing: String,
    pub proper_divisors_nonvanishing: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeInfo {
    /// `[Q(ζ_N):Q]`
    pub base: usize,
    /// `deg g`
    pub relative: usize,
    /// `[Q(P, ε):Q]` when `g` is certified irreducible, else an upper bound.
    pub absolute: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiRecord {
    pub precision_bits: u32,
    pub b1: String,
    pub b2: String,
    pub err_log2: f64,
    pub b1_rational: String,
    pub b2_rational: String,
}

/// Exactly re-checkable witness that `s(P)` has order `curve_order` at a
/// root `P` of `g` with `f(P) = Σ ε_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionCertificate {
    pub schema: String,
    pub scheme: SchemeJson,
    pub f: String,
    pub tuple: RootOfUnityTuple,
    pub zeta: CyclotomicJson,
    pub tower: TowerJson,
    /// Prime modulo which `g` stays irreducible (`0` for linear `g`).
    pub irreducibility_prime: Option<u64>,
    pub root_index: usize,
    pub lambda_approx: [String; 2],
    pub lambda_minpoly: Vec<String>,
    pub curve_order: u64,
    pub division_identity: DivisionIdentity,
    pub tuple_order: u64,
    pub combined_order: u64,
    pub degree: DegreeInfo,
    pub vanishing_subsum: bool,
    pub betti: BettiRecord,
}

impl TorsionCertificate {
    pub fn sort_key(&self) -> (u64, Vec<u64>, usize) {
        (self.tuple.order, self.tuple.exponents.clone(), self.root_index)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CertifyReport {
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

pub(crate) fn show(z: &TowerElement, t: &FieldTower) -> String {
    match t.as_base(z) {
        Some(c) => c.to_string(),
        None => format!("{:?}", z),
    }
}

struct Checker {
    checks: Vec<Check>,
}

impl Checker {
    fn push(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) -> bool {
        self.checks.push(Check { name, ok, detail: detail.into() });
        ok
    }
}

/// Re-runs every check from the certificate fields alone. All checks are
/// exact except the Betti re-check, done at twice the recorded precision.
pub fn certify(cert: &TorsionCertificate) -> CertifyReport {
    let mut c = Checker { checks: Vec::new() };
    certify_into(cert, &mut c);
    let passed = c.checks.iter().all(|k| k.ok);
    CertifyReport { passed, checks: c.checks }
}

fn certify_into(cert: &TorsionCertificate, c: &mut Checker) {
    if !c.push("schema", cert.schema == CERT_SCHEMA, cert.schema.clone()) {
        return;
    }
    let t = &cert.tuple;
    if !c.push("tuple", t.validate().is_ok(), format!("N = {}, n = {}", t.order, t.n)) {
        return;
    }
    let tuple_order = t.tuple_order();
    c.push("tuple_order", tuple_order == cert.tuple_order, format!("recomputed {tuple_order}, recorded {}", cert.tuple_order));

    let zeta = match CyclotomicNumber::from_json(&cert.zeta).and_then(|z| z.lift(&t.field())) {
        Ok(z) => z,
        Err(e) => {
            c.push("zeta", false, e.to_string());
            return;
        }
    };
    let sum = t.sum_of_roots();
    let diff = sum.sub_ref(&zeta);
    if !c.push("zeta", diff.is_zero(), format!("Σε − ζ = {diff}")) {
        return;
    }

    let (scheme, f) = match (EllipticScheme::from_json(&cert.scheme), RationalFunction::parse(&cert.f)) {
        (Ok(s), Ok(f)) => (s, f),
        (s, f) => {
            c.push("scheme", false, format!("{:?} {:?}", s.err(), f.err()));
            return;
        }
    };
    let tower = match FieldTower::from_json(&cert.tower) {
        Ok(tw) if tw.base().conductor() == t.field().conductor() => tw,
        Ok(tw) => {
            c.push("tower", false, format!("tower over Q(ζ_{}) but tuple field is Q(ζ_{})", tw.base().conductor(), t.order));
            return;
        }
        Err(e) => {
            c.push("tower", false, e.to_string());
            return;
        }
    };
    let zeta = zeta.lift(tower.base()).unwrap();
    let lam = tower.generator();
    match f.eval_in(&lam, |r| tower.from_rational(r)) {
        Ok(v) => {
            let r = v.sub_ref(&tower.from_base(zeta.clone()));
            if !c.push("fiber", r.is_zero(), format!("f(λ) − ζ = {}", show(&r, &tower))) {
                return;
            }
        }
        Err(e) => {
            c.push("fiber", false, format!("f has a pole or the tower splits: {e:?}"));
            return;
        }
    }
    let coeffs: Result<Vec<BigRational>, _> = cert.lambda_minpoly.iter().map(|s| s.parse::<BigRational>()).collect();
    match coeffs {
        Ok(cs) if cs.len() >= 2 => {
            let v = cs.iter().rev().fold(tower.from_rational(&BigRational::from_integer(0.into())), |acc, a| acc.mul_ref(&lam).add_ref(&tower.from_rational(a)));
            c.push("minpoly", v.is_zero(), format!("μ(λ) = {}", show(&v, &tower)));
        }
        _ => {
            c.push("minpoly", false, format!("malformed {:?}", cert.lambda_minpoly));
        }
    }

    let sp = match scheme.specialize(&tower, &lam) {
        Ok(sp) => {
            c.push("good_reduction", true, "discriminant is a unit");
            sp
        }
        Err(e @ (SpecializeError::BadReduction | SpecializeError::Pole(_))) => {
            c.push("good_reduction", false, e.to_string());
            return;
        }
        Err(SpecializeError::ZeroDivisor(g)) => {
            c.push("good_reduction", false, format!("tower splits: {g:?}"));
            return;
        }
    };

    let m = cert.curve_order;
    let mut dv = DivisionValues::new(&sp.curve, &sp.x0, &sp.y0_sq);
    match dv.kills(m) {
        Ok(true) => {
            c.push("division_identity", true, format!("ψ_{m}(P) = 0"));
        }
        Ok(false) => {
            let residue = show(&dv.f(m).clone(), &tower);
            c.push("division_identity", false, format!("f_{m}(x0) = {residue} ≠ 0"));
        }
        Err(g) => {
            c.push("division_identity", false, format!("tower splits: {g:?}"));
        }
    }
    let mut proper_ok = true;
    for d in divisors(m).into_iter().filter(|&d| d < m) {
        match dv.kills(d) {
            Ok(false) => {}
            Ok(true) => {
                proper_ok = false;
                c.push("proper_divisors", false, format!("{d}P = O already"));
            }
            Err(g) => {
                proper_ok = false;
                c.push("proper_divisors", false, format!("tower splits at d = {d}: {g:?}"));
            }
        }
    }
    if proper_ok {
        c.push("proper_divisors", true, format!("dP ≠ O for proper divisors d of {m}"));
    }
    let combined = m.lcm(&tuple_order);
    c.push("combined_order", combined == cert.combined_order, format!("lcm({m}, {tuple_order}) = {combined}"));

    let vs = t.has_vanishing_subsum();
    c.push("vanishing_subsum", vs == Ok(cert.vanishing_subsum), format!("recomputed {vs:?}"));

    match cert.irreducibility_prime {
        Some(0) => {
            c.push("irreducibility", tower.relative_degree() == 1, "linear defining polynomial");
        }
        Some(q) => {
            let ok = tower.reduce_mod_prime(q).map(|r| crate::arith::fp::is_irreducible(&r.g_image)).unwrap_or(false);
            c.push("irreducibility", ok, format!("g irreducible mod {q}"));
        }
        None => {}
    }
    let base = tower.base().degree();
    let rel = tower.relative_degree();
    let deg_ok = cert.degree.base == base && cert.degree.relative == rel && cert.degree.absolute == base * rel && cert.degree.certified == cert.irreducibility_prime.is_some();
    c.push("degree", deg_ok, format!("[Q(ζ_N):Q] = {base}, deg g = {rel}"));

    if rel == 1 && m <= 64 {
        let r = sp.order_by_addition(m);
        c.push("addition_cross_check", r == Some(Some(m)), format!("repeated addition gives {r:?}"));
    }

    match betti_record(&scheme, &tower, cert.root_index, m, cert.betti.precision_bits * 2) {
        Ok(b) => {
            let ok = b.b1_rational == cert.betti.b1_rational && b.b2_rational == cert.betti.b2_rational;
            c.push("betti", ok, format!("({}, {}) at {} bits", b.b1_rational, b.b2_rational, b.precision_bits));
        }
        Err(e) => {
            c.push("betti", false, e.to_string());
        }
    }
}
