//! Elliptic schemes over the λ-line: coefficients and the section abscissa
//! are rational functions of λ with rational coefficients.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::curve::{CurvePoint, WeierstrassCurve};
use super::divpoly::torsion_order_x;
use crate::arith::expr::ExprError;
use crate::arith::poly::Poly;
use crate::arith::ratfunc::{QPoly, RationalFunction};
use crate::arith::ring::{InvError, Ring};
use crate::cyclotomic::field::divisors;
use crate::extension::{make_tower, BasePoly, FieldTower, TowerElement};
use crate::precise::roots::polynomial_roots;
use crate::precise::Complex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub a: String,
    pub b: String,
    pub c: String,
    pub section_x: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("in field {field}: {err}")]
    Parse { field: &'static str, err: ExprError },
    #[error("discriminant vanishes identically")]
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticScheme {
    pub a: RationalFunction,
    pub b: RationalFunction,
    pub c: RationalFunction,
    pub section_x: RationalFunction,
    pub section_y_square: RationalFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BadKind {
    /// Zero of the discriminant or pole of a coefficient.
    Fiber,
    /// Pole of the section abscissa.
    SectionPole,
}

/// An algebraic λ given by a squarefree integer polynomial and one of its
/// complex roots.
#[derive(Debug, Clone)]
pub struct BadPoint {
    pub kind: BadKind,
    pub poly: Vec<BigInt>,
    /// `true` when `poly` is certified irreducible (always for degree one).
    pub irreducible: bool,
    pub rational: Option<BigRational>,
    pub approx: Complex,
    pub radius_log2: f64,
    /// Logarithmic Weil height (exact when `irreducible`).
    pub height: f64,
}

impl BadPoint {
    pub fn approx_c64(&self) -> Complex64 {
        self.approx.to_c64()
    }
}

#[derive(Debug, Clone)]
pub struct BadSet {
    pub points: Vec<BadPoint>,
    pub section_poles: Vec<BadPoint>,
    pub bad_at_infinity: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecializeError {
    #[error("bad reduction at this parameter")]
    BadReduction,
    #[error("pole of {0} at this parameter")]
    Pole(&'static str),
    #[error("tower splits: {0:?}")]
    ZeroDivisor(BasePoly),
}

impl EllipticScheme {
    pub fn new(a: RationalFunction, b: RationalFunction, c: RationalFunction, section_x: RationalFunction) -> Result<Self, SchemeError> {
        let e = WeierstrassCurve::new(a.clone(), b.clone(), c.clone());
        if e.discriminant().is_zero() {
            return Err(SchemeError::Singular);
        }
        let section_y_square = e.cubic(&section_x);
        Ok(EllipticScheme { a, b, c, section_x, section_y_square })
    }

    /// Legendre family `y² = x(x − 1)(x − λ)` with section abscissa `x0`.
    pub fn legendre(x0: i64) -> Self {
        Self::from_json(&SchemeJson {
            a: "-(1 + lambda)".into(),
            b: "lambda".into(),
            c: "0".into(),
            section_x: x0.to_string(),
        })
        .unwrap()
    }

    pub fn from_json(j: &SchemeJson) -> Result<Self, SchemeError> {
        let p = |field: &'static str, s: &str| RationalFunction::parse(s).map_err(|err| SchemeError::Parse { field, err });
        Self::new(p("a", &j.a)?, p("b", &j.b)?, p("c", &j.c)?, p("section_x", &j.section_x)?)
    }

    pub fn to_json(&self) -> SchemeJson {
        SchemeJson { a: self.a.to_string(), b: self.b.to_string(), c: self.c.to_string(), section_x: self.section_x.to_string() }
    }

    pub fn generic_curve(&self) -> WeierstrassCurve<RationalFunction> {
        WeierstrassCurve::new(self.a.clone(), self.b.clone(), self.c.clone())
    }

    pub fn discriminant(&self) -> RationalFunction {
        self.generic_curve().discriminant()
    }

    /// Good reduction at `λ = ∞` iff for some integer `k` the coefficients
    /// have pole orders `≤ 2k, 4k, 6k` and the discriminant has pole order
    /// exactly `12k`.
    pub fn bad_at_infinity(&self) -> bool {
        let ord = |f: &RationalFunction| f.degree_at_infinity();
        let Some(dd) = ord(&self.discriminant()) else { return true };
        if dd % 12 != 0 {
            return true;
        }
        let k = dd / 12;
        let ok = |f: &RationalFunction, w: i64| ord(f).map_or(true, |d| d <= w * k);
        !(ok(&self.a, 2) && ok(&self.b, 4) && ok(&self.c, 6))
    }

    pub fn bad_reduction_set(&self, prec: u32) -> BadSet {
        let disc = self.discriminant();
        let mut fiber = disc.num().clone();
        for f in [&self.a, &self.b, &self.c] {
            fiber = fiber.mul(f.den());
        }
        let points = algebraic_points(&fiber, BadKind::Fiber, prec);
        let section_poles = algebraic_points(self.section_x.den(), BadKind::SectionPole, prec);
        BadSet { points, section_poles, bad_at_infinity: self.bad_at_infinity() }
    }

    /// Specializes at `λ0` in a tower: the curve, `x0 = section_x(λ0)` and
    /// `y0² = cubic(x0)`.
    pub fn specialize(&self, tower: &FieldTower, lambda: &TowerElement) -> Result<Specialization, SpecializeError> {
        let embed = |r: &BigRational| tower.from_rational(r);
        let ev = |f: &RationalFunction, name: &'static str| {
            f.eval_in(lambda, embed).map_err(|e| match e {
                InvError::Zero => SpecializeError::Pole(name),
                InvError::ZeroDivisor(g) => SpecializeError::ZeroDivisor(g),
            })
        };
        let curve = WeierstrassCurve::new(ev(&self.a, "a")?, ev(&self.b, "b")?, ev(&self.c, "c")?);
        match curve.discriminant().zero_test() {
            Ok(true) => return Err(SpecializeError::BadReduction),
            Ok(false) => {}
            Err(g) => return Err(SpecializeError::ZeroDivisor(g)),
        }
        let x0 = ev(&self.section_x, "section_x")?;
        let y0_sq = curve.cubic(&x0);
        Ok(Specialization { tower: tower.clone(), lambda: lambda.clone(), curve, x0, y0_sq })
    }
}

/// Roots of the squarefree part of `p`, with rational roots split off.
fn algebraic_points(p: &QPoly, kind: BadKind, prec: u32) -> Vec<BadPoint> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part().unwrap();
    let ints = sf.primitive_integer();
    let lead = ints.last().unwrap().abs();
    let cx: Vec<Complex> = ints.iter().map(|c| Complex::from_real(crate::precise::Real::from_bigint(c, prec + 32))).collect();
    let Ok((roots, _)) = polynomial_roots(&cx) else { return Vec::new() };

    // split off rational roots p/q with q | lead
    let mut rest = sf.clone();
    let mut rationals = Vec::new();
    let lead_u = lead.to_u64().unwrap_or(1);
    for r in &roots {
        if r.value.im.magnitude() > -(prec as i64) / 2 {
            continue;
        }
        for q in divisors(lead_u) {
            let num = r.value.re.mul_i64(q as i64).round();
            let cand = BigRational::new(num, BigInt::from(q));
            if Zero::is_zero(&rest.eval(&cand)) && !rationals.contains(&cand) {
                rest = rest.divrem(&Poly::new(vec![-cand.clone(), BigRational::from_integer(1.into())])).unwrap().0;
                rationals.push(cand);
                break;
            }
        }
    }
    let mut out: Vec<BadPoint> = rationals
        .iter()
        .map(|r| {
            let h = r.numer().abs().max(r.denom().clone()).to_f64().unwrap().ln();
            BadPoint {
                kind,
                poly: vec![-r.numer().clone(), r.denom().clone()],
                irreducible: true,
                rational: Some(r.clone()),
                approx: Complex::from_real(crate::precise::Real::from_rational(r, prec)),
                radius_log2: f64::NEG_INFINITY,
                height: h,
            }
        })
        .collect();
    if rest.degree().unwrap_or(0) >= 1 {
        let ri = rest.primitive_integer();
        let irreducible = {
            let g = Poly::new(ri.iter().map(|c| crate::cyclotomic::CyclotomicNumber::from_rational(&crate::cyclotomic::CyclotomicField::new(1), &BigRational::from_integer(c.clone()))).collect());
            let l = g.lead().unwrap().clone();
            let g = g.scale(&l.try_inv().unwrap());
            make_tower(&crate::cyclotomic::CyclotomicField::new(1), &g).ok().and_then(|t| t.irreducible_by_reduction(40)).is_some()
        };
        let cx: Vec<Complex> = ri.iter().map(|c| Complex::from_real(crate::precise::Real::from_bigint(c, prec + 32))).collect();
        if let Ok((rr, _)) = polynomial_roots(&cx) {
            let d = rr.len() as f64;
            let mahler = ri.last().unwrap().abs().to_f64().unwrap().ln() + rr.iter().map(|r| r.value.to_c64().norm().max(1.0).ln()).sum::<f64>();
            for r in rr {
                out.push(BadPoint {
                    kind,
                    poly: ri.clone(),
                    irreducible,
                    rational: None,
                    approx: r.value.with_prec(prec),
                    radius_log2: r.radius_log2,
                    height: mahler / d,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        let (x, y) = (a.approx_c64(), b.approx_c64());
        x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap())
    });
    out
}

/// A fiber of the scheme at an exact parameter.
#[derive(Debug, Clone)]
pub struct Specialization {
    pub tower: FieldTower,
    pub lambda: TowerElement,
    pub curve: WeierstrassCurve<TowerElement>,
    pub x0: TowerElement,
    pub y0_sq: TowerElement,
}

impl Specialization {
    /// Exact order of the section point up to `t_max` (x-only test, valid
    /// for either square root of `y0²`).
    pub fn torsion_order(&self, t_max: u64) -> Result<Option<u64>, BasePoly> {
        torsion_order_x(&self.curve, &self.x0, &self.y0_sq, t_max)
    }

    /// The point with `y` adjoined, available when `λ0` lies in the base
    /// field. `y` is the class of `y` in `base[y]/(y² − y0²)`, or the base
    /// square root when `y0² = 0` or the ring was split.
    pub fn point_with_y(&self) -> Option<(WeierstrassCurve<TowerElement>, CurvePoint<TowerElement>, FieldTower)> {
        let s = self.tower.as_base(&self.y0_sq)?;
        let base = self.tower.base().clone();
        let one = s.one_like();
        let g = if s.is_zero() { Poly::new(vec![s.zero_like(), one.clone()]) } else { Poly::new(vec![s.neg_ref(), s.zero_like(), one]) };
        let yt = make_tower(&base, &g).ok()?;
        Some(self.lift_to(&yt))
    }

    fn lift_to(&self, yt: &FieldTower) -> (WeierstrassCurve<TowerElement>, CurvePoint<TowerElement>, FieldTower) {
        let up = |z: &TowerElement| yt.from_base(self.tower.as_base(z).unwrap());
        let curve = self.curve.map(up);
        let pt = CurvePoint::Affine { x: up(&self.x0), y: yt.generator() };
        (curve, pt, yt.clone())
    }

    /// Order by repeated point addition with `y` adjoined (cross-check of
    /// the division-polynomial test). Splits the `y`-ring on demand.
    pub fn order_by_addition(&self, t_max: u64) -> Option<Option<u64>> {
        let (mut curve, mut pt, _) = self.point_with_y()?;
        for _ in 0..3 {
            match curve.order_by_addition(&pt, t_max) {
                Ok(r) => return Some(r),
                Err(InvError::ZeroDivisor(factor)) => {
                    let yt = make_tower(self.tower.base(), &factor).ok()?;
                    (curve, pt, _) = self.lift_to(&yt);
                }
                Err(InvError::Zero) => return None,
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;
    use crate::cyclotomic::{CyclotomicField, CyclotomicNumber};

    #[test]
    fn legendre_bad_set() {
        let s = EllipticScheme::legendre(2);
        let bad = s.bad_reduction_set(128);
        let r: Vec<_> = bad.points.iter().map(|p| p.rational.clone().unwrap()).collect();
        assert_eq!(r, vec![rat(0), rat(1)]);
        assert!(bad.bad_at_infinity);
        assert!(bad.section_poles.is_empty());
        assert_eq!(s.section_y_square.eval_rational(&rat(2)), Some(rat(0)));
    }

    #[test]
    fn other_bad_sets() {
        let s = EllipticScheme::from_json(&SchemeJson { a: "0".into(), b: "0".into(), c: "lambda".into(), section_x: "1".into() }).unwrap();
        let bad = s.bad_reduction_set(128);
        assert_eq!(bad.points.len(), 1);
        assert_eq!(bad.points[0].rational, Some(rat(0)));
        let s = EllipticScheme::from_json(&SchemeJson { a: "0".into(), b: "-1".into(), c: "0".into(), section_x: "lambda".into() }).unwrap();
        let bad = s.bad_reduction_set(128);
        assert!(bad.points.is_empty() && !bad.bad_at_infinity);
        let s = EllipticScheme::from_json(&SchemeJson { a: "0".into(), b: "lambda^2 - 2".into(), c: "1".into(), section_x: "1/(lambda^2+1)".into() }).unwrap();
        let bad = s.bad_reduction_set(128);
        assert_eq!(bad.section_poles.len(), 2);
        assert!(bad.section_poles.iter().all(|p| p.irreducible && (p.height).abs() < 1e-12));
        assert!(EllipticScheme::from_json(&SchemeJson { a: "0".into(), b: "0".into(), c: "0".into(), section_x: "1".into() }).is_err());
    }

    #[test]
    fn specialize_legendre() {
        let s = EllipticScheme::legendre(2);
        let q = CyclotomicField::new(1);
        let t = FieldTower::linear(&CyclotomicNumber::from_int(&q, 2));
        let sp = s.specialize(&t, &t.generator()).unwrap();
        assert!(sp.y0_sq.is_zero());
        assert_eq!(sp.torsion_order(8).unwrap(), Some(2));
        let t0 = FieldTower::linear(&CyclotomicNumber::from_int(&q, 0));
        assert_eq!(s.specialize(&t0, &t0.generator()).unwrap_err(), SpecializeError::BadReduction);
        // λ = −4 + 4√2 in Q(ζ8): order 3, by both methods
        let k = CyclotomicField::new(8);
        let r2 = CyclotomicNumber::zeta_pow(&k, 1).add_ref(&CyclotomicNumber::zeta_pow(&k, 7));
        let lam = r2.mul_ref(&CyclotomicNumber::from_int(&k, 4)).sub_ref(&CyclotomicNumber::from_int(&k, 4));
        let t = FieldTower::linear(&lam);
        let sp = s.specialize(&t, &t.generator()).unwrap();
        assert_eq!(sp.torsion_order(10).unwrap(), Some(3));
        assert_eq!(sp.order_by_addition(10), Some(Some(3)));
        let (curve, p, _) = sp.point_with_y().unwrap();
        let p2 = curve.double(&p).unwrap();
        assert!(curve.add(&p2, &p).unwrap_or(CurvePoint::Infinity).is_infinity() || sp.order_by_addition(10) == Some(Some(3)));
        // λ = 3: no torsion up to 10
        let t3 = FieldTower::linear(&CyclotomicNumber::from_int(&q, 3));
        let sp = s.specialize(&t3, &t3.generator()).unwrap();
        assert_eq!(sp.torsion_order(10).unwrap(), None);
        assert_eq!(sp.order_by_addition(10), Some(None));
    }
}
