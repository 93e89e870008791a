//! `Q(zeta_N)` as `Q[x]/Phi_N`, with elements stored as an integer numerator
//! vector over one positive common denominator.

use std::convert::Infallible;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::poly::Poly;
use crate::arith::ring::{format_rational, parse_rational, Field, InvError, Ring};
use crate::precise::{Complex, Real};

pub fn euler_phi(x: u64) -> u64 {
    assert!(x >= 1);
    let mut n = x;
    let mut r = x;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=((n as f64).sqrt() as u64 + 1)).filter(|d| d * d <= n && n % d == 0).flat_map(|d| [d, n / d]).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Exact division by a monic integer polynomial (remainder must vanish).
fn int_div_exact(a: &[BigInt], d: &[BigInt]) -> Vec<BigInt> {
    let dd = d.len() - 1;
    let mut rem = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len() - dd];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in d.iter().enumerate() {
            rem[k + j] -= &c * dc;
        }
        quo[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quo
}

/// The `n`-th cyclotomic polynomial, coefficients low to high.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let xd1 = |d: u64| {
        let mut v = vec![BigInt::zero(); d as usize + 1];
        v[0] = BigInt::from(-1);
        v[d as usize] = BigInt::one();
        v
    };
    let mut num = vec![BigInt::one()];
    let mut den = vec![BigInt::one()];
    for d in divisors(n) {
        match mobius(n / d) {
            1 => num = int_mul(&num, &xd1(d)),
            -1 => den = int_mul(&den, &xd1(d)),
            _ => {}
        }
    }
    // the denominator is monic up to sign
    if den.last().unwrap().is_negative() {
        den.iter_mut().for_each(|c| *c = -c.clone());
        num.iter_mut().for_each(|c| *c = -c.clone());
    }
    int_div_exact(&num, &den)
}

#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    n: u64,
    degree: usize,
    modulus: Vec<BigInt>,
}

impl CyclotomicField {
    pub fn new(n: u64) -> Arc<CyclotomicField> {
        let modulus = cyclotomic_polynomial(n);
        Arc::new(CyclotomicField { n, degree: modulus.len() - 1, modulus })
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    /// Reduces an integer polynomial of any length modulo `Phi_N`.
    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        for k in (d..v.len()).rev() {
            let c = std::mem::take(&mut v[k]);
            if c.is_zero() {
                continue;
            }
            for j in 0..d {
                v[k - d + j] -= &c * &self.modulus[j];
            }
        }
        v.resize(d, BigInt::zero());
        v
    }

    /// Units `j` of `Z/N` indexing the embeddings and automorphisms.
    pub fn units(&self) -> Vec<u64> {
        if self.n == 1 {
            return vec![1];
        }
        (1..self.n).filter(|j| j.gcd(&self.n) == 1).collect()
    }
}

#[derive(Clone)]
pub struct CyclotomicNumber {
    field: Arc<CyclotomicField>,
    num: Vec<BigInt>,
    den: BigInt,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("coefficient vector has length {got}, field degree is {want}")]
    BadLength { got: usize, want: usize },
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("embedding index {j} is not a unit modulo {n}")]
    BadEmbedding { j: u64, n: u64 },
    #[error("field of conductor {from} does not embed in conductor {to}")]
    NotSubfield { from: u64, to: u64 },
}

impl CyclotomicNumber {
    /// Parses an expression in roots of unity such as `z5 + z5^-1` or
    /// `-4 + 4(z8 + z8^7)`, in the smallest cyclotomic field containing it.
    pub fn parse(s: &str) -> Result<Self, crate::arith::expr::ExprError> {
        use crate::arith::expr::{self, Expr, ExprError};
        let e = expr::parse(s)?;
        if e.uses_param() {
            return Err(ExprError::Disallowed("the parameter".into()));
        }
        let field = CyclotomicField::new(e.conductor());
        let n = field.conductor();
        e.eval(&CyclotomicNumber::zero(&field), &|leaf| match leaf {
            Expr::Zeta(k) => Ok(CyclotomicNumber::zeta_pow(&field, (n / k) as i64)),
            _ => Err(ExprError::Disallowed("the parameter".into())),
        })
    }

    fn make(field: Arc<CyclotomicField>, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        let (num, den) = if g.is_one() { (num, den) } else { (num.into_iter().map(|c| c / &g).collect(), den / &g) };
        let (num, den) = if den.is_negative() { (num.into_iter().map(|c| -c).collect(), -den) } else { (num, den) };
        CyclotomicNumber { field, num, den }
    }

    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        CyclotomicNumber { field: field.clone(), num: vec![BigInt::zero(); field.degree], den: BigInt::one() }
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, r: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.degree];
        num[0] = r.numer().clone();
        Self::make(field.clone(), num, r.denom().clone())
    }

    pub fn from_int(field: &Arc<CyclotomicField>, v: i64) -> Self {
        Self::from_rational(field, &BigRational::from_integer(v.into()))
    }

    /// `zeta_N^k`
    pub fn zeta_pow(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let n = field.n as i64;
        let k = k.rem_euclid(n) as usize;
        let mut v = vec![BigInt::zero(); k.max(field.degree) + 1];
        v[k] = BigInt::one();
        CyclotomicNumber { field: field.clone(), num: field.reduce(v), den: BigInt::one() }
    }

    /// Sum of `zeta_N^{k}` over a multiset of exponents, computed exactly.
    pub fn sum_of_powers(field: &Arc<CyclotomicField>, exps: &[i64]) -> Self {
        let n = field.n as usize;
        let mut v = vec![BigInt::zero(); n.max(field.degree + 1)];
        for &k in exps {
            v[k.rem_euclid(n as i64) as usize] += 1;
        }
        CyclotomicNumber { field: field.clone(), num: field.reduce(v), den: BigInt::one() }
    }

    pub fn from_coeffs(field: &Arc<CyclotomicField>, coeffs: &[BigRational]) -> Result<Self, CyclotomicError> {
        if coeffs.len() != field.degree {
            return Err(CyclotomicError::BadLength { got: coeffs.len(), want: field.degree });
        }
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(Self::make(field.clone(), num, den))
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(|c| c.is_zero()) {
            Some(BigRational::new(self.num.first().cloned().unwrap_or_default(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn as_poly(&self) -> Poly<BigRational> {
        Poly::new(self.coeffs())
    }

    /// Image under `zeta -> zeta^j`.
    pub fn galois(&self, j: u64) -> Self {
        let n = self.field.n;
        let mut v = vec![BigInt::zero(); (n as usize).max(self.field.degree + 1)];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                v[((i as u64 * j) % n.max(1)) as usize] += c;
            }
        }
        CyclotomicNumber { field: self.field.clone(), num: self.field.reduce(v), den: self.den.clone() }
    }

    /// The same number inside `Q(zeta_M)`, `N | M`.
    pub fn lift(&self, target: &Arc<CyclotomicField>) -> Result<Self, CyclotomicError> {
        let (n, m) = (self.field.n, target.n);
        if m % n != 0 {
            return Err(CyclotomicError::NotSubfield { from: n, to: m });
        }
        let step = (m / n) as usize;
        let mut v = vec![BigInt::zero(); (m as usize).max(target.degree + 1)];
        for (i, c) in self.num.iter().enumerate() {
            v[(i * step) % m as usize] += c;
        }
        Ok(CyclotomicNumber { field: target.clone(), num: target.reduce(v), den: self.den.clone() })
    }

    /// Galois conjugates, one per unit `j`, deduplicated and sorted by `j`.
    pub fn distinct_conjugates(&self) -> Vec<(u64, Self)> {
        let mut out: Vec<(u64, Self)> = Vec::new();
        for j in self.field.units() {
            let c = self.galois(j);
            if !out.iter().any(|(_, d)| *d == c) {
                out.push((j, c));
            }
        }
        out
    }

    pub fn degree_over_q(&self) -> usize {
        if self.as_rational().is_some() {
            return 1;
        }
        self.distinct_conjugates().len()
    }

    /// Minimal polynomial over Q (monic, rational coefficients).
    pub fn minimal_polynomial(&self) -> Poly<BigRational> {
        let conj = self.distinct_conjugates();
        let one = CyclotomicNumber::from_int(&self.field, 1);
        let mut acc = Poly::constant(one.clone());
        for (_, c) in conj {
            acc = acc.mul(&Poly::new(vec![c.neg_ref(), one.clone()]));
        }
        Poly::new(acc.coeffs().iter().map(|c| c.as_rational().expect("symmetric function is rational")).collect())
    }

    /// Value under `zeta -> e^{2 pi i j / N}`, accurate to about `2^{-prec+8}`
    /// relative to the coefficient size.
    pub fn embed(&self, j: u64, prec: u32) -> Result<Complex, CyclotomicError> {
        let n = self.field.n;
        if j.gcd(&n) != 1 {
            return Err(CyclotomicError::BadEmbedding { j, n });
        }
        let wp = prec + 16 + 2 * (self.field.degree as f64).log2().ceil() as u32;
        let w = Complex::root_of_unity(j as i64, n, wp);
        let mut acc = Complex::zero(wp);
        // Horner in zeta
        for c in self.num.iter().rev() {
            acc = acc.mul(&w).add(&Complex::from_real(Real::from_bigint(c, wp)));
        }
        let d = Real::from_bigint(&self.den, wp);
        Ok(Complex::new(acc.re.div(&d), acc.im.div(&d)).with_prec(prec))
    }

    pub fn to_json(&self) -> CyclotomicJson {
        CyclotomicJson { n: self.field.n, coeffs: self.coeffs().iter().map(format_rational).collect() }
    }

    pub fn from_json(j: &CyclotomicJson) -> Result<Self, CyclotomicError> {
        let field = CyclotomicField::new(j.n);
        let coeffs = j
            .coeffs
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| CyclotomicError::BadRational(s.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(&field, &coeffs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub coeffs: Vec<String>,
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, o: &Self) -> bool {
        self.field.n == o.field.n && self.den == o.den && self.num == o.num
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs().iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            let cs = format_rational(c);
            terms.push(match i {
                0 => cs,
                _ => {
                    let z = if i == 1 { format!("z{}", self.field.n) } else { format!("z{}^{}", self.field.n, i) };
                    match cs.as_str() {
                        "1" => z,
                        "-1" => format!("-{z}"),
                        _ => format!("{cs}*{z}"),
                    }
                }
            });
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
    }
}

impl Ring for CyclotomicNumber {
    type Split = Infallible;

    fn zero_like(&self) -> Self {
        Self::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        Self::from_int(&self.field, 1)
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }
    fn add_ref(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field.n, o.field.n);
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(a, b)| a + b).collect();
            return Self::make(self.field.clone(), num, self.den.clone());
        }
        let num = self.num.iter().zip(&o.num).map(|(a, b)| a * &o.den + b * &self.den).collect();
        Self::make(self.field.clone(), num, &self.den * &o.den)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self.add_ref(&o.neg_ref())
    }
    fn mul_ref(&self, o: &Self) -> Self {
        debug_assert_eq!(self.field.n, o.field.n);
        let prod = int_mul(&self.num, &o.num);
        Self::make(self.field.clone(), self.field.reduce(prod), &self.den * &o.den)
    }
    fn neg_ref(&self) -> Self {
        CyclotomicNumber { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
    fn try_inv(&self) -> Result<Self, InvError<Infallible>> {
        if Ring::is_zero(self) {
            return Err(InvError::Zero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, &r.recip()));
        }
        let m = Poly::new(self.field.modulus.iter().map(|c| BigRational::from_integer(c.clone())).collect());
        let (_, s, _) = self.as_poly().xgcd(&m).expect("Phi_N is irreducible");
        let mut c = s.into_coeffs();
        c.resize(self.field.degree, BigRational::zero());
        Ok(Self::from_coeffs(&self.field, &c).unwrap())
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        Self::from_rational(&self.field, &BigRational::from_integer(n.clone()))
    }
}

impl Field for CyclotomicNumber {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_expressions() {
        let a = CyclotomicNumber::parse("z5 + z5^-1").unwrap();
        let mp: Vec<String> = a.minimal_polynomial().coeffs().iter().map(format_rational).collect();
        assert_eq!(mp, ["-1", "1", "1"]);
        let b = CyclotomicNumber::parse("-4 + 4(z8 + z8^7)").unwrap();
        let mp: Vec<String> = b.minimal_polynomial().coeffs().iter().map(format_rational).collect();
        assert_eq!(mp, ["-16", "8", "1"]);
        assert_eq!(CyclotomicNumber::parse("3/2").unwrap().as_rational(), Some(BigRational::new(3.into(), 2.into())));
        assert!(CyclotomicNumber::parse("lambda").is_err());
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(105)[7], BigInt::from(-2));
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(97), 96);
    }

    #[test]
    fn arithmetic_and_conjugates() {
        let k = CyclotomicField::new(8);
        let s = CyclotomicNumber::zeta_pow(&k, 1).add_ref(&CyclotomicNumber::zeta_pow(&k, 7));
        assert_eq!(s.mul_ref(&s), CyclotomicNumber::from_int(&k, 2));
        assert_eq!(s.degree_over_q(), 2);
        assert_eq!(s.minimal_polynomial(), Poly::from_ints(&[-2, 0, 1]));
        let inv = s.try_inv().unwrap();
        assert!(inv.mul_ref(&s).is_one());
        let z5 = CyclotomicNumber::zeta_pow(&CyclotomicField::new(5), 1);
        assert_eq!(z5.degree_over_q(), 4);
        let l = s.lift(&CyclotomicField::new(24)).unwrap();
        assert_eq!(l.mul_ref(&l), CyclotomicNumber::from_int(&CyclotomicField::new(24), 2));
        let e = s.embed(1, 128).unwrap();
        assert!((e.re.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(e.im.magnitude() < -110);
        let j = s.to_json();
        assert_eq!(CyclotomicNumber::from_json(&j).unwrap(), s);
        assert_eq!(s.to_string(), "z8 - z8^3");
    }
}
