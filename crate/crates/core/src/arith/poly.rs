//! Dense univariate polynomials over a [`Ring`], coefficients low to high.

use std::convert::Infallible;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::ring::{InvError, Ring};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> fmt::Debug for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// `c * t^k`
    pub fn monomial(c: R, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![c.zero_like(); k];
        coeffs.push(c);
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&R> {
        self.coeffs.get(i)
    }

    pub fn is_monic(&self) -> bool {
        self.lead().map_or(false, |c| c.is_one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let Some(c0) = self.coeffs.first() else {
            return if e == 0 { panic!("0^0 on a context-free zero polynomial") } else { Poly::zero() };
        };
        let mut acc = Poly::constant(c0.one_like());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_ref(&c.from_int_like(i as i64)))
                .collect(),
        )
    }

    /// Horner evaluation at a point of the coefficient ring.
    pub fn eval(&self, x: &R) -> R {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    /// Horner evaluation in another ring through a coefficient map.
    pub fn eval_with<S: Ring>(&self, x: &S, embed: impl Fn(&R) -> S) -> S {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(&embed(c));
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Substitutes a polynomial for the variable.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Division with remainder; the divisor's leading coefficient must be a unit.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), InvError<R::Split>> {
        let dl = d.lead().ok_or(InvError::Zero)?;
        let inv = dl.try_inv()?;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let zero = rem[0].zero_like();
        let mut quo = vec![zero; rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = rem[k + dd].mul_ref(&inv);
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub_ref(&c.mul_ref(dc));
            }
            quo[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quo), Poly::new(rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, InvError<R::Split>> {
        Ok(self.divrem(d)?.1)
    }

    pub fn monic(&self) -> Result<Self, InvError<R::Split>> {
        match self.lead() {
            None => Ok(Poly::zero()),
            Some(l) => Ok(self.scale(&l.try_inv()?)),
        }
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Result<Self, InvError<R::Split>> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> Result<(Self, Self, Self), InvError<R::Split>> {
        let template = self
            .coeffs
            .first()
            .or_else(|| other.coeffs.first())
            .ok_or(InvError::Zero)?;
        let one = Poly::constant(template.one_like());
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (one.clone(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let l = r0.lead().ok_or(InvError::Zero)?.try_inv()?;
        Ok((r0.scale(&l), s0.scale(&l), t0.scale(&l)))
    }

    /// `self / gcd(self, self')`, made monic.
    pub fn squarefree_part(&self) -> Result<Self, InvError<R::Split>> {
        let g = self.gcd(&self.derivative())?;
        Ok(self.divrem(&g)?.0.monic()?)
    }
}

/// Polynomials over Q are used as the coefficient ring of the parameter line.
impl Ring for Poly<BigRational> {
    type Split = Infallible;

    fn zero_like(&self) -> Self {
        Poly::zero()
    }
    fn one_like(&self) -> Self {
        Poly::constant(BigRational::from_integer(1.into()))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn try_inv(&self) -> Result<Self, InvError<Infallible>> {
        match self.degree() {
            None => Err(InvError::Zero),
            Some(0) => Ok(Poly::constant(self.coeffs[0].recip())),
            // non-constant polynomials are not units; report as plain failure
            Some(_) => Err(InvError::Zero),
        }
    }
    fn from_bigint_like(&self, n: &num_bigint::BigInt) -> Self {
        Poly::new(vec![BigRational::from_integer(n.clone())])
    }
}

impl Poly<BigRational> {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    /// Clears denominators and content: primitive integer polynomial with
    /// positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<num_bigint::BigInt> {
        use num_integer::Integer;
        use num_traits::{One, Signed};
        let mut l = num_bigint::BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<num_bigint::BigInt> =
            self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        let mut g = num_bigint::BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if !g.is_zero() {
            let neg = ints.last().map_or(false, |c| c.is_negative());
            for c in &mut ints {
                *c = &*c / &g;
                if neg {
                    *c = -&*c;
                }
            }
        }
        ints
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;

    #[test]
    fn divrem_and_gcd_over_q() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = Poly::from_ints(&[-2, 1, 1]);
        let b = Poly::from_ints(&[3, -4, 1]);
        let g = a.gcd(&b).unwrap();
        assert_eq!(g, Poly::from_ints(&[-1, 1]));
        let (q, r) = a.divrem(&g).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_ints(&[2, 1]));
    }

    #[test]
    fn xgcd_bezout_identity() {
        let a = Poly::from_ints(&[1, 0, 1]);
        let b = Poly::from_ints(&[-1, 1]);
        let (g, s, t) = a.xgcd(&b).unwrap();
        assert_eq!(g, Poly::constant(rat(1)));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn squarefree_part_strips_repeated_factor() {
        // (y-1)^2 (y+1)
        let p = Poly::from_ints(&[-1, 1]).pow(2).mul(&Poly::from_ints(&[1, 1]));
        assert_eq!(p.squarefree_part().unwrap(), Poly::from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn compose_and_eval_agree() {
        let p = Poly::from_ints(&[1, 2, 3]);
        let q = Poly::from_ints(&[0, 0, 1]);
        let c = p.compose(&q);
        assert_eq!(c.eval(&rat(2)), p.eval(&rat(4)));
    }
}
