//! Quotient rings `R[t]/(m)` for a monic modulus over a field `R`.
//!
//! When `m` is reducible the quotient is a product of fields; inverting a
//! zero divisor then yields the nontrivial monic factor `gcd(a, m)`, which is
//! the evidence callers use to split the ring (dynamic evaluation).

use std::fmt;
use std::sync::Arc;

use super::poly::Poly;
use super::ring::{Field, InvError, Ring};

#[derive(Clone, PartialEq, Eq)]
pub struct QuotientRing<R> {
    modulus: Poly<R>,
}

impl<R: Field> fmt::Debug for QuotientRing<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R[t]/({:?})", self.modulus)
    }
}

impl<R: Field> QuotientRing<R> {
    /// `modulus` must be monic of positive degree.
    pub fn new(modulus: Poly<R>) -> Arc<Self> {
        assert!(modulus.is_monic() && modulus.degree().unwrap_or(0) >= 1, "modulus must be monic, degree >= 1");
        Arc::new(QuotientRing { modulus })
    }

    pub fn modulus(&self) -> &Poly<R> {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    fn template(&self) -> &R {
        self.modulus.lead().unwrap()
    }

    pub fn element(self: &Arc<Self>, rep: Poly<R>) -> QElem<R> {
        let rep = rep.rem(&self.modulus).unwrap_or_else(|_| unreachable!());
        QElem { ring: Arc::clone(self), rep }
    }

    pub fn from_base(self: &Arc<Self>, c: R) -> QElem<R> {
        self.element(Poly::constant(c))
    }

    /// The class of `t`.
    pub fn generator(self: &Arc<Self>) -> QElem<R> {
        self.element(Poly::monomial(self.template().one_like(), 1))
    }

    pub fn zero(self: &Arc<Self>) -> QElem<R> {
        QElem { ring: Arc::clone(self), rep: Poly::zero() }
    }

    pub fn one(self: &Arc<Self>) -> QElem<R> {
        self.from_base(self.template().one_like())
    }
}

#[derive(Clone)]
pub struct QElem<R> {
    ring: Arc<QuotientRing<R>>,
    rep: Poly<R>,
}

impl<R: Field> PartialEq for QElem<R> {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring) && self.rep == other.rep
    }
}

impl<R: Field> fmt::Debug for QElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.rep)
    }
}

impl<R: Field> QElem<R> {
    pub fn ring(&self) -> &Arc<QuotientRing<R>> {
        &self.ring
    }

    pub fn rep(&self) -> &Poly<R> {
        &self.rep
    }

    /// Coefficients padded to the ring degree.
    pub fn dense_coeffs(&self) -> Vec<R> {
        let n = self.ring.degree();
        let z = self.ring.template().zero_like();
        (0..n).map(|i| self.rep.coeff(i).cloned().unwrap_or_else(|| z.clone())).collect()
    }

    fn same_ring(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "mixing elements of different quotient rings"
        );
    }
}

impl<R: Field> Ring for QElem<R> {
    type Split = Poly<R>;

    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        self.ring.one()
    }
    fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.same_ring(other);
        QElem { ring: Arc::clone(&self.ring), rep: self.rep.add(&other.rep) }
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.same_ring(other);
        QElem { ring: Arc::clone(&self.ring), rep: self.rep.sub(&other.rep) }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.same_ring(other);
        self.ring.element(self.rep.mul(&other.rep))
    }
    fn neg_ref(&self) -> Self {
        QElem { ring: Arc::clone(&self.ring), rep: self.rep.neg() }
    }
    fn try_inv(&self) -> Result<Self, InvError<Poly<R>>> {
        if self.rep.is_zero() {
            return Err(InvError::Zero);
        }
        let (g, s, _) = self
            .rep
            .xgcd(&self.ring.modulus)
            .map_err(|e| e.map_split(|never| match never {}))?;
        if g.degree() == Some(0) {
            Ok(self.ring.element(s))
        } else {
            Err(InvError::ZeroDivisor(g))
        }
    }
    fn zero_test(&self) -> Result<bool, Poly<R>> {
        if self.rep.is_zero() {
            return Ok(true);
        }
        if self.ring.degree() == 1 {
            return Ok(false);
        }
        let g = self.rep.gcd(&self.ring.modulus).map_err(|e| match e {
            InvError::Zero => unreachable!(),
            InvError::ZeroDivisor(never) => match never {},
        })?;
        if g.degree() == Some(0) {
            Ok(false)
        } else {
            Err(g)
        }
    }
    fn from_bigint_like(&self, n: &num_bigint::BigInt) -> Self {
        self.ring.from_base(self.ring.template().from_bigint_like(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::{rat, ratio};

    #[test]
    fn sqrt2_inverse() {
        let ring = QuotientRing::new(Poly::from_ints(&[-2, 0, 1]));
        let y = ring.generator();
        assert_eq!(y.mul_ref(&y), ring.from_base(rat(2)));
        let inv = y.try_inv().unwrap();
        assert_eq!(inv, ring.generator().mul_ref(&ring.from_base(ratio(1, 2))));
    }

    #[test]
    fn zero_divisor_reports_factor() {
        // Q[t]/((t-1)(t+1)); t-1 is a zero divisor
        let ring = QuotientRing::new(Poly::from_ints(&[-1, 0, 1]));
        let e = ring.generator().sub_ref(&ring.one());
        match e.try_inv() {
            Err(InvError::ZeroDivisor(g)) => assert_eq!(g, Poly::from_ints(&[-1, 1])),
            other => panic!("expected zero divisor, got {other:?}"),
        }
        assert!(e.zero_test().is_err());
    }
}
