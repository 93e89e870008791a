//! Minimal ring abstraction shared by the exact layers.
//!
//! Elements carry their own context (a modulus, a field handle), so the
//! constructors for constants take a template element rather than being
//! associated functions.

use std::convert::Infallible;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Failure of an inversion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvError<S: fmt::Debug> {
    #[error("division by zero")]
    Zero,
    /// The element is a nonzero zero divisor; the payload is evidence that
    /// lets the caller split the ambient ring.
    #[error("zero divisor: {0:?}")]
    ZeroDivisor(S),
}

impl<S: fmt::Debug> InvError<S> {
    pub fn map_split<T: fmt::Debug>(self, f: impl FnOnce(S) -> T) -> InvError<T> {
        match self {
            InvError::Zero => InvError::Zero,
            InvError::ZeroDivisor(s) => InvError::ZeroDivisor(f(s)),
        }
    }
}

pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Evidence produced when a nonzero element turns out not to be a unit.
    type Split: Clone + fmt::Debug + Send + Sync;

    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn try_inv(&self) -> Result<Self, InvError<Self::Split>>;

    /// `Ok(true)` if zero, `Ok(false)` if a unit, `Err` if a zero divisor.
    fn zero_test(&self) -> Result<bool, Self::Split> {
        Ok(self.is_zero())
    }

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn from_int_like(&self, n: i64) -> Self {
        self.from_bigint_like(&BigInt::from(n))
    }

    fn from_bigint_like(&self, n: &BigInt) -> Self {
        // double-and-add keeps this generic over rings without a Z-embedding
        let one = self.one_like();
        let mut acc = self.zero_like();
        let mut base = one;
        let mut k = n.abs();
        while !k.is_zero() {
            if (&k & BigInt::one()).is_one() {
                acc = acc.add_ref(&base);
            }
            base = base.add_ref(&base);
            k >>= 1;
        }
        if n.is_negative() {
            acc.neg_ref()
        } else {
            acc
        }
    }

    fn square(&self) -> Self {
        self.mul_ref(self)
    }

    fn pow_u64(&self, mut e: u64) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    fn try_div(&self, other: &Self) -> Result<Self, InvError<Self::Split>> {
        Ok(self.mul_ref(&other.try_inv()?))
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring<Split = Infallible> {
    fn inv(&self) -> Option<Self> {
        self.try_inv().ok()
    }
}

impl Ring for BigRational {
    type Split = Infallible;

    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Result<Self, InvError<Infallible>> {
        if Zero::is_zero(self) {
            Err(InvError::Zero)
        } else {
            Ok(self.recip())
        }
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl Field for BigRational {}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` (no decimal point, optional sign).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
