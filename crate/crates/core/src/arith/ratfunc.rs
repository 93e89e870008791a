//! Rational functions in one variable over Q.

use std::convert::Infallible;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::expr::{self, Expr, ExprError};
use super::poly::Poly;
use super::ring::{format_rational, Field, InvError, Ring};

pub type QPoly = Poly<BigRational>;

/// `num/den` in lowest terms with `den` monic.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: QPoly,
    den: QPoly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn poly_string(p: &QPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if Zero::is_zero(c) {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        if k == 0 {
            out.push_str(&format_rational(&a));
        } else if One::is_one(&a) {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{}*{}", format_rational(&a), mono));
        }
    }
    out
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = poly_string(&self.num, "lambda");
        if self.den.degree() == Some(0) {
            write!(f, "{n}")
        } else {
            write!(f, "({n})/({})", poly_string(&self.den, "lambda"))
        }
    }
}

impl RationalFunction {
    pub fn new(num: QPoly, den: QPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let g = num.gcd(&den).unwrap_or_else(|e| match e {
            InvError::Zero => den.monic().unwrap(),
            InvError::ZeroDivisor(n) => match n {},
        });
        let g = if g.is_zero() { den.monic().unwrap() } else { g };
        let num = num.divrem(&g).unwrap().0;
        let den = den.divrem(&g).unwrap().0;
        let l = den.lead().unwrap().clone();
        let li = l.recip();
        Some(RationalFunction { num: num.scale(&li), den: den.scale(&li) })
    }

    pub fn from_poly(p: QPoly) -> Self {
        RationalFunction { num: p, den: Poly::constant(BigRational::one()) }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn param() -> Self {
        Self::from_poly(Poly::monomial(BigRational::one(), 1))
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree() == Some(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// `deg num - deg den` (the order of the pole at infinity when positive).
    pub fn degree_at_infinity(&self) -> Option<i64> {
        Some(self.num.degree()? as i64 - self.den.degree().unwrap() as i64)
    }

    pub fn parse(s: &str) -> Result<Self, ExprError> {
        let e = expr::parse(s)?;
        if e.conductor() != 1 {
            return Err(ExprError::Disallowed("roots of unity in a rational function over Q".into()));
        }
        e.eval(&Self::constant(BigRational::zero()), &|leaf| match leaf {
            Expr::Param => Ok(Self::param()),
            _ => unreachable!(),
        })
    }

    /// Evaluates at `x` in any ring; fails when the denominator is not
    /// invertible there.
    pub fn eval_in<R: Ring>(&self, x: &R, embed: impl Fn(&BigRational) -> R) -> Result<R, InvError<R::Split>> {
        let n = self.num.eval_with(x, &embed);
        let d = self.den.eval_with(x, &embed);
        n.try_div(&d)
    }

    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x);
        if Zero::is_zero(&d) {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn compose(&self, inner: &RationalFunction) -> Option<Self> {
        // substitute num/den of inner and clear the common power of its denominator
        let n = self.num.degree().unwrap_or(0);
        let d = self.den.degree().unwrap_or(0);
        let k = n.max(d);
        let hom = |p: &QPoly| {
            let mut acc = Poly::zero();
            for (i, c) in p.coeffs().iter().enumerate() {
                let t = inner.num.pow(i as u32).mul(&inner.den.pow((k - i) as u32)).scale(c);
                acc = acc.add(&t);
            }
            acc
        };
        RationalFunction::new(hom(&self.num), hom(&self.den))
    }
}

impl Ring for RationalFunction {
    type Split = Infallible;

    fn zero_like(&self) -> Self {
        Self::constant(BigRational::zero())
    }
    fn one_like(&self) -> Self {
        Self::constant(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).unwrap()
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).sub(&o.num.mul(&self.den)), self.den.mul(&o.den)).unwrap()
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }
    fn neg_ref(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }
    fn try_inv(&self) -> Result<Self, InvError<Infallible>> {
        if self.num.is_zero() {
            return Err(InvError::Zero);
        }
        Ok(Self::new(self.den.clone(), self.num.clone()).unwrap())
    }
    fn from_bigint_like(&self, n: &num_bigint::BigInt) -> Self {
        Self::constant(BigRational::from_integer(n.clone()))
    }
}

impl Field for RationalFunction {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;

    #[test]
    fn parse_and_reduce() {
        let f = RationalFunction::parse("(lambda^2 - 1)/(lambda - 1)").unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.num(), &Poly::from_ints(&[1, 1]));
        let g = RationalFunction::parse("(lambda^2+1)/lambda").unwrap();
        assert_eq!(g.eval_rational(&rat(2)), Some(crate::arith::ring::ratio(5, 2)));
        assert_eq!(g.eval_rational(&rat(0)), None);
        assert_eq!(g.to_string(), "(lambda^2 + 1)/(lambda)");
        assert!(RationalFunction::parse("z3").is_err());
        let h = g.compose(&RationalFunction::parse("2*lambda").unwrap()).unwrap();
        assert_eq!(h.eval_rational(&rat(1)), Some(crate::arith::ring::ratio(5, 2)));
    }
}
