//! Curves `y² = x³ + a x² + b x + c` over an exact ring, with the
//! chord-tangent group law.

use crate::arith::ring::{InvError, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassCurve<R> {
    pub a: R,
    pub b: R,
    pub c: R,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurvePoint<R> {
    Infinity,
    Affine { x: R, y: R },
}

impl<R> CurvePoint<R> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

type Res<T, R> = Result<T, InvError<<R as Ring>::Split>>;

fn zero_test<R: Ring>(v: &R) -> Res<bool, R> {
    v.zero_test().map_err(InvError::ZeroDivisor)
}

impl<R: Ring> WeierstrassCurve<R> {
    pub fn new(a: R, b: R, c: R) -> Self {
        WeierstrassCurve { a, b, c }
    }

    /// `x³ + a x² + b x + c`
    pub fn cubic(&self, x: &R) -> R {
        x.add_ref(&self.a).mul_ref(x).add_ref(&self.b).mul_ref(x).add_ref(&self.c)
    }

    /// Discriminant of the cubic: `a²b² − 4b³ − 4a³c − 27c² + 18abc`.
    pub fn discriminant(&self) -> R {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let k = |n: i64| a.from_int_like(n);
        let ab = a.mul_ref(b);
        ab.square()
            .sub_ref(&k(4).mul_ref(&b.square().mul_ref(b)))
            .sub_ref(&k(4).mul_ref(&a.square().mul_ref(a).mul_ref(c)))
            .sub_ref(&k(27).mul_ref(&c.square()))
            .add_ref(&k(18).mul_ref(&ab).mul_ref(c))
    }

    pub fn is_on_curve(&self, p: &CurvePoint<R>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => y.square() == self.cubic(x),
        }
    }

    pub fn negate(&self, p: &CurvePoint<R>) -> CurvePoint<R> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: y.neg_ref() },
        }
    }

    pub fn add(&self, p: &CurvePoint<R>, q: &CurvePoint<R>) -> Res<CurvePoint<R>, R> {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return Ok(q.clone()),
            (_, CurvePoint::Infinity) => return Ok(p.clone()),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let dx = x2.sub_ref(x1);
        let slope = if zero_test(&dx)? {
            let sy = y1.add_ref(y2);
            if zero_test(&sy)? {
                return Ok(CurvePoint::Infinity);
            }
            // tangent: (3x² + 2ax + b) / 2y
            let k = |n: i64| x1.from_int_like(n);
            let num = k(3).mul_ref(&x1.square()).add_ref(&k(2).mul_ref(&self.a).mul_ref(x1)).add_ref(&self.b);
            num.try_div(&sy)?
        } else {
            y2.sub_ref(y1).try_div(&dx)?
        };
        let x3 = slope.square().sub_ref(&self.a).sub_ref(x1).sub_ref(x2);
        let y3 = slope.mul_ref(&x1.sub_ref(&x3)).sub_ref(y1);
        Ok(CurvePoint::Affine { x: x3, y: y3 })
    }

    pub fn double(&self, p: &CurvePoint<R>) -> Res<CurvePoint<R>, R> {
        self.add(p, p)
    }

    pub fn mul(&self, p: &CurvePoint<R>, mut k: u64) -> Res<CurvePoint<R>, R> {
        let mut acc = CurvePoint::Infinity;
        let mut b = p.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &b)?;
            }
            k >>= 1;
            if k > 0 {
                b = self.double(&b)?;
            }
        }
        Ok(acc)
    }

    /// Least `m <= t_max` with `mP = O`, by repeated addition.
    pub fn order_by_addition(&self, p: &CurvePoint<R>, t_max: u64) -> Res<Option<u64>, R> {
        let mut acc = p.clone();
        for m in 1..=t_max {
            if acc.is_infinity() {
                return Ok(Some(m));
            }
            if m < t_max {
                acc = self.add(&acc, p)?;
            }
        }
        Ok(None)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> WeierstrassCurve<S> {
        WeierstrassCurve { a: f(&self.a), b: f(&self.b), c: f(&self.c) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;
    use num_rational::BigRational;

    fn pt(x: i64, y: i64) -> CurvePoint<BigRational> {
        CurvePoint::Affine { x: rat(x), y: rat(y) }
    }

    #[test]
    fn group_law() {
        // y² = x³ − x
        let e = WeierstrassCurve::new(rat(0), rat(-1), rat(0));
        assert_eq!(e.discriminant(), rat(4));
        let p = pt(0, 0);
        assert!(e.is_on_curve(&p));
        assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert!(e.double(&p).unwrap().is_infinity());
        // y² = x³ + 1 has (2, 3) of order 6
        let e = WeierstrassCurve::new(rat(0), rat(0), rat(1));
        let p = pt(2, 3);
        assert_eq!(e.order_by_addition(&p, 10).unwrap(), Some(6));
        assert!(e.mul(&p, 6).unwrap().is_infinity());
        assert_eq!(e.mul(&p, 3).unwrap(), pt(-1, 0));
    }
}
