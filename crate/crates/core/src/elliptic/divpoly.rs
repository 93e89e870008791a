//! Division polynomials for `y² = x³ + a x² + b x + c`.
//!
//! We store `f_m`, with `ψ_m = f_m` for odd `m` and `ψ_m = ψ_2 f_m` for even
//! `m`, where `ψ_2 = 2y`. Writing `F = ψ_2² = 4(x³ + a x² + b x + c)` the
//! usual recurrences become polynomial in `x` alone:
//!
//! ```text
//! f_{2k+1} = F² f_{k+2} f_k³ − f_{k−1} f_{k+1}³     (k even)
//! f_{2k+1} = f_{k+2} f_k³ − F² f_{k−1} f_{k+1}³     (k odd)
//! f_{2k}   = f_k (f_{k+2} f_{k−1}² − f_{k−2} f_{k+1}²)
//! ```
//!
//! For an affine point `P = (x0, y0)`: `mP = O` iff `f_m(x0) = 0`, or `m`
//! is even and `y0 = 0`. Only `x0` and `y0²` enter.

use crate::arith::poly::Poly;
use crate::arith::ring::Ring;

use super::curve::WeierstrassCurve;

/// The `b`-invariants `(b2, b4, b6, b8)` of the curve.
fn b_invariants<R: Ring>(e: &WeierstrassCurve<R>) -> (R, R, R, R) {
    let k = |n: i64| e.a.from_int_like(n);
    let b2 = k(4).mul_ref(&e.a);
    let b4 = k(2).mul_ref(&e.b);
    let b6 = k(4).mul_ref(&e.c);
    let b8 = k(4).mul_ref(&e.a).mul_ref(&e.c).sub_ref(&e.b.square());
    (b2, b4, b6, b8)
}

fn f3_coeffs<R: Ring>(e: &WeierstrassCurve<R>) -> Vec<R> {
    let k = |n: i64| e.a.from_int_like(n);
    let (b2, b4, b6, b8) = b_invariants(e);
    vec![b8, k(3).mul_ref(&b6), k(3).mul_ref(&b4), b2, k(3)]
}

fn f4_coeffs<R: Ring>(e: &WeierstrassCurve<R>) -> Vec<R> {
    let k = |n: i64| e.a.from_int_like(n);
    let (b2, b4, b6, b8) = b_invariants(e);
    vec![
        b4.mul_ref(&b8).sub_ref(&b6.square()),
        b2.mul_ref(&b8).sub_ref(&b4.mul_ref(&b6)),
        k(10).mul_ref(&b8),
        k(10).mul_ref(&b6),
        k(5).mul_ref(&b4),
        b2,
        k(2),
    ]
}

/// Shared recurrence driver over any ring of "values" (polynomials or
/// evaluations).
struct Recurrence<T> {
    f: Vec<T>,
    big_f_sq: T,
}

impl<T: Ring> Recurrence<T> {
    fn new(f0: T, f1: T, f2: T, f3: T, f4: T, big_f: &T) -> Self {
        Recurrence { f: vec![f0, f1, f2, f3, f4], big_f_sq: big_f.square() }
    }

    fn extend_to(&mut self, m: usize) {
        while self.f.len() <= m {
            let n = self.f.len();
            let f = &self.f;
            let v = if n % 2 == 1 {
                let k = (n - 1) / 2;
                let a = f[k + 2].mul_ref(&f[k].square().mul_ref(&f[k]));
                let b = f[k - 1].mul_ref(&f[k + 1].square().mul_ref(&f[k + 1]));
                if k % 2 == 0 {
                    self.big_f_sq.mul_ref(&a).sub_ref(&b)
                } else {
                    a.sub_ref(&self.big_f_sq.mul_ref(&b))
                }
            } else {
                let k = n / 2;
                let inner = f[k + 2].mul_ref(&f[k - 1].square()).sub_ref(&f[k - 2].mul_ref(&f[k + 1].square()));
                f[k].mul_ref(&inner)
            };
            self.f.push(v);
        }
    }
}

/// `ψ_m` as `f` times `ψ_2` when `y_factor` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisionPolynomial<R: Ring> {
    pub m: u64,
    pub f: Poly<R>,
    pub y_factor: bool,
}

/// Memoized table of `f_m` as polynomials in `x`.
pub struct DivisionPolynomials<R: Ring> {
    rec: Recurrence<PolyRing<R>>,
    psi2_sq: Poly<R>,
}

/// Newtype so that `Poly<R>` can drive the generic recurrence.
#[derive(Debug, Clone, PartialEq)]
struct PolyRing<R: Ring>(Poly<R>, R);

impl<R: Ring> Ring for PolyRing<R> {
    type Split = R::Split;
    fn zero_like(&self) -> Self {
        PolyRing(Poly::zero(), self.1.clone())
    }
    fn one_like(&self) -> Self {
        PolyRing(Poly::constant(self.1.one_like()), self.1.clone())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add_ref(&self, o: &Self) -> Self {
        PolyRing(self.0.add(&o.0), self.1.clone())
    }
    fn sub_ref(&self, o: &Self) -> Self {
        PolyRing(self.0.sub(&o.0), self.1.clone())
    }
    fn mul_ref(&self, o: &Self) -> Self {
        PolyRing(self.0.mul(&o.0), self.1.clone())
    }
    fn neg_ref(&self) -> Self {
        PolyRing(self.0.neg(), self.1.clone())
    }
    fn try_inv(&self) -> Result<Self, crate::arith::ring::InvError<R::Split>> {
        Err(crate::arith::ring::InvError::Zero)
    }
}

impl<R: Ring> DivisionPolynomials<R> {
    pub fn new(e: &WeierstrassCurve<R>) -> Self {
        let t = e.a.clone();
        let p = |c: Vec<R>| PolyRing(Poly::new(c), t.clone());
        let cubic = Poly::new(vec![e.c.clone(), e.b.clone(), e.a.clone(), t.one_like()]);
        let psi2_sq = cubic.scale(&t.from_int_like(4));
        let rec = Recurrence::new(
            p(vec![]),
            p(vec![t.one_like()]),
            p(vec![t.one_like()]),
            p(f3_coeffs(e)),
            p(f4_coeffs(e)),
            &PolyRing(psi2_sq.clone(), t.clone()),
        );
        DivisionPolynomials { rec, psi2_sq }
    }

    /// `ψ_2² = 4(x³ + a x² + b x + c)`.
    pub fn psi2_squared(&self) -> &Poly<R> {
        &self.psi2_sq
    }

    pub fn get(&mut self, m: u64) -> DivisionPolynomial<R> {
        self.rec.extend_to(m as usize);
        DivisionPolynomial { m, f: self.rec.f[m as usize].0.clone(), y_factor: m % 2 == 0 }
    }
}

pub fn division_polynomial<R: Ring>(e: &WeierstrassCurve<R>, m: u64) -> DivisionPolynomial<R> {
    DivisionPolynomials::new(e).get(m)
}

/// Values `f_m(x0)` computed by running the recurrence on evaluations.
pub struct DivisionValues<R: Ring> {
    rec: Recurrence<R>,
    y0_sq: R,
}

impl<R: Ring> DivisionValues<R> {
    pub fn new(e: &WeierstrassCurve<R>, x0: &R, y0_sq: &R) -> Self {
        let ev = |c: Vec<R>| Poly::new(c).eval(x0);
        let four = x0.from_int_like(4);
        let rec = Recurrence::new(x0.zero_like(), x0.one_like(), x0.one_like(), ev(f3_coeffs(e)), ev(f4_coeffs(e)), &four.mul_ref(y0_sq));
        DivisionValues { rec, y0_sq: y0_sq.clone() }
    }

    pub fn f(&mut self, m: u64) -> &R {
        self.rec.extend_to(m as usize);
        &self.rec.f[m as usize]
    }

    pub fn y0_sq(&self) -> &R {
        &self.y0_sq
    }

    /// The quantity whose vanishing decides `mP = O`: `f_m(x0)`, and for
    /// even `m` also `y0²`. Returns the `f_m` value.
    pub fn kills(&mut self, m: u64) -> Result<bool, R::Split> {
        if m == 0 {
            return Ok(true);
        }
        if m % 2 == 0 && self.y0_sq.zero_test()? {
            return Ok(true);
        }
        if m == 1 {
            return Ok(false);
        }
        let v = self.f(m).clone();
        v.zero_test()
    }
}

/// Least `m <= t_max` with `mP = O` for `P = (x0, ±sqrt(y0_sq))`.
pub fn torsion_order_x<R: Ring>(e: &WeierstrassCurve<R>, x0: &R, y0_sq: &R, t_max: u64) -> Result<Option<u64>, R::Split> {
    let mut dv = DivisionValues::new(e, x0, y0_sq);
    for m in 1..=t_max {
        if dv.kills(m)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::{rat, Ring};
    use crate::elliptic::curve::CurvePoint;
    use num_rational::BigRational;

    fn legendre(l: i64) -> WeierstrassCurve<BigRational> {
        WeierstrassCurve::new(rat(-(1 + l)), rat(l), rat(0))
    }

    #[test]
    fn small_cases() {
        let e = WeierstrassCurve::new(rat(0), rat(-1), rat(0));
        let mut d = DivisionPolynomials::new(&e);
        assert_eq!(d.get(1).f, Poly::from_ints(&[1]));
        assert!(d.get(2).y_factor);
        assert_eq!(d.psi2_squared().scale(&crate::arith::ring::ratio(1, 4)), Poly::from_ints(&[0, -1, 0, 1]));
        // Legendre at λ=3: ψ3 = 3x⁴ − 16x³ + 18x² − 9
        assert_eq!(division_polynomial(&legendre(3), 3).f, Poly::from_ints(&[-9, 0, 18, -16, 3]));
    }

    #[test]
    fn degrees_and_roots() {
        // deg f_m = (m²−1)/2 for odd m, (m²−4)/2 for even m
        let e = WeierstrassCurve::new(rat(1), rat(-2), rat(3));
        let mut d = DivisionPolynomials::new(&e);
        for m in 1..12u64 {
            let want = if m % 2 == 1 { (m * m - 1) / 2 } else { (m * m - 4) / 2 };
            let dp = d.get(m);
            assert_eq!(dp.f.degree().unwrap() as u64, want, "m={m}");
            assert_eq!(dp.f.lead().unwrap(), &rat(if m % 2 == 1 { m as i64 } else { m as i64 / 2 }));
        }
    }

    #[test]
    fn x_only_order_matches_addition() {
        // y² = x³ + 1: (2,3) order 6, (0,1) order 3, (-1,0) order 2
        let e = WeierstrassCurve::new(rat(0), rat(0), rat(1));
        for (x, y, m) in [(2, 3, 6), (0, 1, 3), (-1, 0, 2)] {
            let p = CurvePoint::Affine { x: rat(x), y: rat(y) };
            assert_eq!(e.order_by_addition(&p, 20).unwrap(), Some(m));
            assert_eq!(torsion_order_x(&e, &rat(x), &rat(y).square(), 20).unwrap(), Some(m));
        }
        // (3, 2) on y² = x³ − 2 is of infinite order
        let e = WeierstrassCurve::new(rat(0), rat(0), rat(-2));
        assert_eq!(torsion_order_x(&e, &rat(3), &rat(25), 12).unwrap(), None);
        // Legendre λ = 2 at x = 2: y = 0
        assert_eq!(torsion_order_x(&legendre(2), &rat(2), &rat(0), 4).unwrap(), Some(2));
    }
}
