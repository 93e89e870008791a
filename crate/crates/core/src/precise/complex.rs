//! Complex numbers over [`Real`], and the scalar abstraction that lets the
//! analytic code run either in `f64` (screening) or in high precision.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::real::Real;

#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Complex {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Complex {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn zero(prec: u32) -> Complex {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Complex {
        Complex::from_real(Real::from_i64(1, prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, p: u32) -> Complex {
        Complex { re: self.re.with_prec(p), im: self.im.with_prec(p) }
    }

    /// `e^{i theta}`
    pub fn cis(theta: &Real) -> Complex {
        let (s, c) = theta.sin_cos();
        Complex { re: c, im: s }
    }

    /// `e^{2 pi i k / n}`
    pub fn root_of_unity(k: i64, n: u64, prec: u32) -> Complex {
        let n = n as i64;
        let k = k.rem_euclid(n);
        // exact special cases keep common values clean
        match (4 * k) % n == 0 {
            true => {
                let (r, i) = [(1, 0), (0, 1), (-1, 0), (0, -1)][(4 * k / n) as usize];
                Complex::new(Real::from_i64(r, prec), Real::from_i64(i, prec))
            }
            false => {
                let wp = prec + 8;
                let theta = Real::pi(wp).mul_i64(2 * k).div_i64(n);
                Complex::cis(&theta).with_prec(prec)
            }
        }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
    pub fn neg(&self) -> Complex {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }
    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }
    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
    pub fn scale(&self, r: &Real) -> Complex {
        Complex { re: self.re.mul(r), im: self.im.mul(r) }
    }
    pub fn mul_2k(&self, k: i64) -> Complex {
        Complex { re: self.re.mul_2k(k), im: self.im.mul_2k(k) }
    }
    pub fn mul_i(&self) -> Complex {
        Complex { re: self.im.neg(), im: self.re.clone() }
    }
    pub fn norm_sqr(&self) -> Real {
        self.re.square().add(&self.im.square())
    }
    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    /// Magnitude estimate `floor(log2|z|)+1` (up to one bit).
    pub fn magnitude(&self) -> i64 {
        self.re.magnitude().max(self.im.magnitude())
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let d = o.norm_sqr();
        assert!(!d.is_zero(), "complex division by zero");
        let n = self.mul(&o.conj());
        Complex { re: n.re.div(&d), im: n.im.div(&d) }
    }

    pub fn recip(&self) -> Complex {
        Complex::one(self.prec()).div(self)
    }

    /// Principal square root (branch cut on the negative real axis,
    /// `Re sqrt >= 0`).
    pub fn sqrt(&self) -> Complex {
        let p = self.prec();
        if self.is_zero() {
            return Complex::zero(p);
        }
        let r = self.abs();
        if !self.re.is_negative() {
            let t = r.add(&self.re).mul_2k(-1).sqrt();
            Complex { im: self.im.div(&t).mul_2k(-1), re: t }
        } else {
            let t = r.sub(&self.re).mul_2k(-1).sqrt();
            let re = self.im.abs().div(&t).mul_2k(-1);
            let im = if self.im.is_negative() { t.neg() } else { t };
            Complex { re, im }
        }
    }

    pub fn exp(&self) -> Complex {
        let m = self.re.exp();
        let (s, c) = self.im.sin_cos();
        Complex { re: m.mul(&c), im: m.mul(&s) }
    }

    /// Principal logarithm, `Im` in `(-pi, pi]`.
    pub fn ln(&self) -> Complex {
        assert!(!self.is_zero(), "log of zero");
        let re = self.norm_sqr().ln().mul_2k(-1);
        Complex { re, im: Real::atan2(&self.im, &self.re) }
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    /// `asin z = -i ln(i z + sqrt(1 - z^2))`
    pub fn asin(&self) -> Complex {
        let p = self.prec();
        let one = Complex::one(p);
        let w = self.mul_i().add(&one.sub(&self.mul(self)).sqrt());
        w.ln().mul_i().neg()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Arithmetic needed by the analytic layer, implemented both for `f64`
/// complexes and for [`Complex`]. Constructors take `self` as a template so
/// that precision travels with values.
pub trait Cx: Clone + Send + Sync + fmt::Debug {
    fn from_f64_like(&self, re: f64, im: f64) -> Self;
    fn from_rational_like(&self, r: &BigRational) -> Self;
    fn from_int_like(&self, n: i64) -> Self {
        self.from_f64_like(n as f64, 0.0)
    }
    fn pi_like(&self) -> Self;
    fn bits(&self) -> u32;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn mul_i(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn asin(&self) -> Self;
    fn mul_int(&self, k: i64) -> Self;
    fn div_int(&self, k: i64) -> Self;

    fn re_part(&self) -> Self;
    fn im_part(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Rounded real part.
    fn round_re(&self) -> BigInt;
    fn floor_re(&self) -> BigInt;
    /// `log2 |z|` estimate, `-inf` for zero.
    fn log2_abs(&self) -> f64;
    /// `|self| > |other|` (squared norms compared exactly where possible).
    fn abs_gt(&self, other: &Self) -> bool;
    fn re_negative(&self) -> bool;
    fn im_negative(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    fn is_finite(&self) -> bool;
}

impl Cx for Complex64 {
    fn from_f64_like(&self, re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn from_rational_like(&self, r: &BigRational) -> Self {
        Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn pi_like(&self) -> Self {
        Complex64::new(std::f64::consts::PI, 0.0)
    }
    fn bits(&self) -> u32 {
        53
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn mul_i(&self) -> Self {
        Complex64::new(-self.im, self.re)
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    fn asin(&self) -> Self {
        Complex64::asin(*self)
    }
    fn mul_int(&self, k: i64) -> Self {
        self * k as f64
    }
    fn div_int(&self, k: i64) -> Self {
        self / k as f64
    }
    fn re_part(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn im_part(&self) -> Self {
        Complex64::new(self.im, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn round_re(&self) -> BigInt {
        BigInt::from(self.re.round() as i64)
    }
    fn floor_re(&self) -> BigInt {
        BigInt::from(self.re.floor() as i64)
    }
    fn log2_abs(&self) -> f64 {
        self.norm().log2()
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.norm_sqr() > o.norm_sqr()
    }
    fn re_negative(&self) -> bool {
        self.re < 0.0
    }
    fn im_negative(&self) -> bool {
        self.im < 0.0
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Cx for Complex {
    fn from_f64_like(&self, re: f64, im: f64) -> Self {
        Complex::from_f64(re, im, self.prec())
    }
    fn from_rational_like(&self, r: &BigRational) -> Self {
        Complex::from_real(Real::from_rational(r, self.prec()))
    }
    fn from_int_like(&self, n: i64) -> Self {
        Complex::from_real(Real::from_i64(n, self.prec()))
    }
    fn pi_like(&self) -> Self {
        Complex::from_real(Real::pi(self.prec()))
    }
    fn bits(&self) -> u32 {
        self.prec()
    }
    fn add(&self, o: &Self) -> Self {
        Complex::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Complex::div(self, o)
    }
    fn neg(&self) -> Self {
        Complex::neg(self)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn mul_i(&self) -> Self {
        Complex::mul_i(self)
    }
    fn sqrt(&self) -> Self {
        Complex::sqrt(self)
    }
    fn exp(&self) -> Self {
        Complex::exp(self)
    }
    fn ln(&self) -> Self {
        Complex::ln(self)
    }
    fn asin(&self) -> Self {
        Complex::asin(self)
    }
    fn mul_int(&self, k: i64) -> Self {
        Complex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }
    fn div_int(&self, k: i64) -> Self {
        Complex { re: self.re.div_i64(k), im: self.im.div_i64(k) }
    }
    fn re_part(&self) -> Self {
        Complex::from_real(self.re.clone())
    }
    fn im_part(&self) -> Self {
        Complex::from_real(self.im.clone())
    }
    fn is_zero(&self) -> bool {
        Complex::is_zero(self)
    }
    fn round_re(&self) -> BigInt {
        self.re.round()
    }
    fn floor_re(&self) -> BigInt {
        self.re.floor()
    }
    fn log2_abs(&self) -> f64 {
        if Complex::is_zero(self) {
            return f64::NEG_INFINITY;
        }
        let m = self.magnitude();
        let s = self.mul_2k(-m).to_c64().norm();
        s.log2() + m as f64
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.norm_sqr() > o.norm_sqr()
    }
    fn re_negative(&self) -> bool {
        self.re.is_negative()
    }
    fn im_negative(&self) -> bool {
        self.im.is_negative()
    }
    fn to_c64(&self) -> Complex64 {
        Complex::to_c64(self)
    }
    fn is_finite(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary() {
        let p = 192;
        let z = Complex::from_f64(-3.0, 4.0, p);
        let s = z.sqrt();
        assert!(s.mul(&s).sub(&z).magnitude() < -180);
        assert!(!s.re.is_negative());
        let l = z.ln();
        assert!(l.exp().sub(&z).magnitude() < -180);
        let w = Complex::from_f64(0.3, -0.7, p);
        let a = w.asin();
        let back = Complex64::new(0.3, -0.7).asin();
        assert!((a.to_c64() - back).norm() < 1e-14);
        let zeta = Complex::root_of_unity(3, 7, p);
        let mut acc = Complex::one(p);
        for _ in 0..7 {
            acc = acc.mul(&zeta);
        }
        assert!(acc.sub(&Complex::one(p)).magnitude() < -180);
        assert_eq!(Complex::root_of_unity(1, 4, p), Complex::from_f64(0.0, 1.0, p));
        // negative real axis: sqrt(-4) = 2i
        let r = Complex::from_f64(-4.0, 0.0, p).sqrt();
        assert_eq!(r, Complex::from_f64(0.0, 2.0, p));
    }
}
