//! Binary floating-point reals of arbitrary precision on top of `BigInt`.
//!
//! A value is `man * 2^exp` with `|man| < 2^prec`. Arithmetic rounds to the
//! larger precision of the operands. Transcendental functions evaluate in
//! fixed point with [`GUARD_BITS`] extra bits and are accurate to a few ulp.

use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const GUARD_BITS: u32 = 32;

#[derive(Clone)]
pub struct Real {
    man: BigInt,
    exp: i64,
    prec: u32,
}

fn bits(m: &BigInt) -> i64 {
    m.bits() as i64
}

/// Shift right with round-half-away-from-zero.
fn shr_round(m: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (k - 1);
    if m.is_negative() {
        -((-m + half) >> k)
    } else {
        (m + half) >> k
    }
}

impl Real {
    fn norm(man: BigInt, exp: i64, prec: u32) -> Real {
        let b = bits(&man);
        if man.is_zero() {
            return Real { man, exp: 0, prec };
        }
        if b > prec as i64 {
            let k = (b - prec as i64) as u64;
            let m = shr_round(&man, k);
            // rounding may carry into one more bit
            if bits(&m) > prec as i64 {
                return Real { man: shr_round(&m, 1), exp: exp + k as i64 + 1, prec };
            }
            Real { man: m, exp: exp + k as i64, prec }
        } else {
            Real { man, exp, prec }
        }
    }

    pub fn zero(prec: u32) -> Real {
        Real { man: BigInt::zero(), exp: 0, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Real {
        Real::norm(BigInt::from(v), 0, prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Real {
        Real::norm(v.clone(), 0, prec)
    }

    /// `man * 2^exp` rounded to `prec` bits.
    pub fn from_parts(man: BigInt, exp: i64, prec: u32) -> Real {
        Real::norm(man, exp, prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Real {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Real::zero(prec);
        }
        let (m, e) = frexp(x);
        let man = (m * (1u64 << 53) as f64) as i64;
        Real::norm(BigInt::from(man), e as i64 - 53, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Real {
        if r.numer().is_zero() {
            return Real::zero(prec);
        }
        let shift = prec as i64 + 2 + bits(r.denom()) - bits(r.numer());
        let shift = shift.max(0);
        let n = r.numer() << shift as usize;
        Real::norm(n / r.denom(), -shift, prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Real {
        Real::norm(self.man.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// `floor(log2|x|) + 1`, or `i64::MIN` for zero.
    pub fn magnitude(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + bits(&self.man)
        }
    }

    pub fn neg(&self) -> Real {
        Real { man: -&self.man, exp: self.exp, prec: self.prec }
    }

    pub fn abs(&self) -> Real {
        Real { man: self.man.abs(), exp: self.exp, prec: self.prec }
    }

    /// `x * 2^k`
    pub fn mul_2k(&self, k: i64) -> Real {
        if self.is_zero() {
            return self.clone();
        }
        Real { man: self.man.clone(), exp: self.exp + k, prec: self.prec }
    }

    pub fn add(&self, o: &Real) -> Real {
        let p = self.prec.max(o.prec);
        if o.is_zero() {
            return self.with_prec(p);
        }
        if self.is_zero() {
            return o.with_prec(p);
        }
        let (ta, tb) = (self.magnitude(), o.magnitude());
        if ta < tb - p as i64 - 3 {
            return o.with_prec(p);
        }
        if tb < ta - p as i64 - 3 {
            return self.with_prec(p);
        }
        let e = self.exp.min(o.exp);
        let m = (&self.man << (self.exp - e) as usize) + (&o.man << (o.exp - e) as usize);
        Real::norm(m, e, p)
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Real) -> Real {
        Real::norm(&self.man * &o.man, self.exp + o.exp, self.prec.max(o.prec))
    }

    pub fn mul_i64(&self, k: i64) -> Real {
        Real::norm(&self.man * k, self.exp, self.prec)
    }

    pub fn square(&self) -> Real {
        self.mul(self)
    }

    /// Panics on division by zero.
    pub fn div(&self, o: &Real) -> Real {
        assert!(!o.is_zero(), "real division by zero");
        let p = self.prec.max(o.prec);
        if self.is_zero() {
            return Real::zero(p);
        }
        let shift = (p as i64 + 2 + bits(&o.man) - bits(&self.man)).max(0);
        let n = &self.man << shift as usize;
        Real::norm(n / &o.man, self.exp - shift - o.exp, p)
    }

    pub fn div_i64(&self, k: i64) -> Real {
        self.div(&Real::from_i64(k, self.prec))
    }

    pub fn recip(&self) -> Real {
        Real::from_i64(1, self.prec).div(self)
    }

    /// Square root; tiny negative inputs (rounding residue) map to zero.
    pub fn sqrt(&self) -> Real {
        if self.man.is_negative() || self.is_zero() {
            return Real::zero(self.prec);
        }
        let p = self.prec as i64;
        let mut s = (2 * p + 2 - bits(&self.man)).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = (&self.man << s as usize).sqrt();
        Real::norm(m, (self.exp - s) / 2, self.prec)
    }

    /// Nearest integer (ties away from zero).
    pub fn round(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            shr_round(&self.man, (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            self.man.div_floor(&(BigInt::one() << (-self.exp) as usize))
        }
    }

    /// `x - floor(x)`, in `[0, 1)`.
    pub fn frac(&self) -> Real {
        self.sub(&Real::from_bigint(&self.floor(), self.prec))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = bits(&self.man);
        let k = (b - 60).max(0);
        let m = (&self.man >> k as usize).to_f64().unwrap();
        let e = self.exp + k;
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// `round(x * 2^w)`
    pub fn to_fixed(&self, w: u32) -> BigInt {
        let e = self.exp + w as i64;
        if e >= 0 {
            &self.man << e as usize
        } else {
            shr_round(&self.man, (-e) as u64)
        }
    }

    pub fn from_fixed(m: BigInt, w: u32, prec: u32) -> Real {
        Real::norm(m, -(w as i64), prec)
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let neg = self.is_negative();
        let a = self.abs();
        // decimal exponent estimate
        let d10 = ((a.magnitude() as f64 - 1.0) * std::f64::consts::LOG10_2).floor() as i64;
        let scale = digits as i64 - 1 - d10;
        let r = a.to_rational();
        let ten = BigInt::from(10);
        let scaled = if scale >= 0 {
            r * BigRational::from_integer(ten.pow(scale as u32))
        } else {
            r / BigRational::from_integer(ten.pow((-scale) as u32))
        };
        let n = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
        let mut s = n.to_string();
        let mut exp10 = d10;
        if s.len() > digits {
            s.pop();
            exp10 += 1;
        }
        let body = if s.len() > 1 { format!("{}.{}", &s[..1], &s[1..]) } else { s };
        format!("{}{}e{}", if neg { "-" } else { "" }, body, exp10)
    }

    pub fn pi(prec: u32) -> Real {
        let w = prec + GUARD_BITS;
        Real::from_fixed(cached(&PI_CACHE, w, pi_fixed), w, prec)
    }

    pub fn ln2(prec: u32) -> Real {
        let w = prec + GUARD_BITS;
        Real::from_fixed(cached(&LN2_CACHE, w, ln2_fixed), w, prec)
    }

    pub fn exp(&self) -> Real {
        let p = self.prec;
        if self.is_zero() {
            return Real::from_i64(1, p);
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "exp argument out of range");
        let k = (xf / std::f64::consts::LN_2).round() as i64;
        let s: u32 = 8 + (p as f64).sqrt() as u32 / 2;
        let w = p + GUARD_BITS + s + bits(&BigInt::from(k)) as u32;
        let ln2 = cached(&LN2_CACHE, w, ln2_fixed);
        let r = self.to_fixed(w) - ln2 * k;
        // |r| <= ~0.35; scale down by 2^s, Taylor, then square back
        let r = shr_round(&r, s as u64);
        let one = BigInt::one() << w as usize;
        let mut sum = one.clone();
        let mut term = one;
        let mut n = 1i64;
        loop {
            term = shr_round(&(term * &r), w as u64) / n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..s {
            sum = shr_round(&(&sum * &sum), w as u64);
        }
        Real::norm(sum, k - w as i64, p)
    }

    /// Natural logarithm; panics for non-positive input.
    pub fn ln(&self) -> Real {
        assert!(!self.is_negative() && !self.is_zero(), "ln of non-positive real");
        let p = self.prec;
        let wp = p + GUARD_BITS / 2;
        // x = y * 2^k, y in [1/2, 1)
        let k = self.magnitude();
        let y = self.mul_2k(-k).with_prec(wp);
        let mut z = Real::from_f64(y.to_f64().ln(), wp);
        let tol = -(wp as i64) + 4;
        for _ in 0..40 {
            let ez = z.exp();
            let corr = y.sub(&ez).div(&y.add(&ez)).mul_2k(1);
            z = z.add(&corr);
            if corr.is_zero() || corr.magnitude() < tol {
                break;
            }
        }
        z.add(&Real::ln2(wp).mul_i64(k)).with_prec(p)
    }

    /// `(sin x, cos x)`
    pub fn sin_cos(&self) -> (Real, Real) {
        let p = self.prec;
        if self.is_zero() {
            return (Real::zero(p), Real::from_i64(1, p));
        }
        let xf = self.to_f64();
        assert!(xf.abs() < 1e15, "trig argument out of range");
        let k = (xf / std::f64::consts::FRAC_PI_2).round() as i64;
        let w = p + GUARD_BITS + bits(&BigInt::from(k)) as u32;
        let half_pi = cached(&PI_CACHE, w, pi_fixed) >> 1usize;
        let r = self.to_fixed(w) - half_pi * k;
        let one = BigInt::one() << w as usize;
        let r2 = shr_round(&(&r * &r), w as u64);
        // sin: r - r^3/3! + ..., cos: 1 - r^2/2! + ...
        let (mut s, mut c) = (r.clone(), one.clone());
        let (mut ts, mut tc) = (r, one);
        let mut n = 1i64;
        loop {
            tc = -shr_round(&(&tc * &r2), w as u64) / ((2 * n - 1) * (2 * n));
            ts = -shr_round(&(&ts * &r2), w as u64) / ((2 * n) * (2 * n + 1));
            if tc.is_zero() && ts.is_zero() {
                break;
            }
            c += &tc;
            s += &ts;
            n += 1;
        }
        let (s, c) = match k.rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        (Real::from_fixed(s, w, p), Real::from_fixed(c, w, p))
    }

    /// Angle of the vector `(x, y)` in `(-pi, pi]`; `atan2(0, 0) = 0`.
    pub fn atan2(y: &Real, x: &Real) -> Real {
        let p = y.prec.max(x.prec);
        if y.is_zero() && x.is_zero() {
            return Real::zero(p);
        }
        if y.is_zero() {
            return if x.is_negative() { Real::pi(p) } else { Real::zero(p) };
        }
        let wp = p + GUARD_BITS / 2;
        let (yw, xw) = (y.with_prec(wp), x.with_prec(wp));
        // scale both to unit size so the f64 seed is meaningful
        let m = yw.magnitude().max(xw.magnitude());
        let (ys, xs) = (yw.mul_2k(-m), xw.mul_2k(-m));
        let mut t = Real::from_f64(ys.to_f64().atan2(xs.to_f64()), wp);
        let tol = -(wp as i64) + 4;
        for _ in 0..40 {
            let (s, c) = t.sin_cos();
            let num = ys.mul(&c).sub(&xs.mul(&s));
            let den = xs.mul(&c).add(&ys.mul(&s));
            let d = num.div(&den);
            // atan(d) = d - d^3/3 + ...; d is tiny after the first step
            let d = d.sub(&d.mul(&d).mul(&d).div_i64(3));
            t = t.add(&d);
            if d.is_zero() || d.magnitude() < tol {
                break;
            }
        }
        t.with_prec(p)
    }

    pub fn max(a: &Real, b: &Real) -> Real {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn frexp(x: f64) -> (f64, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, exp - 1022)
}

type Cache = RwLock<Option<(u32, BigInt)>>;
static PI_CACHE: Cache = RwLock::new(None);
static LN2_CACHE: Cache = RwLock::new(None);

fn cached(cache: &Cache, w: u32, compute: fn(u32) -> BigInt) -> BigInt {
    if let Some((cw, v)) = cache.read().unwrap().as_ref() {
        if *cw >= w {
            return shr_round(v, (*cw - w) as u64);
        }
    }
    let w2 = w.max(512) + 64;
    let v = compute(w2);
    let out = shr_round(&v, (w2 - w) as u64);
    let mut guard = cache.write().unwrap();
    if guard.as_ref().map_or(true, |(cw, _)| *cw < w2) {
        *guard = Some((w2, v));
    }
    out
}

/// `atan(1/k) * 2^w` by the Gregory series.
fn atan_inv_fixed(k: i64, w: u32) -> BigInt {
    let w2 = w + 16;
    let mut term: BigInt = (BigInt::one() << w2 as usize) / k;
    let k2 = BigInt::from(k * k);
    let mut sum = term.clone();
    let mut n = 1i64;
    while !term.is_zero() {
        term = -(term / &k2);
        sum += &term / (2 * n + 1);
        n += 1;
    }
    sum >> 16usize
}

fn pi_fixed(w: u32) -> BigInt {
    atan_inv_fixed(5, w) * 16 - atan_inv_fixed(239, w) * 4
}

fn ln2_fixed(w: u32) -> BigInt {
    // 2 atanh(1/3)
    let w2 = w + 16;
    let mut term: BigInt = (BigInt::one() << w2 as usize) / 3;
    let mut sum = term.clone();
    let mut n = 1i64;
    while !term.is_zero() {
        term /= 9;
        sum += &term / (2 * n + 1);
        n += 1;
    }
    (sum * 2) >> 16usize
}

impl PartialEq for Real {
    fn eq(&self, o: &Real) -> bool {
        self.cmp_real(o) == Ordering::Equal
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Real) -> Option<Ordering> {
        Some(self.cmp_real(o))
    }
}

impl Real {
    fn cmp_real(&self, o: &Real) -> Ordering {
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &o.man << (o.exp - e) as usize;
        a.cmp(&b)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2) as usize;
        write!(f, "{}", self.to_decimal(digits.max(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: f64, tol: f64) {
        assert!((a.to_f64() - b).abs() <= tol * b.abs().max(1.0), "{a:?} vs {b}");
    }

    #[test]
    fn constants() {
        let pi = Real::pi(256);
        assert_eq!(pi.to_decimal(40), "3.141592653589793238462643383279502884197e0");
        assert_eq!(Real::ln2(200).to_decimal(30), "6.93147180559945309417232121458e-1");
    }

    #[test]
    fn field_ops() {
        let p = 200;
        let a = Real::from_i64(2, p);
        let s = a.sqrt();
        assert!(s.square().sub(&a).magnitude() < -190);
        let third = Real::from_i64(1, p).div_i64(3);
        assert!(third.mul_i64(3).sub(&Real::from_i64(1, p)).magnitude() < -195);
        assert_eq!(Real::from_f64(-2.5, 64).floor(), BigInt::from(-3));
        assert_eq!(Real::from_f64(-2.5, 64).round(), BigInt::from(-3));
        assert_eq!(Real::from_f64(0.75, 64).to_rational(), crate::arith::ring::ratio(3, 4));
    }

    #[test]
    fn transcendental() {
        let p = 256;
        let x = Real::from_f64(1.3, p);
        close(&x.exp(), 1.3f64.exp(), 1e-15);
        let e = Real::from_i64(1, p).exp();
        assert_eq!(e.to_decimal(40), "2.718281828459045235360287471352662497757e0");
        assert!(x.exp().ln().sub(&x).magnitude() < -245);
        let big = Real::from_f64(-37.25, p);
        assert!(big.exp().ln().sub(&big).magnitude() < -240);
        let (s, c) = Real::from_f64(2.0, p).sin_cos();
        close(&s, 2f64.sin(), 1e-15);
        close(&c, 2f64.cos(), 1e-15);
        assert!(s.square().add(&c.square()).sub(&Real::from_i64(1, p)).magnitude() < -245);
        let t = Real::atan2(&Real::from_i64(1, p), &Real::from_i64(-1, p));
        assert!(t.sub(&Real::pi(p).mul_i64(3).mul_2k(-2)).magnitude() < -245);
        close(&Real::atan2(&Real::from_f64(-1e-30, p), &Real::from_f64(1.0, p)), -1e-30, 1e-14);
    }
}
