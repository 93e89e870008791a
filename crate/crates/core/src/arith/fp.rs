//! Prime fields `F_q` for word-sized `q`, plus the polynomial factoring
//! routines needed to find residue fields of towers.

use std::convert::Infallible;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use super::ring::{Field, InvError, Ring};

/// An element of `Z/qZ`; `q` must be an odd prime below `2^32`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fq {
    v: u64,
    q: u64,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Fq {
    pub fn new(v: i64, q: u64) -> Self {
        Fq { v: v.rem_euclid(q as i64) as u64, q }
    }

    pub fn from_u64(v: u64, q: u64) -> Self {
        Fq { v: v % q, q }
    }

    pub fn value(self) -> u64 {
        self.v
    }

    pub fn modulus(self) -> u64 {
        self.q
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut acc = 1u64;
        let mut b = self.v;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % self.q;
            }
            b = b * b % self.q;
            e >>= 1;
        }
        Fq { v: acc, q: self.q }
    }

    /// Reduces a rational `n/d`; `None` when `q` divides the denominator.
    pub fn from_ratio(n: &BigInt, d: &BigInt, q: u64) -> Option<Self> {
        let qb = BigInt::from(q);
        let dn = d.mod_floor(&qb).to_u64()?;
        if dn == 0 {
            return None;
        }
        let nn = n.mod_floor(&qb).to_u64()?;
        Some(Fq { v: nn, q }.mul_ref(&Fq { v: dn, q }.pow(q - 2)))
    }

    pub fn is_square(self) -> bool {
        self.v == 0 || self.pow((self.q - 1) / 2).v == 1
    }
}

impl Ring for Fq {
    type Split = Infallible;

    fn zero_like(&self) -> Self {
        Fq { v: 0, q: self.q }
    }
    fn one_like(&self) -> Self {
        Fq { v: 1, q: self.q }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add_ref(&self, o: &Self) -> Self {
        let s = self.v + o.v;
        Fq { v: if s >= self.q { s - self.q } else { s }, q: self.q }
    }
    fn sub_ref(&self, o: &Self) -> Self {
        Fq { v: if self.v >= o.v { self.v - o.v } else { self.v + self.q - o.v }, q: self.q }
    }
    fn mul_ref(&self, o: &Self) -> Self {
        Fq { v: self.v * o.v % self.q, q: self.q }
    }
    fn neg_ref(&self) -> Self {
        Fq { v: if self.v == 0 { 0 } else { self.q - self.v }, q: self.q }
    }
    fn try_inv(&self) -> Result<Self, InvError<Infallible>> {
        if self.v == 0 {
            Err(InvError::Zero)
        } else {
            Ok(self.pow(self.q - 2))
        }
    }
    fn from_int_like(&self, n: i64) -> Self {
        Fq::new(n, self.q)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        let r = n.mod_floor(&BigInt::from(self.q)).to_u64().unwrap();
        Fq { v: r, q: self.q }
    }
}

impl Field for Fq {}

/// Deterministic Miller-Rabin, valid for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primes `q ≡ 1 (mod n)`, `q > floor`, in increasing order.
pub fn primes_one_mod(n: u64, floor: u64) -> impl Iterator<Item = u64> {
    let n = n.max(2);
    let start = floor / n + 1;
    (start..)
        .map(move |k| k * n + 1)
        .take_while(|&q| q < (1 << 32))
        .filter(|&q| q > 3 && is_prime(q))
}

/// An element of exact multiplicative order `n` in `F_q^*`.
pub fn element_of_order(n: u64, q: u64) -> Option<Fq> {
    if (q - 1) % n != 0 {
        return None;
    }
    let fac = prime_factors(q - 1);
    let g = (2..q).map(|g| Fq::from_u64(g, q)).find(|g| fac.iter().all(|&p| g.pow((q - 1) / p).v != 1))?;
    Some(g.pow((q - 1) / n))
}

pub fn multiplicative_order(x: Fq) -> u64 {
    let q = x.q;
    let mut ord = q - 1;
    for p in prime_factors(q - 1) {
        while ord % p == 0 && x.pow(ord / p).v == 1 {
            ord /= p;
        }
    }
    ord
}

pub type FqPoly = Poly<Fq>;

fn x_poly(q: u64) -> FqPoly {
    Poly::monomial(Fq::from_u64(1, q), 1)
}

fn mulmod(a: &FqPoly, b: &FqPoly, m: &FqPoly) -> FqPoly {
    a.mul(b).rem(m).unwrap_or_else(|e| match e {
        InvError::Zero => Poly::zero(),
        InvError::ZeroDivisor(n) => match n {},
    })
}

/// `base^e mod m`.
pub fn powmod(base: &FqPoly, e: &BigUint, m: &FqPoly) -> FqPoly {
    let q = m.lead().unwrap().modulus();
    let mut acc = Poly::constant(Fq::from_u64(1, q)).rem(m).unwrap();
    let b = base.rem(m).unwrap();
    for i in (0..e.bits()).rev() {
        acc = mulmod(&acc, &acc, m);
        if e.bit(i) {
            acc = mulmod(&acc, &b, m);
        }
    }
    acc
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs `(d, product of all irreducible factors of degree d)`.
pub fn distinct_degree(f: &FqPoly) -> Vec<(usize, FqPoly)> {
    let q = f.lead().unwrap().modulus();
    let mut out = Vec::new();
    let mut rest = f.monic().unwrap();
    let x = x_poly(q);
    let mut h = x.clone();
    let qb = BigUint::from(q);
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = powmod(&h, &qb, &rest);
        let g = h.sub(&x).gcd(&rest).unwrap();
        if g.degree() > Some(0) {
            rest = rest.divrem(&g).unwrap().0;
            h = h.rem(&rest).unwrap();
            out.push((d, g));
        }
    }
    if let Some(k) = rest.degree() {
        if k > 0 {
            out.push((k, rest));
        }
    }
    out
}

/// Splits a product of irreducibles all of degree `d` (odd `q`).
pub fn equal_degree(f: &FqPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FqPoly> {
    let n = f.degree().unwrap();
    if n == d {
        return vec![f.monic().unwrap()];
    }
    let q = f.lead().unwrap().modulus();
    let e = (BigUint::from(q).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = Poly::new((0..n).map(|_| Fq::from_u64(rng.gen_range(0..q), q)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = powmod(&a, &e, f).sub(&Poly::constant(Fq::from_u64(1, q)));
        let g = b.gcd(f).unwrap();
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let mut parts = equal_degree(&g, d, rng);
            parts.extend(equal_degree(&f.divrem(&g).unwrap().0, d, rng));
            return parts;
        }
    }
}

/// A monic irreducible factor of least degree of a squarefree `f`.
pub fn least_degree_factor(f: &FqPoly, seed: u64) -> FqPoly {
    let (d, part) = distinct_degree(f).into_iter().next().expect("nonconstant polynomial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = equal_degree(&part, d, &mut rng);
    parts.sort_by_key(|p| p.coeffs().iter().map(|c| c.value()).collect::<Vec<_>>());
    parts.swap_remove(0)
}

pub fn is_squarefree(f: &FqPoly) -> bool {
    f.gcd(&f.derivative()).map(|g| g.degree() == Some(0)).unwrap_or(false)
}

pub fn is_irreducible(f: &FqPoly) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    is_squarefree(f) && distinct_degree(f).first().map(|(d, _)| *d) == Some(n)
}

/// Roots of `f` in `F_q`, sorted.
pub fn roots_in_fq(f: &FqPoly, seed: u64) -> Vec<Fq> {
    let q = f.lead().unwrap().modulus();
    let sf = f.squarefree_part().unwrap();
    let h = powmod(&x_poly(q), &BigUint::from(q), &sf);
    let lin = h.sub(&x_poly(q)).gcd(&sf).unwrap();
    if lin.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Fq> = equal_degree(&lin, 1, &mut rng).into_iter().map(|p| p.coeffs()[0].neg_ref()).collect();
    out.sort_by_key(|r| r.value());
    out
}

pub fn bigint_mod(n: &BigInt, q: u64) -> u64 {
    n.mod_floor(&BigInt::from(q)).to_u64().unwrap()
}

pub fn one(q: u64) -> Fq {
    Fq::from_u64(1, q)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64], q: u64) -> FqPoly {
        Poly::new(c.iter().map(|&v| Fq::new(v, q)).collect())
    }

    #[test]
    fn primes_and_orders() {
        assert!(is_prime(97) && !is_prime(91) && is_prime(4294967291));
        let z = element_of_order(4, 5).unwrap();
        assert!(z.value() == 2 || z.value() == 3);
        assert_eq!(multiplicative_order(element_of_order(8, 17).unwrap()), 8);
        assert_eq!(primes_one_mod(8, 0).next(), Some(17));
    }

    #[test]
    fn factoring() {
        // (x^2+1)(x-3) over F_7: x^2+1 irreducible since 7 ≡ 3 mod 4
        let f = p(&[1, 0, 1], 7).mul(&p(&[-3, 1], 7));
        let ddf = distinct_degree(&f);
        assert_eq!(ddf.len(), 2);
        assert_eq!(least_degree_factor(&f, 1), p(&[-3, 1], 7));
        assert!(is_irreducible(&p(&[1, 0, 1], 7)));
        assert!(!is_irreducible(&p(&[1, 0, 1], 5)));
        assert_eq!(roots_in_fq(&p(&[1, 0, 1], 5), 0).iter().map(|r| r.value()).collect::<Vec<_>>(), vec![2, 3]);
        let g = p(&[2, 0, 0, 1], 31).mul(&p(&[5, 1], 31));
        let h = least_degree_factor(&g, 3);
        assert_eq!(h.degree(), Some(1));
        assert!(g.rem(&h).unwrap().is_zero());
    }
}
