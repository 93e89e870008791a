//! Finite order of `[[0, 1], [-1, λ]]` in `SL_2`.
//!
//! The order is finite exactly when `λ = ζ + ζ^{-1}` for a root of unity of
//! order `m >= 3`, and then it equals `m`. Such a `λ` has degree `φ(m)/2`,
//! and `φ(m) >= sqrt(m/2)` bounds the search.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::field::{euler_phi, CyclotomicField, CyclotomicNumber};
use crate::arith::fp::prime_factors;
use crate::arith::ring::Ring;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sl2Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Sl2Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Order::Finite(m) => write!(f, "{m}"),
            Sl2Order::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for Sl2Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Sl2Order::Finite(m) => s.serialize_u64(*m),
            Sl2Order::Infinite => s.serialize_str("infinite"),
        }
    }
}

pub type Mat2 = [[CyclotomicNumber; 2]; 2];

pub fn companion(lambda: &CyclotomicNumber) -> Mat2 {
    let z = lambda.zero_like();
    let o = lambda.one_like();
    [[z.clone(), o.clone()], [o.neg_ref(), lambda.clone()]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| a[i][0].mul_ref(&b[0][j]).add_ref(&a[i][1].mul_ref(&b[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_pow(m: &Mat2, mut e: u64) -> Mat2 {
    let z = m[0][0].zero_like();
    let o = m[0][0].one_like();
    let mut acc = [[o.clone(), z.clone()], [z, o]];
    let mut b = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &b);
        }
        b = mat_mul(&b, &b);
        e >>= 1;
    }
    acc
}

pub fn is_identity(m: &Mat2) -> bool {
    m[0][0].is_one() && m[1][1].is_one() && m[0][1].is_zero() && m[1][0].is_zero()
}

/// Exact check that the companion matrix has order exactly `m`.
pub fn confirm_order(lambda: &CyclotomicNumber, m: u64) -> bool {
    let c = companion(lambda);
    is_identity(&mat_pow(&c, m)) && prime_factors(m).iter().all(|p| !is_identity(&mat_pow(&c, m / p)))
}

/// Whether `λ = ζ_m^k + ζ_m^{-k}` for some unit `k`.
fn is_trace_of_order(lambda: &CyclotomicNumber, m: u64) -> bool {
    let l = lambda.field().conductor().lcm(&m);
    let big = CyclotomicField::new(l);
    let Ok(lam) = lambda.lift(&big) else { return false };
    let step = (l / m) as i64;
    (1..=m / 2).filter(|k| k.gcd(&m) == 1).any(|k| {
        let k = k as i64;
        let t = CyclotomicNumber::zeta_pow(&big, k * step).add_ref(&CyclotomicNumber::zeta_pow(&big, -k * step));
        t == lam
    })
}

pub fn sl2_torsion_order(lambda: &CyclotomicNumber) -> Sl2Order {
    let d = lambda.degree_over_q() as u64;
    let bound = 8 * d * d + 2;
    for m in 3..=bound {
        if euler_phi(m) == 2 * d && is_trace_of_order(lambda, m) {
            return Sl2Order::Finite(m);
        }
    }
    Sl2Order::Infinite
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_values() {
        let q = CyclotomicField::new(1);
        for (v, want) in [(0, Sl2Order::Finite(4)), (1, Sl2Order::Finite(6)), (-1, Sl2Order::Finite(3)), (2, Sl2Order::Infinite), (-2, Sl2Order::Infinite), (3, Sl2Order::Infinite)] {
            let l = CyclotomicNumber::from_int(&q, v);
            assert_eq!(sl2_torsion_order(&l), want, "lambda = {v}");
            if let Sl2Order::Finite(m) = want {
                assert!(confirm_order(&l, m));
            }
        }
        let k = CyclotomicField::new(5);
        let l = CyclotomicNumber::zeta_pow(&k, 1).add_ref(&CyclotomicNumber::zeta_pow(&k, 4));
        assert_eq!(sl2_torsion_order(&l), Sl2Order::Finite(5));
        // non-real sum of two roots of unity
        let l = CyclotomicNumber::zeta_pow(&k, 1).add_ref(&CyclotomicNumber::zeta_pow(&k, 2));
        assert_eq!(sl2_torsion_order(&l), Sl2Order::Infinite);
    }
}
