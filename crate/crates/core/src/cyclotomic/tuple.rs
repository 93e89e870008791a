//! Tuples of roots of unity and their vanishing subsums.

use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::field::{CyclotomicField, CyclotomicNumber};

/// Default cap on tuple length for exhaustive subset checks.
pub const SUBSET_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TupleError {
    #[error("empty tuple")]
    Empty,
    #[error("order must be positive")]
    ZeroOrder,
    #[error("subset budget exceeded: n = {n} > cap {cap}")]
    SubsetBudget { n: usize, cap: usize },
}

/// `(zeta_N^{k_1}, ..., zeta_N^{k_n})`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnityTuple {
    pub n: usize,
    #[serde(rename = "N")]
    pub order: u64,
    pub exponents: Vec<u64>,
}

impl RootOfUnityTuple {
    pub fn new(order: u64, exponents: Vec<i64>) -> Result<Self, TupleError> {
        if order == 0 {
            return Err(TupleError::ZeroOrder);
        }
        if exponents.is_empty() {
            return Err(TupleError::Empty);
        }
        let exponents: Vec<u64> = exponents.iter().map(|k| k.rem_euclid(order as i64) as u64).collect();
        Ok(RootOfUnityTuple { n: exponents.len(), order, exponents })
    }

    /// Checks the invariants of a deserialized tuple.
    pub fn validate(&self) -> Result<(), TupleError> {
        if self.order == 0 {
            return Err(TupleError::ZeroOrder);
        }
        if self.exponents.is_empty() || self.n != self.exponents.len() {
            return Err(TupleError::Empty);
        }
        Ok(())
    }

    /// Exact multiplicative order of the tuple in `G_m^n`.
    pub fn tuple_order(&self) -> u64 {
        let g = self.exponents.iter().fold(self.order, |g, &k| g.gcd(&k));
        self.order / g
    }

    /// Same tuple written over its exact order.
    pub fn normalized(&self) -> Self {
        let g = self.exponents.iter().fold(self.order, |g, &k| g.gcd(&k));
        RootOfUnityTuple { n: self.n, order: self.order / g, exponents: self.exponents.iter().map(|k| k / g).collect() }
    }

    /// Exponents sorted, as a multiset key.
    pub fn sorted(&self) -> Self {
        let mut e = self.exponents.clone();
        e.sort_unstable();
        RootOfUnityTuple { n: self.n, order: self.order, exponents: e }
    }

    pub fn field(&self) -> Arc<CyclotomicField> {
        CyclotomicField::new(self.order)
    }

    pub fn sum_of_roots(&self) -> CyclotomicNumber {
        let exps: Vec<i64> = self.exponents.iter().map(|&k| k as i64).collect();
        CyclotomicNumber::sum_of_powers(&self.field(), &exps)
    }

    /// `k_i / N` for each coordinate.
    pub fn angles(&self) -> Vec<num_rational::BigRational> {
        self.exponents
            .iter()
            .map(|&k| num_rational::BigRational::new((k as i64).into(), (self.order as i64).into()))
            .collect()
    }

    /// Conjugate tuple under `zeta -> zeta^j`.
    pub fn galois(&self, j: u64) -> Self {
        RootOfUnityTuple { n: self.n, order: self.order, exponents: self.exponents.iter().map(|k| k * j % self.order).collect() }
    }

    /// Whether `ζ^{k_i}` for `i` in `mask` sum exactly to zero.
    pub fn subset_vanishes(&self, field: &Arc<CyclotomicField>, mask: u64) -> bool {
        let exps: Vec<i64> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &k)| k as i64)
            .collect();
        let s = CyclotomicNumber::sum_of_powers(field, &exps);
        s.numerators().0.iter().all(|c| c.is_zero())
    }

    pub fn has_vanishing_subsum(&self) -> Result<bool, TupleError> {
        self.has_vanishing_subsum_capped(SUBSET_CAP)
    }

    /// Exhaustive over nonempty subsets, in Gray-code order. An `f64`
    /// running sum screens subsets; only those with a tiny value get the
    /// exact test, and every exactly vanishing subset has a tiny value.
    pub fn has_vanishing_subsum_capped(&self, cap: usize) -> Result<bool, TupleError> {
        Ok(self.first_vanishing_subset(cap)?.is_some())
    }

    /// A vanishing subset as a bit mask, if any.
    pub fn first_vanishing_subset(&self, cap: usize) -> Result<Option<u64>, TupleError> {
        let n = self.n;
        if n > cap || n > 62 {
            return Err(TupleError::SubsetBudget { n, cap });
        }
        let field = self.field();
        let roots: Vec<Complex64> = self
            .exponents
            .iter()
            .map(|&k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / self.order as f64))
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mask = 0u64;
        for step in 1u64..(1u64 << n) {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            if mask >> bit & 1 == 1 {
                sum += roots[bit];
            } else {
                sum -= roots[bit];
            }
            // drift is at most ~n * 2^-52 per step chain; re-anchor periodically
            if step % 4096 == 0 {
                sum = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| roots[i]).sum();
            }
            if sum.norm() < 1e-6 && self.subset_vanishes(&field, mask) {
                return Ok(Some(mask));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::Ring;

    #[test]
    fn orders_and_sums() {
        let t = RootOfUnityTuple::new(1, vec![0, 0]).unwrap();
        assert_eq!(t.tuple_order(), 1);
        assert_eq!(t.sum_of_roots().as_rational(), Some(crate::arith::ring::rat(2)));
        assert_eq!(RootOfUnityTuple::new(8, vec![2]).unwrap().tuple_order(), 4);
        assert_eq!(RootOfUnityTuple::new(12, vec![4, 3]).unwrap().tuple_order(), 12);
        assert!(RootOfUnityTuple::new(3, vec![0, 1, 2]).unwrap().sum_of_roots().is_zero());
        let s = RootOfUnityTuple::new(8, vec![1, 7]).unwrap().sum_of_roots();
        assert_eq!(s.square().as_rational(), Some(crate::arith::ring::rat(2)));
        assert!(RootOfUnityTuple::new(1, vec![]).is_err());
    }

    #[test]
    fn vanishing() {
        assert!(!RootOfUnityTuple::new(1, vec![0, 0]).unwrap().has_vanishing_subsum().unwrap());
        assert!(RootOfUnityTuple::new(4, vec![1, 3]).unwrap().has_vanishing_subsum().unwrap());
        let mut e = vec![1; 4];
        e.extend([7; 4]);
        e.extend([4; 4]);
        let t = RootOfUnityTuple::new(8, e).unwrap();
        assert!(!t.has_vanishing_subsum().unwrap());
        assert_eq!(t.tuple_order(), 8);
        let big = RootOfUnityTuple::new(2, vec![0; 21]).unwrap();
        assert_eq!(big.has_vanishing_subsum(), Err(TupleError::SubsetBudget { n: 21, cap: 20 }));
    }
}
