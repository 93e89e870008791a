use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::precise::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructError {
    #[error("tolerance {tol:e} does not guarantee uniqueness for denominators up to {q_max}; need tol < 1/(2 q_max^2)")]
    TolTooLarge { tol: f64, q_max: u64 },
}

/// The rational `p/q` with `q ≤ q_max` and `|r − p/q| ≤ tol`, found among the
/// continued-fraction convergents of `r`. Requires `tol < 1/(2 q_max²)`,
/// which makes the answer unique.
pub fn rational_reconstruct(r: &Real, q_max: u64, tol: f64) -> Result<Option<BigRational>, ReconstructError> {
    let qm = q_max as f64;
    if !(tol > 0.0) || tol >= 1.0 / (2.0 * qm * qm) {
        return Err(ReconstructError::TolTooLarge { tol, q_max });
    }
    let x = r.to_rational();
    let tol_r = Real::from_f64(tol, 64).to_rational();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (x.numer().clone(), x.denom().clone());
    let q_max = BigInt::from(q_max);
    while !d.is_zero() {
        let (a, rem) = n.div_mod_floor(&d);
        let (p2, q2) = (&a * &p1 + &p0, &a * &q1 + &q0);
        if q2 > q_max {
            break;
        }
        let cand = BigRational::new(p2.clone(), q2.clone());
        if (&x - &cand).abs() <= tol_r {
            return Ok(Some(cand));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (n, d) = (d, rem);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::ratio;

    #[test]
    fn examples() {
        let third = Real::from_rational(&ratio(1, 3), 200);
        assert_eq!(rational_reconstruct(&third, 10, 1e-20).unwrap(), Some(ratio(1, 3)));
        let inv_pi = Real::pi(200).recip();
        assert_eq!(rational_reconstruct(&inv_pi, 50, 1e-20).unwrap(), None);
        assert_eq!(rational_reconstruct(&Real::from_f64(0.5, 64), 2, 0.1).unwrap(), Some(ratio(1, 2)));
        assert_eq!(rational_reconstruct(&Real::from_f64(-0.75, 64), 4, 1e-3).unwrap(), Some(ratio(-3, 4)));
        assert!(rational_reconstruct(&third, 10, 0.01).is_err());
    }
}
