//! Algebraic subgroups `H ⊆ G_m^n` with `εH` inside `{Σ x_i = ζ}`.
//!
//! Coordinates are grouped by the character `x_i|_H`. Each group's
//! coefficients sum to zero (index 0 carries `−ζ` and the trivial
//! character), and conversely every partition with zero block sums gives
//! such an `H`. Partitions are enumerated as restricted-growth strings.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::linalg::hermite_normal_form;
use crate::arith::ring::Ring;
use crate::cyclotomic::{CyclotomicNumber, RootOfUnityTuple};
use crate::precise::{Complex, Real};

pub const PARTITION_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("n = {0} exceeds the partition enumeration bound {PARTITION_CAP}")]
    TooLarge(usize),
    #[error("zeta is not the sum of the tuple")]
    SumMismatch,
    #[error("sampler returned {got} coordinates, expected {want}")]
    Sampler { got: usize, want: usize },
}

/// Characters vanishing on `H`, in Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupLattice {
    pub n: usize,
    pub basis: Vec<Vec<i64>>,
    pub dimension: usize,
}

impl SubgroupLattice {
    pub fn trivial(n: usize) -> Self {
        let basis = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        SubgroupLattice { n, basis, dimension: 0 }
    }

    /// A rational basis of the tangent directions `{v : B v = 0}`.
    pub fn tangent_basis(&self) -> Vec<Vec<BigRational>> {
        nullspace(&self.basis, self.n)
    }
}

/// Blocks of `{0, …, n}`; index 0 stands for `−ζ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZeroSumPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl ZeroSumPartition {
    pub fn lattice(&self, n: usize) -> SubgroupLattice {
        let mut rows = Vec::new();
        for block in &self.blocks {
            let unit = |i: usize| -> Vec<BigInt> { (1..=n).map(|j| BigInt::from((i == j) as i64)).collect() };
            if block.contains(&0) {
                rows.extend(block.iter().filter(|&&i| i > 0).map(|&i| unit(i)));
            } else {
                let first = unit(block[0]);
                for &i in &block[1..] {
                    rows.push(first.iter().zip(unit(i)).map(|(a, b)| a - b).collect());
                }
            }
        }
        let basis: Vec<Vec<i64>> = hermite_normal_form(&rows)
            .iter()
            .map(|r| r.iter().map(|v| i64::try_from(v).expect("small character lattice")).collect())
            .collect();
        SubgroupLattice { n, dimension: n - basis.len(), basis }
    }
}

#[derive(Debug, Clone)]
pub struct SubgroupResult {
    pub dimension: usize,
    /// A partition attaining the dimension; `None` when `H` is trivial.
    pub witness: Option<ZeroSumPartition>,
    pub lattice: SubgroupLattice,
}

fn restricted_growth_strings(len: usize, mut f: impl FnMut(&[usize], usize)) {
    fn go(s: &mut Vec<usize>, len: usize, max: usize, f: &mut impl FnMut(&[usize], usize)) {
        if s.len() == len {
            f(s, max + 1);
            return;
        }
        for b in 0..=max + 1 {
            s.push(b);
            go(s, len, max.max(b), f);
            s.pop();
        }
    }
    let mut s = vec![0];
    go(&mut s, len, 0, &mut f);
}

/// Dimension of the largest `H` with `εH ⊆ {Σ x_i = ζ}`.
pub fn maximal_subgroup_dimension(t: &RootOfUnityTuple, zeta: &CyclotomicNumber) -> Result<SubgroupResult, TorusError> {
    let n = t.n;
    if n > PARTITION_CAP {
        return Err(TorusError::TooLarge(n));
    }
    let field = t.field();
    let zeta = zeta.lift(&field).map_err(|_| TorusError::SumMismatch)?;
    if t.sum_of_roots() != zeta {
        return Err(TorusError::SumMismatch);
    }
    let mut coeffs = vec![zeta.neg_ref()];
    coeffs.extend(t.exponents.iter().map(|&k| CyclotomicNumber::zeta_pow(&field, k as i64)));
    let approx: Vec<Complex64> = coeffs.iter().map(|c| c.embed(1, 64).map(|z| z.to_c64()).unwrap_or_default()).collect();
    // zero-sum subsets of {0..n}
    let zero: Vec<bool> = (0..1usize << (n + 1))
        .map(|mask| {
            if mask == 0 {
                return true;
            }
            let idx: Vec<usize> = (0..=n).filter(|i| mask >> i & 1 == 1).collect();
            let s: Complex64 = idx.iter().map(|&i| approx[i]).sum();
            s.norm() < 1e-6 && idx.iter().fold(CyclotomicNumber::zero(&field), |acc, &i| acc.add_ref(&coeffs[i])).is_zero()
        })
        .collect();

    let mut best: Option<(usize, ZeroSumPartition, SubgroupLattice)> = None;
    restricted_growth_strings(n + 1, |s, k| {
        let mut masks = vec![0usize; k];
        for (i, &b) in s.iter().enumerate() {
            masks[b] |= 1 << i;
        }
        if !masks.iter().all(|&m| zero[m]) {
            return;
        }
        let blocks: Vec<Vec<usize>> = masks.iter().map(|&m| (0..=n).filter(|i| m >> i & 1 == 1).collect()).collect();
        let p = ZeroSumPartition { blocks };
        let lat = p.lattice(n);
        if best.as_ref().map_or(true, |(d, _, _)| lat.dimension > *d) {
            best = Some((lat.dimension, p, lat));
        }
    });
    let (dimension, p, lattice) = best.expect("the one-block partition always has zero sum");
    let witness = (dimension > 0).then_some(p);
    Ok(SubgroupResult { dimension, witness, lattice })
}

/// Rational nullspace of integer rows.
fn nullspace(rows: &[Vec<i64>], n: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !Zero::is_zero(&m[i][c])) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !Zero::is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                let row_r = m[r].clone();
                for (a, b) in m[i].iter_mut().zip(row_r) {
                    *a = &*a - &f * b;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); n];
            v[free] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[i][free].clone();
            }
            v
        })
        .collect()
}

const PREC: u32 = 256;

fn residual(eps: &[Complex], h: &[Complex], zeta: &Complex) -> Real {
    let s = eps.iter().zip(h).fold(Complex::zero(PREC), |acc, (e, x)| acc.add(&e.mul(x)));
    s.sub(zeta).abs()
}

/// Samples points of the identity component of `H` and checks
/// `Σ ε_i h_i = ζ` to `10⁻²⁰` at 256 bits.
pub fn verify_coset_containment(t: &RootOfUnityTuple, zeta: &CyclotomicNumber, h: &SubgroupLattice, samples: usize, seed: u64) -> bool {
    let eps: Vec<Complex> = t.exponents.iter().map(|&k| Complex::root_of_unity(k as i64, t.order, PREC)).collect();
    let Ok(z) = zeta.embed(1, PREC) else { return false };
    let tol = Real::from_f64(1e-20, PREC);
    let tangent = h.tangent_basis();
    if tangent.is_empty() {
        let ones = vec![Complex::one(PREC); t.n];
        return residual(&eps, &ones, &z) < tol;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let c: Vec<(f64, f64)> = tangent.iter().map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-3.2..3.2))).collect();
        let h: Vec<Complex> = (0..t.n)
            .map(|j| {
                let w = tangent.iter().zip(&c).fold(Complex::zero(PREC), |acc, (v, (re, im))| {
                    let vj = Real::from_rational(&v[j], PREC);
                    acc.add(&Complex::from_f64(*re, *im, PREC).scale(&vj))
                });
                w.exp()
            })
            .collect();
        residual(&eps, &h, &z) < tol
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlwVerdict {
    /// The path leaves `{Σ ε_i x_i = ζ}`; the check does not apply.
    NotContained,
    Constant,
    /// Contained and non-constant; expected only with a vanishing subsum.
    PositiveDimensional,
    /// Contained, non-constant and without a vanishing subsum.
    Violation,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlwReport {
    pub verdict: AlwVerdict,
    pub max_residual: f64,
    pub max_deviation: f64,
    pub vanishing_subsum: bool,
}

/// Samples `x(s) = exp(w(s))` along a path of log coordinates `w` for
/// `s ∈ [0, 1]` and checks the consequence of Ax-Lindemann used for the
/// no-vanishing-subsum case: a path inside `{Σ ε_i x_i = ζ}` is constant.
pub fn alw_closure_check(
    t: &RootOfUnityTuple,
    zeta: &CyclotomicNumber,
    path: &(dyn Fn(&Real) -> Vec<Complex> + Sync),
    samples: usize,
    prec: u32,
) -> Result<AlwReport, TorusError> {
    let eps: Vec<Complex> = t.exponents.iter().map(|&k| Complex::root_of_unity(k as i64, t.order, prec)).collect();
    let z = zeta.embed(1, prec).map_err(|_| TorusError::SumMismatch)?;
    let pts: Vec<Vec<Complex>> = (0..=samples)
        .into_par_iter()
        .map(|i| {
            let s = Real::from_i64(i as i64, prec).div_i64(samples.max(1) as i64);
            let w = path(&s);
            if w.len() != t.n {
                return Err(TorusError::Sampler { got: w.len(), want: t.n });
            }
            Ok(w.iter().map(|v| v.exp()).collect())
        })
        .collect::<Result<_, _>>()?;
    let sum = |x: &[Complex]| eps.iter().zip(x).fold(Complex::zero(prec), |acc, (e, v)| acc.add(&e.mul(v)));
    let max_residual = pts.iter().map(|x| sum(x).sub(&z).abs().to_f64()).fold(0.0, f64::max);
    let max_deviation = pts
        .iter()
        .map(|x| x.iter().zip(&pts[0]).map(|(a, b)| a.sub(b).abs().to_f64()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let vanishing_subsum = t.has_vanishing_subsum().unwrap_or(true);
    let tol = 2f64.powi(-(prec as i32) / 2);
    let verdict = if max_residual > tol {
        AlwVerdict::NotContained
    } else if max_deviation <= tol {
        AlwVerdict::Constant
    } else if vanishing_subsum {
        AlwVerdict::PositiveDimensional
    } else {
        AlwVerdict::Violation
    };
    Ok(AlwReport { verdict, max_residual, max_deviation, vanishing_subsum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::CyclotomicField;

    #[test]
    fn partitions_count_bell() {
        let mut n = 0;
        restricted_growth_strings(5, |_, _| n += 1);
        assert_eq!(n, 52);
    }

    #[test]
    fn examples() {
        let t = RootOfUnityTuple::new(1, vec![0, 0]).unwrap();
        let r = maximal_subgroup_dimension(&t, &t.sum_of_roots()).unwrap();
        assert_eq!(r.dimension, 0);
        assert!(r.witness.is_none());

        let t = RootOfUnityTuple::new(4, vec![1, 3]).unwrap();
        let r = maximal_subgroup_dimension(&t, &t.sum_of_roots()).unwrap();
        assert_eq!(r.dimension, 1);
        assert_eq!(r.witness.clone().unwrap().blocks, vec![vec![0], vec![1, 2]]);
        assert_eq!(r.lattice.basis, vec![vec![1, -1]]);
        assert!(verify_coset_containment(&t, &t.sum_of_roots(), &r.lattice, 100, 1));

        let t = RootOfUnityTuple::new(3, vec![1, 2, 0]).unwrap();
        let r = maximal_subgroup_dimension(&t, &t.sum_of_roots()).unwrap();
        assert_eq!(r.dimension, 1);

        // (1,1), ζ = 2 against the diagonal torus
        let t = RootOfUnityTuple::new(1, vec![0, 0]).unwrap();
        let diag = ZeroSumPartition { blocks: vec![vec![0], vec![1, 2]] }.lattice(2);
        assert!(!verify_coset_containment(&t, &t.sum_of_roots(), &diag, 10, 1));
        assert!(verify_coset_containment(&t, &t.sum_of_roots(), &SubgroupLattice::trivial(2), 10, 1));

        let big = RootOfUnityTuple::new(2, vec![0; 9]).unwrap();
        assert_eq!(maximal_subgroup_dimension(&big, &big.sum_of_roots()).unwrap_err(), TorusError::TooLarge(9));
        let wrong = CyclotomicNumber::from_int(&CyclotomicField::new(1), 3);
        assert_eq!(maximal_subgroup_dimension(&t, &wrong).unwrap_err(), TorusError::SumMismatch);
    }

    #[test]
    fn alw_examples() {
        let prec = 128;
        let t = RootOfUnityTuple::new(4, vec![1, 3]).unwrap();
        let z = t.sum_of_roots();
        let constant = |_: &Real| vec![Complex::zero(prec), Complex::zero(prec)];
        assert_eq!(alw_closure_check(&t, &z, &constant, 8, prec).unwrap().verdict, AlwVerdict::Constant);
        let diag = |s: &Real| {
            let w = Complex::new(s.clone(), s.mul_i64(2));
            vec![w.clone(), w]
        };
        assert_eq!(alw_closure_check(&t, &z, &diag, 8, prec).unwrap().verdict, AlwVerdict::PositiveDimensional);
        let off = |s: &Real| vec![Complex::from_real(s.clone()), Complex::zero(prec)];
        assert_eq!(alw_closure_check(&t, &z, &off, 8, prec).unwrap().verdict, AlwVerdict::NotContained);
        let bad = |_: &Real| vec![Complex::zero(prec)];
        assert!(alw_closure_check(&t, &z, &bad, 2, prec).is_err());
    }
}
