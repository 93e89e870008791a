//! Reduction of a specialized section modulo primes of the base field.
//!
//! Under good reduction `P ↦ P̄` is a group homomorphism, so `mP = O`
//! forces `mP̄ = O`. A prime where `f_m(x̄0) ≠ 0` therefore refutes order
//! `m` outright, and the set of `m` killing `P̄` is exactly the multiples of
//! `ord(P̄)`.

use num_rational::BigRational;

use super::curve::WeierstrassCurve;
use super::divpoly::DivisionValues;
use super::scheme::EllipticScheme;
use crate::arith::fp::{primes_one_mod, Fq};
use crate::arith::quotient::QElem;
use crate::arith::ratfunc::RationalFunction;
use crate::arith::ring::Ring;
use crate::extension::{FieldTower, TowerElement};

pub struct Reduced<R: Ring> {
    pub curve: WeierstrassCurve<R>,
    values: DivisionValues<R>,
}

impl<R: Ring> Reduced<R> {
    fn new(curve: WeierstrassCurve<R>, x0: R) -> Self {
        let y0_sq = curve.cubic(&x0);
        let values = DivisionValues::new(&curve, &x0, &y0_sq);
        Reduced { curve, values }
    }

    fn kills(&mut self, m: u64) -> bool {
        // residue rings here are fields
        self.values.kills(m).unwrap_or(false)
    }
}

pub enum ReducedSection {
    Prime(Reduced<Fq>),
    Extension(Reduced<QElem<Fq>>),
}

impl ReducedSection {
    /// Reduces the fiber at `λ0` modulo a prime above `q`. `None` when `q`
    /// ramifies, divides a denominator or the fiber has bad reduction there.
    pub fn new(scheme: &EllipticScheme, tower: &FieldTower, lambda: &TowerElement, q: u64) -> Option<Self> {
        let red = tower.reduce_mod_prime(q).ok()?;
        let lam = red.map_element(lambda)?;
        let ring = red.residue.clone();
        let embed = |r: &BigRational| red.map_rational(r).map(|v| ring.from_base(v));
        for f in [&scheme.a, &scheme.b, &scheme.c, &scheme.section_x] {
            for c in f.num().coeffs().iter().chain(f.den().coeffs()) {
                embed(c)?;
            }
        }
        let ev = |f: &RationalFunction| f.eval_in(&lam, |r| embed(r).unwrap()).ok();
        let curve = WeierstrassCurve::new(ev(&scheme.a)?, ev(&scheme.b)?, ev(&scheme.c)?);
        if curve.discriminant().is_zero() {
            return None;
        }
        let x0 = ev(&scheme.section_x)?;
        if red.residue_degree() == 1 {
            let down = |z: &QElem<Fq>| z.dense_coeffs()[0];
            Some(ReducedSection::Prime(Reduced::new(curve.map(down), down(&x0))))
        } else {
            Some(ReducedSection::Extension(Reduced::new(curve, x0)))
        }
    }

    /// The fiber at a parameter value `λ̄ ∈ F_q` already reduced.
    pub fn at_fq(scheme: &EllipticScheme, lambda: Fq) -> Option<Self> {
        let q = lambda.modulus();
        let embed = |r: &BigRational| Fq::from_ratio(r.numer(), r.denom(), q);
        for f in [&scheme.a, &scheme.b, &scheme.c, &scheme.section_x] {
            for c in f.num().coeffs().iter().chain(f.den().coeffs()) {
                embed(c)?;
            }
        }
        let ev = |f: &RationalFunction| f.eval_in(&lambda, |r| embed(r).unwrap()).ok();
        let curve = WeierstrassCurve::new(ev(&scheme.a)?, ev(&scheme.b)?, ev(&scheme.c)?);
        if curve.discriminant().is_zero() {
            return None;
        }
        let x0 = ev(&scheme.section_x)?;
        Some(ReducedSection::Prime(Reduced::new(curve, x0)))
    }

    pub fn kills(&mut self, m: u64) -> bool {
        match self {
            ReducedSection::Prime(r) => r.kills(m),
            ReducedSection::Extension(r) => r.kills(m),
        }
    }

    /// `ord(P̄)` if it is at most `bound`.
    pub fn order(&mut self, bound: u64) -> Option<u64> {
        (1..=bound).find(|&m| self.kills(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prescreen {
    Pass,
    Fail { q: u64 },
}

/// Necessary test for `mP = O` over the given primes; bad primes are
/// skipped. `m = 1` fails immediately since the section is affine.
pub fn torsion_prescreen(scheme: &EllipticScheme, tower: &FieldTower, lambda: &TowerElement, m: u64, primes: &[u64]) -> Prescreen {
    if m <= 1 {
        return Prescreen::Fail { q: 0 };
    }
    for &q in primes {
        if let Some(mut r) = ReducedSection::new(scheme, tower, lambda, q) {
            if !r.kills(m) {
                return Prescreen::Fail { q };
            }
        }
    }
    Prescreen::Pass
}

/// The first `count` primes `q ≡ 1 (mod N)` above `floor` at which the
/// fiber has good reduction.
pub fn good_reductions(scheme: &EllipticScheme, tower: &FieldTower, lambda: &TowerElement, count: usize, floor: u64) -> Vec<(u64, ReducedSection)> {
    primes_one_mod(tower.base().conductor(), floor)
        .take(count * 8 + 32)
        .filter_map(|q| ReducedSection::new(scheme, tower, lambda, q).map(|r| (q, r)))
        .take(count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{CyclotomicField, CyclotomicNumber};

    fn at(v: i64) -> (FieldTower, TowerElement) {
        let t = FieldTower::linear(&CyclotomicNumber::from_int(&CyclotomicField::new(1), v));
        let g = t.generator();
        (t, g)
    }

    #[test]
    fn legendre_examples() {
        let s = EllipticScheme::legendre(2);
        let (t, l) = at(2);
        assert_eq!(torsion_prescreen(&s, &t, &l, 2, &[7]), Prescreen::Pass);
        let (t, l) = at(3);
        assert_eq!(torsion_prescreen(&s, &t, &l, 3, &[11]), Prescreen::Fail { q: 11 });
        assert_eq!(torsion_prescreen(&s, &t, &l, 1, &[11]), Prescreen::Fail { q: 0 });
    }

    #[test]
    fn extension_residue() {
        // λ = −4 + 4√2 has order 3; q = 5 is inert in Q(√2) ⊂ Q(ζ8) only if
        // it is ≡ ±3 mod 8, so use a prime ≡ 1 mod 8 and a quadratic tower.
        let s = EllipticScheme::legendre(2);
        let k = CyclotomicField::new(1);
        let g = crate::arith::poly::Poly::new(vec![-16, 8, 1].into_iter().map(|v| CyclotomicNumber::from_int(&k, v)).collect());
        let t = crate::extension::make_tower(&k, &g).unwrap();
        let lam = t.generator();
        for (q, mut r) in good_reductions(&s, &t, &lam, 6, 3) {
            assert_eq!(r.order(20), Some(3), "q = {q}");
        }
    }
}
