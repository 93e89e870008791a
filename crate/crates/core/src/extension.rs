//! Relative extensions `L = Q(ζ_N)[t]/(g)` and their reductions modulo
//! primes.
//!
//! `g` is only required to be squarefree. If it is reducible, `L` is a
//! product of fields and arithmetic follows the zero-divisor splitting
//! contract of [`QuotientRing`]: the caller splits `g` by the reported factor.

use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::fp::{element_of_order, is_irreducible, is_squarefree, least_degree_factor, Fq};
use crate::arith::linalg::DependencyFinder;
use crate::arith::poly::Poly;
use crate::arith::quotient::{QElem, QuotientRing};
use crate::arith::ring::{format_rational, parse_rational, Ring};
use crate::cyclotomic::field::{CyclotomicError, CyclotomicField, CyclotomicJson, CyclotomicNumber};
use crate::precise::roots::{polynomial_roots, RootApprox};
use crate::precise::Complex;

pub type TowerElement = QElem<CyclotomicNumber>;
pub type BasePoly = Poly<CyclotomicNumber>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("defining polynomial must be monic of positive degree")]
    NotMonic,
    #[error("bad prime {q}: {reason}")]
    BadPrime { q: u64, reason: String },
    #[error("roots not isolated at {bits} bits; more precision needed")]
    Precision { bits: u32 },
    #[error(transparent)]
    Cyclotomic(#[from] CyclotomicError),
}

#[derive(Debug, Clone)]
pub struct FieldTower {
    base: Arc<CyclotomicField>,
    ring: Arc<QuotientRing<CyclotomicNumber>>,
    removed_multiplicity: usize,
}

impl PartialEq for FieldTower {
    fn eq(&self, o: &Self) -> bool {
        self.base.conductor() == o.base.conductor() && self.ring.modulus() == o.ring.modulus()
    }
}

/// Replaces `g` by its squarefree part; reports how many degrees were removed.
pub fn make_tower(base: &Arc<CyclotomicField>, g: &BasePoly) -> Result<FieldTower, TowerError> {
    if g.is_zero() {
        return Err(TowerError::ZeroPolynomial);
    }
    if !g.is_monic() || g.degree() == Some(0) {
        return Err(TowerError::NotMonic);
    }
    let sf = g.squarefree_part().unwrap_or_else(|e| match e {
        crate::arith::ring::InvError::Zero => unreachable!(),
        crate::arith::ring::InvError::ZeroDivisor(n) => match n {},
    });
    let removed = g.degree().unwrap() - sf.degree().unwrap();
    Ok(FieldTower { base: base.clone(), ring: QuotientRing::new(sf), removed_multiplicity: removed })
}

impl FieldTower {
    /// The trivial tower `base[t]/(t - c)`, i.e. the base field itself.
    pub fn linear(c: &CyclotomicNumber) -> FieldTower {
        let g = Poly::new(vec![c.neg_ref(), c.one_like()]);
        make_tower(c.field(), &g).unwrap()
    }

    pub fn base(&self) -> &Arc<CyclotomicField> {
        &self.base
    }

    pub fn ring(&self) -> &Arc<QuotientRing<CyclotomicNumber>> {
        &self.ring
    }

    pub fn defining_poly(&self) -> &BasePoly {
        self.ring.modulus()
    }

    pub fn relative_degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn absolute_degree(&self) -> usize {
        self.base.degree() * self.relative_degree()
    }

    pub fn removed_multiplicity(&self) -> usize {
        self.removed_multiplicity
    }

    /// The class of `t`: the point `P` itself.
    pub fn generator(&self) -> TowerElement {
        self.ring.generator()
    }

    pub fn from_base(&self, c: CyclotomicNumber) -> TowerElement {
        self.ring.from_base(c)
    }

    pub fn from_rational(&self, r: &BigRational) -> TowerElement {
        self.ring.from_base(CyclotomicNumber::from_rational(&self.base, r))
    }

    /// When the tower has degree one, the base value of an element.
    pub fn as_base(&self, z: &TowerElement) -> Option<CyclotomicNumber> {
        if self.relative_degree() == 1 {
            Some(z.dense_coeffs().remove(0))
        } else {
            None
        }
    }

    fn flatten(&self, z: &TowerElement) -> Vec<BigRational> {
        z.dense_coeffs().iter().flat_map(|c| c.coeffs()).collect()
    }

    /// Minimal polynomial over Q of `z` (exact, by linear algebra on powers).
    /// For a reducible `g` this is the lcm over the factors.
    pub fn minimal_polynomial(&self, z: &TowerElement) -> Poly<BigRational> {
        if let Some(c) = self.as_base(z) {
            return c.minimal_polynomial();
        }
        let dim = self.absolute_degree();
        let mut f = DependencyFinder::new(dim);
        let mut p = self.ring.one();
        loop {
            if let Some(c) = f.insert(self.flatten(&p)) {
                let mut coeffs: Vec<BigRational> = c.iter().map(|x| -x).collect();
                coeffs.push(BigRational::from_integer(1.into()));
                return Poly::new(coeffs);
            }
            p = p.mul_ref(z);
        }
    }

    pub fn element_degree(&self, z: &TowerElement) -> usize {
        if let Some(c) = self.as_base(z) {
            return c.degree_over_q();
        }
        self.minimal_polynomial(z).degree().unwrap()
    }

    /// Roots of `g` under the embedding `ζ -> e^{2πij/N}`, sorted by
    /// (real, imaginary) part.
    pub fn complex_roots(&self, j: u64, prec: u32) -> Result<Vec<RootApprox<Complex>>, TowerError> {
        let wp = prec + 32;
        let coeffs = self
            .defining_poly()
            .coeffs()
            .iter()
            .map(|c| c.embed(j, wp))
            .collect::<Result<Vec<_>, _>>()?;
        let (roots, isolated) = polynomial_roots(&coeffs).map_err(|_| TowerError::Precision { bits: prec })?;
        let ok = roots.iter().all(|r| r.radius_log2 < -(prec as f64) + 8.0);
        if !isolated || !ok {
            return Err(TowerError::Precision { bits: prec });
        }
        Ok(roots
            .into_iter()
            .map(|r| RootApprox { value: r.value.with_prec(prec), radius_log2: r.radius_log2 })
            .collect())
    }

    /// Value of `z` at the embedding `j` and a chosen complex root of `g`.
    pub fn embed_element(&self, z: &TowerElement, j: u64, root: &Complex) -> Result<Complex, TowerError> {
        let p = root.prec();
        let mut acc = Complex::zero(p);
        for c in z.dense_coeffs().iter().rev() {
            acc = acc.mul(root).add(&c.embed(j, p + 16)?.with_prec(p));
        }
        Ok(acc)
    }

    pub fn reduce_mod_prime(&self, q: u64) -> Result<FiniteReduction, TowerError> {
        let n = self.base.conductor();
        let bad = |reason: &str| TowerError::BadPrime { q, reason: reason.to_string() };
        if q < 3 || !crate::arith::fp::is_prime(q) || q >= 1 << 32 {
            return Err(bad("not an odd prime below 2^32"));
        }
        let zeta = element_of_order(n, q).ok_or_else(|| bad("q is not 1 mod N"))?;
        let red = |c: &CyclotomicNumber| map_cyclotomic(c, zeta);
        let g_image: Poly<Fq> = Poly::new(
            self.defining_poly().coeffs().iter().map(|c| red(c).ok_or_else(|| bad("denominator divisible by q"))).collect::<Result<_, _>>()?,
        );
        if g_image.degree() != self.defining_poly().degree() || !is_squarefree(&g_image) {
            return Err(bad("q divides the discriminant of g"));
        }
        let h = least_degree_factor(&g_image, q);
        let residue = QuotientRing::new(h.clone());
        Ok(FiniteReduction { q, zeta_image: zeta, g_image, factor: h, residue })
    }

    /// Irreducibility certificate: a prime `q ≡ 1 (mod N)` modulo which `g`
    /// stays irreducible. Such `q` has a residue-degree-one prime above it in
    /// the base, and irreducibility there lifts to the base field. `Some(0)`
    /// marks the trivial linear case.
    pub fn irreducible_by_reduction(&self, tries: usize) -> Option<u64> {
        if self.relative_degree() == 1 {
            return Some(0);
        }
        crate::arith::fp::primes_one_mod(self.base.conductor(), 2)
            .take(tries)
            .find(|&q| self.reduce_mod_prime(q).map(|r| is_irreducible(&r.g_image)).unwrap_or(false))
    }

    pub fn to_json(&self) -> TowerJson {
        TowerJson { n: self.base.conductor(), g: self.defining_poly().coeffs().iter().map(|c| c.to_json().coeffs).collect() }
    }

    pub fn from_json(j: &TowerJson) -> Result<FieldTower, TowerError> {
        let base = CyclotomicField::new(j.n);
        let g = Poly::new(
            j.g.iter()
                .map(|cs| CyclotomicNumber::from_json(&CyclotomicJson { n: j.n, coeffs: cs.clone() }))
                .collect::<Result<Vec<_>, _>>()?,
        );
        make_tower(&base, &g)
    }

    pub fn element_to_json(&self, z: &TowerElement) -> Vec<Vec<String>> {
        z.dense_coeffs().iter().map(|c| c.coeffs().iter().map(format_rational).collect()).collect()
    }

    pub fn element_from_json(&self, v: &[Vec<String>]) -> Result<TowerElement, TowerError> {
        let coeffs = v
            .iter()
            .map(|cs| {
                let r = cs
                    .iter()
                    .map(|s| parse_rational(s).ok_or_else(|| CyclotomicError::BadRational(s.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                CyclotomicNumber::from_coeffs(&self.base, &r)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.ring.element(Poly::new(coeffs)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    #[serde(rename = "N")]
    pub n: u64,
    pub g: Vec<Vec<String>>,
}

/// Image of `c` under `ζ -> zeta`; `None` if `q` divides the denominator.
pub fn map_cyclotomic(c: &CyclotomicNumber, zeta: Fq) -> Option<Fq> {
    let q = zeta.modulus();
    let (num, den) = c.numerators();
    let d = Fq::from_ratio(&1.into(), den, q)?;
    let mut acc = Fq::from_u64(0, q);
    for k in num.iter().rev() {
        acc = acc.mul_ref(&zeta).add_ref(&Fq::from_ratio(k, &1.into(), q).unwrap());
    }
    Some(acc.mul_ref(&d))
}

/// Reduction of a tower modulo a prime of residue degree `e = deg factor`.
#[derive(Debug, Clone)]
pub struct FiniteReduction {
    pub q: u64,
    pub zeta_image: Fq,
    pub g_image: Poly<Fq>,
    pub factor: Poly<Fq>,
    pub residue: Arc<QuotientRing<Fq>>,
}

impl FiniteReduction {
    pub fn residue_degree(&self) -> usize {
        self.factor.degree().unwrap()
    }

    /// The image of `t`, a root of `g` in `F_{q^e}`.
    pub fn chosen_root(&self) -> QElem<Fq> {
        self.residue.generator()
    }

    pub fn map_base(&self, c: &CyclotomicNumber) -> Option<QElem<Fq>> {
        Some(self.residue.from_base(map_cyclotomic(c, self.zeta_image)?))
    }

    pub fn map_element(&self, z: &TowerElement) -> Option<QElem<Fq>> {
        let u = self.chosen_root();
        let mut acc = self.residue.zero();
        for c in z.dense_coeffs().iter().rev() {
            acc = acc.mul_ref(&u).add_ref(&self.map_base(c)?);
        }
        Some(acc)
    }

    pub fn map_rational(&self, r: &BigRational) -> Option<Fq> {
        Fq::from_ratio(r.numer(), r.denom(), self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ring::rat;

    fn qpoly(field: &Arc<CyclotomicField>, c: &[i64]) -> BasePoly {
        Poly::new(c.iter().map(|&v| CyclotomicNumber::from_int(field, v)).collect())
    }

    #[test]
    fn towers() {
        let q = CyclotomicField::new(1);
        let t = make_tower(&q, &qpoly(&q, &[-2, 0, 1])).unwrap();
        let y = t.generator();
        assert_eq!(y.mul_ref(&y), t.from_rational(&rat(2)));
        let inv = y.try_inv().unwrap();
        assert!(inv.mul_ref(&y).is_one());
        assert_eq!(t.element_degree(&y), 2);
        assert_eq!(t.element_degree(&t.from_rational(&rat(3))), 1);
        let roots = t.complex_roots(1, 128).unwrap();
        assert!((roots[0].value.re.to_f64() + std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(t.irreducible_by_reduction(10).is_some());
        // squarefree part is taken
        let t2 = make_tower(&q, &qpoly(&q, &[1, -2, 1])).unwrap();
        assert_eq!((t2.relative_degree(), t2.removed_multiplicity()), (1, 1));
        assert!(make_tower(&q, &qpoly(&q, &[1, 2])).is_err());
        let j = t.to_json();
        assert_eq!(FieldTower::from_json(&j).unwrap(), t);
    }

    #[test]
    fn cyclotomic_generator_and_reduction() {
        let q = CyclotomicField::new(1);
        // Q[t]/Phi_5
        let t = make_tower(&q, &qpoly(&q, &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(t.element_degree(&t.generator()), 4);
        let k8 = CyclotomicField::new(8);
        let s = CyclotomicNumber::zeta_pow(&k8, 1).add_ref(&CyclotomicNumber::zeta_pow(&k8, 7));
        let lam = s.mul_ref(&CyclotomicNumber::from_int(&k8, 4)).sub_ref(&CyclotomicNumber::from_int(&k8, 4));
        let t8 = FieldTower::linear(&lam);
        assert_eq!(t8.element_degree(&t8.generator()), 2);
        assert_eq!(t8.minimal_polynomial(&t8.generator()), Poly::from_ints(&[-16, 8, 1]));
        let r = t8.reduce_mod_prime(17).unwrap();
        assert_eq!(crate::arith::fp::multiplicative_order(r.zeta_image), 8);
        let z4 = make_tower(&CyclotomicField::new(4), &qpoly(&CyclotomicField::new(4), &[-2, 1])).unwrap();
        let r = z4.reduce_mod_prime(5).unwrap();
        assert!(r.zeta_image.value() == 2 || r.zeta_image.value() == 3);
        assert!(z4.reduce_mod_prime(7).is_err());
        let seven = make_tower(&q, &qpoly(&q, &[-2, 1])).unwrap().reduce_mod_prime(7).unwrap();
        assert_eq!(seven.map_element(&FieldTower::linear(&CyclotomicNumber::from_int(&q, 2)).generator()).unwrap().rep().coeffs()[0].value(), 2);
    }
}
