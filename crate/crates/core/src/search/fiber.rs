use std::sync::Arc;

use thiserror::Error;

use crate::arith::poly::Poly;
use crate::arith::ratfunc::{QPoly, RationalFunction};
use crate::cyclotomic::{CyclotomicField, CyclotomicNumber};
use crate::extension::{make_tower, BasePoly, FieldTower, TowerError};
use crate::precise::roots::RootApprox;
use crate::precise::Complex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiberError {
    #[error("f must be non-constant")]
    ConstantF,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Solutions of `f(λ) = ζ`: `λ` is the class of `t` in the tower.
#[derive(Debug, Clone)]
pub struct FiberSolution {
    /// `None` when `f(λ) = ζ` has no finite solution.
    pub tower: Option<FieldTower>,
    /// Degrees dropped when passing to the squarefree part.
    pub multiplicity_removed: usize,
}

impl FiberSolution {
    pub fn roots(&self, prec: u32) -> Result<Vec<RootApprox<Complex>>, TowerError> {
        match &self.tower {
            Some(t) => t.complex_roots(1, prec),
            None => Ok(Vec::new()),
        }
    }
}

pub fn lift_qpoly(field: &Arc<CyclotomicField>, p: &QPoly) -> BasePoly {
    Poly::new(p.coeffs().iter().map(|c| CyclotomicNumber::from_rational(field, c)).collect())
}

/// `num(f) − ζ·den(f)` made monic, with the common factor with `den(f)`
/// removed, then its squarefree part.
pub fn solve_fiber(f: &RationalFunction, zeta: &CyclotomicNumber) -> Result<FiberSolution, FiberError> {
    if f.is_constant() {
        return Err(FiberError::ConstantF);
    }
    let field = zeta.field().clone();
    let num = lift_qpoly(&field, f.num());
    let den = lift_qpoly(&field, f.den());
    let mut g = num.sub(&den.scale(zeta));
    if g.degree().unwrap_or(0) == 0 {
        return Ok(FiberSolution { tower: None, multiplicity_removed: 0 });
    }
    g = g.monic().expect("field coefficients");
    // roots of g at poles of f cannot occur when num and den are coprime,
    // but a shared factor is removed anyway
    let common = g.gcd(&den).expect("field coefficients");
    if common.degree().unwrap_or(0) > 0 {
        g = g.divrem(&common).expect("field coefficients").0.monic().expect("field coefficients");
    }
    let before = g.degree().unwrap();
    let tower = make_tower(&field, &g)?;
    let after = tower.relative_degree();
    Ok(FiberSolution { tower: Some(tower), multiplicity_removed: before - after })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> CyclotomicNumber {
        CyclotomicNumber::from_int(&CyclotomicField::new(1), 2)
    }

    #[test]
    fn examples() {
        let s = solve_fiber(&RationalFunction::parse("lambda").unwrap(), &two()).unwrap();
        let t = s.tower.unwrap();
        assert_eq!(t.relative_degree(), 1);
        assert_eq!(t.as_base(&t.generator()), Some(two()));

        let s = solve_fiber(&RationalFunction::parse("lambda^2").unwrap(), &two()).unwrap();
        let roots = s.roots(64).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value.to_c64().re + 2f64.sqrt()).abs() < 1e-12);

        let s = solve_fiber(&RationalFunction::parse("(lambda^2+1)/lambda").unwrap(), &two()).unwrap();
        assert_eq!(s.multiplicity_removed, 1);
        let t = s.tower.unwrap();
        assert_eq!(t.as_base(&t.generator()), Some(CyclotomicNumber::from_int(&CyclotomicField::new(1), 1)));

        assert_eq!(solve_fiber(&RationalFunction::parse("3").unwrap(), &two()).unwrap_err(), FiberError::ConstantF);
        // f = 1/λ never equals 0
        let z = CyclotomicNumber::zero(&CyclotomicField::new(1));
        assert!(solve_fiber(&RationalFunction::parse("1/lambda").unwrap(), &z).unwrap().tower.is_none());
    }
}
