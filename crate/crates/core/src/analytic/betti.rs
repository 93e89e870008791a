use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::ellog::elliptic_log;
use super::lattice::{period_lattice, PeriodLattice};
use super::AnalyticError;
use crate::arith::ratfunc::{QPoly, RationalFunction};
use crate::elliptic::EllipticScheme;
use crate::precise::Cx;

/// `(b1, b2) ∈ [0,1)²` with `z ≡ b1 ω1 + b2 ω2`. The values are carried in
/// the real part of `C`.
#[derive(Debug, Clone)]
pub struct BettiCoords<C> {
    pub b1: C,
    pub b2: C,
    pub err_log2: f64,
}

impl<C: Cx> BettiCoords<C> {
    pub fn to_f64(&self) -> (f64, f64) {
        (self.b1.to_c64().re, self.b2.to_c64().re)
    }
}

fn frac<C: Cx>(b: &C) -> C {
    let fl: i64 = (&b.floor_re()).try_into().unwrap_or(0);
    let f = b.sub(&b.from_int_like(fl));
    // values within a few ulps below 1 are taken as 0
    if b.from_int_like(1).sub(&f).log2_abs() < -(b.bits() as f64) + 4.0 {
        b.from_int_like(0)
    } else {
        f
    }
}

pub fn betti_coordinates<C: Cx>(z: &C, lat: &PeriodLattice<C>, z_err_log2: f64) -> BettiCoords<C> {
    let (b1, b2) = lat.coordinates(z);
    let cond = lat.tau.log2_abs().max(0.0) + 1.0 - lat.tau.im_part().log2_abs() - lat.w1.log2_abs();
    let err = z_err_log2.max(lat.err_log2 + z.log2_abs() - lat.w1.log2_abs()) + cond + 1.0;
    BettiCoords { b1: frac(&b1), b2: frac(&b2), err_log2: err.max(-(z.bits() as f64) + 8.0) }
}

/// Principal `log(x_j) / 2πi`; the real part lies in `(−1/2, 1/2]`.
pub fn a_coordinates<C: Cx>(xs: &[C]) -> Result<Vec<C>, AnalyticError> {
    xs.iter()
        .map(|x| {
            if x.is_zero() {
                return Err(AnalyticError::ZeroCoordinate);
            }
            let two_pi_i = x.pi_like().mul_int(2).mul_i();
            Ok(x.ln().div(&two_pi_i))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LogPoint<C> {
    pub betti: BettiCoords<C>,
    pub a: Vec<C>,
    pub z: C,
    pub lattice: PeriodLattice<C>,
}

pub(crate) fn eval_qpoly<C: Cx>(p: &QPoly, x: &C) -> C {
    let mut acc = x.from_int_like(0);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(x).add(&x.from_rational_like(c));
    }
    acc
}

pub fn eval_rf<C: Cx>(f: &RationalFunction, x: &C) -> Result<C, AnalyticError> {
    let d = eval_qpoly(f.den(), x);
    if d.is_zero() {
        return Err(AnalyticError::Pole);
    }
    Ok(eval_qpoly(f.num(), x).div(&d))
}

/// Curve coefficients, section abscissa and `y0²` at a numeric `λ0`.
pub fn specialize_numeric<C: Cx>(scheme: &EllipticScheme, lambda: &C) -> Result<([C; 3], C, C), AnalyticError> {
    let a = eval_rf(&scheme.a, lambda)?;
    let b = eval_rf(&scheme.b, lambda)?;
    let c = eval_rf(&scheme.c, lambda)?;
    let x0 = eval_rf(&scheme.section_x, lambda)?;
    let y2 = x0.mul(&x0).mul(&x0).add(&a.mul(&x0).mul(&x0)).add(&b.mul(&x0)).add(&c);
    Ok(([a, b, c], x0, y2))
}

/// Read-mostly cache of period lattices keyed by the exact coefficient
/// representation.
pub struct LatticeCache<C> {
    map: RwLock<HashMap<String, Arc<PeriodLattice<C>>>>,
}

impl<C: Cx> Default for LatticeCache<C> {
    fn default() -> Self {
        LatticeCache { map: RwLock::new(HashMap::new()) }
    }
}

impl<C: Cx> LatticeCache<C> {
    pub fn get(&self, a: &C, b: &C, c: &C) -> Result<Arc<PeriodLattice<C>>, AnalyticError> {
        let key = format!("{:?}|{:?}|{:?}|{}", a, b, c, a.bits());
        if let Some(l) = self.map.read().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let l = Arc::new(period_lattice(a, b, c)?);
        Ok(self.map.write().unwrap().entry(key).or_insert(l).clone())
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(b1, b2, a1, …, an)` for the section at `λ0` (principal `y`) and the
/// torus point `eps`.
pub fn theta_map<C: Cx>(scheme: &EllipticScheme, lambda: &C, eps: &[C], cache: Option<&LatticeCache<C>>) -> Result<LogPoint<C>, AnalyticError> {
    let ([a, b, c], x0, y2) = specialize_numeric(scheme, lambda)?;
    let lattice = match cache {
        Some(cache) => (*cache.get(&a, &b, &c)?).clone(),
        None => period_lattice(&a, &b, &c)?,
    };
    let y0 = y2.sqrt();
    let log = elliptic_log(&lattice, Some((&x0, &y0)))?;
    let betti = betti_coordinates(&log.z, &lattice, log.err_log2);
    Ok(LogPoint { betti, a: a_coordinates(eps)?, z: log.z, lattice })
}
