use super::lattice::PeriodLattice;
use super::AnalyticError;
use crate::precise::Cx;

/// `z` with `exp(z) = P`, reduced to the fundamental parallelogram
/// `{b1 ω1 + b2 ω2 : 0 ≤ b1, b2 < 1}`.
#[derive(Debug, Clone)]
pub struct EllipticLog<C> {
    pub z: C,
    pub err_log2: f64,
    pub at_infinity: bool,
}

/// Descending Landen transformations for `u` with `℘(u) = X`, sign not
/// yet fixed.
fn landen<C: Cx>(lat: &PeriodLattice<C>, x: &C) -> Result<C, AnalyticError> {
    let bits = x.bits();
    let [e1, e2, e3] = &lat.roots;
    let (mut a, mut b, mut c) = (e1.sub(e3).sqrt(), e1.sub(e2).sqrt(), x.sub(e3).sqrt());
    if c.log2_abs() < -(bits as f64) / 2.0 {
        return Err(AnalyticError::Unstable { bits });
    }
    for _ in 0..(4 * bits as usize + 64) {
        let a1 = a.add(&b).div_int(2);
        let mut b1 = a.mul(&b).sqrt();
        if a1.sub(&b1).abs_gt(&a1.add(&b1)) {
            b1 = b1.neg();
        }
        let r = c.mul(&c).sub(&a.mul(&a)).add(&b.mul(&b)).sqrt();
        let (cp, cm) = (c.add(&r).div_int(2), c.sub(&r).div_int(2));
        c = if cm.abs_gt(&cp) { cm } else { cp };
        let done = a1.sub(&b1).log2_abs() < a1.log2_abs() - bits as f64 + 2.0;
        a = a1;
        b = b1;
        if done {
            let m = a.add(&b).div_int(2);
            return Ok(m.div(&c).asin().div(&m));
        }
    }
    Err(AnalyticError::NoConvergence { bits })
}

fn residual<C: Cx>(lat: &PeriodLattice<C>, u: &C, x: &C) -> Option<(f64, C, C)> {
    let (p, pp) = lat.wp(u).ok()?;
    Some((p.sub(x).log2_abs() - x.log2_abs().max(0.0), p, pp))
}

/// Elliptic logarithm of `(x, y)` on `y² = x³ + ax² + bx + c`, the curve of
/// `lat`. `None` is the point at infinity.
pub fn elliptic_log<C: Cx>(lat: &PeriodLattice<C>, point: Option<(&C, &C)>) -> Result<EllipticLog<C>, AnalyticError> {
    let bits = lat.bits();
    let Some((x, y)) = point else {
        return Ok(EllipticLog { z: lat.w1.from_int_like(0), err_log2: f64::NEG_INFINITY, at_infinity: true });
    };
    let xx = x.add(&lat.shift);
    let yy = y.mul_int(2);
    let target = -(bits as f64) * 0.75;

    let mut best: Option<(f64, C)> = None;
    let consider = |best: &mut Option<(f64, C)>, u: C| {
        if let Some((r, _, pp)) = residual(lat, &u, &xx) {
            // choose the sign matching ℘'
            let u = if pp.sub(&yy).abs_gt(&pp.add(&yy)) { u.neg() } else { u };
            if best.as_ref().map_or(true, |(b, _)| r < *b) {
                *best = Some((r, u));
            }
        }
    };
    // at exact 2-torsion only the half periods are taken
    if !yy.is_zero() {
        if let Ok(u) = landen(lat, &xx) {
            consider(&mut best, u);
        }
    }
    if yy.is_zero() || best.as_ref().map_or(true, |(r, _)| *r > target) {
        // 2-torsion and its neighbourhood
        let (h1, h2) = (lat.w1.div_int(4), lat.w2.div_int(4));
        for u in [h1.clone(), h2.clone(), h1.add(&h2)] {
            consider(&mut best, u);
        }
    }
    let (mut r, mut u) = best.ok_or(AnalyticError::Unstable { bits })?;
    // Newton polish
    for _ in 0..64 {
        if r <= target {
            break;
        }
        let (p, pp) = lat.wp(&u)?;
        if pp.log2_abs() < -(bits as f64) / 2.0 {
            break;
        }
        u = u.sub(&p.sub(&xx).div(&pp));
        r = residual(lat, &u, &xx).ok_or(AnalyticError::Unstable { bits })?.0;
    }
    let (_, p, pp) = residual(lat, &u, &xx).ok_or(AnalyticError::Unstable { bits })?;
    if r > -(bits as f64) / 2.0 {
        return Err(AnalyticError::Unstable { bits });
    }
    let pp_bad = pp.sub(&yy).log2_abs() > pp.add(&yy).log2_abs() && yy.log2_abs() > -(bits as f64) / 4.0;
    if pp_bad {
        return Err(AnalyticError::Unstable { bits });
    }
    // first-order error, second order near 2-torsion where ℘' vanishes
    let dx = p.sub(&xx).log2_abs();
    let err_log2 = if pp.log2_abs() > -(bits as f64) / 4.0 { dx - pp.log2_abs() } else { dx / 2.0 + 2.0 };
    let z = reduce(lat, &u.mul_int(2));
    Ok(EllipticLog { z, err_log2: err_log2 + 1.0, at_infinity: false })
}

pub(crate) fn reduce<C: Cx>(lat: &PeriodLattice<C>, z: &C) -> C {
    let (b1, b2) = lat.coordinates(z);
    let f = |b: &C| -> i64 { (&b.floor_re()).try_into().unwrap_or(0) };
    z.sub(&lat.w1.mul_int(f(&b1))).sub(&lat.w2.mul_int(f(&b2)))
}

/// Inverse of [`elliptic_log`]: `(x, y)` or `None` at lattice points.
pub fn exp_map<C: Cx>(lat: &PeriodLattice<C>, z: &C) -> Option<(C, C)> {
    let (p, pp) = lat.wp(&z.div_int(2)).ok()?;
    Some((p.sub(&lat.shift), pp.div_int(2)))
}

#[cfg(test)]
mod tests {
    use super::super::lattice::period_lattice;
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn roundtrip_f64() {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        let l = period_lattice(&c(1.0, 0.5), &c(-1.0, 0.0), &c(0.3, -0.2)).unwrap();
        for &(re, im) in &[(0.3, 0.1), (2.0, -1.0), (-0.7, 0.0), (5.0, 3.0)] {
            let x = c(re, im);
            let y = (x * x * x + c(1.0, 0.5) * x * x - x + c(0.3, -0.2)).sqrt();
            for y in [y, -y] {
                let z = elliptic_log(&l, Some((&x, &y))).unwrap();
                let (x2, y2) = exp_map(&l, &z.z).unwrap();
                assert!((x2 - x).norm() < 1e-8 && (y2 - y).norm() < 1e-8, "{x} {y} -> {x2} {y2}");
            }
        }
    }
}
