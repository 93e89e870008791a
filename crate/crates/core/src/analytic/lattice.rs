use super::AnalyticError;
use crate::precise::roots::polynomial_roots;
use crate::precise::Cx;

/// Basis of the period lattice of `y² = x³ + ax² + bx + c` for the
/// differential `dx/y`, oriented so that `Im τ > 0`.
///
/// Internally the curve is moved to `Y² = 4X³ − g2 X − g3` with
/// `X = x + a/3`, `Y = 2y`; the ℘-lattice is half of this one.
#[derive(Debug, Clone)]
pub struct PeriodLattice<C> {
    pub w1: C,
    pub w2: C,
    pub tau: C,
    /// Roots `e1, e2, e3` of `X³ + pX + q`.
    pub roots: [C; 3],
    pub shift: C,
    pub g2: C,
    pub g3: C,
    /// `log2` of the residual when `g2, g3` are recomputed from the basis.
    pub err_log2: f64,
    pub(crate) v1: C,
    pub(crate) tau_r: C,
    pub(crate) q_r: C,
    pub(crate) terms: usize,
}

pub(crate) fn agm<C: Cx>(mut a: C, mut b: C) -> Result<C, AnalyticError> {
    let bits = a.bits();
    for _ in 0..(4 * bits as usize + 64) {
        let a1 = a.add(&b).div_int(2);
        let mut b1 = a.mul(&b).sqrt();
        if a1.sub(&b1).abs_gt(&a1.add(&b1)) {
            b1 = b1.neg();
        }
        let done = a1.sub(&b1).log2_abs() < a1.log2_abs() - bits as f64 + 2.0;
        a = a1;
        b = b1;
        if done {
            return Ok(a.add(&b).div_int(2));
        }
    }
    Err(AnalyticError::NoConvergence { bits })
}

fn cmp_lex<C: Cx>(x: &C, y: &C) -> std::cmp::Ordering {
    let d = x.sub(y);
    let (dr, di) = (d.re_part(), d.im_part());
    if !dr.is_zero() && dr.log2_abs() > x.log2_abs().max(y.log2_abs()) - x.bits() as f64 / 2.0 {
        return if dr.re_negative() { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater };
    }
    if di.is_zero() {
        std::cmp::Ordering::Equal
    } else if di.re_negative() {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Greater
    }
}

/// Orders the roots: for real cubics `e1` is the largest real root and `e3`
/// the smallest root (or the root with negative imaginary part); otherwise
/// lexicographic by (Re, Im) with `e1` the largest.
fn order_roots<C: Cx>(mut r: Vec<C>, real_coeffs: bool) -> [C; 3] {
    r.sort_by(|x, y| cmp_lex(x, y));
    if real_coeffs {
        let bits = r[0].bits() as f64;
        let realish = |z: &C| z.im_part().log2_abs() < z.log2_abs().max(0.0) - bits / 2.0;
        let n_real = r.iter().filter(|z| realish(z)).count();
        if n_real < 3 {
            let i = (0..3).find(|&i| realish(&r[i])).unwrap_or(2);
            let e1 = r.remove(i);
            let (lo, hi) = if r[0].im_negative() { (r[0].clone(), r[1].clone()) } else { (r[1].clone(), r[0].clone()) };
            return [e1, hi, lo];
        }
    }
    [r[2].clone(), r[1].clone(), r[0].clone()]
}

fn gauss_reduce<C: Cx>(mut v1: C, mut v2: C) -> Result<(C, C), AnalyticError> {
    for _ in 0..400 {
        if v1.abs_gt(&v2) {
            std::mem::swap(&mut v1, &mut v2);
        }
        let k = v2.div(&v1).round_re();
        if k == 0.into() {
            if v2.div(&v1).im_negative() {
                v2 = v2.neg();
            }
            return Ok((v1, v2));
        }
        let k: i64 = (&k).try_into().map_err(|_| AnalyticError::DegenerateLattice)?;
        v2 = v2.sub(&v1.mul_int(k));
    }
    Err(AnalyticError::DegenerateLattice)
}

fn sigma(n: usize, k: u32) -> i64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as i64).pow(k)).sum()
}

pub fn period_lattice<C: Cx>(a: &C, b: &C, c: &C) -> Result<PeriodLattice<C>, AnalyticError> {
    let bits = a.bits();
    let shift = a.div_int(3);
    // X³ + pX + q with X = x + a/3
    let p = b.sub(&a.mul(a).div_int(3));
    let q = c.sub(&a.mul(b).div_int(3)).add(&a.mul(a).mul(a).mul_int(2).div_int(27));
    let one = a.from_int_like(1);
    let (rs, _) = polynomial_roots(&[q.clone(), p.clone(), a.from_int_like(0), one]).map_err(|_| AnalyticError::NoConvergence { bits })?;
    let real = [a, b, c].iter().all(|z| z.im_part().is_zero());
    let roots = order_roots(rs.into_iter().map(|r| r.value).collect(), real);
    let [e1, e2, e3] = roots.clone();
    let scale = e1.log2_abs().max(e2.log2_abs()).max(e3.log2_abs()).max(-(bits as f64));
    for (x, y) in [(&e1, &e2), (&e1, &e3), (&e2, &e3)] {
        if x.sub(y).log2_abs() < scale - bits as f64 * 0.75 {
            return Err(AnalyticError::Singular);
        }
    }
    let pi = a.pi_like();
    let u1 = pi.div(&agm(e1.sub(&e3).sqrt(), e1.sub(&e2).sqrt())?);
    let mut u2 = pi.div(&agm(e3.sub(&e1).sqrt(), e3.sub(&e2).sqrt())?);
    let t = u2.div(&u1);
    if t.im_part().log2_abs() < -(bits as f64) / 2.0 {
        return Err(AnalyticError::DegenerateLattice);
    }
    if t.im_negative() {
        u2 = u2.neg();
    }
    let tau = u2.div(&u1);
    let (v1, v2) = gauss_reduce(u1.clone(), u2.clone())?;
    let tau_r = v2.div(&v1);
    let two_pi_i = pi.mul_int(2).mul_i();
    let q_r = two_pi_i.mul(&tau_r).exp();
    let nq = -q_r.log2_abs();
    if !(nq > 1.0) {
        return Err(AnalyticError::DegenerateLattice);
    }
    let terms = ((bits as f64 + 24.0) / nq).ceil() as usize + 2;

    let g2 = p.mul_int(-4);
    let g3 = q.mul_int(-4);
    // Eisenstein check of the basis against (g2, g3)
    let (mut e4, mut e6) = (one_like(a), one_like(a));
    let mut qn = one_like(a);
    for n in 1..=terms {
        qn = qn.mul(&q_r);
        e4 = e4.add(&qn.mul_int(240 * sigma(n, 3)));
        e6 = e6.sub(&qn.mul_int(504 * sigma(n, 5)));
    }
    let pi2 = pi.mul(&pi);
    let v2p = v1.mul(&v1);
    let g2c = pi2.mul(&pi2).mul_int(4).div_int(3).mul(&e4).div(&v2p.mul(&v2p));
    let g3c = pi2.mul(&pi2).mul(&pi2).mul_int(8).div_int(27).mul(&e6).div(&v2p.mul(&v2p).mul(&v2p));
    let rel = |x: &C, y: &C| x.sub(y).log2_abs() - y.log2_abs().max(0.0);
    let err_log2 = rel(&g2c, &g2).max(rel(&g3c, &g3));
    if err_log2 > -(bits as f64) / 2.0 {
        return Err(AnalyticError::NoConvergence { bits });
    }
    Ok(PeriodLattice { w1: u1.mul_int(2), w2: u2.mul_int(2), tau, roots, shift, g2, g3, err_log2, v1, tau_r, q_r, terms })
}

fn one_like<C: Cx>(a: &C) -> C {
    a.from_int_like(1)
}

impl<C: Cx> PeriodLattice<C> {
    pub fn bits(&self) -> u32 {
        self.w1.bits()
    }

    /// `(℘(u), ℘'(u))` for the half-size lattice, by the `q`-expansion.
    pub fn wp(&self, u: &C) -> Result<(C, C), AnalyticError> {
        let one = one_like(u);
        let mut z = u.div(&self.v1);
        let n = z.im_part().div(&self.tau_r.im_part()).round_re();
        let n: i64 = (&n).try_into().map_err(|_| AnalyticError::Pole)?;
        z = z.sub(&self.tau_r.mul_int(n));
        let m: i64 = (&z.round_re()).try_into().map_err(|_| AnalyticError::Pole)?;
        z = z.sub(&one.mul_int(m));
        let two_pi_i = u.pi_like().mul_int(2).mul_i();
        let uu = two_pi_i.mul(&z).exp();
        let w = one.sub(&uu);
        if w.log2_abs() < -(self.bits() as f64) + 8.0 {
            return Err(AnalyticError::Pole);
        }
        let mut s = one.div_int(12).add(&uu.div(&w.mul(&w)));
        let mut sp = uu.mul(&one.add(&uu)).div(&w.mul(&w).mul(&w));
        let inv = uu.div(&uu.mul(&uu));
        let mut qn = one.clone();
        for _ in 0..self.terms {
            qn = qn.mul(&self.q_r);
            let (a, b) = (qn.mul(&uu), qn.mul(&inv));
            let (da, db, dq) = (one.sub(&a), one.sub(&b), one.sub(&qn));
            s = s.add(&a.div(&da.mul(&da))).add(&b.div(&db.mul(&db))).sub(&qn.mul_int(2).div(&dq.mul(&dq)));
            sp = sp.add(&a.mul(&one.add(&a)).div(&da.mul(&da).mul(&da))).sub(&b.mul(&one.add(&b)).div(&db.mul(&db).mul(&db)));
        }
        let c2 = two_pi_i.mul(&two_pi_i);
        let vv = self.v1.mul(&self.v1);
        Ok((c2.mul(&s).div(&vv), c2.mul(&two_pi_i).mul(&sp).div(&vv.mul(&self.v1))))
    }

    /// Solves `z = b1 ω1 + b2 ω2` over the reals (no reduction).
    pub fn coordinates(&self, z: &C) -> (C, C) {
        let t = z.div(&self.w1);
        let im_tau = self.tau.im_part();
        let b2 = t.im_part().div(&im_tau);
        let b1 = t.re_part().sub(&b2.mul(&self.tau.re_part()));
        (b1, b2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn lattice_basics() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let l = period_lattice(&c(0.0), &c(-1.0), &c(0.0)).unwrap();
        assert!((l.w1.re / 2.0 - 2.6220575542921198).abs() < 1e-12);
        assert!(l.w1.im.abs() < 1e-14);
        assert!(l.tau.im > 0.0);
        let (p, _) = l.wp(&l.w1.scale(0.25)).unwrap();
        assert!((p - 1.0).norm() < 1e-10, "{p}");
    }
}
