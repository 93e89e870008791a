//! Simultaneous root finding (Aberth–Ehrlich) with a-posteriori inclusion
//! radii.
//!
//! For a degree-`n` polynomial, the disc of radius `n |p(z)/p'(z)|` around
//! any `z` contains a root. When the `n` discs are pairwise disjoint each
//! holds exactly one root; we report that as `isolated`.

use num_complex::Complex64;
use thiserror::Error;

use super::complex::Cx;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("zero or constant polynomial")]
    Degenerate,
    #[error("root iteration did not converge at {bits} bits; raise the precision")]
    NoConvergence { bits: u32 },
}

#[derive(Debug, Clone)]
pub struct RootApprox<C> {
    pub value: C,
    /// `log2` of a radius around `value` certain to contain a root.
    pub radius_log2: f64,
}

fn horner<C: Cx>(c: &[C], z: &C) -> (C, C) {
    let n = c.len() - 1;
    let mut p = c[n].clone();
    let mut dp = z.from_int_like(0);
    for k in (0..n).rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&c[k]);
    }
    (p, dp)
}

/// All roots of `sum c_k x^k`, sorted by (real, imaginary) part.
pub fn polynomial_roots<C: Cx>(coeffs: &[C]) -> Result<(Vec<RootApprox<C>>, bool), RootError> {
    let mut c: Vec<C> = coeffs.to_vec();
    while c.last().map_or(false, |x| x.is_zero()) {
        c.pop();
    }
    if c.len() < 2 {
        return Err(RootError::Degenerate);
    }
    let n = c.len() - 1;
    let lead = c[n].clone();
    let c: Vec<C> = c.iter().map(|x| x.div(&lead)).collect();
    let bits = c[0].bits();
    if n == 1 {
        let r = c[0].neg();
        return Ok((vec![RootApprox { value: r, radius_log2: f64::NEG_INFINITY }], true));
    }

    // seeds from an f64 run, refined at full precision
    let z0 = aberth_f64(&c.iter().map(|x| x.to_c64()).collect::<Vec<_>>());
    let mut z: Vec<C> = z0.iter().map(|w| c[0].from_f64_like(w.re, w.im)).collect();
    let target = -(bits as f64) + 6.0;
    let mut converged = false;
    for _ in 0..(60 + 4 * bits as usize) {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            let (p, dp) = horner(&c, &z[k]);
            if p.is_zero() {
                continue;
            }
            let w = p.div(&dp);
            let mut s = z[k].from_int_like(0);
            for j in 0..n {
                if j != k {
                    s = s.add(&z[k].sub(&z[j]).from_int_like(1).div(&z[k].sub(&z[j])));
                }
            }
            let corr = w.div(&z[k].from_int_like(1).sub(&w.mul(&s)));
            let scale = z[k].log2_abs().max(0.0);
            worst = worst.max(corr.log2_abs() - scale);
            z[k] = z[k].sub(&corr);
        }
        if worst < target {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(RootError::NoConvergence { bits });
    }

    let mut out: Vec<RootApprox<C>> = z
        .into_iter()
        .map(|zk| {
            let (p, dp) = horner(&c, &zk);
            // evaluation error bound: 2^-bits * sum |c_i||z|^i
            let lz = zk.log2_abs().max(-1e9);
            let mag = c
                .iter()
                .enumerate()
                .map(|(i, ci)| ci.log2_abs() + i as f64 * lz)
                .fold(f64::NEG_INFINITY, f64::max);
            let perr = log2_add(p.log2_abs(), mag - bits as f64 + (n as f64).log2() + 2.0);
            let r = (n as f64).log2() + perr - dp.log2_abs();
            RootApprox { value: zk, radius_log2: r }
        })
        .collect();
    out.sort_by(|a, b| {
        let (x, y) = (a.value.to_c64(), b.value.to_c64());
        x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap())
    });
    let mut isolated = true;
    for i in 0..n {
        for j in i + 1..n {
            let d = out[i].value.sub(&out[j].value).log2_abs();
            let r = log2_add(out[i].radius_log2, out[j].radius_log2);
            if !(r < d) {
                isolated = false;
            }
        }
    }
    Ok((out, isolated))
}

fn log2_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp2() + (b - m).exp2()).log2()
}

fn aberth_f64(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let r = (0..n).map(|k| c[k].norm().powf(1.0 / (n - k) as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.3) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(c, &z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let corr = w / (1.0 - w * s);
            if corr.is_finite() {
                z[k] -= corr;
                moved = moved.max(corr.norm() / z[k].norm().max(1.0));
            } else {
                z[k] += Complex64::new(1e-3, 1e-3);
                moved = 1.0;
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precise::Complex;

    #[test]
    fn quadratic_and_cubic() {
        let p = 160;
        let c = |x: f64| Complex::from_f64(x, 0.0, p);
        let (r, iso) = polynomial_roots(&[c(-16.0), c(8.0), c(1.0)]).unwrap();
        assert!(iso);
        let s2 = crate::precise::Real::from_i64(2, p).sqrt().mul_i64(4);
        assert!(r[0].value.re.sub(&crate::precise::Real::from_i64(-4, p).sub(&s2)).magnitude() < -150);
        assert!(r[1].value.re.sub(&crate::precise::Real::from_i64(-4, p).add(&s2)).magnitude() < -150);
        let (r, iso) = polynomial_roots(&[c(0.0), c(-1.0), c(0.0), c(1.0)]).unwrap();
        assert!(iso);
        let v: Vec<f64> = r.iter().map(|x| x.value.re.to_f64()).collect();
        assert_eq!(v.len(), 3);
        assert!((v[0] + 1.0).abs() < 1e-40 && v[1].abs() < 1e-40 && (v[2] - 1.0).abs() < 1e-40);
        assert!(r.iter().all(|x| x.radius_log2 < -140.0));
    }

    #[test]
    fn repeated_root_not_isolated() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let (_, iso) = polynomial_roots(&[c(1.0), c(-2.0), c(1.0)]).unwrap_or((vec![], false));
        assert!(!iso);
    }
}
