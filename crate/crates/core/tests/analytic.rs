use cyclotorsion::analytic::*;
use cyclotorsion::elliptic::EllipticScheme;
use cyclotorsion::precise::{Complex, Cx, Real};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cx(re: f64, im: f64, p: u32) -> Complex {
    Complex::from_f64(re, im, p)
}

fn dist_log2(a: &Complex, b: &Complex) -> f64 {
    a.sub(b).log2_abs()
}

/// ∫_1^∞ dx / sqrt(x³ − x) by composite Simpson after x = 1 + t², t = s/(1−s).
fn quadrature_half_period() -> f64 {
    let f = |s: f64| {
        if s >= 1.0 {
            return 2.0;
        }
        let t = s / (1.0 - s);
        let dt = 1.0 / ((1.0 - s) * (1.0 - s));
        2.0 / ((1.0 + t * t) * (2.0 + t * t)).sqrt() * dt
    };
    let n = 200_000;
    let h = 1.0 / n as f64;
    let mut acc = f(0.0) + f(1.0);
    for i in 1..n {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn real_half_period_matches_quadrature() {
    let q = quadrature_half_period();
    assert!((q - 2.6220575542921198).abs() < 1e-9, "{q}");
    for p in [128, 256] {
        let l = period_lattice(&cx(0.0, 0.0, p), &cx(-1.0, 0.0, p), &cx(0.0, 0.0, p)).unwrap();
        let half = l.w1.div_int(2).to_c64();
        assert!((half.re - q).abs() < 1e-9 && half.im.abs() < 1e-30);
        assert!(l.err_log2 < -(p as f64) * 0.75, "{}", l.err_log2);
    }
}

#[test]
fn legendre_half_is_square() {
    for p in [128u32, 256] {
        let s = EllipticScheme::legendre(2);
        let lam = Complex::from_real(Real::from_rational(&cyclotorsion::arith::ring::ratio(1, 2), p));
        let ([a, b, c], _, _) = cyclotorsion::analytic::betti::specialize_numeric(&s, &lam).unwrap();
        let l = period_lattice(&a, &b, &c).unwrap();
        let i = Complex::new(Real::zero(p), Real::from_i64(1, p));
        assert!(dist_log2(&l.tau, &i) < -(p as f64) / 2.0);
    }
}

#[test]
fn periods_scale_homogeneously() {
    let p = 192;
    let (a, b, c) = (cx(0.5, 0.25, p), cx(-2.0, 1.0, p), cx(1.0, -0.5, p));
    let l = period_lattice(&a, &b, &c).unwrap();
    // (x, y) -> (4x, 8y): coefficients a*4, b*16, c*64
    let l2 = period_lattice(&a.mul_int(4), &b.mul_int(16), &c.mul_int(64)).unwrap();
    assert!(dist_log2(&l2.w1.mul_int(2), &l.w1) < -(p as f64) / 2.0);
    assert!(dist_log2(&l2.w2.mul_int(2), &l.w2) < -(p as f64) / 2.0);
}

#[test]
fn two_torsion_logs_to_half_period() {
    let p = 160;
    let l = period_lattice(&cx(0.0, 0.0, p), &cx(-1.0, 0.0, p), &cx(0.0, 0.0, p)).unwrap();
    let z0 = cx(0.0, 0.0, p);
    let z = elliptic_log(&l, Some((&z0, &z0))).unwrap();
    let (b1, b2) = l.coordinates(&z.z.mul_int(2));
    for b in [b1, b2] {
        let r = Real::from_bigint(&b.round_re(), p);
        assert!(b.re.sub(&r).abs().to_f64() < 1e-30, "{:?} {}", b.to_c64(), z.err_log2);
    }
    assert!(!l.coordinates(&z.z).0.re.frac().is_zero() || !l.coordinates(&z.z).1.re.frac().is_zero());
    let inf = elliptic_log::<Complex>(&l, None).unwrap();
    assert!(inf.at_infinity && inf.z.is_zero());
}

#[test]
fn roundtrip_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in [128u32, 256] {
        let n = if p == 128 { 60 } else { 40 };
        for _ in 0..n {
            let mut r = || rng.gen_range(-3.0..3.0);
            let (a, b, c) = (cx(r(), r(), p), cx(r(), r(), p), cx(r(), r(), p));
            let Ok(l) = period_lattice(&a, &b, &c) else { continue };
            let x = cx(r(), r(), p);
            let y = x.mul(&x).mul(&x).add(&a.mul(&x).mul(&x)).add(&b.mul(&x)).add(&c).sqrt();
            let y = if r() < 0.0 { y.neg() } else { y };
            let z = elliptic_log(&l, Some((&x, &y))).unwrap();
            let (x2, y2) = exp_map(&l, &z.z).unwrap();
            let tol = -(p as f64) / 2.0;
            assert!(dist_log2(&x2, &x) < tol && dist_log2(&y2, &y) < tol, "p={p} x={:?}", x.to_c64());
            let bc = betti_coordinates(&z.z, &l, z.err_log2);
            let (b1, b2) = bc.to_f64();
            assert!((0.0..1.0).contains(&b1) && (0.0..1.0).contains(&b2));
        }
    }
}

#[test]
fn betti_examples() {
    let l = period_lattice(&Complex64::new(1.0, 0.0), &Complex64::new(-2.0, 0.0), &Complex64::new(3.0, 0.0)).unwrap();
    let zero = betti_coordinates(&Complex64::new(0.0, 0.0), &l, f64::NEG_INFINITY);
    assert_eq!(zero.to_f64(), (0.0, 0.0));
    let half = betti_coordinates(&((l.w1 + l.w2) / 2.0), &l, -50.0).to_f64();
    assert!((half.0 - 0.5).abs() < 1e-12 && (half.1 - 0.5).abs() < 1e-12);
    let whole = betti_coordinates(&(l.w1 * 3.0 - l.w2), &l, -50.0).to_f64();
    assert!(whole.0.min(1.0 - whole.0) < 1e-10 && whole.1.min(1.0 - whole.1) < 1e-10);
}

#[test]
fn a_coordinate_examples() {
    let p = 128;
    let ones = vec![Complex::one(p), Complex::one(p)];
    assert!(a_coordinates(&ones).unwrap().iter().all(|a| a.log2_abs() < -(p as f64) + 8.0));
    let i = a_coordinates(&[Complex::root_of_unity(1, 4, p)]).unwrap();
    assert!((i[0].to_c64() - Complex64::new(0.25, 0.0)).norm() < 1e-30);
    let z = a_coordinates(&[Complex::root_of_unity(3, 7, p)]).unwrap();
    let target = Real::from_rational(&cyclotorsion::arith::ring::ratio(3, 7), p);
    assert!(z[0].re.sub(&target).abs().magnitude() < -(p as i64) + 8);
    assert!(z[0].im.magnitude() < -(p as i64) + 8);
    // ζ_N^k ↦ k/N mod 1
    for k in 0..11 {
        let a = a_coordinates(&[Complex::root_of_unity(k, 11, p)]).unwrap()[0].re.to_f64();
        let d = (a - k as f64 / 11.0).rem_euclid(1.0);
        assert!(d.min(1.0 - d) < 1e-15);
    }
    assert!(a_coordinates(&[Complex::zero(p)]).is_err());
}

#[test]
fn theta_two_torsion_is_stable() {
    let s = EllipticScheme::legendre(2);
    let mut prev: Option<(f64, f64)> = None;
    for p in [96u32, 192, 384] {
        let lam = cx(2.0, 0.0, p);
        let pt = theta_map(&s, &lam, &[Complex::one(p), Complex::one(p)], None).unwrap();
        let (b1, b2) = pt.betti.to_f64();
        let near = |b: f64| [0.0, 0.5].iter().any(|h| (b - h).abs() < 1e-25);
        assert!(near(b1) && near(b2) && (b1, b2) != (0.0, 0.0), "{b1} {b2}");
        assert!(pt.a.iter().all(|a| a.log2_abs() < -(p as f64) + 8.0));
        if let Some(q) = prev {
            assert_eq!(q, (b1, b2));
        }
        prev = Some((b1, b2));
    }
}

#[test]
fn reconstruction_is_stable_under_more_precision() {
    let s = EllipticScheme::legendre(2);
    let cache = LatticeCache::default();
    for p in [128u32, 256] {
        let lam = Complex::from_real(Real::from_f64(2.0f64.sqrt(), 64).with_prec(p));
        let _ = theta_map(&s, &lam, &[Complex::one(p)], Some(&cache)).unwrap();
    }
    assert_eq!(cache.len(), 2);
}
