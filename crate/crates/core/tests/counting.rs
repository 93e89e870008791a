use cyclotorsion::arith::ratfunc::RationalFunction;
use cyclotorsion::counting::*;
use cyclotorsion::cyclotomic::{CyclotomicField, CyclotomicNumber, RootOfUnityTuple};
use cyclotorsion::elliptic::EllipticScheme;
use cyclotorsion::extension::FieldTower;
use cyclotorsion::precise::roots::polynomial_roots;
use cyclotorsion::precise::Complex;
use cyclotorsion::search::{run_search, solve_fiber, SearchConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn count(n: usize, t_max: u64) -> CountReport {
    let cfg = CountConfig { n, t_max, ..CountConfig::default() };
    count_rational_points(&EllipticScheme::legendre(2), &CompactSetSpec::legendre_default(), &cfg).unwrap()
}

fn twelve() -> RootOfUnityTuple {
    RootOfUnityTuple::new(8, [1, 1, 1, 1, 7, 7, 7, 7, 4, 4, 4, 4].to_vec()).unwrap()
}

#[test]
fn count_small_examples() {
    let r = count(1, 1);
    assert_eq!(r.n_nosubsum, vec![0]);
    assert_eq!(r.n_subsum, vec![0]);
    let r = count(2, 2);
    assert!(r.n_nosubsum[1] >= 1, "{:?}", r.points);
    assert!(r.points.iter().any(|p| p.a == ["0", "0"] && p.curve_order == 2));
    assert!(r.recertified);
}

#[test]
fn count_is_nondecreasing() {
    let r = count(2, 12);
    for w in r.n_nosubsum.windows(2).chain(r.n_subsum.windows(2)) {
        assert!(w[0] <= w[1]);
    }
    assert!(r.recertified);
    assert!(r.degrees.gm_violations.is_empty());
    assert!(r.to_csv().lines().nth(1) == Some("T,N_nosubsum,N_subsum"));
}

/// The `F_q` filter must not lose anything found by the unfiltered exact
/// test over every multiset of fractions with denominator at most `T`.
#[test]
fn filter_matches_addition_oracle() {
    let t_max = 6u64;
    let r = count(2, t_max);
    let mut found: Vec<(Vec<String>, u64)> = r.certificates.iter().map(|c| (c.lambda_minpoly.clone(), c.curve_order)).collect();
    found.sort();
    found.dedup();

    let scheme = EllipticScheme::legendre(2);
    let f = RationalFunction::parse("lambda").unwrap();
    let n = (1..=t_max).fold(1u64, |a, d| num_integer::lcm(a, d));
    let mut oracle = Vec::new();
    for e1 in 0..n {
        for e2 in e1..n {
            let den = |e: u64| n / num_integer::gcd(n, e);
            if den(e1) > t_max || den(e2) > t_max {
                continue;
            }
            let t = RootOfUnityTuple::new(n, vec![e1 as i64, e2 as i64]).unwrap().normalized();
            let tower = solve_fiber(&f, &t.sum_of_roots()).unwrap().tower.unwrap();
            let Ok(sp) = scheme.specialize(&tower, &tower.generator()) else { continue };
            if let Ok(Some(m)) = sp.torsion_order(t_max * t_max) {
                let mp: Vec<String> = tower.minimal_polynomial(&tower.generator()).coeffs().iter().map(cyclotorsion::arith::ring::format_rational).collect();
                oracle.push((mp, m));
            }
        }
    }
    oracle.sort();
    oracle.dedup();
    assert_eq!(found, oracle);
}

#[test]
fn membership_examples() {
    let spec = CompactSetSpec::legendre_default();
    let p = 256;
    let eps = |k: i64, n: u64| Complex::root_of_unity(k, n, p);
    assert!(membership_in_s(&spec, &Complex::from_f64(2.0, 0.0, p), -250.0, &[eps(0, 1), eps(0, 1)]).unwrap());
    assert!(!membership_in_s(&spec, &Complex::zero(p), -250.0, &[eps(0, 1), eps(1, 2)]).unwrap());
    // fiber constraint violated
    assert!(!membership_in_s(&spec, &Complex::from_f64(2.0, 0.0, p), -250.0, &[eps(0, 1)]).unwrap());
    // |λ| beyond 1/δ
    let far = Complex::from_f64(1e6, 0.0, p);
    assert!(!membership_in_s(&spec, &far, -200.0, &[]).unwrap());
    // a point on the boundary of the excluded ball cannot be decided
    let edge = Complex::from_real(spec.delta.delta_real(p));
    assert!(matches!(membership_in_s(&spec, &edge, -20.0, &[]), Err(CountingError::NeedsPrecision { .. })));
}

#[test]
fn conjugate_fractions() {
    let spec = CompactSetSpec::legendre_default();
    let out = run_search(&SearchConfig::new(2, 2, 4), None).unwrap();
    let c = out.certificates.iter().find(|c| c.lambda_minpoly == ["-2", "1"]).unwrap();
    let fr = certificate_conjugate_fraction(&spec, c, 256).unwrap();
    assert_eq!((fr.in_s, fr.total), (1, 1));

    let out = run_search(&SearchConfig::certify_only(vec![twelve()], 8), None).unwrap();
    let fr = certificate_conjugate_fraction(&spec, &out.certificates[0], 256).unwrap();
    assert_eq!(fr.total, 4);
    assert!(fr.at_least_half());
    assert_eq!(fr.fraction, "1");

    // λ = ζ5 with f = λ, so only the unit-circle constraints are active
    let k = CyclotomicField::new(5);
    let tower = FieldTower::linear(&CyclotomicNumber::zeta_pow(&k, 1));
    let t = RootOfUnityTuple::new(5, vec![1]).unwrap();
    let fr = conjugate_fraction_in_s(&spec, &tower, &t, 192).unwrap();
    assert_eq!((fr.in_s, fr.total), (4, 4));
}

#[test]
fn degree_reports() {
    let out = run_search(&SearchConfig::new(2, 2, 4), None).unwrap();
    let two: Vec<_> = out.certificates.into_iter().filter(|c| c.lambda_minpoly == ["-2", "1"]).collect();
    let r = degree_bound_report(&two);
    assert_eq!((r.rows[0].t, r.rows[0].degree), (2, 1));
    assert_eq!((r.rows[0].gm.h, r.rows[0].gm.t_over_h, r.rows[0].gm.degree), (2, 1, 1));
    assert!(r.rows[0].gm.holds);

    let out = run_search(&SearchConfig::certify_only(vec![twelve()], 8), None).unwrap();
    let r = degree_bound_report(&out.certificates);
    assert_eq!((r.rows[0].t, r.rows[0].degree, r.rows[0].curve_order, r.rows[0].tuple_order), (24, 4, 3, 8));
    assert!(r.gm_violations.is_empty());

    let g = gm_side_check(&RootOfUnityTuple::new(97, vec![1]).unwrap(), 1);
    assert_eq!(g.degree, 96);
    assert!((g.bound - (97f64 / 2.0).sqrt()).abs() < 1e-12 && g.holds);
}

#[test]
fn phi_bound_small_range() {
    assert!((1..=5000).all(phi_bound_holds));
}

/// For sampled algebraic `P` of height `≤ a`, the share of conjugates inside
/// an excluded region stays below `(a + h(β) + ln 2)/ln(1/δ)`.
#[test]
fn excluded_share_on_samples() {
    let spec = CompactSetSpec::legendre_default();
    let d = &spec.delta;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 1000 {
        let deg = rng.gen_range(1..=3usize);
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
        // P must differ from the bad points 0 and 1
        if c[deg] == 0 || c[0] == 0 || c.iter().sum::<i64>() == 0 {
            continue;
        }
        if deg >= 2 && (-3i64..=3).flat_map(|p| (1i64..=3).map(move |q| (p, q))).any(|(p, q)| c.iter().enumerate().map(|(i, &a)| a * p.pow(i as u32) * q.pow((deg - i) as u32)).sum::<i64>() == 0) {
            // has a rational root; skip reducible samples
            continue;
        }
        if deg == 1 {
            let g = num_integer::gcd(c[0], c[1]);
            c.iter_mut().for_each(|x| *x /= g);
        }
        let cf: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
        let (roots, _) = polynomial_roots(&cf).unwrap();
        let mahler = (c[deg] as f64).abs() * roots.iter().map(|r| r.value.norm().max(1.0)).product::<f64>();
        let h = mahler.ln() / deg as f64;
        if h > d.a {
            continue;
        }
        tested += 1;
        for (i, beta) in [0.0, 1.0].iter().enumerate() {
            let near = roots.iter().filter(|r| (r.value - beta).norm() < d.delta).count();
            assert!(near as f64 <= d.excluded_share_bound(d.bad_heights[i]) * deg as f64 + 1e-12);
            assert!(d.excluded_share_bound(d.bad_heights[i]) <= 1.0 / (2.0 * d.l as f64 * d.k_degree as f64) + 1e-12);
        }
        let far = roots.iter().filter(|r| r.value.norm() > 1.0 / d.delta).count();
        assert_eq!(far, 0);
    }
}
