use cyclotorsion::cyclotomic::RootOfUnityTuple;
use cyclotorsion::elliptic::{torsion_prescreen, EllipticScheme, Prescreen};
use cyclotorsion::extension::FieldTower;
use cyclotorsion::search::{certify, enumerate_tuples, run_search, solve_fiber, SearchConfig, TorsionCertificate};
use cyclotorsion::arith::ratfunc::RationalFunction;

fn twelve_tuple() -> RootOfUnityTuple {
    let mut e = vec![1; 4];
    e.extend([7; 4]);
    e.extend([4; 4]);
    RootOfUnityTuple::new(8, e).unwrap()
}

fn twelve_cert() -> TorsionCertificate {
    let cfg = SearchConfig::certify_only(vec![twelve_tuple()], 8);
    let out = run_search(&cfg, None).unwrap();
    assert_eq!(out.certificates.len(), 1, "{:?}", out.stats);
    out.certificates[0].clone()
}

#[test]
fn legendre_contains_lambda_two() {
    let out = run_search(&SearchConfig::new(2, 8, 8), None).unwrap();
    let c = out
        .certificates
        .iter()
        .find(|c| c.lambda_minpoly == ["-2", "1"])
        .expect("λ = 2");
    assert_eq!(c.curve_order, 2);
    for c in &out.certificates {
        assert!(certify(c).passed, "{}", c.to_json_pretty());
    }
}

#[test]
fn skip_filter_n1_is_empty() {
    let mut cfg = SearchConfig::new(1, 4, 8);
    cfg.skip_vanishing_subsums = true;
    let out = run_search(&cfg, None).unwrap();
    assert!(out.certificates.is_empty());
    assert_eq!(out.stats.tuples, 4);
    assert_eq!(out.stats.bad_fibers, 1);
}

#[test]
fn twelve_tuple_certificate() {
    let c = twelve_cert();
    assert_eq!(c.curve_order, 3);
    assert_eq!(c.tuple_order, 8);
    assert_eq!(c.combined_order, 24);
    assert_eq!(c.degree.absolute, 4);
    assert_eq!(c.lambda_minpoly, ["-16", "8", "1"]);
    assert!(c.betti.b1_rational.ends_with("/3") || c.betti.b2_rational.ends_with("/3"));
    let r = certify(&c);
    assert!(r.passed, "{:?}", r.failures());
}

#[test]
fn tampered_order_fails_with_residue() {
    let mut c = twelve_cert();
    c.curve_order = 5;
    c.division_identity.m = 5;
    c.combined_order = 40;
    let r = certify(&c);
    assert!(!r.passed);
    let d = r.failures().into_iter().find(|k| k.name == "division_identity").unwrap();
    assert!(d.detail.starts_with("f_5(x0) = ") && d.detail.ends_with("≠ 0"), "{}", d.detail);

    let mut c = twelve_cert();
    c.zeta.coeffs[0] = "3".into();
    assert!(!certify(&c).passed);
}

#[test]
fn deterministic_output() {
    let cfg = SearchConfig::new(2, 6, 8);
    let a = serde_json::to_string(&run_search(&cfg, None).unwrap().certificates).unwrap();
    let b = serde_json::to_string(&run_search(&cfg, None).unwrap().certificates).unwrap();
    assert_eq!(a, b);
}

#[test]
fn prescreen_never_rejects_certified() {
    let c = twelve_cert();
    let scheme = EllipticScheme::from_json(&c.scheme).unwrap();
    let tower = FieldTower::from_json(&c.tower).unwrap();
    let primes: Vec<u64> = (3u64..2000).filter(|&q| (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)).take(20).collect();
    let p = torsion_prescreen(&scheme, &tower, &tower.generator(), c.curve_order, &primes);
    assert_eq!(p, Prescreen::Pass);
}

/// Brute force: every tuple, every rational fiber point, order by repeated
/// exact point addition.
#[test]
fn oracle_equivalence() {
    let scheme = EllipticScheme::legendre(2);
    let f = RationalFunction::parse("lambda").unwrap();
    for (n, n_max) in [(1, 6), (2, 6)] {
        let t_max = 10;
        let mut cfg = SearchConfig::new(n, n_max, t_max);
        cfg.dedupe = cyclotorsion::search::Dedupe::None;
        let out = run_search(&cfg, None).unwrap();
        let mut found: Vec<(Vec<u64>, u64)> = out.certificates.iter().map(|c| (c.tuple.exponents.clone(), c.curve_order)).collect();
        found.sort();
        let mut oracle = Vec::new();
        for t in enumerate_tuples(n, n_max, false, false) {
            let t = t.normalized();
            let fib = solve_fiber(&f, &t.sum_of_roots()).unwrap();
            let Some(tower) = fib.tower else { continue };
            assert_eq!(tower.relative_degree(), 1);
            let Ok(sp) = scheme.specialize(&tower, &tower.generator()) else { continue };
            if let Some(Some(m)) = sp.order_by_addition(t_max) {
                oracle.push((t.exponents.clone(), m));
            }
        }
        oracle.sort();
        assert_eq!(found, oracle, "n = {n}");
    }
}


#[test]
fn wrong_minpoly_fails() {
    let mut c = twelve_cert();
    c.lambda_minpoly = vec!["-16".into(), "8".into(), "2".into()];
    let r = certify(&c);
    assert!(!r.passed);
    assert_eq!(r.failures().iter().map(|k| k.name).collect::<Vec<_>>(), ["minpoly"]);
}
