use cyclotorsion::arith::ring::Ring;
use cyclotorsion::cyclotomic::CyclotomicNumber;
use cyclotorsion::elliptic::{CurvePoint, EllipticScheme, SpecializeError};
use cyclotorsion::extension::FieldTower;

fn cyc(s: &str) -> CyclotomicNumber {
    CyclotomicNumber::parse(s).unwrap()
}

#[test]
fn section_at_minus_four_plus_four_root_two() {
    let lam = cyc("-4 + 4(z8 + z8^7)");
    let tower = FieldTower::linear(&lam);
    let sp = EllipticScheme::legendre(2).specialize(&tower, &tower.generator()).unwrap();
    // 2(2 − λ0) = 12 − 8√2 = (2 − 2√2)², so y already lies in Q(√2)
    let y = cyc("2 - 2(z8 + z8^7)").lift(tower.base()).unwrap();
    let y0_sq = tower.as_base(&sp.y0_sq).unwrap();
    assert!(y0_sq.sub_ref(&y.square()).is_zero());

    let curve = sp.curve.map(|c| tower.as_base(c).unwrap());
    let x = tower.as_base(&sp.x0).unwrap();
    for y in [y.clone(), y.neg_ref()] {
        let p = CurvePoint::Affine { x: x.clone(), y };
        assert!(curve.is_on_curve(&p));
        assert_eq!(curve.order_by_addition(&p, 24).unwrap(), Some(3));
    }
    assert_eq!(sp.torsion_order(24).unwrap(), Some(3));
    assert_eq!(sp.order_by_addition(24), Some(Some(3)));
}

#[test]
fn bad_fibers_are_rejected() {
    let s = EllipticScheme::legendre(2);
    for l in ["0", "1"] {
        let tower = FieldTower::linear(&cyc(l));
        assert!(matches!(s.specialize(&tower, &tower.generator()), Err(SpecializeError::BadReduction)));
    }
    let tower = FieldTower::linear(&cyc("2"));
    let sp = s.specialize(&tower, &tower.generator()).unwrap();
    assert!(tower.as_base(&sp.y0_sq).unwrap().is_zero());
    assert_eq!(sp.torsion_order(8).unwrap(), Some(2));
}
