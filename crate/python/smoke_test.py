import json

import cyclotorsion as ct


def main():
    z = ct.Cyclotomic("z5 + z5^-1")
    assert z.minimal_polynomial() == ["-1", "1", "1"]
    assert ct.sl2_order(z) == 5
    assert ct.sl2_order(ct.Cyclotomic("2")) is None

    s = ct.Cyclotomic("z8") + ct.Cyclotomic("z8^7")
    assert s * s == ct.Cyclotomic("2")

    leg = ct.Scheme.legendre(2)
    two = ct.Cyclotomic("2")
    assert leg.torsion_order(two, 16) == 2
    b1, b2, err, r1, r2 = leg.betti(two)
    assert err < -60 and r1 is not None and r2 is not None

    w1, w2, tau = ct.periods("0", "-1", "0")
    assert abs(tau - 1j) < 1e-12

    t = ct.RootTuple(8, [1, 7])
    assert len(t) == 2 and t.tuple_order() == 8
    certs = ct.certify_tuples([ct.RootTuple(1, [0, 0])], 8)
    assert any(c.lambda_minpoly == ["-2", "1"] for c in certs)
    for c in certs:
        ok, checks = c.certify()
        assert ok, checks
        again = ct.Certificate.from_json(c.to_json())
        assert again.curve_order == c.curve_order

    cfg = {"n": 2, "N_max": 4, "t_max": 8}
    found, token = ct.run_search(json.dumps(cfg))
    assert token is None and found

    dim, witness = ct.RootTuple(4, [1, 3]).maximal_subgroup(ct.Cyclotomic("0"))
    assert dim == 1 and witness is not None

    assert abs(ct.compute_delta(1.0, [0.0, 0.0], 1) - 3.873e-5) < 1e-8

    report = json.loads(ct.count_points(2, 4))
    assert report["n_nosubsum"][-1] >= 1
    assert len(ct.enumerate_tuples(2, 4)) > 0
    print("smoke test ok")


if __name__ == "__main__":
    main()
