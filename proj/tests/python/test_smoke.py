import math

import pytest

import sumrule_lab as sl


def test_measure_density():
    sc = sl.measure({"family": "SC"})
    assert sc.space() == "real"
    assert sc.density(0.0) == pytest.approx(1.0 / math.pi, abs=1e-14)
    assert sc.support() == [(-2.0, 2.0)]

    unif = sl.measure({"family": "UNIF"})
    assert unif.space() == "circle"
    assert unif.density(1.3) == 1.0


def test_kl_values():
    arcsine = sl.measure({"family": "Arcsine"})
    sc = sl.measure({"family": "SC"})
    assert sl.kl(arcsine, sc) == pytest.approx(math.log(2.0), abs=1e-9)
    unif = sl.measure({"family": "UNIF"})
    assert sl.kl(unif, unif) == 0.0


def test_coefficients():
    hp = sl.measure({"family": "HP", "params": {"d": 1.0}})
    alpha = sl.verblunsky(hp, 5)
    assert all(abs(a - (-0.5)) < 1e-11 for a in alpha)

    b, a = sl.jacobi(sl.measure({"family": "SC"}), 8)
    assert all(abs(x) < 1e-11 for x in b)
    assert all(abs(x - 1.0) < 1e-11 for x in a)

    u = sl.canonical_from_jacobi(list(b), list(a))
    bb, aa = sl.jacobi_from_canonical(u)
    assert bb[0] == pytest.approx(b[0], abs=1e-12)


def test_pois_orientation():
    zeta = 0.3 + 0.2j
    pois = sl.measure({"family": "Pois", "params": {"zeta": [0.3, 0.2]}})
    alpha = sl.verblunsky(pois, 4)
    assert abs(alpha[0] - zeta) < 1e-12
    assert all(abs(a) < 1e-12 for a in alpha[1:])


def test_mappings():
    unif = sl.measure({"family": "UNIF"})
    arcs = sl.apply_maps('[{"map": "Sz"}]', unif)
    assert arcs.density(0.0) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-13)


def test_verify_report():
    report = sl.verify("killip-simon", {"family": "SC"})
    assert report["verdict"] == "match"
    assert report["rule"] == "killip-simon"
    assert abs(report["lhs"]) < 1e-9

    report = sl.verify("gw", {"family": "GW", "params": {"g": -0.5}},
                       rule_params={"g": -0.5})
    assert report["verdict"] == "match"


def test_error_mapping():
    with pytest.raises(sl.SumruleError):
        sl.measure({"family": "MP", "params": {"tau": 2.0}})
