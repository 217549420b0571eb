from fractions import Fraction

from commdeg.cayley import enumerate_ball
from commdeg.estimator import DcSeries, EstimateReport, dc_exact_by_radius
from commdeg.groups import (
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    Heisenberg,
    InfiniteDihedral,
    center,
    named_group,
    quotient,
    symmetric,
)
from commdeg.groups.finite import alternating
from commdeg.theory import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    band_check,
    centralizer_linear_bound_check,
    decay_trend_check,
    gallagher_check,
    gustafson_check,
    index_bound_check,
    jsonable,
    negligibility_report,
    quotient_bound_check,
    translation_length,
)


def exact_series(values, start=0):
    s = DcSeries()
    for n, q in enumerate(values, start):
        s.append(n, EstimateReport.from_exact(Fraction(q), 1))
    return s


def test_gustafson_corpus():
    names = ["Z2", "Z6", "Z2xZ2", "S3", "D4", "Q8", "A4", "S4"]
    results = gustafson_check([named_group(n) for n in names], names)
    assert all(r.status == PASS for r in results)


def test_gallagher():
    S3 = symmetric(3)
    A3 = [g for g in S3.elements() if S3.order_of(g).order in (1, 3)]
    assert gallagher_check(S3, A3, "S3").status == PASS
    for name in ["D4", "Q8"]:
        G = named_group(name)
        assert gallagher_check(G, center(G), name).status == PASS
    S4 = symmetric(4)
    assert gallagher_check(S4, alternating(4).elements(), "S4").status == PASS


def test_quotient_bound_pass_fail_inconclusive():
    H = Heisenberg()
    _, hom = quotient(H, 3)
    good = exact_series(dc_exact_by_radius(H, enumerate_ball(H, 6))[2:], start=2)
    assert quotient_bound_check(H, hom, good).status == PASS
    bad = exact_series([Fraction(1, 2)], start=2)
    assert quotient_bound_check(H, hom, bad).status == FAIL
    hom.verified = False
    assert quotient_bound_check(H, hom, good).status == INCONCLUSIVE


def test_index_and_band_checks():
    assert index_bound_check(exact_series(["1/4"]), exact_series([1]), 2).status == PASS
    assert index_bound_check(exact_series(["1/5"]), exact_series([1]), 2).status == FAIL
    assert band_check(exact_series(["1/4", "26/100"]), "1/4", 0.02).status == PASS
    assert band_check(exact_series(["1/4", "3/10"]), "1/4", 0.02).status == FAIL


def test_decay_trend():
    assert decay_trend_check(exact_series([1, "1/2", "1/3"]), (0, 2)).status == PASS
    assert decay_trend_check(exact_series([1, "1/2", "1/2"]), (0, 2)).status == FAIL
    s = exact_series([1, "1/2", "1/3"])
    s.append(5, EstimateReport(0.2, "sampled", samples=1000, ci95=(0.18, 0.22), seed=1))
    assert decay_trend_check(s, (0, 2), (5, 5)).status == PASS
    s.append(6, EstimateReport(0.3, "sampled", samples=1000, ci95=(0.28, 0.34), seed=1))
    assert decay_trend_check(s, (0, 2), (5, 6)).status == FAIL


def test_negligibility_free_product():
    G = FreeProduct([2, 2, 2])
    rep = negligibility_report(G, 6, 10**6)
    assert rep.torsion_available
    # |B(n)| = 3*2^n - 2; torsion counts come from odd palindromic words plus the identity
    assert [r.ball_size for r in rep.rows] == [3 * 2**n - 2 for n in range(7)]
    assert rep.torsion_density[3:] == [Fraction(5, 11), Fraction(5, 23), Fraction(11, 47), Fraction(11, 95)]
    assert rep.max_centralizer_density[3:] == [Fraction(3, 22), Fraction(5, 46), Fraction(5, 94), Fraction(7, 190)]
    small = negligibility_report(G, 6, 5, seed=3)
    assert small.torsion_density == rep.torsion_density
    assert all(a <= b for a, b in zip(small.max_centralizer_density[2:], rep.max_centralizer_density[2:]))
    dinf = negligibility_report(InfiniteDihedral(), 8, 10)
    assert dinf.torsion_density[:3] == [1, 1, Fraction(3, 5)]


def test_translation_length():
    F = FreeGroup(2)
    rep = translation_length(F, F.parse_element("ab"), 8)
    assert rep.estimate == 2 and not rep.truncated
    S3 = symmetric(3)
    r = next(g for g in S3.elements() if S3.order_of(g).order == 3)
    assert translation_length(S3, r, 6).estimate == 0
    assert translation_length(FreeAbelian(1), (1,), 5).estimate == 1


def test_centralizer_bound():
    for G in [FreeGroup(2), FreeProduct([2, 2, 2])]:
        res = centralizer_linear_bound_check(G, 100, 6, 1, seed=0)
        assert res.status == PASS, res.detail
    assert centralizer_linear_bound_check(Heisenberg(), 10, 3).status == INCONCLUSIVE


def test_jsonable():
    assert jsonable({"a": Fraction(1, 3), 2: (Fraction(2), 0.5)}) == {"a": "1/3", "2": ["2", 0.5]}
