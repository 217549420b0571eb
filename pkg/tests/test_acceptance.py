"""Acceptance criteria 1-10.

Each ``criterion_k`` returns ``(ok, detail)`` and is timed against its
runtime limit. Every criterion prints exactly one PASS/FAIL line, under
pytest (captured output is disabled for these lines) and when the module is
run as a script.

Criterion 6 contains a sub-claim that does not hold for Z2*Z2*Z2 at finite
radius: torsion density rises from even to odd radii. That line prints FAIL;
the corresponding pytest case is a strict xfail so it cannot silently flip.
"""
from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

from commdeg.cayley import FBallSpec, coset_density_series, enumerate_ball, growth_fit
from commdeg.equations import COMMUTATOR, EquationSystem
from commdeg.estimator import (
    DcSeries,
    EstimateReport,
    EstimatorSettings,
    dc_exact_by_radius,
    dc_exact_on_ball,
    dc_finite,
    dc_sampled,
    dc_series,
    ds_exact,
    ds_sampled,
)
from commdeg.groups import (
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    Heisenberg,
    InfiniteDihedral,
    NonConfluentError,
    RewritingGroup,
    center,
    check_confluence,
    homomorphism_from_images,
    make_group,
    named_group,
    parity_homomorphism,
    parse_rewriting_system,
    quotient,
    symmetric,
)
from commdeg.groups.finite import alternating
from commdeg.measures import padded_measure, random_walk_measure, uniform_on, uniform_on_ball
from commdeg.theory import (
    PASS,
    centralizer_linear_bound_check,
    gallagher_check,
    gustafson_check,
    index_bound_check,
    negligibility_report,
    quotient_bound_check,
)

RWS = Path(__file__).resolve().parents[1] / "experiments" / "rewriting"
LIMITS = {1: 5, 2: 10, 3: 60, 4: 60, 5: 600, 6: 300, 7: 60, 8: 120, 9: 120, 10: 10}


def brute_dc(G, elements) -> Fraction:
    hits = sum(1 for u in elements for v in elements if G.mul(u, v) == G.mul(v, u))
    return Fraction(hits, len(elements) ** 2)


def strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


# -- criteria ----------------------------------------------------------------------

def criterion_1():
    q8 = dc_finite(named_group("Q8"))
    names = [f"Z{n}" for n in range(1, 13)] + ["Z2xZ2", "S3", "D4", "Q8", "A4", "S4"]
    results = gustafson_check([named_group(n) for n in names], names)
    bad = [r.name for r in results if r.status != PASS]
    return q8 == Fraction(5, 8) and not bad, f"dc(Q8)={q8}; {len(results)} groups, violations={bad}"


def criterion_2():
    F = FreeGroup(2)
    rows = coset_density_series(F, parity_homomorphism(F), F.identity, 12)
    even = [abs(float(r.value) - 0.75) for r in rows if r.n >= 8 and r.n % 2 == 0]
    odd = [abs(float(r.value) - 0.25) for r in rows if r.n >= 8 and r.n % 2 == 1]
    ok = max(even) < 0.01 and max(odd) < 0.01
    return ok, (f"n>=8 even max|v-3/4|={max(even):.2e}, odd max|v-1/4|={max(odd):.2e}; "
                f"values {float(rows[11].value):.6f}, {float(rows[12].value):.6f} at n=11,12")


def criterion_3():
    Z2 = FreeAbelian(2)
    hom = homomorphism_from_images(Z2, named_group("Z2"), {"e1": "1", "e2": "0"})
    rows = coset_density_series(Z2, hom, Z2.identity, 100)
    dev = max(abs(float(r.value) - 0.5) for r in rows[50:101])
    H = Heisenberg()
    _, h2 = quotient(H, 2)
    n = 16
    last = coset_density_series(H, h2, H.identity, n)[-1]
    ok = dev < 0.02 and last.max_deviation < 0.05 and len(last.coset_counts) == 8
    return ok, (f"Z^2 max|v-1/2| on [50,100]={dev:.4f}; heisenberg mod 2 at n={n}: "
                f"{len(last.coset_counts)} cosets, max|density-1/8|={float(last.max_deviation):.4f}")


def criterion_4():
    D = InfiniteDihedral()
    radii = range(100, 201)
    st = EstimatorSettings(mode="exact")
    series = dc_series(D, radii, "uniform-ball", st)
    dev = max(abs(v - 0.25) for v in series.values)
    # closed form on B(n): (n²+3n+3)/(2n+1)² for odd n, (n²+5n+1)/(2n+1)² for even n
    closed = all(
        r.exact == Fraction(n * n + (3 * n + 3 if n % 2 else 5 * n + 1), (2 * n + 1) ** 2)
        for n, r in series.entries
    )
    hom = parity_homomorphism(D)
    sub = dc_series(D, radii, "f-ball", st, fball=FBallSpec.kernel(hom))
    trans_abelian = all(r.exact == 1 for _, r in sub.entries)
    idx = index_bound_check(series, sub, 2)
    ok = dev < 0.02 and closed and trans_abelian and idx.status == PASS
    return ok, (f"max|dc-1/4| on [100,200]={dev:.5f}; closed form matches={closed}; "
                f"translation subgroup dc=1: {trans_abelian}; index-bound {idx.status} ({idx.detail})")


def criterion_5():
    H = Heisenberg()
    B = enumerate_ball(H, 14)
    exact = dc_exact_by_radius(H, B.prefix(8))
    series = DcSeries(label="heisenberg")
    for n in range(2, 9):
        series.append(n, EstimateReport.from_exact(exact[n], B.size(n)))
    st = EstimatorSettings(mode="sampled", samples=100_000, seed=2024)
    for n in range(10, 15):
        series.append(n, dc_sampled(H, uniform_on_ball(B.prefix(n)), st.samples, st.seed_for(n)))
    dec = strictly_decreasing(exact[2:9])
    ref = float(exact[8])
    uppers = [series.report(n).upper for n in range(10, 15)]
    below = all(u < ref for u in uppers)
    _, h3 = quotient(H, 3)
    qb = quotient_bound_check(H, h3, series)
    ok = dec and below and qb.status == PASS
    return ok, (f"exact strictly decreasing on [2,8]: {dec}; dc(8)={ref:.5f}, sampled CI uppers on [10,14] "
                f"max={max(uppers):.5f}; quotient-bound {qb.status}, dc(G/N)={qb.rhs}")


def criterion_6_parts():
    F = FreeGroup(2)
    B = enumerate_ball(F, 5)
    fast = dc_exact_by_radius(F, B)[1:]
    brute = [brute_dc(F, B.prefix(n).elements) for n in range(1, 6)]
    dc_ok = fast == brute and fast[0] == Fraction(17, 25) and strictly_decreasing(fast)
    G = FreeProduct([2, 2, 2])
    rep = negligibility_report(G, 8, 10**6, radii=range(3, 9))
    tors = rep.torsion_density
    cent = rep.max_centralizer_density
    cb = centralizer_linear_bound_check(F, 100, 6, 1, seed=0)
    return {
        "dc": (dc_ok, f"free(2) dc on B(1..5) = {[str(q) for q in fast]} (brute force agrees: {fast == brute})"),
        "torsion": (strictly_decreasing(tors), f"Z2*Z2*Z2 torsion density n=3..8: {[str(q) for q in tors]}"),
        "centralizer": (strictly_decreasing(cent), f"max centralizer density n=3..8: {[str(q) for q in cent]}"),
        "bound": (cb.status == PASS, cb.detail),
    }


def criterion_6():
    parts = criterion_6_parts()
    bad = [k for k, (ok, _) in parts.items() if not ok]
    detail = "; ".join(f"[{k}: {'ok' if ok else 'NOT MET'}] {d}" for k, (ok, d) in parts.items())
    return not bad, detail


def criterion_7():
    S3 = symmetric(3)
    gal = [
        gallagher_check(S3, alternating(3).elements(), "S3"),
        gallagher_check(named_group("D4"), center(named_group("D4")), "D4"),
        gallagher_check(named_group("Q8"), center(named_group("Q8")), "Q8"),
    ]
    models = {
        "free(2)": make_group("free(2)"),
        "free-abelian(2)": make_group("free-abelian(2)"),
        "heisenberg": make_group("heisenberg"),
        "infinite-dihedral": make_group("infinite-dihedral"),
        "free-product(2,3)": make_group("free-product(2,3)"),
        "semidirect": make_group({"kind": "semidirect", "dim": 2, "matrices": [[[0, -1], [1, 0]]]}),
        "Q8 (table)": named_group("Q8"),
        "S4 (permutation)": symmetric(4),
        "heisenberg mod 3": quotient(Heisenberg(), 3)[0],
        "rewriting Z^2": make_group({"kind": "rewriting-system", "file": str(RWS / "z2.rws")}),
    }
    mismatched = []
    for name, G in models.items():
        B = enumerate_ball(G, 3, cache=False)
        for n in range(4):
            Bn = B.prefix(n)
            if ds_exact(G, COMMUTATOR, uniform_on_ball(Bn)).exact != dc_exact_on_ball(G, Bn):
                mismatched.append((name, n))
    meta = ds_exact(S3, EquationSystem.parse("[[x1,x2],[x3,x4]]"), uniform_on(S3, S3.elements())).exact
    ok = all(r.status == PASS for r in gal) and not mismatched and meta == 1
    return ok, (f"gallagher {[r.status for r in gal]}; ds=dc on {len(models)} models x n<=3, "
                f"mismatches={mismatched}; metabelian ds(S3)={meta}")


def criterion_8():
    Z = growth_fit(enumerate_ball(FreeAbelian(1), 40).sizes()[8:], list(range(8, 41)))
    Z2 = growth_fit(enumerate_ball(FreeAbelian(2), 40).sizes()[8:], list(range(8, 41)))
    H = growth_fit(enumerate_ball(Heisenberg(), 15).sizes()[8:], list(range(8, 16)))
    F = growth_fit(enumerate_ball(FreeGroup(2), 12).sizes())
    ok = (abs(Z.poly_degree_estimate - 1) < 0.1 and abs(Z2.poly_degree_estimate - 2) < 0.3
          and abs(H.poly_degree_estimate - 4) < 0.5 and abs(F.exp_rate_estimate - 3) < 0.05)
    return ok, (f"degree Z={Z.poly_degree_estimate:.3f}, Z^2={Z2.poly_degree_estimate:.3f}, "
                f"heisenberg[8,15]={H.poly_degree_estimate:.3f}; free(2) rate={F.exp_rate_estimate:.4f}")


def criterion_9():
    F, Z, Z2, D = FreeGroup(2), FreeAbelian(1), FreeAbelian(2), InfiniteDihedral()
    measures = [
        uniform_on_ball(enumerate_ball(F, 6)),
        uniform_on_ball(enumerate_ball(Heisenberg(), 6)),
        uniform_on(named_group("Q8"), named_group("Q8").elements()),
        padded_measure(enumerate_ball(Z2, 5), (1, 0), 12),
        padded_measure(enumerate_ball(F, 4), F.generators[0], 9),
        *(random_walk_measure(G, n, lz) for G in (F, Z, Z2, D) for n in (1, 5, 10) for lz in (0, Fraction(1, 3))),
    ]
    mass = max(abs(mu.total_mass() - 1) for mu in measures)
    binom = all(
        random_walk_measure(Z, n).exact((2 * k - n,)) == Fraction(math.comb(n, k), 2**n)
        for n in range(11) for k in range(n + 1)
    )
    Q = named_group("Q8")
    mu = uniform_on(Q, Q.elements())
    covered = 0
    for seed in range(100):
        r = ds_sampled(Q, COMMUTATOR, mu, 10_000, seed)
        covered += r.lower <= 5 / 8 <= r.upper
    ok = mass <= 1e-12 and binom and covered >= 90
    return ok, (f"{len(measures)} measures, max|mass-1|={mass:.1e}; binomial exact n<=10: {binom}; "
                f"Q8 CI coverage {covered}/100")


def criterion_10():
    R = RewritingGroup(parse_rewriting_system((RWS / "z2.rws").read_text()))
    Z2 = FreeAbelian(2)
    report = check_confluence(R.spec)
    iso = True
    for n in range(7):
        br, bz = enumerate_ball(R, n, cache=False), enumerate_ball(Z2, n, cache=False)
        image = [Z2.evaluate_word(R.spell(g)) for g in br.elements]
        iso &= image == bz.elements and br.sphere_offsets == bz.sphere_offsets
    bad = RewritingGroup(parse_rewriting_system((RWS / "nonconfluent.rws").read_text()))
    try:
        enumerate_ball(bad, 2, cache=False)
        rejected = False
    except NonConfluentError:
        rejected = True
    ok = iso and report.confluent and rejected
    return ok, (f"balls n<=6 match free-abelian(2): {iso}; confluence clean: {report.confluent}; "
                f"non-confluent system rejected: {rejected}")


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def evaluate(k):
    t = time.perf_counter()
    ok, detail = CRITERIA[k]()
    dt = time.perf_counter() - t
    in_time = dt < LIMITS[k]
    status = "PASS" if ok and in_time else "FAIL"
    return status, f"criterion {k:2d}: {status}  ({dt:.1f}s, limit {LIMITS[k]}s) {detail}"


def _report(k, capsys=None):
    status, line = evaluate(k)
    if capsys is None:
        print(line, flush=True)
    else:
        with capsys.disabled():
            print("\n" + line, flush=True)
    return status


# -- pytest entry points -------------------------------------------------------------

@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 7, 8, 9, 10])
def test_criterion(k, capsys):
    assert _report(k, capsys) == "PASS"


def test_criterion_6(capsys):
    # prints the full criterion line (FAIL because of the torsion sub-claim);
    # the sub-claims that do hold are asserted here
    _report(6, capsys)
    parts = criterion_6_parts()
    for key in ("dc", "centralizer", "bound"):
        assert parts[key][0], parts[key][1]


@pytest.mark.xfail(strict=True, reason="torsion density in Z2*Z2*Z2 is not monotone: it rises at odd radii")
def test_criterion_6_torsion_strictly_decreasing():
    ok, detail = criterion_6_parts()["torsion"]
    assert ok, detail


if __name__ == "__main__":
    statuses = [_report(k) for k in CRITERIA]
    sys.exit(0 if all(s == "PASS" for s in statuses) else 1)
