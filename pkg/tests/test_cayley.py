import random
from fractions import Fraction

import pytest

from commdeg.cayley import (
    BallCache,
    BallTooLargeError,
    FBallSpec,
    ball_distance,
    coset_density_series,
    enumerate_ball,
    f_ball,
    growth_fit,
    metric_distortion,
    sphere_csv,
)
from commdeg.groups import (
    FreeAbelian,
    FreeGroup,
    FreeProduct,
    Heisenberg,
    InfiniteDihedral,
    cyclic,
    homomorphism_from_images,
    parity_homomorphism,
    quotient,
)

MODELS = [lambda: FreeGroup(2), lambda: FreeAbelian(2), lambda: Heisenberg(),
          lambda: InfiniteDihedral(), lambda: FreeProduct([2, 2, 2])]


def test_ball_size_examples():
    assert len(enumerate_ball(FreeAbelian(1), 3)) == 7
    assert len(enumerate_ball(FreeGroup(2), 2)) == 17
    assert len(enumerate_ball(Heisenberg(), 1)) == 5
    F = FreeGroup(2)
    assert enumerate_ball(F, 8).sizes() == [2 * 3**n - 1 for n in range(9)]


def test_distances():
    F = FreeGroup(2)
    B = enumerate_ball(F, 3)
    assert ball_distance(B, F.parse_element("ab")) == 2
    assert ball_distance(B, F.identity) == 0
    assert ball_distance(B, F.parse_element("abab")) is None
    H = Heisenberg()
    assert ball_distance(enumerate_ball(H, 5), (0, 0, 1)) == 4


@pytest.mark.parametrize("factory", MODELS)
def test_ball_invariants(factory):
    G = factory()
    B = enumerate_ball(G, 5, cache=False)
    assert B.elements[0] == G.identity
    d = list(B.distances())
    assert d == sorted(d)
    # inversion closure, with distances preserved
    for g in B.elements:
        assert B.distance(G.inv(g)) == B.distance(g)
    # nesting
    small = enumerate_ball(G, 4, cache=False)
    assert small.elements == B.elements[: len(small)]
    # triangle inequality on sampled pairs
    rng = random.Random(0)
    inner = B.elements[: B.size(2)]
    for _ in range(1000):
        g, h = rng.choice(inner), rng.choice(inner)
        gh = B.distance(G.mul(g, h))
        assert gh is not None and gh <= B.distance(g) + B.distance(h)


def test_generators_order_is_deterministic():
    F = FreeGroup(2)
    fast = enumerate_ball(F, 5, cache=False)
    slow = enumerate_ball(F, 5, F.generators, cache=False)
    assert fast.elements == slow.elements


def test_memory_cap():
    with pytest.raises(BallTooLargeError):
        enumerate_ball(FreeGroup(2), 6, max_elements=100, cache=False)


def test_cache_roundtrip(tmp_path):
    cache = BallCache(tmp_path)
    H = Heisenberg()
    a = enumerate_ball(H, 6, cache=cache)
    assert list(tmp_path.glob("*.ball"))
    fresh = BallCache(tmp_path)
    b = enumerate_ball(H, 4, cache=fresh)
    assert b.elements == a.elements[: a.size(4)]
    assert b.sphere_offsets == a.sphere_offsets[:6]


def test_f_ball_examples():
    Z2 = FreeAbelian(2)
    hom = homomorphism_from_images(Z2, cyclic(2), {"e1": "1", "e2": "0"})
    B = f_ball(Z2, FBallSpec.kernel(hom), 1)
    assert set(B.elements) == {(0, 0), (0, 1), (0, -1)}
    F = FreeGroup(2)
    Bf = f_ball(F, FBallSpec.kernel(parity_homomorphism(F)), 2)
    assert len(Bf) == 13
    D = InfiniteDihedral()
    s, t = D.generators
    BY = f_ball(D, FBallSpec.generating_set([s, D.mul(s, t)], "Y"), 6)
    BX = enumerate_ball(D, 6)
    assert BY.elements[0] == BX.elements[0] == D.identity
    assert metric_distortion(BX, BY) is not None


def test_f_ball_sandwich():
    H = Heisenberg()
    _, hom = quotient(H, 2)
    spec = FBallSpec.kernel(hom)
    B = enumerate_ball(H, 6)
    fb = f_ball(H, spec, 6)
    assert set(fb.elements) == {g for g in B.elements if hom.image(g) == hom.target.identity}
    assert spec.check_closure(H, fb.elements)


def test_coset_density_examples():
    Z = FreeAbelian(1)
    _, hom = quotient(Z, 2)
    rows = coset_density_series(Z, hom, (0,), 60)
    assert rows[4].value == Fraction(5, 9)
    assert all(abs(float(r.value) - 0.5) < 0.02 for r in rows[50:])
    for r in rows:
        assert sum(Fraction(c, r.ball_size) for c in r.coset_counts.values()) == 1


def test_growth_fit_examples():
    assert abs(growth_fit([2 * n + 1 for n in range(30)]).poly_degree_estimate - 1) < 0.1
    fit = growth_fit([2 * 3**n - 1 for n in range(12)])
    assert abs(fit.exp_rate_estimate - 3) < 0.05
    assert fit.classification == "exponential-like"
    with pytest.raises(ValueError):
        growth_fit([1, 3, 5])


def test_sphere_csv():
    text = sphere_csv(enumerate_ball(FreeAbelian(1), 2))
    assert text.splitlines() == ["n,size,cumulative", "0,1,1", "1,2,3", "2,2,5"]
