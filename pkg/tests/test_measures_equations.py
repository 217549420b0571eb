import itertools
import math
import random
from fractions import Fraction

import pytest

from commdeg.cayley import enumerate_ball
from commdeg.equations import (
    ArityError,
    EquationSystem,
    VacuousWordError,
    Word,
    WordSyntaxError,
    evaluate,
    evaluate_batch,
    is_solution,
    parse_word,
)
from commdeg.groups import FreeAbelian, FreeGroup, InfiniteDihedral, named_group, symmetric
from commdeg.measures import (
    TorsionElementError,
    padded_measure,
    random_walk_measure,
    uniform_on,
    uniform_on_ball,
)


# -- measures ---------------------------------------------------------------

def test_uniform_examples():
    Z = FreeAbelian(1)
    mu = uniform_on_ball(enumerate_ball(Z, 1))
    assert {g: mu.exact(g) for g in mu.support} == {(-1,): Fraction(1, 3), (0,): Fraction(1, 3), (1,): Fraction(1, 3)}
    Q = named_group("Q8")
    assert len(uniform_on(Q, Q.elements())) == 8
    mu = uniform_on_ball(enumerate_ball(FreeGroup(2), 2))
    assert len(mu) == 17 and mu.is_uniform


def test_random_walk_examples():
    Z = FreeAbelian(1)
    mu = random_walk_measure(Z, 2)
    assert mu.exact((0,)) == Fraction(1, 2) and mu.exact((2,)) == Fraction(1, 4)
    assert (1,) not in mu.index
    lazy = random_walk_measure(Z, 1, 0.5)
    assert lazy.exact((0,)) == Fraction(1, 2) and lazy.exact((-1,)) == Fraction(1, 4)
    F = FreeGroup(2)
    mu = random_walk_measure(F, 2)
    assert mu.exact(F.identity) == Fraction(1, 4)
    words = [g for g in mu.support if g]
    assert len(words) == 12 and all(mu.exact(g) == Fraction(1, 16) for g in words)


@pytest.mark.parametrize("n", range(11))
def test_random_walk_binomial(n):
    mu = random_walk_measure(FreeAbelian(1), n)
    for k in range(n + 1):
        assert mu.exact((2 * k - n,)) == Fraction(math.comb(n, k), 2**n)


def test_walk_support_parity_and_lazy_support():
    Z = FreeAbelian(1)
    for n in range(1, 9):
        mu = random_walk_measure(Z, n)
        assert all((abs(g[0]) - n) % 2 == 0 for g in mu.support)
        lazy = random_walk_measure(Z, n, 0.25)
        assert set(lazy.support) == set(enumerate_ball(Z, n).elements)
    F = FreeGroup(2)
    assert set(random_walk_measure(F, 4, Fraction(1, 3)).support) == set(enumerate_ball(F, 4).elements)


def test_padded_examples():
    Z2 = FreeAbelian(2)
    B = enumerate_ball(Z2, 1)
    mu = padded_measure(B, (1, 0), 3)
    assert len(mu) == 9 and set(mu.support) == set(B.elements) | {(2, 0), (-2, 0), (3, 0), (-3, 0)}
    assert padded_measure(B, (1, 0), 0).support == uniform_on_ball(B).support
    D = InfiniteDihedral()
    with pytest.raises(TorsionElementError):
        padded_measure(enumerate_ball(D, 2), D.generators[0], 2)


def test_normalization_and_csv():
    for mu in [random_walk_measure(FreeGroup(2), 6), random_walk_measure(FreeAbelian(2), 9, 0.3),
               padded_measure(enumerate_ball(FreeGroup(2), 3), (1,), 7)]:
        assert abs(mu.total_mass() - 1) < 1e-12
        assert sum(Fraction(w, mu.total) for w in mu.weights) == 1
    text = uniform_on_ball(enumerate_ball(FreeAbelian(1), 1)).to_csv()
    assert text.splitlines()[0] == "element,prob"


# -- equations -----------------------------------------------------------------

def test_parse_examples():
    w = parse_word("[x1,x2]")
    assert w.letters == (-1, -2, 1, 2) and w.arity == 2
    with pytest.raises(VacuousWordError):
        parse_word("x1 x1^-1")
    m = parse_word("[[x1,x2],[x3,x4]]")
    assert len(m) == 16 and m.arity == 4
    assert parse_word("X1 x2^2").letters == (-1, 2, 2)
    assert parse_word("(x1 x2)^-2").letters == (-2, -1, -2, -1)


@pytest.mark.parametrize("text,pos", [("x1 ? x2", 3), ("[x1 x2]", 6), ("x1^", 3), ("x0", 0)])
def test_syntax_errors_report_position(text, pos):
    with pytest.raises(WordSyntaxError) as err:
        parse_word(text)
    assert err.value.pos == pos


def test_evaluate_examples():
    F = FreeGroup(2)
    a, b = F.generators
    c = parse_word("[x1,x2]")
    assert evaluate(F, c, [a, F.mul(a, a)]) == F.identity
    assert evaluate(F, c, [a, b]) == F.parse_element("ABab")
    with pytest.raises(ArityError):
        evaluate(F, c, [a])
    S3 = symmetric(3)
    m = parse_word("[[x1,x2],[x3,x4]]")
    assert all(evaluate(S3, m, t) == S3.identity for t in itertools.product(S3.elements(), repeat=4))


def test_is_solution_examples():
    Z2 = FreeAbelian(2)
    assert is_solution(Z2, EquationSystem.parse("[x1,x2]"), [(1, 2), (3, -1)])
    Z = FreeAbelian(1)
    sq = EquationSystem.parse("x1^2")
    assert is_solution(Z, sq, [(0,)]) and not is_solution(Z, sq, [(1,)])
    S3 = symmetric(3)
    r = next(g for g in S3.elements() if S3.order_of(g).order == 3)
    assert is_solution(S3, EquationSystem.parse(["[x1,x2]", "x1^3"]), [r, S3.mul(r, r)])


def test_evaluation_respects_free_reduction():
    F = FreeGroup(2)
    rng = random.Random(0)
    alphabet = F.symmetric_alphabet()
    for _ in range(1000):
        raw = [rng.choice([1, -1, 2, -2, 3, -3]) for _ in range(rng.randint(1, 10))]
        w = Word.from_letters(raw)
        vals = [rng.choice(alphabet) for _ in range(3)]
        direct = F.identity
        for x in raw:
            v = vals[abs(x) - 1]
            direct = F.mul(direct, v if x > 0 else F.inv(v))
        assert evaluate(F, w, vals) == direct


def test_batch_evaluation_matches_scalar():
    from commdeg.groups import Heisenberg

    H = Heisenberg()
    B = enumerate_ball(H, 2)
    w = parse_word("[x1,x2] x1^2")
    xs, ys = B.elements, list(reversed(B.elements))
    got = H.unpack(evaluate_batch(H, w, [H.pack(xs), H.pack(ys)]))
    assert got == [evaluate(H, w, [x, y]) for x, y in zip(xs, ys)]
