"""Finite-support probability measures on a group."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cayley import DEFAULT_MAX_ELEMENTS, Ball, BallTooLargeError
from .groups import GroupModel, GroupError

NORMALIZATION_TOL = 1e-12


class TorsionElementError(GroupError):
    """Padding requires an element whose infinite order the model can prove."""


@dataclass(eq=False)
class Measure:
    """Atoms ``support[i]`` with mass ``prob[i] > 0``.

    ``weights``/``total`` (integers) give exact masses weights[i]/total when
    the construction is exact; uniform measures have all weights 1.
    """

    group: GroupModel
    support: list
    prob: np.ndarray
    weights: list | None = None
    total: int | None = None
    label: str = ""
    index: dict = field(default=None, repr=False)
    _batch: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.index is None:
            self.index = {g: i for i, g in enumerate(self.support)}
        if len(self.index) != len(self.support):
            raise ValueError("measure support has duplicates")
        if np.any(self.prob <= 0):
            raise ValueError("zero-probability atoms must not be stored")

    def __len__(self):
        return len(self.support)

    def __getitem__(self, g) -> float:
        i = self.index.get(g)
        return 0.0 if i is None else float(self.prob[i])

    @property
    def is_uniform(self) -> bool:
        return self.weights is not None and all(w == 1 for w in self.weights)

    @property
    def is_exact(self) -> bool:
        return self.weights is not None

    def exact(self, g) -> Fraction:
        if self.weights is None:
            raise ValueError("measure has no exact masses")
        i = self.index.get(g)
        return Fraction(0) if i is None else Fraction(self.weights[i], self.total)

    def total_mass(self) -> float:
        return math.fsum(self.prob)

    @property
    def batch(self):
        if self._batch is None:
            self._batch = self.group.pack(self.support)
        return self._batch

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["element", "prob"])
        for g, p in zip(self.support, self.prob):
            w.writerow([self.group.render(g), repr(float(p))])
        return buf.getvalue()


def _uniform(G: GroupModel, support: list, label: str) -> Measure:
    n = len(support)
    if n == 0:
        raise ValueError("uniform measure needs a nonempty support")
    return Measure(G, support, np.full(n, 1.0 / n), [1] * n, n, label)


def uniform_on_ball(B: Ball) -> Measure:
    mu = _uniform(B.group, list(B.elements), f"uniform on B_{B.label}({B.radius})")
    mu._batch = B._batch
    return mu


def uniform_on(G: GroupModel, elements: Sequence, label: str = "uniform") -> Measure:
    return _uniform(G, list(dict.fromkeys(elements)), label)


def _as_fraction(laziness) -> Fraction:
    lazy = laziness if isinstance(laziness, Fraction) else Fraction(laziness).limit_denominator(10**9)
    if not 0 <= lazy < 1:
        raise ValueError("laziness must lie in [0, 1)")
    return lazy


def random_walk_measures(
    G: GroupModel,
    steps: Sequence[int],
    laziness: float | Fraction = 0,
    generators: Sequence | None = None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
):
    """Yield ``(n, law of the n-step walk)`` for ascending ``steps``.

    Each step stays put with probability ``laziness`` and otherwise multiplies
    on the right by a uniformly chosen element of X ∪ X⁻¹. Masses are exact
    integer path weights over the common denominator (den·|X±|)ⁿ.
    """
    steps = list(steps)
    if any(n < 0 for n in steps) or steps != sorted(steps):
        raise ValueError("steps must be non-negative and ascending")
    lazy = _as_fraction(laziness)
    alphabet = G.symmetric_alphabet(generators)
    k = len(alphabet)
    stay_w = lazy.numerator * k
    move_w = lazy.denominator - lazy.numerator
    step_total = lazy.denominator * k
    dist = {G.identity: 1}
    done = 0
    for n in steps:
        while done < n:
            nxt: dict = {}
            for g, w in dist.items():
                if stay_w:
                    nxt[g] = nxt.get(g, 0) + w * stay_w
                for x in alphabet:
                    h = G.mul(g, x)
                    nxt[h] = nxt.get(h, 0) + w * move_w
            if len(nxt) > max_elements:
                raise BallTooLargeError(f"walk support exceeds {max_elements} elements")
            dist = nxt
            done += 1
        total = step_total**n
        support = [g for g, w in dist.items() if w]
        weights = [dist[g] for g in support]
        prob = np.array([w / total for w in weights], dtype=float)
        yield n, Measure(G, support, prob, weights, total, f"random walk n={n} lazy={lazy}")


def random_walk_measure(
    G: GroupModel,
    n: int,
    laziness: float | Fraction = 0,
    generators: Sequence | None = None,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> Measure:
    """Law of the n-step (optionally lazy) simple random walk from the identity."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return next(random_walk_measures(G, [n], laziness, generators, max_elements))[1]


def padded_measure(B: Ball, g, M: int, cap: int = 10_000) -> Measure:
    """Uniform on B ∪ {gʳ : |r| ≤ M}; g must have provably infinite order."""
    G = B.group
    res = G.order_of(g, cap)
    if not res.is_infinite:
        raise TorsionElementError(
            f"padding element {G.render(g)} has order {res}; an infinite-order proof is required"
        )
    support = list(B.elements)
    seen = set(B.index)
    pos = neg = G.identity
    ginv = G.inv(g)
    for _ in range(M):
        pos = G.mul(pos, g)
        neg = G.mul(neg, ginv)
        for h in (pos, neg):
            if h not in seen:
                seen.add(h)
                support.append(h)
    return _uniform(G, support, f"padded B({B.radius}) with M={M}")
