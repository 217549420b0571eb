"""Cayley balls by breadth-first search, f-balls, coset densities and growth fits."""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import pickle
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .groups import GroupModel, Homomorphism

log = logging.getLogger(__name__)

DEFAULT_MAX_ELEMENTS = 20_000_000
CACHE_VERSION = 1
_CACHE_MAGIC = b"COMMDEG-BALL"


class BallTooLargeError(RuntimeError):
    """Enumeration would exceed the configured element cap."""


@dataclass(eq=False)
class Ball:
    """B_X(n) in BFS discovery order.

    ``sphere_offsets[r]`` is the index where sphere r starts;
    ``sphere_offsets[radius + 1] == len(elements)``. Every B_X(r) with r ≤
    radius is therefore the prefix ``elements[:sphere_offsets[r + 1]]``.
    """

    group: GroupModel
    radius: int
    elements: list
    sphere_offsets: tuple
    generators: tuple = ()
    label: str = "X"
    index: dict = field(default=None, repr=False)
    _batch: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.index is None:
            self.index = {g: i for i, g in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    def __iter__(self):
        return iter(self.elements)

    def size(self, r: int) -> int:
        return self.sphere_offsets[min(r, self.radius) + 1]

    def sphere(self, r: int) -> list:
        return self.elements[self.sphere_offsets[r] : self.sphere_offsets[r + 1]]

    def sphere_sizes(self) -> list[int]:
        o = self.sphere_offsets
        return [o[r + 1] - o[r] for r in range(self.radius + 1)]

    def sizes(self) -> list[int]:
        return [self.size(r) for r in range(self.radius + 1)]

    def distance(self, g) -> int | None:
        i = self.index.get(g)
        if i is None:
            return None
        return int(np.searchsorted(self.sphere_offsets, i, side="right") - 1)

    def distances(self) -> np.ndarray:
        out = np.empty(len(self.elements), dtype=np.int32)
        o = self.sphere_offsets
        for r in range(self.radius + 1):
            out[o[r] : o[r + 1]] = r
        return out

    @property
    def batch(self):
        """Model-specific packed array of all elements (cached)."""
        if self._batch is None:
            self._batch = self.group.pack(self.elements)
        return self._batch

    def prefix(self, r: int) -> "Ball":
        if r >= self.radius:
            return self
        n = self.size(r)
        return Ball(
            self.group,
            r,
            self.elements[:n],
            self.sphere_offsets[: r + 2],
            self.generators,
            self.label,
        )


def _alphabet_key(G: GroupModel, alphabet) -> str:
    return hashlib.sha1(repr(alphabet).encode()).hexdigest()[:12]


class BallCache:
    """In-memory LRU of the largest ball per (model, alphabet), with an
    optional on-disk directory of pickled balls behind a version header."""

    def __init__(self, directory: Path | None = None, capacity: int = 8):
        self.directory = Path(directory) if directory else None
        self.capacity = capacity
        self._mem: OrderedDict = OrderedDict()

    def _path(self, key) -> Path:
        return self.directory / f"{key[0]}-{key[1]}.ball"

    def get(self, key, n):
        ball = self._mem.get(key)
        if ball is None and self.directory is not None:
            ball = self._load(key)
        if ball is None or ball.radius < n:
            return None
        self._mem[key] = ball
        self._mem.move_to_end(key)
        return ball

    def put(self, key, ball):
        old = self._mem.get(key)
        if old is not None and old.radius >= ball.radius:
            return
        self._mem[key] = ball
        self._mem.move_to_end(key)
        while len(self._mem) > self.capacity:
            self._mem.popitem(last=False)
        if self.directory is not None:
            self._store(key, ball)

    def _load(self, key):
        path = self._path(key)
        if not path.exists():
            return None
        with path.open("rb") as fh:
            if fh.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
                return None
            version = int.from_bytes(fh.read(2), "big")
            if version != CACHE_VERSION:
                return None
            payload = pickle.load(fh)
        return payload

    def _store(self, key, ball):
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(key)
        tmp = path.with_suffix(".tmp")
        with tmp.open("wb") as fh:
            fh.write(_CACHE_MAGIC)
            fh.write(CACHE_VERSION.to_bytes(2, "big"))
            slim = Ball(ball.group, ball.radius, ball.elements, ball.sphere_offsets, ball.generators, ball.label)
            pickle.dump(slim, fh, protocol=pickle.HIGHEST_PROTOCOL)
        tmp.replace(path)

    def clear(self):
        self._mem.clear()


_default_cache = BallCache()


def enumerate_ball(
    G: GroupModel,
    n: int,
    generators: Sequence | None = None,
    *,
    label: str = "X",
    max_elements: int = DEFAULT_MAX_ELEMENTS,
    cache: BallCache | None | bool = None,
) -> Ball:
    """Exact BFS closure of radius ``n`` over the symmetrized alphabet.

    Discovery order: parents in order, then the alphabet x1, x1⁻¹, x2, ...
    ``cache=False`` disables caching; ``None`` uses the process-wide cache.
    """
    if n < 0:
        raise ValueError("radius must be non-negative")
    G.enumeration_ready()
    gens = tuple(G.generators if generators is None else generators)
    alphabet = G.symmetric_alphabet(gens)
    if cache is None:
        cache = _default_cache
    key = (G.fingerprint(), _alphabet_key(G, alphabet))
    if cache:
        hit = cache.get(key, n)
        if hit is not None:
            return replace(hit.prefix(n), label=label)

    e = G.identity
    elements = [e]
    index = {e: 0}
    offsets = [0, 1]
    frontier = [e]
    extend = getattr(G, "extend_sphere", None)
    geodesic = extend is not None and generators is None
    for _ in range(n):
        if geodesic:
            new = extend(frontier, alphabet)
            if len(elements) + len(new) > max_elements:
                raise BallTooLargeError(f"ball exceeds {max_elements} elements")
            for h in new:
                index[h] = len(elements)
                elements.append(h)
        else:
            new = []
            mul = G.mul
            for g in frontier:
                for x in alphabet:
                    h = mul(g, x)
                    if h not in index:
                        index[h] = len(elements)
                        elements.append(h)
                        new.append(h)
                if len(elements) > max_elements:
                    raise BallTooLargeError(f"ball exceeds {max_elements} elements")
        offsets.append(len(elements))
        frontier = new
    ball = Ball(G, n, elements, tuple(offsets), gens, label, index)
    if cache:
        cache.put(key, ball)
    return ball


def ball_distance(B: Ball, g) -> int | None:
    """|g|_X if g lies in the ball, else None."""
    return B.distance(g)


# -- f-balls -----------------------------------------------------------------

@dataclass
class FBallSpec:
    """Either a subgroup restriction (membership predicate on B_X(n)) or a
    different generating set Y."""

    mode: str
    description: str = ""
    predicate: Callable | None = None
    generators: tuple = ()
    hom: Homomorphism | None = None

    @classmethod
    def kernel(cls, hom: Homomorphism, description: str = "") -> "FBallSpec":
        return cls("subgroup", description or f"ker({hom.label})", hom.in_kernel, hom=hom)

    @classmethod
    def subgroup(cls, predicate: Callable, description: str) -> "FBallSpec":
        return cls("subgroup", description, predicate)

    @classmethod
    def generating_set(cls, generators: Sequence, description: str = "Y") -> "FBallSpec":
        return cls("generators", description, generators=tuple(generators))

    def check_closure(self, G: GroupModel, members: Sequence, samples: int = 1000, seed: int = 0) -> bool:
        """Sampled check that the predicate is closed under mul and inv."""
        if self.mode != "subgroup" or not members:
            return True
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, len(members), size=(samples, 2))
        for i, j in idx:
            g, h = members[i], members[j]
            if not self.predicate(G.mul(g, h)) or not self.predicate(G.inv(g)):
                return False
        return True


def f_ball(G: GroupModel, spec: FBallSpec, n: int, **kwargs) -> Ball:
    if spec.mode == "generators":
        return enumerate_ball(G, n, spec.generators, label=spec.description or "Y", **kwargs)
    if spec.mode != "subgroup":
        raise ValueError(f"unknown f-ball mode {spec.mode!r}")
    B = enumerate_ball(G, n, **kwargs)
    return restrict_ball(B, spec.predicate, spec.description)


def restrict_ball(B: Ball, predicate: Callable, label: str = "H") -> Ball:
    """{h ∈ B : predicate(h)} with BFS order and X-distance spheres kept."""
    elements = []
    offsets = [0]
    o = B.sphere_offsets
    for r in range(B.radius + 1):
        elements.extend(g for g in B.elements[o[r] : o[r + 1]] if predicate(g))
        offsets.append(len(elements))
    return Ball(B.group, B.radius, elements, tuple(offsets), B.generators, label)


def metric_distortion(ball_x: Ball, ball_y: Ball) -> tuple[Fraction, Fraction] | None:
    """Empirical (min, max) of |u|_X / |u|_Y over non-identity u in both balls."""
    lo = hi = None
    dy = ball_y.distances()
    for i, u in enumerate(ball_y.elements):
        if dy[i] == 0:
            continue
        dx = ball_x.distance(u)
        if dx is None:
            continue
        q = Fraction(dx, int(dy[i]))
        lo = q if lo is None else min(lo, q)
        hi = q if hi is None else max(hi, q)
    return None if lo is None else (lo, hi)


# -- coset densities ------------------------------------------------------------

@dataclass
class CosetDensityRow:
    n: int
    ball_size: int
    count: int
    value: Fraction
    coset_counts: dict
    max_deviation: Fraction


def coset_density_series(
    G: GroupModel,
    hom: Homomorphism,
    g,
    n_max: int,
    ball: Ball | None = None,
    **kwargs,
) -> list[CosetDensityRow]:
    """Row n: exact |{u ∈ B(n) : image(u) = image(g)}| / |B(n)|, plus the
    largest |density − 1/d| over all d cosets of the kernel."""
    B = ball if ball is not None and ball.radius >= n_max else enumerate_ball(G, n_max, **kwargs)
    image_set = hom.image_subgroup()
    d = len(image_set)
    target_img = hom.image(g)
    images = [hom.image(u) for u in B.elements[: B.size(n_max)]]
    counts = {y: 0 for y in image_set}
    rows = []
    o = B.sphere_offsets
    for r in range(n_max + 1):
        for y in images[o[r] : o[r + 1]]:
            counts[y] += 1
        size = o[r + 1]
        dev = max(abs(Fraction(c, size) - Fraction(1, d)) for c in counts.values())
        rows.append(
            CosetDensityRow(r, size, counts[target_img], Fraction(counts[target_img], size), dict(counts), dev)
        )
    return rows


# -- growth ------------------------------------------------------------------

@dataclass
class GrowthFit:
    radii: list
    sizes: list
    ratios: list
    poly_degree_estimate: float
    exp_rate_estimate: float
    classification: str
    thresholds: tuple = (1.05, 1.02)


def growth_fit(
    sizes: Sequence[int],
    radii: Sequence[int] | None = None,
    exp_threshold: float = 1.05,
    poly_threshold: float = 1.02,
) -> GrowthFit:
    """Fit ball sizes.

    ``sizes[i]`` is |B(radii[i])| (radii default to 0, 1, 2, ...). The degree
    is the least-squares slope of log|B| vs log n over the top half of the
    positive radii; the exponential rate is the mean of the last half of the
    consecutive ratios.
    """
    sizes = [int(s) for s in sizes]
    radii = list(range(len(sizes))) if radii is None else [int(r) for r in radii]
    if len(sizes) != len(radii):
        raise ValueError("sizes and radii differ in length")
    if len(sizes) < 6:
        raise ValueError("growth_fit needs at least 6 radii")
    ratios = [sizes[i + 1] / sizes[i] for i in range(len(sizes) - 1)]
    pos = [(r, s) for r, s in zip(radii, sizes) if r > 0]
    top = pos[len(pos) // 2 :]
    if len(top) < 2:
        top = pos
    x = np.log([r for r, _ in top])
    y = np.log([s for _, s in top])
    slope = float(np.polyfit(x, y, 1)[0])
    tail = ratios[len(ratios) // 2 :]
    rate = float(np.mean(tail))
    declining = all(tail[i + 1] <= tail[i] + 1e-12 for i in range(len(tail) - 1))
    if rate >= exp_threshold:
        cls = "exponential-like"
    elif tail[-1] <= poly_threshold and declining:
        cls = "polynomial-like"
    else:
        cls = "inconclusive"
    return GrowthFit(radii, sizes, ratios, slope, rate, cls, (exp_threshold, poly_threshold))


def sphere_csv(B: Ball) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "size", "cumulative"])
    total = 0
    for r, s in enumerate(B.sphere_sizes()):
        total += s
        w.writerow([r, s, total])
    return buf.getvalue()
