"""Exact and sampled degrees of commutativity and satisfiability."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Iterable, Sequence

import numpy as np

from .cayley import Ball, BallCache, FBallSpec, enumerate_ball, f_ball
from .equations import COMMUTATOR, EquationSystem, solution_mask
from .groups import GroupModel, InfiniteGroupError
from .measures import Measure, padded_measure, random_walk_measures, uniform_on, uniform_on_ball

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9
DEFAULT_SAMPLES = 100_000
MIN_SAMPLES = 100
SAMPLE_CHUNK = 1 << 16
_PAIR_BLOCK = 1 << 21
Z95 = NormalDist().inv_cdf(0.975)


class BudgetExceeded(RuntimeError):
    def __init__(self, work: int, budget: int, what: str = "exact computation"):
        super().__init__(
            f"{what} needs ~{work:.3g} multiplications, over the budget of {budget:.3g}; "
            "use sampled mode or raise the budget"
        )
        self.work = work
        self.budget = budget


@dataclass(frozen=True)
class EstimateReport:
    value: float
    mode: str
    exact: Fraction | None = None
    samples: int = 0
    ci95: tuple | None = None
    seed: int | None = None
    support_size: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"bad mode {self.mode!r}")
        if (self.exact is not None) != (self.mode == "exact"):
            raise ValueError("exact value present iff mode is exact")
        if (self.ci95 is not None) != (self.mode == "sampled"):
            raise ValueError("ci95 present iff mode is sampled")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"value {self.value} outside [0, 1]")
        if self.ci95 is not None and not self.ci95[0] <= self.value <= self.ci95[1]:
            raise ValueError("value outside its confidence interval")

    @classmethod
    def from_exact(cls, q: Fraction, support_size: int) -> "EstimateReport":
        return cls(float(q), "exact", exact=q, support_size=support_size)

    @property
    def upper(self) -> float:
        return self.ci95[1] if self.ci95 else self.value

    @property
    def lower(self) -> float:
        return self.ci95[0] if self.ci95 else self.value


@dataclass
class DcSeries:
    """Per-n reports plus prefix maxima; a finite-n surrogate for limsup."""

    entries: list = field(default_factory=list)
    running_max: list = field(default_factory=list)
    label: str = ""
    no_limit_claimed: bool = True

    def append(self, n: int, report: EstimateReport) -> None:
        prev = self.running_max[-1] if self.running_max else 0.0
        self.entries.append((n, report))
        self.running_max.append(max(prev, report.value))

    @property
    def radii(self) -> list:
        return [n for n, _ in self.entries]

    @property
    def values(self) -> list:
        return [r.value for _, r in self.entries]

    def report(self, n: int) -> EstimateReport:
        for m, r in self.entries:
            if m == n:
                return r
        raise KeyError(n)

    def window(self, lo: int, hi: int) -> list:
        return [(n, r) for n, r in self.entries if lo <= n <= hi]


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    lo, hi = max(0.0, centre - half), min(1.0, centre + half)
    # guard against rounding pushing p̂ just outside
    return min(lo, p), max(hi, p)


# -- exact pair counting ------------------------------------------------------

def _weights_array(weights: Sequence[int], n: int):
    if not weights:
        return np.ones(0, dtype=np.int64)
    big = max(weights) * n >= 2**62
    return np.array(weights, dtype=object if big else np.int64)


def _row_blocks(n: int, block: int = _PAIR_BLOCK) -> list[tuple[int, int]]:
    # rows [a, b) are compared against columns [0, b), at most ``block`` pairs
    rows = max(1, block // max(n, 1))
    return [(a, min(n, a + rows)) for a in range(0, n, rows)]


def commuting_row_sums(
    G: GroupModel,
    elements: Sequence,
    weights: Sequence[int] | None = None,
    batch=None,
    threads: int = 1,
    use_keys: bool = True,
) -> list[int]:
    """S[i] = Σ w_j over j < i with u_j u_i = u_i u_j (w ≡ 1 when omitted).

    Models with a ``commute_key`` (free groups, free products) are counted in
    one linear pass; ``use_keys=False`` forces the pairwise scan.
    """
    n = len(elements)
    unit = weights is None
    key_fn = getattr(G, "commute_key", None) if use_keys else None
    if key_fn is not None:
        return _row_sums_by_key(G, elements, weights, key_fn)
    if batch is None:
        batch = G.pack(elements)
    w = None if unit else _weights_array(list(weights), n)

    def work(block):
        a, b = block
        rows = np.repeat(np.arange(a, b), b)
        cols = np.tile(np.arange(b), b - a)
        mask = np.asarray(G.commutes_batch(G.take(batch, rows), G.take(batch, cols)), dtype=bool)
        mask = mask.reshape(b - a, b) & (cols < rows).reshape(b - a, b)
        if unit:
            return mask.sum(axis=1).tolist()
        if w.dtype == object:
            return [sum(w[:b][m].tolist()) for m in mask]
        return (mask.astype(np.int64) @ w[:b]).tolist()

    blocks = _row_blocks(n)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    return [int(x) for part in parts for x in part]


def _row_sums_by_key(G, elements, weights, key_fn) -> list[int]:
    e = G.identity
    before = 0
    id_weight = 0
    by_key: dict = {}
    out = []
    for i, g in enumerate(elements):
        w = 1 if weights is None else weights[i]
        if g == e:
            out.append(before)
            id_weight += w
        else:
            k = key_fn(g)
            out.append(id_weight + by_key.get(k, 0))
            by_key[k] = by_key.get(k, 0) + w
        before += w
    return out


def _check_budget(work: int, budget: int | None, what: str) -> None:
    if budget is not None and work > budget:
        raise BudgetExceeded(work, budget, what)


def commuting_pairs(G: GroupModel, elements: Sequence, threads: int = 1, batch=None) -> int:
    """|{(u, v) ∈ S² : uv = vu}| for a duplicate-free list S."""
    sums = commuting_row_sums(G, elements, batch=batch, threads=threads)
    return len(elements) + 2 * sum(sums)


def dc_exact_on_ball(
    G: GroupModel, B: Ball | Sequence, budget: int | None = DEFAULT_BUDGET, threads: int = 1
) -> Fraction:
    """Exact fraction of commuting ordered pairs in B (Σ_u |C(u) ∩ B| / |B|²)."""
    elements = B.elements if isinstance(B, Ball) else list(B)
    n = len(elements)
    if n == 0:
        raise ValueError("empty ball")
    _check_budget(n * n, budget, "exact pair count")
    batch = B.batch if isinstance(B, Ball) else None
    return Fraction(commuting_pairs(G, elements, threads, batch), n * n)


def dc_exact_by_radius(
    G: GroupModel, B: Ball, budget: int | None = DEFAULT_BUDGET, threads: int = 1
) -> list[Fraction]:
    """Exact dc on every B(r), r ≤ B.radius, from one pass over the largest ball.

    B(r) is a prefix of B, so pairs counted in the lower triangle up to index
    |B(r)| give count(r) = |B(r)| + 2 Σ_{i < |B(r)|} S[i].
    """
    n = len(B)
    _check_budget(n * n, budget, "exact pair count")
    sums = commuting_row_sums(G, B.elements, batch=B.batch, threads=threads)
    prefix = np.concatenate([[0], np.cumsum(np.asarray(sums, dtype=np.int64))])
    out = []
    for r in range(B.radius + 1):
        s = B.size(r)
        out.append(Fraction(s + 2 * int(prefix[s]), s * s))
    return out


def dc_exact_on_measure(
    G: GroupModel, mu: Measure, budget: int | None = DEFAULT_BUDGET, threads: int = 1
) -> Fraction:
    """Exact μ×μ mass of commuting pairs for a measure with exact weights."""
    if not mu.is_exact:
        raise ValueError("measure has no exact weights")
    n = len(mu)
    _check_budget(n * n, budget, "exact pair count")
    if mu.is_uniform:
        return Fraction(commuting_pairs(G, mu.support, threads, mu.batch), n * n)
    sums = commuting_row_sums(G, mu.support, mu.weights, mu.batch, threads)
    num = sum(w * w for w in mu.weights) + 2 * sum(w * s for w, s in zip(mu.weights, sums))
    return Fraction(num, mu.total * mu.total)


def dc_finite(G: GroupModel, threads: int = 1) -> Fraction:
    if not G.is_finite:
        raise InfiniteGroupError(f"{G.kind} is not a finite model")
    elements = G.elements()
    return Fraction(commuting_pairs(G, elements, threads), len(elements) ** 2)


def centralizer_in_ball(G: GroupModel, g, B: Ball | Sequence) -> int:
    """|{u ∈ B : ug = gu}|."""
    if isinstance(B, Ball):
        batch, n = B.batch, len(B)
    else:
        batch, n = G.pack(list(B)), len(B)
    if n == 0:
        return 0
    return int(np.count_nonzero(G.commutes_batch(G.repeat(g, n), batch)))


# -- equations ------------------------------------------------------------------

def _flat_tuples(n: int, k: int, start: int, stop: int) -> np.ndarray:
    flat = np.arange(start, stop, dtype=np.int64)
    return np.stack(np.unravel_index(flat, (n,) * k), axis=1)


def ds_exact(
    G: GroupModel,
    E: EquationSystem,
    mu: Measure,
    budget: int | None = DEFAULT_BUDGET,
    threads: int = 1,
) -> EstimateReport:
    """Σ over Supp(μ)^k of Π μ(g_i)·[tuple solves E], by generic word evaluation."""
    k = E.arity
    n = len(mu)
    letters = sum(len(w) for w in E.words)
    total_tuples = n**k
    _check_budget(total_tuples * max(letters, 1), budget, "exact tuple enumeration")
    if not mu.is_exact:
        raise ValueError("ds_exact needs a measure with exact weights")
    w = _weights_array(list(mu.weights), n)
    batch = mu.batch
    chunk = max(1, SAMPLE_CHUNK * 4 // max(k, 1))

    def work(start):
        stop = min(total_tuples, start + chunk)
        idx = _flat_tuples(n, k, start, stop)
        cols = [G.take(batch, idx[:, j]) for j in range(k)]
        mask = np.asarray(solution_mask(G, E, cols), dtype=bool)
        sel = idx[mask]
        if mu.is_uniform:
            return len(sel)
        return sum(math.prod(int(w[i]) for i in row) for row in sel.tolist())

    starts = range(0, total_tuples, chunk)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    den = n**k if mu.is_uniform else mu.total**k
    q = Fraction(sum(parts), den)
    return EstimateReport(float(q), "exact", exact=q, samples=total_tuples, support_size=n)


def ds_sampled(
    G: GroupModel,
    E: EquationSystem,
    mu: Measure,
    samples: int,
    seed: int,
    threads: int = 1,
    predicate: Callable | None = None,
) -> EstimateReport:
    """Monte-Carlo frequency of solutions among i.i.d. tuples from μ^×k.

    Chunk i draws from the substream ``SeedSequence(seed).spawn(...)[i]``, so
    results do not depend on ``threads``. ``predicate(cols) -> bool mask``
    replaces generic word evaluation when supplied.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"sampled mode needs at least {MIN_SAMPLES} samples")
    if seed is None:
        raise ValueError("sampled mode needs a seed")
    k = E.arity
    cdf = np.cumsum(mu.prob)
    top = cdf[-1]
    batch = mu.batch
    n_chunks = -(-samples // SAMPLE_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(n_chunks)

    def work(i):
        m = min(SAMPLE_CHUNK, samples - i * SAMPLE_CHUNK)
        rng = np.random.default_rng(streams[i])
        u = rng.random((m, k)) * top
        idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
        cols = [G.take(batch, idx[:, j]) for j in range(k)]
        mask = predicate(cols) if predicate is not None else solution_mask(G, E, cols)
        return int(np.count_nonzero(mask))

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(work, range(n_chunks)))
    else:
        hits = sum(work(i) for i in range(n_chunks))
    value = hits / samples
    return EstimateReport(
        value, "sampled", samples=samples, ci95=wilson_interval(hits, samples), seed=seed, support_size=len(mu)
    )


def dc_sampled(G: GroupModel, mu: Measure, samples: int, seed: int, threads: int = 1) -> EstimateReport:
    """ds_sampled for [x1,x2] using the model's batched commutation test."""
    return ds_sampled(
        G, COMMUTATOR, mu, samples, seed, threads, predicate=lambda c: G.commutes_batch(c[0], c[1])
    )


# -- series -----------------------------------------------------------------------

FAMILIES = ("uniform-ball", "random-walk", "padded", "f-ball", "full-group")


@dataclass
class EstimatorSettings:
    mode: str = "auto"
    budget: int = DEFAULT_BUDGET
    samples: int = DEFAULT_SAMPLES
    seed: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "sampled"):
            raise ValueError(f"unknown estimator mode {self.mode!r}")
        if self.mode == "sampled" and self.seed is None:
            raise ValueError("sampled mode needs a seed")

    def use_exact(self, work: int) -> bool:
        if self.mode == "exact":
            return True
        if self.mode == "sampled":
            return False
        if work <= self.budget:
            return True
        if self.seed is None:
            raise BudgetExceeded(work, self.budget, "auto mode without a seed")
        log.info("work %.3g exceeds budget %.3g; switching to sampling", work, self.budget)
        return False

    def seed_for(self, n: int) -> int:
        # one reproducible stream per radius
        return int(np.random.SeedSequence([self.seed, n]).generate_state(1)[0])


def _estimate(G, mu: Measure, E: EquationSystem | None, s: EstimatorSettings, n: int) -> EstimateReport:
    size = len(mu)
    if E is None or E == COMMUTATOR:
        if s.use_exact(size * size):
            q = dc_exact_on_measure(G, mu, None if s.mode == "exact" else s.budget, s.threads)
            return EstimateReport.from_exact(q, size)
        return dc_sampled(G, mu, s.samples, s.seed_for(n), s.threads)
    work = size**E.arity * sum(len(w) for w in E.words)
    if s.use_exact(work):
        return ds_exact(G, E, mu, None if s.mode == "exact" else s.budget, s.threads)
    return ds_sampled(G, E, mu, s.samples, s.seed_for(n), s.threads)


def _schedule(M, n: int) -> int:
    if callable(M):
        return int(M(n))
    if isinstance(M, (list, tuple)):
        return int(M[n]) if n < len(M) else int(M[-1])
    return int(M)


def dc_series(
    G: GroupModel,
    radii: Iterable[int],
    family: str = "uniform-ball",
    settings: EstimatorSettings | None = None,
    *,
    equations: EquationSystem | None = None,
    generators: Sequence | None = None,
    laziness=0,
    padding_element=None,
    padding_schedule=0,
    fball: FBallSpec | None = None,
    cache: BallCache | None | bool = None,
    label: str = "",
) -> DcSeries:
    """One report per radius; exact where within budget, sampled otherwise.

    With ``equations`` the series is ds for that system; default is dc.
    """
    radii = list(radii)
    if not radii or radii != sorted(radii) or len(set(radii)) != len(radii):
        raise ValueError("radii must be nonempty and strictly ascending")
    if family not in FAMILIES:
        raise ValueError(f"unknown measure family {family!r}")
    s = settings or EstimatorSettings()
    series = DcSeries(label=label or family)
    commutator = equations is None or equations == COMMUTATOR

    if family == "random-walk":
        for n, mu in random_walk_measures(G, radii, laziness, generators):
            series.append(n, _estimate(G, mu, equations, s, n))
        return series

    if family == "full-group":
        mu = uniform_on(G, G.elements(), "whole group")
        rep = _estimate(G, mu, equations, s, 0)
        for n in radii:
            series.append(n, rep)
        return series

    n_max = radii[-1]
    if family == "f-ball":
        if fball is None:
            raise ValueError("f-ball family needs an FBallSpec")
        big = f_ball(G, fball, n_max, cache=cache)
    else:
        big = enumerate_ball(G, n_max, generators, cache=cache)

    exact_prefix = None
    if family in ("uniform-ball", "f-ball") and commutator and s.mode != "sampled":
        # largest radius whose exact count fits the budget, done in one pass
        fits = [n for n in radii if s.mode == "exact" or big.size(n) ** 2 <= s.budget]
        if fits:
            sub = big.prefix(fits[-1])
            exact_prefix = dc_exact_by_radius(G, sub, None, s.threads)

    for n in radii:
        if family == "padded":
            B = big.prefix(n)
            mu = padded_measure(B, padding_element, _schedule(padding_schedule, n))
        else:
            B = big.prefix(n)
            if exact_prefix is not None and n < len(exact_prefix):
                series.append(n, EstimateReport.from_exact(exact_prefix[n], len(B)))
                continue
            mu = uniform_on_ball(B)
        series.append(n, _estimate(G, mu, equations, s, n))
    return series

