"""Executable checks of the inequalities and density statements, plus
diagnostics (torsion and centralizer densities, translation lengths)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .cayley import Ball, enumerate_ball
from .estimator import DcSeries, centralizer_in_ball, commuting_pairs, dc_finite
from .groups import GroupModel, Homomorphism, HomomorphismError, quotient_by_normal

log = logging.getLogger(__name__)

GUSTAFSON_BOUND = Fraction(5, 8)
PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def jsonable(x: Any) -> Any:
    """Rationals become "p/q" strings; containers are converted recursively."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


@dataclass
class CheckResult:
    name: str
    status: str
    lhs: Any
    rhs: Any
    tolerance: float = 0.0
    detail: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "lhs": jsonable(self.lhs),
            "rhs": jsonable(self.rhs),
            "tolerance": self.tolerance,
            "detail": self.detail,
        }
        if self.extra:
            out["extra"] = jsonable(self.extra)
        return out


def _subset_dc(G: GroupModel, elements: Sequence) -> Fraction:
    elements = list(elements)
    return Fraction(commuting_pairs(G, elements), len(elements) ** 2)


def _is_abelian(G: GroupModel) -> bool:
    gens = G.generators
    return all(G.commutes(x, y) for i, x in enumerate(gens) for y in gens[i + 1 :])


# -- finite-group checks ----------------------------------------------------------

def gustafson_check(corpus: Sequence[GroupModel], labels: Sequence[str] | None = None) -> list[CheckResult]:
    """dc(G) > 5/8 must force G abelian."""
    out = []
    for i, G in enumerate(corpus):
        name = labels[i] if labels else getattr(G, "label", None) or G.kind
        dc = dc_finite(G)
        abelian = _is_abelian(G)
        ok = dc <= GUSTAFSON_BOUND or abelian
        detail = f"|G|={G.order}, dc={dc}, abelian={abelian}"
        out.append(CheckResult(f"gustafson[{name}]", PASS if ok else FAIL, dc, GUSTAFSON_BOUND, 0.0, detail,
                               {"abelian": abelian, "order": G.order}))
    return out


def gallagher_check(G: GroupModel, normal: Homomorphism | Sequence, name: str = "") -> CheckResult:
    """dc(G) ≤ dc(N)·dc(G/N), all three computed exactly.

    ``normal`` is either a verified homomorphism (N is its kernel, G/N its
    image) or a list of elements of a normal subgroup.
    """
    hom = normal if isinstance(normal, Homomorphism) else quotient_by_normal(G, normal)[1]
    if not hom.verified:
        raise HomomorphismError("gallagher_check needs a verified homomorphism")
    kernel = hom.kernel_elements()
    image = hom.image_subgroup()
    dc_g = dc_finite(G)
    dc_n = _subset_dc(G, kernel)
    dc_q = _subset_dc(hom.target, image)
    rhs = dc_n * dc_q
    return CheckResult(
        f"gallagher[{name or G.kind}]",
        PASS if dc_g <= rhs else FAIL,
        dc_g,
        rhs,
        0.0,
        f"dc(G)={dc_g}, dc(N)={dc_n} (|N|={len(kernel)}), dc(G/N)={dc_q} (|G/N|={len(image)})",
        {"dc_N": dc_n, "dc_Q": dc_q},
    )


# -- series checks ------------------------------------------------------------------

def _window_entries(series: DcSeries, window) -> list:
    lo, hi = window if window is not None else (series.radii[0], series.radii[-1])
    entries = series.window(lo, hi)
    if not entries:
        raise ValueError(f"series has no entries in window [{lo}, {hi}]")
    return entries


def quotient_bound_check(
    G: GroupModel,
    hom: Homomorphism,
    series: DcSeries,
    window: tuple[int, int] | None = None,
    sampled_tolerance: float = 0.05,
) -> CheckResult:
    """Uniform-ball dc series stays below dc of the finite quotient.

    Exact entries get zero slack. A sampled entry fails only when its lower
    confidence bound exceeds the quotient value plus ``sampled_tolerance``.
    """
    entries = _window_entries(series, window)
    image = hom.image_subgroup()
    rhs = _subset_dc(hom.target, image)
    lhs = max(r.value for _, r in entries)
    sampled = any(r.mode == "sampled" for _, r in entries)
    tol = sampled_tolerance if sampled else 0.0
    name = f"quotient-bound[{G.kind} -> {hom.label or 'quotient'}]"
    if not hom.verified:
        return CheckResult(name, INCONCLUSIVE, lhs, rhs, tol, "homomorphism is unverified")
    bad = [
        n
        for n, r in entries
        if (r.exact is not None and r.exact > rhs) or (r.mode == "sampled" and r.lower > float(rhs) + tol)
    ]
    detail = f"max dc over window = {lhs:.6g}; dc(G/N) = {rhs} with |G/N| = {len(image)}"
    if bad:
        detail += f"; violated at n={bad}"
    return CheckResult(name, FAIL if bad else PASS, lhs, rhs, tol, detail)


def index_bound_check(
    series_g: DcSeries,
    series_h: DcSeries,
    d: int,
    window: tuple[int, int] | None = None,
    sampled_tolerance: float = 0.05,
) -> CheckResult:
    """max dc_X(G) ≥ max dc_X(H) / d² over the window."""
    eg = _window_entries(series_g, window)
    eh = _window_entries(series_h, window)
    exact = all(r.exact is not None for _, r in eg + eh)
    name = f"index-bound[d={d}]"
    if exact:
        lhs = max(r.exact for _, r in eg)
        rhs = max(r.exact for _, r in eh) / (d * d)
        ok = lhs >= rhs
        return CheckResult(name, PASS if ok else FAIL, lhs, rhs, 0.0, f"max dc(G)={lhs}, max dc(H)/d²={rhs}")
    tol = sampled_tolerance
    lhs = max(r.value for _, r in eg)
    rhs = max(r.value for _, r in eh) / (d * d)
    lhs_hi = max(r.upper for _, r in eg)
    rhs_lo = max(r.lower for _, r in eh) / (d * d)
    if lhs >= rhs - tol:
        status = PASS
    elif lhs_hi < rhs_lo - tol:
        status = FAIL
    else:
        status = INCONCLUSIVE
    detail = f"max dc(G)≈{lhs:.6g} (upper {lhs_hi:.6g}); max dc(H)/d²≈{rhs:.6g} (lower {rhs_lo:.6g})"
    return CheckResult(name, status, lhs, rhs, tol, detail)


def decay_trend_check(
    series: DcSeries,
    exact_window: tuple[int, int],
    sampled_window: tuple[int, int] | None = None,
) -> CheckResult:
    """Finite-radius trend evidence: exact values strictly decreasing on
    ``exact_window``; every entry of ``sampled_window`` has its upper
    confidence bound below the value at the end of ``exact_window``."""
    ex = _window_entries(series, exact_window)
    if any(r.exact is None for _, r in ex):
        return CheckResult("decay-trend", INCONCLUSIVE, None, None, 0.0, "exact window contains sampled entries")
    vals = [r.exact for _, r in ex]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    ref = vals[-1]
    later_ok = True
    later = []
    if sampled_window is not None:
        later = _window_entries(series, sampled_window)
        later_ok = all(r.upper < float(ref) for _, r in later)
    ok = decreasing and later_ok
    detail = (
        f"exact values on {list(exact_window)} strictly decreasing: {decreasing}; "
        f"later entries below {float(ref):.6g}: {later_ok}. Finite evidence only; no limit is claimed."
    )
    return CheckResult(
        "decay-trend", PASS if ok else FAIL, max(r.upper for _, r in later) if later else vals[-1], ref, 0.0, detail
    )


def band_check(series: DcSeries, target, tolerance: float, window: tuple[int, int] | None = None,
               name: str = "band") -> CheckResult:
    """Every entry in the window lies within ``tolerance`` of ``target``."""
    entries = _window_entries(series, window)
    t = float(Fraction(target))
    dev = max(abs(r.value - t) for _, r in entries)
    ok = dev < tolerance
    return CheckResult(name, PASS if ok else FAIL, dev, tolerance, tolerance,
                       f"max |value - {target}| over {len(entries)} radii = {dev:.6g}")


# -- diagnostics ---------------------------------------------------------------------

@dataclass
class NegligibilityRow:
    n: int
    ball_size: int
    torsion_count: int | None
    torsion_density: Fraction | None
    max_centralizer_density: Fraction | None
    sample_size: int
    argmax: str | None


@dataclass
class NegligibilityReport:
    rows: list
    torsion_available: bool
    note: str = ("centralizer maxima are over sampled elements and are evidence, "
                 "not a proof of uniformity")

    @property
    def torsion_density(self) -> list:
        return [r.torsion_density for r in self.rows]

    @property
    def max_centralizer_density(self) -> list:
        return [r.max_centralizer_density for r in self.rows]

    @property
    def sample_size(self) -> list:
        return [r.sample_size for r in self.rows]


def negligibility_report(
    G: GroupModel,
    n_max: int,
    g_samples: int = 100,
    seed: int = 0,
    radii: Sequence[int] | None = None,
    ball: Ball | None = None,
    order_cap: int = 10_000,
) -> NegligibilityReport:
    """Exact torsion density |N ∩ B(n)|/|B(n)| and the largest sampled
    centralizer density among certified infinite-order elements.

    Infinite-order candidates are ordered by one seeded permutation of B(n_max);
    radius n uses the first ``g_samples`` of them that lie in B(n).
    """
    B = ball if ball is not None and ball.radius >= n_max else enumerate_ball(G, n_max)
    B = B.prefix(n_max)
    radii = list(range(n_max + 1)) if radii is None else list(radii)
    orders = [G.order_of(g, order_cap) for g in B.elements]
    torsion_ok = G.torsion_decidable and all(o.status != "exceeds-cap" for o in orders)
    is_torsion = np.array([o.is_finite for o in orders], dtype=bool)
    certified = [i for i, o in enumerate(orders) if o.is_infinite]
    rng = np.random.default_rng(seed)
    perm = [certified[i] for i in rng.permutation(len(certified))]
    rows = []
    for n in radii:
        size = B.size(n)
        Bn = B.prefix(n)
        tc = int(is_torsion[:size].sum()) if torsion_ok else None
        picks = [i for i in perm if i < size][:g_samples]
        best, arg = None, None
        for i in picks:
            c = Fraction(centralizer_in_ball(G, B.elements[i], Bn), size)
            if best is None or c > best:
                best, arg = c, G.render(B.elements[i])
        rows.append(NegligibilityRow(n, size, tc, Fraction(tc, size) if tc is not None else None,
                                     best, len(picks), arg))
    return NegligibilityReport(rows, torsion_ok)


@dataclass
class TranslationLengthReport:
    element: str
    ratios: list  # (m, Fraction |g^m|/m)
    running_inf: list
    estimate: Fraction | None
    truncated: bool = False


def translation_length(
    G: GroupModel,
    g,
    m_max: int,
    ball: Ball | None = None,
    max_radius: int = 12,
) -> TranslationLengthReport:
    """Ratios |gᵐ|_X / m for m = 1..m_max and their running infimum.

    Lengths come from the model's closed form when it has one, else from
    ``ball`` (or a BFS ball grown on demand up to ``max_radius``). A power
    outside the available ball truncates the report.
    """
    ratios, inf_ = [], []
    truncated = False
    x = G.identity
    for m in range(1, m_max + 1):
        x = G.mul(x, g)
        length = G.word_length(x)
        if length is None:
            if ball is None or (x not in ball and ball.radius < max_radius):
                ball = _grow_until(G, x, ball, max_radius)
            length = ball.distance(x)
        if length is None:
            truncated = True
            break
        q = Fraction(length, m)
        ratios.append((m, q))
        inf_.append(q if not inf_ else min(inf_[-1], q))
    return TranslationLengthReport(G.render(g), ratios, inf_, inf_[-1] if inf_ else None, truncated)


def _grow_until(G, x, ball, max_radius):
    r = 0 if ball is None else ball.radius
    while True:
        ball = enumerate_ball(G, r)
        if x in ball or r >= max_radius:
            return ball
        r += 1


def _power_lengths(G: GroupModel, r, bound: int) -> list:
    """Powers rᵏ (k ∈ Z) with |rᵏ| ≤ bound; lengths grow with |k| for infinite-order roots."""
    out = [G.identity]
    for step in (r, G.inv(r)):
        x = G.identity
        while True:
            x = G.mul(x, step)
            if G.word_length(x) > bound:
                break
            out.append(x)
    return out


def centralizer_linear_bound_check(
    G: GroupModel,
    samples: int,
    n: int,
    p: int = 1,
    seed: int = 0,
    ball: Ball | None = None,
) -> CheckResult:
    """For sampled infinite-order g in B(n) with C(g) = ⟨root(g)⟩:
    |⟨root⟩ ∩ B(n)| ≤ 2pn+1 and |x⟨root⟩ ∩ B(n)| ≤ 4pn+1 for a sampled x ∈ B(n).
    The brute-force |C(g) ∩ B(n)| is cross-checked against the root count."""
    name = f"centralizer-bound[{G.kind}, n={n}, p={p}]"
    if not hasattr(G, "primitive_root") or G.word_length(G.identity) is None:
        return CheckResult(name, INCONCLUSIVE, None, None, 0.0, f"no root extraction for {G.kind}")
    B = ball.prefix(n) if ball is not None and ball.radius >= n else enumerate_ball(G, n)
    cand = [g for g in B.elements if G.order_of(g).is_infinite]
    rng = np.random.default_rng(seed)
    picks = [cand[i] for i in rng.choice(len(cand), size=min(samples, len(cand)), replace=False)]
    xs = rng.integers(0, len(B), size=len(picks))
    lin, coset = 2 * p * n + 1, 4 * p * n + 1
    worst_c = worst_x = 0
    problems = []
    for g, xi in zip(picks, xs):
        root = G.primitive_root(g)
        powers = _power_lengths(G, root, 2 * n)
        in_ball = sum(1 for y in powers if G.word_length(y) <= n)
        brute = centralizer_in_ball(G, g, B)
        if brute != in_ball:
            problems.append(f"{G.render(g)}: |C(g)∩B|={brute} but |<root>∩B|={in_ball}")
        x = B.elements[int(xi)]
        in_coset = sum(1 for y in powers if G.word_length(G.mul(x, y)) <= n)
        worst_c, worst_x = max(worst_c, in_ball), max(worst_x, in_coset)
        if in_ball > lin:
            problems.append(f"{G.render(g)}: |<root>∩B|={in_ball} > {lin}")
        if in_coset > coset:
            problems.append(f"{G.render(x)}<{G.render(root)}>: {in_coset} > {coset}")
    detail = (f"{len(picks)} sampled elements; max |C∩B|={worst_c} ≤ {lin}; "
              f"max |xC∩B|={worst_x} ≤ {coset}")
    if problems:
        detail += "; " + "; ".join(problems[:5])
    return CheckResult(name, FAIL if problems else PASS, worst_c, lin, 0.0, detail,
                       {"max_coset_count": worst_x, "coset_bound": coset, "samples": len(picks)})
