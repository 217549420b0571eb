"""Experiment configuration: YAML schema version 1, parsing and validation.

Top-level keys::

    version: 1
    name: free-group-coset           # optional label
    group: heisenberg                # shorthand string or a mapping with ``kind``
    generating_sets:                 # optional; one or two named sets
      X: [a, b]
      Y: [a, ab]
    measure:
      family: uniform-ball           # uniform-ball | random-walk | padded | f-ball | full-group
      laziness: 0                    # random-walk only
      padding: {element: a, schedule: "n*n"}   # padded only; int, list or expression in n
      fball: {mode: kernel, hom: parity}       # or {mode: generators, set: Y}
    equations: ["[x1,x2]"]           # optional, default is the commutator
    radii: {from: 1, to: 10}         # or an explicit ascending list
    estimator: {mode: auto, budget: 1.0e9, samples: 100000, seed: 7}
    homomorphisms:
      mod3: {kind: reduction, modulus: 3}
      par: {kind: parity}
      ev: {kind: images, target: Z2, images: {a: "1", b: "1"}}
      cq: {kind: center-quotient}
    coset_density: {hom: par, element: "1", n_max: 12}
    growth: {exp_threshold: 1.05, poly_threshold: 1.02}
    checks:
      - {type: quotient-bound, hom: mod3, window: [8, 12]}
    output: {dir: out}
"""
from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .cayley import FBallSpec
from .equations import COMMUTATOR, EquationSystem
from .estimator import FAMILIES, MIN_SAMPLES, EstimatorSettings
from .groups import (
    GroupError,
    GroupModel,
    Homomorphism,
    center,
    homomorphism_from_images,
    make_group,
    named_group,
    parity_homomorphism,
    quotient,
    quotient_by_normal,
)

SCHEMA_VERSION = 1
CHECK_TYPES = (
    "gustafson",
    "gallagher",
    "quotient-bound",
    "index-bound",
    "negligibility",
    "translation-length",
    "centralizer-bound",
    "decay-trend",
    "band",
)
TOP_KEYS = {
    "version", "name", "group", "generating_sets", "measure", "equations", "radii",
    "estimator", "homomorphisms", "coset_density", "growth", "checks", "output",
}


class ConfigError(ValueError):
    def __init__(self, diagnostics: list):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics if d.level == "error"))


@dataclass
class Diagnostic:
    level: str  # error | warning | info
    field: str
    message: str
    line: int | None = None

    def __str__(self):
        where = f"line {self.line}, " if self.line else ""
        return f"{self.level}: {where}{self.field}: {self.message}"


# -- YAML with line numbers ---------------------------------------------------------

def _line_map(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            out[path + (key,)] = k.start_mark.line + 1
            _line_map(v, path + (key,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, path + (i,), out)
    return out


def load_yaml(text: str) -> tuple[Any, dict]:
    node = yaml.compose(text, Loader=yaml.SafeLoader)
    lines = _line_map(node) if node is not None else {}
    return yaml.safe_load(text), lines


# -- schedules ----------------------------------------------------------------------

_OPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.FloorDiv: operator.floordiv, ast.Pow: operator.pow, ast.Mod: operator.mod,
}


def compile_schedule(spec):
    """int, list, or an integer expression in ``n`` (``+ - * // % **``)."""
    if isinstance(spec, bool):
        raise ValueError("schedule must be an integer, a list or an expression")
    if isinstance(spec, (int, list)):
        return spec
    tree = ast.parse(str(spec), mode="eval")

    def ev(node, n):
        if isinstance(node, ast.Expression):
            return ev(node.body, n)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name) and node.id == "n":
            return n
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left, n), ev(node.right, n))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand, n)
        raise ValueError(f"unsupported schedule expression {spec!r}")

    ev(tree, 1)
    return lambda n: int(ev(tree, n))


# -- experiment ---------------------------------------------------------------------

@dataclass
class Experiment:
    raw: dict
    base_dir: Path
    name: str
    group: GroupModel
    generating_sets: list  # [(name, tuple of elements or None)]
    family: str
    radii: list
    settings: EstimatorSettings
    equations: EquationSystem | None
    laziness: Any = 0
    padding_element: Any = None
    padding_schedule: Any = 0
    fball: FBallSpec | None = None
    homs: dict = field(default_factory=dict)
    coset: dict | None = None
    growth: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    check_elements: dict = field(default_factory=dict)
    output_dir: Path | None = None


def _parse_element(G: GroupModel, value):
    if isinstance(value, list):
        return G.check(tuple(int(v) for v in value))
    return G.parse_element(str(value))


def _is_bipartite(G: GroupModel) -> bool | None:
    rels = G.relations()
    if rels is None:
        return None
    return all(len(r) % 2 == 0 for r in rels)


def _build_hom(G: GroupModel, name: str, spec: dict) -> Homomorphism:
    kind = spec.get("kind")
    if kind == "reduction":
        return quotient(G, int(spec["modulus"]))[1]
    if kind == "parity":
        return parity_homomorphism(G)
    if kind == "images":
        return homomorphism_from_images(G, named_group(str(spec["target"])), spec["images"])
    if kind == "center-quotient":
        return quotient_by_normal(G, center(G))[1]
    raise ValueError(f"unknown homomorphism kind {kind!r}")


def _radii(spec) -> list:
    if isinstance(spec, dict):
        lo, hi = int(spec["from"]), int(spec["to"])
        step = int(spec.get("step", 1))
        return list(range(lo, hi + 1, step))
    if isinstance(spec, list):
        return [int(r) for r in spec]
    raise ValueError("radii must be a list or {from, to}")


def parse_config(text: str, base_dir: Path | str = ".") -> tuple[Experiment | None, list]:
    """Parse and validate; returns (experiment or None, diagnostics)."""
    diags: list[Diagnostic] = []
    try:
        raw, lines = load_yaml(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        return None, [Diagnostic("error", "<file>", str(exc).splitlines()[0], mark.line + 1 if mark else None)]

    def diag(level, path, msg):
        path = tuple(path)
        line = None
        for k in range(len(path), -1, -1):
            if path[:k] in lines:
                line = lines[path[:k]]
                break
        diags.append(Diagnostic(level, ".".join(str(p) for p in path) or "<root>", msg, line))

    if not isinstance(raw, dict):
        diag("error", (), "config must be a mapping")
        return None, diags
    for k in raw:
        if k not in TOP_KEYS:
            diag("error", (k,), f"unknown key; expected one of {sorted(TOP_KEYS)}")
    if raw.get("version") != SCHEMA_VERSION:
        diag("error", ("version",), f"schema version must be {SCHEMA_VERSION}")
    base_dir = Path(base_dir)

    G = None
    if "group" not in raw:
        diag("error", ("group",), "missing group descriptor")
    else:
        try:
            G = make_group(raw["group"], base_dir)
            G.enumeration_ready()
        except (GroupError, ValueError, KeyError, TypeError, OSError) as exc:
            diag("error", ("group",), str(exc))
            G = None

    radii = []
    try:
        radii = _radii(raw.get("radii", {"from": 1, "to": 1}))
        if not radii:
            diag("error", ("radii",), "radii must be nonempty")
        elif radii != sorted(set(radii)) or radii[0] < 0:
            diag("error", ("radii",), "radii must be non-negative and strictly ascending")
    except (ValueError, KeyError, TypeError) as exc:
        diag("error", ("radii",), str(exc))

    est = raw.get("estimator") or {}
    mode = est.get("mode", "auto")
    seed = est.get("seed")
    samples = int(est.get("samples", 100_000))
    settings = None
    if mode not in ("auto", "exact", "sampled"):
        diag("error", ("estimator", "mode"), f"unknown mode {mode!r}")
    elif mode == "sampled" and seed is None:
        diag("error", ("estimator", "seed"), "sampled mode requires a seed (reproducibility)")
    else:
        if mode != "exact" and samples < MIN_SAMPLES:
            diag("error", ("estimator", "samples"), f"samples must be at least {MIN_SAMPLES}")
        if mode == "auto" and seed is None:
            diag("warning", ("estimator", "seed"), "no seed: auto mode cannot fall back to sampling")
        settings = EstimatorSettings(mode, int(float(est.get("budget", 1e9))), samples, seed)

    equations = None
    if raw.get("equations") is not None:
        try:
            equations = EquationSystem.parse(raw["equations"])
            if equations == COMMUTATOR:
                equations = None
        except ValueError as exc:
            diag("error", ("equations",), str(exc))

    homs = {}
    for name, spec in (raw.get("homomorphisms") or {}).items():
        if G is None:
            break
        try:
            h = _build_hom(G, name, spec or {})
            homs[name] = h
            if not h.verified:
                diag("warning", ("homomorphisms", name), "unverified: the source has no stored relations")
        except (GroupError, ValueError, KeyError, TypeError) as exc:
            diag("error", ("homomorphisms", name), str(exc))

    gsets = [("X", None)]
    gs = raw.get("generating_sets")
    if gs is not None and G is not None:
        if not isinstance(gs, dict) or not 1 <= len(gs) <= 2:
            diag("error", ("generating_sets",), "one or two named generating sets expected")
        else:
            gsets = []
            for name, elems in gs.items():
                try:
                    gsets.append((str(name), tuple(_parse_element(G, e) for e in elems)))
                except (GroupError, ValueError, TypeError) as exc:
                    diag("error", ("generating_sets", name), str(exc))
            if len(gs) == 2:
                diag("info", ("generating_sets",), "two generating sets: comparison mode enabled")

    measure = raw.get("measure") or {}
    family = measure.get("family", "uniform-ball")
    laziness = measure.get("laziness", 0)
    pad_el, pad_sched, fspec = None, 0, None
    if family not in FAMILIES:
        diag("error", ("measure", "family"), f"unknown family; expected one of {list(FAMILIES)}")
    elif G is not None:
        if family == "random-walk":
            if not (isinstance(laziness, (int, float)) and 0 <= laziness < 1):
                diag("error", ("measure", "laziness"), "laziness must lie in [0, 1)")
            elif laziness == 0:
                bip = _is_bipartite(G)
                if bip or bip is None:
                    diag("warning", ("measure", "laziness"),
                         "laziness 0 on a bipartite Cayley graph: the walk's support misses B(n) "
                         "elements of the wrong parity" if bip else
                         "laziness 0: support may differ from B(n) if the Cayley graph is bipartite")
        if family == "padded":
            pad = measure.get("padding") or {}
            try:
                pad_el = _parse_element(G, pad["element"])
                res = G.order_of(pad_el)
                if not res.is_infinite:
                    diag("error", ("measure", "padding", "element"),
                         f"order_of gives {res}: padding needs an element with a proof of infinite order")
                pad_sched = compile_schedule(pad.get("schedule", 0))
            except (GroupError, ValueError, KeyError, SyntaxError) as exc:
                diag("error", ("measure", "padding"), str(exc))
        if family == "f-ball":
            fb = measure.get("fball") or {}
            if fb.get("mode") == "kernel" and fb.get("hom") in homs:
                fspec = FBallSpec.kernel(homs[fb["hom"]], f"ker({fb['hom']})")
            elif fb.get("mode") == "generators" and any(n == fb.get("set") for n, _ in gsets):
                fspec = FBallSpec.generating_set(dict(gsets)[fb["set"]], fb["set"])
            else:
                diag("error", ("measure", "fball"), "need {mode: kernel, hom: <name>} or {mode: generators, set: <name>}")
        if family == "full-group" and not G.is_finite:
            diag("error", ("measure", "family"), "full-group needs a finite group")

    coset = raw.get("coset_density")
    if coset is not None:
        if coset.get("hom") not in homs:
            diag("error", ("coset_density", "hom"), "unknown homomorphism")
        elif G is not None:
            try:
                coset = dict(coset, element=_parse_element(G, coset.get("element", "1")))
            except (GroupError, ValueError) as exc:
                diag("error", ("coset_density", "element"), str(exc))

    checks = raw.get("checks") or []
    check_elements = {}
    for i, c in enumerate(checks):
        t = (c or {}).get("type")
        if t not in CHECK_TYPES:
            diag("error", ("checks", i, "type"), f"unknown check; expected one of {list(CHECK_TYPES)}")
            continue
        for key in ("hom",):
            if key in c and c[key] not in homs:
                diag("error", ("checks", i, key), f"unknown homomorphism {c[key]!r}")
        if t in ("quotient-bound", "index-bound") and "hom" not in c:
            diag("error", ("checks", i), f"{t} needs 'hom'")
        if t == "gallagher" and G is not None and not G.is_finite:
            diag("error", ("checks", i), "gallagher needs a finite group")
        if t == "translation-length" and G is not None:
            try:
                check_elements[i] = _parse_element(G, c.get("element", ""))
            except (GroupError, ValueError) as exc:
                diag("error", ("checks", i, "element"), str(exc))

    if any(d.level == "error" for d in diags):
        return None, diags
    out = (raw.get("output") or {}).get("dir")
    exp = Experiment(
        raw=raw,
        base_dir=base_dir,
        name=str(raw.get("name", "experiment")),
        group=G,
        generating_sets=gsets,
        family=family,
        radii=radii,
        settings=settings,
        equations=equations,
        laziness=laziness,
        padding_element=pad_el,
        padding_schedule=pad_sched,
        fball=fspec,
        homs=homs,
        coset=coset,
        growth=raw.get("growth") or {},
        checks=checks,
        check_elements=check_elements,
        output_dir=Path(out) if out else None,
    )
    return exp, diags


def load_config(path: Path | str) -> tuple[Experiment | None, list]:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent)
