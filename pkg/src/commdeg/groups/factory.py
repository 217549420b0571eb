"""Model construction from descriptors, plus the checked public operations."""
from __future__ import annotations

from pathlib import Path
from typing import Any

from .base import GroupModel, MalformedSpecError, OrderResult, PayloadError
from .coords import CongruenceQuotient, FreeAbelian, Heisenberg, InfiniteDihedral, Semidirect
from .finite import PermutationGroup, TableGroup, named_group
from .homomorphism import Homomorphism
from .rewriting import RewritingGroup, RewritingSystemSpec, parse_rewriting_system
from .words import FreeGroup, FreeProduct

KINDS = (
    "finite",
    "finite-table",
    "finite-permutation",
    "free",
    "free-abelian",
    "heisenberg",
    "infinite-dihedral",
    "semidirect",
    "free-product",
    "congruence-quotient",
    "rewriting-system",
)


def make_group(spec: Any, base_dir: Path | None = None) -> GroupModel:
    """Build a model from a descriptor.

    ``spec`` is either a shorthand string (``"heisenberg"``, ``"free(2)"``,
    ``"free-abelian(2)"``, ``"Q8"``, ``"free-product(2,2,2)"``...) or a mapping
    with a ``kind`` key and kind-specific parameters.
    """
    if isinstance(spec, GroupModel):
        return spec
    if isinstance(spec, RewritingSystemSpec):
        return RewritingGroup(spec)
    if isinstance(spec, str):
        spec = _parse_shorthand(spec)
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MalformedSpecError(f"group descriptor needs a 'kind': {spec!r}")
    kind = spec["kind"]
    names = spec.get("names")
    try:
        if kind == "free":
            return FreeGroup(int(spec.get("rank", 2)), names)
        if kind == "free-abelian":
            return FreeAbelian(int(spec.get("rank", spec.get("dim", 1))), names)
        if kind == "heisenberg":
            return Heisenberg(names)
        if kind == "infinite-dihedral":
            return InfiniteDihedral(names)
        if kind == "semidirect":
            return Semidirect(int(spec["dim"]), spec["matrices"], names=names)
        if kind == "free-product":
            return FreeProduct(spec["orders"], names)
        if kind in ("finite", "finite-table") and "name" in spec:
            return named_group(str(spec["name"]))
        if kind == "finite-table":
            return TableGroup(spec["table"], spec["generators"], spec.get("element_names"), names)
        if kind == "finite-permutation":
            return PermutationGroup(spec["generators"], spec.get("degree"), names)
        if kind == "congruence-quotient":
            base = make_group(spec["base"], base_dir)
            return CongruenceQuotient(base, int(spec["modulus"]))
        if kind == "rewriting-system":
            if "file" in spec:
                path = Path(spec["file"])
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                text = path.read_text()
            elif "text" in spec:
                text = spec["text"]
            else:
                text = "\n".join(
                    [f"letters: {' '.join(spec['letters'])}"]
                    + [f"inverses: {', '.join(' '.join(p) for p in spec.get('inverses', []))}"]
                    * bool(spec.get("inverses"))
                    + [f"rule: {r}" for r in spec.get("rules", [])]
                )
            return RewritingGroup(parse_rewriting_system(text))
    except KeyError as exc:
        raise MalformedSpecError(f"{kind}: missing field {exc}") from None
    raise MalformedSpecError(f"unknown group kind {kind!r}")


def _parse_shorthand(text: str) -> dict:
    t = text.strip()
    name, _, rest = t.partition("(")
    name = name.strip().lower()
    args = [a.strip() for a in rest.rstrip(")").split(",") if a.strip()] if rest else []
    if name == "free":
        return {"kind": "free", "rank": int(args[0]) if args else 2}
    if name in ("free-abelian", "z^d"):
        return {"kind": "free-abelian", "rank": int(args[0]) if args else 1}
    if name == "heisenberg":
        return {"kind": "heisenberg"}
    if name in ("infinite-dihedral", "dinf", "d∞"):
        return {"kind": "infinite-dihedral"}
    if name == "free-product":
        return {"kind": "free-product", "orders": [int(a) for a in args]}
    return {"kind": "finite", "name": t}


def quotient(G: GroupModel, m: int) -> tuple[GroupModel, Homomorphism]:
    """Reduce coordinates mod m; returns the finite quotient and the reduction map."""
    if not isinstance(G, (FreeAbelian, Heisenberg, Semidirect)):
        raise MalformedSpecError(f"quotient mod m is not supported for {G.kind}")
    Q = CongruenceQuotient(G, m)
    images = {n: Q.reduce(x) for n, x in zip(G.generator_names, G.generators)}
    hom = Homomorphism(G, Q, images, payload_map=Q.reduce, label=f"reduction mod {m}")
    return Q, hom


def homomorphism_from_images(G: GroupModel, target: GroupModel, images: dict) -> Homomorphism:
    """Images given as element strings in the target's notation."""
    parsed = {name: target.parse_element(str(v)) for name, v in images.items()}
    return Homomorphism(G, target, parsed, label="images")


# -- checked operations -------------------------------------------------------

def mul(G: GroupModel, g, h):
    return G.mul(G.check(g), G.check(h))


def inv(G: GroupModel, g):
    return G.inv(G.check(g))


def order_of(G: GroupModel, g, cap: int = 10_000) -> OrderResult:
    return G.order_of(G.check(g), cap)


__all__ = [
    "KINDS",
    "make_group",
    "quotient",
    "homomorphism_from_images",
    "mul",
    "inv",
    "order_of",
    "PayloadError",
]
