"""Finite groups given by a multiplication table or by permutations."""
from __future__ import annotations

import hashlib
import itertools

import numpy as np

from .base import FiniteMixin, GroupModel, MalformedSpecError


class TableGroup(FiniteMixin, GroupModel):
    """Elements are indices 0..n-1 into a Cayley table; 0 is the identity."""

    kind = "finite-table"
    torsion_decidable = True

    def __init__(self, table, generators, element_names=None, generator_names=None, label=None):
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        if table.shape != (n, n):
            raise MalformedSpecError("Cayley table must be square")
        if not (np.all(table[0] == np.arange(n)) and np.all(table[:, 0] == np.arange(n))):
            raise MalformedSpecError("element 0 must be the identity")
        for row in table:
            if len(set(row.tolist())) != n:
                raise MalformedSpecError("Cayley table rows must be permutations")
        self.table = table
        self.table.setflags(write=False)
        self.inverse = np.argmin(table, axis=1)
        self.element_names = list(element_names) if element_names else [str(i) for i in range(n)]
        self.label = label
        generators = [int(g) for g in generators]
        names = generator_names or [self.element_names[g] for g in generators]
        super().__init__(generators, names)
        if self.order != n:
            raise MalformedSpecError("generators do not generate the table group")

    def describe(self):
        d = {"kind": self.kind, "order": int(self.table.shape[0])}
        if self.label:
            d["label"] = self.label
        return d

    def fingerprint(self):
        blob = repr((self.describe(), self.generators)).encode() + self.table.tobytes()
        return hashlib.sha1(blob).hexdigest()[:16]

    @property
    def identity(self):
        return 0

    def is_element(self, g):
        return isinstance(g, (int, np.integer)) and 0 <= g < self.table.shape[0]

    def mul(self, g, h):
        return int(self.table[g, h])

    def inv(self, g):
        return int(self.inverse[g])

    def render(self, g):
        return self.element_names[g]

    def parse_element(self, text):
        text = text.strip()
        if text in self.element_names:
            return self.element_names.index(text)
        return super().parse_element(text)

    # batches are int arrays
    def pack(self, elements):
        return np.asarray(list(elements), dtype=np.int64)

    def unpack(self, batch):
        return [int(v) for v in batch]

    def take(self, batch, idx):
        return batch[np.asarray(idx).ravel()]

    def repeat(self, g, n):
        return np.full(n, g, dtype=np.int64)

    def mul_batch(self, a, b):
        return self.table[a, b]

    def inv_batch(self, a):
        return self.inverse[a]

    def eq_batch(self, a, b):
        return a == b

    def is_identity_batch(self, a):
        return a == 0

    def commutes_batch(self, a, b):
        return self.table[a, b] == self.table[b, a]


class PermutationGroup(FiniteMixin, GroupModel):
    """Subgroup of S_n generated by permutations in image-list form.

    Composition applies the left factor first: (gh)(i) = h(g(i)).
    """

    kind = "finite-permutation"
    torsion_decidable = True

    def __init__(self, generators, degree=None, names=None, label=None):
        gens = [tuple(int(v) for v in g) for g in generators]
        if not gens:
            raise MalformedSpecError("permutation group needs generators")
        degree = degree or max(len(g) for g in gens)
        gens = [g + tuple(range(len(g), degree)) for g in gens]
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise MalformedSpecError(f"{g} is not a permutation of 0..{degree - 1}")
        self.degree = degree
        self.label = label
        super().__init__(gens, names or [f"p{i + 1}" for i in range(len(gens))])

    def describe(self):
        d = {"kind": self.kind, "degree": self.degree}
        if self.label:
            d["label"] = self.label
        return d

    @property
    def identity(self):
        return tuple(range(self.degree))

    def is_element(self, g):
        self._materialize()
        return g in self._words

    def mul(self, g, h):
        return tuple(h[i] for i in g)

    def inv(self, g):
        out = [0] * len(g)
        for i, v in enumerate(g):
            out[v] = i
        return tuple(out)

    def render(self, g):
        return cycle_notation(g)

    def parse_element(self, text):
        text = text.strip()
        if text.startswith("["):
            g = tuple(int(v) for v in text.strip("[]").split(","))
            return self.check(g + tuple(range(len(g), self.degree)))
        return super().parse_element(text)

    def to_table(self) -> TableGroup:
        """The same group as a Cayley table, elements in closure order."""
        elems = self.elements()
        pos = {g: i for i, g in enumerate(elems)}
        table = [[pos[self.mul(g, h)] for h in elems] for g in elems]
        return TableGroup(
            table,
            [pos[g] for g in self.generators],
            element_names=[cycle_notation(g) for g in elems],
            generator_names=self.generator_names,
            label=self.label,
        )


def cycle_notation(p) -> str:
    seen = set()
    cycles = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        cycles.append("(" + " ".join(str(c) for c in cyc) + ")")
    return "".join(cycles) or "()"


def cyclic(n: int) -> TableGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    gens = [1] if n > 1 else [0]
    return TableGroup(table, gens, [str(i) for i in range(n)], ["c"], label=f"Z{n}")


def direct_product(*factors: TableGroup, label=None) -> TableGroup:
    orders = [f.order for f in factors]
    tuples = list(itertools.product(*[range(o) for o in orders]))
    pos = {t: i for i, t in enumerate(tuples)}
    table = [
        [pos[tuple(f.mul(x, y) for f, x, y in zip(factors, s, t))] for t in tuples] for s in tuples
    ]
    gens, gnames = [], []
    for k, f in enumerate(factors):
        for g, name in zip(f.generators, f.generator_names):
            t = [0] * len(factors)
            t[k] = g
            gens.append(pos[tuple(t)])
            gnames.append(f"{name}{k + 1}")
    names = ["(" + ",".join(f.element_names[x] for f, x in zip(factors, t)) + ")" for t in tuples]
    return TableGroup(table, gens, names, gnames, label=label)


def quaternion() -> TableGroup:
    """Q8 with elements named 1, -1, i, -i, j, -j, k, -k."""
    basis = {"1": (1, "1"), "i": (1, "i"), "j": (1, "j"), "k": (1, "k")}
    unit = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elems = [(s, u) for u in basis for s in (1, -1)]
    names = [("" if s > 0 else "-") + u for s, u in elems]
    pos = {e: i for i, e in enumerate(elems)}

    def qmul(a, b):
        s, u = unit[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    table = [[pos[qmul(a, b)] for b in elems] for a in elems]
    return TableGroup(table, [names.index("i"), names.index("j")], names, ["i", "j"], label="Q8")


def symmetric(n: int) -> PermutationGroup:
    if n < 2:
        raise MalformedSpecError("S_n needs n >= 2")
    swap = (1, 0) + tuple(range(2, n))
    cyc = tuple(range(1, n)) + (0,)
    gens = [swap] if n == 2 else [swap, cyc]
    return PermutationGroup(gens, n, ["s", "r"][: len(gens)], label=f"S{n}")


def alternating(n: int) -> PermutationGroup:
    if n < 3:
        raise MalformedSpecError("A_n needs n >= 3")
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return PermutationGroup(gens, n, [f"t{k}" for k in range(len(gens))], label=f"A{n}")


def dihedral(m: int) -> PermutationGroup:
    """Symmetries of the m-gon (order 2m)."""
    rot = tuple((i + 1) % m for i in range(m))
    ref = tuple((-i) % m for i in range(m))
    return PermutationGroup([rot, ref], m, ["r", "f"], label=f"D{m}")


def named_group(name: str) -> TableGroup:
    """Table model of a small named group: Zn, Z2xZ2, Sn, An, Dm, Q8."""
    key = name.strip().replace("×", "x").replace(" ", "")
    up = key.upper()
    if up == "Q8":
        return quaternion()
    if up.startswith("Z") and "X" in up:
        parts = up.split("X")
        return direct_product(*[cyclic(int(p[1:])) for p in parts], label=key)
    if up.startswith("Z") and up[1:].isdigit():
        return cyclic(int(up[1:]))
    if up.startswith("S") and up[1:].isdigit():
        return symmetric(int(up[1:])).to_table()
    if up.startswith("A") and up[1:].isdigit():
        return alternating(int(up[1:])).to_table()
    if up.startswith("D") and up[1:].isdigit():
        return dihedral(int(up[1:])).to_table()
    raise MalformedSpecError(f"unknown named group {name!r}")


# -- subgroups and quotients of finite models ------------------------------

def subgroup_closure(G: GroupModel, gens) -> list:
    out = [G.identity]
    seen = {G.identity}
    k = 0
    while k < len(out):
        for x in gens:
            h = G.mul(out[k], x)
            if h not in seen:
                seen.add(h)
                out.append(h)
        k += 1
    return out


def center(G: GroupModel) -> list:
    elems = G.elements()
    return [z for z in elems if all(G.commutes(z, x) for x in G.generators)]


def is_normal(G: GroupModel, subset) -> bool:
    s = set(subset)
    return all(G.mul(G.mul(G.inv(x), n), x) in s for n in s for x in G.generators)


def quotient_by_normal(G: GroupModel, normal):
    """G/N as a table group together with the projection homomorphism."""
    from .homomorphism import Homomorphism

    normal = list(normal)
    if not is_normal(G, normal):
        raise MalformedSpecError("subgroup is not normal")
    nset = set(normal)
    if G.identity not in nset:
        raise MalformedSpecError("normal subset must contain the identity")
    coset_of: dict = {}
    reps = []
    for g in G.elements():
        if g in coset_of:
            continue
        idx = len(reps)
        reps.append(g)
        for n in normal:
            coset_of[G.mul(g, n)] = idx
    table = [[coset_of[G.mul(a, b)] for b in reps] for a in reps]
    names = [f"{G.render(r)}N" for r in reps]
    gens = [coset_of[x] for x in G.generators]
    Q = TableGroup(table, gens, names, list(G.generator_names), label=f"quotient of order {len(reps)}")
    images = {name: coset_of[x] for name, x in zip(G.generator_names, G.generators)}
    hom = Homomorphism(G, Q, images, payload_map=lambda g: coset_of[g], label="projection")
    return Q, hom


def table_from_model(G: GroupModel) -> TableGroup:
    """Cayley table copy of any finite model (closure order)."""
    if isinstance(G, TableGroup):
        return G
    elems = G.elements()
    pos = {g: i for i, g in enumerate(elems)}
    table = [[pos[G.mul(a, b)] for b in elems] for a in elems]
    try:
        names = [G.render(g) for g in elems]
    except Exception:  # pragma: no cover - render is best effort
        names = None
    if names and len(set(names)) != len(names):
        names = None
    return TableGroup(table, [pos[x] for x in G.generators], names, list(G.generator_names))
