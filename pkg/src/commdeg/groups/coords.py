"""Integer-coordinate models: Z^d, the Heisenberg group, Z^d ⋊ F, and their
congruence quotients."""
from __future__ import annotations

import numpy as np

from .base import (
    INFINITE,
    ArrayGroupModel,
    FiniteMixin,
    MalformedSpecError,
    OrderResult,
    free_reduce,
    invert_word,
)


def _power_word(letter: int, k: int) -> tuple:
    return tuple([letter if k > 0 else -letter] * abs(k))


class FreeAbelian(ArrayGroupModel):
    """Z^d with the standard basis e1..ed."""

    kind = "free-abelian"
    torsion_decidable = True

    def __init__(self, dim: int, names=None):
        if dim < 1:
            raise MalformedSpecError("free-abelian dimension must be >= 1")
        self.dim = self.width = dim
        gens = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
        super().__init__(gens, names or [f"e{i + 1}" for i in range(dim)])

    def describe(self):
        return {"kind": self.kind, "dim": self.dim}

    @property
    def identity(self):
        return (0,) * self.dim

    def is_element(self, g):
        return isinstance(g, tuple) and len(g) == self.dim and all(isinstance(v, int) for v in g)

    def mul(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inv(self, g):
        return tuple(-a for a in g)

    def spell(self, g):
        word = ()
        for i, v in enumerate(g):
            word += _power_word(i + 1, v)
        return word

    def relations(self):
        return [
            (-(i + 1), -(j + 1), i + 1, j + 1)
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
        ]

    def word_length(self, g):
        return sum(abs(v) for v in g)

    def proves_infinite(self, g):
        return any(g)

    def order_of(self, g, cap=10_000):
        if cap < 1:
            raise ValueError("cap must be positive")
        return INFINITE if any(g) else OrderResult("finite", 1)

    def mul_batch(self, a, b):
        return a + b

    def inv_batch(self, a):
        return -a

    def commutes_batch(self, a, b):
        return np.ones(a.shape[0], dtype=bool)


class Heisenberg(ArrayGroupModel):
    """Integer Heisenberg group in Mal'cev coordinates (x, y, z).

    (x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y'), matching upper unitriangular
    matrices [[1,x,z],[0,1,y],[0,0,1]].
    """

    kind = "heisenberg"
    torsion_decidable = True
    width = 3

    def __init__(self, names=None):
        super().__init__([(1, 0, 0), (0, 1, 0)], names or ["a", "b"])

    def describe(self):
        return {"kind": self.kind}

    @property
    def identity(self):
        return (0, 0, 0)

    def is_element(self, g):
        return isinstance(g, tuple) and len(g) == 3 and all(isinstance(v, int) for v in g)

    def mul(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inv(self, g):
        x, y, z = g
        return (-x, -y, -z + x * y)

    def spell(self, g):
        x, y, z = g
        c = (1, 2, -1, -2)  # a b a⁻¹ b⁻¹ = (0,0,1)
        k = z - x * y
        word = _power_word(1, x) + _power_word(2, y)
        word += (c if k > 0 else invert_word(c)) * abs(k)
        return free_reduce(word)

    def relations(self):
        c = (1, 2, -1, -2)
        return [
            free_reduce(invert_word(c) + (-1,) + c + (1,)),
            free_reduce(invert_word(c) + (-2,) + c + (2,)),
        ]

    def proves_infinite(self, g):
        return any(g)

    def order_of(self, g, cap=10_000):
        if cap < 1:
            raise ValueError("cap must be positive")
        return INFINITE if any(g) else OrderResult("finite", 1)

    def mul_batch(self, a, b):
        out = a + b
        out[:, 2] += a[:, 0] * b[:, 1]
        return out

    def inv_batch(self, a):
        out = -a
        out[:, 2] += a[:, 0] * a[:, 1]
        return out

    def commutes_batch(self, a, b):
        return a[:, 0] * b[:, 1] == b[:, 0] * a[:, 1]


def _mat_key(m: np.ndarray) -> tuple:
    return tuple(int(v) for v in m.ravel())


class Semidirect(ArrayGroupModel):
    """Z^d ⋊ F for a finite group F of integer d×d matrices.

    Payload ``(t, v1..vd)``: ``t`` indexes the materialized F (0 = identity
    matrix), and the element acts on Z^d by ``u ↦ A_t u + v``. Product:
    (t, v)·(s, w) = (ts, v + A_t w).
    """

    kind = "semidirect"
    torsion_decidable = True

    def __init__(self, dim: int, matrices, generators=None, names=None, label=None):
        self.dim = dim
        self.width = dim + 1
        mats = [np.asarray(m, dtype=np.int64).reshape(dim, dim) for m in matrices]
        if not mats:
            raise MalformedSpecError("semidirect product needs at least one matrix")
        for m in mats:
            d = round(np.linalg.det(m))
            if abs(d) != 1:
                raise MalformedSpecError("action matrices must be invertible over Z")
        self._closure(mats)
        self.matrix_gens = [_mat_key(m) for m in mats]
        self.label = label
        if generators is None:
            generators = [(0,) + tuple(int(i == j) for j in range(dim)) for i in range(dim)]
            generators += [(self._tag[k],) + (0,) * dim for k in self.matrix_gens]
            names = names or [f"e{i + 1}" for i in range(dim)] + [f"f{j + 1}" for j in range(len(mats))]
            self._standard = True
        else:
            generators = [tuple(int(v) for v in g) for g in generators]
            self._standard = False
        super().__init__(generators, names)

    def _closure(self, mats):
        ident = np.eye(self.dim, dtype=np.int64)
        elems = [ident]
        tag = {_mat_key(ident): 0}
        words = [()]
        k = 0
        while k < len(elems):
            for j, m in enumerate(mats):
                prod = elems[k] @ m
                key = _mat_key(prod)
                if key not in tag:
                    if len(elems) > 10_000:
                        raise MalformedSpecError("matrix group is not finite (or too large)")
                    tag[key] = len(elems)
                    elems.append(prod)
                    words.append(words[k] + (j,))
            k += 1
        self._tag = tag
        self._mats = np.stack(elems)
        self._fwords = words
        n = len(elems)
        table = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                table[i, j] = tag[_mat_key(elems[i] @ elems[j])]
        self._ftable = table
        self._finv = np.argmin(table, axis=1)  # identity has tag 0
        self._forder = [self._tag_order(i) for i in range(n)]

    def _tag_order(self, t):
        k, x = 1, t
        while x != 0:
            x = int(self._ftable[x, t])
            k += 1
        return k

    def describe(self):
        d = {"kind": self.kind, "dim": self.dim, "matrices": self.matrix_gens}
        if self.label:
            d["label"] = self.label
        return d

    @property
    def identity(self):
        return (0,) * self.width

    def is_element(self, g):
        return (
            isinstance(g, tuple)
            and len(g) == self.width
            and all(isinstance(v, int) for v in g)
            and 0 <= g[0] < len(self._mats)
        )

    def mul(self, g, h):
        t, s = g[0], h[0]
        m = self._mats[t]
        w = h[1:]
        out = [int(self._ftable[t, s])]
        for i in range(self.dim):
            acc = g[1 + i]
            row = m[i]
            for j in range(self.dim):
                acc += int(row[j]) * w[j]
            out.append(acc)
        return tuple(out)

    def inv(self, g):
        t = int(self._finv[g[0]])
        m = self._mats[t]
        v = g[1:]
        out = [t]
        for i in range(self.dim):
            out.append(-sum(int(m[i, j]) * v[j] for j in range(self.dim)))
        return tuple(out)

    def mul_batch(self, a, b):
        out = np.empty_like(a)
        out[:, 0] = self._ftable[a[:, 0], b[:, 0]]
        mats = self._mats[a[:, 0]]
        out[:, 1:] = a[:, 1:] + np.einsum("nij,nj->ni", mats, b[:, 1:])
        return out

    def inv_batch(self, a):
        out = np.empty_like(a)
        t = self._finv[a[:, 0]]
        out[:, 0] = t
        out[:, 1:] = -np.einsum("nij,nj->ni", self._mats[t], a[:, 1:])
        return out

    def translation_part_after_return(self, g):
        """g^{o} where o is the order of the finite part; a pure translation."""
        o = self._forder[g[0]]
        return o, self.power(g, o)

    def proves_infinite(self, g):
        _, h = self.translation_part_after_return(g)
        return any(h[1:])

    def order_of(self, g, cap=10_000):
        if cap < 1:
            raise ValueError("cap must be positive")
        o, h = self.translation_part_after_return(g)
        if any(h[1:]):
            return INFINITE
        # g^o = 1; the true order divides o
        for k in range(1, o + 1):
            if o % k == 0 and self.power(g, k) == self.identity:
                return OrderResult("finite", k) if k <= cap else OrderResult("exceeds-cap")
        raise AssertionError("unreachable")

    # spelling in the standard generators (translations then matrices)
    def _standard_spell(self, g):
        word = ()
        for i, v in enumerate(g[1:]):
            word += _power_word(i + 1, v)
        word += tuple(self.dim + j + 1 for j in self._fwords[g[0]])
        return word

    def _standard_relations(self):
        d = self.dim
        rels = [(-(i + 1), -(j + 1), i + 1, j + 1) for i in range(d) for j in range(i + 1, d)]
        # finite part: relators of F over its Cayley graph
        nf = len(self._mats)
        for t in range(nf):
            for j, key in enumerate(self.matrix_gens):
                s = self._tag[key]
                h = int(self._ftable[t, s])
                rel = tuple(d + x + 1 for x in self._fwords[t]) + (d + j + 1,)
                rel += invert_word(tuple(d + x + 1 for x in self._fwords[h]))
                rel = free_reduce(rel)
                if rel:
                    rels.append(rel)
        # conjugation: f_j e_i f_j⁻¹ = A_j e_i
        for j, key in enumerate(self.matrix_gens):
            m = np.asarray(key).reshape(d, d)
            for i in range(d):
                img = (0,) + tuple(int(v) for v in m[:, i])
                lhs = (d + j + 1, i + 1, -(d + j + 1))
                rels.append(free_reduce(lhs + invert_word(self._standard_spell(img))))
        return sorted(set(rels), key=lambda w: (len(w), w))

    def spell(self, g):
        if self._standard:
            return free_reduce(self._standard_spell(g))
        return self._custom_spell(g)

    def _custom_spell(self, g):
        raise NotImplementedError

    def relations(self):
        if self._standard:
            return self._standard_relations()
        return None

    def render(self, g):
        if self.dim == 1 and len(self._mats) == 2:
            return f"({g[1]},{'r' if g[0] else 't'})"
        return f"[{g[0]}|{','.join(str(v) for v in g[1:])}]"


class InfiniteDihedral(Semidirect):
    """D∞ = Z ⋊ Z2 generated by two reflections s: u ↦ -u and t: u ↦ 1 - u.

    Payload (r, x): r = 1 for reflections, x the translation part. ``ts`` is
    translation by +1, so translations are even-length and reflections
    odd-length words.
    """

    kind = "infinite-dihedral"

    def __init__(self, names=None):
        super().__init__(1, [[[-1]]], generators=[(1, 0), (1, 1)], names=names or ["s", "t"])

    def describe(self):
        return {"kind": self.kind}

    def _custom_spell(self, g):
        r, x = g
        word = (2, 1) * x if x >= 0 else (1, 2) * (-x)
        if r:
            word += (1,)
        return free_reduce(word)

    def relations(self):
        return [(1, 1), (2, 2)]

    def word_length(self, g):
        return len(self._custom_spell(g))

    def render(self, g):
        r, x = g
        return f"{'r' if r else 't'}{x}"


class CongruenceQuotient(FiniteMixin, ArrayGroupModel):
    """A coordinate model with every coordinate reduced mod m."""

    kind = "congruence-quotient"
    torsion_decidable = True

    def __init__(self, base, modulus: int):
        if not isinstance(base, (FreeAbelian, Heisenberg, Semidirect)):
            raise MalformedSpecError(f"no congruence quotient for {base.kind}")
        if modulus < 1:
            raise MalformedSpecError("modulus must be positive")
        self.base = base
        self.modulus = modulus
        self.width = base.width
        self._lo = 1 if isinstance(base, Semidirect) else 0
        gens = [self.reduce(g) for g in base.generators]
        super().__init__(gens, base.generator_names)

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "modulus": self.modulus}

    def reduce(self, g):
        lo, m = self._lo, self.modulus
        return tuple(g[:lo]) + tuple(v % m for v in g[lo:])

    def reduce_batch(self, a):
        out = a.copy()
        out[:, self._lo :] %= self.modulus
        return out

    @property
    def identity(self):
        return self.base.identity

    def is_element(self, g):
        return self.base.is_element(g) and all(0 <= v < self.modulus for v in g[self._lo :])

    def mul(self, g, h):
        return self.reduce(self.base.mul(g, h))

    def inv(self, g):
        return self.reduce(self.base.inv(g))

    def mul_batch(self, a, b):
        return self.reduce_batch(self.base.mul_batch(a, b))

    def inv_batch(self, a):
        return self.reduce_batch(self.base.inv_batch(a))

    def render(self, g):
        return "(" + ",".join(str(v) for v in g) + f") mod {self.modulus}"
