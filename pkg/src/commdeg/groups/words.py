"""Word-based models: free groups and free products of finite cyclic groups."""
from __future__ import annotations

import string

from .base import (
    EXCEEDS_CAP,
    INFINITE,
    GroupModel,
    MalformedSpecError,
    OrderResult,
    gcd_order,
    letter_name,
    parse_generator_word,
)


def _default_names(rank: int) -> list[str]:
    if rank <= 26:
        return list(string.ascii_lowercase[:rank])
    return [f"x{i + 1}" for i in range(rank)]


def _minimal_period(seq: tuple) -> int:
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and seq[:p] * (n // p) == seq:
            return p
    return n


class FreeGroup(GroupModel):
    """F(p) on a free basis; payloads are freely reduced generator words."""

    kind = "free"
    torsion_decidable = True

    def __init__(self, rank: int, names=None):
        if rank < 1:
            raise MalformedSpecError("free group rank must be >= 1")
        self.rank = rank
        gens = [(i + 1,) for i in range(rank)]
        super().__init__(gens, names or _default_names(rank))

    def describe(self):
        return {"kind": self.kind, "rank": self.rank}

    @property
    def identity(self):
        return ()

    def is_element(self, g):
        if not isinstance(g, tuple):
            return False
        for i, x in enumerate(g):
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                return False
            if i and g[i - 1] == -x:
                return False
        return True

    def mul(self, g, h):
        k = 0
        n = min(len(g), len(h))
        while k < n and g[-1 - k] == -h[k]:
            k += 1
        if k == 0:
            return g + h
        return g[: len(g) - k] + h[k:]

    def inv(self, g):
        return tuple(-x for x in reversed(g))

    def spell(self, g):
        return g

    def relations(self):
        return []

    def render(self, g):
        if not g:
            return "1"
        sep = "" if all(len(n) == 1 for n in self.generator_names) else " "
        return sep.join(letter_name(self.generator_names, x) for x in g)

    def parse_element(self, text):
        return parse_generator_word(text, self.generator_names)

    def word_length(self, g):
        return len(g)

    def proves_infinite(self, g):
        return len(g) > 0

    def order_of(self, g, cap=10_000):
        if cap < 1:
            raise ValueError("cap must be positive")
        return INFINITE if g else OrderResult("finite", 1)

    def cyclic_reduction(self, g):
        """Return (c, h) with g = c h c⁻¹ and h cyclically reduced."""
        i, j = 0, len(g)
        while j - i >= 2 and g[i] == -g[j - 1]:
            i += 1
            j -= 1
        return g[:i], g[i:j]

    def primitive_root(self, g):
        """The unique r with g = rᵏ (k ≥ 1) and r not a proper power."""
        if not g:
            raise ValueError("identity has no root")
        c, h = self.cyclic_reduction(g)
        p = _minimal_period(h)
        return self.mul(self.mul(c, h[:p]), self.inv(c))

    def commute_key(self, g):
        """Non-identity g, h commute iff their keys are equal (C(g) = ⟨root⟩)."""
        r = self.primitive_root(g)
        return min(r, self.inv(r))

    def extend_sphere(self, sphere, alphabet):
        """Geodesic successors of a sphere, in the order plain BFS finds them."""
        letters = [a[0] for a in alphabet]
        out = []
        for w in sphere:
            last = w[-1] if w else 0
            for x in letters:
                if x != -last:
                    out.append(w + (x,))
        return out


class FreeProduct(GroupModel):
    """Z_{o1} * ... * Z_{or}; payloads are tuples of (factor, exponent) syllables."""

    kind = "free-product"
    torsion_decidable = True

    def __init__(self, orders, names=None):
        orders = tuple(int(o) for o in orders)
        if len(orders) < 1 or any(o < 2 for o in orders):
            raise MalformedSpecError("free-product factor orders must be >= 2")
        self.orders = orders
        gens = [((i, 1),) for i in range(len(orders))]
        super().__init__(gens, names or [f"s{i + 1}" for i in range(len(orders))])

    def describe(self):
        return {"kind": self.kind, "orders": list(self.orders)}

    @property
    def identity(self):
        return ()

    def is_element(self, g):
        if not isinstance(g, tuple):
            return False
        prev = None
        for syl in g:
            if not (isinstance(syl, tuple) and len(syl) == 2):
                return False
            i, e = syl
            if not (0 <= i < len(self.orders)) or not (1 <= e < self.orders[i]) or i == prev:
                return False
            prev = i
        return True

    def mul(self, g, h):
        out = list(g)
        for k, (i, e) in enumerate(h):
            if out and out[-1][0] == i:
                j, f = out.pop()
                s = (f + e) % self.orders[i]
                if s:
                    out.append((i, s))
                    out.extend(h[k + 1 :])
                    return tuple(out)
            else:
                out.extend(h[k:])
                return tuple(out)
        return tuple(out)

    def inv(self, g):
        return tuple((i, self.orders[i] - e) for i, e in reversed(g))

    def spell(self, g):
        word = []
        for i, e in g:
            o = self.orders[i]
            if e <= o - e:
                word.extend([i + 1] * e)
            else:
                word.extend([-(i + 1)] * (o - e))
        return tuple(word)

    def relations(self):
        return [tuple([i + 1] * o) for i, o in enumerate(self.orders)]

    def render(self, g):
        if not g:
            return "1"
        parts = []
        for i, e in g:
            name = self.generator_names[i]
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def word_length(self, g):
        return sum(min(e, self.orders[i] - e) for i, e in g)

    def cyclic_reduction(self, g):
        """Return (c, h) with g = c h c⁻¹, h cyclically reduced."""
        c = ()
        h = g
        while len(h) >= 2 and h[0][0] == h[-1][0]:
            first = (h[0],)
            c = self.mul(c, first)
            h = self.mul(self.mul(self.inv(first), h), first)
        return c, h

    def proves_infinite(self, g):
        return len(self.cyclic_reduction(g)[1]) >= 2

    def order_of(self, g, cap=10_000):
        if cap < 1:
            raise ValueError("cap must be positive")
        _, h = self.cyclic_reduction(g)
        if len(h) >= 2:
            return INFINITE
        if not h:
            return OrderResult("finite", 1)
        i, e = h[0]
        k = gcd_order(e, self.orders[i])
        return OrderResult("finite", k) if k <= cap else EXCEEDS_CAP

    def primitive_root(self, g):
        c, h = self.cyclic_reduction(g)
        if len(h) < 2:
            raise ValueError("element of finite order has no infinite cyclic root")
        p = _minimal_period(h)
        return self.mul(self.mul(c, h[:p]), self.inv(c))

    def commute_key(self, g):
        # Torsion elements c s_i^e c⁻¹ have centralizer c⟨s_i⟩c⁻¹; the rest have
        # infinite cyclic centralizers generated by their primitive root.
        c, h = self.cyclic_reduction(g)
        if len(h) < 2:
            return ("t", c, h[0][0])
        p = _minimal_period(h)
        r = self.mul(self.mul(c, h[:p]), self.inv(c))
        return ("r", min(r, self.inv(r)))
