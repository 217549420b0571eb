"""Abstract group interface shared by every built-in model.

Elements are plain hashable payloads (tuples of ints, ints). Two elements are
equal as group elements iff their payloads compare equal, so payloads can be
used directly as dict keys by the ball enumerator.

Generator words are tuples of nonzero ints: ``+(i+1)`` is generator ``i`` and
``-(i+1)`` its inverse.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

Element = Hashable
GenWord = tuple


class GroupError(Exception):
    """Base class for group-model errors."""


class MalformedSpecError(GroupError):
    pass


class PayloadError(GroupError):
    """An element payload does not belong to the model."""


class InfiniteGroupError(GroupError):
    pass


class HomomorphismError(GroupError):
    """A declared homomorphism violates a defining relation."""


@dataclass(frozen=True)
class OrderResult:
    """Outcome of an order computation.

    ``status`` is ``"finite"``, ``"infinite"`` (proved by the model) or
    ``"exceeds-cap"`` (no proof either way within the cap).
    """

    status: str
    order: int | None = None

    @property
    def is_finite(self) -> bool:
        return self.status == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.status == "infinite"

    def __str__(self) -> str:
        return str(self.order) if self.is_finite else self.status


INFINITE = OrderResult("infinite")
EXCEEDS_CAP = OrderResult("exceeds-cap")


def letter_name(names: Sequence[str], letter: int) -> str:
    name = names[abs(letter) - 1]
    if letter > 0:
        return name
    if len(name) == 1 and name.islower():
        return name.upper()
    return name + "^-1"


def invert_word(word: Iterable[int]) -> tuple:
    return tuple(-x for x in reversed(tuple(word)))


def free_reduce(word: Iterable[int]) -> tuple:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class GroupModel:
    """A finitely generated group with canonical element payloads.

    Subclasses implement ``identity``, ``mul``, ``inv``, ``is_element`` and
    ``spell``. Models with array-friendly payloads override the ``*_batch``
    hooks so that estimators can work on whole balls at once.
    """

    kind: str = "abstract"
    #: whether ``order_of`` always returns a definite answer
    torsion_decidable: bool = False

    def __init__(self, generators: Sequence[Element], generator_names: Sequence[str]):
        if len(generators) != len(generator_names):
            raise MalformedSpecError("one name per generator required")
        if len(set(generator_names)) != len(generator_names):
            raise MalformedSpecError(f"duplicate generator names: {list(generator_names)}")
        self.generators: tuple = tuple(generators)
        self.generator_names: tuple[str, ...] = tuple(generator_names)

    # -- required ---------------------------------------------------------
    @property
    def identity(self) -> Element:
        raise NotImplementedError

    def mul(self, g: Element, h: Element) -> Element:
        raise NotImplementedError

    def inv(self, g: Element) -> Element:
        raise NotImplementedError

    def is_element(self, g: Any) -> bool:
        raise NotImplementedError

    def spell(self, g: Element) -> GenWord:
        """A generator word evaluating to ``g``."""
        raise NotImplementedError

    # -- descriptive ------------------------------------------------------
    def describe(self) -> dict:
        return {"kind": self.kind}

    def fingerprint(self) -> str:
        blob = repr((self.describe(), self.generators, self.generator_names))
        return hashlib.sha1(blob.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()}>"

    def render(self, g: Element) -> str:
        return str(g)

    def parse_element(self, text: str) -> Element:
        """Parse a word in the generator names (``a b A``, ``ab^-1``...)."""
        return self.evaluate_word(parse_generator_word(text, self.generator_names))

    def relations(self) -> list[GenWord] | None:
        """Defining relators as generator words, or None if unknown."""
        return None

    def enumeration_ready(self) -> None:
        """Raise if balls of this model cannot be enumerated reliably."""

    # -- finiteness --------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return False

    def elements(self) -> list:
        raise InfiniteGroupError(f"{self.kind} is infinite")

    @property
    def order(self) -> int:
        return len(self.elements())

    # -- derived ----------------------------------------------------------
    def check(self, g: Any) -> Element:
        if not self.is_element(g):
            raise PayloadError(f"{g!r} is not a canonical {self.kind} element")
        return g

    def letter(self, x: int) -> Element:
        gen = self.generators[abs(x) - 1]
        return gen if x > 0 else self.inv(gen)

    def evaluate_word(self, word: Iterable[int]) -> Element:
        out = self.identity
        for x in word:
            out = self.mul(out, self.letter(x))
        return out

    def power(self, g: Element, k: int) -> Element:
        if k < 0:
            g, k = self.inv(g), -k
        out, base = self.identity, g
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def commutes(self, g: Element, h: Element) -> bool:
        return self.mul(g, h) == self.mul(h, g)

    def proves_infinite(self, g: Element) -> bool:
        """True only when the model can certify ``g`` has infinite order."""
        return False

    def order_of(self, g: Element, cap: int = 10_000) -> OrderResult:
        if cap < 1:
            raise ValueError("cap must be positive")
        if self.proves_infinite(g):
            return INFINITE
        x = g
        for k in range(1, cap + 1):
            if x == self.identity:
                return OrderResult("finite", k)
            x = self.mul(x, g)
        return EXCEEDS_CAP

    def word_length(self, g: Element) -> int | None:
        """Exact |g|_X when the model has a closed form, else None."""
        return None

    def symmetric_alphabet(self, generators: Sequence[Element] | None = None) -> list:
        """X ∪ X⁻¹ in the order x1, x1⁻¹, x2, x2⁻¹, ... without repeats."""
        gens = self.generators if generators is None else generators
        out: list = []
        seen = set()
        for x in gens:
            for y in (x, self.inv(x)):
                if y not in seen and y != self.identity:
                    seen.add(y)
                    out.append(y)
        return out

    # -- batch hooks ------------------------------------------------------
    # The default batch is a Python list; array models return ndarrays.
    def pack(self, elements: Sequence[Element]) -> Any:
        return list(elements)

    def unpack(self, batch: Any) -> list:
        return list(batch)

    def take(self, batch: Any, idx: np.ndarray) -> Any:
        return [batch[i] for i in np.asarray(idx).ravel()]

    def repeat(self, g: Element, n: int) -> Any:
        return [g] * n

    def mul_batch(self, a: Any, b: Any) -> Any:
        return [self.mul(x, y) for x, y in zip(a, b)]

    def inv_batch(self, a: Any) -> Any:
        return [self.inv(x) for x in a]

    def eq_batch(self, a: Any, b: Any) -> np.ndarray:
        return np.fromiter((x == y for x, y in zip(a, b)), dtype=bool, count=len(a))

    def is_identity_batch(self, a: Any) -> np.ndarray:
        e = self.identity
        return np.fromiter((x == e for x in a), dtype=bool, count=len(a))

    def identity_batch(self, n: int) -> Any:
        return self.repeat(self.identity, n)

    def commutes_batch(self, a: Any, b: Any) -> np.ndarray:
        return self.eq_batch(self.mul_batch(a, b), self.mul_batch(b, a))

    def batch_len(self, a: Any) -> int:
        return len(a)


class ArrayGroupModel(GroupModel):
    """Models whose payloads are fixed-width integer tuples."""

    width: int = 0

    def pack(self, elements):
        if len(elements) == 0:
            return np.zeros((0, self.width), dtype=np.int64)
        return np.asarray(elements, dtype=np.int64).reshape(len(elements), self.width)

    def unpack(self, batch):
        return [tuple(int(v) for v in row) for row in batch]

    def take(self, batch, idx):
        return batch[np.asarray(idx).ravel()]

    def repeat(self, g, n):
        return np.tile(np.asarray(g, dtype=np.int64), (n, 1))

    def eq_batch(self, a, b):
        return np.all(a == b, axis=1)

    def is_identity_batch(self, a):
        return np.all(a == np.asarray(self.identity, dtype=np.int64), axis=1)

    def batch_len(self, a):
        return a.shape[0]


class FiniteMixin:
    """Materialization of finite models by closure under the generators."""

    _elements: list | None = None
    _words: dict | None = None

    @property
    def is_finite(self) -> bool:
        return True

    def _materialize(self) -> None:
        if self._elements is not None:
            return
        e = self.identity
        elems = [e]
        words = {e: ()}
        alphabet = []
        for i, _ in enumerate(self.generators):
            alphabet.append(i + 1)
            alphabet.append(-(i + 1))
        k = 0
        while k < len(elems):
            g = elems[k]
            for x in alphabet:
                h = self.mul(g, self.letter(x))
                if h not in words:
                    words[h] = words[g] + (x,)
                    elems.append(h)
            k += 1
        self._elements = elems
        self._words = words

    def elements(self) -> list:
        self._materialize()
        return list(self._elements)

    @property
    def order(self) -> int:
        self._materialize()
        return len(self._elements)

    def spanning_tree_relations(self) -> list[GenWord]:
        """Relators w(g)·x·w(gx)⁻¹ over the Cayley graph; a complete presentation."""
        self._materialize()
        rels = set()
        for g in self._elements:
            for i in range(len(self.generators)):
                x = i + 1
                h = self.mul(g, self.letter(x))
                rel = free_reduce(self._words[g] + (x,) + invert_word(self._words[h]))
                if rel:
                    rels.add(rel)
        return sorted(rels, key=lambda w: (len(w), w))

    def relations(self):
        return self.spanning_tree_relations()

    def spell(self, g):
        self._materialize()
        try:
            return self._words[g]
        except KeyError:
            raise PayloadError(f"{g!r} not in {self.kind}") from None

    def order_of(self, g, cap: int = 10_000) -> OrderResult:
        if cap < 1:
            raise ValueError("cap must be positive")
        x = g
        for k in range(1, min(cap, self.order) + 1):
            if x == self.identity:
                return OrderResult("finite", k)
            x = self.mul(x, g)
        return EXCEEDS_CAP


def parse_generator_word(text: str, names: Sequence[str]) -> GenWord:
    """Parse ``text`` as a product of generator names.

    Accepts whitespace- or ``*``-separated tokens, each a name, optionally
    followed by ``^k``; single-letter lowercase names may also be written
    uppercase for the inverse and juxtaposed (``aBa``). ``1``/``e``/``ε`` (when
    not a generator name) denote the identity.
    """
    lookup = {n: i + 1 for i, n in enumerate(names)}
    text = text.strip()
    if text in ("", "1", "ε") or (text == "e" and "e" not in lookup):
        return ()
    out: list[int] = []
    pos = 0
    by_len = sorted(lookup, key=len, reverse=True)
    while pos < len(text):
        c = text[pos]
        if c.isspace() or c == "*":
            pos += 1
            continue
        letter = None
        for n in by_len:
            if text.startswith(n, pos):
                letter, pos = lookup[n], pos + len(n)
                break
        else:
            if c.isupper() and c.lower() in lookup:
                letter, pos = -lookup[c.lower()], pos + 1
        if letter is None:
            raise MalformedSpecError(f"unknown generator at position {pos} in {text!r}")
        exp = 1
        if pos < len(text) and text[pos] == "^":
            j = pos + 1
            if j < len(text) and text[j] in "+-":
                j += 1
            while j < len(text) and text[j].isdigit():
                j += 1
            try:
                exp = int(text[pos + 1 : j])
            except ValueError:
                raise MalformedSpecError(f"bad exponent at position {pos} in {text!r}") from None
            pos = j
        if exp < 0:
            letter, exp = -letter, -exp
        out.extend([letter] * exp)
    return free_reduce(out)


def gcd_order(e: int, n: int) -> int:
    return n // math.gcd(e, n)


PayloadMap = Callable[[Element], Element]
