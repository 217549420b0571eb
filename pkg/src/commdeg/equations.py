"""Words in variables x1..xk, equation systems, and evaluation on tuples.

Syntax: ``x3``, ``x3^-1`` or ``X3`` for the inverse, ``x1^2`` for powers,
``[u,v]`` for the commutator u⁻¹v⁻¹uv, parentheses for grouping (with an
optional exponent), and juxtaposition or ``*`` for products.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import GroupModel, free_reduce, invert_word


class WordSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


class VacuousWordError(ValueError):
    """The word reduces to the empty word."""


class ArityError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    """Freely reduced word; letter ``+i`` is x_i and ``-i`` its inverse."""

    letters: tuple

    def __post_init__(self):
        if free_reduce(self.letters) != self.letters:
            raise ValueError("Word letters must be freely reduced")

    @classmethod
    def from_letters(cls, letters) -> "Word":
        return cls(free_reduce(letters))

    @property
    def arity(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"x{x}" if x > 0 else f"x{-x}^-1" for x in self.letters)


_TOKEN = re.compile(r"\s*(?:(?P<var>[xX])(?P<idx>\d+)|(?P<sym>[\[\],()*^])|(?P<int>[+-]?\d+))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                skip = len(stripped[pos:]) - len(stripped[pos:].lstrip())
                raise WordSyntaxError("unexpected character", text, pos + skip)
            start = m.start(m.lastgroup) if m.lastgroup != "idx" else m.start("var")
            if m.group("var"):
                self.tokens.append(("var", (m.group("var"), int(m.group("idx"))), m.start("var")))
            elif m.group("sym"):
                self.tokens.append((m.group("sym"), None, m.start("sym")))
            else:
                self.tokens.append(("int", int(m.group("int")), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise WordSyntaxError(f"expected {kind!r}", self.text, tok[2])
        self.i += 1
        return tok

    def product(self, stop=()):
        out: tuple = ()
        while True:
            kind, _, pos = self.peek()
            if kind is None or kind in stop:
                return out
            if kind == "*":
                self.i += 1
                continue
            out += self.factor()

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "var":
            self.i += 1
            letter, idx = val
            if idx < 1:
                raise WordSyntaxError("variable index must be >= 1", self.text, pos)
            base = (idx,) if letter == "x" else (-idx,)
        elif kind == "[":
            self.i += 1
            u = self.product(stop=(",",))
            self.take(",")
            v = self.product(stop=("]",))
            self.take("]")
            if not u or not v:
                raise WordSyntaxError("empty commutator argument", self.text, pos)
            base = invert_word(u) + invert_word(v) + u + v
        elif kind == "(":
            self.i += 1
            base = self.product(stop=(")",))
            self.take(")")
        else:
            raise WordSyntaxError("expected a variable, '[' or '('", self.text, pos)
        if self.peek()[0] == "^":
            self.i += 1
            kind, exp, epos = self.peek()
            if kind != "int":
                raise WordSyntaxError("expected an integer exponent", self.text, epos)
            self.i += 1
            base = invert_word(base) * (-exp) if exp < 0 else base * exp
        return base


def parse_word(text: str) -> Word:
    p = _Parser(text)
    letters = p.product()
    if p.i != len(p.tokens):
        raise WordSyntaxError("unexpected token", text, p.peek()[2])
    w = Word.from_letters(letters)
    if not w.letters:
        raise VacuousWordError(f"{text!r} reduces to the empty word")
    return w


@dataclass(frozen=True)
class EquationSystem:
    words: tuple

    def __post_init__(self):
        if not self.words:
            raise ValueError("an equation system needs at least one word")
        for w in self.words:
            if not w.letters:
                raise VacuousWordError("empty word in system")

    @classmethod
    def parse(cls, texts: Sequence[str] | str) -> "EquationSystem":
        if isinstance(texts, str):
            texts = [texts]
        return cls(tuple(dict.fromkeys(parse_word(t) for t in texts)))

    @property
    def arity(self) -> int:
        return max(w.arity for w in self.words)

    def __str__(self):
        return "{" + ", ".join(str(w) for w in self.words) + "}"


COMMUTATOR = EquationSystem.parse("[x1,x2]")


def _check_arity(w_or_E, values):
    k = w_or_E.arity
    if len(values) < k:
        raise ArityError(f"need {k} values, got {len(values)}")


def evaluate(G: GroupModel, w: Word, values: Sequence):
    _check_arity(w, values)
    inverses = {}
    out = G.identity
    for x in w.letters:
        if x > 0:
            out = G.mul(out, values[x - 1])
        else:
            if x not in inverses:
                inverses[x] = G.inv(values[-x - 1])
            out = G.mul(out, inverses[x])
    return out


def is_solution(G: GroupModel, E: EquationSystem, values: Sequence) -> bool:
    _check_arity(E, values)
    return all(evaluate(G, w, values) == G.identity for w in E.words)


def evaluate_batch(G: GroupModel, w: Word, batches: Sequence):
    """Evaluate ``w`` on aligned batches (one packed batch per variable)."""
    _check_arity(w, batches)
    n = G.batch_len(batches[0])
    inverses = {}
    out = None
    for x in w.letters:
        if x > 0:
            b = batches[x - 1]
        else:
            if x not in inverses:
                inverses[x] = G.inv_batch(batches[-x - 1])
            b = inverses[x]
        out = b if out is None else G.mul_batch(out, b)
    return out if out is not None else G.identity_batch(n)


def solution_mask(G: GroupModel, E: EquationSystem, batches: Sequence) -> np.ndarray:
    _check_arity(E, batches)
    mask = None
    for w in E.words:
        m = G.is_identity_batch(evaluate_batch(G, w, batches))
        mask = m if mask is None else (mask & m)
    return mask
