"""String rewriting systems: parsing, normal forms, critical-pair confluence
check, and the group model whose elements are irreducible words.

File format, one declaration per line (``#`` starts a comment)::

    letters: a A b B
    inverses: a A, b B
    rule: ba -> ab
    rule: aA ->

Letter order in ``letters:`` defines the shortlex order; every rule must have
its left side shortlex-greater than its right side.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .base import GroupModel, GroupError, MalformedSpecError, free_reduce

EMPTY_TOKENS = ("", "1", "ε", "eps")


class ShortlexOrientationError(MalformedSpecError):
    pass


class NonConfluentError(GroupError):
    """Ball enumeration refused: normal forms are not unique."""


def shortlex_greater(u: tuple, v: tuple) -> bool:
    return len(u) > len(v) or (len(u) == len(v) and u > v)


@dataclass(frozen=True)
class RewritingSystemSpec:
    alphabet: tuple[str, ...]
    rules: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    inverses: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MalformedSpecError("duplicate letters")
        for k, (lhs, rhs) in enumerate(self.rules):
            if not lhs:
                raise MalformedSpecError(f"rule {k}: empty left-hand side")
            if not shortlex_greater(lhs, rhs):
                raise ShortlexOrientationError(
                    f"rule {self.render(lhs)} -> {self.render(rhs)} is not shortlex-reducing"
                )
        for a, b in self.inverses.items():
            if a >= len(self.alphabet) or b >= len(self.alphabet) or self.inverses.get(b) != a:
                raise MalformedSpecError("inverse declarations must be symmetric")

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.alphabet)

    def render(self, word) -> str:
        if not word:
            return "1"
        sep = "" if self.single_char else " "
        return sep.join(self.alphabet[i] for i in word)

    def parse_word(self, text: str) -> tuple[int, ...]:
        text = text.strip()
        if text in EMPTY_TOKENS and text not in self.alphabet:
            return ()
        lookup = {s: i for i, s in enumerate(self.alphabet)}
        tokens = text.split() if (" " in text or not self.single_char) else list(text)
        out = []
        for tok in tokens:
            if tok not in lookup:
                raise MalformedSpecError(f"unknown letter {tok!r} in {text!r}")
            out.append(lookup[tok])
        return tuple(out)


def parse_rewriting_system(text: str) -> RewritingSystemSpec:
    letters: list[str] | None = None
    inverse_pairs: list[tuple[str, str]] = []
    raw_rules: list[tuple[str, str, int]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise MalformedSpecError(f"line {lineno}: expected 'key: value'")
        key = key.strip().lower()
        if key == "letters":
            letters = value.split()
        elif key == "inverses":
            for pair in value.split(","):
                parts = pair.split()
                if len(parts) != 2:
                    raise MalformedSpecError(f"line {lineno}: bad inverse pair {pair.strip()!r}")
                inverse_pairs.append((parts[0], parts[1]))
        elif key == "rule":
            lhs, arrow, rhs = value.partition("->")
            if not arrow:
                raise MalformedSpecError(f"line {lineno}: rule needs '->'")
            raw_rules.append((lhs.strip(), rhs.strip(), lineno))
        else:
            raise MalformedSpecError(f"line {lineno}: unknown declaration {key!r}")
    if not letters:
        raise MalformedSpecError("missing 'letters:' declaration")
    pos = {s: i for i, s in enumerate(letters)}
    inverses = {}
    for a, b in inverse_pairs:
        if a not in pos or b not in pos:
            raise MalformedSpecError(f"inverse pair {a} {b} uses undeclared letters")
        inverses[pos[a]] = pos[b]
        inverses[pos[b]] = pos[a]
    probe = RewritingSystemSpec(tuple(letters), (), inverses)
    rules = []
    for lhs, rhs, lineno in raw_rules:
        try:
            rules.append((probe.parse_word(lhs), probe.parse_word(rhs)))
        except MalformedSpecError as exc:
            raise MalformedSpecError(f"line {lineno}: {exc}") from None
    return RewritingSystemSpec(tuple(letters), tuple(rules), inverses)


class Rewriter:
    """Leftmost-innermost reduction with a stack; terminates by shortlex."""

    def __init__(self, spec: RewritingSystemSpec):
        self.spec = spec
        self.rules = {}
        for lhs, rhs in spec.rules:
            self.rules.setdefault(lhs, rhs)
        self.lengths = sorted({len(lhs) for lhs in self.rules})

    def normal_form(self, word) -> tuple[int, ...]:
        pending = list(reversed(word))
        stack: list[int] = []
        rules, lengths = self.rules, self.lengths
        while pending:
            stack.append(pending.pop())
            for n in lengths:
                if n > len(stack):
                    break
                rhs = rules.get(tuple(stack[-n:]))
                if rhs is not None:
                    del stack[-n:]
                    pending.extend(reversed(rhs))
                    break
        return tuple(stack)


@dataclass(frozen=True)
class CriticalPair:
    rule_a: int
    rule_b: int
    word: tuple
    reducts: tuple
    normal_forms: tuple

    @property
    def joins(self) -> bool:
        return self.normal_forms[0] == self.normal_forms[1]


@dataclass(frozen=True)
class ConfluenceReport:
    confluent: bool
    pairs: tuple[CriticalPair, ...]

    def failures(self) -> list[CriticalPair]:
        return [p for p in self.pairs if not p.joins]

    def summary(self, spec: RewritingSystemSpec) -> str:
        lines = [f"{'confluent' if self.confluent else 'NOT confluent'}: {len(self.pairs)} critical pairs"]
        for p in self.pairs:
            a, b = p.normal_forms
            status = "joins" if p.joins else "FAILS"
            lines.append(
                f"  rules {p.rule_a},{p.rule_b} on {spec.render(p.word)}: "
                f"{spec.render(a)} | {spec.render(b)}  {status}"
            )
        return "\n".join(lines)


def critical_pairs(spec: RewritingSystemSpec) -> list[tuple[int, int, tuple, tuple, tuple]]:
    """All superpositions (i, j, word, reduct_by_i, reduct_by_j)."""
    out = []
    rules = spec.rules
    for i, (l1, r1) in enumerate(rules):
        for j, (l2, r2) in enumerate(rules):
            # suffix of l1 = prefix of l2
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    word = l1 + l2[k:]
                    out.append((i, j, word, r1 + l2[k:], l1[:-k] + r2))
            # l2 a factor of l1
            if i != j and len(l2) <= len(l1):
                for p in range(len(l1) - len(l2) + 1):
                    if l1[p : p + len(l2)] == l2:
                        out.append((i, j, l1, r1, l1[:p] + r2 + l1[p + len(l2) :]))
    return out


def check_confluence(spec: RewritingSystemSpec) -> ConfluenceReport:
    rw = Rewriter(spec)
    pairs = []
    for i, j, word, a, b in critical_pairs(spec):
        pairs.append(CriticalPair(i, j, word, (a, b), (rw.normal_form(a), rw.normal_form(b))))
    return ConfluenceReport(all(p.joins for p in pairs), tuple(pairs))


class RewritingGroup(GroupModel):
    """Group presented by a complete rewriting system over formal inverses.

    Generation by the chosen generators is asserted by the user and not
    verified (``generation_verified`` is False).
    """

    kind = "rewriting-system"
    generation_verified = False

    def __init__(self, spec: RewritingSystemSpec):
        n = len(spec.alphabet)
        if set(spec.inverses) != set(range(n)):
            raise MalformedSpecError("every letter needs a declared inverse")
        self.spec = spec
        self.rewriter = Rewriter(spec)
        self._letter = {}
        gens, names = [], []
        for i, sym in enumerate(spec.alphabet):
            j = spec.inverses[i]
            if j in self._letter:
                self._letter[i] = -self._letter[j]
                continue
            gens.append(None)
            names.append(sym)
            self._letter[i] = len(gens)
        self._gen_symbol = {v: k for k, v in self._letter.items() if v > 0}
        gens = [self.rewriter.normal_form((self._gen_symbol[k + 1],)) for k in range(len(gens))]
        super().__init__(gens, names)
        self._report: ConfluenceReport | None = None

    def describe(self):
        return {
            "kind": self.kind,
            "alphabet": list(self.spec.alphabet),
            "rules": [[list(l), list(r)] for l, r in self.spec.rules],
        }

    @property
    def confluence(self) -> ConfluenceReport:
        if self._report is None:
            self._report = check_confluence(self.spec)
        return self._report

    def enumeration_ready(self):
        if not self.confluence.confluent:
            bad = self.confluence.failures()[0]
            a, b = bad.normal_forms
            raise NonConfluentError(
                f"rewriting system is not confluent: {self.spec.render(bad.word)} reduces to "
                f"{self.spec.render(a)} and {self.spec.render(b)}"
            )

    @property
    def identity(self):
        return ()

    def is_element(self, g):
        return (
            isinstance(g, tuple)
            and all(isinstance(s, int) and 0 <= s < len(self.spec.alphabet) for s in g)
            and self.rewriter.normal_form(g) == g
        )

    def canonical(self, word) -> tuple:
        return self.rewriter.normal_form(word)

    def mul(self, g, h):
        return self.rewriter.normal_form(g + h)

    def inv(self, g):
        inv = self.spec.inverses
        return self.rewriter.normal_form(tuple(inv[s] for s in reversed(g)))

    def spell(self, g):
        return free_reduce(self._letter[s] for s in g)

    def relations(self):
        rels = []
        for lhs, rhs in self.spec.rules:
            w = free_reduce(
                tuple(self._letter[s] for s in lhs)
                + tuple(-self._letter[s] for s in reversed(rhs))
            )
            if w:
                rels.append(w)
        for i, j in self.spec.inverses.items():
            w = free_reduce((self._letter[i], self._letter[j]))
            if w:
                rels.append(w)
        return sorted(set(rels), key=lambda w: (len(w), w))

    def render(self, g):
        return self.spec.render(g)

    def parse_element(self, text):
        return self.rewriter.normal_form(self.spec.parse_word(text))
