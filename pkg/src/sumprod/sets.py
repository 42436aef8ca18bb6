"""Finite sets of Gaussian rationals and their sum/difference/product/ratio sets."""

from __future__ import annotations

import math
import random
from collections import Counter
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import BadParams, ParseError, ZeroElement, ZeroInRatioDenominator
from .gaussian import GaussianRational, Rational, to_rational

__all__ = [
    "FiniteComplexSet",
    "RepCountMap",
    "sumset",
    "difference_set",
    "product_set",
    "ratio_set",
    "representation_counts",
    "sector_check",
    "in_sector",
    "generate",
    "parse_set",
    "read_set",
    "format_set",
    "write_set",
]

RepCountMap = Counter  # GaussianRational -> positive int

OPS = ("sum", "diff", "prod", "ratio")


class FiniteComplexSet:
    """Immutable, deduplicated, lexicographically ordered set of Gaussian rationals."""

    __slots__ = ("elements", "_members", "_hash")

    def __init__(self, items: Iterable = ()):
        members = frozenset(GaussianRational.coerce(x) for x in items)
        self._members = members
        self.elements = tuple(sorted(members, key=GaussianRational.key))
        self._hash = None

    @classmethod
    def of(cls, *items) -> FiniteComplexSet:
        return cls(items)

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, item):
        return GaussianRational.coerce(item) in self._members

    def __eq__(self, other):
        if isinstance(other, FiniteComplexSet):
            return self._members == other._members
        if isinstance(other, (set, frozenset)):
            return self._members == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._members)
        return self._hash

    def __le__(self, other):
        return self._members <= FiniteComplexSet(other)._members

    def __repr__(self):
        return "FiniteComplexSet({" + ", ".join(str(z) for z in self.elements) + "})"

    @property
    def members(self) -> frozenset:
        return self._members

    def scaled(self, c) -> FiniteComplexSet:
        c = GaussianRational.coerce(c)
        return FiniteComplexSet(c * z for z in self.elements)

    def translated(self, c) -> FiniteComplexSet:
        c = GaussianRational.coerce(c)
        return FiniteComplexSet(z + c for z in self.elements)

    def has_zero(self) -> bool:
        return GaussianRational() in self._members


def _as_set(A) -> FiniteComplexSet:
    return A if isinstance(A, FiniteComplexSet) else FiniteComplexSet(A)


def _check_ratio(B: FiniteComplexSet) -> None:
    if B.has_zero():
        raise ZeroInRatioDenominator("0 in the denominator set of a ratio set")


def sumset(A, B) -> FiniteComplexSet:
    A, B = _as_set(A), _as_set(B)
    return FiniteComplexSet(a + b for a in A for b in B)


def difference_set(A, B) -> FiniteComplexSet:
    A, B = _as_set(A), _as_set(B)
    return FiniteComplexSet(a - b for a in A for b in B)


def product_set(A, B) -> FiniteComplexSet:
    A, B = _as_set(A), _as_set(B)
    return FiniteComplexSet(a * b for a in A for b in B)


def ratio_set(A, B) -> FiniteComplexSet:
    A, B = _as_set(A), _as_set(B)
    _check_ratio(B)
    return FiniteComplexSet(a / b for a in A for b in B)


def representation_counts(A, B, op: str) -> Counter:
    """``n(v)`` = number of pairs ``(a, b)`` in ``A x B`` with ``a op b == v``."""
    A, B = _as_set(A), _as_set(B)
    if op == "sum":
        return Counter(a + b for a in A for b in B)
    if op == "diff":
        return Counter(a - b for a in A for b in B)
    if op == "prod":
        return Counter(a * b for a in A for b in B)
    if op == "ratio":
        _check_ratio(B)
        return Counter(a / b for a in A for b in B)
    raise BadParams(f"unknown operation {op!r}; expected one of {OPS}")


def in_sector(z: GaussianRational, eps: Rational) -> bool:
    # |tan(2 arg z)| < eps with t = im/re: re > 0, |t| < 1, 2|t| < eps (1 - t^2)
    if z.re <= 0:
        return False
    t = z.im / z.re
    one_minus = 1 - t * t
    if one_minus <= 0:
        return False
    return 2 * abs(t) < eps * one_minus


def sector_check(A, eps) -> bool:
    """True iff every element of ``A`` satisfies ``|tan(2 arg z)| < eps``.

    Decided by rational comparison only.
    """
    A = _as_set(A)
    eps = to_rational(eps)
    if eps <= 0:
        raise BadParams("epsilon must be positive")
    if A.has_zero():
        raise ZeroElement("0 in set passed to sector_check")
    return all(in_sector(z, eps) for z in A)


# -- generators ---------------------------------------------------------------


def _require_size(n) -> int:
    if not isinstance(n, int) or n < 2:
        raise BadParams(f"set size must be an integer >= 2, got {n!r}")
    return n


def _finish(items, n: int, kind: str) -> FiniteComplexSet:
    S = FiniteComplexSet(items)
    if len(S) != n:
        raise BadParams(f"{kind} parameters produce repeated elements")
    if S.has_zero():
        raise BadParams(f"{kind} parameters produce the element 0")
    return S


def _arithmetic(n, start=1, step=1):
    n = _require_size(n)
    start, step = GaussianRational.coerce(start), GaussianRational.coerce(step)
    if not step:
        raise BadParams("arithmetic step must be nonzero")
    return _finish((start + step * k for k in range(n)), n, "arithmetic")


def _geometric(n, start=1, ratio=2):
    n = _require_size(n)
    start, ratio = GaussianRational.coerce(start), GaussianRational.coerce(ratio)
    if not start or not ratio:
        raise BadParams("geometric start and ratio must be nonzero")
    items, z = [], start
    for _ in range(n):
        items.append(z)
        z = z * ratio
    return _finish(items, n, "geometric")


def _complex_lattice(n, side=None):
    n = _require_size(n)
    side = side or math.isqrt(n - 1) + 1
    if side * side < n:
        raise BadParams("lattice side too small for requested size")
    pts = [GaussianRational(a, b) for a in range(1, side + 1) for b in range(side)]
    return _finish(pts[:n], n, "complex_lattice")


def _random_rational(rng: random.Random, height: int, positive=False):
    den = rng.randint(1, height)
    num = rng.randint(1, height) if positive else rng.randint(-height, height)
    return mpq(num, den)


def _random(n, seed=0, height=10):
    n = _require_size(n)
    if height < 1 or (2 * height + 1) ** 2 <= n:
        raise BadParams("height too small for requested size")
    rng = random.Random(seed)
    out: set = set()
    while len(out) < n:
        z = GaussianRational(_random_rational(rng, height), _random_rational(rng, height))
        if z:
            out.add(z)
    return FiniteComplexSet(out)


def _random_sector(n, eps=mpq(1, 100), seed=0, height=12, grain=4):
    """Points ``r (1 + i t)`` with integer ``r`` and ``t`` on a coarse grid, so
    that ratios repeat often enough to give the ratio set real multiplicities."""
    n = _require_size(n)
    eps = to_rational(eps)
    if eps <= 0:
        raise BadParams("epsilon must be positive")
    if height * (2 * grain + 1) < n:
        raise BadParams("height/grain too small for requested size")
    rng = random.Random(seed)
    out: set = set()
    while len(out) < n:
        re = mpq(rng.randint(1, height))
        # |t| <= eps/3 keeps 2|t|/(1-t^2) below eps for every eps <= 1
        t = mpq(rng.randint(-grain, grain), 3 * grain) * min(eps, 1)
        z = GaussianRational(re, re * t)
        if in_sector(z, eps):
            out.add(z)
    return FiniteComplexSet(out)


GENERATORS = {
    "arithmetic": _arithmetic,
    "geometric": _geometric,
    "complex_lattice": _complex_lattice,
    "random": _random,
    "random_sector": _random_sector,
}


def generate(kind: str, **params) -> FiniteComplexSet:
    """Deterministic test-family generator; never emits 0.

    ``kind`` is one of ``arithmetic(n, start, step)``, ``geometric(n, start,
    ratio)``, ``complex_lattice(n, side)``, ``random(n, seed, height)`` or
    ``random_sector(n, eps, seed, height)``.
    """
    try:
        gen = GENERATORS[kind]
    except KeyError:
        raise BadParams(f"unknown generator {kind!r}") from None
    try:
        return gen(**params)
    except TypeError as exc:
        raise BadParams(str(exc)) from exc


# -- set files ----------------------------------------------------------------


def parse_set(text: str) -> FiniteComplexSet:
    items = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            items.append(GaussianRational.from_text(line))
        except (ParseError, TypeError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return FiniteComplexSet(items)


def read_set(path) -> FiniteComplexSet:
    with open(path, encoding="utf-8") as fh:
        return parse_set(fh.read())


def format_set(A, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.extend(z.to_text() for z in _as_set(A))
    return "\n".join(lines) + "\n"


def write_set(path, A, comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_set(A, comment))


def counts_total(counts: Mapping) -> int:
    return sum(counts.values())
