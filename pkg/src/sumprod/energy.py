"""Additive, multiplicative and cubic energies, slices ``A_d`` and the energy
inequality chain leading from the cubic energy to ``E(A, A-A)``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from gmpy2 import mpq

from .errors import BadParams, IdentityViolation, ZeroElement
from .gaussian import GaussianRational, Rational, format_rational
from .sets import (
    FiniteComplexSet,
    _as_set,
    difference_set,
    product_set,
    representation_counts,
    sumset,
)

__all__ = [
    "EnergyReport",
    "SliceSet",
    "IdentityCheck",
    "Lemma31Check",
    "Corollary5Report",
    "additive_energy",
    "multiplicative_energy",
    "cubic_energy",
    "slice_set",
    "verify_e3_identity",
    "popular_differences",
    "popular_threshold",
    "verify_lemma_31",
    "verify_katz_koester",
    "verify_corollary_5",
    "cauchy_schwarz_additive",
    "cauchy_schwarz_multiplicative",
    "sqrt_sum_squared_le",
]


@dataclass(frozen=True)
class EnergyReport:
    energy_value: int
    per_value_counts: dict
    lower_bound_rhs: Rational
    slack: Rational = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "slack", mpq(self.energy_value) - self.lower_bound_rhs)

    def to_json(self) -> dict:
        counts = sorted(self.per_value_counts.items(), key=lambda kv: kv[0].key())
        return {
            "energy_value": str(self.energy_value),
            "lower_bound_rhs": format_rational(self.lower_bound_rhs),
            "slack": format_rational(self.slack),
            "per_value_counts": [
                [format_rational(v.re), format_rational(v.im), str(c)] for v, c in counts
            ],
        }


@dataclass(frozen=True)
class SliceSet:
    d: GaussianRational
    A_d: FiniteComplexSet


@dataclass(frozen=True)
class IdentityCheck:
    holds: bool
    lhs: int
    rhs: int


def _square_sum(counts) -> int:
    return sum(c * c for c in counts.values())


def additive_energy(A, B=None) -> EnergyReport:
    """``E(A, B) = sum n(d)^2`` over ``A - B``, cross-checked against ``A + B``."""
    A = _as_set(A)
    B = A if B is None else _as_set(B)
    diff = representation_counts(A, B, "diff")
    value = _square_sum(diff)
    via_sums = _square_sum(representation_counts(A, B, "sum"))
    if value != via_sums:
        raise IdentityViolation(f"E(A,B) via differences {value} != via sums {via_sums}")
    rhs = mpq(len(A) ** 2 * len(B) ** 2, len(diff))
    return EnergyReport(value, diff, rhs)


def _energy_value(A: FiniteComplexSet, B: FiniteComplexSet) -> int:
    return _square_sum(representation_counts(A, B, "diff"))


def multiplicative_energy(A) -> EnergyReport:
    A = _as_set(A)
    if A.has_zero():
        raise ZeroElement("multiplicative energy needs 0 not in A")
    ratios = representation_counts(A, A, "ratio")
    value = _square_sum(ratios)
    rhs = mpq(len(A) ** 4, len(product_set(A, A)))
    return EnergyReport(value, ratios, rhs)


def cubic_energy(A) -> EnergyReport:
    """``E_3(A) = sum n(d)^3``; the reported bound is Hoelder's ``|A|^6/|A-A|^2``."""
    A = _as_set(A)
    diff = representation_counts(A, A, "diff")
    value = sum(c ** 3 for c in diff.values())
    rhs = mpq(len(A) ** 6, len(diff) ** 2)
    return EnergyReport(value, diff, rhs)


def slice_set(A, d) -> SliceSet:
    A = _as_set(A)
    d = GaussianRational.coerce(d)
    return SliceSet(d, FiniteComplexSet(a for a in A if a + d in A))


def _slices(A: FiniteComplexSet) -> dict:
    """``d -> A_d`` for every ``d`` in ``A - A``."""
    out: dict = {}
    for a in A:
        for b in A:
            out.setdefault(b - a, []).append(a)
    return {d: FiniteComplexSet(v) for d, v in out.items()}


def verify_e3_identity(A, strict: bool = True) -> IdentityCheck:
    """Check ``E_3(A) == sum_d E(A, A_d)`` exactly."""
    A = _as_set(A)
    lhs = cubic_energy(A).energy_value
    rhs = sum(_energy_value(A, Ad) for Ad in _slices(A).values())
    if strict and lhs != rhs:
        raise IdentityViolation(f"E_3(A) = {lhs} but sum_d E(A, A_d) = {rhs}")
    return IdentityCheck(lhs == rhs, lhs, rhs)


def popular_threshold(A) -> Rational:
    A = _as_set(A)
    return mpq(len(A) ** 2, 2 * len(difference_set(A, A)))


def popular_differences(A) -> FiniteComplexSet:
    """``D' = {d : |A_d| >= |A|^2 / (2|A-A|)}``."""
    A = _as_set(A)
    counts = representation_counts(A, A, "diff")
    thr = mpq(len(A) ** 2, 2 * len(counts))
    return FiniteComplexSet(d for d, c in counts.items() if c >= thr)


# -- exact comparison of (sum of k^(3/2))^2 against a rational ----------------


def _squarefree_split(k: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``k == s*s*f`` and ``f`` squarefree."""
    s, f, p = 1, 1, 2
    while p * p <= k:
        e = 0
        while k % p == 0:
            k //= p
            e += 1
        s *= p ** (e // 2)
        f *= p ** (e % 2)
        p += 1
    return s, f * k


def sqrt_sum_squared_le(radicands: Iterable[int], bound: Rational, max_bits: int = 1 << 16):
    """Decide ``(sum sqrt(m))**2 <= bound`` exactly for nonnegative integers ``m``.

    Returns ``(verdict, method, bits)``.  When all radicands share one
    squarefree kernel the square is rational and compared directly;
    otherwise it is irrational, cannot equal ``bound``, and dyadic
    enclosures are refined until they separate.
    """
    radicands = [int(m) for m in radicands]
    bound = mpq(bound)
    groups: dict[int, int] = {}
    for m in radicands:
        if m == 0:
            continue
        s, f = _squarefree_split(m)
        groups[f] = groups.get(f, 0) + s
    if len(groups) <= 1:
        sq = sum(c * c * f for f, c in groups.items())
        return sq <= bound, "exact", 0
    bits = 32
    while bits <= max_bits:
        scale = 1 << bits
        lo = hi = 0
        for m in radicands:
            r = math.isqrt(m << (2 * bits))
            lo += r
            hi += r if r * r == m << (2 * bits) else r + 1
        lo_q, hi_q = mpq(lo, scale), mpq(hi, scale)
        if hi_q * hi_q <= bound:
            return True, "interval", bits
        if lo_q * lo_q > bound:
            return False, "interval", bits
        bits *= 2
    raise ArithmeticError("interval refinement did not separate; precision cap reached")


@dataclass(frozen=True)
class Lemma31Check:
    holds: bool
    lhs: int  # sum over D' of |A_d| |A - A_d|
    e3: int
    size: int
    slice_sizes: tuple
    method: str
    bits: int

    @property
    def rhs_float(self) -> float:
        s = sum(k ** 1.5 for k in self.slice_sizes)
        return self.size ** 2 * s * s / self.e3


def verify_lemma_31(A, D_prime=None) -> Lemma31Check:
    """``sum_{D'} |A_d||A-A_d| >= |A|^2 (sum_{D'} |A_d|^{3/2})^2 / E_3(A)``.

    Checked in the equivalent form ``(sum |A_d|^{3/2})^2 <= E_3 * lhs / |A|^2``.
    ``D_prime`` defaults to :func:`popular_differences`.
    """
    A = _as_set(A)
    slices = _slices(A)
    D = popular_differences(A) if D_prime is None else _as_set(D_prime)
    if not len(D):
        raise BadParams("D' must be nonempty")
    missing = [d for d in D if d not in slices]
    if missing:
        raise BadParams(f"D' is not a subset of A - A: {missing[0]} missing")
    sizes, lhs = [], 0
    for d in D:
        Ad = slices[d]
        sizes.append(len(Ad))
        lhs += len(Ad) * len(difference_set(A, Ad))
    e3 = cubic_energy(A).energy_value
    verdict, method, bits = sqrt_sum_squared_le(
        (k ** 3 for k in sizes), mpq(e3 * lhs, len(A) ** 2)
    )
    return Lemma31Check(verdict, lhs, e3, len(A), tuple(sizes), method, bits)


def verify_katz_koester(A) -> IdentityCheck:
    """``E(A, A-A) >= sum_d |A_d| |A - A_d|``; ``holds`` is the inequality."""
    A = _as_set(A)
    D = difference_set(A, A)
    lhs = _energy_value(A, D)
    rhs = sum(len(Ad) * len(difference_set(A, Ad)) for Ad in _slices(A).values())
    return IdentityCheck(lhs >= rhs, lhs, rhs)


@dataclass(frozen=True)
class Corollary5Report:
    holds: bool
    e3: int
    e_diff: int
    size: int
    diff_size: int
    lhs: int
    rhs: Rational
    ratio: Rational

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "lhs": str(self.lhs),
            "rhs": format_rational(self.rhs),
            "ratio": format_rational(self.ratio),
        }


def verify_corollary_5(A) -> Corollary5Report:
    """``E_3(A) E(A, A-A) >= |A|^8 / (16 |A-A|)``.

    The constant 1/16 comes from chaining the popular-difference threshold
    1/2 with the mass bound ``sum_{D'} |A_d| >= |A|^2/2``.
    """
    A = _as_set(A)
    if len(A) < 2:
        raise BadParams("need |A| >= 2")
    D = difference_set(A, A)
    e3 = cubic_energy(A).energy_value
    e_diff = _energy_value(A, D)
    lhs = e3 * e_diff
    rhs = mpq(len(A) ** 8, 16 * len(D))
    return Corollary5Report(lhs >= rhs, e3, e_diff, len(A), len(D), lhs, rhs, lhs / rhs)


def cauchy_schwarz_additive(A, B=None) -> dict:
    """``E(A,B)|A+B| >= |A|^2|B|^2`` and the same with ``A-B``."""
    A = _as_set(A)
    B = A if B is None else _as_set(B)
    e = _energy_value(A, B)
    target = len(A) ** 2 * len(B) ** 2
    return {
        "energy": e,
        "plus": e * len(sumset(A, B)) >= target,
        "minus": e * len(difference_set(A, B)) >= target,
    }


def cauchy_schwarz_multiplicative(A) -> bool:
    """``E_*(A) |A.A| >= |A|^4``."""
    rep = multiplicative_energy(A)
    return rep.slack >= 0
