"""Point-line incidences in C^2 with exact Gaussian-rational lines.

A point is a pair ``(x, y)`` of :class:`GaussianRational`.  Lines are
``y = slope * x + intercept`` or verticals ``x = c``.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from itertools import combinations

from gmpy2 import mpq

from .errors import BadParams, IdentityViolation, NoAdmissibleClass, ZeroElement
from .gaussian import GaussianRational, Rational, format_rational, to_rational
from .sets import FiniteComplexSet, _as_set, difference_set, product_set, representation_counts

__all__ = [
    "LineC",
    "IncidenceCount",
    "WeightedLineFamily",
    "PopularLineSelection",
    "point",
    "incidences",
    "incidences_naive",
    "rich_points",
    "rich_lines",
    "weighted_incidences",
    "translated_family",
    "cap_weights",
    "dyadic_classes",
    "popular_lines",
    "popular_lines_ratio",
    "select_popular_with_N_bound",
    "elekes_family",
    "elekes_containment",
    "intersection_points",
    "popular_point_set",
    "rich_sum_report",
    "weight_distribution_report",
    "log2_bound_holds",
]


def point(x, y) -> tuple:
    return (GaussianRational.coerce(x), GaussianRational.coerce(y))


@dataclass(frozen=True)
class LineC:
    """``y = slope*x + intercept``; ``slope is None`` marks the vertical ``x = intercept``."""

    slope: GaussianRational | None
    intercept: GaussianRational

    @classmethod
    def of(cls, slope, intercept=0) -> LineC:
        return cls(GaussianRational.coerce(slope), GaussianRational.coerce(intercept))

    @classmethod
    def vertical(cls, x) -> LineC:
        return cls(None, GaussianRational.coerce(x))

    @classmethod
    def through(cls, p, slope) -> LineC:
        x, y = p
        if slope is None:
            return cls(None, x)
        slope = GaussianRational.coerce(slope)
        return cls(slope, y - slope * x)

    @classmethod
    def through_points(cls, p, q) -> LineC:
        if p == q:
            raise BadParams("two distinct points define a line")
        if p[0] == q[0]:
            return cls(None, p[0])
        return cls.through(p, (q[1] - p[1]) / (q[0] - p[0]))

    @property
    def is_vertical(self) -> bool:
        return self.slope is None

    def contains(self, p) -> bool:
        x, y = p
        if self.slope is None:
            return x == self.intercept
        return y == self.slope * x + self.intercept

    def intersection(self, other: LineC):
        """The common point, or ``None`` for parallel (or equal) lines."""
        if self.slope == other.slope:
            return None
        if self.slope is None:
            x = self.intercept
            return (x, other.slope * x + other.intercept)
        if other.slope is None:
            x = other.intercept
            return (x, self.slope * x + self.intercept)
        x = (other.intercept - self.intercept) / (self.slope - other.slope)
        return (x, self.slope * x + self.intercept)

    def sort_key(self):
        if self.slope is None:
            return (1, (0, 0), self.intercept.key())
        return (0, self.slope.key(), self.intercept.key())

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def to_record(self, weight: int = 1) -> str:
        f = format_rational
        if self.slope is None:
            return f"V {f(self.intercept.re)} {f(self.intercept.im)} {weight}"
        s, c = self.slope, self.intercept
        return f"{f(s.re)} {f(s.im)} {f(c.re)} {f(c.im)} {weight}"

    def __str__(self):
        if self.slope is None:
            return f"x = {self.intercept}"
        return f"y = ({self.slope})x + ({self.intercept})"


# -- plain incidences ---------------------------------------------------------


@dataclass(frozen=True)
class IncidenceCount:
    total: int
    per_point: Counter
    per_line: Counter


def incidences_naive(points, lines) -> IncidenceCount:
    """Double loop over all point-line pairs; the reference oracle."""
    points, lines = list(dict.fromkeys(points)), list(dict.fromkeys(lines))
    per_point, per_line = Counter(), Counter()
    total = 0
    for p in points:
        for l in lines:
            if l.contains(p):
                total += 1
                per_point[p] += 1
                per_line[l] += 1
    return IncidenceCount(total, per_point, per_line)


class _LineIndex:
    """Lines grouped by slope, then hashed by intercept.

    Keys are raw ``(re, im)`` rational pairs so the inner loop avoids building
    a GaussianRational per (point, slope) probe.
    """

    def __init__(self, lines):
        self.by_slope: list = []
        self.vertical: dict = {}
        tables: dict = defaultdict(dict)
        for l in lines:
            if l.slope is None:
                self.vertical[l.intercept] = l
            else:
                tables[l.slope][(l.intercept.re, l.intercept.im)] = l
        self.by_slope = [(s.re, s.im, table) for s, table in tables.items()]

    def lines_through(self, p):
        x, y = p
        v = self.vertical.get(x)
        if v is not None:
            yield v
        xr, xi, yr, yi = x.re, x.im, y.re, y.im
        for sr, si, table in self.by_slope:
            l = table.get((yr - (sr * xr - si * xi), yi - (sr * xi + si * xr)))
            if l is not None:
                yield l


def incidences(points, lines) -> IncidenceCount:
    """Exact incidence count; hashes lines by (slope, intercept)."""
    points = list(dict.fromkeys(points))
    index = _LineIndex(dict.fromkeys(lines))
    per_point, per_line = Counter(), Counter()
    total = 0
    for p in points:
        for l in index.lines_through(p):
            total += 1
            per_point[p] += 1
            per_line[l] += 1
    return IncidenceCount(total, per_point, per_line)


def rich_points(points, lines, t: int) -> set:
    """Points incident to at least ``t`` of ``lines``."""
    if t < 1:
        raise BadParams("t must be >= 1")
    counts = incidences(points, lines).per_point
    return {p for p, c in counts.items() if c >= t}


def rich_lines(points, lines, t: int) -> set:
    if t < 1:
        raise BadParams("t must be >= 1")
    counts = incidences(points, lines).per_line
    return {l for l, c in counts.items() if c >= t}


# -- weighted families ----------------------------------------------------------


@dataclass(frozen=True)
class WeightedLineFamily:
    weights: dict  # LineC -> positive int
    cap: int | None = None
    slope_count: int | None = None  # |L| for translated families
    point_count: int | None = None  # |Q| for translated families

    @property
    def total_weight(self) -> int:
        return sum(self.weights.values())

    @property
    def max_weight(self) -> int:
        return max(self.weights.values(), default=0)

    @property
    def mean_weight_sq(self) -> Rational | None:
        """``|Q| / |L|``, the square of the reference weight used in dyadic splits."""
        if not self.slope_count:
            return None
        return mpq(self.point_count, self.slope_count)

    def __len__(self):
        return len(self.weights)

    def lines(self):
        return sorted(self.weights)

    def to_text(self) -> str:
        return "".join(l.to_record(self.weights[l]) + "\n" for l in self.lines())

    @classmethod
    def from_text(cls, text: str) -> WeightedLineFamily:
        from .errors import ParseError

        weights = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            body = raw.split("#", 1)[0].split()
            if not body:
                continue
            try:
                if body[0] == "V":
                    if len(body) != 4:
                        raise ParseError("vertical record needs 'V x_re x_im weight'")
                    line = LineC.vertical(GaussianRational(to_rational(body[1]), to_rational(body[2])))
                    w = int(body[3])
                else:
                    if len(body) != 5:
                        raise ParseError("record needs 5 fields")
                    q = [to_rational(b) for b in body[:4]]
                    line = LineC(GaussianRational(q[0], q[1]), GaussianRational(q[2], q[3]))
                    w = int(body[4])
            except (ParseError, ValueError) as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
            if w < 1:
                raise ParseError(f"line {lineno}: weight must be >= 1")
            weights[line] = weights.get(line, 0) + w
        return cls(weights)


def weighted_incidences(points, family: WeightedLineFamily) -> int:
    counts = incidences(points, family.weights).per_line
    return sum(family.weights[l] * c for l, c in counts.items())


def translated_family(slopes, Q) -> WeightedLineFamily:
    """Translate each origin line ``y = l x`` to every point of ``Q``.

    The weight of a resulting line is the number of points of ``Q`` on it.
    """
    slopes = list(dict.fromkeys(GaussianRational.coerce(s) for s in slopes))
    Q = list(dict.fromkeys(Q))
    if not slopes or not Q:
        raise BadParams("need at least one slope and one point")
    weights: Counter = Counter()
    for s in slopes:
        for x, y in Q:
            weights[LineC(s, y - s * x)] += 1
    return WeightedLineFamily(dict(weights), None, len(slopes), len(Q))


def cap_weights(family: WeightedLineFamily, N: int) -> WeightedLineFamily:
    if N < 1:
        raise BadParams("cap must be >= 1")
    capped = WeightedLineFamily(
        {l: min(w, N) for l, w in family.weights.items()},
        N,
        family.slope_count,
        family.point_count,
    )
    if capped.slope_count is not None and capped.total_weight > capped.slope_count * capped.point_count:
        raise IdentityViolation("capped total weight exceeds |L||Q|")
    return capped


# -- popular lines through the origin -------------------------------------------


def log2_bound_holds(value: int, target: Rational, n: int) -> bool:
    """Exact test of ``value >= target / (2 log2 n)`` for integer ``n >= 2``.

    Equivalent to ``n ** (2 value q) >= 2 ** p`` with ``target = p/q``.
    """
    target = mpq(target)
    p, q = int(target.numerator), int(target.denominator)
    if p <= 0:
        return True
    if value <= 0:
        return False
    lhs_bits = 2 * value * q * math.log2(n)
    if lhs_bits > p + 64:
        return True
    if lhs_bits < p - 64:
        return False
    return n ** (2 * value * q) >= 1 << p


def dyadic_classes(counts) -> dict:
    """Split ``l -> n(l)`` into classes ``N/2 < n(l) <= N`` over powers of two ``N``."""
    classes: dict = defaultdict(list)
    for l, c in counts.items():
        classes[1 << (c - 1).bit_length()].append(l)
    return dict(sorted(classes.items()))


@dataclass(frozen=True)
class PopularLineSelection:
    N: int
    lines: FiniteComplexSet  # slopes of the selected origin lines
    energy_contribution: int  # sum of n(l)^2 over the class
    multiplicative_energy: int
    size: int
    classes: tuple = ()  # (N, |L|, |L| N^2, sum n^2) per class
    bound_holds: bool = True

    @property
    def weight(self) -> int:
        return len(self.lines) * self.N ** 2


def _ratio_counts(A):
    A = _as_set(A)
    if A.has_zero():
        raise ZeroElement("popular lines need 0 not in A")
    if len(A) < 2:
        raise BadParams("need |A| >= 2")
    return A, representation_counts(A, A, "ratio")


def _class_table(counts):
    table = []
    for N, ls in dyadic_classes(counts).items():
        table.append((N, len(ls), len(ls) * N * N, sum(counts[l] ** 2 for l in ls)))
    return tuple(table)


def popular_lines(A) -> PopularLineSelection:
    """Dyadic class maximising ``|L| N^2`` (ties to the smaller ``N``)."""
    A, counts = _ratio_counts(A)
    energy = sum(c * c for c in counts.values())
    table = _class_table(counts)
    N, _, weight, contrib = max(table, key=lambda row: (row[2], -row[0]))
    lines = FiniteComplexSet(l for l, c in counts.items() if N // 2 < c <= N)
    holds = log2_bound_holds(weight, mpq(energy), len(A))
    return PopularLineSelection(N, lines, contrib, energy, len(A), table, holds)


@dataclass(frozen=True)
class RatioPopularLines:
    lines: FiniteComplexSet
    threshold: Rational
    supported_points: int
    N: int


def popular_lines_ratio(A) -> RatioPopularLines:
    """Origin lines with ``n(l) >= |A|^2 / (2|A:A|)``."""
    A, counts = _ratio_counts(A)
    thr = mpq(len(A) ** 2, 2 * len(counts))
    chosen = {l: c for l, c in counts.items() if c >= thr}
    return RatioPopularLines(
        FiniteComplexSet(chosen), thr, sum(chosen.values()), max(chosen.values())
    )


@dataclass(frozen=True)
class BoundedSelection:
    selection: PopularLineSelection
    C: Rational
    n_limit: Rational  # C |A-A|^2 |A.A| / |A|^3
    min_admissible_C: Rational | None
    energy_bound_holds: bool  # also satisfies the E_*-based form


def select_popular_with_N_bound(A, C=4) -> BoundedSelection:
    """Dyadic class with ``N <= C |A-A|^2 |A.A| / |A|^3`` carrying at least
    ``|A|^4 / (2 |A.A| log2 |A|)`` of the multiplicative energy in ``|L| N^2``.
    """
    A, counts = _ratio_counts(A)
    C = to_rational(C)
    n = len(A)
    pp = len(product_set(A, A))
    q = mpq(len(difference_set(A, A)) ** 2 * pp, n ** 3)
    target = mpq(n ** 4, pp)
    energy = sum(c * c for c in counts.values())
    table = _class_table(counts)
    good = [row for row in table if log2_bound_holds(row[2], target, n)]
    min_c = min((mpq(row[0]) / q for row in good), default=None)
    admissible = [row for row in good if row[0] <= C * q]
    if not admissible:
        raise NoAdmissibleClass(
            f"no dyadic class with N <= {format_rational(C * q)} meets the energy bound",
            required_c=min_c,
        )
    N, _, weight, contrib = max(admissible, key=lambda row: (row[2], -row[0]))
    lines = FiniteComplexSet(l for l, c in counts.items() if N // 2 < c <= N)
    sel = PopularLineSelection(N, lines, contrib, energy, n, table, True)
    return BoundedSelection(sel, C, C * q, min_c, log2_bound_holds(weight, mpq(energy), n))


# -- Elekes family --------------------------------------------------------------


def elekes_family(A) -> dict:
    """Lines ``y = (d + x) / a`` keyed by ``(d, a)`` in ``(A-A) x A``."""
    A = _as_set(A)
    if A.has_zero():
        raise ZeroElement("Elekes family needs 0 not in A")
    fam = {}
    for d in difference_set(A, A):
        for a in A:
            inv = 1 / a
            fam[(d, a)] = LineC(inv, d * inv)
    if len(set(fam.values())) != len(fam):
        raise IdentityViolation("distinct (d, a) produced the same line")
    return fam


@dataclass(frozen=True)
class ElekesContainment:
    t: int
    rich_ratios: FiniteComplexSet  # L_t = {l : n(l) >= t}
    points_checked: int
    failures: tuple  # points (a, l) on fewer than t family lines

    @property
    def holds(self) -> bool:
        return not self.failures


def elekes_containment(A, t: int, family=None) -> ElekesContainment:
    """Check ``A x L_t`` lies in the set of ``t``-rich points of the Elekes family."""
    A = _as_set(A)
    if t < 1:
        raise BadParams("t must be >= 1")
    fam = elekes_family(A) if family is None else family
    counts = representation_counts(A, A, "ratio")
    Lt = FiniteComplexSet(l for l, c in counts.items() if c >= t)
    pts = [(a, l) for a in A for l in Lt]
    per_point = incidences(pts, fam.values()).per_point
    bad = tuple(p for p in pts if per_point[p] < t)
    return ElekesContainment(t, Lt, len(pts), bad)


# -- intersections and vector sums ------------------------------------------------


def intersection_points(family) -> dict:
    """Pairwise intersections ``x -> m(x)``, the summed weight of lines through ``x``."""
    weights = family.weights if isinstance(family, WeightedLineFamily) else {l: 1 for l in family}
    if len(weights) < 2:
        raise BadParams("need at least two lines")
    through: dict = defaultdict(set)
    for l1, l2 in combinations(weights, 2):
        x = l1.intersection(l2)
        if x is not None:
            through[x].update((l1, l2))
    return {x: sum(weights[l] for l in ls) for x, ls in through.items()}


def popular_point_set(A, lines) -> list:
    """Points of ``A x A`` on the origin lines with the given slopes."""
    A = _as_set(A)
    slopes = set(lines)
    return [(x, y) for x in A for y in A if y / x in slopes]


def _fmt_decimal(d: Decimal) -> str:
    return format(d, ".12g") if d else "0"


def _power_decimal(value, exponent: Decimal) -> Decimal:
    return Decimal(int(value)) ** exponent if value else Decimal(0)


@dataclass
class RichSumReport:
    t: int
    cap: int
    slope_count: int
    point_count: int  # |Q|
    family_size: int
    total_weight: int
    sum_count: int  # |P + Q|
    rich_count: int  # |{x : n(x) >= t}|
    bound_quantity: Decimal  # |L|^{3/2} |Q|^{5/2} / t^3
    max_lines_through_point: int
    nm_violations: list = field(default_factory=list)
    multiplicity_violations: list = field(default_factory=list)
    heavy_single_line: list = field(default_factory=list)

    @property
    def ratio(self) -> Decimal:
        return Decimal(self.rich_count) / self.bound_quantity

    @property
    def exact_ok(self) -> bool:
        return not (self.nm_violations or self.multiplicity_violations or self.heavy_single_line) and (
            self.total_weight <= self.slope_count * self.point_count
        )

    def row(self) -> dict:
        with localcontext() as ctx:
            ctx.prec = 40
            return {
                "t": self.t,
                "count": self.rich_count,
                "bound_quantity": _fmt_decimal(self.bound_quantity),
                "ratio": _fmt_decimal(self.ratio),
            }


def rich_sum_report(P, Q, t: int, slopes=None, cap=None) -> RichSumReport:
    """Vector sums ``P + Q`` against the capped translated family.

    Exact checks: ``n(x) <= m(x)``; at most ``|L|`` family lines through any
    point; ``n(x) > N`` forces two or more lines; ``W <= |L||Q|``.  The count
    of ``t``-rich sums is reported against ``|L|^{3/2}|Q|^{5/2}/t^3`` only.
    """
    P, Q = list(dict.fromkeys(P)), list(dict.fromkeys(Q))
    if len(Q) < len(P):
        raise BadParams("need |Q| >= |P|")
    if t < 1:
        raise BadParams("t must be >= 1")
    if slopes is None:
        slopes = {y / x for x, y in P}
    slopes = list(dict.fromkeys(GaussianRational.coerce(s) for s in slopes))
    if cap is None:
        cap = max(Counter(y / x for x, y in P).values())
    fam = cap_weights(translated_family(slopes, Q), cap)

    n = Counter((p[0] + q[0], p[1] + q[1]) for p in P for q in Q)
    index = _LineIndex(fam.weights)
    through = {x: list(index.lines_through(x)) for x in n}
    rep = RichSumReport(
        t=t,
        cap=cap,
        slope_count=len(slopes),
        point_count=len(Q),
        family_size=len(fam),
        total_weight=fam.total_weight,
        sum_count=len(n),
        rich_count=sum(1 for c in n.values() if c >= t),
        bound_quantity=Decimal(0),
        max_lines_through_point=max(map(len, through.values()), default=0),
    )
    with localcontext() as ctx:
        ctx.prec = 40
        rep.bound_quantity = (
            _power_decimal(len(slopes), Decimal(3) / 2)
            * _power_decimal(len(Q), Decimal(5) / 2)
            / Decimal(t) ** 3
        )
    for x, nx in n.items():
        mx = sum(fam.weights[l] for l in through[x])
        k = len(through[x])
        if nx > mx:
            rep.nm_violations.append((x, nx, mx))
        if k > len(slopes):
            rep.multiplicity_violations.append((x, k))
        if nx > cap and k < 2:
            rep.heavy_single_line.append((x, nx))
    return rep


def weight_distribution_report(family: WeightedLineFamily, ts=None) -> dict:
    """``|L_t|`` and ``W(L_t)`` over dyadic ``t`` with fitted log-log slopes (no verdict)."""
    weights = sorted(family.weights.values())
    top = weights[-1] if weights else 1
    if ts is None:
        ts, t = [], 1
        while t <= top:
            ts.append(t)
            t *= 2
    q = family.point_count or len(weights)
    rows = []
    for t in ts:
        if t < 1:
            raise BadParams("t must be >= 1")
        heavy = [w for w in weights if w >= t]
        rows.append(
            {
                "t": t,
                "count": len(heavy),
                "weight": sum(heavy),
                "count_bound": mpq(q * q, t ** 3),
                "weight_bound": mpq(q * q, t ** 2),
            }
        )

    def slope(key):
        pts = [(math.log2(r["t"]), math.log2(r[key])) for r in rows if r[key] > 0]
        if len(pts) < 2:
            return None
        mx = sum(p[0] for p in pts) / len(pts)
        my = sum(p[1] for p in pts) / len(pts)
        den = sum((p[0] - mx) ** 2 for p in pts)
        return sum((p[0] - mx) * (p[1] - my) for p in pts) / den

    return {"rows": rows, "count_exponent": slope("count"), "weight_exponent": slope("weight")}
