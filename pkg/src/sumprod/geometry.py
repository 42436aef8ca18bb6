"""Meniscus/rhombus geometry over the ratio set and its Euclidean MST.

Plane points are :class:`GaussianRational` values read as ``(re, im)``.
Every predicate here is decided with exact rational arithmetic.
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from gmpy2 import mpq

from .errors import (
    BadParams,
    DegenerateEdge,
    DuplicatePoints,
    IdentityViolation,
    PoleAtMinusOne,
    SectorViolation,
    ZeroDenominator,
)
from .gaussian import GaussianRational, Rational, format_rational, to_rational
from .sets import _as_set, ratio_set, sector_check, sumset

PlanarPoint = GaussianRational

DEFAULT_EPSILON = mpq(1, 100)
_I = GaussianRational(0, 1)

__all__ = [
    "PlanarPoint",
    "DEFAULT_EPSILON",
    "Meniscus",
    "Rhombus",
    "SpanningTree",
    "MSTReport",
    "ClaimReport",
    "mobius_point",
    "in_wedge",
    "meniscus_contains",
    "rhombus_of_edge",
    "rhombus_contains",
    "rhombi_disjoint",
    "meniscus_boundary_samples",
    "meniscus_inside_rhombus",
    "orientation",
    "segments_cross",
    "euclidean_mst",
    "verify_mst_properties",
    "angle_tan_bound_holds",
    "sum_image",
    "verify_claim",
]


def _pt(p) -> GaussianRational:
    return GaussianRational.coerce(p)


def _dot(u: GaussianRational, v: GaussianRational) -> Rational:
    return u.re * v.re + u.im * v.im


def _cross(u: GaussianRational, v: GaussianRational) -> Rational:
    return u.re * v.im - u.im * v.re


def orientation(a, b, c) -> int:
    """Sign of the turn ``a -> b -> c``: 1 left, -1 right, 0 collinear."""
    s = _cross(b - a, c - a)
    return (s > 0) - (s < 0)


# -- Moebius map and the meniscus -------------------------------------------


def mobius_point(u) -> GaussianRational:
    """``u / (1 + u)``."""
    u = _pt(u)
    den = u + 1
    if not den:
        raise PoleAtMinusOne("u = -1 is the pole of z/(1+z)")
    return u / den


def in_wedge(u, eps) -> bool:
    """``tan|arg u| < eps``, i.e. ``re u > 0`` and ``|im u| < eps re u``."""
    u = _pt(u)
    return u.re > 0 and abs(u.im) < to_rational(eps) * u.re


def _in_unit_meniscus(w: GaussianRational, eps: Rational) -> bool:
    # open discs centred (1/2, +-1/(2 eps)) with radius^2 = 1/4 + 1/(4 eps^2)
    c = 1 / (2 * eps)
    r2 = mpq(1, 4) + c * c
    dx = w.re - mpq(1, 2)
    return dx * dx + (w.im - c) ** 2 < r2 and dx * dx + (w.im + c) ** 2 < r2


@dataclass(frozen=True)
class Meniscus:
    """The open lens ``l1 + (l2 - l1) M_eps``."""

    l1: GaussianRational
    l2: GaussianRational
    eps: Rational = DEFAULT_EPSILON

    def __post_init__(self):
        object.__setattr__(self, "l1", _pt(self.l1))
        object.__setattr__(self, "l2", _pt(self.l2))
        object.__setattr__(self, "eps", to_rational(self.eps))
        if self.l1 == self.l2:
            raise DegenerateEdge("meniscus needs l1 != l2")
        if self.eps <= 0:
            raise BadParams("epsilon must be positive")

    def normalise(self, z) -> GaussianRational:
        """Pull ``z`` back to the unit frame where ``l1 -> 0`` and ``l2 -> 1``."""
        return (_pt(z) - self.l1) / (self.l2 - self.l1)

    def place(self, w) -> GaussianRational:
        return self.l1 + (self.l2 - self.l1) * _pt(w)

    def __contains__(self, z):
        return _in_unit_meniscus(self.normalise(z), self.eps)


def meniscus_contains(M: Meniscus, z) -> bool:
    return z in M


# -- rhombi -------------------------------------------------------------------


@dataclass(frozen=True)
class Rhombus:
    v_major_1: GaussianRational
    v_major_2: GaussianRational
    v_minor_1: GaussianRational
    v_minor_2: GaussianRational

    @property
    def polygon(self) -> tuple:
        """Vertices in counter-clockwise order."""
        return (self.v_major_1, self.v_minor_1, self.v_major_2, self.v_minor_2)

    def bbox(self):
        xs = [p.re for p in self.polygon]
        ys = [p.im for p in self.polygon]
        return min(xs), max(xs), min(ys), max(ys)

    def to_json(self) -> list:
        return [[format_rational(p.re), format_rational(p.im)] for p in self.polygon]


def rhombus_of_edge(l1, l2, eps=DEFAULT_EPSILON) -> Rhombus:
    """Open rhombus with major diagonal ``[l1, l2]`` and minor diagonal ``eps |l2 - l1|``."""
    l1, l2 = _pt(l1), _pt(l2)
    eps = to_rational(eps)
    if l1 == l2:
        raise DegenerateEdge("rhombus needs l1 != l2")
    mid = (l1 + l2) * mpq(1, 2)
    half = _I * (l2 - l1) * (eps / 2)
    # mid - half lies to the right of l1 -> l2, so this order is ccw
    return Rhombus(l1, l2, mid - half, mid + half)


def rhombus_contains(R: Rhombus, p, strict: bool = True) -> bool:
    p = _pt(p)
    poly = R.polygon
    for a, b in zip(poly, poly[1:] + poly[:1]):
        s = _cross(b - a, p - a)
        if s < 0 or (strict and s == 0):
            return False
    return True


def _axes(poly):
    for a, b in zip(poly, poly[1:] + poly[:1]):
        e = b - a
        yield GaussianRational(-e.im, e.re)


def rhombi_disjoint(R1: Rhombus, R2: Rhombus) -> bool:
    """Separating-axis test for the OPEN rhombi; touching boundaries count as disjoint."""
    a0, a1, b0, b1 = R1.bbox()
    c0, c1, d0, d1 = R2.bbox()
    if a1 <= c0 or c1 <= a0 or b1 <= d0 or d1 <= b0:
        return True
    P, Q = R1.polygon, R2.polygon
    for axis in (*_axes(P), *_axes(Q)):
        p = [_dot(axis, v) for v in P]
        q = [_dot(axis, v) for v in Q]
        if max(p) <= min(q) or max(q) <= min(p):
            return True
    return False


def meniscus_boundary_samples(M: Meniscus, samples: int) -> list:
    """Exact rational points on the boundary arcs of ``M``.

    Images of ``r (1 +- i eps)`` for ``r`` spread over ``(0, inf)``: the
    boundary rays of the wedge map onto the two arcs.
    """
    pts = []
    for k in range(1, samples + 1):
        r = mpq(k, samples + 1 - k)
        for sign in (1, -1):
            u = GaussianRational(r, sign * r * M.eps)
            pts.append(M.place(mobius_point(u)))
    return pts


def meniscus_inside_rhombus(M: Meniscus, R: Rhombus, samples: int = 64) -> bool:
    """Sampled containment check of the meniscus in the open rhombus (validation aid, not proof)."""
    if samples <= 0:
        warnings.warn("meniscus_inside_rhombus called with no samples; vacuously true")
        return True
    if not rhombus_contains(R, M.place(mpq(1, 2))):
        return False
    return all(rhombus_contains(R, p) for p in meniscus_boundary_samples(M, samples))


# -- segments and the MST ---------------------------------------------------


def segments_cross(p1, p2, q1, q2) -> bool:
    """Do the OPEN segments ``(p1, p2)`` and ``(q1, q2)`` share a point?"""
    p1, p2, q1, q2 = map(_pt, (p1, p2, q1, q2))
    o1, o2 = orientation(p1, p2, q1), orientation(p1, p2, q2)
    o3, o4 = orientation(q1, q2, p1), orientation(q1, q2, p2)
    if o1 == 0 and o2 == 0:
        # collinear: overlap of positive length along the common line
        d = p2 - p1
        t1, t2 = _dot(q1 - p1, d), _dot(q2 - p1, d)
        lo, hi = max(min(t1, t2), 0), min(max(t1, t2), _dot(d, d))
        return lo < hi
    return o1 * o2 < 0 and o3 * o4 < 0


@dataclass(frozen=True)
class SpanningTree:
    vertices: tuple
    edges: tuple  # (i, j) with i < j, in insertion order
    certificate: tuple  # (squared length, i, j) for each accepted edge, in order
    tied_lengths: frozenset = frozenset()

    def edge_points(self):
        for i, j in self.edges:
            yield self.vertices[i], self.vertices[j]


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def euclidean_mst(points) -> SpanningTree:
    """Kruskal over exact squared distances, ties broken by ``(length^2, i, j)``."""
    pts = tuple(_pt(p) for p in points)
    if len(pts) < 2:
        raise BadParams("MST needs at least two points")
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("points passed to euclidean_mst must be distinct")
    cand = sorted(((pts[i] - pts[j]).norm(), i, j) for i, j in combinations(range(len(pts)), 2))
    seen, tied = set(), set()
    for w, _, _ in cand:
        if w in seen:
            tied.add(w)
        seen.add(w)
    parent = list(range(len(pts)))
    edges, cert = [], []
    for w, i, j in cand:
        ri, rj = _find(parent, i), _find(parent, j)
        if ri == rj:
            continue
        parent[ri] = rj
        edges.append((i, j))
        cert.append((w, i, j))
        if len(edges) == len(pts) - 1:
            break
    return SpanningTree(pts, tuple(edges), tuple(cert), frozenset(tied))


@dataclass
class MSTReport:
    crossings: list = field(default_factory=list)
    small_angles: list = field(default_factory=list)
    disc_violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.crossings or self.small_angles or self.disc_violations)


def verify_mst_properties(T: SpanningTree) -> MSTReport:
    """Non-crossing edges, angles of at least pi/3 between adjacent edges, and
    no vertex strictly inside the disc on an edge as diameter.

    Violations are collected, each with a ``tie`` flag set when one of the
    edges involved has a squared length shared by another vertex pair.
    """
    V, E = T.vertices, T.edges
    length = {e: (V[e[0]] - V[e[1]]).norm() for e in E}

    def tie(*es):
        return any(length[e] in T.tied_lengths for e in es)

    rep = MSTReport()
    for e, f in combinations(E, 2):
        if set(e) & set(f):
            continue
        if segments_cross(V[e[0]], V[e[1]], V[f[0]], V[f[1]]):
            rep.crossings.append({"edges": [e, f], "tie": tie(e, f)})

    incident = defaultdict(list)
    for e in E:
        incident[e[0]].append(e)
        incident[e[1]].append(e)
    for a, es in incident.items():
        for e, f in combinations(es, 2):
            u = V[e[0] + e[1] - a] - V[a]
            v = V[f[0] + f[1] - a] - V[a]
            d = _dot(u, v)
            if d > 0 and 4 * d * d > u.norm() * v.norm():
                rep.small_angles.append({"vertex": a, "edges": [e, f], "tie": tie(e, f)})

    for e in E:
        A, B = V[e[0]], V[e[1]]
        for k, C in enumerate(V):
            if k in e:
                continue
            if _dot(C - A, C - B) < 0:
                rep.disc_violations.append({"edge": e, "vertex": k, "tie": tie(e)})
    return rep


def angle_tan_bound_holds(p1, p2, q1, q2, eps=DEFAULT_EPSILON) -> bool:
    """``tan(angle between lines p1p2 and q1q2) <= 2 eps / (1 - eps^2)``."""
    p1, p2, q1, q2 = map(_pt, (p1, p2, q1, q2))
    eps = to_rational(eps)
    u, v = p2 - p1, q2 - q1
    d, c = _dot(u, v), _cross(u, v)
    if d == 0:
        return False
    bound = 2 * eps / (1 - eps * eps)
    return c * c <= bound * bound * d * d


# -- the sum-image map --------------------------------------------------------


def sum_image(x1, y1, x2, y2) -> GaussianRational:
    """``(y1 + y2) / (x1 + x2)``, cross-checked against ``l1 + (l2 - l1) u/(1+u)``."""
    x1, y1, x2, y2 = map(_pt, (x1, y1, x2, y2))
    den = x1 + x2
    if not den:
        raise ZeroDenominator("x1 + x2 = 0")
    z = (y1 + y2) / den
    l1, l2 = y1 / x1, y2 / x2
    via = l1 + (l2 - l1) * mobius_point(x2 / x1)
    if via != z:
        raise IdentityViolation(f"sum image {z} != l1 + (l2-l1)u/(1+u) = {via}")
    return z


@dataclass
class ClaimReport:
    size: int
    epsilon: Rational
    vertex_count: int
    edges: list
    sum_of_products: int
    sumset_size: int
    images_checked: int = 0
    rhombus_pairs_checked: int = 0
    mst: MSTReport = field(default_factory=MSTReport)
    rhombus_overlaps: list = field(default_factory=list)
    containment_failures: list = field(default_factory=list)
    meniscus_misses: list = field(default_factory=list)
    collisions: list = field(default_factory=list)

    @property
    def count_holds(self) -> bool:
        return self.sumset_size ** 2 >= self.sum_of_products

    @property
    def passed(self) -> bool:
        return (
            self.mst.passed
            and not self.rhombus_overlaps
            and not self.containment_failures
            and not self.meniscus_misses
            and not self.collisions
            and self.count_holds
        )

    def to_json(self) -> dict:
        def p(z):
            return [format_rational(z.re), format_rational(z.im)]

        return {
            "passed": self.passed,
            "size": self.size,
            "epsilon": format_rational(self.epsilon),
            "vertex_count": self.vertex_count,
            "edge_count": len(self.edges),
            "edges": [[p(a), p(b)] for a, b in self.edges],
            "sum_of_products": str(self.sum_of_products),
            "sumset_size_squared": str(self.sumset_size ** 2),
            "images_checked": self.images_checked,
            "rhombus_pairs_checked": self.rhombus_pairs_checked,
            "violations": {
                "crossings": self.mst.crossings,
                "small_angles": self.mst.small_angles,
                "disc": self.mst.disc_violations,
                "rhombus_overlaps": [[p(a), p(b), p(c), p(d)] for (a, b), (c, d) in self.rhombus_overlaps],
                "containment": [[p(a), p(b)] for a, b in self.containment_failures],
                "meniscus": [[p(z) for z in item] for item in self.meniscus_misses],
                "collisions": [[p(z) for z in item] for item in self.collisions],
            },
        }


def _realisations(A) -> dict:
    """``l -> [(x, y), ...]`` with ``y / x == l`` over ``x, y`` in ``A``."""
    out = defaultdict(list)
    for x in A:
        for y in A:
            out[y / x].append((x, y))
    return out


def verify_claim(A, eps=DEFAULT_EPSILON, popular: bool = False, samples: int = 16) -> ClaimReport:
    """Build the MST over ``A:A`` (or its popular part) and check every piece
    of the disjoint-menisci construction exactly.
    """
    A = _as_set(A)
    eps = to_rational(eps)
    if not sector_check(A, eps):
        raise SectorViolation(f"A is not inside the sector |tan(2 arg z)| < {format_rational(eps)}")
    real = _realisations(A)
    if popular:
        thr = mpq(len(A) ** 2, 2 * len(real))
        verts = sorted((l for l, r in real.items() if len(r) >= thr), key=GaussianRational.key)
    else:
        verts = sorted(real, key=GaussianRational.key)
    if len(verts) < 2:
        raise BadParams("the vertex set needs at least two ratios")

    T = euclidean_mst(verts)
    edges = list(T.edge_points())
    sums = sumset(A, A)
    rep = ClaimReport(
        size=len(A),
        epsilon=eps,
        vertex_count=len(verts),
        edges=edges,
        sum_of_products=sum(len(real[a]) * len(real[b]) for a, b in edges),
        sumset_size=len(sums),
    )
    rep.mst = verify_mst_properties(T)

    rhombi = [rhombus_of_edge(a, b, eps) for a, b in edges]
    for (e, R), (f, S) in combinations(zip(edges, rhombi), 2):
        rep.rhombus_pairs_checked += 1
        if not rhombi_disjoint(R, S):
            rep.rhombus_overlaps.append((e, f))
    for e, R in zip(edges, rhombi):
        if not meniscus_inside_rhombus(Meniscus(e[0], e[1], eps), R, samples):
            rep.containment_failures.append(e)

    seen: dict = {}
    for a, b in edges:
        M = Meniscus(a, b, eps)
        for x1, y1 in real[a]:
            for x2, y2 in real[b]:
                z = sum_image(x1, y1, x2, y2)
                rep.images_checked += 1
                if z not in M:
                    rep.meniscus_misses.append((a, b, x1, y1, x2, y2))
                key = (x1 + x2, y1 + y2)
                prev = seen.setdefault(key, (a, b, x1, y1, x2, y2))
                if prev != (a, b, x1, y1, x2, y2):
                    rep.collisions.append(prev + (x1, y1, x2, y2))
    return rep
