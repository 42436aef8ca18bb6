"""Brute-force reference implementations, independent of the package code.

Complex numbers are ``(Fraction, Fraction)`` tuples; nothing here imports
:mod:`sumprod` arithmetic.
"""

from fractions import Fraction
from itertools import product


def c(z):
    if isinstance(z, tuple):
        return (Fraction(z[0]), Fraction(z[1]))
    z = complex(z)
    return (Fraction(z.real), Fraction(z.imag))


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def mul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def div(a, b):
    n = b[0] ** 2 + b[1] ** 2
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def cset(items):
    return {c(z) for z in items}


def image(A, B, op):
    return {op(a, b) for a in cset(A) for b in cset(B)}


def energy(A, B):
    """Quadruples with a1 - a2 == b1 - b2."""
    A, B = list(cset(A)), list(cset(B))
    return sum(1 for a1, a2, b1, b2 in product(A, A, B, B) if sub(a1, a2) == sub(b1, b2))


def mult_energy(A):
    A = list(cset(A))
    return sum(1 for a1, a2, a3, a4 in product(A, repeat=4) if mul(a1, a4) == mul(a2, a3))


def cubic_energy(A):
    """Sextuples with a1-a2 == a3-a4 == a5-a6."""
    A = list(cset(A))
    diffs = [sub(a, b) for a, b in product(A, A)]
    return sum(1 for d1, d2, d3 in product(diffs, repeat=3) if d1 == d2 == d3)


def slice_of(A, d):
    A = cset(A)
    d = c(d)
    return {a for a in A if add(a, d) in A}


def katz_koester_rhs(A):
    A = cset(A)
    D = image(A, A, sub)
    return sum(len(slice_of(A, d)) * len(image(A, slice_of(A, d), sub)) for d in D)


def squared_distance(p, q):
    p, q = c(p), c(q)
    return (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2


def mst_weight_bruteforce(points):
    """Enumerate every (n-1)-edge subset of a tiny point set and keep the
    spanning tree of least total Euclidean length (float lengths)."""
    import itertools
    import math

    pts = [c(p) for p in points]
    n = len(pts)
    edges = list(itertools.combinations(range(n), 2))
    best, best_set = None, None
    for subset in itertools.combinations(edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if not ok:
            continue
        total = sum(math.sqrt(float(squared_distance(pts[i], pts[j]))) for i, j in subset)
        if best is None or total < best - 1e-12:
            best, best_set = total, subset
    return best, set(best_set)
