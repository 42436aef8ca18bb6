import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complex_sets, gaussian
from sumprod import FiniteComplexSet, generate
from sumprod.energy import multiplicative_energy
from sumprod.errors import BadParams, NoAdmissibleClass, ParseError, ZeroElement
from sumprod.gaussian import gr
from sumprod.incidence import (
    LineC,
    WeightedLineFamily,
    cap_weights,
    dyadic_classes,
    elekes_containment,
    elekes_family,
    incidences,
    incidences_naive,
    intersection_points,
    log2_bound_holds,
    point,
    popular_lines,
    popular_lines_ratio,
    popular_point_set,
    rich_lines,
    rich_points,
    rich_sum_report,
    select_popular_with_N_bound,
    translated_family,
    weight_distribution_report,
    weighted_incidences,
)


def S(*xs):
    return FiniteComplexSet(xs)


GRID = [point(x, y) for x in range(3) for y in range(3)]
GRID_LINES = [LineC.of(0, c) for c in range(3)] + [LineC.vertical(c) for c in range(3)]


class TestLines:
    def test_through_points(self):
        assert LineC.through_points(point(0, 0), point(1, 1)) == LineC.of(1, 0)
        assert LineC.through_points(point(2, 0), point(2, 5)) == LineC.vertical(2)
        with pytest.raises(BadParams):
            LineC.through_points(point(1, 1), point(1, 1))

    def test_complex_line(self):
        l = LineC.of(gr(0, 1), gr(1, 1))
        assert l.contains(point(gr(1), gr(1, 2)))
        assert not l.contains(point(gr(1), gr(1, 1)))

    def test_intersection(self):
        assert LineC.of(1).intersection(LineC.of(-1)) == point(0, 0)
        assert LineC.of(1).intersection(LineC.of(1, 3)) is None
        assert LineC.vertical(2).intersection(LineC.of(3, 1)) == point(2, 7)

    def test_ordering_is_total(self):
        ls = [LineC.vertical(1), LineC.of(2, 1), LineC.of(gr(0, 1)), LineC.of(2, 0)]
        assert sorted(ls)[-1] == LineC.vertical(1)
        assert sorted(ls)[0] == LineC.of(gr(0, 1))


class TestIncidences:
    def test_examples(self):
        pts = [point(0, 0), point(1, 1)]
        assert incidences(pts, [LineC.of(1), LineC.of(0)]).total == 3
        on_line = [point(k, 2 * k + 1) for k in range(7)]
        assert incidences(on_line, [LineC.of(2, 1)]).total == 7
        assert incidences(GRID, GRID_LINES).total == 18

    def test_rich(self):
        assert rich_points(GRID, GRID_LINES, 2) == set(GRID)
        assert rich_points(GRID, GRID_LINES, 1) == set(GRID)
        assert rich_points(GRID, GRID_LINES, 7) == set()
        assert rich_lines(GRID, GRID_LINES, 3) == set(GRID_LINES)
        assert rich_lines(GRID, GRID_LINES, 4) == set()

    def test_weighted(self):
        unit = WeightedLineFamily({l: 1 for l in GRID_LINES})
        assert weighted_incidences(GRID, unit) == 18
        assert weighted_incidences([point(k, k) for k in range(3)], WeightedLineFamily({LineC.of(1): 5})) == 15
        w = WeightedLineFamily({l: (1 if l.is_vertical else 2) for l in GRID_LINES})
        assert weighted_incidences(GRID, w) == 27

    @given(
        st.lists(st.tuples(gaussian(), gaussian()), max_size=40, unique=True),
        st.lists(
            st.one_of(
                st.builds(LineC, gaussian(), gaussian()),
                st.builds(LineC.vertical, gaussian()),
            ),
            max_size=40,
            unique=True,
        ),
    )
    def test_hash_path_matches_naive(self, pts, lines):
        fast, slow = incidences(pts, lines), incidences_naive(pts, lines)
        assert fast.total == slow.total
        assert fast.per_point == slow.per_point
        assert fast.per_line == slow.per_line

    @given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), max_size=30, unique=True), st.integers(1, 6))
    def test_rich_monotone(self, raw, t):
        pts = [point(x, y) for x, y in raw]
        assert rich_points(pts, GRID_LINES, t + 1) <= rich_points(pts, GRID_LINES, t)
        assert rich_lines(pts, GRID_LINES, t + 1) <= rich_lines(pts, GRID_LINES, t)


class TestTranslatedFamily:
    def test_examples(self):
        fam = translated_family([1], [point(0, 0), point(1, 0)])
        assert fam.weights == {LineC.of(1, 0): 1, LineC.of(1, -1): 1}
        fam = translated_family([1], [point(0, 0), point(1, 1)])
        assert fam.weights == {LineC.of(1, 0): 2}
        fam = translated_family([1, 2, gr(0, 1)], [point(3, 4)])
        assert len(fam) == 3

    def test_empty_inputs(self):
        with pytest.raises(BadParams):
            translated_family([], [point(0, 0)])

    def test_cap(self):
        fam = WeightedLineFamily({LineC.of(1): 5, LineC.of(2): 1})
        assert cap_weights(fam, 3).weights[LineC.of(1)] == 3
        assert cap_weights(fam, 9).weights == fam.weights
        assert cap_weights(fam, 1).total_weight == len(fam)
        with pytest.raises(BadParams):
            cap_weights(fam, 0)

    @given(
        st.lists(gaussian(nonzero=True), min_size=1, max_size=5, unique=True),
        st.lists(st.tuples(gaussian(), gaussian()), min_size=1, max_size=12, unique=True),
        st.integers(1, 5),
    )
    def test_invariants(self, slopes, raw, N):
        Q = [point(*q) for q in raw]
        fam = translated_family(slopes, Q)
        assert len(fam) <= len(slopes) * len(Q)
        assert fam.total_weight == len(slopes) * len(Q)
        capped = cap_weights(fam, N)
        assert capped.max_weight <= N
        assert capped.total_weight <= len(slopes) * len(Q)
        per_point = incidences(Q, capped.weights).per_point
        assert max(per_point.values()) <= len(slopes)

    def test_file_round_trip(self):
        fam = WeightedLineFamily(
            {LineC.of(gr(Fraction(1, 2), -1), gr(3, Fraction(2, 7))): 4, LineC.vertical(gr(1, 1)): 2}
        )
        text = fam.to_text()
        assert "V 1 1 2\n" in text and "1/2 -1 3 2/7 4\n" in text
        assert WeightedLineFamily.from_text(text).weights == fam.weights

    @pytest.mark.parametrize("bad", ["1 2 3\n", "V 1 2\n", "1 0 0 0 0\n", "a 0 0 0 1\n"])
    def test_file_errors(self, bad):
        with pytest.raises(ParseError):
            WeightedLineFamily.from_text(bad)


class TestPopularLines:
    def test_dyadic_example(self):
        sel = popular_lines(S(1, 2, 4))
        assert [(N, size) for N, size, _, _ in sel.classes] == [(1, 2), (2, 2), (4, 1)]
        assert sel.N == 4 and sel.lines == {1}
        assert sel.bound_holds

    def test_ratio_case(self):
        r = popular_lines_ratio(S(1, 2))
        assert r.threshold == Fraction(2, 3)
        assert r.lines == {Fraction(1, 2), 1, 2}
        assert r.supported_points == 4

    def test_dilation(self):
        assert popular_lines(S(gr(2, 1), gr(4, 2))).lines == popular_lines(S(1, 2)).lines

    def test_zero_rejected(self):
        with pytest.raises(ZeroElement):
            popular_lines(S(0, 1))

    @given(complex_sets(min_size=2, max_size=8, nonzero=True))
    def test_class_bracket(self, A):
        sel = popular_lines(A)
        E = multiplicative_energy(A).energy_value
        total = sum(weight for _, _, weight, _ in sel.classes)
        # n(l) in (N/2, N] gives n^2 <= N^2 < 4 n^2
        assert E <= total < 4 * E
        assert sum(contrib for _, _, _, contrib in sel.classes) == E
        assert sel.bound_holds

    @given(complex_sets(min_size=2, max_size=8, nonzero=True))
    def test_ratio_support(self, A):
        r = popular_lines_ratio(A)
        assert 2 * r.supported_points >= len(A) ** 2

    def test_dyadic_classes(self):
        classes = dyadic_classes({"a": 1, "b": 2, "c": 3, "d": 4, "e": 5})
        assert classes == {1: ["a"], 2: ["b"], 4: ["c", "d"], 8: ["e"]}


class TestLog2Bound:
    def test_exact(self):
        # value >= target / (2 log2 n) with n = 4: target / 4
        assert log2_bound_holds(4, 16, 4)
        assert not log2_bound_holds(3, 16, 4)
        assert log2_bound_holds(1, 0, 5)
        assert not log2_bound_holds(0, 1, 5)

    @given(st.integers(0, 200), st.fractions(min_value=0, max_value=1000, max_denominator=50), st.integers(2, 64))
    def test_matches_float_away_from_ties(self, value, target, n):
        import math

        rhs = float(target) / (2 * math.log2(n))
        if abs(value - rhs) < 1e-9:
            return
        assert log2_bound_holds(value, target, n) == (value >= rhs)


class TestBoundedSelection:
    def test_ap(self):
        res = select_popular_with_N_bound(generate("arithmetic", n=8), C=1)
        assert res.min_admissible_C == Fraction(256, 3375)
        assert res.selection.N <= res.n_limit

    def test_gp(self):
        res = select_popular_with_N_bound(generate("geometric", n=4))
        assert res.min_admissible_C == Fraction(256, 1183)

    def test_pair(self):
        res = select_popular_with_N_bound(S(1, 2))
        assert res.selection.N in (1, 2)
        assert res.min_admissible_C == Fraction(16, 27)

    def test_no_admissible_class(self):
        with pytest.raises(NoAdmissibleClass) as info:
            select_popular_with_N_bound(S(1, 2), C=Fraction(1, 2))
        assert info.value.required_c == Fraction(16, 27)


class TestElekes:
    def test_pair(self):
        fam = elekes_family(S(1, 2))
        assert len(fam) == 6
        assert fam[(gr(0), gr(1))].contains(point(1, 1))
        assert fam[(gr(1), gr(2))].contains(point(1, 1))
        assert elekes_containment(S(1, 2), 2).holds

    def test_singleton(self):
        assert len(elekes_family(S(5))) == 1

    def test_zero_rejected(self):
        with pytest.raises(ZeroElement):
            elekes_family(S(0, 1))

    @given(complex_sets(min_size=2, max_size=6, nonzero=True), st.sampled_from([1, 2, 3, 4]))
    def test_containment(self, A, t):
        chk = elekes_containment(A, t)
        assert chk.holds


class TestIntersections:
    def test_examples(self):
        assert intersection_points([LineC.of(1), LineC.of(-1)]) == {point(0, 0): 2}
        assert intersection_points([LineC.of(1), LineC.of(1, 1)]) == {}
        pts = intersection_points([LineC.of(1), LineC.of(0), LineC.vertical(1)])
        assert pts == {point(0, 0): 2, point(1, 1): 2, point(1, 0): 2}

    def test_needs_two_lines(self):
        with pytest.raises(BadParams):
            intersection_points([LineC.of(1)])


class TestRichSums:
    def test_pair(self):
        A = S(1, 2)
        r = popular_lines_ratio(A)
        P = popular_point_set(A, r.lines)
        rep = rich_sum_report(P, P, 1)
        assert rep.exact_ok
        assert rep.rich_count == rep.sum_count

    def test_large_t(self):
        A = S(1, 2, 3)
        P = popular_point_set(A, popular_lines_ratio(A).lines)
        assert rich_sum_report(P, P, len(P) + 1).rich_count == 0

    def test_needs_larger_q(self):
        with pytest.raises(BadParams):
            rich_sum_report([point(1, 1), point(1, 2)], [point(1, 1)], 1)

    @pytest.mark.parametrize("seed", range(6))
    def test_translated_contracts(self, seed):
        A = generate("random", n=7, seed=seed, height=3)
        sel = popular_lines(A)
        P = popular_point_set(A, sel.lines)
        Q = [(-x, -y) for x, y in P]
        rep = rich_sum_report(P, Q, sel.N, slopes=sel.lines, cap=sel.N)
        assert rep.exact_ok
        assert rep.max_lines_through_point <= len(sel.lines)


class TestWeightDistribution:
    def test_unit_weights(self):
        rep = weight_distribution_report(WeightedLineFamily({l: 1 for l in GRID_LINES}), ts=[1, 2, 4])
        assert [r["count"] for r in rep["rows"]] == [6, 0, 0]

    def test_single_line(self):
        rep = weight_distribution_report(WeightedLineFamily({LineC.of(1): 1}))
        assert len(rep["rows"]) == 1 and rep["count_exponent"] is None

    def test_ap_square_tail_is_monotone(self):
        A = generate("arithmetic", n=4)
        pts = [point(x, y) for x in A for y in A]
        fam = translated_family([1, 2, Fraction(1, 2), 3], pts)
        rows = weight_distribution_report(fam)["rows"]
        counts = [r["count"] for r in rows]
        assert counts == sorted(counts, reverse=True) and counts[0] == len(fam)


def test_random_instances_hash_equals_naive():
    from sumprod.lab import incidence_oracle_check, random_incidence_instance

    rng = random.Random(3)
    for _ in range(20):
        assert incidence_oracle_check(*random_incidence_instance(rng, 80, 80))
