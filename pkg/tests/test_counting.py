import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocurrents.counting import (
    ManhattanSample,
    build_spectrum,
    complete_length,
    convexity_check,
    correlation_count,
    correlation_exponent,
    correlation_sweep,
    manhattan_endpoints,
    manhattan_estimate,
    table_entropy,
)
from geocurrents.currents import Atomic, Liouville
from geocurrents.errors import BudgetExceeded, DegenerateCurve, SignedNotAllowed, WindowTooSmall
from geocurrents.spectra import stable_length
from geocurrents.surface_group import enumerate_classes, fuchsian_rep, twisted_rep

REP = fuchsian_rep(2)
L = Liouville(REP)
T = Liouville(twisted_rep(2))
ATOM = Atomic.from_words({"a1 b1 A1 b1": 1.0})


@pytest.fixture(scope="module")
def table7():
    return build_spectrum([L, L, T, 2.0 * L], 7)


class TestSpectrum:
    def test_length_one(self):
        t = build_spectrum([L], 1)
        assert len(t) == 8
        assert np.all(t.word_len == 1)
        assert np.ptp(t.column(0)) < 1e-12

    def test_rows_are_the_classes(self):
        t = build_spectrum([L], 4)
        assert [t.conj_class(r) for r in range(len(t))] == enumerate_classes(4)

    def test_lengths_match_traces(self):
        t = build_spectrum([L, T], 4)
        for r in range(0, len(t), 7):
            w = t.word(r)
            assert t.lengths[r, 0] == pytest.approx(REP.length(w), rel=1e-10)
            assert t.lengths[r, 1] == pytest.approx(T.rep.length(w), rel=1e-10)

    def test_atomic_column(self):
        t = build_spectrum([ATOM], 3)
        for r in range(len(t)):
            assert t.lengths[r, 0] == stable_length(ATOM, t.conj_class(r))

    def test_no_currents(self):
        t = build_spectrum([], 3)
        assert t.lengths.shape == (len(enumerate_classes(3)), 0)

    def test_scaling(self, table7):
        assert np.array_equal(table7.column(3), 2.0 * table7.column(0))

    def test_signed(self):
        with pytest.raises(SignedNotAllowed):
            build_spectrum([L - ATOM], 2)

    def test_atomic_row_cap(self):
        with pytest.raises(BudgetExceeded):
            build_spectrum([ATOM], 8)

    def test_bad_max_len(self):
        with pytest.raises(ValueError):
            build_spectrum([L], 0)

    def test_shells_sorted(self, table7):
        assert np.all(np.diff(table7.word_len) >= 0)
        sl = table7.shell(3)
        assert np.all(table7.word_len[sl] == 3)

    def test_csv(self):
        text = build_spectrum([L], 2).to_csv()
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["class", "word_len", "length_0"]
        assert len(rows) == 1 + 40

    def test_cache_round_trip(self, tmp_path):
        a = build_spectrum([L, T], 5, cache=tmp_path)
        assert len(list(tmp_path.glob("spectrum-*.npz"))) == 1
        b = build_spectrum([L, T], 5, cache=tmp_path)
        assert np.array_equal(a.keys, b.keys) and np.array_equal(a.lengths, b.lengths)

    def test_cache_key_depends_on_structure(self, tmp_path):
        build_spectrum([L], 3, cache=tmp_path)
        build_spectrum([T], 3, cache=tmp_path)
        assert len(list(tmp_path.glob("spectrum-*.npz"))) == 2

    def test_table_entropy(self, table7):
        assert table_entropy(table7, 3).value == pytest.approx(table_entropy(table7, 0).value / 2, rel=1e-9)


class TestCorrelationCount:
    def test_empty_table(self):
        t = build_spectrum([L], 3)
        t.keys, t.word_len, t.lengths = t.keys[:0], t.word_len[:0], t.lengths[:0]
        assert correlation_count(t, 0, 0, 1.0, 1.0, 1.0, 1.0) == 0

    def test_diagonal(self, table7):
        col = table7.column(0)
        expect = np.count_nonzero((col > 5.0) & (col <= 6.0))
        assert correlation_count(table7, 0, 1, 5.0, 1.0, 1.0, 1.0) == expect

    @settings(max_examples=40, deadline=None)
    @given(st.floats(2.0, 9.0), st.floats(0.05, 2.0), st.floats(0.05, 2.0))
    def test_windows_add(self, table7, x, e1, e2):
        # identical columns: (x, x+e1] and (x+e1, x+e1+e2] partition the union
        whole = correlation_count(table7, 0, 1, x, e1 + e2, 1.0, 1.0)
        left = correlation_count(table7, 0, 1, x, e1, 1.0, 1.0)
        right = correlation_count(table7, 0, 1, x + e1, e2, 1.0, 1.0)
        assert left + right == whole

    @settings(max_examples=20, deadline=None)
    @given(st.floats(2.0, 8.0), st.floats(0.1, 1.5))
    def test_scale_covariant(self, table7, x, eps):
        # column 3 is 2 l: entropy 1/2 on it gives the same normalized lengths,
        # and eps is measured in unnormalized length on both columns
        a = correlation_count(table7, 0, 1, x, eps, 1.0, 1.0)
        b = correlation_count(table7, 3, 3, x, 2 * eps, 0.5, 0.5)
        assert a == b

    def test_bad_entropy(self, table7):
        with pytest.raises(ValueError):
            correlation_count(table7, 0, 1, 1.0, 1.0, 0.0, 1.0)

    def test_sweep_below_completeness(self, table7):
        fit = correlation_sweep(table7, 0, 2, 1.0, 1.0, 1.0)
        cap = min(complete_length(table7, 0), complete_length(table7, 2)) - 1.0
        assert fit.xs.max() <= cap + 1e-12
        assert np.all(fit.counts >= 0) and fit.C > 0
        assert fit.to_csv().splitlines()[0] == "x,count,fitted"

    def test_sweep_window_too_small(self):
        t = build_spectrum([L], 3)
        with pytest.raises(WindowTooSmall):
            correlation_sweep(t, 0, 0, 1.0, 1.0, 50.0)


class TestManhattan:
    GRID = np.linspace(0.0, 1.0, 9)

    def test_identical_columns_line(self, table7):
        ms = manhattan_estimate(table7, 0, 1, self.GRID)
        assert ms.h1 == pytest.approx(ms.h2, abs=1e-6)
        for a, b in ms.points:
            assert a + b == pytest.approx(ms.h1, abs=1e-6)
        r = correlation_exponent(ms)
        assert r["M"] == pytest.approx(1.0, abs=1e-6)
        assert r["degenerate"]

    def test_nonincreasing(self, table7):
        ms = manhattan_estimate(table7, 0, 2, self.GRID)
        bs = [b for _, b in ms.points]
        assert all(x > y for x, y in zip(bs, bs[1:]))

    def test_distinct_structures(self, table7):
        ms = manhattan_estimate(table7, 0, 2, self.GRID)
        r = correlation_exponent(ms)
        assert not r["degenerate"]
        assert 0.9 < r["M"] <= 1.0
        assert r["tangent_slope"] == pytest.approx(r["target_slope"], abs=1e-9)
        assert convexity_check(ms).verdict == "pass"

    def test_scaled_column(self, table7):
        # doubling a current halves its axis of the curve
        e1 = manhattan_endpoints(table7, 0, 2)
        e2 = manhattan_endpoints(table7, 3, 2)
        assert e2["a_at_b0"] == pytest.approx(e1["a_at_b0"] / 2, abs=1e-6)
        assert e2["b_at_a0"] == pytest.approx(e1["b_at_a0"], abs=1e-6)

    def test_window_too_small(self):
        with pytest.raises(WindowTooSmall):
            manhattan_estimate(build_spectrum([L, T], 5), 0, 1, self.GRID)

    def test_csv(self, table7):
        text = manhattan_estimate(table7, 0, 2, self.GRID[:3]).to_csv()
        assert text.splitlines()[0] == "a,b,residual"
        assert len(text.splitlines()) == 4


def _sample(points):
    return ManhattanSample(points, 1.0, 1.0, [{"residual": 0.0, "b_uncertainty": 0.0}] * len(points))


class TestConvexity:
    def test_convex_passes(self):
        pts = [(a, 1 - a + 0.2 * (a - 0.5) ** 2) for a in np.linspace(0, 1, 7)]
        assert convexity_check(_sample(pts)).verdict == "pass"

    def test_bump_fails(self):
        pts = [(a, 1 - a) for a in np.linspace(0, 1, 7)]
        pts[3] = (pts[3][0], pts[3][1] + 0.05)
        r = convexity_check(_sample(pts))
        assert r.verdict == "fail"
        assert r.violations[0]["a"] == pytest.approx(0.5)

    def test_two_points(self):
        assert convexity_check(_sample([(0, 1), (1, 0)])).verdict == "inconclusive"

    def test_exponent_needs_five_points(self):
        with pytest.raises(DegenerateCurve):
            correlation_exponent(_sample([(0, 1), (0.5, 0.5), (1, 0)]))

    def test_exponent_of_circle_arc(self):
        # b = 1 - sqrt(1 - (1 - a)^2) near a = 1 - 1/sqrt(2) has slope -1
        a = np.linspace(0.1, 0.5, 9)
        b = 1 - np.sqrt(1 - (1 - a) ** 2)
        r = correlation_exponent(_sample(list(zip(a, b))))
        a_star = 1 - 1 / math.sqrt(2)
        assert r["a"] == pytest.approx(a_star, abs=2e-3)
        assert r["M"] == pytest.approx(a_star + 1 - math.sqrt(1 - (1 - a_star) ** 2), abs=2e-3)
