import math
import random

import numpy as np
import pytest
from hypothesis import given, settings

from geocurrents.currents import Atomic, LiftedAtomic, Liouville
from geocurrents.errors import DegenerateSpectrum, SignedNotAllowed
from geocurrents.hyperbolic_plane import (
    Geodesic,
    PlanePoint,
    axis,
    geodesic_frame,
    halfplane_to_disk,
    hyp_distance,
    point_on_geodesic,
)
from geocurrents.spectra import (
    LengthAssignment,
    cover_intersection,
    delta_distance,
    entropy_estimate,
    entropy_from_lengths,
    intersection_number,
    pseudometric_eval,
    self_intersection,
    stable_length,
)
from geocurrents.surface_group import Word, canonical_conj, classes_of_length, cover_z2, fuchsian_rep, generators, words_up_to

from strategies import cyclically_reduced_words, disk_points

REP = fuchsian_rep(2)
L = Liouville(REP)
MIXED = Atomic.from_words({"a1": 1.0, "b1 a2": 2.0})


def lifts_crossing(g: Word, h: Word, depth: int) -> int:
    """Brute-force i(g, h): distinct lifts x h x^-1 (|x| <= depth) whose
    axes cross one fundamental segment of the axis of g."""
    f = geodesic_frame(axis(REP.evaluate(g)))
    fi = f.inverse()
    ell = REP.length(g)
    hm = REP.evaluate(h)
    seen = set()
    for x in words_up_to(depth):
        xm = REP.evaluate(x)
        ax = axis(fi @ xm @ hm @ xm.inverse() @ f)
        x1, x2 = ax.start.halfplane, ax.end.halfplane
        # in the frame the axis of g is (0, inf); skip it and its own lifts
        if not (x1 * x2 < 0 and 1e-9 < min(abs(x1), abs(x2)) and max(abs(x1), abs(x2)) < 1e9):
            continue
        s = 0.5 * math.log(-x1 * x2) + 0.123
        if 0 <= s < ell:
            seen.add(tuple(sorted((round(ax.start.angle, 7), round(ax.end.angle, 7)))))
    return len(seen)


def _oracle_pairs():
    cs = [c for n in (1, 2, 3) for c in classes_of_length(n) if c.root()[1] == 1]
    rnd = random.Random(3)
    pairs = [tuple(rnd.sample(cs, 2)) for _ in range(8)]
    return pairs + [(cs[40], cs[40]), (cs[70], cs[70])]


class TestIntersection:
    def test_examples(self):
        assert intersection_number("a1", "b1") == 1
        assert intersection_number("a1", "a2") == 0
        assert intersection_number("a1", "a1") == 0

    @pytest.mark.parametrize("g,h", _oracle_pairs(), ids=str)
    def test_matches_lift_count(self, g, h):
        # depth 4 and 5 agree for all of these, so the count is saturated
        assert intersection_number(g, h) == lifts_crossing(g.word, h.word, 4)

    def test_lift_count_saturates(self):
        g, h = Word.parse("a1 b2"), Word.parse("b1 a2")
        assert lifts_crossing(g, h, 4) == lifts_crossing(g, h, 5) == intersection_number(g, h)

    @settings(max_examples=40, deadline=None)
    @given(cyclically_reduced_words(1, 5), cyclically_reduced_words(1, 5))
    def test_symmetric(self, g, h):
        assert intersection_number(g, h) == intersection_number(h, g)

    @settings(max_examples=30, deadline=None)
    @given(cyclically_reduced_words(1, 4), cyclically_reduced_words(1, 4))
    def test_inverse_invariant(self, g, h):
        assert intersection_number(g.inverse(), h) == intersection_number(g, h)

    def test_powers(self):
        for n in (1, 2, 3):
            assert intersection_number(Word.parse("a1") ** n, "b1") == n

    def test_self_intersection(self):
        assert self_intersection("a1") == 0
        w = "a1 b1 A1 b1"
        assert intersection_number(w, w) == 2 * self_intersection(w)


class TestStableLength:
    def test_atomic_on_generator(self):
        assert stable_length(Atomic.from_words({"b1": 2.5}), "a1") == 2.5

    def test_zero_multiple(self):
        assert stable_length(0.0 * L, "a1 b1") == 0.0

    def test_liouville_is_translation_length(self):
        for g in ("a1", "a1 b1", "a1 b2 A1"):
            assert stable_length(L, g) == pytest.approx(REP.length(Word.parse(g)), rel=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_power_law(self, n):
        w = Word.parse("a1 b1 A2")
        for c in (L, MIXED):
            assert stable_length(c, w ** n) == pytest.approx(n * stable_length(c, w), rel=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(cyclically_reduced_words(1, 6))
    def test_linear(self, g):
        lhs = stable_length(2.0 * L + 3.0 * MIXED, g)
        rhs = 2.0 * stable_length(L, g) + 3.0 * stable_length(MIXED, g)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)

    def test_conjugation_invariant(self):
        g, h = Word.parse("a1 b1 b1"), Word.parse("a2 B1")
        assert stable_length(MIXED, h * g * h.inverse()) == stable_length(MIXED, g)

    def test_memo(self):
        la = LengthAssignment(MIXED)
        assert la("a1 b1") == la(canonical_conj("b1 a1")) == stable_length(MIXED, "a1 b1")
        assert len(la.cache) == 1

    def test_signed_warns(self):
        with pytest.warns(UserWarning):
            stable_length(Atomic.from_words({"a1": 1.0}) - Atomic.from_words({"b1": 1.0}), "b1")


def _frame_point(z):
    f = geodesic_frame(axis(REP.evaluate(Word.parse("a1"))))
    return PlanePoint(halfplane_to_disk(f.apply(z)))


class TestPseudometric:
    def test_same_point(self):
        p = PlanePoint(0.2 - 0.1j)
        assert pseudometric_eval(MIXED, p, p) == 0.0
        assert pseudometric_eval(L, p, p) == 0.0

    def test_one_lift_crossed(self):
        c = Atomic.from_words({"a1": 1.0})
        assert pseudometric_eval(c, _frame_point(0.05 + 1j), _frame_point(-0.05 + 1j)) == 1.0

    @pytest.mark.parametrize("p,q", [(0.1 + 0.2j, -0.3 + 0.1j), (0.0, 0.6j), (-0.5 - 0.5j, 0.4)])
    def test_liouville_is_hyperbolic_distance(self, p, q):
        p, q = PlanePoint(p), PlanePoint(q)
        assert pseudometric_eval(L, p, q) == pytest.approx(hyp_distance(p, q), abs=1e-8)

    @pytest.mark.parametrize("c", [L, MIXED], ids=["liouville", "atomic"])
    def test_additive_along_geodesics(self, c):
        g = Geodesic(0.3, 2.5)
        a, b, d = (point_on_geodesic(g, s) for s in (-1.1, 0.37, 1.6))
        whole = pseudometric_eval(c, a, d)
        assert pseudometric_eval(c, a, b) + pseudometric_eval(c, b, d) == pytest.approx(whole, abs=1e-8)

    def test_symmetric(self):
        p, q = PlanePoint(0.3 + 0.1j), PlanePoint(-0.6j)
        assert pseudometric_eval(MIXED, p, q) == pseudometric_eval(MIXED, q, p)

    @settings(max_examples=30, deadline=None)
    @given(disk_points(0.8), disk_points(0.8), disk_points(0.8))
    def test_triangle_inequality(self, p, q, r):
        lhs = pseudometric_eval(MIXED, p, r)
        assert lhs <= pseudometric_eval(MIXED, p, q) + pseudometric_eval(MIXED, q, r) + 1e-12

    def test_signed_rejected(self):
        with pytest.raises(SignedNotAllowed):
            pseudometric_eval(L - MIXED, PlanePoint(0), PlanePoint(0.1))


class TestEntropy:
    def test_liouville(self):
        e = entropy_estimate(L, 8)
        assert 0.6 <= e.value <= 1.4
        assert e.window[0] < e.window[1]

    def test_scaling_halves(self):
        assert entropy_estimate(2.0 * L, 8).value == pytest.approx(entropy_estimate(L, 8).value / 2, rel=1e-9)

    def test_short_enumeration(self):
        with pytest.raises(DegenerateSpectrum):
            entropy_estimate(L, 2)

    def test_zero_length(self):
        with pytest.raises(DegenerateSpectrum):
            entropy_from_lengths(np.array([0.0, 1.0]), np.array([1, 1]), 1)

    def test_synthetic_exponential_growth(self):
        # lengths with N(T) = e^{hT} / (hT) exactly recover h
        h = 0.8
        ts = np.linspace(2.0, 14.0, 4000)
        n = np.floor(np.exp(h * ts) / (h * ts)).astype(int)
        lengths = np.repeat(ts, np.diff(np.concatenate([[0], n])))
        word_len = np.ones(len(lengths), dtype=int)
        # only the top shell bounds completeness; shell 2 is empty
        word_len[lengths > 13.0] = 3
        est = entropy_from_lengths(lengths, word_len, 3)
        assert est.window[1] > 13.0
        assert est.value == pytest.approx(h, rel=0.02)


class TestDelta:
    PROBES = [c for n in (1, 2) for c in classes_of_length(n)]

    def test_identical(self):
        assert delta_distance(L, L, self.PROBES).value == 0.0

    def test_projective(self):
        assert delta_distance(L, 3.0 * L, self.PROBES).value == pytest.approx(0.0, abs=1e-12)

    def test_liouville_vs_atomic_positive(self):
        c = Atomic.from_words({"a1 b1": 1.0})
        probes = [p for p in self.PROBES if stable_length(c, p) > 0]
        assert len(probes) >= 4
        assert delta_distance(L, c, probes).value > 0

    def test_zero_on_probe(self):
        # a1 b1 misses a2, so generator probes cannot compare it
        with pytest.raises(DegenerateSpectrum):
            delta_distance(L, Atomic.from_words({"a1 b1": 1.0}), generators(2))

    def test_empty(self):
        with pytest.raises(DegenerateSpectrum):
            delta_distance(L, L, [])


class TestCoverIntersection:
    def test_deck_symmetric_cosets(self):
        cv = cover_z2(2)
        mu = LiftedAtomic(cv, (("b1", 1.0),))
        parts = [cover_intersection(cv, mu, "a1", cosets=[i]) for i in range(2)]
        assert parts[0] == parts[1]
        assert sum(parts) == cover_intersection(cv, mu, "a1")

    def test_weight_linear(self):
        cv = cover_z2(2)
        one = cover_intersection(cv, LiftedAtomic(cv, (("a1 a1", 1.0),)), "b1")
        assert cover_intersection(cv, LiftedAtomic(cv, (("a1 a1", 2.5),)), "b1") == 2.5 * one

    def test_disjoint(self):
        cv = cover_z2(2)
        assert cover_intersection(cv, LiftedAtomic(cv, (("b1", 1.0),)), "b2") == 0
