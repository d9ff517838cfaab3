import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geocurrents.certifiers import (
    CrossingPair,
    SHParams,
    WitnessBudget,
    bolicity_probe,
    check_ptolemy,
    check_sh_abc,
    check_sh_boxes,
    check_sh_crossing,
    crossing_box,
    estimate_eps_star,
    flat_strip_defect,
    flat_strip_probe,
    ptolemy_witness_search,
    sample_crossing_pairs,
)
from geocurrents.currents import Atomic, Box, Liouville
from geocurrents.errors import NoCrossingAtom, NoPositiveEps, NoWitnessInBudget, PreconditionError, SignedNotAllowed
from geocurrents.hyperbolic_plane import axis, linked
from geocurrents.surface_group import Word, fuchsian_rep

REP = fuchsian_rep(2)
L = Liouville(REP)
MIX = Atomic.from_words({"a1": 1.0, "b1 a2": 2.0}) + L
FIG8 = Atomic.from_words({"a1 b1 A1 b1": 1.0})
PAIRS = sample_crossing_pairs(REP, 3, 100, 1)


def pair(a, b):
    return CrossingPair(Word.parse(a), Word.parse(b))


class TestSampler:
    def test_pairs_cross(self):
        for p in PAIRS[:30]:
            assert linked(axis(REP.evaluate(p.a_word)), axis(REP.evaluate(p.b_word)))

    def test_generators_found(self):
        found = {(str(p.a_word), str(p.b_word)) for p in sample_crossing_pairs(REP, 1, 8, 0)}
        assert ("a1", "b1") in found or ("b1", "a1") in found

    def test_deterministic(self):
        assert sample_crossing_pairs(REP, 3, 20, 7) == sample_crossing_pairs(REP, 3, 20, 7)

    def test_empty(self):
        assert sample_crossing_pairs(REP, 3, 0, 1) == []


class TestStrongHyperbolicity:
    def test_large_eps_fails(self):
        r = check_sh_crossing(MIX, SHParams(epsilon=50.0), PAIRS)
        assert r.verdict == "fail" and r.violations

    def test_small_eps_passes(self):
        r = check_sh_crossing(MIX, SHParams(epsilon=1e-3), PAIRS)
        assert r.verdict == "pass" and r.min_margin > 0

    def test_empty_sample_inconclusive(self):
        assert check_sh_crossing(MIX, SHParams(epsilon=1.0), []).verdict == "inconclusive"

    def test_signed_rejected(self):
        with pytest.raises(SignedNotAllowed):
            check_sh_crossing(L - Atomic.from_words({"a1": 1.0}), SHParams(epsilon=1.0), PAIRS)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.1, 10.0), st.floats(0.05, 2.0))
    def test_scaling_law(self, a, eps):
        # a current scaled by a at eps behaves as the current at a * eps
        r1 = check_sh_crossing(a * MIX, SHParams(epsilon=eps), PAIRS)
        r2 = check_sh_crossing(MIX, SHParams(epsilon=a * eps), PAIRS)
        assert r1.verdict == r2.verdict
        assert r1.min_margin == pytest.approx(r2.min_margin, abs=1e-12)

    def test_eps_star_scales_inversely(self):
        e1 = estimate_eps_star(MIX, PAIRS)
        e3 = estimate_eps_star(3.0 * MIX, PAIRS)
        assert 3.0 * e3 == pytest.approx(e1, abs=4e-6)

    def test_eps_star_is_threshold(self):
        e = estimate_eps_star(MIX, PAIRS)
        assert check_sh_crossing(MIX, SHParams(epsilon=e), PAIRS).verdict == "pass"
        assert check_sh_crossing(MIX, SHParams(epsilon=e + 1e-4), PAIRS).verdict == "fail"

    def test_eps_star_needs_pairs(self):
        with pytest.raises(NoPositiveEps):
            estimate_eps_star(MIX, [])

    def test_params_exclusive(self):
        with pytest.raises(ValueError):
            SHParams(epsilon=1.0, A0=1.0, B0=1.0, C0=1.0)
        with pytest.raises(ValueError):
            SHParams(A0=1.0, B0=1.0)
        with pytest.raises(ValueError):
            SHParams(epsilon=-1.0)


class TestABC:
    def test_loose_constants_pass(self):
        r = check_sh_abc(L, SHParams(A0=0.5, B0=4.0, C0=0.5), PAIRS)
        assert r.verdict == "pass"

    def test_steep_decay_fails(self):
        r = check_sh_abc(L, SHParams(A0=0.5, B0=4.0, C0=50.0), PAIRS)
        assert r.verdict == "fail"

    def test_no_active_pair(self):
        r = check_sh_abc(L, SHParams(A0=1e6, B0=1.0, C0=1.0), PAIRS)
        assert r.verdict == "inconclusive"


class TestBoxes:
    def test_liouville_boxes_tight(self):
        rng = np.random.default_rng(0)
        boxes = [Box.random(rng, min_gap=0.05) for _ in range(20)]
        r = check_sh_boxes(L, 1.0, boxes)
        assert r.verdict == "pass"
        assert abs(r.min_margin) < 1e-9

    def test_atomic_crossing_box_fails(self):
        b = crossing_box(FIG8)
        assert check_sh_boxes(FIG8, 1.0, [b]).verdict == "fail"

    def test_crossing_box_needs_crossing(self):
        with pytest.raises(NoCrossingAtom):
            crossing_box(Atomic.from_words({"a1": 1.0, "a2": 1.0}))


class TestPtolemy:
    def test_liouville_passes(self):
        assert check_ptolemy(L, PAIRS[:40], 3).verdict == "pass"

    def test_atomic_violation(self):
        r = check_ptolemy(FIG8, [pair("a1", "a2 b1")], 1)
        assert r.verdict == "fail"
        assert r.violations[0]["quantity"] == 2.0

    def test_n_zero(self):
        r = check_ptolemy(L, PAIRS, 0)
        assert r.verdict == "inconclusive" and r.checked == 0

    def test_json(self):
        d = json.loads(check_ptolemy(L, PAIRS[:5], 2).to_json())
        assert d["checked"] == 10 and d["verdict"] == "pass"


class TestWitness:
    def test_simple_curve(self):
        with pytest.raises(PreconditionError):
            ptolemy_witness_search("a1", REP)

    def test_empty_budget(self):
        with pytest.raises(NoWitnessInBudget):
            ptolemy_witness_search("a1 b1 A1 b1", REP, WitnessBudget(n=0))

    def test_small_budget(self):
        with pytest.raises(NoWitnessInBudget):
            ptolemy_witness_search("a1 b1 A1 b1", REP, WitnessBudget(max_len=2))

    def test_witness_integers(self):
        w = ptolemy_witness_search("a1 b1 A1 b1", REP, WitnessBudget(max_len=4))
        vals = (w.i_a, w.i_b, w.i_ab, w.i_abinv)
        assert all(isinstance(v, int) for v in vals)
        assert w.quantity == w.i_a * w.i_b - (w.i_ab ** 2 + w.i_abinv ** 2) / 4
        assert w.quantity > 1


class TestFlatStrip:
    def test_no_violation_below_threshold(self):
        assert flat_strip_probe(0.5, 1.0, 0.01) is None

    def test_nonpositive_height(self):
        assert flat_strip_probe(0.5, 1.0, 0.0) is None

    def test_returned_point_violates(self):
        y = flat_strip_probe(0.5, 1.0, 100.0)
        assert flat_strip_defect(0.5, 1.0, y) > 0
        assert flat_strip_defect(0.5, 1.0, y - 1e-5) <= 0

    def test_threshold_decreases_with_eps(self):
        ys = [flat_strip_probe(e, 1.0, 100.0) for e in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(ys, ys[1:]))

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.5, 2.0))
    def test_homogeneity(self, eps, x, s):
        # the inequality depends on eps x and eps y only
        d1 = flat_strip_defect(eps, x, 1.3)
        d2 = flat_strip_defect(eps / s, x * s, 1.3 * s)
        assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-12)


class TestBolicity:
    def test_simple_atom(self):
        with pytest.raises(NoCrossingAtom):
            bolicity_probe(Atomic.from_words({"a1": 1.0}), 3)

    def test_needs_atomic(self):
        with pytest.raises(NoCrossingAtom):
            bolicity_probe(L, 3)

    def test_two_crossing_atoms(self):
        p = bolicity_probe(Atomic.from_words({"a1": 1.0, "b1": 2.0}), 3)
        # B holds the b1 lift crossing the axis of a1; G_n_perp holds that axis
        assert p.nu_box == 2.0
        assert [x for x, _ in p.pairs] == [2.0 * (2 * n + 1) for n in (1, 2, 3)]
        assert [y for _, y in p.pairs] == [1.0, 1.0, 1.0]
        assert math.isclose(p.translation_length, REP.length(Word.parse(p.element)))
