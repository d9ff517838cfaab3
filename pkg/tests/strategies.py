"""Shared hypothesis strategies."""

import math

from hypothesis import strategies as st

from geocurrents.hyperbolic_plane import MoebiusMap, PlanePoint
from geocurrents.surface_group import Word


def _rot(t):
    c, s = math.cos(t), math.sin(t)
    return MoebiusMap(c, -s, s, c)


@st.composite
def moebius_maps(draw, max_stretch=3.0):
    """rot(t1) diag(e^s, e^-s) rot(t2), a uniform way to cover PSL(2,R)."""
    t1 = draw(st.floats(0, math.pi))
    t2 = draw(st.floats(0, math.pi))
    s = draw(st.floats(-max_stretch, max_stretch))
    return _rot(t1) @ MoebiusMap(math.exp(s), 0.0, 0.0, math.exp(-s)) @ _rot(t2)


@st.composite
def hyperbolic_maps(draw):
    # mild conjugators: a huge conjugator makes the trace a cancellation
    m = draw(moebius_maps(1.0))
    ell = draw(st.floats(0.1, 3.0))
    return MoebiusMap.diagonal(ell).conjugate_by(m)


@st.composite
def disk_points(draw, radius=0.9):
    r = draw(st.floats(0.0, radius))
    t = draw(st.floats(0.0, 2 * math.pi))
    return PlanePoint(complex(r * math.cos(t), r * math.sin(t)))


angles = st.floats(0.0, 2 * math.pi, exclude_max=True)

LETTERS = (1, -1, 2, -2, 3, -3, 4, -4)


@st.composite
def reduced_words(draw, min_len=1, max_len=8):
    """Freely reduced genus-2 words."""
    n = draw(st.integers(min_len, max_len))
    out = []
    while len(out) < n:
        x = draw(st.sampled_from(LETTERS))
        if out and out[-1] == -x:
            continue
        out.append(x)
    return Word(tuple(out), 2)


@st.composite
def cyclically_reduced_words(draw, min_len=1, max_len=8):
    w = draw(reduced_words(min_len, max_len))
    letters = list(w.letters)
    while len(letters) > 1 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    return Word(tuple(letters), 2)
