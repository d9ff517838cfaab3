"""Boxes of geodesics, intersection numbers and stable lengths.

Run with `python demos/01_boxes_and_lengths.py`.  Each cell prints what it
computes; nothing is written to disk.
"""

# %% The regular genus-2 surface and its Liouville current
import math

import numpy as np

from geocurrents.currents import Atomic, Box, Liouville, box_mass
from geocurrents.spectra import intersection_number, self_intersection, stable_length
from geocurrents.surface_group import canonical_conj, enumerate_classes, fuchsian_rep

rep = fuchsian_rep(2)
L = Liouville(rep)
print("relator defect of the representation:", f"{rep.relator_defect():.1e}")

# %% A box is a pair of boundary arcs; its Liouville mass is a log cross ratio
sym = Box.from_halfplane(math.inf, 1.0, 0.5, 0.0)
print("symmetric box:", box_mass(L, sym), "vs log 2 =", math.log(2))

# The mass of a box and of its opposite box always satisfy
# exp(-m) + exp(-m_perp) = 1 for the Liouville current.
rng = np.random.default_rng(0)
for _ in range(3):
    b = Box.random(rng, min_gap=0.1)
    m, mp = box_mass(L, b), box_mass(L, b.opposite())
    print(f"  m = {m:7.4f}  m_perp = {mp:7.4f}  e^-m + e^-m_perp = {math.exp(-m) + math.exp(-mp):.12f}")

# %% Atomic currents count lifts of closed geodesics
fig8 = Atomic.from_words({"a1 b1 A1 b1": 1.0})
print("self-intersection of a1 b1 A1 b1:", self_intersection("a1 b1 A1 b1"))
for w in ("a1", "b1", "a2", "a1 b1"):
    print(f"  i(a1 b1 A1 b1, {w}) = {intersection_number('a1 b1 A1 b1', w)}")

# %% Stable lengths: translation length for L, weighted intersections for atoms
mix = 0.5 * L + fig8
for cls in enumerate_classes(2)[:6]:
    print(f"  {str(cls):10s} l_L = {stable_length(L, cls):7.4f}   l_mix = {stable_length(mix, cls):7.4f}")

# Lengths are class functions: a conjugate word gives the same value
print(stable_length(L, "b2 a1 b1 B2") == stable_length(L, canonical_conj("a1 b1")))
