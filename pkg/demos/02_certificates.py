"""Strong hyperbolicity, Ptolemy inequalities and their failures.

Run with `python demos/02_certificates.py` (about half a minute).
"""

# %% Sample crossing pairs of group elements
from geocurrents.certifiers import (
    SHParams,
    WitnessBudget,
    bolicity_probe,
    check_ptolemy,
    check_sh_crossing,
    estimate_eps_star,
    flat_strip_probe,
    ptolemy_witness_search,
    sample_crossing_pairs,
)
from geocurrents.currents import Atomic, Liouville
from geocurrents.surface_group import fuchsian_rep

rep = fuchsian_rep(2)
L = Liouville(rep)
pairs = sample_crossing_pairs(rep, 4, 300, seed=1)
print(len(pairs), "crossing pairs, e.g.", pairs[0])

# %% The Liouville current sits exactly at epsilon = 1 on crossing pairs
r = check_sh_crossing(L, SHParams(epsilon=1.0), pairs)
print("eps = 1:", r.verdict, "min margin", f"{r.min_margin:.2e}")
print("largest passing eps on this sample:", estimate_eps_star(L, pairs))

# Adding an atom lowers it; scaling a current by a divides it by a
mix = L + Atomic.from_words({"a1": 1.0})
print("L + delta_a1:", estimate_eps_star(mix, pairs))
print("2 (L + delta_a1):", estimate_eps_star(2.0 * mix, pairs))

# %% Ptolemy holds for L on sampled pairs and fails for a figure-eight curve
print("Ptolemy for L:", check_ptolemy(L, pairs[:100], 4).verdict)
w = ptolemy_witness_search("a1 b1 A1 b1", rep, WitnessBudget(max_len=6))
print("witness:", w.a, "|", w.b, "n =", w.n,
      "intersections", (w.i_a, w.i_b, w.i_ab, w.i_abinv), "excess", w.quantity)

# %% A flat strip is never strongly hyperbolic
for eps in (0.5, 1.0, 2.0):
    print(f"eps = {eps}: first violating height y = {flat_strip_probe(eps, 1.0, 100.0):.4f}")

# %% Bolicity: translates of a box along a crossing axis
probe = bolicity_probe(Atomic.from_words({"a1": 1.0, "b1": 2.0}), 4)
print("axis of", probe.element, "translation length", round(probe.translation_length, 4))
for n, (nu, perp) in enumerate(probe.pairs, start=1):
    print(f"  n = {n}: nu(B_n) = {nu:5.1f}  mu(G_n perp) = {perp}")
