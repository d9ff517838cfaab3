"""Length spectra of two hyperbolic structures and their Manhattan curve.

Run with `python demos/03_spectra_and_counting.py`.  Uses word length 8
(about 850k classes) so that it finishes in well under a minute; the
acceptance suite goes to 10.
"""

# %% Tables of stable lengths for every class up to a word length
import numpy as np

from geocurrents.counting import (
    build_spectrum,
    convexity_check,
    correlation_exponent,
    correlation_sweep,
    manhattan_endpoints,
    manhattan_estimate,
    table_entropy,
)
from geocurrents.currents import Liouville
from geocurrents.surface_group import fuchsian_rep, twisted_rep

L1 = Liouville(fuchsian_rep(2))
L2 = Liouville(twisted_rep(2))
table = build_spectrum([L1, L2], 8)
print(len(table), "classes; first rows:")
print(table.to_csv(limit=4))

# %% Entropy: growth rate of the number of closed geodesics
for i, name in enumerate(("regular", "twisted")):
    e = table_entropy(table, i)
    print(f"{name}: h = {e.value:.3f} over lengths {e.window[0]:.2f}..{e.window[1]:.2f}")

# %% The Manhattan curve: critical exponents of sum exp(-a l1 - b l2)
ends = manhattan_endpoints(table, 0, 1)
h1, h2 = ends["a_at_b0"], ends["b_at_a0"]
ms = manhattan_estimate(table, 0, 1, np.linspace(0, h1, 11), h1, h2)
for a, b in ms.points[::2]:
    print(f"  a = {a:.3f}  b = {b:.3f}")
print("convexity:", convexity_check(ms).verdict)
r = correlation_exponent(ms)
print(f"correlation exponent M = {r['M']:.4f} at a = {r['a']:.3f}")

# %% Direct correlation counts in windows of width eps
# Only classes below the completeness bound of both columns are counted.
# At word length 8 that leaves a window of about two length units, too
# short for the exponential fit: expect M well above the curve's value and
# a large residual.  At word length 10 the fit lands within a few percent.
fit = correlation_sweep(table, 0, 1, h1, h2, eps=1.0, points=12)
print(f"sweep over x in [{fit.xs[0]:.2f}, {fit.xs[-1]:.2f}]")
print(f"fit C e^(Mx) / x^1.5: M = {fit.M:.3f}, C = {fit.C:.3g}, log residual {fit.residual:.3f}")
