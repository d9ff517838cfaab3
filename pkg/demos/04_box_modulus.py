"""The conformal modulus of a box of geodesics and its distortion.

Run with `python demos/04_box_modulus.py`.
"""

# %% K by three routes
import math

import numpy as np

from geocurrents.elliptic_modulus import carlson_rf, elliptic_K, eta, eta_inverse, omega

k = 1 / math.sqrt(2)
print("K(1/sqrt 2):", elliptic_K(k), carlson_rf(0.0, 1 - k * k, 1.0))

# %% eta(t) grows like pi / log(16/t) near 0 and like t / pi at infinity
for t in (1e-6, 1e-3, math.log(2), 10.0, 100.0):
    print(f"t = {t:<10.4g} eta = {eta(t):10.6f}  eta log(16/t) = {eta(t) * math.log(16 / t):8.5f}  eta/t = {eta(t) / t:.5f}")
print("eta_inverse(1) =", eta_inverse(1.0), "= log 2")

# %% Quasisymmetric distortion omega(t) = eta^-1(M eta(t))
for t in np.geomspace(1e-6, 1e2, 5):
    w = omega(t, 2.0)
    print(f"t = {t:9.3g}  omega = {w:10.5g}  omega/sqrt(t) = {w / math.sqrt(t):8.4f}  omega/t = {w / t:8.4f}")
