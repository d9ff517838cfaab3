"""Geodesic currents on closed hyperbolic surfaces: words and classes in the
surface group, Liouville and atomic currents, length spectra, hyperbolicity
certificates, counting asymptotics and the elliptic modulus of a box of
geodesics."""

__version__ = "0.1.0"
