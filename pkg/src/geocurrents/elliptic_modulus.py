"""Complete elliptic integrals and the modulus of a box of geodesics.

A box of Liouville mass t corresponds, after normalizing three corners to
(inf, 1, 0), to the fourth corner lam = 1 - exp(-t).  Its conformal
modulus is eta(t) = K(k) / K(k') with k = sqrt(1 - exp(-t)) and
k' = exp(-t/2).  A quasisymmetric boundary map with constant M distorts box
masses by at most omega(t) = eta^-1(M eta(t)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceFailure, DomainError

_AGM_TOL = 1e-16


def agm(a: float, b: float) -> float:
    for _ in range(64):
        if abs(a - b) <= _AGM_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def _k_from_kprime(kp: float) -> float:
    # K as a function of the complementary modulus; stable for tiny kp
    if kp <= 0.0:
        raise DomainError("K diverges at k = 1")
    return math.pi / (2.0 * agm(1.0, kp))


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, K(k) = pi / (2 AGM(1, k'))."""
    if not (0.0 <= k < 1.0) or math.isnan(k):
        raise DomainError(f"K(k) needs 0 <= k < 1, got {k}")
    return _k_from_kprime(math.sqrt((1.0 - k) * (1.0 + k)))


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F by the duplication algorithm."""
    args = (x, y, z)
    if any(v < 0 or math.isnan(v) for v in args):
        raise DomainError("R_F arguments must be nonnegative")
    if sum(1 for v in args if v == 0.0) > 1:
        raise DomainError("R_F allows at most one zero argument")
    for _ in range(200):
        mu = (x + y + z) / 3.0
        dx, dy, dz = 1 - x / mu, 1 - y / mu, 1 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            e2 = dx * dy - dz * dz
            e3 = dx * dy * dz
            # fifth-order series; truncation error ~ eps^6
            return (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / math.sqrt(mu)
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
    raise ConvergenceFailure("R_F duplication did not converge")


def elliptic_K_carlson(k: float) -> float:
    if not (0.0 <= k < 1.0):
        raise DomainError(f"K(k) needs 0 <= k < 1, got {k}")
    return carlson_rf(0.0, (1.0 - k) * (1.0 + k), 1.0)


@dataclass(frozen=True)
class ModulusParams:
    """Box mass t with the derived moduli k = sqrt(1-e^-t), k' = e^(-t/2)."""

    t: float
    M: float = 1.0

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError("t must be positive")
        if not self.M >= 1:
            raise DomainError("M must be at least 1")

    @property
    def lam(self) -> float:
        return -math.expm1(-self.t)

    @property
    def k(self) -> float:
        return math.sqrt(self.lam)

    @property
    def k_prime(self) -> float:
        return math.exp(-self.t / 2)

    @classmethod
    def from_k(cls, k: float, M: float = 1.0) -> "ModulusParams":
        if not 0 < k < 1:
            raise DomainError("k must lie in (0, 1)")
        return cls(-math.log1p(-k * k), M)


def _K_of_t(t: float) -> float:
    # K(k) with k = sqrt(1 - e^-t); k' = e^(-t/2) is passed directly so that
    # large t never forms 1 - k
    return _k_from_kprime(math.exp(-t / 2))


def _Kp_of_t(t: float) -> float:
    # K(k') = K evaluated at modulus e^(-t/2); its complementary modulus is
    # sqrt(1 - e^-t)
    return _k_from_kprime(math.sqrt(-math.expm1(-t)))


def eta(t: float) -> float:
    """Conformal modulus K(k)/K(k') of the box with Liouville mass t."""
    if not t > 0 or math.isnan(t):
        raise DomainError("eta needs t > 0")
    if t > 1400:
        # e^(-t/2) underflows; K(k) = log(4/k') + O(k'^2 log k') = log 4 + t/2
        return (math.log(4.0) + t / 2) / (math.pi / 2)
    return _K_of_t(t) / _Kp_of_t(t)


def eta_inverse(s: float, tol: float = 1e-12, max_iter: int = 400) -> float:
    """Solve eta(t) = s by bracketing bisection in log t."""
    if not s > 0 or math.isnan(s):
        raise DomainError("eta_inverse needs s > 0")
    if not tol > 0:
        raise DomainError("tol must be positive")
    lo, hi = -1.0, 1.0
    while eta(math.exp(lo)) > s:
        lo *= 2
        if lo < -800:
            raise ConvergenceFailure("target below representable range")
    while eta(math.exp(hi)) < s:
        hi *= 2
        if hi > 20:
            raise ConvergenceFailure("target above representable range")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        t = math.exp(mid)
        v = eta(t)
        if abs(v - s) <= tol and (hi - lo) < 1e-3:
            return t
        if v < s:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            return math.exp(0.5 * (lo + hi))
    raise ConvergenceFailure("eta_inverse hit the iteration cap")


def omega(t: float, M: float = 1.0, tol: float = 1e-12) -> float:
    """Quasisymmetric distortion eta^-1(M eta(t))."""
    if not t > 0:
        raise DomainError("omega needs t > 0")
    if not M >= 1:
        raise DomainError("omega needs M >= 1")
    if M == 1:
        return float(t)
    return eta_inverse(M * eta(t), tol)


def modulus_report(t: float, M: float = 1.0) -> dict:
    p = ModulusParams(t, M)
    return {
        "t": p.t,
        "M": p.M,
        "k": p.k,
        "k_prime": p.k_prime,
        "eta": eta(p.t),
        "omega": omega(p.t, p.M),
    }
