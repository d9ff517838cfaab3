"""Length spectra and metric quantities of currents.

Intersection numbers count crossing points of lifts inside a strict
fundamental domain of the regular 4g-gon.  Because every lift meeting the
polygon is enumerated (see ``_tiling``), the count is exact rather than a
budget-limited search.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from ._tiling import crossing_points, root_intersection, tiling
from .currents import (
    Atomic,
    Combination,
    Current,
    LiftedAtomic,
    Liouville,
    TransferImage,
    _coset_items,
    _crossing_items,
    _lift_plan,
)
from .errors import DegenerateSpectrum, PreconditionError, QuadratureFailure, SignedNotAllowed
from .hyperbolic_plane import PlanePoint, hyp_distance, moebius_from_disk_points
from .surface_group import ConjClass, Cover, Word, canonical_conj

QUAD_TOL = 1e-7


def _as_class(g, genus: int = 2) -> ConjClass:
    if isinstance(g, ConjClass):
        return g
    if isinstance(g, str):
        g = Word.parse(g, genus)
    return canonical_conj(g)


# ---------------------------------------------------------------------------
# intersection numbers


def intersection_number(g1, g2) -> int:
    """Geometric intersection number i(delta_g1, delta_g2).

    Powers contribute multiplicatively.  For g1 = g2 the value counts every
    transverse double point twice (the current pairing); see
    ``self_intersection`` for the number of double points."""
    c1, c2 = _as_class(g1), _as_class(g2)
    if c1.genus != c2.genus:
        raise ValueError("classes of different genus")
    r1, m1 = c1.root()
    r2, m2 = c2.root()
    return m1 * m2 * root_intersection(r1, r2)


def self_intersection(g) -> int:
    """Number of transverse double points of the closed geodesic of g,
    counted for its primitive root."""
    r, _ = _as_class(g).root()
    return root_intersection(r, r) // 2


def cover_intersection(cover: Cover, mu: LiftedAtomic, nu, cosets=None) -> float:
    """i_Y(sum_i (g_i)_* mu, nu) on the cover, counted over the strict
    fundamental domain union_j g_j^-1 D of the subgroup.

    cosets restricts the sum over i (default: all cosets); nu is a class of
    the base group, lifted to the cover by its full preimage."""
    nu = _as_class(nu, cover.genus)
    if cosets is None:
        cosets = range(cover.degree)
    t = tiling(cover.genus)
    r_nu, m_nu = nu.root()
    inv = [g.inverse() for g in cover.transversal]
    total = 0.0
    for word, w in mu.atoms:
        for _, coef, root, filt in _coset_items(cover, word, w, cosets):
            p1 = t.pieces(root)
            pts = crossing_points(t, p1, t.pieces(r_nu))
            hits = 0
            for i1, _, _ in pts:
                c1 = p1[i1].conj
                hits += sum(1 for gj in inv if filt(gj * c1))
            total += coef * m_nu * hits
    return total


# ---------------------------------------------------------------------------
# stable lengths


def stable_length(c: Current, g, allow_signed: bool = False) -> float:
    """i(c, delta_g): translation length for Liouville currents, weighted
    intersection numbers for atomic ones, linear on combinations."""
    if c.is_signed and not allow_signed:
        warnings.warn("stable length of a signed current may be negative", stacklevel=2)
    cls = _as_class(g, c.genus)
    return _stable_length(c, cls)


def _stable_length(c: Current, cls: ConjClass) -> float:
    if isinstance(c, Liouville):
        return c.rep.length(cls.word)
    if isinstance(c, Atomic):
        return sum(w * intersection_number(a, cls) for a, w in c.atoms)
    if isinstance(c, Combination):
        return sum(k * _stable_length(x, cls) for k, x in c.terms if k != 0.0)
    if isinstance(c, TransferImage):
        return _stable_length(c.materialize(), cls)
    if isinstance(c, LiftedAtomic):
        raise PreconditionError("stable lengths of a current on a cover need a class of the cover")
    raise PreconditionError(f"unsupported current {type(c).__name__}")


class LengthAssignment:
    """Memoized class -> stable length map for one current."""

    def __init__(self, current: Current):
        self.current = current
        self.cache: dict = {}

    def __call__(self, g) -> float:
        cls = _as_class(g, self.current.genus)
        v = self.cache.get(cls)
        if v is None:
            v = self.cache[cls] = _stable_length(self.current, cls)
        return v


# ---------------------------------------------------------------------------
# dual pseudometric


def _liouville_segment_mass(r: float) -> tuple:
    """Liouville mass of geodesics crossing the disk segment [0, r], r > 0,
    by integrating over the first endpoint alpha; returns (value, error)."""

    def other_end(alpha):
        # the geodesic through e^{i alpha} and r: move r to 0, go straight
        # through, move back
        z = complex(math.cos(alpha), math.sin(alpha))
        w = (z - r) / (1 - r * z)
        u = (-w + r) / (1 + r * -w)
        return math.atan2(u.imag, u.real)

    def integrand(alpha):
        beta = other_end(alpha)
        return 0.5 * abs(1.0 / math.tan((beta - alpha) / 2))

    val, err = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-12, epsrel=1e-11, limit=200)
    return val, err


def pseudometric_eval(c: Current, p: PlanePoint, q: PlanePoint) -> float:
    """d_c(p, q) = (mu(G[p,q)) + mu(G(p,q])) / 2."""
    if c.is_signed:
        raise SignedNotAllowed("the dual pseudometric needs a positive current")
    p = p if isinstance(p, PlanePoint) else PlanePoint(p)
    q = q if isinstance(q, PlanePoint) else PlanePoint(q)
    if abs(p.z - q.z) == 0.0:
        return 0.0
    total = 0.0
    atomic = []
    for item in _lift_plan(c):
        if item[0] == "liouville":
            rep = item[2]
            if rep is not tiling(rep.genus).rep:
                raise PreconditionError("Liouville pseudometric is evaluated for the regular structure only")
            m = moebius_from_disk_points(p, q)
            r = abs(m.apply_disk(q.z))
            val, err = _liouville_segment_mass(r)
            if err > QUAD_TOL * max(1.0, val):
                raise QuadratureFailure(f"quadrature error {err:.2e} above target")
            total += item[1] * val
        elif item[1] != 0.0:
            atomic.append(item)
    if atomic:
        forward = _crossing_items(c.genus, atomic, (p, q))
        backward = _crossing_items(c.genus, atomic, (q, p))
        total += 0.5 * (forward + backward)
    return total


# ---------------------------------------------------------------------------
# entropy and Delta


@dataclass
class EntropyEstimate:
    value: float
    window: tuple
    residual: float
    counts: list = field(default_factory=list)
    warning: str | None = None


def _lengths_table(c: Current, max_len: int):
    from .counting import build_spectrum

    table = build_spectrum([c], max_len)
    return table.lengths[:, 0], table.word_len


def completeness_bound(lengths: np.ndarray, word_len: np.ndarray, max_len: int, shells: int = 2) -> float:
    """Length below which the enumeration is taken to be complete: the
    smallest length among the top `shells` word-length shells.  Shell minima
    are not monotone in word length, so one shell alone overstates it."""
    lo = max(1, max_len - shells + 1)
    mins = [lengths[word_len == n].min() for n in range(lo, max_len + 1) if np.any(word_len == n)]
    if not mins:
        raise DegenerateSpectrum("no classes at the top word lengths")
    return float(min(mins))


def entropy_from_lengths(lengths: np.ndarray, word_len: np.ndarray, max_len: int,
                         min_count: int = 20, log_correction: bool = True) -> EntropyEstimate:
    """Slope h of log N(T) + log T against T below the completeness bound.

    The log T term is the prime-geodesic form N(T) ~ e^{hT} / (hT); without
    it the slope is biased low by about 1/T at desk-scale T."""
    if np.any(lengths <= 1e-9):
        raise DegenerateSpectrum("a class has (near) zero length")
    t_max = completeness_bound(lengths, word_len, max_len)
    srt = np.sort(lengths[lengths < t_max])
    if len(srt) < 2 * min_count:
        raise DegenerateSpectrum("too few classes below the completeness bound")
    t_min = float(srt[min_count - 1])
    grid = np.linspace(t_min, t_max, 40, endpoint=False)
    counts = np.searchsorted(srt, grid, side="left").astype(float)
    ok = counts > 0
    x = grid[ok]
    y = np.log(counts[ok]) + (np.log(x) if log_correction else 0.0)
    if len(x) < 4 or x[-1] - x[0] < 1e-6:
        raise DegenerateSpectrum("entropy window is too narrow")
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = float(math.sqrt(res[0] / len(x))) if len(res) else 0.0
    warn = None
    if t_max - t_min < 2.0:
        warn = "narrow window; estimate is dominated by truncation bias"
    return EntropyEstimate(float(coef[0]), (t_min, t_max), resid, list(zip(grid.tolist(), counts.tolist())), warn)


def entropy_estimate(c: Current, max_len: int) -> EntropyEstimate:
    """h(c) = lim (1/T) log #{[g] : l_c(g) < T}, by regression over the
    largest window where the class enumeration up to max_len is complete."""
    if c.is_signed:
        raise SignedNotAllowed("entropy needs a positive current")
    if max_len < 3:
        raise DegenerateSpectrum("max_len below 3 gives no usable window")
    lengths, word_len = _lengths_table(c, max_len)
    return entropy_from_lengths(lengths, word_len, max_len)


@dataclass
class DeltaValue:
    value: float
    sup_ratio: float
    inf_ratio: float
    probes: int
    note: str = "lower bound: supremum over the probe set only"


def delta_distance(c1: Current, c2: Current, probes: Sequence) -> DeltaValue:
    """log(sup l2/l1 * sup l1/l2) over the probes."""
    if c1.is_signed or c2.is_signed:
        raise SignedNotAllowed("Delta needs positive currents")
    if not probes:
        raise DegenerateSpectrum("no probes")
    r = []
    for g in probes:
        l1, l2 = stable_length(c1, g), stable_length(c2, g)
        if l1 <= 1e-12 or l2 <= 1e-12:
            raise DegenerateSpectrum(f"zero length on probe {g}")
        r.append(l2 / l1)
    hi, lo = max(r), min(r)
    return DeltaValue(float(math.log(hi / lo)), hi, lo, len(r))


__all__ = [
    "intersection_number", "self_intersection", "cover_intersection", "stable_length",
    "LengthAssignment", "pseudometric_eval", "EntropyEstimate", "entropy_estimate",
    "entropy_from_lengths", "DeltaValue", "delta_distance", "hyp_distance",
]
