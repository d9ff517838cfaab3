"""Enumeration of lifts of closed geodesics inside regions of the disk.

A region is covered by the tiles accepted by a breadth-first search; every
lift meeting an accepted tile t.D is t applied to a piece of the class (a
lift meeting the base polygon).  Lifts found through several tiles are
merged by endpoint.
"""

from __future__ import annotations

import math

import numpy as np

from ._tiling import Tiling, act_angles, act_disk
from .errors import UnstableEnumeration
from .surface_group import ConjClass, Cover, Word

MERGE_TOL = 1e-8


def klein_point(z: complex) -> np.ndarray:
    s = 2.0 / (1.0 + abs(z) ** 2)
    return np.array([s * z.real, s * z.imag])


def boundary_xy(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def sinh_signed_distance(k: np.ndarray, normal: np.ndarray, h: float) -> np.ndarray:
    """sinh of the signed distance from Klein points k to the geodesic
    {x : normal . x = h}; positive on the side normal points to."""
    k = np.atleast_2d(k)
    num = k @ normal - h
    den = np.sqrt(np.maximum(1.0 - (k * k).sum(axis=1), 1e-300) * (1.0 - h * h))
    return num / den


def chord_line(t1: float, t2: float):
    """Unit normal and offset of the Klein chord between two boundary angles."""
    p, q = boundary_xy(t1), boundary_xy(t2)
    d = q - p
    n = np.array([-d[1], d[0]])
    n /= np.linalg.norm(n)
    return n, float(n @ p)


def cosh_distance_to_origin(z):
    r2 = np.abs(z) ** 2
    return (1 + r2) / (1 - r2)


def in_arc(theta, a: float, b: float):
    """Membership of angles in the half-open counterclockwise arc [a, b)."""
    two_pi = 2 * math.pi
    off = np.mod(np.asarray(theta) - a, two_pi)
    return off < (b - a) % two_pi


class LiftSet:
    """All lifts of one primitive class meeting a list of tiles.

    starts/ends are oriented endpoint angles; tile[k], piece[k] index the
    tile and base piece that produced lift k (first occurrence)."""

    def __init__(self, t: Tiling, root: ConjClass, tiles):
        self.tiling = t
        self.root = root
        self.pieces = t.pieces(root)
        self.tiles = tiles
        if not tiles or not self.pieces:
            self.starts = self.ends = np.zeros(0)
            self.tile = self.piece = np.zeros(0, dtype=int)
            return
        mats = np.array([m for _, m in tiles])
        base = np.array([[p.start, p.end] for p in self.pieces])
        k, P = len(mats), len(self.pieces)
        flat = np.broadcast_to(base.ravel(), (k, 2 * P)).copy()
        ang = act_angles(mats, flat).reshape(k, P, 2)
        starts = ang[:, :, 0].ravel()
        ends = ang[:, :, 1].ravel()
        tile = np.repeat(np.arange(k), P)
        piece = np.tile(np.arange(P), k)
        keep = _merge(starts, ends)
        self.starts, self.ends = starts[keep], ends[keep]
        self.tile, self.piece = tile[keep], piece[keep]

    def __len__(self):
        return len(self.starts)

    def conjugator(self, k: int) -> Word:
        """Word c with lift k = c . axis(canonical word of the root)."""
        w, _ = self.tiles[self.tile[k]]
        return w * self.pieces[self.piece[k]].conj


def _merge(starts: np.ndarray, ends: np.ndarray, tol: float = MERGE_TOL) -> np.ndarray:
    """Indices of one representative per distinct oriented lift."""
    n = len(starts)
    if n == 0:
        return np.zeros(0, dtype=int)
    two_pi = 2 * math.pi
    # fold angles near 2pi onto 0 so that sorting keeps duplicates adjacent
    s = np.where(starts > two_pi - tol, starts - two_pi, starts)
    order = np.argsort(s, kind="stable")
    keep = []
    window: list = []
    for idx in order:
        si, ei = s[idx], ends[idx]
        window = [j for j in window if si - s[j] <= tol]
        dup = False
        for j in window:
            d = abs(ei - ends[j]) % two_pi
            if min(d, two_pi - d) <= tol:
                dup = True
                break
        if not dup:
            keep.append(idx)
            window.append(idx)
    return np.array(sorted(keep), dtype=int)


# ---------------------------------------------------------------------------
# tile regions


def box_tiles(t: Tiling, a: float, b: float, c: float, d: float, margin: float):
    """Tiles that may meet a geodesic joining arc [a,b] to arc [c,d]."""
    two_pi = 2 * math.pi

    # the two arcs are closest across the gaps (b, c) and (d, a)
    dmin = min((c - b) % two_pi, (a - d) % two_pi)
    d_max = math.atanh(min(math.cos(dmin / 2), 1 - 1e-16))
    reach = t.circumradius + margin
    cosh_lim = math.cosh(d_max + reach)
    sinh_reach = math.sinh(reach)
    # the box geodesics stay in the region cut out by chords (b,c) and (d,a)
    walls = []
    for p, q, inside in ((b, c, (a + ((b - a) % two_pi) / 2)), (d, a, (c + ((d - c) % two_pi) / 2))):
        n, h = chord_line(p, q)
        if float(boundary_xy(inside) @ n) - h > 0:
            n, h = -n, -h
        walls.append((n, h))

    def accept(w, m, center):
        if cosh_distance_to_origin(center) > cosh_lim:
            return False
        k = klein_point(center)
        for n, h in walls:
            if sinh_signed_distance(k, n, h)[0] > sinh_reach:
                return False
        return True

    # a tile on the geodesic (a, c) near its closest point to the origin
    mid = _closest_point(a, c)
    start = t.locate(mid)
    return t.tiles_where(accept, start=start)


def _closest_point(t1: float, t2: float) -> complex:
    """Disk point of the geodesic (t1, t2) closest to the origin."""
    n, h = chord_line(t1, t2)
    k = n * h
    r2 = float(k @ k)
    return complex(k[0], k[1]) / (1.0 + math.sqrt(max(0.0, 1.0 - r2)))


def segment_tiles(t: Tiling, p: complex, q: complex, margin: float):
    """Tiles within circumradius + margin of the geodesic segment [p, q]."""
    kp, kq = klein_point(p), klein_point(q)
    reach = t.circumradius + margin
    sinh_reach = math.sinh(reach)
    cosh_reach = math.cosh(reach)
    dvec = kq - kp
    dlen = float(np.linalg.norm(dvec))

    def cosh_dist(z1, z2):
        num = 2 * abs(z1 - z2) ** 2
        return 1 + num / ((1 - abs(z1) ** 2) * (1 - abs(z2) ** 2))

    def accept(w, m, center):
        if cosh_dist(center, p) <= cosh_reach or cosh_dist(center, q) <= cosh_reach:
            return True
        if dlen < 1e-15:
            return False
        k = klein_point(center)
        n = np.array([-dvec[1], dvec[0]]) / dlen
        h = float(n @ kp)
        if abs(sinh_signed_distance(k, n, h)[0]) > sinh_reach:
            return False
        # foot of the perpendicular must fall within the segment; in the
        # Klein model the perpendicular to a chord through the polar point
        foot = _klein_foot(k, kp, kq)
        return foot is not None

    start = t.locate(p)
    return t.tiles_where(accept, start=start)


def _klein_foot(k: np.ndarray, kp: np.ndarray, kq: np.ndarray):
    """Parameter s in [0,1] of the hyperbolic foot of k on segment [kp,kq]."""
    d = kq - kp
    # the perpendicular geodesic from k passes through the pole of the line
    n = np.array([-d[1], d[0]])
    h = float(n @ kp)
    if abs(h) < 1e-15:
        # line through the origin: Euclidean perpendicular
        s = float((k - kp) @ d / (d @ d))
    else:
        pole = n / h
        e = k - pole
        den = e[0] * d[1] - e[1] * d[0]
        if abs(den) < 1e-300:
            return None
        w = kp - pole
        s = -(e[0] * w[1] - e[1] * w[0]) / den
    if -1e-12 <= s <= 1 + 1e-12:
        return s
    return None


def crosses_segment(starts, ends, kp: np.ndarray, kq: np.ndarray):
    """Which chords cross the half-open Klein segment [kp, kq) transversally."""
    e1 = boundary_xy(starts)
    e2 = boundary_xy(ends)
    r = e2 - e1
    d = kq - kp
    den = r[:, 0] * d[1] - r[:, 1] * d[0]
    qp = kp[None, :] - e1
    ok = np.abs(den) > 1e-15
    den = np.where(ok, den, 1.0)
    u = (qp[:, 0] * d[1] - qp[:, 1] * d[0]) / den
    s = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / den
    return ok & (u > 0) & (u < 1) & (s >= 0) & (s < 1)


# ---------------------------------------------------------------------------
# subgroup filters


class CosetFilter:
    """Selects lifts c . axis(r) with c in g_i H d <r>, i.e. the lifts
    belonging to the (g_i)-translate of the H-orbit of axis(w), where
    axis(w) = d . axis(r)."""

    def __init__(self, cover: Cover, coset: int, d: Word, root_word: Word, period: int):
        self.cover = cover
        self.gi_inv = cover.transversal[coset].inverse()
        self.d_inv = d.inverse()
        self.root_word = root_word
        self.period = period

    def __call__(self, c: Word) -> bool:
        cov = self.cover
        base = cov.perm(self.gi_inv * c)
        rinv = self.root_word.inverse()
        tail = cov.perm(self.d_inv)
        step = cov.perm(rinv)
        cur = base
        for _ in range(self.period):
            # (g_i^-1 c r^-k d^-1) H = H ?
            if cur[tail[0]] == 0:
                return True
            cur = tuple(cur[j] for j in step)
        return False


def stabilizer_period(cover: Cover, d: Word, root_word: Word) -> int:
    """Smallest k > 0 with d r^k d^-1 in H."""
    p = cover.perm(d * root_word * d.inverse())
    cur = p
    for k in range(1, cover.degree + 1):
        if cur[0] == 0:
            return k
        cur = tuple(cur[j] for j in p)
    raise UnstableEnumeration("stabilizer period not found")


def check_stable(first: float, second: float, what: str, tol: float = 1e-9) -> float:
    if abs(first - second) > tol * max(1.0, abs(first)):
        raise UnstableEnumeration(f"{what} changed from {first} to {second} when the budget grew")
    return first


def tile_centers(tiles) -> np.ndarray:
    return np.array([act_disk(m, 0j) for _, m in tiles])
