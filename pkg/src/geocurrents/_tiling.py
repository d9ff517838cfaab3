"""The tiling of the disk by translates of the regular 4g-gon and the lifts
("pieces") of closed geodesics that meet the base polygon.

Most computations happen in the Klein model, where the polygon D and all
geodesics are straight.  Group elements are carried as (Word, matrix) pairs
so that the conjugator behind every lift stays available.
"""

from __future__ import annotations

import functools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded
from .hyperbolic_plane import _disk_matrix
from .surface_group import ConjClass, Word, class_conjugators, dehn_reduce, fuchsian_rep

TOL_SIDE = 1e-9
DEDUPE_TOL = 1e-6


def _angles_to_vec(theta):
    return np.stack([-np.cos(theta / 2), np.sin(theta / 2)], axis=-1)


def _vec_to_angles(v):
    return np.mod(2 * np.arctan2(v[..., 1], -v[..., 0]), 2 * math.pi)


def act_angles(mats: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Apply (k,2,2) half-plane matrices to (k,) or (k,m) boundary angles."""
    v = _angles_to_vec(theta)
    if v.ndim == 2:
        out = np.einsum("kij,kj->ki", mats, v)
    else:
        out = np.einsum("kij,kmj->kmi", mats, v)
    return _vec_to_angles(out)


def act_disk(mat: np.ndarray, z):
    md = _disk_matrix(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1])
    return (md[0, 0] * z + md[0, 1]) / (md[1, 0] * z + md[1, 1])


def _fixed_angles(m: np.ndarray):
    """(repelling, attracting) angles of a hyperbolic matrix."""
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    tr = a + d
    if tr < 0:
        a, b, c, d, tr = -a, -b, -c, -d, -tr
    disc = math.sqrt(max(tr * tr - 4.0, 0.0))
    lam_big = (tr + disc) / 2
    lam_small = (tr - disc) / 2
    out = []
    for lam in (lam_small, lam_big):
        v1 = np.array([b, lam - a])
        v2 = np.array([lam - d, c])
        v = v1 if np.abs(v1).max() >= np.abs(v2).max() else v2
        out.append(float(_vec_to_angles(v)))
    return out[0], out[1]


class _PointSet:
    """Set of disk points with tolerant membership (tile centers)."""

    def __init__(self, tol: float = 1e-9):
        self.tol = tol
        self.cells: dict = {}

    def _cell(self, z):
        return (int(math.floor(z.real / self.tol)), int(math.floor(z.imag / self.tol)))

    def add_if_new(self, z) -> bool:
        cx, cy = self._cell(z)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q in self.cells.get((cx + dx, cy + dy), ()):
                    if abs(q - z) < self.tol:
                        return False
        self.cells.setdefault((cx, cy), []).append(z)
        return True


@dataclass(frozen=True)
class Piece:
    """A lift of a closed geodesic, given by its (repelling, attracting)
    endpoint angles and a conjugator c with lift = c . axis(canonical word)."""

    start: float
    end: float
    conj: Word


class Tiling:
    def __init__(self, genus: int):
        self.genus = genus
        self.rep = fuchsian_rep(genus)
        n = 4 * genus
        self.n_sides = n
        alpha = math.pi / (2 * genus)
        cosh_r = 1.0 / (math.tan(math.pi / n) * math.tan(alpha / 2))
        self.circumradius = math.acosh(cosh_r)
        rk = math.tanh(self.circumradius)  # Klein radius of vertices
        ang = math.pi / n + 2 * math.pi * np.arange(n) / n
        self.vertices = rk * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        nang = 2 * math.pi * (np.arange(n) + 1) / n
        self.normals = np.stack([np.cos(nang), np.sin(nang)], axis=1)
        self.offset = rk * math.cos(math.pi / n)
        self.inradius = math.atanh(self.offset)
        # side k joins vertex k to vertex k+1; find the letter across it
        self.side_letter = [0] * n
        for x in list(range(1, 2 * genus + 1)) + [-x for x in range(1, 2 * genus + 1)]:
            c = act_disk(self.rep.generator(x).matrix, 0j)
            k = int(round((math.atan2(c.imag, c.real) % (2 * math.pi)) / (2 * math.pi / n))) - 1
            self.side_letter[k % n] = x
        if sorted(self.side_letter) != sorted(list(range(1, 2 * genus + 1)) + [-x for x in range(1, 2 * genus + 1)]):
            raise RuntimeError("side pairing could not be identified")
        self.mats = {x: self.rep.generator(x).matrix for x in self.side_letter}
        self.neighborhood = self._vertex_neighborhood()

    # -- point classification in the Klein model
    def side_values(self, p: np.ndarray) -> np.ndarray:
        return p @ self.normals.T - self.offset

    def inside(self, p, tol: float = TOL_SIDE) -> bool:
        return bool(np.all(self.side_values(np.asarray(p)) <= tol))

    def in_half_open(self, p) -> bool:
        """Membership in a strict fundamental domain: interior, the sides
        4i and 4i+1 without their far vertices, and the single vertex 0."""
        s = self.side_values(np.asarray(p))
        on = np.abs(s) <= TOL_SIDE
        if np.any(s > TOL_SIDE):
            return False
        idx = np.nonzero(on)[0]
        if len(idx) == 0:
            return True
        if len(idx) >= 2:
            # a vertex: vertex k is shared by sides k-1 and k
            n = self.n_sides
            ks = set(int(i) for i in idx)
            return ks == {n - 1, 0}
        return int(idx[0]) % 4 in (0, 1)

    # -- tiles
    def _vertex_neighborhood(self):
        n = self.n_sides
        vd = self.vertices / (1 + np.sqrt(1 - (self.vertices ** 2).sum(axis=1)))[:, None]
        vdisk = vd[:, 0] + 1j * vd[:, 1]
        start = (Word((), self.genus), np.eye(2))
        seen = _PointSet()
        seen.add_if_new(0j)
        out = [start]
        queue = deque([start])
        while queue:
            w, m = queue.popleft()
            for x in self.side_letter:
                m2 = m @ self.mats[x]
                img = act_disk(m2, vdisk)
                if np.min(np.abs(img[:, None] - vdisk[None, :])) > 1e-8:
                    continue
                if not seen.add_if_new(act_disk(m2, 0j)):
                    continue
                w2 = w * Word((x,), self.genus)
                out.append((w2, m2))
                queue.append((w2, m2))
        expected = 1 + n + n * (4 * self.genus - 3)
        if len(out) != expected:
            raise RuntimeError(f"vertex neighborhood has {len(out)} tiles, expected {expected}")
        return out

    def locate(self, z: complex, max_steps: int = 10_000):
        """(word, matrix) of a tile containing the disk point z."""
        w = Word((), self.genus)
        m = np.eye(2)
        for _ in range(max_steps):
            loc = act_disk(np.linalg.inv(m), z)
            k = 2 * loc / (1 + abs(loc) ** 2)
            s = self.side_values(np.array([k.real, k.imag]))
            j = int(np.argmax(s))
            if s[j] <= TOL_SIDE:
                return w, m
            x = self.side_letter[j]
            w = w * Word((x,), self.genus)
            m = m @ self.mats[x]
        raise BudgetExceeded("point location did not terminate")

    def tiles_where(self, accept, start=None, max_tiles: int = 2_000_000):
        """Breadth-first search over tiles whose (word, matrix, center) pass
        accept; the start tile must be accepted."""
        if start is None:
            start = (Word((), self.genus), np.eye(2))
        out = []
        seen = _PointSet()
        seen.add_if_new(act_disk(start[1], 0j))
        queue = deque([start])
        while queue:
            w, m = queue.popleft()
            center = act_disk(m, 0j)
            if not accept(w, m, center):
                continue
            out.append((w, m))
            if len(out) > max_tiles:
                raise BudgetExceeded("tile search exceeded its budget")
            for x in self.side_letter:
                m2 = m @ self.mats[x]
                if not seen.add_if_new(act_disk(m2, 0j)):
                    continue
                queue.append((w * Word((x,), self.genus), m2))
        return out

    # -- lifts of closed geodesics
    def chords_meet(self, starts, ends, tol: float = 1e-12) -> np.ndarray:
        """Which chords (given by endpoint angles) meet the closed polygon."""
        e1 = np.stack([np.cos(starts), np.sin(starts)], axis=-1)
        e2 = np.stack([np.cos(ends), np.sin(ends)], axis=-1)
        d = e2 - e1
        rel = self.vertices[None, :, :] - e1[:, None, :]
        cross = d[:, None, 0] * rel[:, :, 1] - d[:, None, 1] * rel[:, :, 0]
        scale = np.linalg.norm(d, axis=1)[:, None]
        cross = cross / scale
        return (cross.min(axis=1) <= tol) & (cross.max(axis=1) >= -tol)

    @functools.lru_cache(maxsize=50_000)
    def pieces(self, cls: ConjClass) -> tuple:
        """Lifts of the closed geodesic of cls that meet the closed polygon."""
        canon, _, members = class_conjugators(cls.word)
        if canon != cls:
            raise ValueError("pieces() expects a canonical class")
        rep = self.rep
        g = self.genus
        axis_m = rep.matrix(canon.word)
        s0, e0 = _fixed_angles(axis_m)
        conj_words = []
        conj_mats = []
        for m, cm in members:
            for i in range(len(m)):
                c = dehn_reduce(Word(tuple(-x for x in reversed(m[:i])), g) * cm)
                mc = rep.matrix(c)
                for u, mu in self.neighborhood:
                    conj_words.append((u, c))
                    conj_mats.append(mu @ mc)
        mats = np.array(conj_mats)
        ang = act_angles(mats, np.tile(np.array([s0, e0]), (len(mats), 1)))
        hit = self.chords_meet(ang[:, 0], ang[:, 1])
        # group candidates by endpoints; keep the shortest conjugator and
        # recompute its endpoints from scratch
        groups: list = []
        for idx in np.nonzero(hit)[0]:
            a, b = ang[idx]
            u, c = conj_words[idx]
            for grp in groups:
                if _close_angle(a, grp[0], DEDUPE_TOL) and _close_angle(b, grp[1], DEDUPE_TOL):
                    grp[2].append(u * c)
                    break
            else:
                groups.append([a, b, [u * c]])
        out = []
        for a, b, words in groups:
            best = min((dehn_reduce(w) for w in words), key=lambda w: (len(w), w.letters))
            s, e = _fixed_angles(rep.matrix(best * canon.word * best.inverse()))
            out.append(Piece(s, e, best))
        out.sort(key=lambda p: (p.start, p.end))
        return tuple(out)


def _close_angle(a: float, b: float, tol: float = 1e-9) -> bool:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d) < tol


@functools.lru_cache(maxsize=None)
def tiling(genus: int = 2) -> Tiling:
    return Tiling(genus)


def chord_crossing(a1, b1, a2, b2):
    """Klein-model intersection of two chords given by endpoint angles, or
    None when they do not cross in the open disk."""
    p = np.array([math.cos(a1), math.sin(a1)])
    r = np.array([math.cos(b1), math.sin(b1)]) - p
    q = np.array([math.cos(a2), math.sin(a2)])
    s = np.array([math.cos(b2), math.sin(b2)]) - q
    den = r[0] * s[1] - r[1] * s[0]
    if abs(den) < 1e-15:
        return None
    qp = q - p
    t = (qp[0] * s[1] - qp[1] * s[0]) / den
    u = (qp[0] * r[1] - qp[1] * r[0]) / den
    if not (0.0 < t < 1.0 and 0.0 < u < 1.0):
        return None
    return p + t * r


def _same_geodesic(p: Piece, q: Piece) -> bool:
    return (_close_angle(p.start, q.start, DEDUPE_TOL) and _close_angle(p.end, q.end, DEDUPE_TOL)) or (
        _close_angle(p.start, q.end, DEDUPE_TOL) and _close_angle(p.end, q.start, DEDUPE_TOL))


def crossing_points(t: Tiling, pieces1, pieces2):
    """Ordered pairs of distinct crossing lifts whose intersection lies in the
    strict fundamental domain, with the Klein crossing point."""
    out = []
    for i, p in enumerate(pieces1):
        for j, q in enumerate(pieces2):
            if _same_geodesic(p, q):
                continue
            z = chord_crossing(p.start, p.end, q.start, q.end)
            if z is None:
                continue
            if t.in_half_open(z):
                out.append((i, j, z))
    return out


def root_intersection(r1: ConjClass, r2: ConjClass) -> int:
    """Transverse intersection count of two primitive classes; for r1 = r2
    every double point is seen twice."""
    t = tiling(r1.genus)
    return len(crossing_points(t, t.pieces(r1), t.pieces(r2)))
