"""Hyperbolic plane arithmetic in the disk and upper half-plane models.

Boundary points are stored as angles on the unit circle.  The half-plane
coordinate x and the disk angle theta are related through the Cayley map
w = (z - i)/(z + i), which gives x = -cot(theta/2); the point at infinity
sits at theta = 0 and increasing x runs counterclockwise.

Isometries are real unimodular 2x2 matrices acting on the half-plane.
Points of the open disk are complex numbers; geodesics are pairs of
boundary points.  The Klein model is used internally for chord
intersections because geodesics are straight lines there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadCyclicOrder, CoincidentPoints, DomainError, NotHyperbolic

TWO_PI = 2.0 * math.pi

# geometric predicates vs. algebraic identities
TOL_GEOM = 1e-10
TOL_ALG = 1e-12
_EPS = float(np.finfo(float).eps)


def _wrap(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0:
        t += TWO_PI
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def angular_gap(t1: float, t2: float) -> float:
    """Unsigned separation of two angles on the circle, in [0, pi]."""
    d = abs(_wrap(t1 - t2))
    return min(d, TWO_PI - d)


def ccw_offset(start: float, t: float) -> float:
    """Counterclockwise angle from start to t, in [0, 2pi)."""
    return _wrap(t - start)


# ---------------------------------------------------------------------------
# Moebius maps


@dataclass(frozen=True)
class MoebiusMap:
    """An element of PSL(2,R) stored as a canonical unimodular matrix."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = float(self.a), float(self.b), float(self.c), float(self.d)
        det = a * d - b * c
        # Rescale only when det is off by more than rounding of the entries
        # explains: for long words a*d ~ b*c is huge, the computed det is
        # mostly cancellation noise, and dividing by it would corrupt the
        # trace.  This also makes canonicalization idempotent.
        noise = max(1e-14, 8 * _EPS * (abs(a * d) + abs(b * c)))
        if abs(det - 1.0) > noise:
            if not det > 0:
                raise DomainError(f"matrix must have positive determinant, got {det}")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        # the first entry of (a, b, c) that is not negligible is made positive
        scale = max(abs(a), abs(b), abs(c), abs(d))
        for x in (a, b, c):
            if abs(x) > 1e-14 * scale:
                if x < 0:
                    a, b, c, d = -a, -b, -c, -d
                break
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def diagonal(cls, length: float) -> "MoebiusMap":
        """Translation by `length` along the imaginary axis, towards infinity."""
        return cls(math.exp(length / 2), 0.0, 0.0, math.exp(-length / 2))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return mobius_compose(self, other)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def conjugate_by(self, h: "MoebiusMap") -> "MoebiusMap":
        """Return h * self * h^-1."""
        return h @ self @ h.inverse()

    def is_close(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        x = np.array([self.a, self.b, self.c, self.d])
        y = np.array([other.a, other.b, other.c, other.d])
        return bool(min(np.abs(x - y).max(), np.abs(x + y).max()) <= tol)

    def is_hyperbolic(self, tol: float = TOL_GEOM) -> bool:
        return abs(self.trace) > 2.0 + tol

    # -- actions ---------------------------------------------------------
    def apply(self, z):
        """Action on the closed upper half-plane (complex, real or inf)."""
        if z == math.inf or (isinstance(z, complex) and math.isinf(abs(z))):
            return math.inf if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return math.inf
        return (self.a * z + self.b) / den

    def apply_angle(self, theta: float) -> float:
        u, v = -math.cos(theta / 2), math.sin(theta / 2)
        u2 = self.a * u + self.b * v
        v2 = self.c * u + self.d * v
        return _wrap(2.0 * math.atan2(v2, -u2))

    def disk_matrix(self) -> np.ndarray:
        """The SU(1,1) matrix of this map acting on the unit disk."""
        return _disk_matrix(self.a, self.b, self.c, self.d)

    def apply_disk(self, z: complex) -> complex:
        m = self.disk_matrix()
        return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _disk_matrix(a, b, c, d) -> np.ndarray:
    # C M C^-1 with C = [[1, -i], [1, i]]
    al = 0.5 * complex(a + d, b - c)
    be = 0.5 * complex(a - d, -(b + c))
    return np.array([[al, be], [be.conjugate(), al.conjugate()]])


def mobius_compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """Matrix product m1 * m2, renormalized and sign-canonicalized."""
    return MoebiusMap(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )


def disk_map_from_sl2(a: float, b: float, c: float, d: float) -> np.ndarray:
    return _disk_matrix(a, b, c, d)


# ---------------------------------------------------------------------------
# points, boundary points, geodesics


def halfplane_to_angle(x: float) -> float:
    if math.isinf(x):
        return 0.0
    # x = -cot(theta/2)  =>  theta/2 = atan2(1, -x)
    return _wrap(2.0 * math.atan2(1.0, -x))


def angle_to_halfplane(theta: float) -> float:
    s = math.sin(theta / 2)
    if abs(s) < 1e-300:
        return math.inf
    return -math.cos(theta / 2) / s


def halfplane_to_disk(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def disk_to_halfplane(w: complex) -> complex:
    return 1j * (1 + w) / (1 - w)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of the boundary circle, stored as an angle in [0, 2pi)."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _wrap(float(self.angle)))

    @classmethod
    def from_halfplane(cls, x: float) -> "BoundaryPoint":
        return cls(halfplane_to_angle(x))

    @classmethod
    def from_degrees(cls, deg: float) -> "BoundaryPoint":
        return cls(math.radians(deg))

    @property
    def halfplane(self) -> float:
        return angle_to_halfplane(self.angle)

    @property
    def disk(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return angular_gap(self.angle, other.angle) <= TOL_ALG

    __hash__ = None

    def __repr__(self):
        return f"BoundaryPoint({self.angle:.15g})"


def _as_angle(p) -> float:
    if isinstance(p, BoundaryPoint):
        return p.angle
    return _wrap(float(p))


@dataclass(frozen=True, eq=False)
class Geodesic:
    """A complete geodesic; `start` and `end` give an orientation that
    equality ignores."""

    start: BoundaryPoint
    end: BoundaryPoint

    def __post_init__(self):
        s, e = self.start, self.end
        if not isinstance(s, BoundaryPoint):
            object.__setattr__(self, "start", BoundaryPoint(s))
        if not isinstance(e, BoundaryPoint):
            object.__setattr__(self, "end", BoundaryPoint(e))
        if angular_gap(self.start.angle, self.end.angle) <= TOL_GEOM:
            raise CoincidentPoints("geodesic endpoints coincide")

    @property
    def endpoints(self) -> tuple:
        return (self.start, self.end)

    def reversed(self) -> "Geodesic":
        return Geodesic(self.end, self.start)

    def moved(self, m: MoebiusMap) -> "Geodesic":
        return Geodesic(
            BoundaryPoint(m.apply_angle(self.start.angle)),
            BoundaryPoint(m.apply_angle(self.end.angle)),
        )

    def __eq__(self, other):
        if not isinstance(other, Geodesic):
            return NotImplemented
        return (self.start == other.start and self.end == other.end) or (
            self.start == other.end and self.end == other.start
        )

    __hash__ = None


@dataclass(frozen=True)
class PlanePoint:
    """A point of the open unit disk."""

    z: complex

    def __post_init__(self):
        z = complex(self.z)
        if not abs(z) < 1 - 1e-12:
            raise DomainError(f"point {z} is not inside the open disk")
        object.__setattr__(self, "z", z)

    @classmethod
    def from_halfplane(cls, z: complex) -> "PlanePoint":
        return cls(halfplane_to_disk(z))

    @property
    def halfplane(self) -> complex:
        return disk_to_halfplane(self.z)

    @property
    def klein(self) -> np.ndarray:
        return klein_from_disk(self.z)

    def moved(self, m: MoebiusMap) -> "PlanePoint":
        return PlanePoint(m.apply_disk(self.z))


ORIGIN = PlanePoint(0j)


def klein_from_disk(z: complex) -> np.ndarray:
    s = 2.0 / (1.0 + abs(z) ** 2)
    return np.array([s * z.real, s * z.imag])


def disk_from_klein(k) -> complex:
    k = np.asarray(k, dtype=float)
    r2 = float(k @ k)
    return complex(k[0], k[1]) / (1.0 + math.sqrt(max(0.0, 1.0 - r2)))


# ---------------------------------------------------------------------------
# operations


def cross_ratio_log(a, b, c, d) -> float:
    """Liouville mass of the box of geodesics joining the arc [a,b] to [c,d].

    The four points must occur around the circle in the cyclic order
    a, b, c, d, in either orientation.  The value is
    log(|a-c| |b-d| / (|a-d| |b-c|)) with chordal distances, which is
    positive and Moebius invariant.
    """
    ta, tb, tc, td = (_as_angle(p) for p in (a, b, c, d))
    pts = (ta, tb, tc, td)
    for i in range(4):
        for j in range(i + 1, 4):
            if angular_gap(pts[i], pts[j]) < TOL_GEOM:
                raise CoincidentPoints("box corners coincide")
    ob, oc, od = ccw_offset(ta, tb), ccw_offset(ta, tc), ccw_offset(ta, td)
    if not (ob < oc < od or ob > oc > od):
        raise BadCyclicOrder("points are not in cyclic order a, b, c, d")

    def chord(s, t):
        return abs(math.sin((s - t) / 2))

    return math.log(chord(ta, tc)) + math.log(chord(tb, td)) - math.log(chord(ta, td)) - math.log(
        chord(tb, tc)
    )


def _eigvec(m: MoebiusMap, lam: float):
    v1 = (m.b, lam - m.a)
    v2 = (lam - m.d, m.c)
    if math.hypot(*v1) >= math.hypot(*v2):
        return v1
    return v2


def fixed_points(m: MoebiusMap, tol: float = TOL_GEOM) -> tuple:
    """(repelling, attracting) fixed angles of a hyperbolic map."""
    t = m.trace
    if not abs(t) > 2.0 + tol:
        raise NotHyperbolic(f"|trace| = {abs(t)} is not > 2")
    sgn = 1.0 if t > 0 else -1.0
    at = abs(t)
    lam = 0.5 * (at + math.sqrt((at - 2.0) * (at + 2.0)))
    # eigenvalues of the matrix are sgn*lam (attracting) and sgn/lam
    u, v = _eigvec(m, sgn * lam)
    att = _wrap(2.0 * math.atan2(v, -u))
    u, v = _eigvec(m, sgn / lam)
    rep = _wrap(2.0 * math.atan2(v, -u))
    return rep, att


def axis(m: MoebiusMap, tol: float = TOL_GEOM) -> Geodesic:
    """Oriented axis of a hyperbolic map, from repelling to attracting point."""
    rep, att = fixed_points(m, tol)
    return Geodesic(BoundaryPoint(rep), BoundaryPoint(att))


def translation_length(m: MoebiusMap, tol: float = TOL_GEOM) -> float:
    t = abs(m.trace)
    if not t > 2.0 + tol:
        raise NotHyperbolic(f"|trace| = {t} is not > 2")
    return 2.0 * math.acosh(t / 2.0)


def _separates(s: float, e: float, x: float) -> bool:
    """True iff x lies on the counterclockwise open arc from s to e."""
    return 0.0 < ccw_offset(s, x) < ccw_offset(s, e)


def linked(g1: Geodesic, g2: Geodesic, tol: float = TOL_GEOM) -> bool:
    """True iff the endpoints of g2 separate the endpoints of g1."""
    s1, e1 = g1.start.angle, g1.end.angle
    s2, e2 = g2.start.angle, g2.end.angle
    for p in (s1, e1):
        for q in (s2, e2):
            if angular_gap(p, q) <= tol:
                raise CoincidentPoints("geodesics share an endpoint")
    return _separates(s1, e1, s2) != _separates(s1, e1, e2)


def hyp_distance(p: PlanePoint, q: PlanePoint) -> float:
    zp = p.z if isinstance(p, PlanePoint) else complex(p)
    zq = q.z if isinstance(q, PlanePoint) else complex(q)
    num = abs(zp - zq)
    if num == 0.0:
        return 0.0
    den = math.sqrt((1.0 - abs(zp) ** 2) * (1.0 - abs(zq) ** 2))
    return 2.0 * math.asinh(num / den)


# ---------------------------------------------------------------------------
# helpers built on the operations above


def angle_vector(theta: float) -> tuple:
    """Projective half-plane coordinates [u : v] of a boundary angle."""
    return (-math.cos(theta / 2), math.sin(theta / 2))


def geodesic_frame(g: Geodesic) -> MoebiusMap:
    """Map sending the imaginary axis (0 to infinity) onto g, start to end,
    with i sent to the point of g closest to the disk origin."""
    us, vs = angle_vector(g.start.angle)
    ue, ve = angle_vector(g.end.angle)
    det = ue * vs - us * ve
    if det < 0:
        us, vs = -us, -vs
        det = -det
    s = 1.0 / math.sqrt(det)
    f0 = MoebiusMap(ue * s, us * s, ve * s, vs * s)
    w = f0.inverse().apply(1j)
    r = abs(w)
    return f0 @ MoebiusMap(math.sqrt(r), 0.0, 0.0, 1.0 / math.sqrt(r))


def point_on_geodesic(g: Geodesic, t: float) -> PlanePoint:
    """Point at signed distance t from the foot of the perpendicular
    dropped from the origin, positive towards g.end."""
    f = geodesic_frame(g)
    return PlanePoint(halfplane_to_disk(f.apply(1j * math.exp(t))))


def geodesic_param(g: Geodesic, p: PlanePoint) -> float:
    """Signed parameter along g of the orthogonal projection of p."""
    f = geodesic_frame(g)
    w = f.inverse().apply(p.halfplane)
    return math.log(abs(w))


def geodesic_intersection(g1: Geodesic, g2: Geodesic) -> PlanePoint:
    """Crossing point of two linked geodesics."""
    k = chord_intersection(
        g1.start.angle, g1.end.angle, g2.start.angle, g2.end.angle
    )
    if k is None:
        raise DomainError("geodesics do not cross")
    return PlanePoint(disk_from_klein(k))


def chord_intersection(a1: float, a2: float, b1: float, b2: float):
    """Klein-model intersection of two chords given by endpoint angles."""
    p1 = np.array([math.cos(a1), math.sin(a1)])
    p2 = np.array([math.cos(a2), math.sin(a2)])
    q1 = np.array([math.cos(b1), math.sin(b1)])
    q2 = np.array([math.cos(b2), math.sin(b2)])
    m = np.column_stack([p2 - p1, q1 - q2])
    det = np.linalg.det(m)
    if abs(det) < 1e-300:
        return None
    s, t = np.linalg.solve(m, q1 - p1)
    if not (0 <= s <= 1 and 0 <= t <= 1):
        return None
    return p1 + s * (p2 - p1)


def moebius_from_disk_points(p: PlanePoint, q: PlanePoint) -> MoebiusMap:
    """Isometry sending p to the origin and q to the positive real axis."""
    zp = p.z
    # disk map z -> (z - p)/(1 - conj(p) z) and a rotation
    w = (q.z - zp) / (1 - zp.conjugate() * q.z)
    rot = -math.atan2(w.imag, w.real)
    al = complex(math.cos(rot / 2), math.sin(rot / 2))
    # SU(1,1): rotation R = diag(al, conj(al)); translation T = [[1,-p],[-conj p,1]]/sqrt(1-|p|^2)
    n = 1.0 / math.sqrt(1 - abs(zp) ** 2)
    t = np.array([[1, -zp], [-zp.conjugate(), 1]]) * n
    r = np.array([[al, 0], [0, al.conjugate()]])
    md = r @ t
    return _sl2_from_disk(md)


def _sl2_from_disk(md: np.ndarray) -> MoebiusMap:
    # inverse of C M C^-1, M = C^-1 md C
    c = np.array([[1, -1j], [1, 1j]])
    m = np.linalg.inv(c) @ md @ c
    return MoebiusMap(m[0, 0].real, m[0, 1].real, m[1, 0].real, m[1, 1].real)
