"""Geodesic currents: the data model and measure evaluation.

Four variants are supported: the Liouville current of a Fuchsian
representation, weighted multicurves (``Atomic``), real linear combinations
(possibly signed), and transfer images of currents on a finite cover.
Currents on a cover are written as ``LiftedAtomic``: closed curves of the
cover given by words of the subgroup H.

Boxes and transversals live in the disk of the regular representation of
the genus; atomic masses are exact lift counts over a region of tiles,
recomputed with a larger region as a stability check.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _lifts
from ._tiling import tiling
from .errors import (
    BadCyclicOrder,
    CoincidentPoints,
    ConfigError,
    DomainError,
    InvalidCover,
    PreconditionError,
    TrivialWord,
)
from .hyperbolic_plane import (
    TOL_GEOM,
    BoundaryPoint,
    MoebiusMap,
    PlanePoint,
    ccw_offset,
    cross_ratio_log,
)
from .surface_group import (
    ConjClass,
    Cover,
    FuchsianRep,
    Word,
    canonical_conj,
    class_conjugators,
    fuchsian_rep,
    twisted_rep,
)

DEFAULT_MARGIN = 0.5
STABILITY_STEP = 2.0

# ---------------------------------------------------------------------------
# boxes and transversals


@dataclass(frozen=True, eq=False)
class Box:
    """Geodesics with one endpoint in [a, b) and the other in [c, d).

    Corners are stored counterclockwise.  Corners given clockwise are
    reordered to (d, c, b, a), so the half-open ends refer to the stored
    order."""

    a: BoundaryPoint
    b: BoundaryPoint
    c: BoundaryPoint
    d: BoundaryPoint

    def __post_init__(self):
        pts = [p if isinstance(p, BoundaryPoint) else BoundaryPoint(p) for p in (self.a, self.b, self.c, self.d)]
        ang = [p.angle for p in pts]
        for i in range(4):
            for j in range(i + 1, 4):
                g = abs(ang[i] - ang[j]) % (2 * math.pi)
                if min(g, 2 * math.pi - g) < TOL_GEOM:
                    raise CoincidentPoints("box corners coincide")
        ob, oc, od = (ccw_offset(ang[0], x) for x in ang[1:])
        if ob < oc < od:
            pass
        elif ob > oc > od:
            pts = pts[::-1]
        else:
            raise BadCyclicOrder("box corners are not in cyclic order")
        for name, p in zip("abcd", pts):
            object.__setattr__(self, name, p)

    @classmethod
    def from_angles(cls, a: float, b: float, c: float, d: float) -> "Box":
        return cls(BoundaryPoint(a), BoundaryPoint(b), BoundaryPoint(c), BoundaryPoint(d))

    @classmethod
    def from_halfplane(cls, a: float, b: float, c: float, d: float) -> "Box":
        return cls(*(BoundaryPoint.from_halfplane(x) for x in (a, b, c, d)))

    @classmethod
    def random(cls, rng: np.random.Generator, min_gap: float = 1e-3) -> "Box":
        while True:
            t = np.sort(rng.uniform(0, 2 * math.pi, 4))
            gaps = np.diff(np.append(t, t[0] + 2 * math.pi))
            if gaps.min() > min_gap:
                return cls.from_angles(*t)

    @property
    def angles(self) -> tuple:
        return (self.a.angle, self.b.angle, self.c.angle, self.d.angle)

    def opposite(self) -> "Box":
        return Box(self.b, self.c, self.d, self.a)

    def moved(self, m: MoebiusMap) -> "Box":
        return Box(*(BoundaryPoint(m.apply_angle(p.angle)) for p in (self.a, self.b, self.c, self.d)))

    def contains(self, start, end) -> np.ndarray:
        """Membership of unoriented geodesics given by endpoint angles."""
        a, b, c, d = self.angles
        s_ab = _lifts.in_arc(start, a, b)
        s_cd = _lifts.in_arc(start, c, d)
        e_ab = _lifts.in_arc(end, a, b)
        e_cd = _lifts.in_arc(end, c, d)
        return (s_ab & e_cd) | (s_cd & e_ab)

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        mine = ((self.a, self.b), (self.c, self.d))
        theirs = ((other.a, other.b), (other.c, other.d))
        return mine == theirs or mine == theirs[::-1]

    __hash__ = None

    def __repr__(self):
        return "Box({:.12g}, {:.12g}, {:.12g}, {:.12g})".format(*self.angles)


def opposite_box(b: Box) -> Box:
    """The box [b, c) x [d, a) of the complementary arcs."""
    return b.opposite()


def _segments_meet(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    # geodesic segments meet iff their Klein segments do
    a, b = _lifts.klein_point(p1), _lifts.klein_point(p2)
    c, d = _lifts.klein_point(q1), _lifts.klein_point(q2)

    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def on(p, q, r):
        return abs(orient(p, q, r)) < 1e-15 and min(p[0], q[0]) - 1e-15 <= r[0] <= max(p[0], q[0]) + 1e-15 and \
            min(p[1], q[1]) - 1e-15 <= r[1] <= max(p[1], q[1]) + 1e-15

    return on(a, b, c) or on(a, b, d) or on(c, d, a) or on(c, d, b)


@dataclass(frozen=True)
class Transversal:
    """The double transversal G([w, x), [y, z)) with its opposite
    G([x, y), [z, w))."""

    x: PlanePoint
    y: PlanePoint
    z: PlanePoint
    w: PlanePoint

    def __post_init__(self):
        pts = [p if isinstance(p, PlanePoint) else PlanePoint(p) for p in (self.x, self.y, self.z, self.w)]
        for name, p in zip("xyzw", pts):
            object.__setattr__(self, name, p)
        if _segments_meet(self.w.z, self.x.z, self.y.z, self.z.z):
            raise DomainError("segments [w,x) and [y,z) must be disjoint")

    def segments(self) -> tuple:
        return ((self.w, self.x), (self.y, self.z))

    def opposite_segments(self) -> tuple:
        return ((self.x, self.y), (self.z, self.w))


# ---------------------------------------------------------------------------
# current variants


class Current:
    """Base class; supports + , - and scalar multiplication."""

    genus: int

    @property
    def is_signed(self) -> bool:
        return False

    def __add__(self, other: "Current") -> "Current":
        if not isinstance(other, Current):
            return NotImplemented
        return Combination(((1.0, self), (1.0, other)))

    def __sub__(self, other: "Current") -> "Current":
        if not isinstance(other, Current):
            return NotImplemented
        return Combination(((1.0, self), (-1.0, other)))

    def __mul__(self, s: float) -> "Current":
        if not isinstance(s, (int, float)):
            return NotImplemented
        return Combination(((float(s), self),))

    __rmul__ = __mul__

    def __neg__(self) -> "Current":
        return self * -1.0

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Liouville(Current):
    rep: FuchsianRep

    @property
    def genus(self) -> int:
        return self.rep.genus

    @property
    def is_base(self) -> bool:
        return self.rep is fuchsian_rep(self.genus)

    def describe(self) -> str:
        return f"liouville[{self.rep.name}]"


def _merge_atoms(pairs: Iterable) -> tuple:
    acc: dict = {}
    for cls, w in pairs:
        acc[cls] = acc.get(cls, 0.0) + float(w)
    return tuple(sorted(acc.items(), key=lambda kv: kv[0].sort_key()))


@dataclass(frozen=True, eq=False)
class Atomic(Current):
    """Weighted multicurve sum w_i delta_{gamma_i} with w_i > 0."""

    atoms: tuple
    genus: int = 2

    def __post_init__(self):
        pairs = []
        for cls, w in self.atoms:
            if not isinstance(cls, ConjClass):
                word = cls if isinstance(cls, Word) else Word.parse(str(cls), self.genus)
                cls = canonical_conj(word)
            if cls.genus != self.genus:
                raise DomainError("atom genus does not match")
            if not float(w) > 0:
                raise DomainError("atomic weights must be positive")
            pairs.append((cls, w))
        object.__setattr__(self, "atoms", _merge_atoms(pairs))

    @classmethod
    def from_words(cls, weights: dict, genus: int = 2) -> "Atomic":
        return cls(tuple(weights.items()), genus)

    def describe(self) -> str:
        return "atomic[" + ", ".join(f"{c}:{w:g}" for c, w in self.atoms) + "]"


@dataclass(frozen=True, eq=False)
class LiftedAtomic(Current):
    """Weighted closed curves on a cover, each given by a word of H."""

    cover: Cover
    atoms: tuple

    def __post_init__(self):
        pairs = []
        for word, w in self.atoms:
            if not isinstance(word, Word):
                word = Word.parse(str(word), self.cover.genus)
            if not self.cover.in_subgroup(word):
                raise InvalidCover(f"{word} is not in the subgroup of the cover")
            if word.is_trivial():
                raise TrivialWord("atoms must be nontrivial")
            if not float(w) > 0:
                raise DomainError("atomic weights must be positive")
            pairs.append((word, float(w)))
        object.__setattr__(self, "atoms", tuple(pairs))

    @property
    def genus(self) -> int:
        return self.cover.genus

    def describe(self) -> str:
        return "lifted[" + ", ".join(f"{w}:{x:g}" for w, x in self.atoms) + "]"


@dataclass(frozen=True, eq=False)
class Combination(Current):
    """Real linear combination; nested combinations are flattened."""

    terms: tuple

    def __post_init__(self):
        flat = []
        for coef, cur in self.terms:
            if isinstance(cur, Combination):
                flat.extend((float(coef) * c2, x) for c2, x in cur.terms)
            else:
                flat.append((float(coef), cur))
        if not flat:
            raise DomainError("empty combination")
        g = {c.genus for _, c in flat}
        if len(g) != 1:
            raise DomainError("currents of different genus cannot be combined")
        object.__setattr__(self, "terms", tuple(flat))

    @property
    def genus(self) -> int:
        return self.terms[0][1].genus

    @property
    def is_signed(self) -> bool:
        net = net_atoms(self)
        if net is not None:
            return any(w < 0 for _, w in net)
        return any(c < 0 or cur.is_signed for c, cur in self.terms)

    def describe(self) -> str:
        return " + ".join(f"{c:g}*{cur.describe()}" for c, cur in self.terms)


@dataclass(frozen=True, eq=False)
class TransferImage(Current):
    """Averaged pushforward (1/n) sum_i (g_i)_* of a current on a cover."""

    cover: Cover
    inner: Current

    def __post_init__(self):
        _check_cover_current(self.inner)

    @property
    def genus(self) -> int:
        return self.cover.genus

    @property
    def is_signed(self) -> bool:
        return self.inner.is_signed

    def materialize(self) -> Current:
        """The pushforward as a current on the base surface."""
        n = self.cover.degree
        inner = self.inner
        if isinstance(inner, LiftedAtomic):
            return Atomic(tuple((canonical_conj(w), x / n) for w, x in inner.atoms), self.genus)
        if isinstance(inner, Atomic):
            return Atomic(tuple((c, x / n) for c, x in inner.atoms), self.genus)
        if isinstance(inner, Liouville):
            return inner
        if isinstance(inner, Combination):
            return Combination(tuple((c, TransferImage(self.cover, x).materialize()) for c, x in inner.terms))
        raise PreconditionError(f"cannot materialize transfer of {type(inner).__name__}")

    def describe(self) -> str:
        return f"transfer[deg {self.cover.degree}]({self.inner.describe()})"


def _check_cover_current(c: Current) -> None:
    if isinstance(c, Combination):
        for _, x in c.terms:
            _check_cover_current(x)
    elif isinstance(c, TransferImage):
        raise PreconditionError("nested transfers are not supported")


def transfer(cover: Cover, c: Current) -> TransferImage:
    """Transfer a current on the cover down to the base surface.

    Atomic inner currents are read as curves on the cover: their canonical
    words must lie in the subgroup."""
    if isinstance(c, Atomic):
        c = LiftedAtomic(cover, tuple((cls.word, w) for cls, w in c.atoms))
    elif isinstance(c, Combination):
        c = Combination(tuple((k, _lift_atomic(cover, x)) for k, x in c.terms))
    return TransferImage(cover, c)


def _lift_atomic(cover: Cover, c: Current) -> Current:
    if isinstance(c, Atomic):
        return LiftedAtomic(cover, tuple((cls.word, w) for cls, w in c.atoms))
    return c


def net_atoms(c: Current):
    """Flattened (class, weight) list when c is a combination of atomic
    currents, otherwise None."""
    if isinstance(c, Atomic):
        return list(c.atoms)
    if isinstance(c, Combination):
        acc: dict = {}
        for coef, cur in c.terms:
            sub = net_atoms(cur)
            if sub is None:
                return None
            for cls, w in sub:
                acc[cls] = acc.get(cls, 0.0) + coef * w
        return sorted(((k, v) for k, v in acc.items() if v != 0.0), key=lambda kv: kv[0].sort_key())
    if isinstance(c, TransferImage):
        return net_atoms(c.materialize())
    return None


# ---------------------------------------------------------------------------
# box masses


def _lift_plan(c: Current, scale: float = 1.0, out=None):
    """Flatten a current into ('liouville', coef, rep) and
    ('lifts', coef, root, multiplicity, filter) items."""
    if out is None:
        out = []
    if isinstance(c, Liouville):
        out.append(("liouville", scale, c.rep))
    elif isinstance(c, Atomic):
        for cls, w in c.atoms:
            root, m = cls.root()
            out.append(("lifts", scale * w * m, root, None))
    elif isinstance(c, Combination):
        for coef, x in c.terms:
            _lift_plan(x, scale * coef, out)
    elif isinstance(c, TransferImage):
        _transfer_plan(c.cover, c.inner, scale / c.cover.degree, out)
    elif isinstance(c, LiftedAtomic):
        # a current on the cover, evaluated on lifts of the H-orbits only
        for word, w in c.atoms:
            for item in _coset_items(c.cover, word, w * scale, cosets=(0,)):
                out.append(item)
    else:
        raise PreconditionError(f"unsupported current {type(c).__name__}")
    return out


def _transfer_plan(cover: Cover, inner: Current, scale: float, out):
    if isinstance(inner, Combination):
        for coef, x in inner.terms:
            _transfer_plan(cover, x, scale * coef, out)
    elif isinstance(inner, Liouville):
        # every coset contributes the same Liouville mass
        out.append(("liouville", scale * cover.degree, inner.rep))
    elif isinstance(inner, LiftedAtomic):
        for word, w in inner.atoms:
            out.extend(_coset_items(cover, word, w * scale, cosets=range(cover.degree)))
    else:
        raise PreconditionError(f"unsupported inner current {type(inner).__name__}")


def _coset_items(cover: Cover, word: Word, weight: float, cosets):
    """Lift items for (g_i)_* delta^Y_word over the given cosets i."""
    cls, to_canon, _ = class_conjugators(word)
    root, m = cls.root()
    d, root_word = _root_conjugator(cls, to_canon, root)
    k0 = _lifts.stabilizer_period(cover, d, root_word)
    if m % k0:
        raise InvalidCover("word is not in the subgroup")
    j = m // k0
    return [("lifts", weight * j, root, _lifts.CosetFilter(cover, i, d, root_word, k0)) for i in cosets]


def _root_conjugator(cls: ConjClass, to_canon: Word, root: ConjClass):
    """d with axis(w) = d . axis(root canonical word)."""
    # canonical word of cls = to_canon w to_canon^-1, and it is conjugate
    # to root^m; find the conjugator from the root class machinery
    if cls == root:
        return to_canon.inverse(), root.word
    m = len(cls) // len(root)
    rc, to_root, _ = class_conjugators(root.word ** m)
    # rc == cls; to_root conjugates root^m onto the canonical word of cls
    if rc != cls:
        raise PreconditionError("root bookkeeping failed")
    # canon = to_root r^m to_root^-1 and canon = to_canon w to_canon^-1
    d = to_canon.inverse() * to_root
    return d, root.word


def _liouville_box(rep: FuchsianRep, box: Box) -> float:
    if rep is not fuchsian_rep(rep.genus):
        raise PreconditionError(
            "boxes are drawn in the disk of the regular representation; "
            "the Liouville mass of another structure needs its boundary map")
    return cross_ratio_log(box.a, box.b, box.c, box.d)


def _count_in_box(genus: int, items, box: Box, margin: float) -> float:
    t = tiling(genus)
    a, b, c, d = box.angles
    tiles = _lifts.box_tiles(t, a, b, c, d, margin)
    total = 0.0
    cache: dict = {}
    for _, coef, root, filt in items:
        ls = cache.get(root)
        if ls is None:
            ls = cache[root] = _lifts.LiftSet(t, root, tiles)
        inside = np.nonzero(box.contains(ls.starts, ls.ends))[0]
        if filt is None:
            total += coef * len(inside)
        else:
            total += coef * sum(1 for k in inside if filt(ls.conjugator(int(k))))
    return total


def box_mass(c: Current, b: Box, margin: float = DEFAULT_MARGIN) -> float:
    """Mass of the box under the current.

    Liouville parts use the log cross-ratio; atomic parts count lifts with
    one endpoint in each arc, over a tile region that is enlarged once by
    STABILITY_STEP to confirm the count."""
    plan = _lift_plan(c)
    total = 0.0
    lift_items = []
    for item in plan:
        if item[0] == "liouville":
            total += item[1] * _liouville_box(item[2], b)
        elif item[1] != 0.0:
            lift_items.append(item)
    if lift_items:
        first = _count_in_box(c.genus, lift_items, b, margin)
        second = _count_in_box(c.genus, lift_items, b, margin + STABILITY_STEP)
        total += _lifts.check_stable(first, second, "box mass")
    return total


# ---------------------------------------------------------------------------
# transversals and segment crossings


def _count_crossing(genus: int, items, seg1, seg2, margin: float) -> float:
    t = tiling(genus)
    p1, q1 = seg1
    tiles = _lifts.segment_tiles(t, p1.z, q1.z, margin)
    k1p, k1q = p1.klein, q1.klein
    total = 0.0
    for _, coef, root, filt in items:
        ls = _lifts.LiftSet(t, root, tiles)
        hit = _lifts.crosses_segment(ls.starts, ls.ends, k1p, k1q)
        if seg2 is not None:
            p2, q2 = seg2
            hit &= _lifts.crosses_segment(ls.starts, ls.ends, p2.klein, q2.klein)
        idx = np.nonzero(hit)[0]
        if filt is None:
            total += coef * len(idx)
        else:
            total += coef * sum(1 for k in idx if filt(ls.conjugator(int(k))))
    return total


def _atomic_items(c: Current, what: str):
    plan = _lift_plan(c)
    if any(item[0] == "liouville" for item in plan):
        raise PreconditionError(f"{what} needs an atomic current; use pseudometric_eval for Liouville parts")
    return [item for item in plan if item[1] != 0.0]


def crossing_mass(c: Current, seg1, seg2=None, margin: float = DEFAULT_MARGIN) -> float:
    """Weighted count of lifts crossing the half-open segment seg1 (and
    seg2 when given), stability checked."""
    return _crossing_items(c.genus, _atomic_items(c, "crossing counts"), seg1, seg2, margin)


def _crossing_items(genus: int, items, seg1, seg2=None, margin: float = DEFAULT_MARGIN) -> float:
    if not items:
        return 0.0
    first = _count_crossing(genus, items, seg1, seg2, margin)
    second = _count_crossing(genus, items, seg1, seg2, margin + STABILITY_STEP)
    return _lifts.check_stable(first, second, "crossing count")


def transversal_mass(c: Current, t: Transversal, margin: float = DEFAULT_MARGIN) -> tuple:
    """(mu(G), mu(G_perp)) for G = G([w,x), [y,z)), G_perp = G([x,y), [z,w))."""
    s1, s2 = t.segments()
    o1, o2 = t.opposite_segments()
    return (crossing_mass(c, s1, s2, margin), crossing_mass(c, o1, o2, margin))


# ---------------------------------------------------------------------------
# integrality


@dataclass
class IntegralityReport:
    values: list
    integral: list
    verdict: str
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "consistent with signed multicurve"


def integrality_screen(c: Current, probes: Sequence, tol: float = 1e-6) -> IntegralityReport:
    """Checks that i(c, gamma) is an integer for every probe class."""
    from .spectra import stable_length

    if not probes:
        return IntegralityReport([], [], "consistent with signed multicurve",
                                 ["empty probe list: vacuous pass"])
    values, flags = [], []
    for p in probes:
        v = stable_length(c, p, allow_signed=True)
        values.append(v)
        flags.append(abs(v - round(v)) <= tol)
    verdict = "consistent with signed multicurve" if all(flags) else "not a signed multicurve"
    return IntegralityReport(values, flags, verdict)


# ---------------------------------------------------------------------------
# description files and CSV export

_REPS = {"regular": fuchsian_rep, "twisted": twisted_rep}


def _parse_atoms(text: str, genus: int) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            word, w = part.rsplit(":", 1)
            weight = float(w)
        else:
            word, weight = part, 1.0
        out.append((Word.parse(word.strip(), genus), weight))
    return out


def parse_currents(text: str) -> dict:
    """Read named currents (and covers) from INI-style text.

    Sections ``[cover NAME]`` take ``degree``, one cycle string per
    generator (e.g. ``a1 = (1 2)``) and ``transversal`` (comma separated
    words, identity first, ``1`` for the empty word).  Sections
    ``[current NAME]`` take ``type`` among liouville, atomic, combination
    and transfer, plus ``rep``, ``atoms`` (``word : weight`` list),
    ``terms`` (``coef * name`` list) or ``cover`` and ``inner``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable current description: {exc}") from exc
    genus = 2
    if cp.has_section("surface"):
        genus = cp.getint("surface", "genus", fallback=2)
    covers: dict = {}
    for sec in cp.sections():
        m = re.fullmatch(r"cover\s+(\S+)", sec)
        if not m:
            continue
        body = dict(cp[sec])
        try:
            degree = int(body.pop("degree"))
            trans = [t.strip() for t in body.pop("transversal").split(",")]
        except KeyError as exc:
            raise ConfigError(f"[{sec}] is missing {exc}") from exc
        trans = [Word((), genus) if t in ("", "1", "e") else Word.parse(t, genus) for t in trans]
        covers[m.group(1)] = Cover.from_cycles(body, trans, degree, genus)
    currents: dict = {}
    pending = [s for s in cp.sections() if s.startswith("current ")]
    for _ in range(len(pending) + 1):
        left = []
        for sec in pending:
            name = sec.split(None, 1)[1].strip()
            try:
                currents[name] = _build_current(dict(cp[sec]), genus, currents, covers)
            except KeyError:
                left.append(sec)
        pending = left
        if not pending:
            break
    if pending:
        raise ConfigError(f"unresolved current references in {pending}")
    return currents


_KNOWN_KEYS = {"type", "rep", "atoms", "terms", "cover", "inner"}


def _build_current(body: dict, genus: int, currents: dict, covers: dict) -> Current:
    unknown = set(body) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    kind = body.get("type", "").strip().lower()
    if kind == "liouville":
        rep = body.get("rep", "regular").strip()
        if rep not in _REPS:
            raise ConfigError(f"unknown representation {rep!r}")
        return Liouville(_REPS[rep](genus))
    if kind == "atomic":
        return Atomic(tuple(_parse_atoms(body.get("atoms", ""), genus)), genus)
    if kind == "combination":
        terms = []
        for part in body.get("terms", "").split(","):
            part = part.strip()
            if not part:
                continue
            coef, _, name = part.partition("*")
            terms.append((float(coef), currents[name.strip()]))
        return Combination(tuple(terms))
    if kind == "transfer":
        cover = covers.get(body.get("cover", "").strip())
        if cover is None:
            raise ConfigError("transfer needs a known cover")
        inner_name = body.get("inner", "").strip()
        if inner_name in currents:
            return transfer(cover, currents[inner_name])
        return transfer(cover, Atomic(tuple(_parse_atoms(inner_name, genus)), genus))
    raise ConfigError(f"unknown current type {kind!r}")


def load_currents(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_currents(fh.read())


def box_masses_csv(c: Current, boxes: Sequence[Box]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["box_a", "box_b", "box_c", "box_d", "mass"])
    for b in boxes:
        wr.writerow([f"{x:.15g}" for x in b.angles] + [f"{box_mass(c, b):.15g}"])
    return buf.getvalue()


__all__ = [
    "Box", "Transversal", "Current", "Liouville", "Atomic", "LiftedAtomic", "Combination",
    "TransferImage", "opposite_box", "box_mass", "transversal_mass", "crossing_mass", "transfer",
    "net_atoms", "integrality_screen", "IntegralityReport", "parse_currents", "load_currents",
    "box_masses_csv",
]
