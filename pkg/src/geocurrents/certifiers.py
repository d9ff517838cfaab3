"""Sample-based certificates for strong hyperbolicity and Ptolemy inequalities.

A pass means no violation was found on the declared sample; a fail comes
with explicit witnesses whose margins can be recomputed from the report.

Crossing pairs are pairs of group elements (not classes) whose axes cross
under a fixed Fuchsian representation.  The strong hyperbolicity check for
a pair uses the four-point normalization

    e^{-(eps/2) gap1} + e^{-(eps/2) gap2} >= 1,
    gap1 = l(a) + l(b) - l(ab),  gap2 = l(a) + l(b) - l(ab^-1),

under which the Liouville current of a hyperbolic structure is
1-strongly hyperbolic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _lifts
from ._tiling import crossing_points, tiling
from .currents import Atomic, Box, Combination, Current, Liouville, TransferImage, _lift_plan, box_mass
from .errors import (
    InsufficientPairs,
    NoCrossingAtom,
    NoPositiveEps,
    NoWitnessInBudget,
    PreconditionError,
    SignedNotAllowed,
    UnstableEnumeration,
)
from .hyperbolic_plane import (
    MoebiusMap,
    angle_vector,
    axis,
    geodesic_frame,
    halfplane_to_angle,
    halfplane_to_disk,
    linked,
)
from .spectra import intersection_number
from .surface_group import ConjClass, FuchsianRep, Word, canonical_conj, words_up_to

MARGIN_TOL = 1e-9


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class SHParams:
    """Either a single epsilon or an (A0, B0, C0) triple."""

    epsilon: float | None = None
    A0: float | None = None
    B0: float | None = None
    C0: float | None = None

    def __post_init__(self):
        triple = (self.A0, self.B0, self.C0)
        if self.epsilon is not None:
            if any(v is not None for v in triple):
                raise ValueError("give epsilon or (A0, B0, C0), not both")
            if not self.epsilon > 0:
                raise ValueError("epsilon must be positive")
        else:
            if any(v is None for v in triple):
                raise ValueError("need epsilon or all of A0, B0, C0")
            if not all(v > 0 for v in triple):
                raise ValueError("A0, B0, C0 must be positive")

    @property
    def is_triple(self) -> bool:
        return self.epsilon is None


@dataclass(frozen=True)
class CrossingPair:
    """Group elements a, b with crossing axes.

    The classes are exposed as properties; the elements themselves are
    kept because ab and ab^-1 depend on more than the two classes."""

    a_word: Word
    b_word: Word
    certified_crossing: bool = True

    @property
    def a(self) -> ConjClass:
        return canonical_conj(self.a_word)

    @property
    def b(self) -> ConjClass:
        return canonical_conj(self.b_word)

    def __str__(self):
        return f"({self.a_word}, {self.b_word})"


@dataclass
class CertReport:
    checked: int
    violations: list = field(default_factory=list)
    min_margin: float = math.inf
    verdict: str = "pass"
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "checked": self.checked,
            "verdict": self.verdict,
            "min_margin": None if math.isinf(self.min_margin) else self.min_margin,
            "violations": self.violations,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _finish(report: CertReport) -> CertReport:
    if report.violations:
        report.verdict = "fail"
    elif report.verdict != "inconclusive":
        report.verdict = "pass"
    return report


# ---------------------------------------------------------------------------
# element lengths


class _ElementLengths:
    """Memoized l_c(g) for group elements g.

    Liouville terms use the trace of the representation directly, which is
    conjugation invariant; atomic terms go through the canonical class."""

    def __init__(self, c: Current):
        self.current = c
        self.cache: dict = {}
        self.plan = self._flatten(c, 1.0, [])

    def _flatten(self, c, scale, out):
        if isinstance(c, Liouville):
            out.append(("rep", scale, c.rep))
        elif isinstance(c, Atomic):
            out.append(("atomic", scale, c))
        elif isinstance(c, Combination):
            for k, x in c.terms:
                if k != 0.0:
                    self._flatten(x, scale * k, out)
        elif isinstance(c, TransferImage):
            self._flatten(c.materialize(), scale, out)
        else:
            raise PreconditionError(f"lengths of {type(c).__name__} are not available on the base surface")
        return out

    def __call__(self, w: Word) -> float:
        key = w.letters
        v = self.cache.get(key)
        if v is not None:
            return v
        total = 0.0
        cls = None
        for kind, k, obj in self.plan:
            if kind == "rep":
                total += k * obj.length(w)
            else:
                if cls is None:
                    cls = canonical_conj(w)
                total += k * sum(wt * intersection_number(a, cls) for a, wt in obj.atoms)
        self.cache[key] = total
        return total


def _require_positive(c: Current):
    if c.is_signed:
        raise SignedNotAllowed("certificates need a positive current")


def _gaps(lengths: _ElementLengths, p: CrossingPair) -> dict:
    a, b = p.a_word, p.b_word
    la, lb = lengths(a), lengths(b)
    lab, labi = lengths(a * b), lengths(a * b.inverse())
    return {"a": la, "b": lb, "ab": lab, "ab^-1": labi, "gap1": la + lb - lab, "gap2": la + lb - labi}


# ---------------------------------------------------------------------------
# crossing pairs


def _is_crossing(rep: FuchsianRep, a: Word, b: Word) -> bool:
    try:
        ax, bx = axis(rep.evaluate(a)), axis(rep.evaluate(b))
        return linked(ax, bx)
    except Exception:
        # shared endpoints (commuting elements) or non-hyperbolic input
        return False


def sample_crossing_pairs(rep: FuchsianRep, max_len: int, count: int, seed: int) -> list:
    """Seeded sample of element pairs (a, b), |a|, |b| <= max_len, with
    linked axes under rep."""
    if count <= 0:
        return []
    if max_len < 1:
        raise InsufficientPairs("max_len must be at least 1")
    rng = np.random.default_rng(seed)
    pool = [w for w in words_up_to(max_len, rep.genus) if len(w) > 0]
    n = len(pool)
    out: list = []
    seen: set = set()

    def consider(i, j):
        a, b = pool[i], pool[j]
        key = (a.letters, b.letters)
        if key in seen:
            return
        seen.add(key)
        if _is_crossing(rep, a, b):
            out.append(CrossingPair(a, b, True))

    if n * n <= 200_000:
        order = rng.permutation(n * n)
        for k in order:
            i, j = divmod(int(k), n)
            if i != j:
                consider(i, j)
            if len(out) == count:
                break
    else:
        attempts = 0
        while len(out) < count and attempts < 400 * count:
            i, j = (int(x) for x in rng.integers(0, n, 2))
            attempts += 1
            if i != j:
                consider(i, j)
    if len(out) < count:
        raise InsufficientPairs(f"found {len(out)} crossing pairs at max_len {max_len}, wanted {count}")
    return out


# ---------------------------------------------------------------------------
# strong hyperbolicity


def _sh_margin(eps: float, g: dict) -> float:
    return math.exp(-0.5 * eps * g["gap1"]) + math.exp(-0.5 * eps * g["gap2"]) - 1.0


def check_sh_crossing(c: Current, params: SHParams, pairs: Sequence[CrossingPair],
                      _lengths: _ElementLengths | None = None) -> CertReport:
    """epsilon-strong hyperbolicity on crossing pairs; margin = RHS - 1."""
    _require_positive(c)
    if params.is_triple:
        raise ValueError("check_sh_crossing needs an epsilon")
    lengths = _lengths or _ElementLengths(c)
    rep = CertReport(checked=len(pairs))
    eps = params.epsilon
    for p in pairs:
        g = _gaps(lengths, p)
        m = _sh_margin(eps, g)
        rep.min_margin = min(rep.min_margin, m)
        if m < -MARGIN_TOL:
            rep.violations.append({"a": str(p.a_word), "b": str(p.b_word), "margin": m, "lengths": g})
    if not pairs:
        rep.verdict = "inconclusive"
        rep.notes.append("empty sample")
    return _finish(rep)


def estimate_eps_star(c: Current, pairs: Sequence[CrossingPair], tol: float = 1e-6,
                      eps_cap: float = 1e6) -> float:
    """Largest epsilon passing check_sh_crossing on the sample, by bisection.

    Only a finite sample is tested, so the value is an upper bound for the
    true supremum.  Returns inf when even eps_cap passes."""
    _require_positive(c)
    if not pairs:
        raise NoPositiveEps("no pairs to test: inconclusive")
    lengths = _ElementLengths(c)
    gaps = [_gaps(lengths, p) for p in pairs]

    def ok(eps):
        return all(_sh_margin(eps, g) >= -MARGIN_TOL for g in gaps)

    lo = tol
    if not ok(lo):
        raise NoPositiveEps(f"epsilon = {tol} already fails")
    hi = 1.0
    while ok(hi):
        lo = hi
        hi *= 2.0
        if hi > eps_cap:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def check_sh_abc(c: Current, params: SHParams, pairs: Sequence[CrossingPair]) -> CertReport:
    """(A0, B0, C0) form: gap1 > A >= A0 forces gap2 < B0 exp(-C0 A).

    The binding A is gap1 itself, so the margin is B0 exp(-C0 gap1) - gap2.
    Each pair is also tested with b replaced by b^-1, which swaps the gaps."""
    _require_positive(c)
    if not params.is_triple:
        raise ValueError("check_sh_abc needs (A0, B0, C0)")
    lengths = _ElementLengths(c)
    rep = CertReport(checked=len(pairs))
    active = 0
    for p in pairs:
        g = _gaps(lengths, p)
        for g1, g2, tag in ((g["gap1"], g["gap2"], "b"), (g["gap2"], g["gap1"], "b^-1")):
            if g1 <= params.A0:
                continue
            active += 1
            m = params.B0 * math.exp(-params.C0 * g1) - g2
            rep.min_margin = min(rep.min_margin, m)
            if m < -MARGIN_TOL:
                rep.violations.append({"a": str(p.a_word), "b": str(p.b_word), "orientation": tag,
                                       "margin": m, "lengths": g})
    if active == 0:
        rep.verdict = "inconclusive"
        rep.notes.append("no pair exceeds A0; vacuous pass")
    return _finish(rep)


def check_sh_boxes(c: Current, epsilon: float, boxes: Sequence[Box]) -> CertReport:
    """Box form: exp(-eps mu(B)) + exp(-eps mu(B_perp)) >= 1."""
    _require_positive(c)
    rep = CertReport(checked=len(boxes))
    for b in boxes:
        m1, m2 = box_mass(c, b), box_mass(c, b.opposite())
        m = math.exp(-epsilon * m1) + math.exp(-epsilon * m2) - 1.0
        rep.min_margin = min(rep.min_margin, m)
        if m < -MARGIN_TOL:
            rep.violations.append({"box": list(b.angles), "margin": m, "masses": [m1, m2]})
    if not boxes:
        rep.verdict = "inconclusive"
    return _finish(rep)


def crossing_box(c: Atomic, width: float = 1e-3) -> Box:
    """A box around one lift of an atom whose opposite box holds a second,
    crossing lift, so that both masses are positive."""
    t = tiling(c.genus)
    roots = [a.root()[0] for a, _ in c.atoms]
    for r1 in roots:
        for r2 in roots:
            p1, p2 = t.pieces(r1), t.pieces(r2)
            pts = crossing_points(t, p1, p2)
            if pts:
                p = p1[pts[0][0]]
                # shrink the arcs until they avoid the second lift's endpoints
                q = p2[pts[0][1]]
                w = width
                for _ in range(40):
                    box = Box.from_angles(p.start - w, p.start + w, p.end - w, p.end + w)
                    if not (box.contains(np.array([q.start]), np.array([q.end]))[0]):
                        return box
                    w /= 2
    raise NoCrossingAtom("no two atoms (or self-crossing atom) cross")


# ---------------------------------------------------------------------------
# Ptolemy


def check_ptolemy(c: Current, pairs: Sequence[CrossingPair], n_max: int) -> CertReport:
    """l(a^n) l(b^n) <= l(a^n b^n)^2 / 4 + l(a^n b^-n)^2 / 4 for n <= n_max.

    The margin is RHS - LHS; a violation records LHS - RHS as quantity."""
    _require_positive(c)
    lengths = _ElementLengths(c)
    rep = CertReport(checked=len(pairs) * max(n_max, 0))
    if n_max <= 0 or not pairs:
        rep.verdict = "inconclusive"
        rep.notes.append("vacuous: nothing to check")
        return _finish(rep)
    for p in pairs:
        for n in range(1, n_max + 1):
            an, bn = p.a_word ** n, p.b_word ** n
            la, lb = lengths(an), lengths(bn)
            l1, l2 = lengths(an * bn), lengths(an * bn.inverse())
            lhs, rhs = la * lb, 0.25 * (l1 * l1 + l2 * l2)
            m = rhs - lhs
            scale = max(1.0, lhs, rhs)
            rep.min_margin = min(rep.min_margin, m / scale)
            if m < -MARGIN_TOL * scale:
                rep.violations.append({"a": str(p.a_word), "b": str(p.b_word), "n": n, "margin": m,
                                       "quantity": -m,
                                       "lengths": {"a^n": la, "b^n": lb, "a^n b^n": l1, "a^n b^-n": l2}})
    return _finish(rep)


@dataclass(frozen=True)
class WitnessBudget:
    """max_len bounds |a| + |b|; n bounds the power; max_pairs caps the
    number of crossing pairs examined."""

    max_len: int = 10
    n: int = 3
    max_pairs: int = 20_000


@dataclass(frozen=True)
class PtolemyWitness:
    gamma: str
    a: str
    b: str
    n: int
    i_a: int
    i_b: int
    i_ab: int
    i_abinv: int
    quantity: float
    pattern_k: int | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _pattern_k(ia: int, ib: int, iab: int, iabi: int):
    """k when the numbers read (k+1, k+1, 2k, 2), in either order of the
    last two; None otherwise."""
    if ia != ib or ia < 2:
        return None
    k = ia - 1
    if sorted((iab, iabi)) == sorted((2 * k, 2)):
        return k
    return None


def _words_of_length(length: int, genus: int) -> list:
    letters = [x for x in range(1, 2 * genus + 1)] + [-x for x in range(1, 2 * genus + 1)]
    layer = [()]
    for _ in range(length):
        layer = [w + (x,) for w in layer for x in letters if not (w and w[-1] == -x)]
    return [Word(w, genus) for w in layer]


def ptolemy_witness_search(gamma, rep: FuchsianRep, budget: WitnessBudget = WitnessBudget(),
                           require_pattern: bool = True) -> PtolemyWitness:
    """Search crossing pairs for i(g,a^n) i(g,b^n) - i(g,a^n b^n)^2/4 - i(g,a^n b^-n)^2/4 > 1.

    Pairs are scanned by increasing |a| + |b| (at most budget.max_len),
    with |a| <= |b| since the quantity is symmetric in a and b, then by n.
    With require_pattern the witness must also read (k+1, k+1, 2k, 2)."""
    g = canonical_conj(gamma) if not isinstance(gamma, ConjClass) else gamma
    if intersection_number(g, g) < 1:
        raise PreconditionError(f"{g} is simple; the search needs a self-crossing class")
    if budget.n < 1 or budget.max_len < 2:
        raise NoWitnessInBudget("empty budget")
    by_len: dict = {}
    inum: dict = {}

    def words(length):
        if length not in by_len:
            by_len[length] = _words_of_length(length, rep.genus)
        return by_len[length]

    def i_of(w: Word) -> int:
        v = inum.get(w.letters)
        if v is None:
            v = inum[w.letters] = intersection_number(g, canonical_conj(w))
        return v

    tried = 0
    for total in range(2, budget.max_len + 1):
        for la in range(1, total // 2 + 1):
            for a in words(la):
                ia1 = i_of(a)
                if ia1 == 0 or (require_pattern and ia1 < 2):
                    continue
                for b in words(total - la):
                    ib1 = i_of(b)
                    if ib1 == 0 or (require_pattern and ib1 != ia1):
                        continue
                    if not _is_crossing(rep, a, b):
                        continue
                    tried += 1
                    if tried > budget.max_pairs:
                        raise NoWitnessInBudget(f"pair cap {budget.max_pairs} reached")
                    for n in range(1, budget.n + 1):
                        an, bn = a ** n, b ** n
                        ia, ib = n * ia1, n * ib1
                        iab, iabi = i_of(an * bn), i_of(an * bn.inverse())
                        q = ia * ib - 0.25 * iab * iab - 0.25 * iabi * iabi
                        if q <= 1:
                            continue
                        k = _pattern_k(ia, ib, iab, iabi)
                        if require_pattern and k is None:
                            continue
                        return PtolemyWitness(str(g), str(a), str(b), n, ia, ib, iab, iabi, q, k)
    raise NoWitnessInBudget(f"no witness among {tried} crossing pairs")


# ---------------------------------------------------------------------------
# flat strip


def flat_strip_probe(epsilon: float, x: float, y_max: float, grid: int = 4000, tol: float = 1e-6):
    """Smallest y <= y_max (to tol) with exp(eps sqrt(x^2+y^2)) > exp(eps y) + exp(eps x).

    The returned y sits on the violating side of the bracket, so direct
    re-evaluation confirms it.  None if the grid finds no violation."""
    if not (epsilon > 0 and x > 0):
        raise ValueError("epsilon and x must be positive")
    if not y_max > 0:
        return None

    def defect(y):
        # log-domain comparison avoids overflow at large eps*y
        lhs = epsilon * math.hypot(x, y)
        rhs = np.logaddexp(epsilon * y, epsilon * x)
        return lhs - rhs

    ys = np.linspace(0.0, y_max, grid + 1)[1:]
    bad = [i for i, y in enumerate(ys) if defect(y) > 0]
    if not bad:
        return None
    hi = float(ys[bad[0]])
    lo = float(ys[bad[0] - 1]) if bad[0] > 0 else 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if defect(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def flat_strip_defect(epsilon: float, x: float, y: float) -> float:
    """exp(eps sqrt(x^2+y^2)) - exp(eps y) - exp(eps x); positive = violation."""
    return math.exp(epsilon * math.hypot(x, y)) - math.exp(epsilon * y) - math.exp(epsilon * x)


# ---------------------------------------------------------------------------
# bolicity


@dataclass
class BolicityProbe:
    """Translate construction around the axis of b.

    pairs[n-1] = (nu(B_n), mu(G_n_perp)) for n = 1..depth, where
    B_n is the disjoint union of b^i B, |i| <= n, contained in G_n."""

    element: str
    translation_length: float
    box: Box
    nu_box: float
    pairs: list
    evaluated_translates: int
    notes: list = field(default_factory=list)


def _frame_coords(f_inv: MoebiusMap, theta: float) -> float:
    """Real coordinate of a boundary angle in the frame of an axis."""
    u, v = angle_vector(theta)
    m = f_inv.matrix
    num = m[0, 0] * u + m[0, 1] * v
    den = m[1, 0] * u + m[1, 1] * v
    return num / den if den != 0 else math.inf


def _inside(P: complex, x1: float, x2: float) -> float:
    """Negative iff P lies inside the half-circle over [x1, x2] (x1 < 0 < x2)."""
    return abs(P) ** 2 - P.real * (x1 + x2) + x1 * x2


def _find_crossing(c: Atomic):
    t = tiling(c.genus)
    atoms = [(a.root()[0], a) for a, _ in c.atoms]
    # prefer a self-crossing atom, then two crossing atoms
    order = [(r, r) for r, _ in atoms] + [(r1, r2) for r1, _ in atoms for r2, _ in atoms if r1 != r2]
    for r1, r2 in order:
        p1, p2 = t.pieces(r1), t.pieces(r2)
        pts = crossing_points(t, p1, p2)
        if pts:
            i, j, _ = pts[0]
            return r1, p1[i], r2, p2[j]
    return None


def bolicity_probe(c: Current, depth: int, margin: float = 0.5) -> BolicityProbe:
    """Masses along b^i(B) for the element b stabilizing a crossed atom.

    Coordinates are adapted to b: its axis is the imaginary axis of the
    half-plane and b acts as z -> lambda z.  The box B is a product of
    log-width 2 eta arcs around the endpoints of a lift L crossing the axis,
    so the translates b^i B are disjoint once eta < l(b)/2.  The transversal
    G_n uses x_n, y_n at height R_n and z_n, w_n at height 1/R_n on the rays
    of angle pi - phi and phi; every geodesic of B_n crosses both of its
    segments (checked at the corners, where a bilinear test is extremal) and
    the axis crosses both segments of G_n_perp."""
    if not isinstance(c, Atomic):
        raise NoCrossingAtom("the probe needs an atomic current")
    found = _find_crossing(c)
    if found is None:
        raise NoCrossingAtom("no atom crosses itself or another atom")
    r_axis, p_axis, r_cross, p_cross = found
    t = tiling(c.genus)
    rho = t.rep
    b_word = p_axis.conj * r_axis.word * p_axis.conj.inverse()
    ell = rho.length(b_word)
    lam = math.exp(ell)
    f = geodesic_frame(axis(rho.evaluate(b_word)))
    f_inv = f.inverse()

    def to_frame(theta):
        return _frame_coords(f_inv, theta)

    def from_frame(x):
        return halfplane_to_angle(f.apply(x).real)

    x1, x2 = sorted((to_frame(p_cross.start), to_frame(p_cross.end)))
    if not (x1 < 0 < x2):
        raise UnstableEnumeration("crossing lift does not straddle the axis in the frame")
    eta = min(ell / 4, 0.25)
    lp, lq = math.log(-x1), math.log(x2)
    corners = (-math.exp(lp + eta), -math.exp(lp - eta), math.exp(lq - eta), math.exp(lq + eta))
    box = Box.from_angles(*(from_frame(x) for x in corners))
    nu_b = box_mass(c, box, margin)
    if nu_b <= 0:
        raise UnstableEnumeration("box around the crossing lift has no mass")
    notes = [f"translates of B are disjoint: log-width {2 * eta:.3g} < l(b) = {ell:.6g}"]

    # masses of the translates b^i B; direct evaluation while the arcs are
    # resolvable, otherwise group invariance of the current
    masses: dict = {0: nu_b}
    evaluated = 1
    for i in [j for j in range(-depth, depth + 1) if j != 0]:
        # b^i acts on frame coordinates as multiplication by lambda^i
        ang = [from_frame(x * lam ** i) for x in corners]
        widths = [(ang[1] - ang[0]) % (2 * math.pi), (ang[3] - ang[2]) % (2 * math.pi)]
        if min(widths) > 1e-6:
            masses[i] = box_mass(c, Box.from_angles(*ang), margin)
            evaluated += 1
        else:
            masses[i] = nu_b

    phi = math.pi / 4
    left, right = complex(math.cos(math.pi - phi), math.sin(math.pi - phi)), complex(math.cos(phi), math.sin(phi))
    span = max(-corners[0], corners[3], 1.0 / -corners[1], 1.0 / corners[2])
    plan = [it for it in _lift_plan(c) if it[0] == "lifts"]
    pairs = []
    for n in range(1, depth + 1):
        big_log = n * ell + math.log(4.0 * span)
        R = math.exp(big_log)
        # containment B_n in G_n, corner test in units where the segment
        # endpoints have modulus one
        for i in range(-n, n + 1):
            s = lam ** i
            for u in (corners[0], corners[1]):
                for v in (corners[2], corners[3]):
                    for P in (left, right):
                        lo = _inside(P / R, u * s, v * s)
                        hi = _inside(P * R, u * s, v * s)
                        if not (lo < 0 < hi):
                            raise UnstableEnumeration("B_n is not contained in G_n")
        nu_bn = sum(masses[i] for i in range(-n, n + 1))
        perp = _perp_mass(c, plan, t, f, lam, ell, big_log, left, right, margin)
        pairs.append((nu_bn, perp))
    return BolicityProbe(str(b_word), ell, box, nu_b, pairs, evaluated, notes)


def _perp_mass(c, plan, t, f, lam, ell, big_log, left, right, margin) -> float:
    """Mass of lifts crossing the top segment [x_n, y_n) at height R and the
    bottom segment [z_n, w_n) at height 1/R.

    The top segment is b^M of a segment near the closest point of the axis
    to the origin, so its lifts are the b^M translates of lifts found there;
    their frame coordinates scale exactly by lambda^M."""
    M = round(big_log / ell)
    h = math.exp(big_log - M * ell)
    f_inv = f.inverse()
    p_disk = halfplane_to_disk(f.apply(h * left))
    q_disk = halfplane_to_disk(f.apply(h * right))
    total = 0.0
    for extra in (0.0, 2.0):
        total = 0.0
        tiles = _lifts.segment_tiles(t, p_disk, q_disk, margin + extra)
        kp, kq = _lifts.klein_point(p_disk), _lifts.klein_point(q_disk)
        for _, coef, root, _filt in plan:
            ls = _lifts.LiftSet(t, root, tiles)
            if len(ls) == 0:
                continue
            hit = np.nonzero(_lifts.crosses_segment(ls.starts, ls.ends, kp, kq))[0]
            for k in hit:
                xs = []
                for th in (ls.starts[k], ls.ends[k]):
                    xs.append(_frame_coords(f_inv, th))
                # the axis itself: frame endpoints 0 and infinity
                if any(abs(x) < 1e-9 or abs(x) > 1e9 or math.isinf(x) for x in xs):
                    if all(abs(x) < 1e-9 or abs(x) > 1e9 or math.isinf(x) for x in xs):
                        total += coef
                        continue
                    raise UnstableEnumeration("a lift ends too close to a fixed point of b to resolve")
                u, v = sorted(xs)
                if not (u < 0 < v):
                    continue
                # scale to units where the bottom points have modulus one
                s = lam ** M * math.exp(big_log)
                zin = _inside(right, u * s, v * s) < 0
                win = _inside(left, u * s, v * s) < 0
                if zin != win:
                    total += coef
        if extra == 0.0:
            first = total
    return _lifts.check_stable(first, total, "opposite transversal mass")


__all__ = [
    "SHParams", "CrossingPair", "CertReport", "sample_crossing_pairs", "check_sh_crossing",
    "estimate_eps_star", "check_sh_abc", "check_sh_boxes", "crossing_box", "check_ptolemy",
    "WitnessBudget", "PtolemyWitness", "ptolemy_witness_search", "flat_strip_probe",
    "flat_strip_defect", "BolicityProbe", "bolicity_probe",
]
