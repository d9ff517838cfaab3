"""Length-spectrum tables and the experiments built on them.

A SpectrumTable holds every conjugacy class up to a word length together
with its stable length under a list of currents.  Classes are stored as
packed keys (five bits per letter, see ``_fastwords``), so tables with
tens of millions of rows stay within a few hundred megabytes; words are
decoded only on demand.

Critical exponents are read off shell sums over word length,
s_n(a, b) = sum_{|w| = n} exp(-a l_1 - b l_2): the Dirichlet series
converges exactly when log s_n eventually decreases, so the critical b for
a given a is where the regression slope of log s_n over the top shells
crosses zero.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from . import _fastwords
from .certifiers import CertReport
from .currents import Atomic, Combination, Current, Liouville, TransferImage
from .errors import BudgetExceeded, DegenerateCurve, SignedNotAllowed, WindowTooSmall
from .spectra import completeness_bound, entropy_from_lengths, intersection_number
from .surface_group import ConjClass, Word, canonical_conj

ATOMIC_ROW_CAP = 250_000
BIN_WIDTH = 0.02


# ---------------------------------------------------------------------------
# tables


@dataclass
class SpectrumTable:
    keys: np.ndarray          # packed canonical words
    word_len: np.ndarray      # int8 word length per row
    lengths: np.ndarray       # (rows, currents) float64
    currents: list            # descriptor strings
    max_len: int
    genus: int = 2

    def __len__(self):
        return len(self.keys)

    def word(self, row: int) -> Word:
        n = int(self.word_len[row])
        codes = _fastwords.decode_codes(self.keys[row:row + 1], n)[0]
        return Word(_fastwords.codes_to_letters(codes), self.genus)

    def conj_class(self, row: int) -> ConjClass:
        return ConjClass(self.word(row).letters, self.genus)

    def column(self, i: int) -> np.ndarray:
        return self.lengths[:, i]

    def shell(self, n: int) -> slice:
        lo = int(np.searchsorted(self.word_len, n, side="left"))
        hi = int(np.searchsorted(self.word_len, n, side="right"))
        return slice(lo, hi)

    def to_csv(self, limit: int | None = None) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["class", "word_len"] + [f"length_{k}" for k in range(len(self.currents))])
        rows = len(self) if limit is None else min(limit, len(self))
        for r in range(rows):
            wr.writerow([str(self.word(r)), int(self.word_len[r])] + [f"{x:.12g}" for x in self.lengths[r]])
        return buf.getvalue()


@njit(cache=True)
def _key_lengths(keys, n, mats, out):
    for r in range(keys.shape[0]):
        k = keys[r]
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        # letters are packed most significant first; multiply right to left
        for _ in range(n):
            mm = mats[k & 31]
            k >>= 5
            a2 = mm[0, 0] * a + mm[0, 1] * c
            b2 = mm[0, 0] * b + mm[0, 1] * d
            c2 = mm[1, 0] * a + mm[1, 1] * c
            d2 = mm[1, 0] * b + mm[1, 1] * d
            a, b, c, d = a2, b2, c2, d2
        t = abs(a + d)
        out[r] = 2.0 * math.acosh(t / 2.0) if t > 2.0 else 0.0


def _code_mats(rep) -> np.ndarray:
    g = rep.genus
    mats = np.zeros((4 * g, 2, 2))
    for x in range(1, 2 * g + 1):
        mats[2 * (x - 1)] = rep.matrix((x,))
        mats[2 * (x - 1) + 1] = rep.matrix((-x,))
    return mats


def _linear_parts(c: Current, scale: float = 1.0, out=None) -> list:
    """Flatten into ('rep', coef, rep) and ('atomic', coef, Atomic) parts."""
    if out is None:
        out = []
    if isinstance(c, Liouville):
        out.append(("rep", scale, c.rep))
    elif isinstance(c, Atomic):
        out.append(("atomic", scale, c))
    elif isinstance(c, Combination):
        for k, x in c.terms:
            if k != 0.0:
                _linear_parts(x, scale * k, out)
    elif isinstance(c, TransferImage):
        _linear_parts(c.materialize(), scale, out)
    else:
        raise SignedNotAllowed(f"{type(c).__name__} has no base-surface length spectrum")
    return out


def _fingerprint(currents: Sequence[Current], max_len: int, genus: int) -> str:
    h = hashlib.sha256()
    h.update(f"v1|{genus}|{max_len}|".encode())
    for c in currents:
        h.update(c.describe().encode())
        for kind, k, obj in _linear_parts(c):
            h.update(f"|{kind}|{k!r}|".encode())
            if kind == "rep":
                h.update(np.ascontiguousarray(_code_mats(obj)).tobytes())
    return h.hexdigest()[:24]


def default_cache_dir() -> Path:
    return Path(os.environ.get("GEOCURRENTS_CACHE", Path.home() / ".cache" / "geocurrents"))


def _shell_keys(n: int, genus: int) -> np.ndarray:
    keys, hard = _fastwords.shell_keys(n, genus)
    if len(hard):
        # closures too large for the compiled path: decide in Python
        extra = []
        for key, codes in zip(hard, _fastwords.decode_codes(hard, n)):
            w = Word(_fastwords.codes_to_letters(codes), genus)
            if canonical_conj(w).cyclic_word == w.letters:
                extra.append(key)
        keys = np.sort(np.concatenate([keys, np.array(extra, dtype=np.int64)]))
    return keys


def build_spectrum(currents: Sequence[Current], max_len: int, genus: int | None = None,
                   cache: bool | str | Path = False) -> SpectrumTable:
    """Stable lengths of every class of word length <= max_len.

    Liouville parts are evaluated in compiled code from the packed keys;
    atomic parts go through intersection numbers and are limited to
    ATOMIC_ROW_CAP rows.  cache=True uses default_cache_dir(); a path
    selects another directory."""
    currents = list(currents)
    for c in currents:
        if c.is_signed:
            raise SignedNotAllowed("spectrum tables need positive currents")
    if genus is None:
        genus = currents[0].genus if currents else 2
    if not 1 <= max_len <= _fastwords.MAXN:
        raise ValueError(f"max_len must lie in [1, {_fastwords.MAXN}]")
    path = None
    if cache:
        root = default_cache_dir() if cache is True else Path(cache)
        path = root / f"spectrum-{_fingerprint(currents, max_len, genus)}.npz"
        if path.exists():
            with np.load(path) as z:
                return SpectrumTable(z["keys"], z["word_len"], z["lengths"],
                                     [c.describe() for c in currents], max_len, genus)
    parts = [_linear_parts(c) for c in currents]
    shells = [_shell_keys(n, genus) for n in range(1, max_len + 1)]
    total = sum(len(s) for s in shells)
    if any(kind == "atomic" for p in parts for kind, _, _ in p) and total > ATOMIC_ROW_CAP:
        raise BudgetExceeded(f"{total} rows exceed the atomic cap {ATOMIC_ROW_CAP}")
    keys = np.concatenate(shells) if shells else np.zeros(0, dtype=np.int64)
    word_len = np.concatenate([np.full(len(s), n + 1, dtype=np.int8) for n, s in enumerate(shells)])
    lengths = np.zeros((total, len(currents)))
    mats_cache: dict = {}
    buf = np.empty(max((len(s) for s in shells), default=0))
    for col, p in enumerate(parts):
        for kind, coef, obj in p:
            if kind == "rep":
                mats = mats_cache.get(id(obj))
                if mats is None:
                    mats = mats_cache[id(obj)] = _code_mats(obj)
                start = 0
                for n, s in enumerate(shells, start=1):
                    out = buf[:len(s)]
                    _key_lengths(s, n, mats, out)
                    lengths[start:start + len(s), col] += coef * out
                    start += len(s)
            else:
                for r in range(total):
                    n = int(word_len[r])
                    codes = _fastwords.decode_codes(keys[r:r + 1], n)[0]
                    cls = ConjClass(_fastwords.codes_to_letters(codes), genus)
                    lengths[r, col] += coef * sum(w * intersection_number(a, cls) for a, w in obj.atoms)
    table = SpectrumTable(keys, word_len, lengths, [c.describe() for c in currents], max_len, genus)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, keys=keys, word_len=word_len, lengths=lengths)
        os.replace(tmp, path)
    return table


def table_entropy(t: SpectrumTable, i: int):
    """Entropy estimate of column i (see spectra.entropy_from_lengths)."""
    return entropy_from_lengths(t.lengths[:, i], t.word_len, t.max_len)


# ---------------------------------------------------------------------------
# correlation counts


def correlation_count(t: SpectrumTable, i: int, j: int, x: float, eps: float, h1: float, h2: float) -> int:
    """Rows with h1 l_i in (x, x + h1 eps] and h2 l_j in (x, x + h2 eps].

    Windows are closed on the right so that adjacent windows partition."""
    if len(t) == 0:
        return 0
    if not (h1 > 0 and h2 > 0):
        raise ValueError("entropies must be positive")
    L1 = h1 * t.lengths[:, i]
    L2 = h2 * t.lengths[:, j]
    m = (L1 > x) & (L1 <= x + h1 * eps) & (L2 > x) & (L2 <= x + h2 * eps)
    return int(np.count_nonzero(m))


@dataclass
class CorrelationFit:
    xs: np.ndarray
    counts: np.ndarray
    C: float
    M: float
    residual: float
    fitted: np.ndarray
    complete_below: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "count", "fitted"])
        for x, c, f in zip(self.xs, self.counts, self.fitted):
            wr.writerow([f"{x:.10g}", int(c), f"{f:.10g}"])
        return buf.getvalue()


def complete_length(t: SpectrumTable, i: int) -> float:
    """Length below which column i is taken to be complete (see
    spectra.completeness_bound)."""
    return completeness_bound(t.lengths[:, i], t.word_len, t.max_len)


def correlation_sweep(t: SpectrumTable, i: int, j: int, h1: float, h2: float, eps: float,
                      x_min: float | None = None, x_max: float | None = None, points: int = 30) -> CorrelationFit:
    """Counts over a sweep of x and a fit log N = log C + M x - 1.5 log x.

    The sweep stays below the completeness bound of both columns, so every
    class in a window is present in the table."""
    cap = min(h1 * complete_length(t, i), h2 * complete_length(t, j)) - max(h1, h2) * eps
    L1 = h1 * t.lengths[:, i]
    L2 = h2 * t.lengths[:, j]
    order = np.argsort(L1, kind="stable")
    L1s, L2s = L1[order], L2[order]
    if x_max is None:
        x_max = cap
    x_max = min(x_max, cap)
    if x_min is None:
        x_min = 0.5 * x_max
    if not x_max > x_min:
        raise WindowTooSmall("the completeness bound leaves no sweep range")
    xs = np.linspace(x_min, x_max, points)
    counts = np.zeros(points)
    for k, x in enumerate(xs):
        lo = np.searchsorted(L1s, x, side="right")
        hi = np.searchsorted(L1s, x + h1 * eps, side="right")
        seg = L2s[lo:hi]
        counts[k] = np.count_nonzero((seg > x) & (seg <= x + h2 * eps))
    ok = counts > 0
    if ok.sum() < 4:
        raise WindowTooSmall("fewer than 4 nonzero correlation counts")
    x_ok = xs[ok]
    y = np.log(counts[ok]) + 1.5 * np.log(x_ok)
    A = np.column_stack([np.ones_like(x_ok), x_ok])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    resid = float(np.sqrt(np.mean((y - pred) ** 2)))
    fitted = np.exp(coef[0] + coef[1] * xs - 1.5 * np.log(xs))
    return CorrelationFit(xs, counts, float(math.exp(coef[0])), float(coef[1]), resid, fitted, cap)


# ---------------------------------------------------------------------------
# Manhattan curve


@dataclass
class _ShellBins:
    """Per-shell 2D histogram of (l_i, l_j) with per-bin means, so that
    exp(-a l_i - b l_j) summed over a bin is approximated at its mean
    (second-order error in the bin width)."""

    counts: list
    mean1: list
    mean2: list
    shells: list


def _bin_shells(t: SpectrumTable, i: int, j: int, n_min: int, width: float = BIN_WIDTH) -> _ShellBins:
    counts, m1, m2, shells = [], [], [], []
    for n in range(n_min, t.max_len + 1):
        sl = t.shell(n)
        l1, l2 = t.lengths[sl, i], t.lengths[sl, j]
        if len(l1) == 0:
            continue
        b1 = np.floor(l1 / width).astype(np.int64)
        b2 = np.floor(l2 / width).astype(np.int64)
        b2 -= b2.min()
        idx = b1 * (int(b2.max()) + 1) + b2
        uniq, inv = np.unique(idx, return_inverse=True)
        cnt = np.bincount(inv).astype(float)
        counts.append(cnt)
        m1.append(np.bincount(inv, weights=l1) / cnt)
        m2.append(np.bincount(inv, weights=l2) / cnt)
        shells.append(n)
    return _ShellBins(counts, m1, m2, shells)


def _log_shell_sums(bins: _ShellBins, a: float, b: float) -> np.ndarray:
    out = np.empty(len(bins.shells))
    for k, (c, x, y) in enumerate(zip(bins.counts, bins.mean1, bins.mean2)):
        e = -a * x - b * y
        top = e.max()
        out[k] = top + math.log(float(np.dot(c, np.exp(e - top))))
    return out


def _slope(ns: np.ndarray, ys: np.ndarray) -> tuple:
    coef, res, *_ = np.polyfit(ns, ys, 1, full=True)
    r = float(math.sqrt(res[0] / len(ns))) if len(res) else 0.0
    return float(coef[0]), r


@dataclass
class ManhattanSample:
    points: list                  # (a, b) sorted by a
    h1: float
    h2: float
    diagnostics: list = field(default_factory=list)
    window: tuple = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["a", "b", "residual"])
        for (a, b), d in zip(self.points, self.diagnostics):
            wr.writerow([f"{a:.10g}", f"{b:.10g}", f"{d['residual']:.6g}"])
        return buf.getvalue()

    @property
    def residual(self) -> float:
        return max((d["b_uncertainty"] for d in self.diagnostics), default=0.0)


def critical_exponent(bins: _ShellBins, a: float, tol: float = 1e-7) -> tuple:
    """b with zero regression slope of log s_n(a, b); (b, diagnostics)."""
    ns = np.array(bins.shells, dtype=float)

    def slope(b):
        return _slope(ns, _log_shell_sums(bins, a, b))

    lo, hi = -1.0, 1.0
    while slope(lo)[0] < 0:
        lo = 2 * lo - 1
        if lo < -1e3:
            raise DegenerateCurve("no diverging b found")
    while slope(hi)[0] > 0:
        hi = 2 * hi + 1
        if hi > 1e3:
            raise DegenerateCurve("no converging b found")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if slope(mid)[0] > 0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    s, r = slope(b)
    # d(slope)/db is minus the mean length growth per word letter; turn the
    # slope residual into an uncertainty on b
    d = (slope(b + 1e-3)[0] - slope(b - 1e-3)[0]) / 2e-3
    unc = r / math.sqrt(len(ns)) / abs(d) if d != 0 else math.inf
    return b, {"a": a, "b": b, "residual": r, "dslope_db": d, "b_uncertainty": unc}


def regression_shells(max_len: int) -> int:
    """First shell of the regression window: the top half of the shells."""
    return max(2, max_len - max_len // 2)


def manhattan_estimate(t: SpectrumTable, i: int, j: int, a_grid: Sequence[float],
                       h1: float | None = None, h2: float | None = None,
                       n_min: int | None = None) -> ManhattanSample:
    """Critical b(a) over a_grid from shell-sum slopes.

    h1, h2 default to the critical exponents at a = 0 with the roles of the
    columns swapped, i.e. the curve's own intercepts."""
    n0 = regression_shells(t.max_len) if n_min is None else n_min
    if t.max_len - n0 + 1 < 4:
        raise WindowTooSmall(f"max_len {t.max_len} gives {max(0, t.max_len - n0 + 1)} regression points")
    bins = _bin_shells(t, i, j, n0)
    if len(bins.shells) < 4:
        raise WindowTooSmall("fewer than 4 nonempty shells")
    if h2 is None:
        h2 = critical_exponent(bins, 0.0)[0]
    if h1 is None:
        swapped = _ShellBins(bins.counts, bins.mean2, bins.mean1, bins.shells)
        h1 = critical_exponent(swapped, 0.0)[0]
    pts, diags = [], []
    for a in sorted(float(x) for x in a_grid):
        b, d = critical_exponent(bins, a)
        pts.append((a, b))
        diags.append(d)
    return ManhattanSample(pts, float(h1), float(h2), diags, (n0, t.max_len))


def manhattan_endpoints(t: SpectrumTable, i: int, j: int, n_min: int | None = None) -> dict:
    """b at a = 0 and a at b = 0, with their uncertainties."""
    n0 = regression_shells(t.max_len) if n_min is None else n_min
    bins = _bin_shells(t, i, j, n0)
    b0, d0 = critical_exponent(bins, 0.0)
    swapped = _ShellBins(bins.counts, bins.mean2, bins.mean1, bins.shells)
    a0, d1 = critical_exponent(swapped, 0.0)
    return {"b_at_a0": b0, "b_unc": d0["b_uncertainty"], "a_at_b0": a0, "a_unc": d1["b_uncertainty"]}


def correlation_exponent(ms: ManhattanSample) -> dict:
    """M = a/h1 + b/h2 at the curve point whose tangent has slope -h2/h1.

    The point is located by the secant slopes of neighboring samples and
    refined with a local quadratic fit b(a)."""
    if len(ms.points) < 5:
        raise DegenerateCurve("need at least 5 curve points")
    a = np.array([p[0] for p in ms.points])
    b = np.array([p[1] for p in ms.points])
    target = -ms.h2 / ms.h1
    sec = np.diff(b) / np.diff(a)
    mids = 0.5 * (a[1:] + a[:-1])
    if not (sec.min() <= target <= sec.max()):
        raise DegenerateCurve("secant slopes do not bracket -h2/h1")
    k = int(np.argmin(np.abs(sec - target)))
    lo = max(0, k - 2)
    hi = min(len(a), lo + 5)
    lo = max(0, hi - 5)
    q = np.polyfit(a[lo:hi], b[lo:hi], 2)
    fit_res = float(np.sqrt(np.mean((np.polyval(q, a[lo:hi]) - b[lo:hi]) ** 2)))
    if abs(q[0]) > 1e-12:
        a_star = (target - q[1]) / (2 * q[0])
    else:
        a_star = float(mids[k])
    if not (a[lo] <= a_star <= a[hi - 1]):
        a_star = float(mids[k])
    b_star = float(np.polyval(q, a_star))
    M = a_star / ms.h1 + b_star / ms.h2
    tangent = 2 * q[0] * a_star + q[1]
    degenerate = abs(q[0]) < 10 * max(fit_res, 1e-9)
    return {"M": float(M), "a": float(a_star), "b": b_star, "tangent_slope": float(tangent),
            "target_slope": target, "fit_residual": fit_res, "in_unit_interval": bool(0 < M < 1),
            "degenerate": bool(degenerate)}


def convexity_check(ms: ManhattanSample, tol: float | None = None) -> CertReport:
    """Each interior point must lie on or below the chord of its neighbors."""
    pts = ms.points
    rep = CertReport(checked=max(0, len(pts) - 2))
    if len(pts) < 3:
        rep.verdict = "inconclusive"
        rep.notes.append("fewer than 3 points")
        return rep
    if tol is None:
        tol = 2 * max((d.get("b_uncertainty", 0.0) for d in ms.diagnostics), default=0.0) + 1e-9
    for k in range(1, len(pts) - 1):
        (a0, b0), (a1, b1), (a2, b2) = pts[k - 1], pts[k], pts[k + 1]
        chord = b0 + (b2 - b0) * (a1 - a0) / (a2 - a0)
        m = chord - b1
        rep.min_margin = min(rep.min_margin, m)
        if m < -tol:
            rep.violations.append({"a": a1, "b": b1, "margin": m})
    rep.verdict = "fail" if rep.violations else "pass"
    return rep


__all__ = [
    "SpectrumTable", "build_spectrum", "table_entropy", "correlation_count", "correlation_sweep",
    "CorrelationFit", "ManhattanSample", "manhattan_estimate", "manhattan_endpoints",
    "critical_exponent", "correlation_exponent", "convexity_check", "complete_length",
    "default_cache_dir",
]
