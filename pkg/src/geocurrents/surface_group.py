"""Words, conjugacy classes and a Fuchsian representation of the closed
genus-g surface group  < a1, b1, ..., ag, bg | [a1,b1] ... [ag,bg] >.

Letters are signed generator indices: 2i-1 stands for a_i, 2i for b_i and
negative values for inverses.  The text syntax writes "a1", "b2" for
generators and "A1", "B2" for their inverses.

Conjugacy classes are identified combinatorially.  A cyclic word is first
shortened with Dehn's algorithm; then every cyclic word of the same length
reachable by swapping one half of a relator for the other half is
generated, and the class is represented by the lexicographically least
rotation of the least such word.  Reaching a shorter word during this
exploration restarts the process, which also removes the non-geodesic
"chains" of half relators that plain Dehn reduction leaves alone.  Closed
curves that run parallel to an edge-line of the polygon tiling have a
second family of shortest words (one on each side of the line); those are
added explicitly.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidCover, TrivialWord, UnsupportedGenus
from .hyperbolic_plane import MoebiusMap

MAX_GENUS = 8
DEFAULT_CLASS_CAP = 50_000_000

# ---------------------------------------------------------------------------
# letters


def letter_name(x: int) -> str:
    i = (abs(x) + 1) // 2
    base = "a" if abs(x) % 2 == 1 else "b"
    return (base if x > 0 else base.upper()) + str(i)


_TOKEN = re.compile(r"([aAbB])(\d+)")


def parse_letters(text: str) -> tuple:
    """Parse "a1 b1 A1 B1" (separators optional) into signed indices."""
    text = text.strip()
    if text in ("", "1", "e", "id"):
        return ()
    pos = 0
    out = []
    for m in _TOKEN.finditer(text):
        gap = text[pos:m.start()]
        if gap.strip(" ,*.·\t") != "":
            raise ValueError(f"cannot parse word {text!r}")
        ch, num = m.group(1), int(m.group(2))
        if num < 1:
            raise ValueError(f"bad generator index in {text!r}")
        idx = 2 * num - 1 if ch in "aA" else 2 * num
        out.append(idx if ch.islower() else -idx)
        pos = m.end()
    if text[pos:].strip(" ,*.·\t") != "":
        raise ValueError(f"cannot parse word {text!r}")
    return tuple(out)


def _code(x: int) -> int:
    # total order on letters: a1 < A1 < b1 < B1 < a2 < ...
    return 2 * (abs(x) - 1) + (1 if x < 0 else 0)


def _free_reduce(letters: Iterable[int]) -> list:
    out: list = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


def _cyclic_reduce(letters: Sequence[int]) -> list:
    w = _free_reduce(letters)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1]


def _invert(letters: Sequence[int]) -> tuple:
    return tuple(-x for x in reversed(letters))


def _min_rotation(w: Sequence[int]) -> tuple:
    n = len(w)
    if n == 0:
        return ()
    codes = [_code(x) for x in w]
    best = min(range(n), key=lambda i: codes[i:] + codes[:i])
    return tuple(w[best:]) + tuple(w[:best])


def _sort_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(_code(x) for x in w))


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the genus-g surface group generators."""

    letters: tuple = ()
    genus: int = 2

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        for x in letters:
            if x == 0 or abs(x) > 2 * self.genus:
                raise ValueError(f"letter {x} outside genus {self.genus}")
        object.__setattr__(self, "letters", tuple(_free_reduce(letters)))

    @classmethod
    def parse(cls, text: str, genus: int = 2) -> "Word":
        return cls(parse_letters(text), genus)

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return " ".join(letter_name(x) for x in self.letters) or "1"

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, self.genus)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        return Word(self.letters * n, self.genus)

    def inverse(self) -> "Word":
        return Word(_invert(self.letters), self.genus)

    def rotate(self, k: int) -> "Word":
        n = len(self.letters)
        if n == 0:
            return self
        k %= n
        return Word(self.letters[k:] + self.letters[:k], self.genus)

    def is_trivial(self) -> bool:
        return len(dehn_reduce(self)) == 0


def generators(genus: int = 2) -> list:
    return [Word((x,), genus) for x in range(1, 2 * genus + 1)]


def relator(genus: int = 2) -> tuple:
    r = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        r += [a, b, -a, -b]
    return tuple(r)


def relator_word(genus: int = 2) -> Word:
    w = Word.__new__(Word)
    object.__setattr__(w, "letters", relator(genus))
    object.__setattr__(w, "genus", genus)
    return w


# ---------------------------------------------------------------------------
# relator tables


@dataclass(frozen=True)
class _Tables:
    genus: int
    replace: dict  # cyclic subword of R^{+-1} of length >= 2g -> replacement
    half: dict  # length-2g subwords -> complementary half
    long_lengths: tuple
    turn_pos: dict  # letter -> position on the vertex link cycle
    pos_relator: tuple
    neg_relator: tuple


@functools.lru_cache(maxsize=None)
def _tables(genus: int) -> _Tables:
    r = relator(genus)
    n = len(r)
    rels = [r, _invert(r)]
    replace = {}
    half = {}
    for rel in rels:
        for k in range(n):
            rot = rel[k:] + rel[:k]
            for length in range(2 * genus, n + 1):
                s, t = rot[:length], rot[length:]
                rep = _invert(t)
                if length == 2 * genus:
                    half[s] = rep
                else:
                    replace[s] = rep
    # link of the single vertex: next(R[j]^-1) = R[j+1]
    nxt = {}
    for j in range(n):
        nxt[-r[j]] = r[(j + 1) % n]
    pos = {}
    x = r[0]
    for k in range(n):
        pos[x] = k
        x = nxt[x]
    if len(pos) != n:
        raise RuntimeError("vertex link is not a single cycle")
    return _Tables(genus, replace, half, tuple(range(2 * genus + 1, n + 1)), pos, r, _invert(r))


def _turns(w: Sequence[int], tables: _Tables) -> list:
    n = len(w)
    m = 4 * tables.genus
    pos = tables.turn_pos
    return [(pos[w[(i + 1) % n]] - pos[-w[i]]) % m for i in range(n)]


# ---------------------------------------------------------------------------
# Dehn reduction


def _dehn_linear(w: list, tables: _Tables) -> list:
    w = _free_reduce(w)
    lengths = tables.long_lengths
    changed = True
    while changed:
        changed = False
        n = len(w)
        for i in range(n):
            for length in lengths:
                if i + length > n:
                    break
                s = tuple(w[i:i + length])
                rep = tables.replace.get(s)
                if rep is not None:
                    w = _free_reduce(w[:i] + list(rep) + w[i + length:])
                    changed = True
                    break
            if changed:
                break
    return w


def dehn_reduce(w: Word) -> Word:
    """Free and Dehn reduction; the result is empty iff w is trivial."""
    t = _tables(w.genus)
    return Word(tuple(_dehn_linear(list(w.letters), t)), w.genus)


def _find_cyclic(w: Sequence[int], table: dict, lengths: Iterable[int]):
    n = len(w)
    if n == 0:
        return None
    ww = tuple(w) + tuple(w)
    for length in lengths:
        if length > n:
            continue
        for i in range(n):
            s = ww[i:i + length]
            rep = table.get(s)
            if rep is not None:
                return i, length, rep
    return None


def _cyclic_dehn(w: Sequence[int], tables: _Tables) -> list:
    w = _cyclic_reduce(w)
    while True:
        hit = _find_cyclic(w, tables.replace, tables.long_lengths)
        if hit is None:
            return w
        i, length, rep = hit
        rot = list(w[i:]) + list(w[:i])
        w = _cyclic_reduce(list(rep) + rot[length:])


def _half_swaps(w: Sequence[int], tables: _Tables):
    n = len(w)
    h = 2 * tables.genus
    if n < h:
        return
    ww = tuple(w) + tuple(w)
    for i in range(n):
        s = ww[i:i + h]
        rep = tables.half.get(s)
        if rep is not None:
            rot = ww[i:i + n]
            yield _cyclic_reduce(list(rep) + list(rot[h:]))


def _line_partner_raw(w: Sequence[int], tables: _Tables):
    """For cyclic words whose turn sequence is (1^(2g-2) 2)^m or its mirror
    image, return (k, v) where v equals the rotation of w starting at k as a
    group element and runs along the other side of the edge-line."""
    g = tables.genus
    n = len(w)
    if n == 0 or n % (2 * g - 1):
        return None
    turns = _turns(w, tables)
    for one, two, rel in ((1, 2, tables.pos_relator), (4 * g - 1, 4 * g - 2, tables.neg_relator)):
        if turns.count(two) * (2 * g - 1) != n or turns.count(one) + turns.count(two) != n:
            continue
        k = turns.index(two) + 1
        rot = list(w[k:]) + list(w[:k])
        rt = turns[k:] + turns[:k]
        if not all(rt[j] == (two if j % (2 * g - 1) == 2 * g - 2 else one) for j in range(n)):
            continue
        rel2 = rel + rel
        out: list = []
        for s in range(0, n, 2 * g - 1):
            seg = tuple(rot[s:s + 2 * g - 1])
            start = None
            for j in range(4 * g):
                if rel2[j:j + 2 * g - 1] == seg:
                    start = j
                    break
            if start is None:
                return None
            out += list(_invert(rel2[start + 2 * g - 1:start + 4 * g]))
        return k % n, out
    return None


def _line_partner(w: Sequence[int], tables: _Tables):
    raw = _line_partner_raw(w, tables)
    if raw is None:
        return None
    v = _cyclic_reduce(raw[1])
    return v if len(v) == len(w) else None


@dataclass(frozen=True)
class _Closure:
    canonical: tuple
    members: frozenset  # minimal rotations of all shortest cyclic words found


def _closure(letters: Sequence[int], genus: int, cap: int = 200_000) -> _Closure:
    tables = _tables(genus)
    w = _cyclic_dehn(letters, tables)
    while True:
        if not w:
            return _Closure((), frozenset())
        start = _min_rotation(w)
        seen = {start}
        stack = [start]
        shorter = None
        while stack and shorter is None:
            u = stack.pop()
            cands = list(_half_swaps(u, tables))
            partner = _line_partner(u, tables)
            if partner is not None:
                cands.append(partner)
            for v in cands:
                if len(v) < len(u) or _find_cyclic(v, tables.replace, tables.long_lengths):
                    shorter = v
                    break
                key = _min_rotation(v)
                if key not in seen:
                    seen.add(key)
                    stack.append(key)
                    if len(seen) > cap:
                        raise BudgetExceeded("conjugacy closure too large")
        if shorter is not None:
            w = _cyclic_dehn(shorter, tables)
            continue
        best = min(seen, key=_sort_key)
        return _Closure(best, frozenset(seen))


# ---------------------------------------------------------------------------
# conjugacy classes


@dataclass(frozen=True, order=False)
class ConjClass:
    """Canonical representative of a conjugacy class (a cyclic word)."""

    cyclic_word: tuple
    genus: int = 2

    @property
    def word(self) -> Word:
        return Word(self.cyclic_word, self.genus)

    @property
    def length(self) -> int:
        return len(self.cyclic_word)

    def __len__(self):
        return len(self.cyclic_word)

    def __str__(self):
        return str(self.word)

    def __lt__(self, other: "ConjClass") -> bool:
        return _sort_key(self.cyclic_word) < _sort_key(other.cyclic_word)

    def sort_key(self) -> tuple:
        return _sort_key(self.cyclic_word)

    def inverse(self) -> "ConjClass":
        return canonical_conj(self.word.inverse())

    def power(self, n: int) -> "ConjClass":
        return canonical_conj(self.word ** n)

    def root(self) -> tuple:
        """(primitive root class, exponent)."""
        return _root(self.cyclic_word, self.genus)


@functools.lru_cache(maxsize=200_000)
def _canonical_cached(letters: tuple, genus: int) -> _Closure:
    return _closure(letters, genus)


def canonical_conj(w) -> ConjClass:
    """Canonical conjugacy class of a word (or of a ConjClass, idempotently)."""
    if isinstance(w, ConjClass):
        w = w.word
    if isinstance(w, str):
        w = Word.parse(w)
    c = _canonical_cached(tuple(_cyclic_reduce(w.letters)), w.genus)
    if not c.canonical:
        raise TrivialWord(f"word {w} is trivial in the group")
    return ConjClass(c.canonical, w.genus)


def _smallest_period(w: tuple) -> int:
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return p
    return n


@functools.lru_cache(maxsize=100_000)
def _root(cyclic: tuple, genus: int) -> tuple:
    clo = _canonical_cached(cyclic, genus)
    best = None
    for u in clo.members:
        p = _smallest_period(u)
        if best is None or p < best[0]:
            best = (p, u)
    p, u = best
    m = len(cyclic) // p
    if m == 1:
        return ConjClass(cyclic, genus), 1
    return canonical_conj(Word(u[:p], genus)), m


def conj_closure(c: ConjClass) -> frozenset:
    """All shortest cyclic words (as minimal rotations) found for a class."""
    return _canonical_cached(c.cyclic_word, c.genus).members


# Tracked variants: each step keeps a word c with  current = c * start * c^-1.


def _t_rotate(u: tuple, c: tuple, i: int):
    return u[i:] + u[:i], tuple(_free_reduce(_invert(u[:i]) + c))


def _t_cyclic_reduce(v: Sequence[int], c: tuple):
    w = _free_reduce(v)
    k = 0
    while k < len(w) - 1 - k and w[k] == -w[len(w) - 1 - k]:
        k += 1
    prefix = tuple(w[:k])
    return tuple(w[k:len(w) - k]), tuple(_free_reduce(_invert(prefix) + c))


def _t_replace(u: tuple, c: tuple, i: int, length: int, rep: tuple):
    rot, c = _t_rotate(u, c, i)
    return _t_cyclic_reduce(rep + rot[length:], c)


def _t_cyclic_dehn(u: tuple, c: tuple, tables: _Tables):
    u, c = _t_cyclic_reduce(u, c)
    while True:
        hit = _find_cyclic(u, tables.replace, tables.long_lengths)
        if hit is None:
            return u, c
        i, length, rep = hit
        u, c = _t_replace(u, c, i, length, rep)


def _t_min_rotation(u: tuple, c: tuple):
    if not u:
        return u, c
    best = _min_rotation(u)
    n = len(u)
    for i in range(n):
        if u[i:] + u[:i] == best:
            return _t_rotate(u, c, i)
    raise AssertionError


def _t_moves(u: tuple, c: tuple, tables: _Tables):
    h = 2 * tables.genus
    n = len(u)
    if n >= h:
        uu = u + u
        for i in range(n):
            rep = tables.half.get(uu[i:i + h])
            if rep is not None:
                yield _t_replace(u, c, i, h, rep)
    raw = _line_partner_raw(u, tables)
    if raw is not None:
        rot, c2 = _t_rotate(u, c, raw[0])
        v, cv = _t_cyclic_reduce(raw[1], c2)
        if len(v) == n:
            yield v, cv


def _equal_elements(u: Sequence[int], v: Sequence[int], tables: _Tables) -> bool:
    return not _dehn_linear(list(u) + list(_invert(v)), tables)


def class_conjugators(w: Word):
    """Canonical class of w with conjugating words.

    Returns (cls, to_canon, members) where the canonical word equals
    to_canon * w * to_canon^-1 and members is a list of (word, c) with
    word = c * canonical * c^-1; the members are all shortest cyclic words
    found for the class, each in minimal rotation."""
    g = w.genus
    tables = _tables(g)
    u, c = _t_cyclic_dehn(tuple(w.letters), (), tables)
    while True:
        if not u:
            raise TrivialWord(f"word {w} is trivial in the group")
        u, c = _t_min_rotation(u, c)
        seen = {u: c}
        stack = [u]
        shorter = None
        while stack and shorter is None:
            x = stack.pop()
            for v, cv in _t_moves(x, seen[x], tables):
                if len(v) < len(x) or _find_cyclic(v, tables.replace, tables.long_lengths):
                    shorter = (v, cv)
                    break
                v, cv = _t_min_rotation(v, cv)
                if v not in seen:
                    seen[v] = cv
                    stack.append(v)
        if shorter is not None:
            u, c = _t_cyclic_dehn(shorter[0], shorter[1], tables)
            continue
        best = min(seen, key=_sort_key)
        cb = seen[best]
        cb_inv = _invert(cb)
        canon = Word(best, g)
        members = []
        for m, cm in sorted(seen.items(), key=lambda kv: _sort_key(kv[0])):
            members.append((m, _shorten_conjugator(Word(cm + cb_inv, g), canon)))
        return ConjClass(best, g), Word(cb, g), members


def _shorten_conjugator(c: Word, w: Word, span: int = 3) -> Word:
    # c and c w^k conjugate w to the same element
    best = dehn_reduce(c)
    for k in range(-span, span + 1):
        if k == 0:
            continue
        cand = dehn_reduce(c * w ** k)
        if (len(cand), cand.letters) < (len(best), best.letters):
            best = cand
    return best


def are_conjugate(u: Word, v: Word) -> bool:
    return canonical_conj(u) == canonical_conj(v)


# ---------------------------------------------------------------------------
# enumeration


def _reduced_cyclic_words(length: int, genus: int):
    """Cyclically reduced words of the given length that are minimal among
    their rotations and contain no more than half a relator."""
    tables = _tables(genus)
    letters = [x for x in range(1, 2 * genus + 1)] + [-x for x in range(1, 2 * genus + 1)]
    letters.sort(key=_code)
    first_code = None
    w: list = []

    def rec():
        k = len(w)
        if k == length:
            if w[0] == -w[-1]:
                return
            if _find_cyclic(w, tables.replace, tables.long_lengths):
                return
            if _min_rotation(w) != tuple(w):
                return
            yield tuple(w)
            return
        for x in letters:
            if k and w[-1] == -x:
                continue
            # a rotation starting later must not be smaller than the start
            if k and _code(x) < _code(w[0]):
                continue
            w.append(x)
            if k + 1 > 2 * genus:
                tail = tuple(w[-(2 * genus + 1):])
                if tail in tables.replace:
                    w.pop()
                    continue
            yield from rec()
            w.pop()

    del first_code
    yield from rec()


def classes_of_length(length: int, genus: int = 2) -> list:
    """All classes whose shortest representatives have exactly this length."""
    if length <= 0:
        return []
    out = []
    for w in _reduced_cyclic_words(length, genus):
        c = _canonical_cached(w, genus)
        if c.canonical == w:
            out.append(ConjClass(w, genus))
    out.sort(key=ConjClass.sort_key)
    return out


def enumerate_classes(max_len: int, genus: int = 2, cap: int = DEFAULT_CLASS_CAP) -> list:
    """All conjugacy classes with a representative of word length <= max_len,
    sorted by length and then lexicographically."""
    if max_len < 0 or max_len > 16:
        raise ValueError("max_len must lie in [0, 16]")
    _check_genus(genus)
    # rough a priori size check before doing any work
    growth = 4 * genus - 1
    est = sum(growth ** k / k for k in range(1, max_len + 1))
    if est > 4 * cap:
        raise BudgetExceeded(f"about {est:.3g} classes expected, cap is {cap}")
    out: list = []
    for n in range(1, max_len + 1):
        out += classes_of_length(n, genus)
        if len(out) > cap:
            raise BudgetExceeded(f"class count exceeded cap {cap}")
    return out


# ---------------------------------------------------------------------------
# Fuchsian representation


@dataclass(frozen=True, eq=False)
class FuchsianRep:
    """Images of a1, b1, ..., ag, bg as Moebius maps of the half-plane."""

    genus: int
    generator_maps: tuple
    name: str = "custom"

    def __post_init__(self):
        if len(self.generator_maps) != 2 * self.genus:
            raise ValueError("need 2g generator maps")

    def generator(self, x: int) -> MoebiusMap:
        m = self.generator_maps[abs(x) - 1]
        return m if x > 0 else m.inverse()

    @functools.cached_property
    def _mats(self) -> dict:
        out = {}
        for i, m in enumerate(self.generator_maps):
            g = m.matrix / math.sqrt(abs(np.linalg.det(m.matrix)))
            out[i + 1] = g
            out[-(i + 1)] = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
        return out

    def matrix(self, w) -> np.ndarray:
        letters = w.letters if isinstance(w, Word) else w
        mats = self._mats
        m = np.eye(2)
        # unit-determinant factors; renormalizing by a computed determinant
        # would cancel catastrophically once entries grow
        for x in letters:
            m = m @ mats[x]
        return m

    def evaluate(self, w) -> MoebiusMap:
        return MoebiusMap.from_matrix(self.matrix(w))

    def trace(self, w) -> float:
        m = self.matrix(w)
        return float(abs(m[0, 0] + m[1, 1]))

    def length(self, w) -> float:
        """Translation length of a word or class under this representation."""
        if isinstance(w, ConjClass):
            w = w.word
        t = self.trace(w)
        if t <= 2.0:
            return 0.0
        return 2.0 * math.acosh(t / 2.0)

    def relator_defect(self) -> float:
        m = self.matrix(relator(self.genus))
        return float(min(np.abs(m - np.eye(2)).max(), np.abs(m + np.eye(2)).max()))

    def precomposed(self, images: dict, name: str | None = None) -> "FuchsianRep":
        """Representation g -> rho(phi(g)) for an endomorphism phi given by
        generator images; phi must preserve the relator."""
        maps = []
        for x in range(1, 2 * self.genus + 1):
            img = images.get(x, Word((x,), self.genus))
            if isinstance(img, str):
                img = Word.parse(img, self.genus)
            maps.append(self.evaluate(img))
        rep = FuchsianRep(self.genus, tuple(maps), name or f"{self.name}*phi")
        if rep.relator_defect() > 1e-8:
            raise ValueError("generator images do not preserve the relator")
        return rep

    def check_invariants(self, max_len: int = 4) -> None:
        if self.relator_defect() > 1e-8:
            raise ValueError("relator does not map to +-identity")
        _check_short_words_hyperbolic(self, max_len)


def _check_short_words_hyperbolic(rep: FuchsianRep, max_len: int) -> None:
    g = rep.genus
    letters = list(range(1, 2 * g + 1)) + [-x for x in range(1, 2 * g + 1)]
    mats = np.array([rep._mats[x] for x in letters])
    inv_index = np.array([letters.index(-x) for x in letters])
    # layer of reduced words: current matrices and last letter index
    cur = mats.copy()
    last = np.arange(len(letters))
    for k in range(1, max_len + 1):
        tr = np.abs(cur[:, 0, 0] + cur[:, 1, 1])
        # words of length <= 4 that are trivial cannot occur (relator has length 4g >= 8)
        if np.any(tr <= 2.0 + 1e-10):
            raise ValueError(f"a word of length {k} is not hyperbolic")
        if k == max_len:
            break
        nl = len(letters)
        nxt = np.einsum("wij,ljk->wlik", cur, mats).reshape(-1, 2, 2)
        new_last = np.tile(np.arange(nl), len(cur))
        keep = new_last != np.repeat(inv_index[last], nl)
        cur, last = nxt[keep], new_last[keep]


def _check_genus(genus: int) -> None:
    if genus < 2:
        raise UnsupportedGenus("genus must be at least 2")
    if genus > MAX_GENUS:
        raise UnsupportedGenus(f"genus {genus} exceeds the supported maximum {MAX_GENUS}")


def _regular_polygon_maps(genus: int) -> tuple:
    n = 4 * genus
    alpha = math.pi / (2 * genus)
    cosh_r = 1.0 / (math.tan(math.pi / n) * math.tan(alpha / 2))
    r = math.tanh(math.acosh(cosh_r) / 2)
    v = [r * complex(math.cos(math.pi / n + 2 * math.pi * k / n), math.sin(math.pi / n + 2 * math.pi * k / n))
         for k in range(n)]

    def to_origin(p):
        return np.array([[1, -p], [-p.conjugate(), 1]]) / math.sqrt(1 - abs(p) ** 2)

    def act(m, z):
        return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])

    c = np.array([[1, -1j], [1, 1j]])
    ci = np.linalg.inv(c)

    def isometry(p1, p2, q1, q2):
        # disk isometry with p1 -> q1 and p2 -> q2 (segments of equal length)
        mp, mq = to_origin(p1), to_origin(q1)
        rot = act(mq, q2) / act(mp, p2)
        s = np.sqrt(rot)
        md = np.linalg.inv(mq) @ np.array([[s, 0], [0, s.conjugate()]]) @ mp
        m = ci @ md @ c
        return MoebiusMap(m[0, 0].real, m[0, 1].real, m[1, 0].real, m[1, 1].real)

    maps = []
    for i in range(genus):
        k = 4 * i
        # a_i carries side k+2 onto side k; b_i carries side k+1 onto side k+3
        a = isometry(v[k + 2], v[k + 3], v[k + 1], v[k])
        b = isometry(v[k + 3], v[(k + 4) % n], v[k + 2], v[k + 1]).inverse()
        maps += [a, b]
    return tuple(maps)


@functools.lru_cache(maxsize=None)
def fuchsian_rep(genus: int = 2) -> FuchsianRep:
    """Side-pairing representation of the regular 4g-gon with angles pi/2g."""
    _check_genus(genus)
    rep = FuchsianRep(genus, _regular_polygon_maps(genus), f"regular-{4 * genus}-gon")
    rep.check_invariants(4 if genus <= 4 else 3)
    return rep


def evaluate(rep: FuchsianRep, w: Word) -> MoebiusMap:
    return rep.evaluate(w)


def twisted_rep(genus: int = 2) -> FuchsianRep:
    """A second marked hyperbolic structure: the regular one precomposed with
    the Dehn twist a1 -> a1, b1 -> b1 a1 (which fixes [a1, b1])."""
    base = fuchsian_rep(genus)
    return base.precomposed({2: Word((2, 1), genus)}, name=f"{base.name}+twist")


# ---------------------------------------------------------------------------
# finite covers


def _compose(p: tuple, q: tuple) -> tuple:
    # (p o q)(i) = p[q[i]]
    return tuple(p[i] for i in q)


def _inverse_perm(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


@dataclass(frozen=True)
class Cover:
    """A degree-n cover given by the action of the generators on the left
    cosets g_1 H, ..., g_n H (0-based labels), with sigma_s(i) = j when
    s g_i H = g_j H, together with the transversal words."""

    degree: int
    permutations: tuple
    transversal: tuple
    genus: int = 2

    def __post_init__(self):
        n, g = self.degree, self.genus
        perms = tuple(tuple(int(x) for x in p) for p in self.permutations)
        object.__setattr__(self, "permutations", perms)
        tr = tuple(t if isinstance(t, Word) else Word.parse(t, g) for t in self.transversal)
        object.__setattr__(self, "transversal", tr)
        if n < 1:
            raise InvalidCover("degree must be positive")
        if len(perms) != 2 * g:
            raise InvalidCover("need one permutation per generator")
        for p in perms:
            if sorted(p) != list(range(n)):
                raise InvalidCover(f"{p} is not a permutation of {n} points")
        if self.perm(relator(g)) != tuple(range(n)):
            raise InvalidCover("permutations do not respect the relator")
        if len(tr) != n or len(tr[0]) != 0:
            raise InvalidCover("transversal must have n words starting with the identity")
        if sorted(self.coset_of(t) for t in tr) != list(range(n)):
            raise InvalidCover("transversal words do not lie in distinct cosets")

    @classmethod
    def from_cycles(cls, cycles: dict, transversal: Sequence, degree: int, genus: int = 2) -> "Cover":
        """Build from cycle notation (1-based), e.g. {"a1": "(1 2)"}."""
        perms = []
        for x in range(1, 2 * genus + 1):
            spec = cycles.get(letter_name(x), "")
            p = list(range(degree))
            for cyc in re.findall(r"\(([^)]*)\)", spec):
                pts = [int(t) - 1 for t in cyc.replace(",", " ").split()]
                for i, a in enumerate(pts):
                    p[a] = pts[(i + 1) % len(pts)]
            perms.append(tuple(p))
        return cls(degree, tuple(perms), tuple(transversal), genus)

    def letter_perm(self, x: int) -> tuple:
        p = self.permutations[abs(x) - 1]
        return p if x > 0 else _inverse_perm(p)

    def perm(self, w) -> tuple:
        letters = w.letters if isinstance(w, Word) else w
        out = tuple(range(self.degree))
        for x in letters:
            out = _compose(out, self.letter_perm(x))
        return out

    def coset_of(self, w) -> int:
        """Label j with w H = g_j H."""
        return self.perm(w)[0]

    def in_subgroup(self, w) -> bool:
        return self.coset_of(w) == 0


def cover_z2(genus: int = 2, letter: int = 1) -> Cover:
    """Index-2 cover from the map to Z/2 sending one generator to 1."""
    perms = []
    for x in range(1, 2 * genus + 1):
        perms.append((1, 0) if x == letter else (0, 1))
    return Cover(2, tuple(perms), (Word((), genus), Word((letter,), genus)), genus)


def words_up_to(max_len: int, genus: int = 2):
    """All freely reduced words of length <= max_len (identity first)."""
    letters = sorted([x for x in range(1, 2 * genus + 1)] + [-x for x in range(1, 2 * genus + 1)], key=_code)
    layer = [()]
    yield Word((), genus)
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield Word(w, genus)
        layer = nxt


__all__ = [
    "Word", "ConjClass", "FuchsianRep", "Cover",
    "dehn_reduce", "canonical_conj", "enumerate_classes", "fuchsian_rep", "evaluate",
    "twisted_rep", "cover_z2", "generators", "relator", "relator_word", "parse_letters",
    "letter_name", "classes_of_length", "are_conjugate", "words_up_to", "conj_closure",
    "class_conjugators",
]
