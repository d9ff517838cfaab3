"""Compiled enumeration of canonical class words.

Mirrors the closure algorithm of surface_group on letter codes
(c = 2(|x|-1) + [x<0], inverse is c ^ 1) so that shells of ~10^7 classes
can be produced in minutes.  Words of length <= 12 are packed into int64
keys with five bits per letter, so integer order equals lexicographic
order for words of equal length.
"""

from __future__ import annotations

import functools

import numpy as np
from numba import njit

MAXN = 12
_MAXW = 64
_CAP = 2048


@functools.lru_cache(maxsize=None)
def relator_arrays(genus: int):
    m = 4 * genus
    rel = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        rel += [a, b, -a, -b]
    code = [2 * (abs(x) - 1) + (1 if x < 0 else 0) for x in rel]
    rc = np.array(code, dtype=np.int64)
    ric = np.array([c ^ 1 for c in reversed(code)], dtype=np.int64)
    pos = np.zeros(m, dtype=np.int64)
    posi = np.zeros(m, dtype=np.int64)
    for k in range(m):
        pos[rc[k]] = k
        posi[ric[k]] = k
    # position on the vertex link: next(R[j]^-1) = R[j+1]
    nxt = {}
    for j in range(m):
        nxt[code[j] ^ 1] = code[(j + 1) % m]
    tpos = np.zeros(m, dtype=np.int64)
    c = code[0]
    for k in range(m):
        tpos[c] = k
        c = nxt[c]
    return rc, ric, pos, posi, tpos


@njit(cache=True)
def _free_reduce(src, n, dst):
    k = 0
    for i in range(n):
        c = src[i]
        if k > 0 and dst[k - 1] == (c ^ 1):
            k -= 1
        else:
            dst[k] = c
            k += 1
    return k


@njit(cache=True)
def _cyc_reduce(w, n):
    """Free and cyclic reduction in place; returns the new length."""
    tmp = np.empty(max(n, 1), dtype=np.int64)
    k = _free_reduce(w, n, tmp)
    i = 0
    j = k - 1
    while i < j and tmp[i] == (tmp[j] ^ 1):
        i += 1
        j -= 1
    if k == 0:
        return 0
    length = j - i + 1
    for t in range(length):
        w[t] = tmp[i + t]
    return length


@njit(cache=True)
def _run(w, n, i, rel, pos, m):
    p = pos[w[i]]
    k = 0
    lim = n if n < m else m
    while k < lim and w[(i + k) % n] == rel[(p + k) % m]:
        k += 1
    return k


@njit(cache=True)
def _replace(w, n, i, length, rel, pos, m, out):
    """out <- (inverse complement of the piece) + rest; returns new length
    after cyclic reduction."""
    p = pos[w[i]]
    k = 0
    for j in range(m - length):
        out[k] = rel[(p + m - 1 - j) % m] ^ 1
        k += 1
    for j in range(length, n):
        out[k] = w[(i + j) % n]
        k += 1
    return _cyc_reduce(out, k)


@njit(cache=True)
def _has_long_piece(w, n, rc, ric, pos, posi, m, g):
    for i in range(n):
        if _run(w, n, i, rc, pos, m) >= 2 * g + 1:
            return True
        if _run(w, n, i, ric, posi, m) >= 2 * g + 1:
            return True
    return False


@njit(cache=True)
def _cyc_dehn(w, n, rc, ric, pos, posi, m, g):
    buf = np.empty(_MAXW, dtype=np.int64)
    n = _cyc_reduce(w, n)
    changed = True
    while changed and n > 0:
        changed = False
        for i in range(n):
            k = _run(w, n, i, rc, pos, m)
            if k >= 2 * g + 1:
                n = _replace(w, n, i, k, rc, pos, m, buf)
                w[:n] = buf[:n]
                changed = True
                break
            k = _run(w, n, i, ric, posi, m)
            if k >= 2 * g + 1:
                n = _replace(w, n, i, k, ric, posi, m, buf)
                w[:n] = buf[:n]
                changed = True
                break
    return n


@njit(cache=True)
def _encode_min_rotation(w, n):
    best = -1
    for s in range(n):
        key = 0
        for j in range(n):
            key = (key << 5) | w[(s + j) % n]
        if best < 0 or key < best:
            best = key
    return best


@njit(cache=True)
def _decode(key, n, out):
    for j in range(n - 1, -1, -1):
        out[j] = key & 31
        key >>= 5


@njit(cache=True)
def _line_partner(w, n, rc, ric, pos, posi, tpos, m, g, out):
    """Fills out with the word across the edge-line and returns its length,
    or 0 if w does not run along a line."""
    p = 2 * g - 1
    if n % p != 0:
        return 0
    turns = np.empty(n, dtype=np.int64)
    for i in range(n):
        turns[i] = (tpos[w[(i + 1) % n]] - tpos[w[i] ^ 1]) % m
    for side in range(2):
        one = 1 if side == 0 else m - 1
        two = 2 if side == 0 else m - 2
        kk = -1
        for i in range(n):
            if turns[i] == two:
                kk = i
                break
        if kk < 0:
            continue
        ok = True
        for j in range(n):
            want = two if j % p == p - 1 else one
            if turns[(kk + 1 + j) % n] != want:
                ok = False
                break
        if not ok:
            continue
        rel = rc if side == 0 else ric
        ps = pos if side == 0 else posi
        k = 0
        for s in range(0, n, p):
            first = w[(kk + 1 + s) % n]
            start = ps[first]
            for j in range(p):
                if w[(kk + 1 + s + j) % n] != rel[(start + j) % m]:
                    return 0
            # rest = rel[start+p : start+m], appended inverted
            for j in range(m - p):
                out[k] = rel[(start + m - 1 - j) % m] ^ 1
                k += 1
        k = _cyc_reduce(out, k)
        if k == n:
            return k
        return 0
    return 0


@njit(cache=True)
def _canonical_status(w, n, rc, ric, pos, posi, tpos, m, g):
    """0: w is the canonical word of its class; 1: it is not;
    2: closure overflow (caller must decide).  w must be a cyclically
    reduced minimal rotation without long relator pieces."""
    key0 = _encode_min_rotation(w, n)
    keys = np.empty(_CAP, dtype=np.int64)
    keys[0] = key0
    nkeys = 1
    stack = np.empty(_CAP, dtype=np.int64)
    stack[0] = key0
    top = 1
    u = np.empty(_MAXW, dtype=np.int64)
    v = np.empty(_MAXW, dtype=np.int64)
    h = 2 * g
    while top > 0:
        top -= 1
        _decode(stack[top], n, u)
        for cand in range(2 * n + 1):
            if cand < 2 * n:
                i = cand // 2
                rel = rc if cand % 2 == 0 else ric
                ps = pos if cand % 2 == 0 else posi
                if _run(u, n, i, rel, ps, m) < h:
                    continue
                ln = _replace(u, n, i, h, rel, ps, m, v)
            else:
                ln = _line_partner(u, n, rc, ric, pos, posi, tpos, m, g, v)
                if ln == 0:
                    continue
            if ln < n:
                return 1
            if _has_long_piece(v, ln, rc, ric, pos, posi, m, g):
                return 1
            key = _encode_min_rotation(v, ln)
            if key < key0:
                return 1
            seen = False
            for t in range(nkeys):
                if keys[t] == key:
                    seen = True
                    break
            if not seen:
                if nkeys >= _CAP:
                    return 2
                keys[nkeys] = key
                nkeys += 1
                stack[top] = key
                top += 1
    return 0


@njit(cache=True)
def _enumerate_shell(n, g, rc, ric, pos, posi, tpos):
    m = 4 * g
    cap = 1024
    out = np.empty(cap, dtype=np.int64)
    nout = 0
    hard = np.empty(64, dtype=np.int64)
    nhard = 0
    w = np.empty(_MAXW, dtype=np.int64)
    choice = np.zeros(n + 1, dtype=np.int64)
    runa = np.zeros(n + 1, dtype=np.int64)
    runb = np.zeros(n + 1, dtype=np.int64)
    tmp = np.empty(_MAXW, dtype=np.int64)
    for c0 in range(m):
        w[0] = c0
        runa[0] = 1
        runb[0] = 1
        if n == 1:
            out[nout] = c0
            nout += 1
            continue
        depth = 1
        choice[1] = c0
        while depth >= 1:
            c = choice[depth]
            if c >= m:
                depth -= 1
                if depth >= 1:
                    choice[depth] += 1
                continue
            prev = w[depth - 1]
            if c == (prev ^ 1):
                choice[depth] += 1
                continue
            ra = runa[depth - 1] + 1 if rc[(pos[prev] + 1) % m] == c else 1
            rb = runb[depth - 1] + 1 if ric[(posi[prev] + 1) % m] == c else 1
            if ra > 2 * g or rb > 2 * g:
                choice[depth] += 1
                continue
            w[depth] = c
            runa[depth] = ra
            runb[depth] = rb
            if depth < n - 1:
                depth += 1
                choice[depth] = c0
                continue
            # complete word
            choice[depth] += 1
            if w[n - 1] == (w[0] ^ 1):
                continue
            key = 0
            for j in range(n):
                key = (key << 5) | w[j]
            if _encode_min_rotation(w, n) != key:
                continue
            if _has_long_piece(w, n, rc, ric, pos, posi, m, g):
                continue
            for j in range(n):
                tmp[j] = w[j]
            st = _canonical_status(tmp, n, rc, ric, pos, posi, tpos, m, g)
            if st == 1:
                continue
            if st == 2:
                if nhard >= hard.shape[0]:
                    bigger = np.empty(2 * hard.shape[0], dtype=np.int64)
                    bigger[:nhard] = hard[:nhard]
                    hard = bigger
                hard[nhard] = key
                nhard += 1
                continue
            if nout >= out.shape[0]:
                bigger = np.empty(2 * out.shape[0], dtype=np.int64)
                bigger[:nout] = out[:nout]
                out = bigger
            out[nout] = key
            nout += 1
    return out[:nout], hard[:nhard]


def shell_keys(n: int, genus: int):
    """Packed keys of canonical words of length n, plus keys needing the
    exact (uncompiled) closure."""
    if n < 1 or n > MAXN:
        raise ValueError(f"compiled enumeration supports lengths 1..{MAXN}")
    rc, ric, pos, posi, tpos = relator_arrays(genus)
    keys, hard = _enumerate_shell(n, genus, rc, ric, pos, posi, tpos)
    return np.sort(keys), hard


def decode_codes(keys: np.ndarray, n: int) -> np.ndarray:
    """(k, n) array of letter codes."""
    out = np.empty((len(keys), n), dtype=np.int64)
    k = keys.copy()
    for j in range(n - 1, -1, -1):
        out[:, j] = k & 31
        k >>= 5
    return out


def codes_to_letters(codes) -> tuple:
    return tuple((c // 2 + 1) * (-1 if c % 2 else 1) for c in codes)


@njit(cache=True)
def _log_traces(codes, mats):
    k, n = codes.shape
    out = np.empty(k)
    for r in range(k):
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        for j in range(n):
            mm = mats[codes[r, j]]
            a2 = a * mm[0, 0] + b * mm[1, 0]
            b2 = a * mm[0, 1] + b * mm[1, 1]
            c2 = c * mm[0, 0] + d * mm[1, 0]
            d2 = c * mm[0, 1] + d * mm[1, 1]
            a, b, c, d = a2, b2, c2, d2
        out[r] = abs(a + d)
    return out


def translation_lengths(codes: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """2 arccosh(|tr|/2) for each row of letter codes; mats indexed by code."""
    tr = _log_traces(np.ascontiguousarray(codes), np.ascontiguousarray(mats))
    return 2.0 * np.arccosh(np.maximum(tr, 2.0) / 2.0)
