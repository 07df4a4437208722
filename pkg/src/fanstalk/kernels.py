"""Finite-field point-scan kernels.

Polynomials are two-term: ``c1 * x^E1 + c2 * x^E2`` with coefficients already
reduced mod ``q``.  Points are enumerated by index: digit ``i`` of the index
in base ``q`` is coordinate ``i``.  Points with a zero at a coordinate flagged
in ``inv`` are skipped.

Two interchangeable backends exist.  The numba one is used unless numba is
missing or ``FANSTALK_DISABLE_NUMBA`` is set to a non-empty value other than
``0``; the numpy one vectorizes over blocks of points.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

BLOCK = 1 << 16


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("FANSTALK_DISABLE_NUMBA", "") in ("", "0")


def thread_count() -> int:
    raw = os.environ.get("FANSTALK_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _resolve(backend):
    if backend is None:
        return "numba" if numba_enabled() else "numpy"
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    return backend


# --- numba backend -------------------------------------------------------------

if HAVE_NUMBA:

    @njit(nogil=True, cache=True)
    def _nb_pow(x, e, q):
        r = 1
        b = x % q
        while e > 0:
            if e & 1:
                r = (r * b) % q
            b = (b * b) % q
            e >>= 1
        return r

    @njit(nogil=True, cache=True)
    def _nb_decode(idx, q, x):
        for i in range(x.shape[0]):
            x[i] = idx % q
            idx //= q

    @njit(nogil=True, cache=True)
    def _nb_term(x, E, j, q):
        r = 1
        for i in range(x.shape[0]):
            if E[j, i]:
                r = (r * _nb_pow(x[i], E[j, i], q)) % q
        return r

    @njit(nogil=True, cache=True)
    def _nb_dterm(x, E, j, i, q):
        # d/dx_i of x^E[j]
        if E[j, i] == 0:
            return 0
        r = E[j, i] % q
        for l in range(x.shape[0]):
            e = E[j, l] - 1 if l == i else E[j, l]
            if e:
                r = (r * _nb_pow(x[l], e, q)) % q
        return r

    @njit(nogil=True, cache=True)
    def _nb_rank(J, rows, q):
        n = J.shape[1]
        rk = 0
        for c in range(n):
            piv = -1
            for r in range(rk, rows):
                if J[r, c] != 0:
                    piv = r
                    break
            if piv < 0:
                continue
            for t in range(n):
                tmp = J[rk, t]
                J[rk, t] = J[piv, t]
                J[piv, t] = tmp
            inv = _nb_pow(J[rk, c], q - 2, q)
            for t in range(n):
                J[rk, t] = (J[rk, t] * inv) % q
            for r in range(rows):
                if r != rk and J[r, c] != 0:
                    f = J[r, c]
                    for t in range(n):
                        J[r, t] = (J[r, t] - f * J[rk, t]) % q
            rk += 1
        return rk

    @njit(nogil=True, cache=True)
    def _nb_masks(start, stop, q, inv, E1, E2, c1, c2, valid, mask):
        n = inv.shape[0]
        k = E1.shape[0]
        x = np.zeros(n, np.int64)
        for p in range(stop - start):
            _nb_decode(start + p, q, x)
            ok = True
            for i in range(n):
                if inv[i] and x[i] == 0:
                    ok = False
                    break
            valid[p] = ok
            if not ok:
                continue
            for j in range(k):
                v = (c1[j] * _nb_term(x, E1, j, q) + c2[j] * _nb_term(x, E2, j, q)) % q
                mask[p, j] = v == 0

    @njit(nogil=True, cache=True)
    def _nb_masks_at(X, q, E1, E2, c1, c2, mask):
        k = E1.shape[0]
        for p in range(X.shape[0]):
            x = X[p]
            for j in range(k):
                v = (c1[j] * _nb_term(x, E1, j, q) + c2[j] * _nb_term(x, E2, j, q)) % q
                mask[p, j] = v == 0

    @njit(nogil=True, cache=True)
    def _nb_violations(start, stop, q, inv, E1, E2, c1, c2, rank_table, flags):
        n = inv.shape[0]
        k = E1.shape[0]
        x = np.zeros(n, np.int64)
        J = np.zeros((k, n), np.int64)
        for p in range(stop - start):
            _nb_decode(start + p, q, x)
            ok = True
            for i in range(n):
                if inv[i] and x[i] == 0:
                    ok = False
                    break
            if not ok:
                continue
            bits = 0
            rows = 0
            for j in range(k):
                v = (c1[j] * _nb_term(x, E1, j, q) + c2[j] * _nb_term(x, E2, j, q)) % q
                if v == 0:
                    bits |= 1 << j
                    for i in range(n):
                        J[rows, i] = (
                            c1[j] * _nb_dterm(x, E1, j, i, q)
                            + c2[j] * _nb_dterm(x, E2, j, i, q)
                        ) % q
                    rows += 1
            if bits == 0:
                continue
            if _nb_rank(J, rows, q) < rank_table[bits]:
                flags[p] = True

    @njit(nogil=True, cache=True)
    def _nb_violations_at(X, q, E1, E2, c1, c2, rank_table, flags):
        n = X.shape[1]
        k = E1.shape[0]
        J = np.zeros((k, n), np.int64)
        for p in range(X.shape[0]):
            x = X[p]
            bits = 0
            rows = 0
            for j in range(k):
                v = (c1[j] * _nb_term(x, E1, j, q) + c2[j] * _nb_term(x, E2, j, q)) % q
                if v == 0:
                    bits |= 1 << j
                    for i in range(n):
                        J[rows, i] = (
                            c1[j] * _nb_dterm(x, E1, j, i, q)
                            + c2[j] * _nb_dterm(x, E2, j, i, q)
                        ) % q
                    rows += 1
            if bits == 0:
                continue
            if _nb_rank(J, rows, q) < rank_table[bits]:
                flags[p] = True


# --- numpy backend -------------------------------------------------------------

def _decode(start, stop, q, n):
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, n), np.int64)
    for i in range(n):
        out[:, i] = idx % q
        idx = idx // q
    return out


def _pow_table(q, emax):
    t = np.ones((q, emax + 1), np.int64)
    for e in range(1, emax + 1):
        t[:, e] = (t[:, e - 1] * np.arange(q)) % q
    return t


def _np_monomials(x, E, table, q):
    # x: (P, n), E: (k, n) -> (P, k) values of x^E[j] mod q
    P, n = x.shape
    out = np.ones((P, E.shape[0]), np.int64)
    for i in range(n):
        out = (out * table[x[:, i][:, None], E[None, :, i]]) % q
    return out


def _np_values(x, E1, E2, c1, c2, table, q):
    return (c1 * _np_monomials(x, E1, table, q) + c2 * _np_monomials(x, E2, table, q)) % q


def _np_jacobian(x, E1, E2, c1, c2, table, q):
    P, n = x.shape
    k = E1.shape[0]
    J = np.zeros((P, k, n), np.int64)
    for i in range(n):
        for E, c in ((E1, c1), (E2, c2)):
            Ed = E.copy()
            has = Ed[:, i] > 0
            Ed[:, i] = np.where(has, Ed[:, i] - 1, 0)
            coef = (c * (E[:, i] % q)) % q
            J[:, :, i] += np.where(has, coef, 0) * _np_monomials(x, Ed, table, q)
    return J % q


def batched_rank_mod(J, q):
    """Rank mod ``q`` of every matrix in the stack ``J`` (shape ``(P, k, n)``)."""
    J = J.copy() % q
    P, k, n = J.shape
    inv = np.zeros(q, np.int64)
    for a in range(1, q):
        inv[a] = pow(a, q - 2, q)
    used = np.zeros((P, k), bool)
    rows = np.arange(P)
    for c in range(n):
        cand = (J[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = rows[has]
        piv = cand[has].argmax(axis=1)
        prow = J[b, piv] * inv[J[b, piv, c]][:, None] % q
        J[b, piv] = prow
        factor = J[b, :, c].copy()
        factor[np.arange(b.size), piv] = 0
        J[b] = (J[b] - factor[:, :, None] * prow[:, None, :]) % q
        used[b, piv] = True
    return used.sum(axis=1)


def _np_masks(start, stop, q, inv, E1, E2, c1, c2):
    x = _decode(start, stop, q, inv.size)
    valid = ~((x == 0) & inv[None, :]).any(axis=1)
    table = _pow_table(q, int(max(E1.max(initial=0), E2.max(initial=0))))
    mask = np.zeros((x.shape[0], E1.shape[0]), bool)
    if valid.any():
        mask[valid] = _np_values(x[valid], E1, E2, c1, c2, table, q) == 0
    return valid, mask


def _np_violations(start, stop, q, inv, E1, E2, c1, c2, rank_table):
    x = _decode(start, stop, q, inv.size)
    valid = ~((x == 0) & inv[None, :]).any(axis=1)
    return _np_violations_x(x, valid, q, E1, E2, c1, c2, rank_table)


def _np_violations_x(x, valid, q, E1, E2, c1, c2, rank_table):
    flags = np.zeros(x.shape[0], bool)
    table = _pow_table(q, int(max(E1.max(initial=0), E2.max(initial=0))))
    where = np.flatnonzero(valid)
    if where.size == 0:
        return flags
    xv = x[where]
    zero = _np_values(xv, E1, E2, c1, c2, table, q) == 0
    bits = (zero * (1 << np.arange(E1.shape[0]))).sum(axis=1)
    hit = bits > 0
    if not hit.any():
        return flags
    xv, zero, bits, where = xv[hit], zero[hit], bits[hit], where[hit]
    J = _np_jacobian(xv, E1, E2, c1, c2, table, q) * zero[:, :, None]
    flags[where] = batched_rank_mod(J, q) < rank_table[bits]
    return flags


# --- public entry points -------------------------------------------------------

def _prep(E1, E2, c1, c2, inv):
    return (
        np.ascontiguousarray(E1, np.int64).reshape(len(c1), -1),
        np.ascontiguousarray(E2, np.int64).reshape(len(c1), -1),
        np.asarray(c1, np.int64),
        np.asarray(c2, np.int64),
        np.asarray(inv, np.bool_),
    )


def _blocks(total):
    return [(s, min(total, s + BLOCK)) for s in range(0, total, BLOCK)]


def _run(fn, blocks):
    threads = min(thread_count(), len(blocks)) or 1
    if threads == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, blocks))


def zero_masks(E1, E2, c1, c2, q, inv, backend=None):
    """Enumerate every admissible point; return ``(indices, mask)`` where
    ``mask[p, j]`` says whether polynomial ``j`` vanishes at point ``indices[p]``."""
    E1, E2, c1, c2, inv = _prep(E1, E2, c1, c2, inv)
    total = q ** inv.size
    backend = _resolve(backend)

    def block(se):
        s, e = se
        if backend == "numba":
            valid = np.zeros(e - s, np.bool_)
            mask = np.zeros((e - s, E1.shape[0]), np.bool_)
            _nb_masks(s, e, q, inv, E1, E2, c1, c2, valid, mask)
        else:
            valid, mask = _np_masks(s, e, q, inv, E1, E2, c1, c2)
        return np.flatnonzero(valid) + s, mask[valid]

    parts = _run(block, _blocks(total))
    if not parts:
        return np.zeros(0, np.int64), np.zeros((0, E1.shape[0]), bool)
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def jacobian_violations(E1, E2, c1, c2, q, inv, rank_table, backend=None):
    """Indices of admissible points where the vanishing polynomials have
    Jacobian rank mod ``q`` below ``rank_table[bitmask of vanishing set]``."""
    E1, E2, c1, c2, inv = _prep(E1, E2, c1, c2, inv)
    rank_table = np.asarray(rank_table, np.int64)
    total = q ** inv.size
    backend = _resolve(backend)

    def block(se):
        s, e = se
        if backend == "numba":
            flags = np.zeros(e - s, np.bool_)
            _nb_violations(s, e, q, inv, E1, E2, c1, c2, rank_table, flags)
        else:
            flags = _np_violations(s, e, q, inv, E1, E2, c1, c2, rank_table)
        return np.flatnonzero(flags) + s

    parts = _run(block, _blocks(total))
    return np.concatenate(parts) if parts else np.zeros(0, np.int64)


def violations_at(points, E1, E2, c1, c2, q, rank_table, backend=None):
    """Like ``jacobian_violations`` but on an explicit ``(P, n)`` point array;
    returns row indices of violating points."""
    X = np.ascontiguousarray(points, np.int64)
    E1, E2, c1, c2, _ = _prep(E1, E2, c1, c2, np.zeros(X.shape[1], bool))
    rank_table = np.asarray(rank_table, np.int64)
    backend = _resolve(backend)

    def block(se):
        s, e = se
        if backend == "numba":
            flags = np.zeros(e - s, np.bool_)
            _nb_violations_at(X[s:e], q, E1, E2, c1, c2, rank_table, flags)
        else:
            flags = _np_violations_x(X[s:e], np.ones(e - s, bool), q, E1, E2, c1, c2,
                                     rank_table)
        return np.flatnonzero(flags) + s

    parts = _run(block, _blocks(X.shape[0]))
    return np.concatenate(parts) if parts else np.zeros(0, np.int64)


def masks_at(points, E1, E2, c1, c2, q, backend=None):
    """Vanishing mask of every polynomial on an explicit ``(P, n)`` point array."""
    X = np.ascontiguousarray(points, np.int64)
    E1, E2, c1, c2, _ = _prep(E1, E2, c1, c2, np.zeros(X.shape[1], bool))
    backend = _resolve(backend)

    def block(se):
        s, e = se
        if backend == "numba":
            mask = np.zeros((e - s, E1.shape[0]), np.bool_)
            _nb_masks_at(X[s:e], q, E1, E2, c1, c2, mask)
            return mask
        table = _pow_table(q, int(max(E1.max(initial=0), E2.max(initial=0))))
        return _np_values(X[s:e], E1, E2, c1, c2, table, q) == 0

    parts = _run(block, _blocks(X.shape[0]))
    return np.concatenate(parts) if parts else np.zeros((0, E1.shape[0]), bool)


def decode_point(index: int, q: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(index % q)
        index //= q
    return tuple(out)
