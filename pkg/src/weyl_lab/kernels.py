"""Hot inner loops.

Each kernel has two implementations with identical results: a plain loop
compiled by numba, and a vectorised numpy version. The public names are bound
at import time. Numba is used when it imports and ``WEYL_LAB_NO_JIT`` is not
set to a true value; otherwise the numpy versions are used. Both sets stay
reachable as :data:`numba_kernels` and :data:`numpy_kernels` for the
equivalence tests and ``benchmarks/bench_kernels.py``.

All integer kernels work in int64. Callers check the int64 range before
calling and take the pure Python route above it.
"""

from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

INT64_SAFE = 2**62


def _jit_disabled() -> bool:
    return os.environ.get("WEYL_LAB_NO_JIT", "").strip().lower() in {"1", "true", "yes", "on"}


# ---------------------------------------------------------------------------
# loop implementations (numba targets)
# ---------------------------------------------------------------------------


def _tuple_count_loop(values, mults, lengths, tau, guard, budget, amb):
    """Depth-first walk over r-tuples of sorted level lists with product < tau.

    Returns ``(count, shadow, visited, n_amb)``. ``shadow`` is the count
    accumulated in float64 (overflow detection). ``visited == -1`` flags an
    exhausted budget. Leaves whose float product lies within the relative
    guard band of ``tau`` are written to ``amb`` instead of being counted.
    """
    r = values.shape[0]
    hi = tau * (1.0 + guard)
    lo = tau * (1.0 - guard)
    suffix = np.ones(r + 1)
    for d in range(r - 1, -1, -1):
        suffix[d] = suffix[d + 1] * values[d, 0]
    prod = np.ones(r + 1)
    mprod = np.ones(r + 1, dtype=np.int64)
    mprod_f = np.ones(r + 1)
    idx = np.zeros(r, dtype=np.int64)
    idx[0] = -1
    count = 0
    shadow = 0.0
    visited = 0
    n_amb = 0
    d = 0
    while d >= 0:
        idx[d] += 1
        i = idx[d]
        if i >= lengths[d]:
            d -= 1
            continue
        p = prod[d] * values[d, i]
        if p * suffix[d + 1] >= hi:
            d -= 1
            continue
        visited += 1
        if visited > budget:
            return count, shadow, -1, n_amb
        m = mprod[d] * mults[d, i]
        mf = mprod_f[d] * mults[d, i]
        if d == r - 1:
            if p < lo:
                count += m
                shadow += mf
            else:
                if n_amb < amb.shape[0]:
                    for j in range(r):
                        amb[n_amb, j] = idx[j]
                n_amb += 1
        else:
            prod[d + 1] = p
            mprod[d + 1] = m
            mprod_f[d + 1] = mf
            d += 1
            idx[d] = -1
    return count, shadow, visited, n_amb


def _hyperbola_loop(T):
    s = np.int64(math.sqrt(T))
    while s * s > T:
        s -= 1
    while (s + 1) * (s + 1) <= T:
        s += 1
    total = np.int64(0)
    for n in range(1, s + 1):
        total += T // n
    return 2 * total - s * s


def _pow_capped(b, e, cap):
    r = np.int64(1)
    for _ in range(e):
        if r > cap // b:
            return cap + 1
        r *= b
    return r


def _iroot_capped(q, k):
    if q < 2 or k == 1:
        return q
    x = np.int64(q ** (1.0 / k))
    if x < 1:
        x = 1
    while x > 1 and _pow_capped(x, k, q) > q:
        x -= 1
    while _pow_capped(x + 1, k, q) <= q:
        x += 1
    return x


def _root_column_loop(T, A, B, jmax):
    total = np.int64(0)
    for j in range(1, jmax + 1):
        jb = _pow_capped(np.int64(j), B, T)
        if jb > T:
            break
        total += _iroot_capped(T // jb, A)
    return total


def _neumaier_loop(x):
    s = 0.0
    c = 0.0
    for i in range(x.size):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def _kahan_cumsum_loop(x):
    out = np.empty_like(x)
    s = 0.0
    c = 0.0
    for i in range(x.size):
        y = x[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

_BLOCK = 256


def _tuple_count_numpy(values, mults, lengths, tau, guard, budget, amb):
    r = values.shape[0]
    hi = tau * (1.0 + guard)
    lo = tau * (1.0 - guard)
    suffix = np.ones(r + 1)
    for d in range(r - 1, -1, -1):
        suffix[d] = suffix[d + 1] * values[d, 0]
    count = 0
    shadow = 0.0
    visited = 0
    n_amb = 0
    first = values[0, : lengths[0]]
    n_first = int(np.searchsorted(first * suffix[1], hi, side="left"))
    for start in range(0, n_first, _BLOCK):
        k0 = np.arange(start, min(start + _BLOCK, n_first), dtype=np.int64)
        P = first[k0]
        M = mults[0, k0].astype(np.int64)
        MF = mults[0, k0].astype(np.float64)
        idx = k0[:, None]
        keep = P * suffix[1] < hi
        P, M, MF, idx = P[keep], M[keep], MF[keep], idx[keep]
        visited += P.size
        for d in range(1, r):
            v = values[d, : lengths[d]]
            n = np.searchsorted(v, hi / (P * suffix[d + 1]), side="right") + 1
            n = np.minimum(n, lengths[d])
            total = int(n.sum())
            if visited + total > budget:
                return count, shadow, -1, n_amb
            parent = np.repeat(np.arange(P.size), n)
            offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(n) - n, n)
            newP = P[parent] * v[offs]
            keep = newP * suffix[d + 1] < hi
            parent, offs = parent[keep], offs[keep]
            P = newP[keep]
            M = M[parent] * mults[d, offs]
            MF = MF[parent] * mults[d, offs]
            idx = np.column_stack([idx[parent], offs])
            visited += P.size
            if visited > budget:
                return count, shadow, -1, n_amb
        below = P < lo
        count += int(M[below].sum())
        shadow += float(MF[below].sum())
        amb_rows = idx[~below]
        take = min(amb_rows.shape[0], max(amb.shape[0] - n_amb, 0))
        if take:
            amb[n_amb : n_amb + take] = amb_rows[:take]
        n_amb += amb_rows.shape[0]
    return count, shadow, visited, n_amb


def _hyperbola_numpy(T):
    T = int(T)
    s = math.isqrt(T)
    n = np.arange(1, s + 1, dtype=np.int64)
    return 2 * int((np.int64(T) // n).sum()) - s * s


def _pow_capped_numpy(b, e, cap):
    b = np.asarray(b, dtype=np.int64)
    cap = np.broadcast_to(np.asarray(cap, dtype=np.int64), b.shape)
    r = np.ones_like(b)
    over = np.zeros(b.shape, dtype=bool)
    with np.errstate(over="ignore"):
        for _ in range(e):
            over |= r > cap // b
            r = np.where(over, 0, r * b)
    return np.where(over, cap + 1, r)


def _root_column_numpy(T, A, B, jmax):
    T = np.int64(T)
    j = np.arange(1, int(jmax) + 1, dtype=np.int64)
    jb = _pow_capped_numpy(j, B, T)
    jb = jb[jb <= T]
    q = T // jb
    if A == 1:
        return int(q.sum())
    x = np.maximum(np.floor(q.astype(np.float64) ** (1.0 / A)).astype(np.int64), 1)
    for _ in range(8):
        down = (x > 1) & (_pow_capped_numpy(x, A, q) > q)
        if not down.any():
            break
        x = x - down
    for _ in range(8):
        up = _pow_capped_numpy(x + 1, A, q) <= q
        if not up.any():
            break
        x = x + up
    x = np.where(q < 1, 0, x)
    return int(x.sum())


def _neumaier_numpy(x):
    return math.fsum(np.asarray(x, dtype=np.float64).tolist())


def _kahan_cumsum_numpy(x):
    return np.cumsum(np.asarray(x, dtype=np.longdouble)).astype(np.float64)


numpy_kernels = SimpleNamespace(
    name="numpy",
    tuple_count=_tuple_count_numpy,
    hyperbola_sum=_hyperbola_numpy,
    root_column_sum=_root_column_numpy,
    compensated_sum=_neumaier_numpy,
    compensated_cumsum=_kahan_cumsum_numpy,
)


def _build_numba():
    jit = numba.njit(cache=True, nogil=True)
    pow_capped = jit(_pow_capped)
    g = dict(_tuple_count_loop.__globals__)
    # helpers resolved by name inside the loops must be the compiled versions
    g["_pow_capped"] = pow_capped
    iroot = jit(_rebind(_iroot_capped, g))
    g["_iroot_capped"] = iroot
    root_col = jit(_rebind(_root_column_loop, g))
    tuple_count = jit(_tuple_count_loop)
    hyper = jit(_hyperbola_loop)
    neumaier = jit(_neumaier_loop)
    cumsum = jit(_kahan_cumsum_loop)

    def tuple_count_call(values, mults, lengths, tau, guard, budget, amb):
        c, s, v, n = tuple_count(values, mults, lengths, float(tau), float(guard), int(budget), amb)
        return int(c), float(s), int(v), int(n)

    return SimpleNamespace(
        name="numba",
        tuple_count=tuple_count_call,
        hyperbola_sum=lambda T: int(hyper(np.int64(T))),
        root_column_sum=lambda T, A, B, jmax: int(root_col(np.int64(T), int(A), int(B), int(jmax))),
        compensated_sum=lambda x: float(neumaier(np.ascontiguousarray(x, dtype=np.float64))),
        compensated_cumsum=lambda x: cumsum(np.ascontiguousarray(x, dtype=np.float64)),
    )


def _rebind(fn, globals_):
    import types

    return types.FunctionType(fn.__code__, globals_, fn.__name__, fn.__defaults__, fn.__closure__)


numba_kernels = _build_numba() if numba is not None else None

JIT_ENABLED = numba_kernels is not None and not _jit_disabled()
active = numba_kernels if JIT_ENABLED else numpy_kernels

tuple_count = active.tuple_count
hyperbola_sum = active.hyperbola_sum
root_column_sum = active.root_column_sum
compensated_sum = active.compensated_sum
compensated_cumsum = active.compensated_cumsum
