"""Exact counting functions and partial zeta sums.

``N(tau)`` counts eigenvalues strictly below ``tau`` with multiplicity. For a
tensor product the eigenvalues are all products ``lambda_1 * ... * lambda_r``
and multiplicities multiply, so

    N(tau) = sum over outer level tuples with product P of N_inner(tau / P).

The inner factor (largest zeta abscissa, so the densest spectrum) is counted
in closed form; outer tuples are enumerated in vectorised chunks. Float
comparisons are exact when every eigenvalue is an integer and ``tau < 2**50``;
otherwise a relative guard band flags near-ties, and those are decided in
exact rational arithmetic.
"""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, CountOverflowError, DomainError
from .exact import Monomial, as_fraction, compare, floor_below, simplify
from .spectra import ModelSpectrum, TensorOperator

__all__ = [
    "CountingSample",
    "PartialZetaSample",
    "DEFAULT_BUDGET",
    "RECURSIVE_BUDGET",
    "RELATIVE_GUARD",
    "count_single",
    "count_a1_closed",
    "count_tensor_recursive",
    "count_tensor_bruteforce",
    "count",
    "partial_zeta",
    "product_partial_zeta",
    "inner_factor_index",
]

DEFAULT_BUDGET = 10**8
# outer tuples for the recursion; level arrays of this length still fit in memory
RECURSIVE_BUDGET = 2 * 10**8
RELATIVE_GUARD = 1e-12
_EXACT_FLOAT_LIMIT = 2**50
_INDEX_FLOAT_LIMIT = 2**50
_CHUNK = 1 << 20
_TABLE_LIMIT = 1 << 21
_AMBIGUOUS_BUFFER = 4096


@dataclass(frozen=True)
class CountingSample:
    tau: float
    count: int
    leading: float | None = None
    remainder: float | None = None
    normalized_remainder: float | None = None


@dataclass(frozen=True)
class PartialZetaSample:
    tau: float
    c: float
    value: float


def _tau(tau) -> Fraction:
    t = as_fraction(tau)
    if t <= 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    return t


def _operator(op) -> TensorOperator:
    if isinstance(op, TensorOperator):
        return op
    if isinstance(op, ModelSpectrum):
        return TensorOperator((op,))
    return TensorOperator(tuple(op))


# ---------------------------------------------------------------------------
# single spectra
# ---------------------------------------------------------------------------


def count_single(spec: ModelSpectrum, tau) -> int:
    """Number of eigenvalues ``< tau`` counted with multiplicity."""
    return spec.count(_tau(tau))


def count_a1_closed(tau) -> int:
    """``(kbar + 1)**2`` where ``kbar**2 - kbar + 1 < tau <= kbar**2 + kbar + 1``.

    ``k**2 - k + 1 < tau`` is ``(2k - 1)**2 < 4 tau - 3``, solved with an
    integer square root on the exact rational ``tau``.
    """
    t = as_fraction(tau)
    if t <= 1:
        raise DomainError("the closed form needs tau > 1; below that the count is 0")
    p, q = t.numerator, t.denominator
    # largest odd m with m^2 * q < 4p - 3q
    m = math.isqrt((4 * p - 3 * q - 1) // q)
    kbar = (m + 1) // 2
    return (kbar + 1) ** 2


# ---------------------------------------------------------------------------
# tensor products: recursion
# ---------------------------------------------------------------------------


def inner_factor_index(op: TensorOperator) -> int:
    """Index of the factor with the largest zeta abscissa (the last one on ties)."""
    best = 0
    for i, f in enumerate(op.factors):
        if f.zeta_abscissa >= op.factors[best].zeta_abscissa:
            best = i
    return best


def _exact_mode(op: TensorOperator, t: Fraction) -> tuple[float, float]:
    """``(float threshold, relative guard)`` for float comparisons ``product < tau``."""
    if op.integral_values and t < _EXACT_FLOAT_LIMIT:
        # integer n < tau  <=>  n < floor_below(tau) + 1, which is exact in float
        return float(floor_below(t) + 1), 0.0
    return float(t), RELATIVE_GUARD


def _outer_levels(outer: Sequence[ModelSpectrum], limit: float, budget: int | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Level values and multiplicities of each outer factor that can appear below ``limit``."""
    mins = [float(f.min_value) for f in outer]
    out = []
    for i, f in enumerate(outer):
        others = math.prod(mins[:i] + mins[i + 1 :])
        n = int(f.levels_below_estimate(limit / others)) + 2
        if budget is not None and n > budget:
            raise BudgetExceeded(f"{n} levels of an outer factor exceed the budget of {budget}")
        out.append((f.level_values(0, n), f.level_mults(0, n)))
    return out


def _expand(levels, d, P, M, idx, hi, suffix) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Yield chunks of outer tuples ``(product, multiplicity, level indices)`` with product*suffix < hi.

    The set is a superset (limit taken with a margin); callers rely on an exact
    inner count, which is zero for tuples that overshoot.
    """
    if d == len(levels):
        yield P, M, idx
        return
    v, m = levels[d]
    n = np.searchsorted(v, hi / (P * suffix[d + 1]), side="right")
    keep = n > 0
    P, M, idx, n = P[keep], M[keep], idx[keep], n[keep]
    csum = np.cumsum(n)
    start = 0
    while start < P.size:
        base = int(csum[start - 1]) if start else 0
        stop = int(np.searchsorted(csum, base + _CHUNK, side="right"))
        if stop <= start:
            # one parent with more children than a chunk holds
            for lo in range(0, int(n[start]), _CHUNK):
                k = np.arange(lo, min(lo + _CHUNK, int(n[start])), dtype=np.int64)
                rows = np.repeat(idx[start : start + 1], k.size, axis=0)
                yield from _expand(
                    levels, d + 1, P[start] * v[k], M[start] * m[k],
                    np.column_stack([rows, k]), hi, suffix,
                )
            start += 1
            continue
        nn = n[start:stop]
        parent = np.repeat(np.arange(start, stop), nn)
        offs = np.arange(parent.size, dtype=np.int64) - np.repeat(np.cumsum(nn) - nn, nn)
        yield from _expand(
            levels, d + 1, P[parent] * v[offs], M[parent] * m[offs],
            np.column_stack([idx[parent], offs]), hi, suffix,
        )
        start = stop


def _exact_product(factors: Sequence[ModelSpectrum], row) -> object:
    prod = Monomial(())
    for f, j in zip(factors, row):
        val = f.level_value(int(j))
        prod = prod * (val if isinstance(val, Monomial) else Monomial.of(val))
    return simplify(prod)


def _exact_quotient(t: Fraction, prod) -> object:
    if isinstance(prod, Monomial):
        return simplify(Monomial.of(t) * prod ** -1)
    return t / as_fraction(prod)


def _inner_levels(inner, outer, P, idx, t: Fraction, thresh: float, guard: float) -> np.ndarray:
    """Exact number of inner levels below ``tau / P`` for every outer tuple."""
    lo_t = thresh * (1.0 - guard)
    hi_t = thresh * (1.0 + guard)
    with np.errstate(divide="ignore", over="ignore"):
        K = inner.levels_below_estimate(thresh / P)
    if K.size and K.max() >= _INDEX_FLOAT_LIMIT:
        # level indices past float resolution: resolve every tuple exactly
        exact = [inner.levels_below(_exact_quotient(t, _exact_product(outer, row))) for row in idx]
        return np.array(exact, dtype=object)
    unsure = np.zeros(P.size, dtype=bool)
    for _ in range(64):
        below = P * inner.values_at(K) < lo_t
        above = (K > 0) & (P * inner.values_at(np.maximum(K - 1, 0)) >= hi_t)
        if not (below.any() or above.any()):
            break
        K = K + below - above
    else:
        unsure[:] = True
    if guard:
        upper = P * inner.values_at(K)
        lower = P * inner.values_at(np.maximum(K - 1, 0))
        unsure |= (upper >= lo_t) & (upper < hi_t)
        unsure |= (K > 0) & (lower >= lo_t) & (lower < hi_t)
    for i in np.flatnonzero(unsure):
        K[i] = inner.levels_below(_exact_quotient(t, _exact_product(outer, idx[i])))
    return K


def _recursion(op: TensorOperator, t: Fraction, budget: int | None, weigh):
    """Drive the outer enumeration; ``weigh(M, P, K)`` turns a chunk into a partial result."""
    if budget is None:
        budget = RECURSIVE_BUDGET
    i_in = inner_factor_index(op)
    inner = op[i_in]
    outer = [f for i, f in enumerate(op.factors) if i != i_in]
    thresh, guard = _exact_mode(op, t)
    margin = thresh * (1.0 + 1e-9)
    inner_min = float(inner.min_value)
    levels = _outer_levels(outer, margin / inner_min, budget)
    suffix = np.ones(len(outer) + 1)
    for d in range(len(outer) - 1, -1, -1):
        suffix[d] = suffix[d + 1] * levels[d][0][0]
    suffix *= inner_min
    seen = 0
    big = _multiplicity_bound(levels) >= 2**31
    for P, M, idx in _expand(levels, 0, np.ones(1), np.ones(1, dtype=object if big else np.int64),
                             np.zeros((1, 0), dtype=np.int64), margin, suffix):
        seen += P.size
        if seen > budget:
            raise BudgetExceeded(f"more than {budget} outer tuples")
        K = _inner_levels(inner, outer, P, idx, t, thresh, guard)
        yield weigh(inner, M, P, K)


def _multiplicity_bound(levels) -> float:
    return math.prod(float(np.max(m, initial=1)) for _, m in levels)


def _weigh_count(inner, M, P, K) -> int:
    if K.dtype == object:
        return sum(int(m) * inner.cum_mult(int(k)) for m, k in zip(M.tolist(), K.tolist()))
    C = inner.cum_mult_array(K)
    if M.dtype == object or C.dtype == object:
        return int(sum(int(a) * int(b) for a, b in zip(M, C)))
    shadow = float(np.dot(M.astype(np.float64), C.astype(np.float64)))
    if shadow < 2.0**62:
        return int(np.dot(M, C))
    return int(sum(int(a) * int(b) for a, b in zip(M.tolist(), C.tolist())))


def count_tensor_recursive(op, tau, *, budget: int | None = None) -> int:
    """Exact ``N(tau)`` for a tensor product, by recursion over outer factors."""
    op = _operator(op)
    t = _tau(tau)
    if len(op) == 1:
        return count_single(op[0], t)
    return sum(_recursion(op, t, budget, _weigh_count))


# ---------------------------------------------------------------------------
# tensor products: brute force oracle
# ---------------------------------------------------------------------------


class _StreamCache:
    """Prefixes of oracle streams, shared across calls and safe across threads."""

    def __init__(self, maxsize: int = 64):
        self._lock = threading.Lock()
        self._data: dict = {}
        self._maxsize = maxsize

    def levels(self, spec: ModelSpectrum, limit: float, budget: int) -> tuple[list, list]:
        """Exact values and multiplicities of the stream entries with float value < limit."""
        with self._lock:
            entry = self._data.get(spec)
            if entry is None:
                if len(self._data) >= self._maxsize:
                    self._data.pop(next(iter(self._data)))
                entry = self._data[spec] = ([], [], [], spec.stream())
            values, mults, floats, it = entry
            while not floats or floats[-1] < limit:
                if len(values) > budget:
                    raise BudgetExceeded(f"more than {budget} levels below {limit:g}")
                value, mult = next(it)
                values.append(value)
                mults.append(mult)
                floats.append(float(value))
            n = bisect.bisect_left(floats, limit)
            return values[:n], mults[:n]


_streams = _StreamCache()


def _stream_levels(spec: ModelSpectrum, limit: float, budget: int) -> tuple[list, list]:
    return _streams.levels(spec, limit, budget)


def count_tensor_bruteforce(op, tau, *, budget: int = DEFAULT_BUDGET) -> int:
    """Enumerate every tuple of eigenvalues with product ``< tau``.

    Eigenvalues come from each model's raw formula stream, not from the closed
    forms used by the recursion, so the two methods are independent.
    """
    op = _operator(op)
    t = _tau(tau)
    r = len(op)
    thresh, guard = _exact_mode(op, t)
    margin = thresh * (1.0 + 1e-9)
    exact_vals, mult_lists = [], []
    mins = [float(f.min_value) for f in op]
    for i, f in enumerate(op):
        others = math.prod(mins[:i] + mins[i + 1 :])
        v, m = _stream_levels(f, margin / others, budget)
        exact_vals.append(v)
        mult_lists.append(m)
    width = max(1, max(len(v) for v in exact_vals))
    values = np.full((r, width), np.inf)
    mults = np.zeros((r, width), dtype=np.int64)
    lengths = np.array([len(v) for v in exact_vals], dtype=np.int64)
    if lengths.min() == 0:
        return 0
    for d in range(r):
        values[d, : lengths[d]] = [float(x) for x in exact_vals[d]]
        mults[d, : lengths[d]] = mult_lists[d]
    size = _AMBIGUOUS_BUFFER
    while True:
        amb = np.zeros((size, r), dtype=np.int64)
        total, shadow, visited, n_amb = kernels.tuple_count(values, mults, lengths, thresh, guard, budget, amb)
        if visited < 0:
            raise BudgetExceeded(f"more than {budget} tuples enumerated")
        if n_amb <= size:
            break
        size = n_amb
    if shadow >= 2.0**62:
        raise CountOverflowError("brute-force count exceeds the int64 range of the enumeration kernel")
    for row in amb[:n_amb]:
        prod = Monomial(())
        m = 1
        for d, j in enumerate(row):
            val = exact_vals[d][int(j)]
            prod = prod * (val if isinstance(val, Monomial) else Monomial.of(val))
            m *= mult_lists[d][int(j)]
        if compare(simplify(prod), t) < 0:
            total += m
    return int(total)


def count(op, tau, method: str = "recursive", *, budget: int | None = None) -> int:
    if method == "recursive":
        return count_tensor_recursive(op, tau, budget=budget)
    if method == "bruteforce":
        return count_tensor_bruteforce(op, tau, budget=DEFAULT_BUDGET if budget is None else budget)
    raise ValueError(f"unknown counting method {method!r}")


# ---------------------------------------------------------------------------
# partial zeta sums
# ---------------------------------------------------------------------------


def partial_zeta(spec: ModelSpectrum, tau, c) -> PartialZetaSample:
    """``F(tau, c)``: compensated sum of ``mult * lambda**(-c)`` over ``lambda < tau``."""
    t = _tau(tau)
    K = spec.levels_below(t)
    c = float(c)
    parts = []
    for lo in range(0, K, _CHUNK):
        hi = min(lo + _CHUNK, K)
        w = spec.level_mults(lo, hi).astype(np.float64) * spec.level_values(lo, hi) ** (-c)
        parts.append(kernels.compensated_sum(w))
    return PartialZetaSample(float(t), c, math.fsum(parts))


class _PrefixSums:
    """``F_inner(K)`` for arbitrary K: a table for small K, power sums beyond it."""

    def __init__(self, spec: ModelSpectrum, c: float, kmax: int):
        self.spec, self.c = spec, c
        n = min(kmax, _TABLE_LIMIT)
        w = spec.level_mults(0, n).astype(np.float64) * spec.level_values(0, n) ** (-c)
        self.table = np.concatenate([[0.0], kernels.compensated_cumsum(w)])
        self._cache: dict[int, float] = {}

    def __call__(self, K: np.ndarray) -> np.ndarray:
        n = self.table.size - 1
        out = self.table[np.minimum(K, n).astype(np.int64)]
        for i in np.flatnonzero(K > n):
            k = int(K[i])
            if k not in self._cache:
                from .zeta import level_power_sum

                self._cache[k] = float(self.table[n]) + level_power_sum(self.spec, n, k, self.c)
            out[i] = self._cache[k]
        return out


def product_partial_zeta(op, tau, c, *, budget: int | None = None) -> PartialZetaSample:
    """Sum over eigenvalue tuples with product ``< tau`` of ``product**(-c)`` times multiplicity."""
    op = _operator(op)
    t = _tau(tau)
    c = float(c)
    if len(op) == 1:
        return partial_zeta(op[0], t, c)
    i_in = inner_factor_index(op)
    inner = op[i_in]
    outer_min = math.prod(float(f.min_value) for i, f in enumerate(op.factors) if i != i_in)
    kmax = int(inner.levels_below_estimate(float(t) / outer_min)) + 2
    prefix = _PrefixSums(inner, c, kmax)

    def weigh(_inner, M, P, K):
        w = M.astype(np.float64) * P ** (-c) * prefix(K)
        return kernels.compensated_sum(w)

    total = math.fsum(_recursion(op, t, budget, weigh))
    return PartialZetaSample(float(t), c, total)
