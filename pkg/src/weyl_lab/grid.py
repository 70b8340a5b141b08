"""Sample grids over tau and ordered parallel evaluation."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .spectra import ModelSpectrum, TensorOperator

__all__ = ["GridSpec", "parse_grid", "eigenvalue_breakpoints", "map_ordered", "thread_count"]

T = TypeVar("T")
R = TypeVar("R")

GRID_KINDS = ("geometric", "linear", "breakpoints")


@dataclass(frozen=True)
class GridSpec:
    kind: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.kind not in GRID_KINDS:
            raise ValueError(f"grid kind must be one of {', '.join(GRID_KINDS)}, got {self.kind!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or not self.start < self.stop:
            raise ValueError(f"grid needs start < stop, got {self.start}..{self.stop}")
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        if self.kind == "geometric" and self.start <= 0:
            raise ValueError("geometric grids need a positive start")

    def values(self, op: TensorOperator | None = None) -> list[float]:
        if self.kind == "geometric":
            return np.geomspace(self.start, self.stop, self.points).tolist()
        if self.kind == "linear":
            return np.linspace(self.start, self.stop, self.points).tolist()
        if op is None:
            raise ValueError("a breakpoint grid needs an operator")
        out = []
        for b in eigenvalue_breakpoints(op, self.start, self.stop, self.points):
            out.append(math.nextafter(b, -math.inf))
            out.append(math.nextafter(b, math.inf))
        return out


def parse_grid(text: str) -> GridSpec:
    """``KIND:START:STOP:POINTS``, e.g. ``geometric:1e2:1e6:40``."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(f"grid must look like KIND:START:STOP:POINTS, got {text!r}")
    kind, start, stop, points = parts
    try:
        return GridSpec(kind.strip(), float(start), float(stop), int(points))
    except ValueError as exc:
        raise ValueError(f"bad grid {text!r}: {exc}") from None


def eigenvalue_breakpoints(op, start: float, stop: float, limit: int | None = None) -> list[float]:
    """Distinct eigenvalues of ``op`` in ``[start, stop]`` (in float), thinned evenly to ``limit``."""
    from .counting import _expand, _outer_levels, inner_factor_index

    if isinstance(op, ModelSpectrum):
        op = TensorOperator((op,))
    i_in = inner_factor_index(op)
    inner = op[i_in]
    outer = [f for i, f in enumerate(op.factors) if i != i_in]
    hi = stop * (1.0 + 1e-9)
    chunks = []
    if not outer:
        P_all = [np.ones(1)]
    else:
        inner_min = float(inner.min_value)
        levels = _outer_levels(outer, hi / inner_min)
        suffix = np.ones(len(outer) + 1)
        for d in range(len(outer) - 1, -1, -1):
            suffix[d] = suffix[d + 1] * levels[d][0][0]
        suffix *= inner_min
        P_all = [P for P, _, _ in _expand(levels, 0, np.ones(1), np.ones(1, dtype=np.int64),
                                         np.zeros((1, 0), dtype=np.int64), hi, suffix)]
    for P in P_all:
        k0 = np.maximum(inner.levels_below_estimate(start / P) - 1, 0)
        k1 = inner.levels_below_estimate(hi / P) + 1
        n = np.maximum(k1 - k0, 0)
        if n.sum() == 0:
            continue
        parent = np.repeat(np.arange(P.size), n)
        offs = np.arange(parent.size) - np.repeat(np.cumsum(n) - n, n)
        vals = P[parent] * inner.values_at(k0[parent] + offs)
        chunks.append(vals[(vals >= start) & (vals <= stop)])
    if not chunks:
        return []
    vals = np.unique(np.concatenate(chunks))
    if limit is not None and vals.size > limit:
        vals = vals[np.unique(np.linspace(0, vals.size - 1, limit).round().astype(np.int64))]
    return vals.tolist()


def thread_count(requested: int | None = None) -> int:
    """Worker count: explicit request, else ``WEYL_LAB_THREADS``, else the CPU count."""
    if requested is None:
        env = os.environ.get("WEYL_LAB_THREADS", "").strip()
        requested = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(requested))


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, evaluated on a thread pool, results in input order."""
    items = list(items)
    n = min(thread_count(threads), len(items)) if items else 1
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
