"""Model spectra with explicitly known eigenvalues.

A spectrum is a strictly increasing sequence of *levels* ``j = 0, 1, 2, ...``,
each an eigenvalue with a positive multiplicity. Every model provides:

* exact level values (``int``, ``Fraction`` or :class:`~weyl_lab.exact.Monomial`),
* vectorised float values and int64 multiplicities for level ranges,
* the cumulative multiplicity of the first ``K`` levels in closed form,
* a float estimate of the number of levels below a threshold, which callers
  correct with exact comparisons,
* :meth:`ModelSpectrum.stream`, an independent enumeration of the raw
  eigenvalue formula (with equal values aggregated) used as an oracle.

Transforms ``lambda -> c * lambda**s`` wrap a base spectrum without flattening,
so nested transforms keep their exact structure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count as _naturals
from typing import Iterator

import numpy as np

from .errors import DomainError
from .exact import Monomial, as_fraction, compare, simplify

__all__ = [
    "Calculus",
    "ModelSpectrum",
    "A1Spectrum",
    "SphereSpectrum",
    "OscillatorSpectrum",
    "SpectrumTransform",
    "TransformedSpectrum",
    "TensorOperator",
    "SummandForm",
    "a1_spectrum",
    "a2_spectrum",
    "hermite_spectrum",
    "sphere_laplacian_shifted",
    "harmonic_oscillator",
    "transform",
]


class Calculus(enum.Enum):
    CLOSED_MANIFOLD = "ClosedManifold"
    SHUBIN = "Shubin"


@dataclass(frozen=True)
class SummandForm:
    """Level ``j >= start`` contributes ``P(y) * g(y)**(-c)`` with ``y = j + offset``.

    ``g(y) = y**2 + delta`` when ``quadratic`` else ``g(y) = y``. ``poly`` holds
    the coefficients of ``P`` in increasing degree.
    """

    start: int
    offset: Fraction
    quadratic: bool
    delta: Fraction
    poly: tuple[Fraction, ...]


def _comb(n: int, k: int) -> int:
    return math.comb(n, k) if n >= 0 else 0


def _comb_array(n: np.ndarray, k: int) -> np.ndarray:
    """Binomial coefficients ``C(n, k)`` for an int64 array, 0 where ``n < k``."""
    n = np.asarray(n, dtype=np.int64)
    bound = float(np.max(n, initial=0)) ** k
    if bound >= 2.0**62:
        return np.array([_comb(int(v), k) for v in n.ravel()], dtype=object).reshape(n.shape)
    out = np.ones(n.shape, dtype=np.int64)
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return np.where(n < 0, 0, out)


def _interpolate(ys: list[Fraction], vals: list[int]) -> tuple[Fraction, ...]:
    """Exact coefficients of the polynomial through ``(ys[i], vals[i])``."""
    size = len(ys)
    coeffs = [Fraction(0)] * size
    for i, (yi, vi) in enumerate(zip(ys, vals)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, yj in enumerate(ys):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= yj * basis[t + 1]
            denom *= yi - yj
        for t, b in enumerate(basis):
            coeffs[t] += vi * b / denom
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class ModelSpectrum:
    """Interface shared by every model; subclasses are frozen dataclasses."""

    kind: str
    dimension: int
    order: Fraction
    calculus: Calculus

    # -- metadata ---------------------------------------------------------
    @property
    def zeta_abscissa(self) -> Fraction:
        n = self.dimension if self.calculus is Calculus.CLOSED_MANIFOLD else 2 * self.dimension
        return Fraction(n) / self.order

    @property
    def leading_weyl_coefficient(self) -> float:
        raise NotImplementedError

    @property
    def integral_values(self) -> bool:
        """True when every eigenvalue is an integer (float products are then exact)."""
        raise NotImplementedError

    @property
    def min_value(self):
        return self.level_value(0)

    # -- levels -------------------------------------------------------------
    def level_value(self, j: int):
        raise NotImplementedError

    def level_mult(self, j: int) -> int:
        raise NotImplementedError

    def values_at(self, j: np.ndarray) -> np.ndarray:
        """Float eigenvalues of the levels in the int64 index array ``j``."""
        raise NotImplementedError

    def mults_at(self, j: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def level_values(self, j0: int, j1: int) -> np.ndarray:
        return self.values_at(np.arange(j0, j1, dtype=np.int64))

    def level_mults(self, j0: int, j1: int) -> np.ndarray:
        return self.mults_at(np.arange(j0, j1, dtype=np.int64))

    def cum_mult(self, K: int) -> int:
        """Total multiplicity of levels ``0 .. K-1``."""
        raise NotImplementedError

    def cum_mult_array(self, K: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def level_index_float(self, t: np.ndarray) -> np.ndarray:
        """Real ``x`` with value(x) = t on the monotone interpolant (nan-free)."""
        raise NotImplementedError

    def levels_below_estimate(self, t) -> np.ndarray:
        """Approximate number of levels with value < t (may be off by one)."""
        x = self.level_index_float(np.asarray(t, dtype=np.float64))
        with np.errstate(invalid="ignore"):
            k = np.ceil(np.clip(x, 0.0, 2.0**62))
        return k.astype(np.int64)

    def levels_below(self, threshold) -> int:
        """Exact number of levels whose value is strictly below ``threshold``."""
        if not isinstance(threshold, Monomial):
            threshold = as_fraction(threshold)
        with np.errstate(over="ignore", invalid="ignore"):
            x = float(self.level_index_float(np.asarray(float(threshold), dtype=np.float64)))
        k = max(0, math.ceil(x)) if math.isfinite(x) else 0

        def below(j):
            return compare(self.level_value(j), threshold) < 0

        # gallop from the float estimate to a bracket, then bisect; the answer
        # is the first level that is not below the threshold
        step = 1
        if below(k):
            lo, hi = k + 1, k + 1
            while below(hi):
                lo = hi + 1
                step *= 2
                hi = k + step
        else:
            lo, hi = k, k
            while lo > 0 and not below(lo - 1):
                hi = lo - 1
                lo = max(0, k - step)
                step *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if below(mid):
                lo = mid + 1
            else:
                hi = mid
        return lo

    def count(self, tau) -> int:
        return self.cum_mult(self.levels_below(tau))

    # -- oracle ---------------------------------------------------------------
    def raw_stream(self) -> Iterator[tuple[object, int]]:
        """Eigenvalue/multiplicity pairs straight from the defining formula."""
        raise NotImplementedError

    def stream(self) -> Iterator[tuple[object, int]]:
        """Aggregated ``(eigenvalue, multiplicity)`` pairs in increasing order."""
        pending = None
        for value, mult in self.raw_stream():
            if pending is not None and compare(value, pending[0]) == 0:
                pending = (pending[0], pending[1] + mult)
                continue
            if pending is not None:
                yield pending
            pending = (value, mult)

    def summand_form(self) -> SummandForm | None:
        return None


# ---------------------------------------------------------------------------
# base models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class A1Spectrum(ModelSpectrum):
    """Eigenvalues ``k^2 - k + 1`` with multiplicity ``2k + 1``.

    Levels: ``j^2 + j + 1`` with multiplicity 4 at ``j = 0`` (k = 0 and 1
    coincide) and ``2j + 3`` after, so the first ``K >= 1`` levels hold
    ``(K + 1)^2`` eigenvalues.
    """

    kind: str = field(default="A1", init=False)
    dimension: int = field(default=2, init=False)
    order: Fraction = field(default=Fraction(2), init=False)
    calculus: Calculus = field(default=Calculus.CLOSED_MANIFOLD, init=False)

    @property
    def leading_weyl_coefficient(self) -> float:
        return 1.0

    @property
    def integral_values(self) -> bool:
        return True

    def level_value(self, j):
        return j * j + j + 1

    def level_mult(self, j):
        return 4 if j == 0 else 2 * j + 3

    def values_at(self, j):
        j = np.asarray(j, dtype=np.float64)
        return j * j + j + 1.0

    def mults_at(self, j):
        j = np.asarray(j, dtype=np.int64)
        return np.where(j == 0, 4, 2 * j + 3)

    def cum_mult(self, K):
        return 0 if K <= 0 else (K + 1) ** 2

    def cum_mult_array(self, K):
        K = np.asarray(K, dtype=np.int64)
        return np.where(K <= 0, 0, (K + 1) ** 2)

    def level_index_float(self, t):
        with np.errstate(invalid="ignore"):
            x = (np.sqrt(np.maximum(4.0 * t - 3.0, 0.0)) - 1.0) / 2.0
        return np.where(t <= 1.0, -1.0, x)

    def raw_stream(self):
        for k in _naturals():
            yield k * k - k + 1, 2 * k + 1

    def summand_form(self):
        # j^2 + j + 1 = (j + 1/2)^2 + 3/4 and 2j + 3 = 2y + 2
        return SummandForm(1, Fraction(1, 2), True, Fraction(3, 4), (Fraction(2), Fraction(2)))


@dataclass(frozen=True)
class SphereSpectrum(ModelSpectrum):
    """Shifted Laplacian on the unit sphere ``S^dim``: ``k(k + dim - 1) + shift``.

    Multiplicities are the spherical-harmonic dimensions
    ``C(k+dim, dim) - C(k+dim-2, dim)``. On ``S^1`` the constant mode gets
    ``zero_mode_mult`` (default 2, every other mode has 2); for ``dim > 1``
    the field is normalised to 1.
    """

    dim: int
    shift: Fraction = Fraction(0)
    zero_mode_mult: int = 2
    name: str = "sphere"
    kind: str = field(default="SphereLaplacianShifted", init=False)
    calculus: Calculus = field(default=Calculus.CLOSED_MANIFOLD, init=False)
    order: Fraction = field(default=Fraction(2), init=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"sphere dimension must be a positive integer, got {self.dim!r}")
        shift = as_fraction(self.shift)
        if shift < 0:
            raise DomainError(f"sphere shift must be nonnegative, got {self.shift!r}")
        if self.zero_mode_mult not in (1, 2):
            raise DomainError("zero-mode multiplicity must be 1 or 2")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "shift", shift)
        if self.dim > 1:
            # the switch only concerns the circle; higher spheres have a simple constant mode
            object.__setattr__(self, "zero_mode_mult", 1)
        if self.name == "a2":
            object.__setattr__(self, "kind", "A2")

    @property
    def dimension(self) -> int:
        return self.dim

    @property
    def leading_weyl_coefficient(self) -> float:
        return 2.0 / math.factorial(self.dim)

    @property
    def integral_values(self) -> bool:
        return self.shift.denominator == 1

    def _mult(self, k: int) -> int:
        if self.dim == 1:
            return self.zero_mode_mult if k == 0 else 2
        return _comb(k + self.dim, self.dim) - _comb(k + self.dim - 2, self.dim)

    def level_value(self, j):
        v = j * (j + self.dim - 1) + self.shift
        return v.numerator if v.denominator == 1 else v

    def level_mult(self, j):
        return self._mult(j)

    def values_at(self, j):
        j = np.asarray(j, dtype=np.float64)
        return j * (j + (self.dim - 1)) + float(self.shift)

    def mults_at(self, j):
        j = np.asarray(j, dtype=np.int64)
        if self.dim == 1:
            return np.where(j == 0, self.zero_mode_mult, 2).astype(np.int64)
        d = self.dim
        return (_comb_array(j + d, d) - _comb_array(j + d - 2, d)).astype(np.int64)

    def cum_mult(self, K):
        if K <= 0:
            return 0
        d = self.dim
        total = _comb(K - 1 + d, d) + _comb(K - 2 + d, d)
        if d == 1:
            total += self.zero_mode_mult - 1
        return total

    def cum_mult_array(self, K):
        K = np.asarray(K, dtype=np.int64)
        d = self.dim
        total = _comb_array(K - 1 + d, d) + _comb_array(K - 2 + d, d)
        if d == 1:
            total = total + (self.zero_mode_mult - 1)
        return np.where(K <= 0, 0, total)

    def level_index_float(self, t):
        b = float(self.dim - 1)
        disc = b * b - 4.0 * (float(self.shift) - t)
        with np.errstate(invalid="ignore"):
            x = (np.sqrt(np.maximum(disc, 0.0)) - b) / 2.0
        return np.where(t <= float(self.shift), -1.0, x)

    def raw_stream(self):
        for k in _naturals():
            yield self.level_value(k), self._mult(k)

    def summand_form(self):
        d = self.dim
        offset = Fraction(d - 1, 2)
        delta = self.shift - offset * offset
        # multiplicity is a polynomial of degree d-1 in k for k >= 1
        ks = list(range(1, d + 1))
        poly = _interpolate([k + offset for k in ks], [self._mult(k) for k in ks])
        return SummandForm(1, offset, True, delta, poly)


@dataclass(frozen=True)
class OscillatorSpectrum(ModelSpectrum):
    """Isotropic harmonic oscillator in ``dim`` variables (sum of 1D Hermite operators).

    Eigenvalues are ``n_1 + ... + n_dim`` with ``n_i >= 1``: level ``k`` has value
    ``k + dim`` and multiplicity ``C(k + dim - 1, dim - 1)``.
    """

    dim: int
    name: str = "ho"
    kind: str = field(default="HarmonicOscillator", init=False)
    calculus: Calculus = field(default=Calculus.SHUBIN, init=False)
    order: Fraction = field(default=Fraction(2), init=False)

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"oscillator dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.name == "hermite":
            object.__setattr__(self, "kind", "Hermite1D")

    @property
    def dimension(self) -> int:
        return self.dim

    @property
    def leading_weyl_coefficient(self) -> float:
        return 1.0 / math.factorial(self.dim)

    @property
    def integral_values(self) -> bool:
        return True

    def level_value(self, j):
        return j + self.dim

    def level_mult(self, j):
        return _comb(j + self.dim - 1, self.dim - 1)

    def values_at(self, j):
        return np.asarray(j, dtype=np.float64) + self.dim

    def mults_at(self, j):
        j = np.asarray(j, dtype=np.int64)
        return np.asarray(_comb_array(j + self.dim - 1, self.dim - 1), dtype=np.int64)

    def cum_mult(self, K):
        return 0 if K <= 0 else _comb(K + self.dim - 1, self.dim)

    def cum_mult_array(self, K):
        K = np.asarray(K, dtype=np.int64)
        return np.where(K <= 0, 0, _comb_array(K + self.dim - 1, self.dim))

    def level_index_float(self, t):
        return t - self.dim

    def raw_stream(self):
        # compositions counted by dynamic programming, independent of the binomial closed form
        limit = 64
        ways = _ways_upto(self.dim, limit)
        for total in _naturals(self.dim):
            if total > limit:
                limit *= 2
                ways = _ways_upto(self.dim, limit)
            yield total, ways[total]

    def summand_form(self):
        d = self.dim
        ys = [Fraction(d + k) for k in range(d)]
        poly = _interpolate(ys, [self.level_mult(k) for k in range(d)])
        return SummandForm(0, Fraction(d), False, Fraction(0), poly)


def _ways_upto(dim: int, limit: int) -> list[int]:
    """Number of ways to write each total <= limit as an ordered sum of dim positive parts."""
    ways = [1] + [0] * limit
    for _ in range(dim):
        nxt = [0] * (limit + 1)
        run = 0
        for t in range(limit + 1):
            # nxt[t] = sum_{part >= 1} ways[t - part]
            nxt[t] = run
            run += ways[t]
        ways = nxt
    return ways


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumTransform:
    """The map ``lambda -> scale * lambda**power``."""

    power: Fraction = Fraction(1)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        s, c = as_fraction(self.power), as_fraction(self.scale)
        if s <= 0:
            raise DomainError(f"transform power must be positive, got {self.power!r}")
        if c <= 0:
            raise DomainError(f"transform scale must be positive, got {self.scale!r}")
        object.__setattr__(self, "power", s)
        object.__setattr__(self, "scale", c)


@dataclass(frozen=True)
class TransformedSpectrum(ModelSpectrum):
    base: ModelSpectrum
    transform: SpectrumTransform
    kind: str = field(default="Transformed", init=False)

    def __post_init__(self):
        if compare(self.base.min_value, 0) <= 0:
            raise DomainError("cannot transform a spectrum with a zero eigenvalue")

    @property
    def s(self) -> Fraction:
        return self.transform.power

    @property
    def c(self) -> Fraction:
        return self.transform.scale

    @property
    def dimension(self) -> int:
        return self.base.dimension

    @property
    def calculus(self) -> Calculus:
        return self.base.calculus

    @property
    def order(self) -> Fraction:
        return self.base.order * self.s

    @property
    def leading_weyl_coefficient(self) -> float:
        return self.base.leading_weyl_coefficient * float(self.c) ** (-float(self.zeta_abscissa))

    @property
    def integral_values(self) -> bool:
        return self.base.integral_values and self.s.denominator == 1 and self.c.denominator == 1

    def _map(self, value):
        m = Monomial.of(value, self.s)
        if self.c != 1:
            m = m * Monomial.of(self.c)
        return simplify(m)

    def _unmap(self, threshold):
        """Threshold on the base spectrum equivalent to ``threshold`` here."""
        if isinstance(threshold, Monomial):
            m = threshold
        else:
            m = Monomial.of(threshold)
        if self.c != 1:
            m = m * Monomial.of(self.c, -1)
        if self.s != 1:
            m = m ** (1 / self.s)
        return simplify(m)

    def level_value(self, j):
        return self._map(self.base.level_value(j))

    def level_mult(self, j):
        return self.base.level_mult(j)

    def values_at(self, j):
        v = self.base.values_at(j)
        if self.s != 1:
            v = v ** float(self.s)
        return v * float(self.c) if self.c != 1 else v

    def mults_at(self, j):
        return self.base.mults_at(j)

    def cum_mult(self, K):
        return self.base.cum_mult(K)

    def cum_mult_array(self, K):
        return self.base.cum_mult_array(K)

    def level_index_float(self, t):
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            u = (t / float(self.c)) ** (1.0 / float(self.s))
        return self.base.level_index_float(u)

    def levels_below(self, threshold):
        if not isinstance(threshold, Monomial):
            threshold = as_fraction(threshold)
            if threshold <= 0:
                return 0
        return self.base.levels_below(self._unmap(threshold))

    def raw_stream(self):
        for value, mult in self.base.stream():
            yield self._map(value), mult

    def stream(self):
        # the map is strictly increasing, so aggregation is inherited
        return self.raw_stream()


def transform(base: ModelSpectrum, t: SpectrumTransform) -> ModelSpectrum:
    if t.power == 1 and t.scale == 1:
        return base
    return TransformedSpectrum(base, t)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def a1_spectrum() -> A1Spectrum:
    return A1Spectrum()


def a2_spectrum(zero_mode_mult: int = 2) -> SphereSpectrum:
    """``-Laplacian + 1`` on the circle: ``n^2 + 1`` with multiplicity 2."""
    return SphereSpectrum(1, Fraction(1), zero_mode_mult, name="a2")


def hermite_spectrum() -> OscillatorSpectrum:
    """One-dimensional harmonic oscillator shifted to the spectrum ``1, 2, 3, ...``."""
    return OscillatorSpectrum(1, name="hermite")


def sphere_laplacian_shifted(dim: int, shift=0, zero_mode_mult: int = 2) -> SphereSpectrum:
    return SphereSpectrum(dim, as_fraction(shift), zero_mode_mult)


def harmonic_oscillator(dim: int) -> OscillatorSpectrum:
    return OscillatorSpectrum(dim)


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TensorOperator:
    """Ordered tensor product of model spectra."""

    factors: tuple[ModelSpectrum, ...]

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise DomainError("a tensor operator needs at least one factor")
        for f in factors:
            if compare(f.min_value, 1) < 0:
                raise DomainError(f"factor {f!r} has an eigenvalue below 1")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: ModelSpectrum) -> "TensorOperator":
        return cls(tuple(factors))

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, i):
        return self.factors[i]

    @property
    def integral_values(self) -> bool:
        return all(f.integral_values for f in self.factors)
