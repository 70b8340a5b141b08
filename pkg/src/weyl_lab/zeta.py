"""Zeta functions on the real line with explicit truncation bounds.

Everything here rests on the Euler-Maclaurin formula for pure powers

    sum_{n>=0} (y + n)**(-a) = y**(1-a)/(a-1) + y**(-a)/2
                               + sum_{k=1}^{p} B_2k/(2k)! * rising(a, 2k-1) * y**(1-a-2k)
                               + R_p,

    |R_p| <= |B_2p|/(2p)! * |rising(a, 2p-1)| * y**(1-a-2p),

read as the continued (Hurwitz) function when the series diverges. Finite
sums are differences of two such expansions.

Spectral zeta functions of the models are reduced to pure powers through the
summand shape each model reports: ``P(y) * (y**2 + delta)**(-c)`` is expanded
binomially in ``delta / y**2`` and every resulting power is summed with the
formula above. The binomial truncation error is bounded geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DivergenceError, DomainError, PoleError, ToleranceUnreachable
from .exact import as_fraction, compare
from .spectra import ModelSpectrum, SummandForm, TransformedSpectrum

__all__ = [
    "ZetaValue",
    "riemann_zeta",
    "riemann_zeta_minus_one",
    "euler_mascheroni",
    "euler_mascheroni_series",
    "spectral_zeta",
    "level_power_sum",
    "hurwitz_expansion",
]

EM_CUTOFF = 64
EM_ORDER = 8
BINOMIAL_TERMS = 24
DEFAULT_BUDGET = 10**8
_DIRECT_LIMIT = 1 << 16
_CONTINUATION_FLOOR = -10.0


@dataclass(frozen=True)
class ZetaValue:
    value: float
    tail_bound: float
    terms_used: int

    def __float__(self) -> float:
        return self.value


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (B_1 = -1/2 convention, unused here)."""
    if m == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(m):
        acc += math.comb(m + 1, k) * _bernoulli(k)
    return -acc / (m + 1)


@lru_cache(maxsize=None)
def _em_coefficients(order: int) -> tuple[float, ...]:
    """B_2k / (2k)! for k = 1 .. order + 1 (the last one feeds the remainder bound)."""
    return tuple(float(_bernoulli(2 * k) / math.factorial(2 * k)) for k in range(1, order + 2))


def _rising(a: float, n: int) -> float:
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def hurwitz_expansion(a: float, y: float, order: int = EM_ORDER) -> tuple[float, float]:
    """Continued ``sum_{n>=0} (y+n)**(-a)`` and its remainder bound, for ``y > 0``.

    At ``a == 1`` the divergent main term is replaced by ``-log(y)``; only
    differences are meaningful there.
    """
    coeffs = _em_coefficients(order)
    if a == 1.0:
        head = -math.log(y)
    else:
        head = y ** (1.0 - a) / (a - 1.0)
    terms = [head, 0.5 * y ** (-a)]
    for k in range(1, order + 1):
        terms.append(coeffs[k - 1] * _rising(a, 2 * k - 1) * y ** (1.0 - a - 2 * k))
    bound = abs(coeffs[order - 1]) * abs(_rising(a, 2 * order - 1)) * y ** (1.0 - a - 2 * order)
    return math.fsum(terms), bound


# ---------------------------------------------------------------------------
# Riemann zeta and the Euler-Mascheroni constant
# ---------------------------------------------------------------------------


def _zeta_right(s: float, cutoff: int, order: int) -> tuple[float, float]:
    head = math.fsum(n ** (-s) for n in range(1, cutoff))
    tail, bound = hurwitz_expansion(s, float(cutoff), order)
    return head + tail, bound


def riemann_zeta(s, *, cutoff: int = EM_CUTOFF, order: int = EM_ORDER) -> float:
    """Riemann zeta on the real line for ``s > -10``, ``s != 1``.

    Negative arguments go through the functional equation.
    """
    s = float(s)
    if math.isnan(s):
        raise DomainError("zeta argument is nan")
    if s == 1.0:
        raise PoleError("the Riemann zeta function has a pole at s = 1")
    if s <= _CONTINUATION_FLOOR:
        raise DomainError(f"zeta continuation is implemented for s > {_CONTINUATION_FLOOR:g}, got {s}")
    if math.isinf(s):
        return 1.0
    if s < 0.0:
        if s == math.floor(s) and int(s) % 2 == 0:
            return 0.0
        partner, _ = _zeta_right(1.0 - s, cutoff, order)
        return 2.0**s * math.pi ** (s - 1.0) * math.sin(math.pi * s / 2.0) * math.gamma(1.0 - s) * partner
    value, _ = _zeta_right(s, cutoff, order)
    return value


def riemann_zeta_minus_one(s: float, *, cutoff: int = EM_CUTOFF, order: int = EM_ORDER) -> float:
    """``zeta(s) - 1`` without cancellation, for ``s > 1``."""
    if s <= 1:
        raise DomainError("zeta(s) - 1 is only provided for s > 1")
    head = math.fsum(n ** (-float(s)) for n in range(2, cutoff))
    tail, _ = hurwitz_expansion(float(s), float(cutoff), order)
    return head + tail


def euler_mascheroni(*, cutoff: int = EM_CUTOFF, order: int = EM_ORDER) -> float:
    """gamma = H_{n} - log n - 1/(2n) + sum_k B_2k / (2k n^2k), truncated at ``order``."""
    n = cutoff
    terms = [1.0 / k for k in range(1, n + 1)]
    terms.append(-math.log(n))
    terms.append(-0.5 / n)
    for k in range(1, order + 1):
        terms.append(float(_bernoulli(2 * k)) / (2 * k) * float(n) ** (-2 * k))
    return math.fsum(terms)


def euler_mascheroni_series(kmax: int = 80) -> float:
    """gamma = 1 - sum_{k>=2} (zeta(k) - 1)/k; independent of the harmonic route."""
    return 1.0 - math.fsum(riemann_zeta_minus_one(k) / k for k in range(2, kmax + 1))


# ---------------------------------------------------------------------------
# model spectral zeta functions
# ---------------------------------------------------------------------------


def _unwrap(spec: ModelSpectrum, c: float) -> tuple[ModelSpectrum, float, float]:
    """Peel transforms: zeta(c' * X^s, c) = c'^(-c) * zeta(X, s*c)."""
    factor = 1.0
    while isinstance(spec, TransformedSpectrum):
        factor *= float(spec.c) ** (-c)
        c *= float(spec.s)
        spec = spec.base
    return spec, c, factor


def _binomial_coefficients(c: float, n: int) -> list[float]:
    """binom(-c, i) for i = 0 .. n-1."""
    out = [1.0]
    for i in range(1, n):
        out.append(out[-1] * (-c - (i - 1)) / i)
    return out


def _form_powers(form: SummandForm, c: float) -> list[tuple[float, float]]:
    """(coefficient, exponent a) pairs: the summand equals sum coef * y**(-a) (up to truncation)."""
    poly = [float(p) for p in form.poly]
    if not form.quadratic:
        return [(p, c - t) for t, p in enumerate(poly) if p != 0.0]
    delta = float(form.delta)
    out = []
    for i, b in enumerate(_binomial_coefficients(c, BINOMIAL_TERMS)):
        scale = b * delta**i if i else b
        if scale == 0.0:
            break
        for t, p in enumerate(poly):
            if p != 0.0:
                out.append((p * scale, 2.0 * c + 2.0 * i - t))
    return out


def _truncation_ratio(form: SummandForm, c: float, y: float) -> tuple[float, float]:
    """``(q, tail factor)``: binomial terms beyond BINOMIAL_TERMS sum to at most factor * S_abs."""
    if not form.quadratic or form.delta == 0:
        return 0.0, 0.0
    q = abs(float(form.delta)) / (y * y)
    n = BINOMIAL_TERMS
    rho = q * max(1.0, (c + n) / (n + 1))
    if rho >= 1.0:
        return q, math.inf
    lead = abs(_binomial_coefficients(c, n + 1)[n]) * q**n
    return q, lead / (1.0 - rho)


def _form_tail(form: SummandForm, c: float, first_level: int, order: int) -> tuple[float, float]:
    """Sum of the summand over levels ``>= first_level`` and a bound on its error."""
    y = first_level + float(form.offset)
    value_terms = []
    bound = 0.0
    for coef, a in _form_powers(form, c):
        v, b = hurwitz_expansion(a, y, order)
        value_terms.append(coef * v)
        bound += abs(coef) * b
    q, factor = _truncation_ratio(form, c, y)
    if factor:
        s_abs = 0.0
        for t, p in enumerate(form.poly):
            if p:
                v, b = hurwitz_expansion(2.0 * c - t, y, order)
                s_abs += abs(float(p)) * (abs(v) + b)
        bound += factor * s_abs
    return math.fsum(value_terms), bound


def _integral_tail_bound(form: SummandForm, c: float, first_level: int) -> float:
    """Integral-test bound on the tail from ``first_level`` using a decreasing majorant."""
    y = first_level + float(form.offset) - 1.0
    if y <= 0:
        return math.inf
    if form.quadratic:
        delta = float(form.delta)
        q = max(-delta, 0.0) / (y * y)
        if q >= 1.0:
            return math.inf
        widen = (1.0 - q) ** (-c)
        expo = 2.0 * c
    else:
        widen, expo = 1.0, c
    total = 0.0
    for t, p in enumerate(form.poly):
        a = expo - t
        if a <= 1.0:
            return math.inf
        total += abs(float(p)) * y ** (1.0 - a) / (a - 1.0)
    return widen * total


def _direct_sum(spec: ModelSpectrum, j0: int, j1: int, c: float) -> float:
    parts = []
    step = 1 << 20
    for lo in range(j0, j1, step):
        hi = min(lo + step, j1)
        v = spec.level_values(lo, hi)
        m = spec.level_mults(lo, hi).astype(np.float64)
        parts.append(kernels.compensated_sum(m * v ** (-c)))
    return math.fsum(parts)


def _minimal_first_level(form: SummandForm) -> int:
    """Smallest level where the expansions are safely in their asymptotic range."""
    j = max(form.start, EM_CUTOFF - int(form.offset))
    while form.quadratic and abs(float(form.delta)) / (j + float(form.offset)) ** 2 > 0.25:
        j *= 2
    return j


def spectral_zeta(
    spec: ModelSpectrum,
    c,
    tol: float = 1e-8,
    *,
    budget: int = DEFAULT_BUDGET,
    accelerate: bool = True,
    cutoff: int | None = None,
    order: int = EM_ORDER,
) -> ZetaValue:
    """Sum of ``mult * lambda**(-c)`` over the spectrum, with a certified tail bound.

    The value is the partial sum over the first ``terms_used`` levels plus the
    summed tail. With ``accelerate=False`` the tail is not summed and the bound
    comes from the integral test alone. ``cutoff`` fixes the number of levels
    instead of searching for one that meets ``tol``.
    """
    if as_fraction(c) <= spec.zeta_abscissa:
        raise DivergenceError(
            f"spectral zeta diverges for c = {c} <= abscissa {spec.zeta_abscissa}"
        )
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    if compare(spec.min_value, 0) <= 0:
        raise DomainError("spectral zeta needs positive eigenvalues; this spectrum has a zero mode")
    c = float(c)
    base, cb, factor = _unwrap(spec, c)
    form = base.summand_form()
    if form is None:
        raise DomainError(f"no summand shape known for {base!r}")

    def tail(J):
        if accelerate:
            return _form_tail(form, cb, J, order)
        return 0.0, _integral_tail_bound(form, cb, J)

    if cutoff is not None:
        J = max(int(cutoff), form.start)
        t, b = tail(J)
    else:
        J = _minimal_first_level(form) if accelerate else max(form.start, EM_CUTOFF)
        while True:
            t, b = tail(J)
            if factor * b <= tol:
                break
            if 2 * J > budget:
                raise ToleranceUnreachable(
                    f"tail bound {factor * b:.3g} above tolerance {tol:.3g} within a budget of {budget} levels"
                )
            J *= 2
    head = _direct_sum(base, 0, J, cb)
    return ZetaValue(factor * (head + t), factor * b, J)


def level_power_sum(spec: ModelSpectrum, lo: int, hi: int, c: float) -> float:
    """``sum_{lo <= j < hi} mult_j * value_j**(-c)`` for any real ``c``.

    Long ranges are summed with the Euler-Maclaurin expansion of the model's
    summand shape; short ranges directly.
    """
    if hi <= lo:
        return 0.0
    base, cb, factor = _unwrap(spec, float(c))
    form = base.summand_form()
    if form is None or hi - lo <= _DIRECT_LIMIT:
        return factor * _direct_sum(base, lo, hi, cb)
    j0 = max(lo, _minimal_first_level(form))
    if hi - j0 <= _DIRECT_LIMIT:
        return factor * _direct_sum(base, lo, hi, cb)
    head = _direct_sum(base, lo, j0, cb)
    y0 = j0 + float(form.offset)
    y1 = hi + float(form.offset)
    parts = [head]
    for coef, a in _form_powers(form, cb):
        e0, _ = hurwitz_expansion(a, y0)
        e1, _ = hurwitz_expansion(a, y1)
        parts.append(coef * (e0 - e1))
    return factor * math.fsum(parts)
