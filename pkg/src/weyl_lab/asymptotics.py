"""Weyl leading terms, remainder series and the three-case remainder law.

For a tensor product with a unique factor ``l`` of largest zeta abscissa
``n_l/m_l`` (``2 n_l/m_l`` for Shubin operators), let ``p`` be the largest
abscissa among the other factors and ``s`` the number of factors attaining it.
With the threshold ``t = (n_l - 1)/m_l`` (``(2 n_l - 1)/m_l`` for Shubin):

* ``p < t``: remainder ``O(tau**t)``
* ``p == t``: remainder ``O(tau**t (log tau)**s)``
* ``p > t``: remainder ``O(tau**p (log tau)**(s - 1))``

The leading term is ``L_l * prod_{j != l} zeta(A_j, abscissa_l) * tau**abscissa_l``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

import numpy as np

from .counting import CountingSample, count
from .errors import InsufficientData, MixedCalculusError, SymmetricCaseError
from .exact import as_fraction
from .grid import GridSpec, eigenvalue_breakpoints, map_ordered
from .spectra import (
    Calculus,
    SpectrumTransform,
    TensorOperator,
    a1_spectrum,
    a2_spectrum,
    transform,
)
from .zeta import spectral_zeta

__all__ = [
    "Case",
    "DominanceData",
    "AsymptoticLaw",
    "classify",
    "leading_coefficient",
    "asymptotic_law",
    "remainder_series",
    "fit_exponent",
    "sharpness_operator",
    "sharpness_suite",
    "SharpnessReport",
    "a1_envelope_check",
    "load_thresholds",
    "EXAMPLES",
]


class Case(enum.Enum):
    BELOW = "Below"
    AT = "At"
    ABOVE = "Above"


@dataclass(frozen=True)
class DominanceData:
    l: int
    p: Fraction | None
    S: tuple[int, ...]
    s: int


@dataclass(frozen=True)
class AsymptoticLaw:
    leading_coeff: float | None
    leading_exp: Fraction
    case: Case
    remainder_exp: Fraction
    remainder_log_power: int

    def leading(self, tau: float) -> float:
        return self.leading_coeff * tau ** float(self.leading_exp)

    def scale(self, tau: float) -> float:
        """``tau**remainder_exp * (log tau)**remainder_log_power``."""
        out = tau ** float(self.remainder_exp)
        if self.remainder_log_power:
            out *= math.log(tau) ** self.remainder_log_power
        return out


def _operator(op) -> TensorOperator:
    return op if isinstance(op, TensorOperator) else TensorOperator(tuple(op))


def classify(op) -> tuple[DominanceData, AsymptoticLaw]:
    """Dominance data and remainder law; ``leading_coeff`` is left as ``None``."""
    op = _operator(op)
    calculi = {f.calculus for f in op}
    if len(calculi) > 1:
        raise MixedCalculusError("products mixing closed-manifold and Shubin factors are not covered")
    absc = [f.zeta_abscissa for f in op]
    top = max(absc)
    leaders = [i for i, a in enumerate(absc) if a == top]
    if len(leaders) > 1:
        raise SymmetricCaseError(
            f"factors {leaders} share the largest abscissa {top}; the remainder law needs a unique maximum"
        )
    l = leaders[0]
    dom = op[l]
    n = dom.dimension if dom.calculus is Calculus.CLOSED_MANIFOLD else 2 * dom.dimension
    t = Fraction(n - 1) / dom.order
    if len(op) == 1:
        return DominanceData(l, None, (), 0), AsymptoticLaw(None, top, Case.BELOW, t, 0)
    p = max(a for i, a in enumerate(absc) if i != l)
    S = tuple(i for i, a in enumerate(absc) if i != l and a == p)
    s = len(S)
    if p < t:
        law = AsymptoticLaw(None, top, Case.BELOW, t, 0)
    elif p == t:
        law = AsymptoticLaw(None, top, Case.AT, t, s)
    else:
        law = AsymptoticLaw(None, top, Case.ABOVE, p, s - 1)
    return DominanceData(l, p, S, s), law


def leading_coefficient(op, tol: float = 1e-8) -> float:
    """``L_l * prod_{j != l} zeta(A_j, abscissa_l)`` with every zeta value within ``tol``."""
    op = _operator(op)
    dom, law = classify(op)
    coeff = op[dom.l].leading_weyl_coefficient
    for i, f in enumerate(op):
        if i != dom.l:
            coeff *= spectral_zeta(f, law.leading_exp, tol).value
    return coeff


def asymptotic_law(op, tol: float = 1e-8) -> AsymptoticLaw:
    _, law = classify(op)
    return AsymptoticLaw(leading_coefficient(op, tol), law.leading_exp, law.case, law.remainder_exp,
                         law.remainder_log_power)


def _sample(op, law: AsymptoticLaw, tau: float, method: str) -> CountingSample:
    n = count(op, tau, method)
    lead = law.leading(tau)
    rem = n - lead
    scale = law.scale(tau) if tau > 0 else 0.0
    norm = rem / scale if scale > 0 else math.nan
    return CountingSample(tau, n, lead, rem, norm)


def remainder_series(
    op,
    grid: Sequence[float],
    *,
    law: AsymptoticLaw | None = None,
    tol: float = 1e-8,
    method: str = "recursive",
    threads: int | None = 1,
) -> list[CountingSample]:
    """Exact counts with leading term, remainder and normalized remainder at each tau."""
    op = _operator(op)
    if law is None:
        law = asymptotic_law(op, tol)
    return map_ordered(lambda t: _sample(op, law, float(t), method), grid, threads)


def fit_exponent(samples: Sequence[CountingSample], tail_fraction: float = 0.5, *, log_power: int = 0) -> tuple[float, float]:
    """Slope of ``log|remainder| - log_power * log log tau`` against ``log tau`` on the tail.

    Returns ``(theta, r_squared)``.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    ordered = sorted(samples, key=lambda s: s.tau)
    tail = ordered[len(ordered) - max(1, int(round(tail_fraction * len(ordered)))):]
    pts = [(s.tau, abs(s.remainder)) for s in tail if s.remainder and s.tau > 1]
    if len(pts) < 10:
        raise InsufficientData(f"need at least 10 tail samples with nonzero remainder, got {len(pts)}")
    x = np.log([t for t, _ in pts])
    y = np.log([r for _, r in pts])
    if log_power:
        y = y - log_power * np.log(x)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    theta = coef[0]
    resid = y - A @ coef
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return float(theta), r2


# ---------------------------------------------------------------------------
# sharpness examples
# ---------------------------------------------------------------------------

EXAMPLES = {
    "B": (Fraction(2), "a1 (x) a2^2"),
    "C": (Fraction(1), "a1 (x) a2"),
    "D": (Fraction(3, 4), "a1 (x) a2^3/4"),
}

# limsup lower bounds of the normalized remainder as tau -> infinity
# (B: 3/2 * zeta(A2^2, 1/2); C: 3/4; D: 2); informational only
_ASYMPTOTIC_LOWER = {
    "B": lambda tol: 1.5 * spectral_zeta(transform(a2_spectrum(), SpectrumTransform(2)), Fraction(1, 2), tol).value,
    "C": lambda tol: 0.75,
    "D": lambda tol: 2.0,
}


def sharpness_operator(example: str, zero_mode_mult: int = 2) -> TensorOperator:
    if example not in EXAMPLES:
        raise ValueError(f"unknown sharpness example {example!r}; choose from {', '.join(EXAMPLES)}")
    power = EXAMPLES[example][0]
    second = a2_spectrum(zero_mode_mult)
    if power != 1:
        second = transform(second, SpectrumTransform(power))
    return TensorOperator((a1_spectrum(), second))


def load_thresholds() -> dict:
    text = resources.files("weyl_lab").joinpath("data/sharpness_thresholds.json").read_text()
    return json.loads(text)


@dataclass
class SharpnessReport:
    example: str
    expression: str
    law: AsymptoticLaw
    samples: list[CountingSample]
    breakpoint_samples: list[CountingSample]
    tail_start: float
    max_normalized: float
    min_normalized: float
    tail_max: float
    tail_windows: list[tuple[float, float]]
    threshold: float | None
    asymptotic_lower_bound: float
    a1_envelope: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = self.tail_max > 0
        if self.threshold is not None:
            ok = ok and self.tail_max >= self.threshold
        if self.a1_envelope:
            ok = ok and self.a1_envelope.get("ok", False)
        return ok

    def summary(self) -> dict:
        return {
            "example": self.example,
            "expression": self.expression,
            "case": self.law.case.value,
            "leading_coeff": self.law.leading_coeff,
            "remainder_exp": str(self.law.remainder_exp),
            "remainder_log_power": self.law.remainder_log_power,
            "max_normalized": self.max_normalized,
            "min_normalized": self.min_normalized,
            "tail_start": self.tail_start,
            "tail_max": self.tail_max,
            "tail_windows": [list(w) for w in self.tail_windows],
            "threshold": self.threshold,
            "asymptotic_lower_bound": self.asymptotic_lower_bound,
            "a1_envelope": self.a1_envelope,
            "passed": self.passed,
        }


def a1_envelope_check(kmax: int | None = None, tau_max: float = 1e6, tau_min: float = 16.0) -> dict:
    """Check ``3 sqrt(tau)/4 <= N(tau) - tau <= 4 sqrt(tau)`` for A1 at both sides of every jump.

    For each ``k`` the two extreme points are one float step above
    ``k^2 - k + 1`` and one step below ``k^2 + k + 1``. The inequalities are
    decided in rational arithmetic by squaring.
    """
    from .counting import count_single

    spec = a1_spectrum()
    failures = []
    checked = 0
    k = 1
    while (k <= kmax) if kmax is not None else (k * k - k + 1 <= tau_max):
        for bp, side in ((k * k - k + 1, math.inf), (k * k + k + 1, -math.inf)):
            tau = math.nextafter(float(bp), side)
            if tau <= tau_min or (kmax is None and tau > tau_max):
                continue
            checked += 1
            if not envelope_holds(count_single(spec, tau), tau):
                failures.append(tau)
        k += 1
    return {"ok": not failures, "checked": checked, "failures": failures[:20]}


def envelope_holds(n: int, tau) -> bool:
    """Exact test of ``3 sqrt(tau)/4 <= n - tau <= 4 sqrt(tau)``."""
    t = as_fraction(tau)
    r = n - t
    if r < 0:
        return False
    return 9 * t <= 16 * r * r and r * r <= 16 * t


def sharpness_suite(
    example: str,
    grid: GridSpec | None = None,
    *,
    tail_fraction: float = 0.25,
    windows: int = 4,
    zero_mode_mult: int = 2,
    tol: float = 1e-8,
    breakpoint_limit: int = 2000,
    threads: int | None = 1,
    check_a1: bool = True,
    method: str = "recursive",
) -> SharpnessReport:
    """Normalized remainders of example B, C or D with tail maxima as limsup proxies.

    The tail is the last ``tail_fraction`` of the grid in log scale. Besides
    the grid, counts are sampled one float step on each side of eigenvalues
    in the tail, where the remainder takes its local extremes.
    """
    from .parser import render

    if grid is None:
        grid = GridSpec("geometric", 1e3, 1e6, 200)
    op = sharpness_operator(example, zero_mode_mult)
    law = asymptotic_law(op, tol)
    taus = grid.values(op)
    samples = remainder_series(op, taus, law=law, method=method, threads=threads)
    lo, hi = math.log(min(taus)), math.log(max(taus))
    tail_start = math.exp(hi - tail_fraction * (hi - lo))
    bps = eigenvalue_breakpoints(op, tail_start, max(taus), breakpoint_limit)
    bp_taus = sorted(x for b in bps for x in (math.nextafter(b, -math.inf), math.nextafter(b, math.inf)))
    bp_samples = remainder_series(op, bp_taus, law=law, method=method, threads=threads)
    norm = [s.normalized_remainder for s in samples]
    tail = [s for s in samples + bp_samples if s.tau >= tail_start]
    edges = np.geomspace(tail_start, max(taus), windows + 1)
    win = []
    for a, b in zip(edges[:-1], edges[1:]):
        vals = [s.normalized_remainder for s in tail if a <= s.tau <= b]
        win.append((float(a), max(vals) if vals else math.nan))
    thresholds = load_thresholds().get("thresholds", {})
    threshold = thresholds.get(example) if zero_mode_mult == 2 else thresholds.get(f"{example}_zero_mode_1")
    return SharpnessReport(
        example=example,
        expression=render(op),
        law=law,
        samples=samples,
        breakpoint_samples=bp_samples,
        tail_start=tail_start,
        max_normalized=max(norm),
        min_normalized=min(norm),
        tail_max=max(s.normalized_remainder for s in tail),
        tail_windows=win,
        threshold=threshold,
        asymptotic_lower_bound=_ASYMPTOTIC_LOWER[example](tol),
        a1_envelope=a1_envelope_check(tau_max=max(taus)) if check_a1 else {},
    )
