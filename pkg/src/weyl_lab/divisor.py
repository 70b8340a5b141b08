"""Dirichlet divisor problem and its anisotropic variant, under strict inequality.

``D(tau)`` counts pairs ``(n, m)`` of positive integers with ``n*m < tau``.
With ``T`` the largest integer below ``tau`` this is ``sum_{n<=T} floor(T/n)``,
the classical summatory divisor function at ``T`` (literature that counts
``n*m <= x`` has ``D_classical(x) = D(x + 1)`` for integer ``x``).

The anisotropic count is the number of pairs with ``n**alpha * m**beta < tau``
for positive rationals ``alpha, beta``. Raising to the common denominator
``Q`` turns it into the integer problem ``n**A * m**B <= T`` with
``T = floor_below(tau**Q)``, solved with exact integer roots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DomainError, PoleError
from .exact import as_fraction, floor_below, iroot
from .zeta import euler_mascheroni, riemann_zeta

__all__ = [
    "DivisorQuery",
    "divisor_summatory",
    "divisor_bruteforce",
    "divisor_table",
    "dirichlet_main_term",
    "anisotropic_count",
    "anisotropic_bruteforce",
    "anisotropic_main_term",
    "hermite_tensor_crosscheck",
]

DEFAULT_BUDGET = 10**8
_INT64_SAFE = kernels.INT64_SAFE


@dataclass(frozen=True)
class DivisorQuery:
    tau: Fraction
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("tau", "alpha", "beta"):
            value = as_fraction(getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
            object.__setattr__(self, name, value)

    def integer_form(self) -> tuple[int, int, int]:
        """``(T, A, B)`` with ``n**alpha m**beta < tau  <=>  n**A m**B <= T``."""
        Q = math.lcm(self.alpha.denominator, self.beta.denominator)
        A = int(self.alpha * Q)
        B = int(self.beta * Q)
        return floor_below(self.tau**Q), A, B


def _largest_below(tau) -> int:
    t = as_fraction(tau)
    if t <= 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    return floor_below(t)


def divisor_summatory(tau) -> int:
    """D(tau) by the hyperbola method: ``2 sum_{n<=s} floor(T/n) - s**2``, ``s = isqrt(T)``."""
    T = _largest_below(tau)
    if T <= 0:
        return 0
    s = math.isqrt(T)
    # the partial sum is below T * (1 + log s); keep it well inside int64
    if T * (2 + s.bit_length()) < _INT64_SAFE:
        return kernels.hyperbola_sum(T)
    return 2 * sum(T // n for n in range(1, s + 1)) - s * s


def divisor_bruteforce(tau, *, budget: int = DEFAULT_BUDGET) -> int:
    """``sum_{n<=T} floor(T/n)`` over every column, without the hyperbola split."""
    T = _largest_below(tau)
    if T <= 0:
        return 0
    if T > budget:
        raise BudgetExceeded(f"{T} columns exceed the budget of {budget}")
    total = 0
    for lo in range(1, T + 1, 1 << 22):
        n = np.arange(lo, min(lo + (1 << 22), T + 1), dtype=np.int64)
        total += int((T // n).sum())
    return total


def divisor_table(tmax: int) -> np.ndarray:
    """``D`` at every integer ``T <= tmax`` (strict count below ``T + 1``) by marking multiples."""
    d = np.zeros(tmax + 1, dtype=np.int64)
    for n in range(1, tmax + 1):
        d[n::n] += 1
    return np.cumsum(d)


def dirichlet_main_term(tau) -> float:
    """``tau log tau + (2 gamma - 1) tau``."""
    t = float(tau)
    if not t >= 1.0:
        raise DomainError("the main term is defined for tau >= 1")
    return t * math.log(t) + (2.0 * euler_mascheroni() - 1.0) * t


def _column_sum(T: int, root: int, power: int, jmax: int) -> int:
    """``sum_{j=1}^{jmax} iroot(T // j**power, root)``."""
    if jmax <= 0:
        return 0
    if T < _INT64_SAFE:
        return kernels.root_column_sum(T, root, power, jmax)
    return sum(iroot(T // j**power, root) for j in range(1, jmax + 1))


def anisotropic_count(q: DivisorQuery, method: str = "direct", *, budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of ``(n, m)`` with ``n**alpha * m**beta < tau``.

    ``direct`` loops over the variable with the larger exponent (about
    ``T**(1/max(A, B))`` steps). ``split`` cuts the region at
    ``u = iroot(T, A + B)`` and needs about ``2 T**(1/(A+B))`` steps.
    """
    T, A, B = q.integer_form()
    if T <= 0:
        return 0
    if method == "direct":
        big, small = (A, B) if A >= B else (B, A)
        jmax = iroot(T, big)
        if jmax > budget:
            raise BudgetExceeded(f"{jmax} outer steps exceed the budget of {budget}")
        return _column_sum(T, small, big, jmax)
    if method == "split":
        u = iroot(T, A + B)
        if 2 * u > budget:
            raise BudgetExceeded(f"{2 * u} steps exceed the budget of {budget}")
        return _column_sum(T, A, B, u) + _column_sum(T, B, A, u) - u * u
    raise ValueError(f"unknown anisotropic method {method!r}")


def anisotropic_bruteforce(q: DivisorQuery, *, budget: int = DEFAULT_BUDGET) -> int:
    """Test every pair on each row ``n`` directly; no integer roots involved."""
    T, A, B = q.integer_form()
    total = 0
    seen = 0
    n = 1
    while n**A <= T:
        rest = T // n**A
        mmax = int(rest ** (1.0 / B)) + 2
        seen += mmax
        if seen > budget:
            raise BudgetExceeded(f"more than {budget} pairs tested")
        m = np.arange(1, mmax + 1, dtype=object if T >= _INT64_SAFE else np.int64)
        total += int(np.count_nonzero(n**A * m**B <= T))
        n += 1
    return total


def anisotropic_main_term(q: DivisorQuery) -> float:
    """``zeta(alpha/beta) tau**(1/beta) + zeta(beta/alpha) tau**(1/alpha)``."""
    if q.alpha == q.beta:
        raise PoleError("the main term degenerates to the pole of zeta at 1 when alpha == beta")
    t = float(q.tau)
    a, b = q.alpha, q.beta
    return riemann_zeta(float(a / b)) * t ** float(1 / b) + riemann_zeta(float(b / a)) * t ** float(1 / a)


def hermite_tensor_crosscheck(tau) -> bool:
    """Whether the product of two Hermite spectra counts exactly D(tau)."""
    from .counting import count_tensor_recursive
    from .spectra import TensorOperator, hermite_spectrum

    op = TensorOperator((hermite_spectrum(), hermite_spectrum()))
    return count_tensor_recursive(op, tau) == divisor_summatory(tau)
