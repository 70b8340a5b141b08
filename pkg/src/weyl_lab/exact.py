"""Exact arithmetic helpers.

Eigenvalues of transformed spectra are of the form ``c * b**s`` with rational
``b``, ``c`` and ``s``; products over tensor factors stay in that family.
:class:`Monomial` carries such numbers symbolically so that ``value < tau``
can be decided by raising both sides to a common integer power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational

__all__ = [
    "Monomial",
    "as_fraction",
    "compare",
    "floor_below",
    "iroot",
    "simplify",
]


def as_fraction(x) -> Fraction:
    """Exact rational value of ``x``; floats convert without rounding."""
    if isinstance(x, Fraction):
        return x
    if type(x) is int:
        return Fraction(x)
    if isinstance(x, Integral):
        return Fraction(int(x))
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Monomial):
        raise TypeError("monomial with irrational value has no exact fraction form")
    f = float(x)
    if not math.isfinite(f):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(f)


def floor_below(x: Fraction) -> int:
    """Largest integer strictly less than ``x``."""
    return -((-x.numerator) // x.denominator) - 1


def iroot(q: int, k: int) -> int:
    """Largest integer ``n >= 0`` with ``n**k <= q`` (exact, any size)."""
    if q < 0:
        raise ValueError("iroot of a negative number")
    if k == 1 or q < 2:
        return q
    if k == 2:
        return math.isqrt(q)
    n = 0
    if q.bit_length() < 900:
        # inflate the float estimate so it starts above the root
        n = int(q ** (1.0 / k) * (1.0 + 1e-12)) + 2
    if n**k <= q:
        n = 1 << (q.bit_length() // k + 1)
    # integer Newton started above the root decreases monotonically onto it
    while n**k > q:
        n = ((k - 1) * n + q // n ** (k - 1)) // k
    while (n + 1) ** k <= q:
        n += 1
    return n


@dataclass(frozen=True, eq=False)
class Monomial:
    """Positive number ``prod(base ** exponent)`` with rational bases and exponents."""

    terms: tuple[tuple[Fraction, Fraction], ...]

    __hash__ = None  # equality is numeric; a consistent hash is not available

    @classmethod
    def of(cls, value, exponent=1) -> "Monomial":
        if isinstance(value, Monomial):
            return value ** as_fraction(exponent)
        b = as_fraction(value)
        if b <= 0:
            raise ValueError("monomial bases must be positive")
        return cls(((b, as_fraction(exponent)),))

    def __mul__(self, other) -> "Monomial":
        if not isinstance(other, Monomial):
            if other == 1:
                return self
            other = Monomial.of(other)
        return Monomial(self.terms + other.terms)

    __rmul__ = __mul__

    def __pow__(self, s) -> "Monomial":
        s = as_fraction(s)
        return Monomial(tuple((b, e * s) for b, e in self.terms))

    def __float__(self) -> float:
        logv = math.fsum(float(e) * _log_fraction(b) for b, e in self.terms)
        return math.exp(logv)

    def _sign_vs(self, other) -> int:
        """sign(self - other), decided exactly."""
        if isinstance(other, Monomial):
            ratio = Monomial(self.terms + tuple((b, -e) for b, e in other.terms))
        else:
            x = as_fraction(other)
            if x <= 0:
                return 1
            ratio = Monomial(self.terms + ((x, Fraction(-1)),))
        q = 1
        for _, e in ratio.terms:
            q = math.lcm(q, e.denominator)
        # ratio**q is rational; compare with 1 by numerator/denominator.
        num, den = 1, 1
        for b, e in ratio.terms:
            p = e.numerator * (q // e.denominator)
            if p >= 0:
                num *= b.numerator**p
                den *= b.denominator**p
            else:
                num *= b.denominator ** (-p)
                den *= b.numerator ** (-p)
        return (num > den) - (num < den)

    def __lt__(self, other):
        return self._sign_vs(other) < 0

    def __le__(self, other):
        return self._sign_vs(other) <= 0

    def __gt__(self, other):
        return self._sign_vs(other) > 0

    def __ge__(self, other):
        return self._sign_vs(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (Monomial, int, float, Fraction, Rational)):
            return NotImplemented
        return self._sign_vs(other) == 0

    def __repr__(self):
        inner = " * ".join(f"{b}^({e})" for b, e in self.terms)
        return f"Monomial({inner})"


def _log_fraction(b: Fraction) -> float:
    return math.log(b.numerator) - math.log(b.denominator)


def simplify(value):
    """Collapse a monomial with integral exponents to an ``int`` or ``Fraction``."""
    if not isinstance(value, Monomial):
        return value
    out = Fraction(1)
    rest = []
    for b, e in value.terms:
        if e.denominator == 1:
            out *= b ** e.numerator
        else:
            rest.append((b, e))
    if rest:
        if out != 1:
            rest.insert(0, (out, Fraction(1)))
        return Monomial(tuple(rest))
    return out.numerator if out.denominator == 1 else out


def compare(value, tau) -> int:
    """sign(value - tau) for ints, fractions or monomials, decided exactly."""
    if type(value) is int and type(tau) is int:
        return (value > tau) - (value < tau)
    if isinstance(value, Monomial):
        return value._sign_vs(tau)
    if isinstance(tau, Monomial):
        return -tau._sign_vs(value)
    a, b = as_fraction(value), as_fraction(tau)
    return (a > b) - (a < b)
