"""Operator expressions such as ``"a1 (x) a2^3/4"`` or ``"sphere(2, 1) (x) ho(3)"``.

Grammar (whitespace is ignored)::

    expr     := factor { "(x)" factor }
    factor   := name [ "^" rational ]
    name     := "a1" | "a2" | "hermite" | "sphere(" integer [ "," real ] ")" | "ho(" integer ")"
    rational := integer [ "/" integer ]

``real`` accepts a decimal literal or ``p/q``. Exponents are kept as exact
fractions.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import OperatorSyntaxError
from .spectra import (
    A1Spectrum,
    ModelSpectrum,
    OscillatorSpectrum,
    SphereSpectrum,
    SpectrumTransform,
    TensorOperator,
    TransformedSpectrum,
    a1_spectrum,
    a2_spectrum,
    harmonic_oscillator,
    hermite_spectrum,
    sphere_laplacian_shifted,
    transform,
)

__all__ = ["parse_operator", "parse_factor", "render", "render_factor"]

_INT = re.compile(r"[+-]?\d+")
_REAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, literal: str) -> bool:
        self.skip()
        return self.text.startswith(literal, self.pos)

    def expect(self, literal: str):
        if not self.peek(literal):
            found = self.text[self.pos : self.pos + 8] or "end of input"
            raise OperatorSyntaxError(f"expected {literal!r}, found {found!r}", self.pos)
        self.pos += len(literal)

    def match(self, pattern: re.Pattern, what: str) -> tuple[str, int]:
        self.skip()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise OperatorSyntaxError(f"expected {what}", self.pos)
        self.pos = m.end()
        return m.group(0), m.start()


def _parse_name(sc: _Scanner, zero_mode_mult: int) -> ModelSpectrum:
    word, start = sc.match(_NAME, "operator name")
    if word == "a1":
        return a1_spectrum()
    if word == "a2":
        return a2_spectrum(zero_mode_mult)
    if word == "hermite":
        return hermite_spectrum()
    if word in ("sphere", "ho"):
        sc.expect("(")
        text, pos = sc.match(_INT, "integer dimension")
        dim = int(text)
        if dim < 1:
            raise OperatorSyntaxError("dimension must be a positive integer", pos)
        if word == "ho":
            sc.expect(")")
            return harmonic_oscillator(dim)
        shift = Fraction(1)
        if sc.peek(","):
            sc.expect(",")
            text, pos = sc.match(_REAL, "real shift")
            num, _, den = text.partition("/")
            shift = Fraction(num) / (int(den) if den else 1)
            if shift < 0:
                raise OperatorSyntaxError("sphere shift must be nonnegative", pos)
        sc.expect(")")
        return sphere_laplacian_shifted(dim, shift, zero_mode_mult)
    raise OperatorSyntaxError(f"unknown operator name {word!r}", start)


def _parse_rational(sc: _Scanner) -> tuple[Fraction, int]:
    text, start = sc.match(_INT, "integer exponent")
    value = Fraction(int(text))
    if sc.peek("/"):
        sc.expect("/")
        den_text, pos = sc.match(_INT, "integer denominator")
        den = int(den_text)
        if den == 0:
            raise OperatorSyntaxError("zero denominator", pos)
        value /= den
    return value, start


def _parse_factor(sc: _Scanner, zero_mode_mult: int) -> ModelSpectrum:
    base = _parse_name(sc, zero_mode_mult)
    if sc.peek("^"):
        sc.expect("^")
        s, pos = _parse_rational(sc)
        if s <= 0:
            raise OperatorSyntaxError(f"exponent must be positive, got {s}", pos)
        return transform(base, SpectrumTransform(s))
    return base


def _parse_factors(expr: str, zero_mode_mult: int) -> list[ModelSpectrum]:
    sc = _Scanner(expr)
    if sc.at_end():
        raise OperatorSyntaxError("empty operator expression", 0)
    factors = [_parse_factor(sc, zero_mode_mult)]
    while not sc.at_end():
        sc.expect("(x)")
        factors.append(_parse_factor(sc, zero_mode_mult))
    return factors


def parse_operator(expr: str, zero_mode_mult: int = 2) -> TensorOperator:
    """Parse a tensor-product expression; ``zero_mode_mult`` applies to circle factors."""
    return TensorOperator(tuple(_parse_factors(expr, zero_mode_mult)))


def parse_factor(expr: str, zero_mode_mult: int = 2) -> ModelSpectrum:
    """Parse a single factor. Unlike a tensor operator it may have eigenvalues below 1."""
    factors = _parse_factors(expr, zero_mode_mult)
    if len(factors) != 1:
        raise OperatorSyntaxError("expected a single factor, got a tensor product")
    return factors[0]


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_factor(spec: ModelSpectrum) -> str:
    if isinstance(spec, TransformedSpectrum):
        if spec.c != 1 or isinstance(spec.base, TransformedSpectrum):
            raise ValueError("scaled or nested transforms have no expression syntax")
        return f"{render_factor(spec.base)}^{_fmt(spec.s)}"
    if isinstance(spec, A1Spectrum):
        return "a1"
    if isinstance(spec, SphereSpectrum):
        if spec.name == "a2":
            return "a2"
        return f"sphere({spec.dim},{_fmt(spec.shift)})"
    if isinstance(spec, OscillatorSpectrum):
        return "hermite" if spec.name == "hermite" else f"ho({spec.dim})"
    raise ValueError(f"cannot render {spec!r}")


def render(op: TensorOperator) -> str:
    return " (x) ".join(render_factor(f) for f in op)
