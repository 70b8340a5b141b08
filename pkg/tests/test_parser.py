from __future__ import annotations

from fractions import Fraction

import pytest

from weyl_lab.errors import DomainError, OperatorSyntaxError
from weyl_lab.parser import parse_factor, parse_operator, render
from weyl_lab.spectra import (
    SpectrumTransform,
    TensorOperator,
    a1_spectrum,
    a2_spectrum,
    harmonic_oscillator,
    hermite_spectrum,
    sphere_laplacian_shifted,
    transform,
)


def test_basic_expressions():
    op = parse_operator("a1 (x) a2^2")
    assert op == TensorOperator.of(a1_spectrum(), transform(a2_spectrum(), SpectrumTransform(2)))
    assert parse_operator("hermite (x) hermite") == TensorOperator.of(hermite_spectrum(), hermite_spectrum())
    assert parse_operator("  a1(x)a2^3/4 ")[1] == transform(a2_spectrum(), SpectrumTransform(Fraction(3, 4)))


def test_parameterised_names():
    assert parse_factor("sphere(3)") == sphere_laplacian_shifted(3, 1)
    assert parse_factor("sphere(2, 0.25)") == sphere_laplacian_shifted(2, Fraction(1, 4))
    assert parse_factor("sphere(2,1/3)") == sphere_laplacian_shifted(2, Fraction(1, 3))
    assert parse_factor("ho(3)") == harmonic_oscillator(3)


def test_zero_mode_applies_to_circle():
    assert parse_factor("a2", zero_mode_mult=1) == a2_spectrum(1)


@pytest.mark.parametrize(
    "expr, fragment, position",
    [
        ("a2^0", "exponent must be positive", 3),
        ("a2^-1", "exponent must be positive", 3),
        ("foo", "unknown operator name", 0),
        ("a1 (x) bar", "unknown operator name", 7),
        ("a2^1/0", "zero denominator", 5),
        ("", "empty operator expression", 0),
        ("a1 a2", "expected '(x)'", 3),
        ("sphere(0)", "dimension must be a positive integer", 7),
        ("a1 (x)", "expected operator name", 6),
    ],
)
def test_syntax_errors_carry_position(expr, fragment, position):
    with pytest.raises(OperatorSyntaxError) as info:
        parse_operator(expr)
    assert fragment in str(info.value)
    assert info.value.position == position


def test_tensor_factors_need_eigenvalues_at_least_one():
    with pytest.raises(DomainError):
        parse_operator("sphere(2,1/7)")
    assert parse_factor("sphere(2,1/7)") == sphere_laplacian_shifted(2, Fraction(1, 7))


def test_single_factor_required():
    with pytest.raises(OperatorSyntaxError):
        parse_factor("a1 (x) a2")


@pytest.mark.parametrize(
    "expr",
    ["a1", "a1 (x) a2^2", "hermite (x) hermite (x) hermite", "sphere(3,1) (x) ho(2)^5/3", "sphere(2,7/3)^2"],
)
def test_round_trip(expr):
    op = parse_operator(expr)
    assert parse_operator(render(op)) == op
