from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from weyl_lab.counting import (
    count,
    count_a1_closed,
    count_single,
    count_tensor_bruteforce,
    count_tensor_recursive,
    inner_factor_index,
    partial_zeta,
    product_partial_zeta,
)
from weyl_lab.divisor import divisor_summatory
from weyl_lab.errors import BudgetExceeded, DomainError
from weyl_lab.exact import iroot
from weyl_lab.parser import parse_operator
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


def _enumerate(op, tau):
    """Independent oracle: all r-tuples from the raw formula streams, in floats."""
    lists = []
    for f in op:
        vals = []
        for v, m in f.raw_stream():
            if float(v) >= tau:
                break
            vals.append((float(v), m))
        lists.append(vals)
    total = 0
    def walk(d, prod, mult):
        nonlocal total
        if d == len(lists):
            total += mult
            return
        for v, m in lists[d]:
            if prod * v >= tau:
                break
            walk(d + 1, prod * v, mult * m)
    walk(0, 1.0, 1)
    return total


def test_small_examples():
    assert count(parse_operator("a1 (x) a2"), 2) == 8
    assert count(parse_operator("hermite (x) hermite"), 10) == 23
    assert count(parse_operator("a1 (x) a2"), 1) == 0
    assert count_single(a2_spectrum(), 5.5) == 6
    assert count_single(a1_spectrum(), 3.5) == 9
    assert [count_a1_closed(t) for t in (2, 3.5, 7)] == [4, 9, 9]


def test_three_hermite_factors():
    # ordered triples with n1 n2 n3 < 8: sum over T=7 of the Piltz count
    op = parse_operator("hermite (x) hermite (x) hermite")
    ref = sum(1 for a in range(1, 8) for b in range(1, 8) for c in range(1, 8) if a * b * c < 8)
    assert ref == 28
    assert count_tensor_recursive(op, 8) == 28
    assert count_tensor_bruteforce(op, 8) == 28


@pytest.mark.parametrize(
    "expr",
    ["a1 (x) a2^2", "a1 (x) a2", "a1 (x) a2^3/4", "hermite (x) hermite", "sphere(3,1) (x) ho(2)",
     "a2 (x) a2^1/2 (x) hermite", "sphere(2,1)^3/2 (x) a1"],
)
def test_matches_float_enumeration_off_breakpoints(expr):
    op = parse_operator(expr)
    rng = np.random.default_rng(len(expr))
    for tau in 1 + rng.random(25) * 3000:
        # random floats sit far from products of eigenvalues, so floats are exact enough
        assert count_tensor_recursive(op, tau) == _enumerate(op, tau)


def test_ties_are_excluded():
    op = parse_operator("a1 (x) a2^2")
    # 3 * 2^2 = 12 is an eigenvalue; just below, at, just above
    below = count_tensor_recursive(op, Fraction(12) - Fraction(1, 10**9))
    at = count_tensor_recursive(op, 12)
    above = count_tensor_recursive(op, Fraction(12) + Fraction(1, 10**9))
    assert below == at < above
    for t in (Fraction(12), math.nextafter(12.0, 0), math.nextafter(12.0, 13)):
        assert count_tensor_bruteforce(op, t) == count_tensor_recursive(op, t)


def test_irrational_ties_decided_exactly():
    # a2^{3/4} has eigenvalue 2^{3/4}; a1 has 1; tau = 2^{3/4} exactly is not representable,
    # but the product 16^{3/4} * 1 = 8 is rational and must be excluded at tau = 8
    op = parse_operator("a1 (x) a2^3/4")
    spec2 = op[1]
    assert any(float(v) == 8.0 for v, _ in [(spec2.level_value(j), 0) for j in range(5)]) is False
    just = count_tensor_recursive(op, math.nextafter(8.0, 9.0))
    assert count_tensor_recursive(op, 8) <= just
    assert count_tensor_bruteforce(op, 8) == count_tensor_recursive(op, 8)


def test_hermite_pair_is_divisor_count():
    op = parse_operator("hermite (x) hermite")
    for tau in (1, 2, 2.5, 10, 99.9, 1000, 12345.5):
        assert count_tensor_recursive(op, tau) == divisor_summatory(tau)


def test_monotone_in_tau():
    op = parse_operator("a1 (x) a2^3/4")
    taus = np.sort(np.random.default_rng(1).random(200) * 5000)
    counts = [count_tensor_recursive(op, t) for t in taus]
    assert all(a <= b for a, b in zip(counts, counts[1:]))


def test_scaling_law():
    rng = np.random.default_rng(2)
    base = a1_spectrum()
    for _ in range(100):
        c = Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50)))
        tau = Fraction(int(rng.integers(1, 10**6)), int(rng.integers(1, 100)))
        scaled = transform(base, SpectrumTransform(1, c))
        assert count_single(scaled, tau) == count_single(base, tau / c)


def test_closed_form_a1():
    spec = a1_spectrum()
    rng = np.random.default_rng(4)
    for tau in 1 + rng.random(1000) * 1e6:
        assert count_a1_closed(tau) == count_single(spec, tau)
    for k in range(1, 300):
        for bp in (k * k - k + 1, k * k + k + 1):
            for t in (bp, math.nextafter(bp, 0), math.nextafter(bp, math.inf)):
                if t > 1:
                    assert count_a1_closed(t) == count_single(spec, t)
    with pytest.raises(DomainError):
        count_a1_closed(1)


def test_inner_factor_is_largest_abscissa():
    op = parse_operator("a2 (x) a1 (x) a2^2")
    assert inner_factor_index(op) == 1
    # ties go to the last factor
    assert inner_factor_index(parse_operator("hermite (x) hermite")) == 1


def test_huge_counts_leave_int64():
    # few outer levels (n^8 < tau) but inner counts far beyond 2**63
    outer = transform(hermite_spectrum(), SpectrumTransform(8))
    inner = sphere_laplacian_shifted(6, 1)
    tau = 10**32
    n = count_tensor_recursive(TensorOperator.of(outer, inner), tau)
    ref = sum(count_single(inner, Fraction(tau, k**8)) for k in range(1, iroot(tau - 1, 8) + 1))
    assert n == ref > 2**64


def test_recursion_budget_is_enforced():
    op = parse_operator("hermite (x) hermite")
    with pytest.raises(BudgetExceeded):
        count_tensor_recursive(op, 10**10)


def test_budgets():
    op = parse_operator("hermite (x) hermite (x) hermite")
    with pytest.raises(BudgetExceeded):
        count_tensor_bruteforce(op, 1e4, budget=1000)
    with pytest.raises(BudgetExceeded):
        count_tensor_recursive(op, 1e6, budget=10)


def test_partial_zeta_values():
    assert partial_zeta(hermite_spectrum(), 4, 1).value == pytest.approx(1 + 1 / 2 + 1 / 3, abs=1e-15)
    assert partial_zeta(a1_spectrum(), 3.5, 0).value == 9
    rng = np.random.default_rng(9)
    for spec in (a1_spectrum(), a2_spectrum(), harmonic_oscillator(2), sphere_laplacian_shifted(3, 1)):
        for tau in 1 + rng.random(20) * 1e4:
            assert partial_zeta(spec, tau, 0).value == count_single(spec, tau)


def test_partial_zeta_below_zeta():
    from weyl_lab.zeta import spectral_zeta

    spec = a1_spectrum()
    z = spectral_zeta(spec, 2).value
    prev = 0.0
    for tau in np.geomspace(2, 1e6, 20):
        v = partial_zeta(spec, tau, 2).value
        assert prev <= v <= z
        prev = v


def test_product_partial_zeta():
    h = hermite_spectrum()
    # pairs (n, m) with nm < 4: 1/(nm) summed
    ref = sum(1 / (n * m) for n in range(1, 4) for m in range(1, 4) if n * m < 4)
    assert ref == pytest.approx(8 / 3)
    assert product_partial_zeta([h, h], 4, 1).value == pytest.approx(8 / 3, rel=1e-15)
    # against a direct double sum at moderate tau
    tau = 3000.5
    ref = math.fsum(1 / (n * m) for n in range(1, 3001) for m in range(1, int(tau / n) + 2) if n * m < tau)
    assert product_partial_zeta([h, h], tau, 1).value == pytest.approx(ref, rel=1e-13)
    a, b = a1_spectrum(), transform(a2_spectrum(), SpectrumTransform(2))
    ref = 0.0
    for v1, m1 in a.stream():
        if v1 >= 500:
            break
        for v2, m2 in b.stream():
            if v1 * v2 >= 500:
                break
            ref += m1 * m2 * (v1 * v2) ** -0.5
    assert product_partial_zeta([a, b], 500, 0.5).value == pytest.approx(ref, rel=1e-13)
