import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab.errors import PoleError, SingularPoint, UnsupportedOrder
from rieszlab.numerics import MultiIndex
from rieszlab.symbols import (
    HomogeneousSymbol,
    RadialPolyKernel,
    kernel_derivative,
    kernel_eval,
    kernel_for_symbol,
    kernel_from_radial_symbol,
    radial_symbol,
    riesz_constant,
    symbol_product,
    weight_symbol,
)

non_integer_gamma = st.floats(0.05, 2.95).filter(lambda g: abs(g - round(g)) > 0.02)
points_1d = st.floats(0.1, 10.0) | st.floats(-10.0, -0.1)


def test_radial_symbol_examples():
    assert radial_symbol(0.0).is_constant()
    assert radial_symbol(0.0).evaluate(3.7) == 1.0
    assert radial_symbol(0.5).evaluate(4.0) == pytest.approx(0.5)
    assert radial_symbol(-2.0, 2).evaluate((3.0, 4.0)).real == pytest.approx(25.0)


def test_weight_symbol_examples():
    omega = radial_symbol(0.5)
    assert weight_symbol(omega, (0,)) == omega
    val = weight_symbol(omega, (1,)).evaluate(2.0)
    assert val == pytest.approx(1j * math.sqrt(2))
    assert weight_symbol(omega, (3,)).degree == omega.degree + 3


def test_symbol_product_examples():
    prod = symbol_product(radial_symbol(0.2), radial_symbol(0.3))
    assert prod.radial_exponent == pytest.approx(-0.5)
    assert prod.degree == pytest.approx(-0.5)
    a = weight_symbol(radial_symbol(0.7), (2,))
    assert symbol_product(a, radial_symbol(0.0)) == a


@given(
    st.floats(-3.0, 3.0),
    st.lists(st.integers(0, 3), min_size=2, max_size=2),
    st.lists(st.floats(-5, 5), min_size=2, max_size=2).filter(lambda v: math.hypot(*v) > 0.1),
    st.floats(0.1, 10.0),
)
def test_symbol_homogeneity(exponent, mono, xi, t):
    s = HomogeneousSymbol(exponent, MultiIndex(mono))
    xi = np.array(xi)
    lhs = s.evaluate(t * xi)
    rhs = t**s.degree * s.evaluate(xi)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1e-300) + 1e-300


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 2))
def test_symbol_product_degree_additive(a, b, d):
    pa, pb = radial_symbol(a, d), radial_symbol(b, d)
    assert symbol_product(pa, pb).degree == pa.degree + pb.degree


def test_riesz_constant_examples():
    assert riesz_constant(0.5, 1) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-12)
    assert riesz_constant(1.0, 2) == pytest.approx(1 / (2 * math.pi), rel=1e-12)
    expected = math.pi**-0.5 * 2**-0.25 * math.gamma(0.375) / math.gamma(0.125)
    assert riesz_constant(0.25, 1) == pytest.approx(expected, rel=1e-12)
    assert riesz_constant(0.25, 1) == pytest.approx(0.1492704, rel=1e-6)


def test_riesz_constant_pole():
    with pytest.raises(PoleError):
        riesz_constant(3.0, 1)


def test_kernel_examples():
    k = kernel_from_radial_symbol(0.5, 1)
    assert kernel_eval(k, 1.0).real == pytest.approx(0.3989422804, rel=1e-10)
    assert kernel_eval(k, 4.0).real == pytest.approx(0.1994711402, rel=1e-10)
    single = RadialPolyKernel(((1.0, MultiIndex((0,)), -0.5),), 1)
    assert kernel_eval(single, 9.0) == pytest.approx(1 / 3)
    assert kernel_eval(RadialPolyKernel((), 1), 2.0) == 0


def test_kernel_singular_point():
    with pytest.raises(SingularPoint):
        kernel_eval(kernel_from_radial_symbol(0.5, 1), 0.0)


@given(non_integer_gamma.filter(lambda g: g < 1 or g > 2.05), points_1d, st.floats(0.2, 5.0))
def test_kernel_homogeneity(gamma, x, t):
    k = kernel_from_radial_symbol(gamma, 1)
    assert kernel_eval(k, t * x) == pytest.approx(t ** (gamma - 1) * kernel_eval(k, x), rel=1e-12)


def test_kernel_derivative_power_rule():
    k = RadialPolyKernel(((1.0, MultiIndex((0,)), -0.5),), 1)
    assert kernel_derivative(k, (0,)) == k
    dk = kernel_derivative(k, (1,))
    for x in (-3.0, 0.5, 2.0):
        assert kernel_eval(dk, x).real == pytest.approx(-0.5 * x * abs(x) ** -2.5, rel=1e-14)
    assert dk.degree == pytest.approx(k.degree - 1)


def test_kernel_derivative_order_limit():
    with pytest.raises(UnsupportedOrder):
        kernel_derivative(kernel_from_radial_symbol(0.5, 1), (5,))


@given(
    non_integer_gamma,
    st.integers(1, 2),
    st.lists(st.integers(0, 2), min_size=2, max_size=2).filter(lambda j: 1 <= sum(j) <= 3),
    st.lists(st.floats(0.5, 3.0), min_size=2, max_size=2),
    st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=2),
)
def test_kernel_derivative_matches_finite_differences(gamma, d, j, mag, sign):
    if d == 1:
        j = [sum(j)]
    if abs(gamma - d) < 0.05 or abs(gamma - d - 1) < 0.05 or gamma >= d + 2:
        return
    k = kernel_from_radial_symbol(gamma, d)
    x = np.array(mag[:d]) * np.array(sign[:d])
    dk = kernel_derivative(k, j)
    step = 1e-3
    # repeated central differences: O(step^2) error relative to the next derivative
    def diff(func, axis):
        e = np.zeros(d)
        e[axis] = step
        return lambda p: (func(p + e) - func(p - e)) / (2 * step)

    func = lambda p: kernel_eval(k, p).real
    for axis, count in enumerate(j):
        for _ in range(count):
            func = diff(func, axis)
    exact = kernel_eval(dk, x).real
    assert func(x) == pytest.approx(exact, rel=1e-4, abs=1e-8)


def test_kernel_derivative_first_order_step_1e5():
    rng = np.random.default_rng(3)
    for gamma in (0.5, 1.5, 2.5):
        k = kernel_from_radial_symbol(gamma, 1)
        dk = kernel_derivative(k, (1,))
        for x in rng.uniform(0.5, 5.0, 20) * rng.choice([-1, 1], 20):
            fd = (kernel_eval(k, x + 1e-5) - kernel_eval(k, x - 1e-5)).real / 2e-5
            assert fd == pytest.approx(kernel_eval(dk, x).real, rel=1e-6)


def test_kernel_for_symbol_is_derivative():
    omega = weight_symbol(radial_symbol(0.5), (1,))
    assert kernel_for_symbol(omega) == kernel_derivative(kernel_from_radial_symbol(0.5, 1), (1,))


def test_mixed_degree_terms_rejected():
    with pytest.raises(ValueError):
        RadialPolyKernel(((1.0, MultiIndex((0,)), -0.5), (1.0, MultiIndex((0,)), -0.3)), 1)
