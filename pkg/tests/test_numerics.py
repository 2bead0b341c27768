import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab.errors import DecayError, DomainTagError, PoleError, RangeError
from rieszlab.numerics import (
    Grid,
    MultiIndex,
    SampledField,
    continuous_ft,
    continuous_ift,
    edge_magnitude,
    gamma,
    gauss_legendre,
    integrate,
    monomial_eval,
    multi_indices,
    read_field_csv,
    require_edge_decay,
    spatial_moment,
    write_field_csv,
)

SQRT_2PI = math.sqrt(2 * math.pi)


def gaussian_field(grid, center=0.0):
    x = grid.points()
    return SampledField(grid, np.exp(-0.5 * np.sum((x - center) ** 2, axis=-1)), "spatial")


# -- multi-indices -------------------------------------------------------------


@given(st.lists(st.integers(0, 5), min_size=1, max_size=4))
def test_multi_index_order_and_factorial(entries):
    i = MultiIndex(entries)
    assert i.order() == sum(entries)
    assert i.factorial() == math.prod(math.factorial(e) for e in entries)


def test_multi_index_rejects_negative_entries():
    with pytest.raises(ValueError):
        MultiIndex((1, -1))


def test_zero_index_factorial_is_one():
    assert MultiIndex.zero(3).factorial() == 1


def test_multi_indices_examples():
    assert multi_indices(1, 0) == [(0,)]
    assert multi_indices(2, 1) == [(0, 0), (0, 1), (1, 0)]
    assert len(multi_indices(2, 2)) == 6


@given(st.integers(1, 4), st.integers(0, 6))
def test_multi_indices_count_is_binomial(d, m):
    idx = multi_indices(d, m)
    assert len(idx) == math.comb(d + m, d)
    assert len(set(idx)) == len(idx)
    assert all(i.order() <= m for i in idx)


def test_monomial_examples():
    assert monomial_eval((2.0, 3.0), (1, 2)) == 18
    assert monomial_eval((0.0, 5.0), (1, 0)) == 0
    assert monomial_eval((7.0, -2.0), (0, 0)) == 1


# -- gamma -------------------------------------------------------------------


def test_gamma_examples():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(1.7724538509, rel=1e-10)
    assert gamma(-0.5) == pytest.approx(-3.5449077018, rel=1e-10)


@pytest.mark.parametrize("x", [0.0, -1.0, -4.0])
def test_gamma_poles(x):
    with pytest.raises(PoleError):
        gamma(x)


def test_gamma_recursion_sweep():
    for x in np.arange(-4.5, 10.0, 1.0):
        assert abs(gamma(x + 1) - x * gamma(x)) <= 1e-11 * abs(gamma(x + 1))


@given(st.floats(0.05, 30.0))
def test_gamma_matches_stdlib(x):
    assert gamma(x) == pytest.approx(math.gamma(x), rel=1e-12)


# -- grid --------------------------------------------------------------------


def test_grid_nodes_and_frequencies():
    g = Grid(1, 2.0, 8)
    assert g.h == 0.5
    np.testing.assert_allclose(g.nodes(), -2.0 + 0.5 * np.arange(8))
    assert g.dxi == pytest.approx(math.pi / 2)
    freqs = g.frequencies()
    assert freqs[0] == pytest.approx(-8 * math.pi / 4)
    assert freqs[-1] == pytest.approx(3 * math.pi / 2)
    assert g.nodes()[g.origin_index[0]] == 0.0


@pytest.mark.parametrize("args", [(1, 1.0, 7), (1, -1.0, 8), (0, 1.0, 8)])
def test_grid_rejects_bad_parameters(args):
    with pytest.raises(RangeError):
        Grid(*args)


def test_sampled_field_shape_checked():
    with pytest.raises(ValueError):
        SampledField(Grid(1, 1.0, 8), np.zeros(7), "spatial")


# -- transforms and quadrature -------------------------------------------------


def test_ft_of_gaussian():
    g = Grid(1, 20.0, 512)
    F = continuous_ft(gaussian_field(g))
    assert F.tag == "frequency"
    xi = g.frequencies()
    np.testing.assert_allclose(F.values, SQRT_2PI * np.exp(-0.5 * xi**2), atol=1e-12)


def test_ft_shift_modulation():
    g = Grid(1, 20.0, 512)
    xi = g.frequencies()
    F0 = continuous_ft(gaussian_field(g)).values
    F1 = continuous_ft(gaussian_field(g, 1.0)).values
    np.testing.assert_allclose(F1, np.exp(-1j * xi) * F0, atol=1e-12)


def test_ift_of_gaussian_spectrum():
    g = Grid(1, 20.0, 512)
    F = SampledField(g, SQRT_2PI * np.exp(-0.5 * g.frequencies() ** 2), "frequency")
    np.testing.assert_allclose(continuous_ift(F).values, np.exp(-0.5 * g.nodes() ** 2), atol=1e-12)


def test_zero_field_transforms_to_zero():
    g = Grid(2, 4.0, 16)
    z = SampledField(g, np.zeros(g.shape), "spatial")
    assert np.all(continuous_ft(z).values == 0)


def test_domain_tags_enforced():
    g = Grid(1, 5.0, 32)
    f = gaussian_field(g)
    with pytest.raises(DomainTagError):
        continuous_ift(f)
    with pytest.raises(DomainTagError):
        continuous_ft(continuous_ft(f))


@given(st.floats(-3.0, 3.0), st.floats(0.5, 2.0), st.sampled_from([1, 2]))
def test_round_trip(center, sigma, d):
    g = Grid(d, 20.0, 128 if d == 1 else 64)
    x = g.points()
    f = SampledField(g, np.exp(-np.sum((x - center) ** 2, axis=-1) / (2 * sigma**2)), "spatial")
    back = continuous_ift(continuous_ft(f)).values
    assert np.max(np.abs(back - f.values)) <= 1e-10 * np.max(np.abs(f.values))


def test_parseval_gaussian():
    g = Grid(1, 20.0, 512)
    f = gaussian_field(g)
    F = continuous_ft(f)
    lhs = integrate(f.with_values(np.abs(f.values) ** 2)).real
    rhs = np.sum(np.abs(F.values) ** 2) * g.dxi / (2 * math.pi)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_integrate_examples():
    g = Grid(1, 1.0, 4)
    assert integrate(SampledField(g, np.ones(4), "spatial")) == pytest.approx(2.0)
    big = Grid(1, 20.0, 1024)
    assert integrate(gaussian_field(big)).real == pytest.approx(SQRT_2PI, rel=1e-12)
    odd = SampledField(big, big.nodes() * np.exp(-0.5 * big.nodes() ** 2), "spatial")
    assert abs(integrate(odd)) < 1e-14


def test_moments_of_gaussian():
    g = Grid(1, 20.0, 1024)
    f = gaussian_field(g)
    assert abs(spatial_moment(f, (1,))) < 1e-14
    assert spatial_moment(f, (0,)).real == pytest.approx(SQRT_2PI, rel=1e-12)
    assert spatial_moment(f, (2,)).real == pytest.approx(SQRT_2PI, rel=1e-12)


def test_edge_decay_guard():
    g = Grid(1, 3.0, 64)
    f = gaussian_field(g)
    assert edge_magnitude(f) > 1e-3
    with pytest.raises(DecayError):
        require_edge_decay(f)
    require_edge_decay(gaussian_field(Grid(1, 20.0, 64)))


@given(st.integers(1, 40), st.floats(-3, 0), st.floats(0.1, 4))
def test_gauss_legendre_exact_for_polynomials(n, a, width):
    x, w = gauss_legendre(n, a, a + width)
    b = a + width
    deg = 2 * n - 1
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert np.sum(w * x**deg) == pytest.approx(exact, rel=1e-9, abs=1e-9)


def test_field_csv_round_trip(tmp_path):
    g = Grid(2, 3.0, 8)
    vals = np.arange(64).reshape(8, 8) * (1 + 0.5j)
    f = SampledField(g, vals, "spatial")
    write_field_csv(f, tmp_path / "f.csv")
    back = read_field_csv(tmp_path / "f.csv")
    assert back.grid == g and back.tag == "spatial"
    np.testing.assert_array_equal(back.values, vals)
