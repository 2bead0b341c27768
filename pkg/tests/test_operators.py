import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab.errors import DecayError, RangeError, SingularPoint, SpecError
from rieszlab.numerics import Grid, SampledField
from rieszlab.operators import (
    PotentialSpec,
    adjoint_integrable_potential,
    apply_multiplier,
    fractional_laplacian,
    generalized_riesz,
    h_kernel,
    integrable_potential_fourier,
    integrable_potential_spatial,
    riesz_potential_convolution,
    riesz_potential_fourier,
    taylor_coeffs,
)
from rieszlab.symbols import kernel_from_radial_symbol, radial_symbol
from rieszlab.verification import TestFunction, fit_decay_slope

SQRT_2PI = math.sqrt(2 * math.pi)
GRID = Grid(1, 20.0, 4096)
X = GRID.nodes()
ORIGIN = GRID.origin_index[0]
GAUSS = SampledField(GRID, np.exp(-0.5 * X**2), "spatial")
ZERO = SampledField(GRID, np.zeros(GRID.shape), "spatial")
INNER = np.abs(X) <= GRID.L / 2


def narrow_gaussian(center, width_scale, grid=GRID):
    x = grid.nodes()
    return SampledField(
        grid, width_scale / SQRT_2PI * np.exp(-0.5 * (width_scale * (x - center)) ** 2), "spatial"
    )


def rel_sup(a, b, mask=None):
    if mask is not None:
        a, b = a[mask], b[mask]
    return np.max(np.abs(a - b)) / np.max(np.abs(b))


# -- PotentialSpec ---------------------------------------------------------------


@pytest.mark.parametrize(
    "gamma,p,d",
    [(1.0, 1.0, 1), (2.0, 2.0, 1), (1.5, 2.0, 1), (0.5, 1.0, 3), (-0.5, 1.0, 1), (0.5, 0.5, 1)],
)
def test_potential_spec_rejects_boundary_cases(gamma, p, d):
    with pytest.raises(SpecError):
        PotentialSpec(gamma, p, d)


@given(
    st.floats(0.05, 4.0).filter(lambda g: abs(g - round(g)) > 0.01),
    st.floats(1.0, 50.0) | st.just(math.inf),
    st.sampled_from([1, 2]),
)
def test_potential_spec_k1(gamma, p, d):
    threshold = gamma - d * (1 - (0 if math.isinf(p) else 1 / p))
    if threshold >= 0 and abs(threshold - round(threshold)) < 1e-9:
        return
    spec = PotentialSpec(gamma, p, d)
    if threshold < 0:
        assert spec.k1 == -1 and spec.correction_order == []
    else:
        assert spec.k1 == math.floor(threshold)
        assert len(spec.correction_order) == math.comb(d + spec.k1, d)


def test_potential_spec_cases():
    assert PotentialSpec(0.5, 1.0, 1).case == "III"
    assert PotentialSpec(1.5, 1.0, 1).case == "II"
    assert PotentialSpec(2.7, 4.0, 1).case == "I"
    assert PotentialSpec(0.25, 1.5, 1).case == "none"


# -- multipliers -----------------------------------------------------------------


def test_fractional_laplacian_order_two_is_second_derivative():
    out = fractional_laplacian(GAUSS, 2.0).values
    np.testing.assert_allclose(out, (1 - X**2) * np.exp(-0.5 * X**2), atol=1e-10)
    assert out[ORIGIN] == pytest.approx(1.0, abs=1e-10)


def test_fractional_laplacian_order_one_at_origin():
    value = fractional_laplacian(GAUSS, 1.0).values[ORIGIN].real
    closed = 2**0.5 * math.gamma(1.0) / math.sqrt(math.pi)
    assert value == pytest.approx(closed, rel=1e-9)
    assert value == pytest.approx(0.7978845608, rel=1e-9)


def test_operators_vanish_on_zero():
    assert np.all(fractional_laplacian(ZERO, 0.7).values == 0)
    assert np.all(riesz_potential_fourier(ZERO, 0.5).values == 0)
    assert np.all(riesz_potential_convolution(ZERO, 0.5).values == 0)
    assert np.all(adjoint_integrable_potential(ZERO, PotentialSpec(1.5, 1.0, 1)).field.values == 0)


def test_riesz_fourier_origin_value():
    value = riesz_potential_fourier(GAUSS, 0.5).values[ORIGIN].real
    closed = 2**0.25 * math.gamma(0.25) / SQRT_2PI
    assert value == pytest.approx(closed, rel=1e-8)
    assert value == pytest.approx(1.7200, abs=1e-4)


@pytest.mark.parametrize("gamma", [0.0, 1.0, 1.5])
def test_riesz_range(gamma):
    with pytest.raises(RangeError):
        riesz_potential_fourier(GAUSS, gamma)
    with pytest.raises(RangeError):
        riesz_potential_convolution(GAUSS, gamma)


def test_riesz_left_inverse_of_laplacian():
    back = riesz_potential_fourier(fractional_laplacian(GAUSS, 0.5), 0.5).values
    assert rel_sup(back, GAUSS.values) < 1e-10


def test_riesz_cross_path():
    grid = Grid(1, 20.0, 2048)
    f = TestFunction.gaussian().sample(grid)
    inner = np.abs(grid.nodes()) <= grid.L / 2
    a = riesz_potential_fourier(f, 0.5).values
    b = riesz_potential_convolution(f, 0.5).values
    assert rel_sup(b, a, inner) < 1e-2


def test_riesz_convolution_of_point_mass_is_kernel():
    out = riesz_potential_convolution(narrow_gaussian(0.0, 16.0), 0.5).values.real
    k = kernel_from_radial_symbol(0.5, 1)
    far = (np.abs(X) >= 2) & (np.abs(X) <= 8)
    np.testing.assert_allclose(out[far], k.evaluate(X[far]).real, rtol=2e-3)


def test_riesz_convolution_requires_decay():
    g = Grid(1, 3.0, 256)
    with pytest.raises(DecayError):
        riesz_potential_convolution(SampledField(g, np.exp(-0.5 * g.nodes() ** 2), "spatial"), 0.5)


def test_taylor_coeffs_gaussian():
    c = taylor_coeffs(GAUSS, 2)
    assert c[(0,)].real == pytest.approx(SQRT_2PI, rel=1e-12)
    assert abs(c[(1,)]) < 1e-12
    assert c[(2,)].real == pytest.approx(-SQRT_2PI, rel=1e-12)


@given(st.floats(-5, 5), st.floats(0.3, 2))
def test_taylor_coeffs_match_spectrum_derivatives(center, sigma):
    # shifted Gaussian: F(xi) = sqrt(2 pi) sigma exp(-i c xi - sigma^2 xi^2 / 2)
    f = SampledField(GRID, np.exp(-0.5 * ((X - center) / sigma) ** 2), "spatial")
    c = taylor_coeffs(f, 2)
    amp = SQRT_2PI * sigma
    assert c[(0,)] == pytest.approx(amp, rel=1e-10)
    assert c[(1,)] == pytest.approx(-1j * center * amp, rel=1e-9, abs=1e-9)
    assert c[(2,)] == pytest.approx(-(center**2 + sigma**2) * amp, rel=1e-9)


def test_generalized_riesz_reduces_to_known_operators():
    a = generalized_riesz(GAUSS, radial_symbol(0.5)).values
    np.testing.assert_allclose(a, riesz_potential_fourier(GAUSS, 0.5).values, atol=1e-14)
    b = generalized_riesz(GAUSS, radial_symbol(-0.5)).values
    np.testing.assert_allclose(b, fractional_laplacian(GAUSS, 0.5).values, atol=1e-14)


def test_generalized_riesz_growth_beyond_dimension():
    grid = Grid(1, 256.0, 2**15)
    out = generalized_riesz(TestFunction.gaussian().sample(grid), radial_symbol(1.5))
    assert fit_decay_slope(out, (10, 100), 0.5, 0.15).passed


# -- integrable potential ----------------------------------------------------------


def test_fourier_path_without_correction_is_plain_multiplier():
    spec = PotentialSpec(0.25, 1.5, 1)
    out = integrable_potential_fourier(GAUSS, spec).field.values
    np.testing.assert_allclose(out, riesz_potential_fourier(GAUSS, 0.25).values, atol=1e-14)


def test_fourier_path_on_moment_free_input_is_plain_multiplier():
    f = TestFunction.moment_cancelled(0).sample(GRID)
    spec = PotentialSpec(0.5, 1.0, 1)
    out = integrable_potential_fourier(f, spec).field.values
    plain, _ = apply_multiplier(f, radial_symbol(0.5))
    assert rel_sup(out, plain.values) < 1e-10


@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from([0.5, 1.5]))
def test_integrable_potential_is_linear(alpha, beta, gamma):
    spec = PotentialSpec(gamma, 1.0, 1)
    other = SampledField(GRID, np.exp(-((X - 1.0) ** 2)), "spatial")
    combo = GAUSS.with_values(alpha * GAUSS.values + beta * other.values)
    for run in (integrable_potential_fourier, integrable_potential_spatial):
        lhs = run(combo, spec).field.values
        rhs = alpha * run(GAUSS, spec).field.values + beta * run(other, spec).field.values
        ok = np.isfinite(lhs) & np.isfinite(rhs)
        assert np.max(np.abs(lhs[ok] - rhs[ok])) <= 1e-9 * (1 + np.max(np.abs(rhs[ok])))


def test_spatial_path_approximates_pointwise_kernel():
    spec = PotentialSpec(0.5, 1.0, 1)
    out = integrable_potential_spatial(narrow_gaussian(1.0, 16.0), spec).field.values.real
    node = int(np.argmin(np.abs(X - 2.0)))
    assert out[node] == pytest.approx(0.1168, rel=1e-2)
    assert h_kernel(1.0, 0.5, 1).evaluate(2.0) == pytest.approx(0.1168, abs=1e-4)


def test_spatial_path_on_centred_point_mass_shrinks():
    spec = PotentialSpec(0.5, 1.0, 1)
    norms = []
    for scale in (2.0, 4.0, 8.0):
        out = integrable_potential_spatial(narrow_gaussian(0.0, scale), spec).field.values
        norms.append(np.nansum(np.abs(out)) * GRID.h)
    assert norms[0] > norms[1] > norms[2]


@pytest.mark.parametrize("gamma", [0.5, 1.5, 2.5])
def test_left_inverse_fourier_path(gamma):
    spec = PotentialSpec(gamma, 1.0, 1)
    back = integrable_potential_fourier(fractional_laplacian(GAUSS, gamma), spec).field.values
    assert rel_sup(back, GAUSS.values) <= 1e-2


def test_spatial_origin_flag_for_singular_case():
    res = integrable_potential_spatial(GAUSS, PotentialSpec(0.5, 1.0, 1))
    assert res.flagged_nodes == [GRID.origin_index]
    assert np.isnan(res.field.values[ORIGIN])
    assert np.isfinite(res.evaluate(0.3))


def test_spatial_evaluate_reproduces_nodes():
    res = integrable_potential_spatial(GAUSS, PotentialSpec(1.5, 1.0, 1))
    nodes = X[ORIGIN + 5 : ORIGIN + 40]
    np.testing.assert_allclose(res.evaluate(nodes), res.field.values[ORIGIN + 5 : ORIGIN + 40], atol=1e-12)
    np.testing.assert_allclose(res.evaluate(nodes, order=3), res.evaluate(nodes), atol=1e-12)


@pytest.mark.parametrize("gamma", [0.5, 1.5])
def test_spatial_and_fourier_paths_agree(gamma):
    spec = PotentialSpec(gamma, 1.0, 1)
    sp = integrable_potential_spatial(GAUSS, spec).field.values
    fo = integrable_potential_fourier(GAUSS, spec)
    away = (np.abs(X) >= 4 * GRID.h) & INNER
    assert np.max(np.abs(sp[away] - fo.field.values[away])) <= fo.diagnostics["tail_sup"]


@pytest.mark.parametrize("gamma", [0.5, 1.5])
def test_adjoint_duality(gamma):
    spec = PotentialSpec(gamma, 1.0, 1)
    other = SampledField(GRID, np.exp(-((X - 1.0) ** 2)), "spatial")
    lhs = integrable_potential_spatial(GAUSS, spec).pair(other)
    rhs = integrable_potential_spatial(other, spec)
    adj = adjoint_integrable_potential(other, spec).field.values
    dual = np.sum(GAUSS.values * adj) * GRID.h
    assert abs(lhs - dual) / abs(lhs) <= 1e-3
    assert rhs is not None


def test_adjoint_without_correction_is_plain_multiplier():
    spec = PotentialSpec(0.25, 1.5, 1)
    out = adjoint_integrable_potential(GAUSS, spec).field.values
    np.testing.assert_allclose(out, riesz_potential_fourier(GAUSS, 0.25).values, atol=1e-14)


# -- pointwise kernel --------------------------------------------------------------


def test_h_kernel_at_zero_vanishes():
    k = h_kernel(0.0, 0.5, 1)
    assert k.is_zero
    assert np.all(k.evaluate(np.array([-2.0, 0.5, 3.0])) == 0)


def test_h_kernel_singular_points():
    k = h_kernel(1.0, 0.5, 1)
    with pytest.raises(SingularPoint):
        k.evaluate(1.0)
    with pytest.raises(SingularPoint):
        k.evaluate(0.0)
    assert np.isnan(k.evaluate(np.array([0.0, 2.0]), strict=False)[0])


def test_h_kernel_rejects_integer_order():
    with pytest.raises(SpecError):
        h_kernel(1.0, 1.0, 1)


@given(
    st.sampled_from([0.3, 0.5, 0.8, 1.3, 1.5, 1.7]),
    st.floats(0.3, 3.0) | st.floats(-3.0, -0.3),
    st.floats(-6.0, 6.0).filter(lambda x: abs(x) > 0.05),
    st.floats(0.25, 4.0),
)
def test_h_kernel_pair_homogeneity(gamma, y0, x, t):
    if abs(x - y0) < 0.05:
        return
    k = h_kernel(y0, gamma, 1)
    kt = h_kernel(t * y0, gamma, 1)
    lhs = float(kt.evaluate(t * x))
    rhs = t ** (gamma - 1) * float(k.evaluate(x))
    assert lhs == pytest.approx(rhs, rel=1e-7, abs=1e-12)


def test_h_kernel_matches_spatial_path_for_order_one_correction():
    # the bump of width 1/N smooths H by O(N^-2): errors shrink fourfold per doubling
    spec = PotentialSpec(1.5, 1.0, 1)
    k = h_kernel(1.0, 1.5, 1)
    sel = (np.abs(X) >= 1.0) & (np.abs(X - 1) >= 1.0) & (np.abs(X) <= 10)
    exact = k.evaluate(X[sel])
    errors = []
    for scale in (16.0, 32.0):
        out = integrable_potential_spatial(narrow_gaussian(1.0, scale), spec).field.values.real
        errors.append(np.max(np.abs(out[sel] / exact - 1)))
    assert errors[1] < 3e-3
    assert 3.5 < errors[0] / errors[1] < 4.5
