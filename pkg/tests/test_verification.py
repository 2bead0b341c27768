import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlab.errors import EmptyWindow, GridIncompatible, HypothesisError, RangeError
from rieszlab.numerics import Grid, SampledField, continuous_ft
from rieszlab.operators import riesz_potential_fourier
from rieszlab.verification import (
    SUITES,
    CheckReport,
    TestFunction,
    check_composition,
    check_cross_path,
    check_derivative_commutation,
    check_dilation_invariance,
    check_fourier_bound,
    check_left_inverse,
    check_riesz_cross_path,
    check_translation_behavior,
    cutoff,
    default_suite,
    fit_decay_slope,
    integrability_scan,
)

GRID = Grid(1, 20.0, 4096)
SMALL = Grid(1, 20.0, 2048)
GAUSS = TestFunction.gaussian()


# -- reports -------------------------------------------------------------------


@given(
    st.floats(allow_nan=True, allow_infinity=True),
    st.floats(-10, 10),
    st.floats(0, 10),
    st.sampled_from(["residual", "target", "exceeds", "below"]),
)
def test_passed_is_pure_function_of_fields(metric, target, tol, mode):
    r = CheckReport("x", metric, target, tol, mode)
    if not math.isfinite(metric):
        expected = False
    elif mode == "residual":
        expected = metric <= tol
    elif mode == "target":
        expected = abs(metric - target) <= tol
    elif mode == "exceeds":
        expected = metric >= tol
    else:
        expected = metric < tol
    assert r.passed == expected
    assert CheckReport("x", metric, target, tol, mode).passed == r.passed


def test_report_json_line():
    r = CheckReport("x", np.float64(0.5), 0.0, 1.0, "residual", {"a": np.arange(3), "p": math.inf})
    line = r.to_json()
    assert "\n" not in line
    data = json.loads(line)
    assert data["passed"] is True and data["metadata"]["a"] == [0, 1, 2]


def test_report_rejects_unknown_mode():
    with pytest.raises(ValueError):
        CheckReport("x", 0.0, 0.0, 1.0, "sometimes")


# -- cutoff and test functions ------------------------------------------------------


@given(st.floats(0, 5))
def test_cutoff_range_and_plateaus(r):
    v = float(cutoff(r))
    assert 0.0 <= v <= 1.0
    if r <= 1:
        assert v == 1.0
    if r >= 2:
        assert v == 0.0


def test_cutoff_is_monotone():
    r = np.linspace(0, 3, 3001)
    assert np.all(np.diff(cutoff(r)) <= 0)


def test_test_function_sampling_matches_evaluate():
    f = TestFunction.shifted_gaussian(center=1.0, sigma=0.7)
    s = f.sample(SMALL)
    np.testing.assert_allclose(s.values, f.evaluate(SMALL.points()), atol=1e-15)


def test_moment_cancelled_has_vanishing_moments():
    s = TestFunction.moment_cancelled(2).sample(GRID)
    x = GRID.nodes()
    for k in range(3):
        assert abs(np.sum(x**k * s.values) * GRID.h) < 1e-10


def test_bump_psi_spectrum_is_cutoff():
    s = TestFunction.bump_psi((0,)).sample(GRID)
    xi = GRID.frequencies()
    np.testing.assert_allclose(continuous_ft(s).values, cutoff(np.abs(xi)), atol=1e-10)


def test_compact_bump_support():
    f = TestFunction.compact_bump(radius=1.5)
    x = np.array([[-1.6], [-1.5], [0.0], [1.49], [3.0]])
    v = f.evaluate(x)
    assert v[0] == 0 and v[1] == 0 and v[4] == 0 and v[2] > 0 and v[3] > 0


# -- checks --------------------------------------------------------------------


@pytest.mark.parametrize("gamma", [0.5, 1.5, 2.5])
def test_left_inverse(gamma):
    r = check_left_inverse(gamma, 1.0, 1, GAUSS, GRID)
    assert r.passed and r.metric <= 1e-2


def test_dilation_checks():
    assert check_dilation_invariance("riesz", 1.0, GAUSS, GRID, 0.5).metric == 0.0
    r = check_dilation_invariance("riesz", 2.0, GAUSS, GRID, 0.5)
    assert r.passed and r.metric <= 1e-3
    r = check_dilation_invariance("integrable", 2.0, GAUSS, GRID, 1.5, 1.0)
    assert r.passed and r.metric <= 1e-2


def test_dilation_rejects_non_power_of_two():
    with pytest.raises(GridIncompatible):
        check_dilation_invariance("riesz", 3.0, GAUSS, GRID, 0.5)


def test_translation_checks():
    grid = Grid(1, 16.0, 2048)
    assert check_translation_behavior("riesz", 0.0, GAUSS, grid, 0.5).metric == 0.0
    r = check_translation_behavior("riesz", 1.0, GAUSS, grid, 0.5)
    assert r.passed and r.metric <= 1e-3
    r = check_translation_behavior("integrable", 1.0, GAUSS, grid, 1.5, 1.0)
    assert r.passed and r.metric >= 0.05


def test_translation_rejects_off_grid_shift():
    with pytest.raises(GridIncompatible):
        check_translation_behavior("riesz", 0.3 * GRID.h, GAUSS, GRID, 0.5)


def test_decay_slope_on_exact_power():
    x = GRID.nodes()
    values = np.abs(np.where(x != 0, x, 1.0)) ** -1.25
    r = fit_decay_slope(values, (1.0, 10.0), -1.25, 1e-9, grid=GRID)
    assert r.metric == pytest.approx(-1.25, abs=1e-12)


def test_decay_slope_errors():
    with pytest.raises(EmptyWindow):
        fit_decay_slope(np.ones(GRID.n), (3.0, 3.0 + 1e-6), grid=GRID)
    with pytest.raises(RangeError):
        fit_decay_slope(np.ones(GRID.n), (1.0, 15.0), grid=GRID)


def test_riesz_tail_slope():
    grid = Grid(1, 256.0, 2**15)
    out = riesz_potential_fourier(GAUSS.sample(grid), 0.5)
    r = fit_decay_slope(out, (10, 100), -0.5, 0.1)
    assert r.passed


def test_integrability_scan_errors():
    grid = Grid(1, 256.0, 2**12)
    psi = TestFunction.bump_psi((0,))
    with pytest.raises(RangeError):
        integrability_scan(0.5, 4.0, 1, psi, (8, 16), grid)
    with pytest.raises(RangeError):
        integrability_scan(1.5, math.inf, 1, psi, (8, 16, 128), grid)


def test_composition_checks():
    assert check_composition(0.2, 0.3, 1, GAUSS, SMALL).passed
    assert check_composition(0.0, 0.3, 1, GAUSS, SMALL).metric < 1e-14
    assert check_composition(1.5, -2.0, 1, GAUSS, SMALL, p=1.0).passed
    with pytest.raises(HypothesisError):
        check_composition(0.3, 0.9, 1, GAUSS, SMALL)
    with pytest.raises(HypothesisError):
        check_composition(1.5, -0.5, 1, GAUSS, SMALL, p=1.0)


def test_other_checks():
    assert check_derivative_commutation(0.5, GAUSS, SMALL).passed
    assert check_riesz_cross_path(0.5, GAUSS, SMALL).passed
    assert check_cross_path(1.5, 1.0, GAUSS, SMALL).passed
    grids = [Grid(1, 20.0, n) for n in (1024, 2048, 4096)]
    assert check_fourier_bound(1.5, 1.0, GAUSS, grids).passed


def test_default_suite_selection_errors():
    with pytest.raises(ValueError):
        default_suite([])
    with pytest.raises(ValueError):
        default_suite(["nonsense"])


def test_default_suite_passes():
    reports = default_suite(["all"])
    assert len(reports) >= len(SUITES)
    failing = [r.to_json() for r in reports if not r.passed]
    assert not failing
