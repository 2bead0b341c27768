"""Riesz-type operators on sampled fields.

Two evaluation routes are provided.

Fourier path
    The operator is a multiplier ``Omega(xi)`` (possibly after subtracting a
    Taylor polynomial of ``f^`` at the origin).  The inverse transform of
    ``Omega * F`` is approximated by the rectangle rule on the dual grid.  The
    integrand behaves like ``Omega(xi) phi(xi)`` near ``xi = 0`` with ``phi``
    smooth, so the rule over the nonzero nodes is corrected by the generalized
    Euler-Maclaurin (Navot) terms ``-Z(mu, r) dxi^(d+|mu|+r) * [jet of
    phi(xi) exp(i<x,xi>)]_mu``; see :func:`rieszlab.numerics.lattice_zeta`.  The
    corrections are polynomials in ``x``.  Every Fourier-path output carries a
    :class:`SpectralModel` so that later multipliers compose on the exact
    spectrum.

Spatial path
    Direct convolution with the closed-form kernels ``K_j``.  The singular cell
    of a kernel ``x^mu |x|^b`` gets the weight ``-Z(mu, b) h^(|mu|+b)``, which
    removes the leading singular-cell error.  Terms of the form ``K_j(x) * const``
    are kept analytically in :attr:`OperatorResult.singular`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate as sp_integrate
from scipy import ndimage, signal
from scipy.interpolate import RegularGridInterpolator

from .errors import RangeError, SingularPoint, SpecError
from .numerics import (
    Grid,
    MultiIndex,
    SampledField,
    continuous_ft,
    continuous_ift,
    gamma as gamma_fn,
    gauss_legendre,
    integrate,
    lattice_zeta,
    monomial_eval,
    multi_indices,
    require_edge_decay,
    spatial_moment,
)
from .symbols import (
    HomogeneousSymbol,
    RadialPolyKernel,
    kernel_derivative,
    kernel_from_radial_symbol,
    radial_symbol,
    symbol_product,
    weight_symbol,
)

__all__ = [
    "PotentialSpec",
    "OperatorResult",
    "SpectralModel",
    "HKernel",
    "fractional_laplacian",
    "riesz_potential_fourier",
    "riesz_potential_convolution",
    "taylor_coeffs",
    "integrable_potential_fourier",
    "integrable_potential_spatial",
    "adjoint_integrable_potential",
    "h_kernel",
    "generalized_riesz",
    "apply_multiplier",
    "singular_convolution",
    "kernel_integral",
    "correction_stencil",
]

# Highest order of the origin correction per dimension.  In two dimensions the
# lattice sums are only available in closed form up to total order two.
_CORRECTION_ORDER = {1: 4, 2: 2}
_H_DIRECT_RADIUS = 4.0
_GL_NODES = 64
_JUMP_CORRECTION_RADIUS = 4.0
SUPPORTED_DIMENSIONS = (1, 2)


def _is_integer(x: float, tol: float = 1e-12) -> bool:
    return abs(x - round(x)) <= tol


# ---------------------------------------------------------------------------
# Parameters and results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """Parameters of the p-integrable potential with radial symbol ``||xi||^-gamma``.

    Attributes
    ----------
    gamma : float
        Positive, non-integer order.
    p : float
        Integrability exponent in ``[1, inf]`` (``math.inf`` allowed).
    d : int
        Dimension, 1 or 2.
    """

    gamma: float
    p: float
    d: int

    def __post_init__(self) -> None:
        g, p, d = float(self.gamma), float(self.p), self.d
        if int(d) != d or d not in SUPPORTED_DIMENSIONS:
            raise SpecError(f"dimension must be one of {SUPPORTED_DIMENSIONS}, got {d}")
        if not g > 0 or not math.isfinite(g):
            raise SpecError(f"gamma must be positive and finite, got {g}")
        if _is_integer(g):
            raise SpecError(f"gamma must not be an integer, got {g:g}")
        if not p >= 1:
            raise SpecError(f"p must lie in [1, inf], got {p}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "d", int(d))
        t = self.threshold
        if t >= 0 and _is_integer(t):
            raise SpecError(f"gamma - d(1 - 1/p) = {t:g} must not be a nonnegative integer")

    @property
    def threshold(self) -> float:
        """``gamma - d (1 - 1/p)``."""
        inv_p = 0.0 if math.isinf(self.p) else 1.0 / self.p
        return self.gamma - self.d * (1.0 - inv_p)

    @property
    def k1(self) -> int:
        """Integer part of :attr:`threshold`; ``-1`` when no correction applies."""
        t = self.threshold
        return int(math.floor(t)) if t >= 0 else -1

    @property
    def correction_order(self) -> list[MultiIndex]:
        """Multi-indices of the subtracted Taylor terms."""
        return multi_indices(self.d, self.k1) if self.k1 >= 0 else []

    @property
    def symbol(self) -> HomogeneousSymbol:
        return radial_symbol(self.gamma, self.d)

    @property
    def case(self) -> str:
        """Spatial-kernel case: ``"none"`` (no correction), ``"I"``, ``"II"`` or ``"III"``."""
        k1 = self.k1
        if k1 < 0:
            return "none"
        if self.gamma > k1 + 1:
            return "I"
        if k1 >= 1:
            return "II"
        return "III"


@dataclass(frozen=True)
class SpectralModel:
    """Exact spectral description of a Fourier-path output.

    The transform equals ``spectrum`` at the nonzero dual nodes and behaves
    like ``factor(xi) * phi(xi)`` near ``xi = 0``, where ``jet`` holds the
    Taylor coefficients ``d^m phi(0) / m!``.
    """

    spectrum: np.ndarray
    factor: HomogeneousSymbol
    jet: Mapping[MultiIndex, complex]


@dataclass
class OperatorResult:
    """Output of an operator together with how it was computed.

    ``field`` holds values at the grid nodes; flagged nodes (kernel
    singularities) hold ``nan``.  For spatial-kernel results the field splits
    as ``regular + singular`` where ``singular`` is an exact kernel term; use
    :meth:`evaluate` for off-grid values.  ``cusp`` is the leading non-smooth
    kernel term contained in ``regular`` at the origin (one dimension), used
    by :meth:`pair` to integrate it exactly.
    """

    field: SampledField
    path_used: str
    diagnostics: dict[str, Any] = field(default_factory=dict)
    flagged_nodes: list[tuple[int, ...]] = field(default_factory=list)
    regular: SampledField | None = None
    singular: RadialPolyKernel | None = None
    cusp: RadialPolyKernel | None = None

    def evaluate(self, points: Any, order: int = 1) -> np.ndarray:
        """Values at arbitrary points (shape ``(..., d)``; scalars when ``d = 1``).

        The smooth part is interpolated multilinearly (``order=1``) or by
        cubic splines (``order=3``); the singular part is evaluated exactly.
        """
        g = self.field.grid
        pts = np.asarray(points, dtype=float)
        if g.d == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        base = self.regular if self.regular is not None else self.field
        if order == 1:
            out = _interpolate(base, pts)
        elif order == 3:
            out = _interp_field(base.values, g, pts)
        else:
            raise ValueError("interpolation order must be 1 or 3")
        if self.singular is not None and self.singular.terms:
            out = out + self.singular.evaluate_unchecked(pts)
        return out

    def pair(self, g: SampledField) -> complex:
        """``int (U f)(x) g(x) dx`` with the singular term integrated by the corrected rule."""
        grid = self.field.grid
        if self.regular is None:
            return complex(np.sum(self.field.values * g.values) * grid.h ** grid.d)
        h_d = grid.h ** grid.d
        total = np.sum(self.regular.values * g.values) * h_d
        if self.singular is not None and self.singular.terms:
            total += kernel_integral(self.singular, g)
        if self.cusp is not None and self.cusp.terms:
            # swap the plain rule for the corrected one on the cusp term
            plain = np.sum(self.cusp.evaluate_unchecked(grid.points()) * g.values) * h_d
            total += kernel_integral(self.cusp, g) - plain
        return complex(total)

    def diagnostics_json(self) -> str:
        """Sidecar ``{"path", "tail_sup", "flagged_nodes", ...}`` as JSON text."""
        payload = {
            "path": self.path_used,
            "tail_sup": self.diagnostics.get("tail_sup"),
            "flagged_nodes": [list(ix) for ix in self.flagged_nodes],
        }
        for k, v in self.diagnostics.items():
            if k not in payload:
                payload[k] = v
        return json.dumps(payload, indent=2, default=float)


def _interpolate(f: SampledField, pts: np.ndarray) -> np.ndarray:
    g = f.grid
    axes = [g.nodes()] * g.d
    flat = pts.reshape(-1, g.d)
    if g.d == 1:
        x = flat[:, 0]
        vals = np.interp(x, axes[0], f.values.real) + 1j * np.interp(x, axes[0], f.values.imag)
    else:
        interp = RegularGridInterpolator(axes, f.values, bounds_error=False, fill_value=None)
        vals = interp(flat)
    return vals.reshape(pts.shape[:-1])


# ---------------------------------------------------------------------------
# Taylor data
# ---------------------------------------------------------------------------


def taylor_coeffs(f: SampledField, max_order: int) -> dict[MultiIndex, complex]:
    """Derivatives ``d^i f^(0) = (-i)^|i| int x^i f(x) dx`` for ``|i| <= max_order``."""
    return {
        i: (-1j) ** i.order() * spatial_moment(f, i)
        for i in multi_indices(f.grid.d, max_order)
    }


def _jet_from_moments(f: SampledField, order: int) -> dict[MultiIndex, complex]:
    return {i: c / i.factorial() for i, c in taylor_coeffs(f, order).items()}


def _polynomial_coeffs(sym: HomogeneousSymbol) -> dict[MultiIndex, complex]:
    """Coefficients of a polynomial symbol ``(i xi)^a ||xi||^(2m)``."""
    d = sym.d
    m = int(round(sym.radial_exponent)) // 2
    coeffs: dict[MultiIndex, complex] = {MultiIndex.zero(d): 1.0}
    square = {MultiIndex(2 if k == a else 0 for k in range(d)): 1.0 for a in range(d)}
    for _ in range(m):
        coeffs = _jet_product(coeffs, square, None)
    return {k + sym.monomial: c * sym.phase for k, c in coeffs.items()}


def _jet_product(a, b, max_order):
    out: dict[MultiIndex, complex] = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            if max_order is not None and k.order() > max_order:
                continue
            out[k] = out.get(k, 0.0) + ca * cb
    return out


_CONSTANT_CACHE: dict[int, HomogeneousSymbol] = {}


def _constant(d: int) -> HomogeneousSymbol:
    if d not in _CONSTANT_CACHE:
        _CONSTANT_CACHE[d] = HomogeneousSymbol(0.0, MultiIndex.zero(d))
    return _CONSTANT_CACHE[d]


def _model_of(f: SampledField, jet_order: int) -> SpectralModel:
    """Spectral model of ``f``: attached one if present, else built from the samples."""
    g = f.grid
    if f.spectral is not None:
        model = f.spectral
    else:
        require_edge_decay(f)
        spec = continuous_ft(f).values.copy()
        spec[g.origin_index] = 0.0
        model = SpectralModel(spec, _constant(g.d), _jet_from_moments(f, jet_order))
    if model.factor.is_polynomial() and not model.factor.is_constant():
        # a polynomial factor is smooth: fold it into the jet
        jet = _jet_product(_polynomial_coeffs(model.factor), model.jet, jet_order)
        model = SpectralModel(model.spectrum, _constant(g.d), jet)
    return model


# ---------------------------------------------------------------------------
# Multiplier machinery
# ---------------------------------------------------------------------------


def _eval_on_dual(sym: HomogeneousSymbol, grid: Grid) -> np.ndarray:
    vals = sym.evaluate(grid.freq_points())
    vals[grid.origin_index] = 0.0
    return vals


def _taylor_poly_on_dual(coeffs: Mapping[MultiIndex, complex], grid: Grid) -> np.ndarray:
    pts = grid.freq_points()
    out = np.zeros(grid.shape, dtype=complex)
    for k, c in coeffs.items():
        out += c * monomial_eval(pts, k)
    return out


def _exp_jet_coeff(x_pts: np.ndarray, l: MultiIndex) -> np.ndarray:
    """Taylor coefficient of ``exp(i <x, xi>)`` at order ``l``: ``(i x)^l / l!``."""
    return (1j) ** l.order() * monomial_eval(x_pts, l) / l.factorial()


def _origin_correction(
    factor: HomogeneousSymbol,
    jet: Mapping[MultiIndex, complex],
    grid: Grid,
    order: int,
    keep: Callable[[MultiIndex], bool] | None = None,
    sign: float = 1.0,
) -> np.ndarray:
    """Polynomial in ``x`` that completes the rectangle rule at ``xi = 0``.

    Returns ``-(dxi/2pi)^d * sum_mu Z(a+mu, r) dxi^(|a|+|mu|+r) * phase * J_mu(x)``
    where ``J_mu`` is the order-``mu`` Taylor coefficient of
    ``phi(xi) exp(i<x, xi>)``; ``keep(l)`` filters the exponential orders used
    (the adjoint drops the subtracted ones).
    """
    d = grid.d
    x_pts = grid.points()
    dxi = grid.dxi
    total = np.zeros(grid.shape, dtype=complex)
    a, r = factor.monomial, factor.radial_exponent
    for mu in multi_indices(d, order):
        J = np.zeros(grid.shape, dtype=complex)
        nonzero = False
        for m, c in jet.items():
            if c == 0 or any(mi > ui for mi, ui in zip(m, mu)):
                continue
            l = mu - m
            if keep is not None and not keep(l):
                continue
            J += c * _exp_jet_coeff(x_pts, l)
            nonzero = True
        if not nonzero:
            continue
        z = lattice_zeta(a + mu, r)
        if not z:
            continue
        total -= z * dxi ** (a.order() + mu.order() + r) * J
    return sign * factor.phase * total * (dxi / (2.0 * math.pi)) ** d


def _tail_sup(spectrum: np.ndarray, grid: Grid) -> float:
    mask = grid.freq_radius() > grid.nyquist / 2.0
    return float(np.max(np.abs(spectrum[mask]))) if np.any(mask) else 0.0


def apply_multiplier(
    f: SampledField,
    omega: HomogeneousSymbol,
    subtract_order: int = -1,
) -> tuple[SampledField, dict[str, Any]]:
    """Fourier-path application of ``omega`` with optional Taylor subtraction.

    Computes the inverse transform of ``omega(xi) (F(xi) - T(xi))`` where ``T``
    is the Taylor polynomial of ``F`` at 0 of order ``subtract_order``
    (none when negative), including the origin correction.

    Returns
    -------
    field : SampledField
        Spatial output carrying its :class:`SpectralModel`.
    diagnostics : dict
        ``tail_sup`` (largest ``|spectrum|`` beyond half the Nyquist radius)
        and the correction order used.
    """
    g = f.grid
    if omega.d != g.d:
        raise ValueError("symbol and grid dimensions differ")
    corr_order = _CORRECTION_ORDER[g.d]
    jet_order = max(corr_order, subtract_order)
    model = _model_of(f, jet_order)
    spec = model.spectrum
    jet = dict(model.jet)
    if subtract_order >= 0:
        if model.factor.is_constant():
            taylor = {k: c for k, c in jet.items() if k.order() <= subtract_order}
            spec = spec - _taylor_poly_on_dual(taylor, g)
            spec[g.origin_index] = 0.0
            jet = {k: c for k, c in jet.items() if k.order() > subtract_order}
        elif model.factor.degree <= subtract_order:
            raise SpecError(
                "input spectrum is not smooth enough at the origin for the Taylor "
                f"correction of order {subtract_order} (factor degree {model.factor.degree:g})"
            )
        # otherwise the Taylor polynomial vanishes identically
    new_spec = _eval_on_dual(omega, g) * spec
    factor = symbol_product(omega, model.factor)
    values = continuous_ift(SampledField(g, new_spec, "frequency")).values
    values = values + _origin_correction(factor, jet, g, corr_order)
    out_model = SpectralModel(new_spec, factor, jet)
    diagnostics = {"tail_sup": _tail_sup(new_spec, g), "correction_order": corr_order}
    return SampledField(g, values, "spatial", spectral=out_model), diagnostics


def fractional_laplacian(f: SampledField, gamma: float) -> SampledField:
    """``(-Laplacian)^(gamma/2) f`` via the multiplier ``||xi||^gamma``.

    Raises
    ------
    DecayError
        If ``f`` carries no spectral model and does not decay at the box edge.
    """
    if not gamma > 0:
        raise RangeError(f"fractional Laplacian needs gamma > 0, got {gamma}")
    out, _ = apply_multiplier(f, radial_symbol(-gamma, f.grid.d))
    return out


def riesz_potential_fourier(f: SampledField, gamma: float) -> SampledField:
    """Riesz potential of order ``gamma in (0, d)`` via the multiplier ``||xi||^-gamma``."""
    d = f.grid.d
    if not 0 < gamma < d:
        raise RangeError(f"Riesz potential needs 0 < gamma < d = {d}, got {gamma}")
    out, _ = apply_multiplier(f, radial_symbol(gamma, d))
    return out


# ---------------------------------------------------------------------------
# Singular-kernel convolution
# ---------------------------------------------------------------------------


def _disc_cell_integral(mu: MultiIndex, beta: float, h: float, d: int) -> float:
    """Integral of ``x^mu |x|^beta`` over the ball with the volume of one cell."""
    if any(m % 2 for m in mu):
        return 0.0
    k = mu.order() + beta + d
    if d == 1:
        rho = h / 2.0
        return 2.0 * rho ** k / k
    rho = h / math.sqrt(math.pi)
    a, b = mu
    angular = 2.0 * gamma_fn((a + 1) / 2) * gamma_fn((b + 1) / 2) / gamma_fn((a + b + 2) / 2)
    return angular * rho ** k / k


def singular_cell_weight(kernel: RadialPolyKernel, h: float) -> complex:
    """Weight of the origin node for the rectangle rule with kernel ``kernel``.

    With the rule ``h^d [sum_{k != 0} K(kh) g(kh) + w g(0)]`` the weight
    ``w = -sum_t c_t Z(mu_t, b_t) h^(|mu_t| + b_t)`` cancels the leading
    singular-cell error; when the lattice sum is unavailable the cell integral
    over an equal-volume ball is used instead.
    """
    d = kernel.d
    w = 0.0 + 0.0j
    for c, mu, beta in kernel.terms:
        z = lattice_zeta(mu, beta)
        if z is None:
            w += c * _disc_cell_integral(mu, beta, h, d) / h ** d
        else:
            w -= c * z * h ** (mu.order() + beta)
    return w


def correction_stencil(kernel: RadialPolyKernel, h: float) -> dict[tuple[int, ...], complex]:
    """Node weights completing the rectangle rule for ``int K(x - y) g(y) dy``.

    Besides the origin weight of :func:`singular_cell_weight`, the first- and
    second-derivative terms of the generalized Euler-Maclaurin expansion are
    included with central differences of ``g``; the result maps kernel offsets
    (in nodes) to weights that add to the kernel samples.
    """
    d = kernel.d
    stencil: dict[tuple[int, ...], complex] = {(0,) * d: singular_cell_weight(kernel, h)}

    def add(offset: tuple[int, ...], value: complex) -> None:
        stencil[offset] = stencil.get(offset, 0.0) + value

    for axis in range(d):
        e = MultiIndex.unit(d, axis)
        first = 0.0 + 0.0j
        second = 0.0 + 0.0j
        for c, mu, beta in kernel.terms:
            z1 = lattice_zeta(mu + e, beta)
            z2 = lattice_zeta(mu + e + e, beta)
            if z1:
                first += c * z1 * h ** (mu.order() + 1 + beta)
            if z2:
                second -= c * z2 * h ** (mu.order() + 2 + beta) / 2.0
        plus = tuple(-1 if k == axis else 0 for k in range(d))  # samples g(x + h e)
        minus = tuple(1 if k == axis else 0 for k in range(d))  # samples g(x - h e)
        if first:
            add(plus, first / (2.0 * h))
            add(minus, -first / (2.0 * h))
        if second:
            add(plus, second / h ** 2)
            add(minus, second / h ** 2)
            add((0,) * d, -2.0 * second / h ** 2)
    return stencil


def _kernel_offsets(kernel: RadialPolyKernel, grid: Grid) -> np.ndarray:
    n, h, d = grid.n, grid.h, grid.d
    offs = h * np.arange(-(n - 1), n)
    pts = np.stack(np.meshgrid(*([offs] * d), indexing="ij"), axis=-1)
    centre = (n - 1,) * d
    pts[centre] = 1.0  # placeholder, replaced by the stencil weight below
    vals = kernel.evaluate_unchecked(pts)
    vals[centre] = 0.0
    for offset, w in correction_stencil(kernel, h).items():
        vals[tuple(n - 1 + o for o in offset)] += w
    return vals


def kernel_integral(kernel: RadialPolyKernel, g: SampledField) -> complex:
    """``int K(x) g(x) dx`` over the box with the singular-cell stencil at the origin."""
    grid = g.grid
    pts = grid.points()
    o = grid.origin_index
    with np.errstate(divide="ignore", invalid="ignore"):
        kv = kernel.evaluate_unchecked(pts)
    kv[o] = 0.0
    total = np.sum(kv * g.values)
    for offset, w in correction_stencil(kernel, grid.h).items():
        total += w * g.values[tuple(oi + di for oi, di in zip(o, offset))]
    return complex(total * grid.h ** grid.d)


def singular_convolution(kernel: RadialPolyKernel, g: SampledField) -> np.ndarray:
    """``int K(x - y) g(y) dy`` at every grid node, singular cell corrected."""
    grid = g.grid
    n = grid.n
    karr = _kernel_offsets(kernel, grid)
    full = signal.fftconvolve(g.values, karr, mode="full")
    sl = tuple(slice(n - 1, 2 * n - 1) for _ in range(grid.d))
    return full[sl] * grid.h ** grid.d


def riesz_potential_convolution(f: SampledField, gamma: float) -> SampledField:
    """Riesz potential of order ``gamma in (0, d)`` by direct kernel quadrature."""
    d = f.grid.d
    if not 0 < gamma < d:
        raise RangeError(f"Riesz potential needs 0 < gamma < d = {d}, got {gamma}")
    require_edge_decay(f)
    kernel = kernel_from_radial_symbol(gamma, d)
    return SampledField(f.grid, singular_convolution(kernel, f), "spatial")


# ---------------------------------------------------------------------------
# The p-integrable potential
# ---------------------------------------------------------------------------


def integrable_potential_fourier(f: SampledField, spec: PotentialSpec) -> OperatorResult:
    """Fourier path: multiplier ``||xi||^-gamma`` applied to ``F - T_k1 F``.

    Diagnostics record ``tail_sup``, the largest magnitude of the corrected
    spectrum beyond half the Nyquist radius; for ``p = 1`` the spectrum decays
    only like ``||xi||^(k1-gamma)``, so this bounds the truncation error.
    """
    if f.grid.d != spec.d:
        raise SpecError("grid dimension does not match the potential")
    out, diag = apply_multiplier(f, spec.symbol, spec.k1)
    diag.update({"k1": spec.k1, "gamma": spec.gamma, "p": spec.p})
    return OperatorResult(out, "fourier", diag)


def _interp_field(values: np.ndarray, grid: Grid, pts: np.ndarray) -> np.ndarray:
    """Cubic-spline values of a decayed grid field at ``pts`` (zero outside)."""
    coords = [(pts[..., a] + grid.L) / grid.h for a in range(grid.d)]
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for part, unit in ((values.real, 1.0), (values.imag, 1j)):
        if np.any(part):
            out = out + unit * ndimage.map_coordinates(part, coords, order=3, mode="constant", cval=0.0)
    return out


def _radial_weight_fields(f: SampledField, weight_power: int, js: Sequence[MultiIndex]) -> dict[MultiIndex, np.ndarray]:
    """Grid values of ``g_j(y) = m int_0^1 (1-t)^(m-1) (-y/t)^j f(y/t) t^-d dt``.

    ``m = weight_power``.  The t-integral runs over ``[|y|_inf / L, 1]`` (``f``
    vanishes outside the box) in the variable ``log t`` with Gauss-Legendre
    nodes.  At ``y = 0`` the node carries the mean of ``g_j`` over the
    equal-volume cell, obtained from the exact cell integral of the
    ``|y|^(1-d)``-type limit profile.
    """
    g = f.grid
    d, m = g.d, weight_power
    if d == 1:
        return _radial_weight_fields_1d(f, m, js)
    y = g.points()
    ymax = np.max(np.abs(y), axis=-1)
    origin = ymax == 0
    ymax_safe = np.where(origin, 1.0, ymax)
    log_tmin = np.log(np.minimum(ymax_safe / g.L, 1.0))
    s, w = gauss_legendre(_GL_NODES, 0.0, 1.0)
    out = {j: np.zeros(g.shape, dtype=complex) for j in js}
    for sk, wk in zip(s, w):
        sigma = log_tmin * (1.0 - sk)  # runs from log t_min to 0
        t = np.exp(sigma)
        u = y / t[..., None]
        fu = _interp_field(f.values, g, u)
        base = wk * (-log_tmin) * t * m * (1.0 - t) ** (m - 1) * fu * t ** (-d)
        for j in js:
            out[j] += base * monomial_eval(-u, j)
    # origin node: cell mean of g_j
    pts = g.points()
    rad = np.sqrt(np.sum(pts * pts, axis=-1))
    safe = np.where(rad > 0, rad, 1.0)
    rho = g.h / 2.0 if d == 1 else g.h / math.sqrt(math.pi)
    for j in js:
        integrand = np.where(rad > 0, monomial_eval(-pts, j) * f.values / safe, 0.0)
        q = np.sum(integrand) * g.h ** d
        out[j][g.origin_index] = rho * m * q / g.h ** d
    return out


def _radial_weight_fields_1d(f: SampledField, m: int, js: Sequence[MultiIndex]) -> dict[MultiIndex, np.ndarray]:
    """One-dimensional ``g_j`` through tail moments.

    Substituting ``u = y/t`` gives ``g_j(y) = m int (1 - y/u)^(m-1) (-u)^j f(u) / |u| du``
    over ``u`` beyond ``y`` on the same side of the origin.  Expanding the
    binomial leaves tail integrals of ``sign(u) u^q f(u)`` with ``q >= 0``,
    which are accumulated with the cumulative Simpson rule.
    """
    g = f.grid
    u = g.nodes()
    o = g.origin_index[0]
    vals = f.values
    sgn = np.sign(u)
    out = {}
    for j in js:
        jj = j[0]
        total = np.zeros(g.n, dtype=complex)
        for l in range(m):
            q = jj - l - 1
            w = sgn * u ** q * vals
            tails = np.zeros(g.n, dtype=complex)
            # right side: int_y^L, accumulated from the right end
            right = w[o:][::-1]
            acc = sp_integrate.cumulative_simpson(right.real, dx=g.h, initial=0.0) + 1j * sp_integrate.cumulative_simpson(
                right.imag, dx=g.h, initial=0.0
            )
            tails[o:] = acc[::-1]
            # left side: int_{-L}^y
            left = w[: o + 1]
            acc = sp_integrate.cumulative_simpson(left.real, dx=g.h, initial=0.0) + 1j * sp_integrate.cumulative_simpson(
                left.imag, dx=g.h, initial=0.0
            )
            tails[: o + 1] = acc
            total += math.comb(m - 1, l) * (-u) ** l * (-1) ** jj * tails
        out[j] = m * total
        # origin node: average of the one-sided limits
        out[j][o] = 0.5 * m * (-1) ** jj * np.sum(sgn * u ** (jj - 1) * vals) * g.h
    return out


def _one_sided_limits(values: np.ndarray, grid: Grid, side: int, points: int = 6) -> tuple[complex, complex]:
    """Value and slope at ``0`` of a field smooth on one side, by polynomial extrapolation."""
    o = grid.origin_index[0]
    k = np.arange(1, points + 1)
    idx = o + side * k
    xs = side * k * grid.h
    coef_re = np.polyfit(xs, values[idx].real, points - 1)
    coef_im = np.polyfit(xs, values[idx].imag, points - 1)
    val = coef_re[-1] + 1j * coef_im[-1]
    slope = coef_re[-2] + 1j * coef_im[-2]
    return val, slope


def _jump_correction(kernel: RadialPolyKernel, gvals: np.ndarray, grid: Grid) -> np.ndarray:
    """Trapezoid-rule correction for a weight with a jump and a kink at ``y = 0`` (1-D).

    For ``F(y) = K(x-y) g(y)`` the rule with the averaged node value misses
    ``(h^2/12) [F'](0) = (h^2/12) (K(x) [g'] - K'(x) [g])``.
    """
    v_plus, s_plus = _one_sided_limits(gvals, grid, +1)
    v_minus, s_minus = _one_sided_limits(gvals, grid, -1)
    jump, kink = v_plus - v_minus, s_plus - s_minus
    x = grid.points()
    with np.errstate(divide="ignore", invalid="ignore"):
        corr = kink * kernel.evaluate_unchecked(x) - jump * kernel_derivative(kernel, (1,)).evaluate_unchecked(x)
    # the expansion needs the kernel to be smooth across the cell at y = 0
    corr[grid.radius() < _JUMP_CORRECTION_RADIUS * grid.h] = 0.0
    return grid.h ** 2 / 12.0 * corr


_LOCAL_WINDOW_NODES = 16
_LOCAL_FIT_DEGREE = 7


def _near_origin_convolution(kernel: RadialPolyKernel, gvals: np.ndarray, grid: Grid) -> dict[int, complex]:
    """``int K(x - y) g(y) dy`` at the 1-D nodes ``|x| < 4h`` for a weight smooth on each side of 0.

    There the kernel singularity lies within a few cells of the jump of ``g``
    and no ``h``-scaled stencil converges.  Over ``|y| <= S = 16h`` each side
    of ``g`` is replaced by a least-squares polynomial and integrated against
    the kernel by tanh-sinh quadrature; beyond ``S`` the trapezoid rule with
    its first endpoint correction is used.
    """
    o = grid.origin_index[0]
    h = grid.h
    cut = _LOCAL_WINDOW_NODES
    S = cut * h
    k = np.arange(1, cut + 5)
    fits = {}
    for side in (+1, -1):
        vals = gvals[o + side * k]
        fits[side] = np.polyfit(k * h, vals.real, _LOCAL_FIT_DEGREE) + 1j * np.polyfit(
            k * h, vals.imag, _LOCAL_FIT_DEGREE
        )
    dkernel = kernel_derivative(kernel, (1,))
    y = grid.nodes()
    offsets = np.arange(grid.n) - o
    far = np.abs(offsets) >= cut
    weights = np.where(np.abs(offsets) == cut, 0.5 * h, h)[far]

    def kern(u: float) -> complex:
        return complex(sum(c * u ** m[0] * abs(u) ** b for c, m, b in kernel.terms))

    radius = int(_JUMP_CORRECTION_RADIUS)
    out: dict[int, complex] = {}
    for m in range(-radius + 1, radius):
        x = m * h
        with np.errstate(divide="ignore", invalid="ignore"):
            kv = kernel.evaluate_unchecked(x - y[far])
        total = complex(np.sum(weights * kv * gvals[far]))
        for side in (+1, -1):
            coef = fits[side]
            ys = side * S
            g_end = gvals[o + side * cut]
            dg_end = side * np.polyval(np.polyder(coef), S)
            slope = complex(
                -dkernel.evaluate_unchecked(x - ys) * g_end + kernel.evaluate_unchecked(x - ys) * dg_end
            )
            # trapezoid error on the outer piece starting at y = side * S
            total += side * h ** 2 / 12.0 * slope
            breaks = [0.0, S]
            if 0 < side * x < S:
                breaks = [0.0, side * x, S]
            poly = [complex(c) for c in coef]
            re = mpmath.quad(lambda s: mpmath.re(kern(x - side * s) * mpmath.polyval(poly, s)), breaks)
            im = mpmath.quad(lambda s: mpmath.im(kern(x - side * s) * mpmath.polyval(poly, s)), breaks)
            total += complex(re) + 1j * complex(im)
        out[o + m] = total
    return out


def integrable_potential_spatial(f: SampledField, spec: PotentialSpec) -> OperatorResult:
    """Spatial-kernel path for the p-integrable potential with radial symbol.

    Case III (``k1 = 0``, ``gamma < 1``): ``U f = K * f - K(x) int f``.
    Case II (``k1 >= 1``, ``gamma < k1 + 1``):
    ``U f = sum_{|j|=k1} (K_j * g_j - K_j(x) int g_j) / j!``.
    Case I (``gamma > k1 + 1``): ``U f = sum_{|j|=k1+1} (K_j * g_j) / j!``.
    Without correction (``gamma < d(1 - 1/p)``) this is ``K * f``.

    The origin node is flagged (``nan``) whenever the exact singular term is
    unbounded there.
    """
    g = f.grid
    if g.d != spec.d:
        raise SpecError("grid dimension does not match the potential")
    require_edge_decay(f)
    k0 = kernel_from_radial_symbol(spec.gamma, spec.d)
    case = spec.case
    regular = np.zeros(g.shape, dtype=complex)
    singular = RadialPolyKernel((), g.d)
    cusp = RadialPolyKernel((), g.d)
    if case in ("none", "III"):
        regular += singular_convolution(k0, f)
        if case == "III":
            singular = k0.scaled(-integrate(f))
    else:
        order = spec.k1 + (1 if case == "I" else 0)
        js = [j for j in multi_indices(g.d, order) if j.order() == order]
        gfields = _radial_weight_fields(f, order, js)
        for j in js:
            kj = kernel_derivative(k0, j)
            conv = singular_convolution(kj, SampledField(g, gfields[j]))
            regular += conv / j.factorial()
            if g.d == 1:
                # g_j jumps by m (-1)^j int u^(j-1) f at 0, adding jump * K_(j-1)
                lower = kernel_derivative(k0, (j[0] - 1,))
                jump = order * (-1) ** j.order() * spatial_moment(f, (j[0] - 1,))
                cusp = cusp + lower.scaled(jump / j.factorial())
                regular += _jump_correction(kj, gfields[j], g) / j.factorial()
                for node, value in _near_origin_convolution(kj, gfields[j], g).items():
                    regular[node] += (value - conv[node]) / j.factorial()
            if case == "II":
                total = (-1) ** j.order() * spatial_moment(f, j)
                singular = singular + kj.scaled(-total / j.factorial())
    values = regular.copy()
    flagged: list[tuple[int, ...]] = []
    if singular.terms:
        pts = g.points()
        with np.errstate(divide="ignore", invalid="ignore"):
            sing_vals = singular.evaluate_unchecked(pts)
        if singular.degree < 0:
            flagged.append(g.origin_index)
        sing_vals[g.origin_index] = np.nan if singular.degree < 0 else 0.0
        values = values + sing_vals
    diag = {"case": case, "k1": spec.k1, "gamma": spec.gamma, "p": spec.p, "tail_sup": None}
    return OperatorResult(
        SampledField(g, values, "spatial"),
        "spatial_kernel",
        diag,
        flagged,
        regular=SampledField(g, regular, "spatial"),
        singular=singular,
        cusp=cusp,
    )


def adjoint_integrable_potential(f: SampledField, spec: PotentialSpec) -> OperatorResult:
    """Adjoint of the p-integrable potential, computed on the dual grid.

    ``U* f(x) = (2 pi)^-d int (exp(i<x,xi>) - sum_{|i|<=k1} (i x)^i xi^i / i!)
    Omega(-xi) f^(xi) dxi`` with the same origin completion as the forward path.
    """
    g = f.grid
    if g.d != spec.d:
        raise SpecError("grid dimension does not match the potential")
    corr_order = _CORRECTION_ORDER[g.d]
    k1 = spec.k1
    model = _model_of(f, max(corr_order, k1))
    if not model.factor.is_constant():
        raise SpecError("the adjoint path needs an input with a smooth transform")
    omega = spec.symbol
    # Omega(-xi) = (-1)^|a| Omega(xi)
    sign = (-1.0) ** omega.monomial.order()
    weights = sign * _eval_on_dual(omega, g) * model.spectrum
    values = continuous_ift(SampledField(g, weights, "frequency")).values
    x_pts = g.points()
    xi_pts = g.freq_points()
    scale = (g.dxi / (2.0 * math.pi)) ** g.d
    for i in spec.correction_order:
        moment = np.sum(monomial_eval(xi_pts, i) * weights) * scale
        values = values - moment * _exp_jet_coeff(x_pts, i)
    values = values + _origin_correction(
        omega, model.jet, g, corr_order, keep=lambda l: l.order() > k1, sign=sign
    )
    diag = {"tail_sup": _tail_sup(weights, g), "k1": k1, "gamma": spec.gamma, "p": spec.p}
    return OperatorResult(SampledField(g, values, "spatial"), "fourier", diag)


# ---------------------------------------------------------------------------
# Pointwise kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HKernel:
    """Kernel ``H_y`` with ``U f(x) = int H_y(x) f(y) dy`` (p = 1).

    Its transform is ``(exp(-i<y, xi>) - sum_{|i|<=k1} (-i<y, xi>)^i / i!) ||xi||^-gamma``
    in multi-index form, with ``k1 = floor(gamma)``.
    """

    y0: tuple[float, ...]
    gamma: float
    d: int

    @property
    def k1(self) -> int:
        return int(math.floor(self.gamma))

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.y0)

    def singular_points(self) -> list[tuple[float, ...]]:
        pts = [(0.0,) * self.d]
        if self.k1 == 0 and not self.is_zero:
            pts.append(tuple(self.y0))
        return pts

    def fourier(self, xi: Any) -> np.ndarray:
        """Transform of ``H_y`` at ``xi`` (``nan`` at the origin)."""
        pts = np.asarray(xi, dtype=float)
        if self.d == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        s = -1j * np.sum(pts * np.asarray(self.y0), axis=-1)
        taylor = sum(s ** k / math.factorial(k) for k in range(self.k1 + 1))
        return (np.exp(s) - taylor) * radial_symbol(self.gamma, self.d).evaluate(pts)

    def evaluate(self, x: Any, strict: bool = True) -> np.ndarray:
        """Values at points ``x``.

        With ``strict`` a :class:`SingularPoint` is raised at singular points;
        otherwise those entries are ``nan``.
        """
        pts = np.asarray(x, dtype=float)
        if self.d == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
            pts = pts[..., None]
        y = np.asarray(self.y0, dtype=float)
        bad = np.zeros(pts.shape[:-1], dtype=bool)
        for sp in self.singular_points():
            bad |= np.all(pts == np.asarray(sp), axis=-1)
        if strict and np.any(bad):
            raise SingularPoint("H kernel evaluated at a singular point")
        if self.is_zero:
            out = np.zeros(pts.shape[:-1])
        else:
            safe = np.where(bad[..., None], 1.0, pts)
            out = self._evaluate(safe, y)
        return np.where(bad, np.nan, out)

    def __call__(self, x: Any) -> np.ndarray:
        return self.evaluate(x)

    def _evaluate(self, pts: np.ndarray, y: np.ndarray) -> np.ndarray:
        k0 = kernel_from_radial_symbol(self.gamma, self.d)
        k1 = self.k1
        if k1 == 0:
            return (k0.evaluate_unchecked(pts - y) - k0.evaluate_unchecked(pts)).real
        near = np.sqrt(np.sum(pts * pts, axis=-1)) < _H_DIRECT_RADIUS * np.sqrt(np.dot(y, y))
        out = self._integral_form(np.where(near[..., None], 2.0 * _H_DIRECT_RADIUS * y, pts), y)
        if np.any(near):
            out = np.where(near, self._taylor_remainder(pts, y), out)
        return out

    def _taylor_remainder(self, pts: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``K(x - y) - sum_{|j|<=k1} (-y)^j / j! d^j K(x)``, used where cancellation is mild."""
        k0 = kernel_from_radial_symbol(self.gamma, self.d)
        total = k0.evaluate_unchecked(pts - y).real
        for j in multi_indices(self.d, self.k1):
            coef = float(monomial_eval(-y, j)) / j.factorial()
            total = total - coef * kernel_derivative(k0, j).evaluate_unchecked(pts).real
        return total

    def _integral_form(self, pts: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Integral form of the Taylor remainder, for ``|x|`` well beyond ``|y|``.

        There ``x - t y`` stays away from the origin, the integrand is smooth
        in ``t`` and the subtraction inside it avoids the cancellation of the
        closed sum.
        """
        k0 = kernel_from_radial_symbol(self.gamma, self.d)
        k1 = self.k1
        t, w = gauss_legendre(_GL_NODES, 0.0, 1.0)
        weight = w * (1.0 - t) ** (k1 - 1)
        total = np.zeros(pts.shape[:-1])
        for j in multi_indices(self.d, k1):
            if j.order() != k1:
                continue
            kj = kernel_derivative(k0, j)
            kx = kj.evaluate_unchecked(pts).real
            coef = k1 / j.factorial() * float(monomial_eval(-y, j))
            acc = np.zeros(pts.shape[:-1])
            for tk, wk in zip(t, weight):
                acc += wk * (kj.evaluate_unchecked(pts - tk * y).real - kx)
            total += coef * acc
        return total


def h_kernel(y0: Any, gamma: float, d: int) -> HKernel:
    """Pointwise-evaluation kernel ``H_y0`` of the 1-integrable potential."""
    if _is_integer(gamma):
        raise SpecError(f"gamma must not be an integer, got {gamma:g}")
    y = tuple(float(v) for v in np.atleast_1d(np.asarray(y0, dtype=float)))
    if len(y) != d:
        raise ValueError("y0 dimension does not match d")
    return HKernel(y, float(gamma), int(d))


# ---------------------------------------------------------------------------
# Generalized Riesz potential
# ---------------------------------------------------------------------------


def generalized_riesz(f: SampledField, omega: HomogeneousSymbol) -> SampledField:
    """Generalized Riesz potential with homogeneous symbol ``omega`` of degree ``-gamma``.

    For ``gamma < d`` (including positive-degree symbols) this is the plain
    multiplier.  For ``gamma > d`` it uses the identity

        J f(x) = Gamma(d-gamma)/Gamma(d+k0-gamma) * sum_{|i|+|j|=k0} k0!/(i! j!)
                 (-x)^i J_{omega_(i+j)}(x^j f)(x),

    with ``k0`` the least integer above ``gamma - d``; each inner potential has
    order ``gamma - k0 < d``.  Inputs carrying a :class:`SpectralModel` (exact
    spectrum, possibly slow spatial decay) cannot be multiplied by ``x^j`` on
    the grid; for them the corrected multiplier is applied directly, since
    the origin completion evaluates the finite-part integral, which is the
    analytic continuation in ``gamma`` of the same operator.

    Raises
    ------
    RangeError
        If ``gamma - d`` is a nonnegative integer.
    """
    g = f.grid
    d = g.d
    gamma = -omega.degree
    if gamma < d:
        out, _ = apply_multiplier(f, omega)
        return out
    if _is_integer(gamma - d):
        raise RangeError(f"gamma - d = {gamma - d:g} is a nonnegative integer")
    if f.spectral is not None:
        out, _ = apply_multiplier(f, omega)
        return out
    require_edge_decay(f)
    k0 = int(math.floor(gamma - d)) + 1
    ratio = gamma_fn(d - gamma) / gamma_fn(d + k0 - gamma)
    x_pts = g.points()
    total = np.zeros(g.shape, dtype=complex)
    for i in multi_indices(d, k0):
        for j in multi_indices(d, k0 - i.order()):
            if i.order() + j.order() != k0:
                continue
            fj = SampledField(g, monomial_eval(x_pts, j) * f.values)
            inner, _ = apply_multiplier(fj, weight_symbol(omega, i + j))
            coef = math.factorial(k0) / (i.factorial() * j.factorial())
            total += coef * monomial_eval(-x_pts, i) * inner.values
    return SampledField(g, ratio * total, "spatial")
