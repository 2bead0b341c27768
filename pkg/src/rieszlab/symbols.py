"""Homogeneous Fourier symbols and their closed-form spatial kernels.

The symbols handled here are ``(i xi)^a ||xi||^r``: a monomial with its power
of ``i`` times a radial power.  The inverse Fourier transform of
``||xi||^-gamma`` is ``c(gamma, d) ||x||^(gamma-d)`` (continued analytically in
``gamma``), and multiplying the symbol by ``(i xi)^j`` differentiates the kernel,
so every kernel used by the library is a finite sum ``sum_t c_t x^m_t ||x||^b_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import PoleError, RangeError, SingularPoint, UnsupportedOrder
from .numerics import MultiIndex, gamma as gamma_fn, monomial_eval

__all__ = [
    "HomogeneousSymbol",
    "RadialPolyKernel",
    "radial_symbol",
    "weight_symbol",
    "symbol_product",
    "riesz_constant",
    "kernel_from_radial_symbol",
    "kernel_derivative",
    "kernel_eval",
    "kernel_for_symbol",
]

_MAX_DERIVATIVE = 4


def _as_points(x: Any, d: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if d == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.shape[-1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class HomogeneousSymbol:
    """The symbol ``(i xi)^monomial * ||xi||^radial_exponent``.

    Its degree of homogeneity is ``|monomial| + radial_exponent``.
    """

    radial_exponent: float
    monomial: MultiIndex

    def __post_init__(self) -> None:
        object.__setattr__(self, "radial_exponent", float(self.radial_exponent))
        object.__setattr__(self, "monomial", MultiIndex(self.monomial))

    @property
    def d(self) -> int:
        return len(self.monomial)

    @property
    def degree(self) -> float:
        return self.monomial.order() + self.radial_exponent

    @property
    def monomial_phase(self) -> int:
        """Power of ``i`` carried by the monomial factor (reduced mod 4)."""
        return self.monomial.order() % 4

    @property
    def phase(self) -> complex:
        return 1j ** self.monomial_phase

    def is_constant(self) -> bool:
        return self.monomial.order() == 0 and self.radial_exponent == 0.0

    def is_polynomial(self) -> bool:
        """True when the symbol is a polynomial in ``xi`` (smooth at the origin)."""
        r = self.radial_exponent
        return r >= 0 and r == math.floor(r) and int(r) % 2 == 0

    def evaluate(self, xi: Any) -> np.ndarray:
        """Values at ``xi`` (shape ``(..., d)``; scalars allowed when ``d = 1``).

        At ``xi = 0`` the value is 0 for positive degree, 1 for the constant
        symbol and ``nan`` otherwise.
        """
        pts = _as_points(xi, self.d)
        rad = np.sqrt(np.sum(pts * pts, axis=-1))
        mono = monomial_eval(pts, self.monomial)
        with np.errstate(divide="ignore", invalid="ignore"):
            radial = np.where(rad > 0, rad, 1.0) ** self.radial_exponent
        out = self.phase * np.asarray(mono, dtype=complex) * radial
        at0 = rad == 0
        if np.any(at0):
            if self.degree > 0:
                fill = 0.0
            elif self.is_constant():
                fill = 1.0
            else:
                fill = np.nan
            out = np.where(at0, fill, out)
        return out

    __call__ = evaluate


def radial_symbol(gamma: float, d: int = 1) -> HomogeneousSymbol:
    """The symbol ``||xi||^-gamma`` (degree ``-gamma``)."""
    return HomogeneousSymbol(-float(gamma), MultiIndex.zero(d))


def weight_symbol(omega: HomogeneousSymbol, j: Sequence[int]) -> HomogeneousSymbol:
    """``(i xi)^j * omega``; raises the degree by ``|j|``."""
    return HomogeneousSymbol(omega.radial_exponent, omega.monomial + MultiIndex(j))


def symbol_product(a: HomogeneousSymbol, b: HomogeneousSymbol) -> HomogeneousSymbol:
    """Pointwise product: radial exponents and monomials add."""
    if a.d != b.d:
        raise ValueError("symbols act in different dimensions")
    return HomogeneousSymbol(a.radial_exponent + b.radial_exponent, a.monomial + b.monomial)


def riesz_constant(gamma: float, d: int) -> float:
    """Constant ``c`` such that ``c ||x||^(gamma-d)`` has transform ``||xi||^-gamma``.

    ``c = pi^(-d/2) 2^(-gamma) Gamma((d-gamma)/2) / Gamma(gamma/2)``.

    Raises
    ------
    PoleError
        If ``gamma - d`` is a nonnegative even integer.
    RangeError
        If ``gamma <= 0``.
    """
    if not gamma > 0:
        raise RangeError(f"the Riesz constant needs gamma > 0, got {gamma}")
    return math.pi ** (-d / 2) * 2.0 ** (-gamma) * gamma_fn((d - gamma) / 2) / gamma_fn(gamma / 2)


def _merge_terms(terms: Iterable[tuple[complex, MultiIndex, float]]):
    acc: dict[tuple[MultiIndex, float], complex] = {}
    for coef, mono, beta in terms:
        key = (MultiIndex(mono), round(float(beta), 12))
        acc[key] = acc.get(key, 0.0) + complex(coef)
    scale = max((abs(c) for c in acc.values()), default=0.0)
    kept = [
        (c, m, b)
        for (m, b), c in sorted(acc.items(), key=lambda kv: (kv[0][1], tuple(kv[0][0])))
        if abs(c) > 1e-15 * scale
    ]
    return tuple(kept)


@dataclass(frozen=True)
class RadialPolyKernel:
    """Kernel ``sum_t c_t x^(m_t) ||x||^(b_t)``, homogeneous of a single degree."""

    terms: tuple[tuple[complex, MultiIndex, float], ...]
    d: int

    def __post_init__(self) -> None:
        terms = _merge_terms(self.terms)
        degrees = {round(m.order() + b, 9) for _, m, b in terms}
        if len(degrees) > 1:
            raise ValueError(f"kernel terms have mixed degrees {sorted(degrees)}")
        if any(len(m) != self.d for _, m, _ in terms):
            raise ValueError("term monomials do not match the kernel dimension")
        object.__setattr__(self, "terms", terms)

    @property
    def degree(self) -> float:
        if not self.terms:
            return float("nan")
        _, m, b = self.terms[0]
        return m.order() + b

    def scaled(self, factor: complex) -> "RadialPolyKernel":
        return RadialPolyKernel(tuple((c * factor, m, b) for c, m, b in self.terms), self.d)

    def __add__(self, other: "RadialPolyKernel") -> "RadialPolyKernel":
        if other.d != self.d:
            raise ValueError("kernel dimension mismatch")
        return RadialPolyKernel(self.terms + other.terms, self.d)

    def is_real(self) -> bool:
        return all(abs(c.imag) <= 1e-15 * max(1.0, abs(c)) for c, _, _ in self.terms)

    def evaluate_unchecked(self, x: Any) -> np.ndarray:
        """Values at ``x`` without the origin guard (``inf``/``nan`` there)."""
        pts = _as_points(x, self.d)
        rad = np.sqrt(np.sum(pts * pts, axis=-1))
        out = np.zeros(pts.shape[:-1], dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for c, m, b in self.terms:
                out = out + c * monomial_eval(pts, m) * rad ** b
        return out

    def evaluate(self, x: Any) -> np.ndarray:
        """Values at points ``x``; raises :class:`SingularPoint` at the origin."""
        pts = _as_points(x, self.d)
        if self.terms and np.any(np.all(pts == 0.0, axis=-1)):
            raise SingularPoint("kernel evaluated at the origin")
        return self.evaluate_unchecked(pts)


def kernel_eval(k: RadialPolyKernel, x: Any) -> complex | np.ndarray:
    """Evaluate ``k`` at a point (or array of points) away from the origin."""
    out = k.evaluate(x)
    return complex(out) if np.ndim(out) == 0 else out


def kernel_from_radial_symbol(gamma: float, d: int) -> RadialPolyKernel:
    """Kernel ``c ||x||^(gamma-d)`` whose transform is ``||xi||^-gamma``.

    Valid for ``0 < gamma < d + 2`` with ``gamma - d`` not an integer in
    ``{0, 1}``; beyond ``gamma = d`` the kernel is the analytic continuation
    (a tempered distribution equal to the function away from the origin).
    """
    if not 0 < gamma < d + 2:
        raise RangeError(f"kernel needs 0 < gamma < d+2, got gamma={gamma}, d={d}")
    if gamma - d in (0.0, 1.0):
        raise PoleError(f"gamma - d = {gamma - d:g} gives a logarithmic kernel")
    return RadialPolyKernel(((riesz_constant(gamma, d), MultiIndex.zero(d), gamma - d),), d)


def _partial(k: RadialPolyKernel, axis: int) -> RadialPolyKernel:
    e = MultiIndex.unit(k.d, axis)
    out = []
    for c, m, b in k.terms:
        if m[axis] > 0:
            out.append((c * m[axis], m - e, b))
        if b != 0.0:
            out.append((c * b, m + e, b - 2.0))
    return RadialPolyKernel(tuple(out), k.d)


def kernel_derivative(k: RadialPolyKernel, j: Sequence[int]) -> RadialPolyKernel:
    """Symbolic partial derivative ``d^j k`` for ``|j| <= 4``."""
    j = MultiIndex(j)
    if len(j) != k.d:
        raise ValueError("derivative index does not match the kernel dimension")
    if j.order() > _MAX_DERIVATIVE:
        raise UnsupportedOrder(f"derivative order {j.order()} exceeds {_MAX_DERIVATIVE}")
    out = k
    for axis, count in enumerate(j):
        for _ in range(count):
            out = _partial(out, axis)
    return out


def kernel_for_symbol(omega: HomogeneousSymbol) -> RadialPolyKernel:
    """Spatial kernel of ``(i xi)^a ||xi||^-gamma``, i.e. ``d^a`` of the radial kernel."""
    gamma = -omega.radial_exponent
    base = kernel_from_radial_symbol(gamma, omega.d)
    return kernel_derivative(base, omega.monomial)
