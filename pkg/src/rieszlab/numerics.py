"""Numeric substrate: multi-indices, the Gamma function, grids and grid transforms.

Grid convention
---------------
A :class:`Grid` samples the box ``[-L, L)^d`` at ``n`` points per axis with
spacing ``h = 2L/n`` and nodes ``x_m = -L + m h``.  The dual frequency grid has
spacing ``dxi = pi/L`` and frequencies ``xi_k = k dxi`` for ``k = -n/2 .. n/2-1``,
stored in ascending (centred) order.

The continuous transform ``F(xi) = int exp(-i <x, xi>) f(x) dx`` is approximated
by the rectangle rule on the grid.  Because the first node sits at ``-L`` and
``h dxi = 2 pi / n``,

    F(xi_k) = h^d * exp(i L sum(xi_k)) * DFT[f](k) = h^d * (-1)^(k_1+...+k_d) * DFT[f](k),

and the inverse ``f(x) = (2 pi)^-d int exp(i <x, xi>) F(xi) dxi`` is the matching
scaled inverse DFT with the conjugate phase.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Any, Iterable, Sequence

import mpmath
import numpy as np

from .errors import DecayError, DomainTagError, PoleError, RangeError

__all__ = [
    "MultiIndex",
    "multi_indices",
    "monomial_eval",
    "gamma",
    "sinpi",
    "Grid",
    "SampledField",
    "continuous_ft",
    "continuous_ift",
    "integrate",
    "spatial_moment",
    "edge_magnitude",
    "require_edge_decay",
    "lattice_zeta",
    "gauss_legendre",
    "write_field_csv",
    "read_field_csv",
]


# ---------------------------------------------------------------------------
# Multi-indices
# ---------------------------------------------------------------------------


class MultiIndex(tuple):
    """Vector of nonnegative integers used as an exponent or derivative order.

    Addition and subtraction act entrywise; subtraction raises ``ValueError`` if
    an entry would become negative.
    """

    def __new__(cls, entries: Iterable[int] | int = ()) -> "MultiIndex":
        if isinstance(entries, (int, np.integer)):
            entries = (entries,)
        vals = tuple(int(e) for e in entries)
        if any(v < 0 for v in vals):
            raise ValueError(f"multi-index entries must be nonnegative, got {vals}")
        return super().__new__(cls, vals)

    @classmethod
    def zero(cls, d: int) -> "MultiIndex":
        return cls((0,) * d)

    @classmethod
    def unit(cls, d: int, axis: int) -> "MultiIndex":
        return cls(1 if k == axis else 0 for k in range(d))

    @property
    def d(self) -> int:
        return len(self)

    def order(self) -> int:
        """Total order ``|i| = i_1 + ... + i_d``."""
        return sum(self)

    def factorial(self) -> int:
        """Product of entry factorials ``i! = i_1! ... i_d!``."""
        return math.prod(math.factorial(v) for v in self)

    def __add__(self, other: Sequence[int]) -> "MultiIndex":  # type: ignore[override]
        if len(other) != len(self):
            raise ValueError("multi-index dimension mismatch")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other: Sequence[int]) -> "MultiIndex":
        if len(other) != len(self):
            raise ValueError("multi-index dimension mismatch")
        return MultiIndex(a - b for a, b in zip(self, other))

    def __repr__(self) -> str:
        return f"MultiIndex{tuple(self)}"


def multi_indices(d: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices of dimension ``d`` with ``|i| <= max_order``.

    Ordered by total order, then lexicographically within each order.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    out: list[MultiIndex] = []
    for order in range(max_order + 1):
        level = set()
        for combo in combinations_with_replacement(range(d), order):
            counts = [0] * d
            for axis in combo:
                counts[axis] += 1
            level.add(tuple(counts))
        out.extend(MultiIndex(v) for v in sorted(level))
    return out


def monomial_eval(x: Any, i: Sequence[int]) -> Any:
    """Evaluate ``x^i``.

    ``x`` is a single point of length ``d`` or an array of shape ``(..., d)``.
    """
    arr = np.asarray(x)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] != len(i):
        raise ValueError("point dimension does not match the multi-index")
    out = np.ones(arr.shape[:-1], dtype=np.result_type(arr.dtype, float))
    for axis, power in enumerate(i):
        if power:
            out = out * arr[..., axis] ** power
    if out.ndim == 0:
        return out.item()
    return out


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------

# Lanczos approximation with g = 7 and nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def sinpi(x: float) -> float:
    """``sin(pi x)`` with the argument reduced exactly before scaling by pi."""
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def _gamma_positive(x: float) -> float:
    # valid for x >= 0.5
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for k in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    # split the power to avoid overflow for moderately large arguments
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * math.exp(-t) * half * acc


def gamma(x: float) -> float:
    """Gamma function on the real line.

    Positive arguments use a Lanczos approximation; arguments below 1/2 use
    the reflection formula ``Gamma(x) Gamma(1-x) = pi / sin(pi x)``.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    """
    x = float(x)
    if not math.isfinite(x):
        raise RangeError(f"gamma needs a finite argument, got {x}")
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x:g}")
    if x < 0.5:
        return math.pi / (sinpi(x) * _gamma_positive(1.0 - x))
    return _gamma_positive(x)


# ---------------------------------------------------------------------------
# Grids and sampled fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the box ``[-L, L)^d`` with ``n`` points per axis."""

    d: int
    L: float
    n: int

    def __post_init__(self) -> None:
        if int(self.d) != self.d or self.d < 1:
            raise RangeError(f"dimension must be a positive integer, got {self.d}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise RangeError(f"half-width must be positive, got {self.L}")
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise RangeError(f"points per axis must be a positive even integer, got {self.n}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def dxi(self) -> float:
        return math.pi / self.L

    @property
    def nyquist(self) -> float:
        """Largest frequency magnitude on an axis, ``n pi / (2L)``."""
        return self.n * math.pi / (2.0 * self.L)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def origin_index(self) -> tuple[int, ...]:
        """Index of the node at ``x = 0`` (also of ``xi = 0`` on the dual grid)."""
        return (self.n // 2,) * self.d

    def nodes(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    def frequencies(self) -> np.ndarray:
        return self.dxi * np.arange(-self.n // 2, self.n // 2)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of the spatial nodes (``ij`` indexing)."""
        return tuple(np.meshgrid(*([self.nodes()] * self.d), indexing="ij"))

    def freq_mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.frequencies()] * self.d), indexing="ij"))

    def points(self) -> np.ndarray:
        """Spatial nodes as an array of shape ``shape + (d,)``."""
        return np.stack(self.mesh(), axis=-1)

    def freq_points(self) -> np.ndarray:
        return np.stack(self.freq_mesh(), axis=-1)

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.mesh()))

    def freq_radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.freq_mesh()))


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values of a function on a :class:`Grid`.

    Parameters
    ----------
    grid : Grid
    values : array_like
        Complex values, either with shape ``(n,)*d`` or flat of length ``n**d``
        in row-major order.
    tag : {"spatial", "frequency"}
        Frequency-tagged values live on the dual grid.
    spectral : object, optional
        Exact spectral description attached by Fourier-path operators; it lets
        later multipliers act on the clean spectrum instead of re-transforming a
        field that does not decay at the box edge.
    """

    grid: Grid
    values: np.ndarray
    tag: str = "spatial"
    spectral: Any = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.tag not in ("spatial", "frequency"):
            raise DomainTagError(f"unknown domain tag {self.tag!r}")
        vals = np.array(self.values, dtype=complex)
        if vals.size != self.grid.n ** self.grid.d:
            raise ValueError(
                f"expected {self.grid.n ** self.grid.d} values, got {vals.size}"
            )
        vals = vals.reshape(self.grid.shape)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray) -> "SampledField":
        return SampledField(self.grid, values, self.tag)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def _require_tag(f: SampledField, tag: str) -> None:
    if f.tag != tag:
        raise DomainTagError(f"expected a {tag}-tagged field, got {f.tag}")


def _checkerboard(grid: Grid) -> np.ndarray:
    k = np.arange(-grid.n // 2, grid.n // 2)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    out = sign
    for _ in range(grid.d - 1):
        out = np.multiply.outer(out, sign)
    return out


def continuous_ft(f: SampledField) -> SampledField:
    """Rectangle-rule approximation of the Fourier transform on the dual grid."""
    _require_tag(f, "spatial")
    g = f.grid
    spec = np.fft.fftshift(np.fft.fftn(f.values)) * g.h ** g.d
    return SampledField(g, spec * _checkerboard(g), "frequency")


def continuous_ift(F: SampledField) -> SampledField:
    """Inverse of :func:`continuous_ft` (rectangle rule on the dual grid)."""
    _require_tag(F, "frequency")
    g = F.grid
    vals = np.fft.ifftn(np.fft.ifftshift(F.values * _checkerboard(g))) / g.h ** g.d
    return SampledField(g, vals, "spatial")


def integrate(f: SampledField) -> complex:
    """Box quadrature ``h^d * sum(values)``."""
    _require_tag(f, "spatial")
    return complex(np.sum(f.values) * f.grid.h ** f.grid.d)


def spatial_moment(f: SampledField, i: Sequence[int]) -> complex:
    """``int x^i f(x) dx`` by the same box quadrature."""
    _require_tag(f, "spatial")
    g = f.grid
    if len(i) != g.d:
        raise ValueError("multi-index dimension does not match the grid")
    weight = monomial_eval(g.points(), i)
    return complex(np.sum(weight * f.values) * g.h ** g.d)


def edge_magnitude(f: SampledField) -> float:
    """Largest ``|f|`` on the outer layer of nodes, relative to ``max |f|``."""
    vals = np.abs(f.values)
    peak = vals.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for axis in range(f.grid.d):
        edge = max(edge, np.take(vals, 0, axis=axis).max(), np.take(vals, -1, axis=axis).max())
    return float(edge / peak)


def require_edge_decay(f: SampledField, tol: float = 1e-12) -> None:
    """Raise :class:`DecayError` unless ``f`` is negligible at the box edge."""
    mag = edge_magnitude(f)
    if mag > tol:
        raise DecayError(
            f"input reaches {mag:.3g} of its peak at the box edge (limit {tol:g}); "
            "enlarge the box"
        )


# ---------------------------------------------------------------------------
# Lattice sums and quadrature helpers
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _lattice_zeta_cached(mu: tuple[int, ...], r: float) -> float | None:
    d = len(mu)
    if any(m % 2 for m in mu):
        return 0.0
    if d == 1:
        s = -(mu[0] + r)
        if s == 1.0:
            raise PoleError("lattice sum has a pole at degree -1 in one dimension")
        return float(2 * mpmath.zeta(s))
    if d == 2:
        if mu == (0, 0):
            w = -r / 2.0
            if w == 1.0:
                raise PoleError("lattice sum has a pole at degree -2 in two dimensions")
            beta = mpmath.dirichlet(w, [0, 1, 0, -1])
            return float(4 * mpmath.zeta(w) * beta)
        if sorted(mu) == [0, 2]:
            # sum k_1^2 |k|^r = sum k_2^2 |k|^r = half of sum |k|^(r+2)
            full = _lattice_zeta_cached((0, 0), r + 2.0)
            return None if full is None else 0.5 * full
        return None
    return None


def lattice_zeta(mu: Sequence[int], r: float) -> float | None:
    """Analytically continued lattice sum ``sum_{k in Z^d, k != 0} k^mu |k|^r``.

    These constants are the weights of the generalized Euler-Maclaurin
    correction for the rectangle rule applied to ``x^mu |x|^r g(x)`` with
    smooth ``g``: the rule over nonzero nodes exceeds the integral by
    ``Z(mu, r) h^(d + |mu| + r) g(0) + ...``.

    Returns ``None`` for two-dimensional monomials whose sum has no closed
    form here (any even ``mu`` other than (0,0), (2,0), (0,2)).
    """
    return _lattice_zeta_cached(tuple(int(m) for m in mu), round(float(r), 13))


@functools.lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on ``[a, b]``."""
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------


def write_field_csv(f: SampledField, path: str | Path) -> None:
    """Write ``f`` as CSV: a ``# d= L= n= tag=`` header, then ``index,re,im`` rows."""
    g = f.grid
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# d={g.d} L={g.L!r} n={g.n} tag={f.tag}\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for idx, v in enumerate(f.flat()):
            writer.writerow([idx, repr(float(v.real)), repr(float(v.imag))])


def read_field_csv(path: str | Path) -> SampledField:
    """Inverse of :func:`write_field_csv`."""
    path = Path(path)
    with path.open(newline="") as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing '# d= L= n= tag=' header")
        meta = dict(tok.split("=", 1) for tok in header.lstrip("#").split())
        try:
            grid = Grid(int(meta["d"]), float(meta["L"]), int(meta["n"]))
            tag = meta["tag"]
        except KeyError as exc:
            raise ValueError(f"{path}: header lacks {exc}") from None
        rows = [r for r in csv.reader(fh) if r and r[0] != "index"]
    vals = np.zeros(len(rows), dtype=complex)
    for r in rows:
        vals[int(r[0])] = complex(float(r[1]), float(r[2]))
    return SampledField(grid, vals, tag)
