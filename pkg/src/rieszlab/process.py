"""Sparse processes driven by white Poisson noise.

The noise ``w = sum_k a_k delta(x - x_k)`` has Poisson locations of intensity
``lambda`` in the box ``[-B, B]^d`` and i.i.d. amplitudes.  The process
``Phi = U* w`` (with ``U`` the 1-integrable potential) acts on a test function
by ``Phi(f) = sum_k a_k (U f)(x_k)``; its characteristic functional has the
closed form

    E exp(-i t Phi(f)) = exp(lambda int_box (psi_a(t U f(x)) - 1) dx),

with ``psi_a(s) = E exp(-i a s)``.  Pointwise values use the kernel ``H_y0``
in place of ``U f``.

Random streams are counter based: realization ``k`` draws from Philox keyed
by ``SeedSequence([seed, k])``, so estimates do not depend on how
realizations are split over threads.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Sequence

import numpy as np

from .errors import ConfigError, SpecError
from .numerics import Grid, SampledField, gauss_legendre
from .operators import HKernel, OperatorResult, PotentialSpec, h_kernel, integrable_potential_spatial
from .verification import CheckReport, cutoff

__all__ = [
    "AmplitudeDist",
    "PoissonConfig",
    "PoissonRealization",
    "CharFunctionalEstimate",
    "sample_realization",
    "evaluate_functional",
    "windowed_functional",
    "functional_samples",
    "estimate_charfun",
    "charfun_closed_form",
    "charfun_monte_carlo",
    "pointwise_charfun",
    "pointwise_charfun_monte_carlo",
    "pointwise_tail_bound",
    "campbell_mean",
    "delta_approx_convergence",
    "render_field",
    "self_similarity_probe",
    "write_realization_csv",
]

MIN_SAMPLES = 100
_AMPLITUDE_KINDS = ("deterministic", "gaussian", "laplace", "uniform")


# ---------------------------------------------------------------------------
# Configuration types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmplitudeDist:
    """Impulse amplitude law with a finite mean absolute moment.

    Parameters
    ----------
    kind : {"deterministic", "gaussian", "laplace", "uniform"}
    params : tuple of float
        ``(a0,)``, ``(sigma,)``, ``(b,)`` or ``(a_lo, a_hi)`` respectively.
    """

    kind: str
    params: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        if self.kind == "cauchy":
            raise ConfigError(
                "cauchy amplitudes have no finite mean absolute moment; the process needs "
                "int |a| dP(a) < infinity"
            )
        if self.kind not in _AMPLITUDE_KINDS:
            raise ConfigError(f"unknown amplitude kind {self.kind!r}; choose from {_AMPLITUDE_KINDS}")
        expected = 2 if self.kind == "uniform" else 1
        if len(self.params) != expected:
            raise ConfigError(f"{self.kind} amplitudes take {expected} parameter(s), got {self.params}")
        if self.kind in ("gaussian", "laplace") and not self.params[0] > 0:
            raise ConfigError(f"{self.kind} scale must be positive")
        if self.kind == "uniform" and not self.params[0] < self.params[1]:
            raise ConfigError("uniform amplitudes need a_lo < a_hi")
        if not all(math.isfinite(v) for v in self.params):
            raise ConfigError("amplitude parameters must be finite")

    @classmethod
    def deterministic(cls, a0: float = 1.0) -> "AmplitudeDist":
        return cls("deterministic", (a0,))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        p = self.params
        if self.kind == "deterministic":
            return np.full(size, p[0])
        if self.kind == "gaussian":
            return rng.normal(0.0, p[0], size)
        if self.kind == "laplace":
            return rng.laplace(0.0, p[0], size)
        return rng.uniform(p[0], p[1], size)

    @property
    def mean(self) -> float:
        if self.kind == "deterministic":
            return self.params[0]
        if self.kind == "uniform":
            return 0.5 * (self.params[0] + self.params[1])
        return 0.0

    @property
    def mean_abs(self) -> float:
        p = self.params
        if self.kind == "deterministic":
            return abs(p[0])
        if self.kind == "gaussian":
            return p[0] * math.sqrt(2.0 / math.pi)
        if self.kind == "laplace":
            return p[0]
        lo, hi = p
        if lo >= 0 or hi <= 0:
            return abs(0.5 * (lo + hi))
        return (lo * lo + hi * hi) / (2.0 * (hi - lo))

    def charfun(self, s: Any) -> np.ndarray:
        """``E exp(-i a s)`` in closed form."""
        s = np.asarray(s, dtype=float)
        p = self.params
        if self.kind == "deterministic":
            return np.exp(-1j * p[0] * s)
        if self.kind == "gaussian":
            return np.exp(-0.5 * (p[0] * s) ** 2) + 0j
        if self.kind == "laplace":
            return 1.0 / (1.0 + (p[0] * s) ** 2) + 0j
        lo, hi = p
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        return np.exp(-1j * mid * s) * np.sinc(half * s / math.pi)


@dataclass(frozen=True)
class PoissonConfig:
    """White Poisson noise on ``[-box, box]^d``.

    The expected impulse count is ``lam * (2 box)^d``.
    """

    lam: float
    box: float
    amplitude: AmplitudeDist = field(default_factory=AmplitudeDist.deterministic)
    seed: int = 0
    d: int = 1

    def __post_init__(self) -> None:
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigError(f"intensity lambda must be positive, got {self.lam}")
        if not (self.box > 0 and math.isfinite(self.box)):
            raise ConfigError(f"box half-width must be positive, got {self.box}")
        if self.d not in (1, 2):
            raise ConfigError(f"dimension must be 1 or 2, got {self.d}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    @property
    def expected_count(self) -> float:
        return self.lam * (2.0 * self.box) ** self.d


@dataclass(frozen=True)
class PoissonRealization:
    """Impulse locations (``(N, d)``) and amplitudes (``(N,)``)."""

    points: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if len(self.points) != len(self.amplitudes):
            raise ValueError("points and amplitudes differ in length")

    def __len__(self) -> int:
        return len(self.amplitudes)


@dataclass(frozen=True)
class CharFunctionalEstimate:
    """Monte-Carlo estimate of a characteristic functional.

    ``stderr`` is the larger of the real- and imaginary-part standard errors.
    """

    value: complex
    stderr: float
    n_samples: int

    def to_dict(self) -> dict[str, Any]:
        return {"re": self.value.real, "im": self.value.imag, "stderr": self.stderr, "n": self.n_samples}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def sample_realization(cfg: PoissonConfig, index: int = 0) -> PoissonRealization:
    """Draw realization ``index`` of the noise: a Poisson count, uniform locations, amplitudes."""
    rng = _stream(cfg.seed, index)
    count = int(rng.poisson(cfg.expected_count))
    points = rng.uniform(-cfg.box, cfg.box, size=(count, cfg.d))
    amplitudes = cfg.amplitude.sample(rng, count)
    return PoissonRealization(points, amplitudes)


def write_realization_csv(r: PoissonRealization, path: str | os.PathLike) -> None:
    """CSV rows ``k, x_1..x_d, a``."""
    d = r.points.shape[1] if r.points.ndim == 2 else 1
    with open(path, "w") as fh:
        fh.write(",".join(["k"] + [f"x_{i + 1}" for i in range(d)] + ["a"]) + "\n")
        for k, (x, a) in enumerate(zip(r.points, r.amplitudes)):
            fh.write(",".join([str(k)] + [repr(float(v)) for v in np.atleast_1d(x)] + [repr(float(a))]) + "\n")


# ---------------------------------------------------------------------------
# Functionals
# ---------------------------------------------------------------------------


def _require_p1(spec: PotentialSpec) -> None:
    if spec.p != 1.0:
        raise SpecError(f"the Poisson process uses the 1-integrable potential, got p = {spec.p:g}")


def _potential(f: SampledField, spec: PotentialSpec, potential: OperatorResult | None) -> OperatorResult:
    _require_p1(spec)
    return potential if potential is not None else integrable_potential_spatial(f, spec)


def _safe_points(points: np.ndarray, singular: Sequence[Sequence[float]], nudge: float) -> np.ndarray:
    """Move points sitting exactly on a kernel singularity by ``nudge`` (a null event)."""
    pts = np.array(points, dtype=float, copy=True)
    for sp in singular:
        hit = np.all(pts == np.asarray(sp, dtype=float), axis=-1)
        pts[hit, 0] += nudge
    return pts


def _singular_points(res: OperatorResult, d: int) -> list[tuple[float, ...]]:
    if res.singular is not None and res.singular.terms and res.singular.degree < 0:
        return [(0.0,) * d]
    return []


def evaluate_functional(
    r: PoissonRealization, f: SampledField, spec: PotentialSpec, potential: OperatorResult | None = None
) -> float:
    """``sum_k a_k (U f)(x_k)`` with the regular part of ``U f`` interpolated multilinearly.

    ``potential`` may carry a precomputed ``integrable_potential_spatial(f, spec)``.
    """
    res = _potential(f, spec, potential)
    if len(r) == 0:
        return 0.0
    pts = _safe_points(r.points, _singular_points(res, spec.d), 0.5 * f.grid.h)
    vals = res.evaluate(pts).real
    return float(np.dot(r.amplitudes, vals))


def windowed_functional(
    r: PoissonRealization,
    f: SampledField,
    spec: PotentialSpec,
    N: float,
    potential: OperatorResult | None = None,
) -> float:
    """``sum_k a_k phi(x_k / N) (U f)(x_k)`` with the smooth cutoff ``phi``."""
    if not N > 0:
        raise ValueError("window scale N must be positive")
    res = _potential(f, spec, potential)
    if len(r) == 0:
        return 0.0
    pts = _safe_points(r.points, _singular_points(res, spec.d), 0.5 * f.grid.h)
    weights = cutoff(np.sqrt(np.sum(pts * pts, axis=-1)) / N)
    return float(np.dot(r.amplitudes * weights, res.evaluate(pts).real))


def _run_realizations(
    cfg: PoissonConfig, n_samples: int, per_sample: Callable[[PoissonRealization], float], threads: int
) -> np.ndarray:
    out = np.empty(n_samples)

    def work(chunk: range) -> None:
        for k in chunk:
            out[k] = per_sample(sample_realization(cfg, k))

    threads = max(1, int(threads))
    if threads == 1:
        work(range(n_samples))
    else:
        bounds = np.linspace(0, n_samples, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]))
    return out


def _check_samples(n_samples: int) -> None:
    if int(n_samples) < MIN_SAMPLES:
        raise ConfigError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")


def functional_samples(
    f: SampledField,
    spec: PotentialSpec,
    cfg: PoissonConfig,
    n_samples: int,
    threads: int = 1,
    potential: OperatorResult | None = None,
) -> np.ndarray:
    """Values ``Phi_m(f)`` for realizations ``m = 0 .. n_samples-1``."""
    _check_samples(n_samples)
    res = _potential(f, spec, potential)
    return _run_realizations(cfg, int(n_samples), lambda r: evaluate_functional(r, f, spec, res), threads)


def estimate_charfun(samples: np.ndarray, t: float) -> CharFunctionalEstimate:
    """Sample mean of ``exp(-i t X)`` with its standard error."""
    z = np.exp(-1j * t * np.asarray(samples, dtype=float))
    n = z.size
    if n < 2:
        raise ConfigError("at least two samples are needed for a standard error")
    stderr = max(np.std(z.real, ddof=1), np.std(z.imag, ddof=1)) / math.sqrt(n)
    return CharFunctionalEstimate(complex(np.mean(z)), float(stderr), int(n))


def charfun_monte_carlo(
    f: SampledField,
    spec: PotentialSpec,
    t: float,
    cfg: PoissonConfig,
    n_samples: int,
    threads: int = 1,
    potential: OperatorResult | None = None,
) -> CharFunctionalEstimate:
    """Monte-Carlo estimate of ``E exp(-i t Phi(f))``."""
    return estimate_charfun(functional_samples(f, spec, cfg, n_samples, threads, potential), t)


# ---------------------------------------------------------------------------
# Box quadrature around kernel singularities
# ---------------------------------------------------------------------------

_GRADED_LEVELS = 40
_GRADED_NODES = 32
_NEAR_NODES = 16
_FAR_NODES = 4


def _graded_pieces(end: float, other: float) -> list[tuple[float, float]]:
    """Geometric subdivision of the segment from ``end`` to ``other``, refined towards ``end``."""
    width = other - end
    pieces = []
    for level in range(_GRADED_LEVELS):
        near = end + width * 2.0 ** (-level - 1)
        far = end + width * 2.0 ** (-level)
        pieces.append((min(near, far), max(near, far)))
    return pieces


def _panels_1d(B: float, h: float, singular: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[-B, B]``.

    Panels follow the grid cells; panels touching a singular point are split
    geometrically towards it.
    """
    sing = np.array([s for s in singular if -B <= s <= B], dtype=float)
    edges = np.union1d(np.clip(np.arange(-B, B + 0.5 * h, h), -B, B), np.concatenate([[-B, B], sing]))
    xs, ws = [], []

    def add(n: int, a: float, b: float) -> None:
        x, w = gauss_legendre(n, a, b)
        xs.append(x)
        ws.append(w)

    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        at_a = bool(np.any(sing == a))
        at_b = bool(np.any(sing == b))
        if at_a or at_b:
            if at_a and at_b:
                mid = 0.5 * (a + b)
                pieces = _graded_pieces(a, mid) + _graded_pieces(b, mid)
            elif at_a:
                pieces = _graded_pieces(a, b)
            else:
                pieces = _graded_pieces(b, a)
            for p0, p1 in pieces:
                add(_GRADED_NODES, p0, p1)
            continue
        near = sing.size and np.min(np.abs(sing - 0.5 * (a + b))) < 1.0
        add(_NEAR_NODES if near else _FAR_NODES, a, b)
    return np.concatenate(xs), np.concatenate(ws)


def _box_integral(
    func: Callable[[np.ndarray], np.ndarray], B: float, d: int, h: float, singular: Sequence[Sequence[float]]
) -> complex:
    """``int_{[-B, B]^d} func(x) dx`` for a bounded integrand with isolated rough points."""
    if d == 1:
        x, w = _panels_1d(B, h, [s[0] for s in singular])
        return complex(np.sum(w * func(x[:, None])))
    # two dimensions: tensor Gauss-Legendre on grid cells, refined near singular points
    x, w = _panels_1d(B, h, sorted({s[a] for s in singular for a in range(d)}))
    X, Y = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    pts = np.stack([X, Y], axis=-1)
    return complex(np.sum(W * func(pts)))


def _exponent(
    values: Callable[[np.ndarray], np.ndarray],
    t: float,
    cfg: PoissonConfig,
    box: float,
    h: float,
    singular: Sequence[Sequence[float]],
) -> complex:
    def integrand(x: np.ndarray) -> np.ndarray:
        v = values(x)
        return cfg.amplitude.charfun(t * v) - 1.0

    return cfg.lam * _box_integral(integrand, box, cfg.d, h, singular)


def charfun_closed_form(
    f: SampledField,
    spec: PotentialSpec,
    t: float,
    cfg: PoissonConfig,
    potential: OperatorResult | None = None,
) -> complex:
    """``exp(lambda int_box (psi_a(t U f(x)) - 1) dx)``.

    The amplitude average ``psi_a`` is exact for every supported law; the box
    integral uses grid-aligned Gauss-Legendre panels with geometric grading at
    the singularity of ``U f``.
    """
    res = _potential(f, spec, potential)
    if t == 0:
        return 1.0 + 0.0j
    sing = _singular_points(res, spec.d)
    exponent = _exponent(lambda x: res.evaluate(x, order=3).real, t, cfg, cfg.box, f.grid.h, sing)
    return complex(np.exp(exponent))


def campbell_mean(
    f: SampledField, spec: PotentialSpec, cfg: PoissonConfig, potential: OperatorResult | None = None
) -> float:
    """``E Phi(f) = lambda E[a] int_box U f``."""
    res = _potential(f, spec, potential)
    sing = _singular_points(res, spec.d)
    integral = _box_integral(lambda x: res.evaluate(x, order=3).real, cfg.box, cfg.d, f.grid.h, sing)
    return float(cfg.lam * cfg.amplitude.mean * integral.real)


# ---------------------------------------------------------------------------
# Pointwise values
# ---------------------------------------------------------------------------

_ENLARGEMENT = 4.0


def _pointwise_setup(y0: Any, spec: PotentialSpec, cfg: PoissonConfig) -> tuple[HKernel, PoissonConfig]:
    _require_p1(spec)
    if cfg.d != spec.d:
        raise SpecError("noise and potential dimensions differ")
    kernel = h_kernel(y0, spec.gamma, spec.d)
    return kernel, replace(cfg, box=_ENLARGEMENT * cfg.box)


def _pointwise_step(cfg: PoissonConfig) -> float:
    return min(1.0 / 64.0, cfg.box / 64.0)


def pointwise_charfun(y0: Any, spec: PotentialSpec, t: float, cfg: PoissonConfig) -> complex:
    """``exp(lambda int (psi_a(t H_y0(x)) - 1) dx)`` over the box enlarged fourfold.

    ``H_0`` vanishes, so ``y0 = 0`` gives exactly 1.
    """
    kernel, big = _pointwise_setup(y0, spec, cfg)
    if kernel.is_zero or t == 0:
        return 1.0 + 0.0j
    exponent = _exponent(
        lambda x: kernel.evaluate(x, strict=False), t, big, big.box, _pointwise_step(cfg), kernel.singular_points()
    )
    return complex(np.exp(exponent))


def pointwise_tail_bound(y0: Any, spec: PotentialSpec, t: float, cfg: PoissonConfig) -> float:
    """Bound ``lambda E|a| |t| int_{outside} |H_y0|`` on the part of the exponent beyond the enlarged box.

    The tail integral is taken along the axes out to 64 times the box, with
    the remainder extrapolated from the kernel's power-law decay.
    """
    kernel, big = _pointwise_setup(y0, spec, cfg)
    if kernel.is_zero:
        return 0.0
    R0, R1 = big.box, 64.0 * big.box
    r, w = gauss_legendre(256, math.log(R0), math.log(R1))
    radii = np.exp(r)
    total = 0.0
    directions = [np.eye(spec.d)[a] * s for a in range(spec.d) for s in (1.0, -1.0)]
    shell = 2.0 if spec.d == 1 else 2.0 * math.pi
    for u in directions:
        vals = np.abs(kernel.evaluate(radii[:, None] * u, strict=False))
        total += np.sum(w * radii * vals * radii ** (spec.d - 1)) * shell / len(directions)
    # beyond R1 |H| decays like r^(gamma - d - k1 - 1)
    rate = spec.gamma - spec.d - kernel.k1 - 1.0 + spec.d
    edge = np.mean([abs(float(kernel.evaluate(R1 * u, strict=False))) for u in directions]) * shell
    total += edge * R1 ** (spec.d) / max(-rate, 1e-12)
    return float(cfg.lam * cfg.amplitude.mean_abs * abs(t) * total)


def pointwise_samples(
    y0: Any, spec: PotentialSpec, cfg: PoissonConfig, n_samples: int, threads: int = 1
) -> np.ndarray:
    """Values ``sum_k a_k H_y0(x_k)`` over realizations in the enlarged box."""
    _check_samples(n_samples)
    kernel, big = _pointwise_setup(y0, spec, cfg)
    if kernel.is_zero:
        return np.zeros(int(n_samples))
    sing = kernel.singular_points()
    nudge = 0.5 * _pointwise_step(cfg)

    def per_sample(r: PoissonRealization) -> float:
        if len(r) == 0:
            return 0.0
        pts = _safe_points(r.points, sing, nudge)
        return float(np.dot(r.amplitudes, kernel.evaluate(pts, strict=False)))

    return _run_realizations(big, int(n_samples), per_sample, threads)


def pointwise_charfun_monte_carlo(
    y0: Any, spec: PotentialSpec, t: float, cfg: PoissonConfig, n_samples: int, threads: int = 1
) -> CharFunctionalEstimate:
    """Monte-Carlo counterpart of :func:`pointwise_charfun` on the same enlarged box."""
    return estimate_charfun(pointwise_samples(y0, spec, cfg, n_samples, threads), t)


# ---------------------------------------------------------------------------
# Delta approximants and rendering
# ---------------------------------------------------------------------------


def _delta_approximant(grid: Grid, y0: np.ndarray, N: float) -> SampledField:
    """``N^d g(N (x - y0))`` with the unit-integral Gaussian ``g``."""
    d = grid.d
    u = N * (grid.points() - y0)
    vals = N ** d * (2 * math.pi) ** (-d / 2) * np.exp(-0.5 * np.sum(u * u, axis=-1))
    return SampledField(grid, vals, "spatial")


def delta_approx_convergence(y0: Any, spec: PotentialSpec, Ns: Sequence[float], grid: Grid) -> CheckReport:
    """``e_N = ||U g_{N,y0} - H_y0||_1`` must decrease strictly along ``Ns``.

    The L1 norm is the box sum over nodes, skipping the cells of the
    singular points of ``H_y0``.  The metric is the largest ratio
    ``e_{N'} / e_N`` of consecutive errors (passes below 1).  Entries with
    ``1/N < 4h`` are marked resolution limited in the metadata.
    """
    _require_p1(spec)
    y = np.atleast_1d(np.asarray(y0, dtype=float))
    kernel = h_kernel(y, spec.gamma, spec.d)
    pts = grid.points()
    href = kernel.evaluate(pts, strict=False)
    skip = np.zeros(grid.shape, dtype=bool)
    for sp in kernel.singular_points():
        idx = tuple(int(round((c + grid.L) / grid.h)) for c in sp)
        if all(0 <= i < grid.n for i in idx):
            skip[idx] = True
    errors = []
    for N in Ns:
        res = integrable_potential_spatial(_delta_approximant(grid, y, float(N)), spec)
        diff = np.abs(res.field.values - href)
        ok = ~skip & np.isfinite(diff)
        errors.append(float(np.sum(diff[ok]) * grid.h ** grid.d))
    ratios = [b / a if a > 0 else math.inf for a, b in zip(errors[:-1], errors[1:])]
    metric = max(ratios) if ratios else 0.0
    limited = [float(N) for N in Ns if 1.0 / N < 4.0 * grid.h]
    meta = {
        "d": grid.d,
        "L": grid.L,
        "n": grid.n,
        "gamma": spec.gamma,
        "y0": y.tolist(),
        "Ns": [float(N) for N in Ns],
        "errors": errors,
        "resolution_limited": limited,
    }
    return CheckReport("delta_approx_convergence", float(metric), 0.0, 1.0, "below", meta)


def render_field(r: PoissonRealization, spec: PotentialSpec, grid: Grid) -> OperatorResult:
    """``sum_k a_k H_{x_k}`` on ``grid``; cells containing impulses are listed in ``flagged_nodes``."""
    _require_p1(spec)
    pts = grid.points()
    total = np.zeros(grid.shape)
    flagged: list[tuple[int, ...]] = []
    for x, a in zip(r.points, r.amplitudes):
        kernel = h_kernel(x, spec.gamma, spec.d)
        if kernel.is_zero:
            continue
        total = total + a * kernel.evaluate(pts, strict=False)
        idx = tuple(int(round((c + grid.L) / grid.h)) for c in np.atleast_1d(x))
        if all(0 <= i < grid.n for i in idx):
            flagged.append(idx)
    diag = {"impulses": len(r), "gamma": spec.gamma}
    return OperatorResult(SampledField(grid, total, "spatial"), "pointwise_kernel", diag, flagged)


def self_similarity_probe(
    f: Any, spec: PotentialSpec, s: float, t: float, cfg: PoissonConfig, grid: Grid
) -> CheckReport:
    """Closed forms agree under dilation: ``Z(delta_s f; lambda, t, B) = Z(f; lambda s^-d, t s^-gamma, s B)``.

    Follows from ``U(delta_s f) = s^-gamma delta_s(U f)`` and ``x -> s x`` in
    the box integral.  ``f`` is a :class:`~rieszlab.verification.TestFunction`;
    the metric is the absolute difference (tolerance 1e-6).
    """
    if s * cfg.box > grid.L:
        raise ConfigError("the dilated box must fit inside the grid")
    d = spec.d
    lhs = charfun_closed_form(f.sample(grid, scale=s), spec, t, cfg)
    scaled = replace(cfg, lam=cfg.lam * s ** (-d), box=s * cfg.box)
    rhs = charfun_closed_form(f.sample(grid), spec, t * s ** (-spec.gamma), scaled)
    meta = {"s": s, "t": t, "gamma": spec.gamma, "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag]}
    return CheckReport("self_similarity", float(abs(lhs - rhs)), 0.0, 1e-6, "residual", meta)
