"""Angular profiles on the circle.

Three families are supported, all even in the angle:

* ``CakeBSpline(N, k)``: the periodised spline ``phi -> B_k(N phi / 2pi)``
  used by cake wavelets,
* ``WrappedGaussian(lam)``: ``sum_n exp(-(phi - 2 pi n)^2 / (2 lam))``,
* ``VonMises(lam)``: ``exp((cos(phi) - 1) / lam)``.

Overall positive scale factors are dropped (the von Mises peak is pinned to 1,
the Gaussian's ``exp(1/lam)`` prefactor is omitted); every downstream quantity
is either scale invariant or explicitly normalised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .splines import bspline, bspline_derivative, bspline_knots

TWO_PI = 2.0 * math.pi
GAUSS_WRAPS = 8


@dataclass(frozen=True)
class CakeBSpline:
    n: float
    k: int

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"number of orientations must be positive, got {self.n}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"spline order must be a nonnegative integer, got {self.k}")


@dataclass(frozen=True)
class WrappedGaussian:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class VonMises:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


AngularProfileSpec = Union[CakeBSpline, WrappedGaussian, VonMises]


@dataclass
class SampledCircleFunction:
    """Samples of a function on the circle together with quadrature weights.

    The default carrier is the uniform grid ``phi_m = pi (2m - M) / M`` with
    trapezoid weights ``2 pi / M``; spline profiles may instead be carried on
    per-knot Gauss nodes (see :func:`sample_profile_gauss`).
    """

    values: np.ndarray
    phi: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.phi = np.asarray(self.phi, dtype=float)
        if self.weights is None:
            self.weights = np.full(self.phi.shape, TWO_PI / self.phi.size)
        if self.values.shape != self.phi.shape:
            raise ValueError("values and grid must have the same shape")

    @property
    def size(self) -> int:
        return self.phi.size

    def integrate(self, integrand) -> complex | float:
        return np.sum(self.weights * integrand)


def circle_grid(m: int) -> np.ndarray:
    """Uniform grid on ``[-pi, pi)``; exactly symmetric under ``m -> M - m``."""
    if m < 16:
        raise ValueError(f"grid size must be at least 16, got {m}")
    return math.pi * ((2 * np.arange(m) - m) / m)


def wrap_angle(phi):
    """Reduce to ``[-pi, pi]``, leaving values already in range untouched."""
    phi = np.asarray(phi, dtype=float)
    out = np.where(np.abs(phi) <= math.pi, phi, np.mod(phi + math.pi, TWO_PI) - math.pi)
    return out


def _cake_wraps(spec: CakeBSpline) -> int:
    return math.ceil((spec.k + 1) / (2.0 * spec.n)) + 1


def _cake_sum(spec: CakeBSpline, phi, fn, scale=1.0):
    return scale * cake_sum_units(spec, spec.n * wrap_angle(phi) / TWO_PI, fn)


def cake_sum_units(spec: CakeBSpline, u, fn=bspline):
    """``sum_n fn(k, u + N n)`` for ``u`` in slice units (``|u| <= N/2``)."""
    u = np.asarray(u, dtype=float)
    total = fn(spec.k, u)
    # pair +n and -n so the result is exactly even in u
    for n in range(1, _cake_wraps(spec) + 1):
        total = total + (fn(spec.k, u + spec.n * n) + fn(spec.k, u - spec.n * n))
    return total


def _gauss_terms(lam, phi, deriv):
    def term(d):
        g = np.exp(-d * d / (2.0 * lam))
        return -d / lam * g if deriv else g

    total = term(phi)
    for n in range(1, GAUSS_WRAPS + 1):
        total = total + (term(phi - TWO_PI * n) + term(phi + TWO_PI * n))
    return total


def eval_profile(spec: AngularProfileSpec, phi):
    """Evaluate the profile at angle(s) ``phi`` (radians)."""
    phi = np.asarray(phi, dtype=float)
    if isinstance(spec, CakeBSpline):
        out = _cake_sum(spec, phi, bspline)
    elif isinstance(spec, WrappedGaussian):
        out = _gauss_terms(spec.lam, wrap_angle(phi), deriv=False)
    elif isinstance(spec, VonMises):
        out = np.exp((np.cos(phi) - 1.0) / spec.lam)
    else:
        raise TypeError(f"unknown profile spec {spec!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def profile_derivative(spec: AngularProfileSpec, phi):
    """Exact derivative of :func:`eval_profile` in ``phi``."""
    phi = np.asarray(phi, dtype=float)
    if isinstance(spec, CakeBSpline):
        if spec.k < 1:
            raise ValueError("order-0 cake profiles are not differentiable")
        out = _cake_sum(spec, phi, bspline_derivative, scale=spec.n / TWO_PI)
    elif isinstance(spec, WrappedGaussian):
        out = _gauss_terms(spec.lam, wrap_angle(phi), deriv=True)
    elif isinstance(spec, VonMises):
        out = -np.sin(phi) / spec.lam * np.exp((np.cos(phi) - 1.0) / spec.lam)
    else:
        raise TypeError(f"unknown profile spec {spec!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def sample_profile(spec: AngularProfileSpec, m: int) -> SampledCircleFunction:
    phi = circle_grid(m)
    return SampledCircleFunction(eval_profile(spec, phi), phi)


def sample_profile_derivative(spec: AngularProfileSpec, m: int) -> SampledCircleFunction:
    phi = circle_grid(m)
    return SampledCircleFunction(profile_derivative(spec, phi), phi)


def cake_breakpoints(spec: CakeBSpline, shift: float = 0.0) -> np.ndarray:
    """Sorted breakpoints of the wrapped cake profile ``Phi(. - shift)`` in
    ``[-pi + shift, pi + shift]``, endpoints included."""
    knots = bspline_knots(spec.k) * TWO_PI / spec.n
    pts = [knots + TWO_PI * n for n in range(-_cake_wraps(spec) - 1, _cake_wraps(spec) + 2)]
    pts = np.concatenate(pts)
    pts = pts[(pts > -math.pi) & (pts < math.pi)]
    pts = np.unique(np.concatenate([[-math.pi, math.pi], pts]))
    return pts + shift


def sample_profile_gauss(spec: CakeBSpline, nodes: int = 16, shift: float = 0.0):
    """Profile and derivative on Gauss-Legendre nodes placed per knot interval.

    Integrands built from the profile, its derivative and ``sin``/``cos`` are
    then integrated to near machine precision, independent of smoothness.
    Returns ``(values, derivative)`` as :class:`SampledCircleFunction`.
    """
    if not isinstance(spec, CakeBSpline):
        raise TypeError("per-knot Gauss sampling applies to cake profiles only")
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = cake_breakpoints(spec, shift)
    a, b = edges[:-1, None], edges[1:, None]
    phi = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    vals = eval_profile(spec, phi - shift)
    der = profile_derivative(spec, phi - shift) if spec.k >= 1 else None
    values = SampledCircleFunction(vals, phi, weights)
    derivative = None if der is None else SampledCircleFunction(der, phi, weights)
    return values, derivative


def partition_of_unity_residual(n: int, k: int, m: int = 4096) -> float:
    """Max deviation from 1 of ``sum_j Phi_{N,k}(phi - 2 pi j / N)`` on a grid."""
    if int(n) != n or n < 1:
        raise ValueError(f"N must be a positive integer, got {n}")
    n = int(n)
    spec = CakeBSpline(n, k)
    if m < 16:
        raise ValueError(f"grid size must be at least 16, got {m}")
    # grid angles in slice units, N phi / 2 pi; shifting by an integer j is
    # then exact, so knots shared by neighbours line up bit for bit
    t = n * (2 * np.arange(m) - m) / (2.0 * m)
    total = np.zeros(m)
    for j in range(n):
        u = t - j
        u = np.where(u < -n / 2.0, u + n, u)
        total += cake_sum_units(spec, u)
    return float(np.max(np.abs(total - 1.0)))


def n_of_lambda(k: int, lam: float) -> float:
    """Orientation count ``sqrt(pi^2 k / (3 lam))`` pairing spline order and
    von Mises width."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if k < 1:
        raise ValueError(f"spline order must be >= 1, got {k}")
    return math.sqrt(math.pi**2 * k / (3.0 * lam))


def l2_normalized(samples: SampledCircleFunction) -> np.ndarray:
    norm = math.sqrt(float(samples.integrate(np.abs(samples.values) ** 2)))
    return samples.values / norm


def angular_profile_table(lam: float, m: int = 512, ks=(3, 6, 9, 12)):
    """Columns ``phi, von Mises, wrapped Gaussian, cake(N_lam(k), k)...``, each
    profile scaled to peak 1. Returns ``(column_names, array)``."""
    phi = circle_grid(m)
    specs = [VonMises(lam), WrappedGaussian(lam)] + [CakeBSpline(n_of_lambda(k, lam), k) for k in ks]
    cols = [phi]
    for spec in specs:
        vals = eval_profile(spec, phi)
        cols.append(vals / eval_profile(spec, 0.0))
    names = ["phi", "opt", "gauss"] + [f"cake_k{k}" for k in ks]
    return names, np.column_stack(cols)
