"""Position-orientation uncertainty of angular profiles.

The generators of the SE(2) irreducible representation on L2(S^1) with
frequency vector ``rho * e2`` are multiplication by ``rho cos(phi)``,
multiplication by ``rho sin(phi)`` and ``-i d/dphi``. The uncertainty gap of
a profile with respect to the last two is

    UG = var(A) var(B) / (|<[A, B]>|^2 / 4) >= 1,    [A, B] = i rho cos(phi),

with equality exactly for the von Mises profile ``exp(cos(phi) / lam)``.

This module also evaluates the closed-form upper bound for the wrapped
Gaussian, which needs the Jacobi theta function ``theta_3`` and the error
function at complex arguments; both are implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .profiles import (
    AngularProfileSpec,
    CakeBSpline,
    SampledCircleFunction,
    VonMises,
    WrappedGaussian,
    circle_grid,
    eval_profile,
    n_of_lambda,
    profile_derivative,
    sample_profile_gauss,
)

COMMUTATOR_FLOOR = 1e-14


class DegenerateProfileError(ValueError):
    """The commutator expectation vanishes, so the uncertainty gap is undefined."""


@dataclass(frozen=True)
class MultCos:
    rho: float = 1.0


@dataclass(frozen=True)
class MultSin:
    rho: float = 1.0


@dataclass(frozen=True)
class AngularDerivative:
    pass


GeneratorKind = Union[MultCos, MultSin, AngularDerivative]


@dataclass(frozen=True)
class QuadratureConfig:
    """How circle integrals are discretised.

    Smooth profiles use the periodic trapezoid rule on ``samples`` points.
    Cake profiles default to ``gauss_nodes``-point Gauss-Legendre rules on
    every knot interval, which is exact up to rounding for the polynomial
    pieces.
    """

    samples: int = 8192
    gauss_nodes: int = 16
    spline_gauss: bool = True


@dataclass(frozen=True)
class UncertaintyReport:
    mean_a: float
    var_a: float
    mean_b: float
    var_b: float
    commutator_abs: float
    ug: float


def _norm_sq(samples: SampledCircleFunction) -> float:
    nrm = float(samples.integrate(np.abs(samples.values) ** 2))
    if not nrm > 0:
        raise ValueError("profile has zero norm")
    return nrm


def expectation(
    op: GeneratorKind,
    samples: SampledCircleFunction,
    derivative: SampledCircleFunction | None = None,
) -> float:
    """``(psi, X psi) / (psi, psi)`` for one of the three generators.

    The operators are symmetric, so the real part is returned; for a real
    profile and ``X = -i d/dphi`` that real part is identically zero.
    """
    psi = samples.values
    nrm = _norm_sq(samples)
    if isinstance(op, MultCos):
        x_psi = op.rho * np.cos(samples.phi) * psi
    elif isinstance(op, MultSin):
        x_psi = op.rho * np.sin(samples.phi) * psi
    elif isinstance(op, AngularDerivative):
        if derivative is None:
            raise ValueError("the angular derivative needs derivative samples")
        x_psi = -1j * derivative.values
    else:
        raise TypeError(f"unknown generator {op!r}")
    return float(np.real(samples.integrate(np.conj(psi) * x_psi)) / nrm)


def commutator_expectation(
    samples: SampledCircleFunction,
    derivative: SampledCircleFunction,
    rho: float = 1.0,
    alpha: float = 0.0,
) -> complex:
    """``((A psi, B psi) - (B psi, A psi)) / (psi, psi)`` by quadrature, with
    ``A = rho sin(phi - alpha)`` and ``B = -i d/dphi``."""
    psi = samples.values
    a_psi = rho * np.sin(samples.phi - alpha) * psi
    b_psi = -1j * derivative.values
    nrm = _norm_sq(samples)
    ab = samples.integrate(np.conj(a_psi) * b_psi)
    ba = samples.integrate(np.conj(b_psi) * a_psi)
    return complex((ab - ba) / nrm)


def report_from_samples(
    samples: SampledCircleFunction,
    derivative: SampledCircleFunction,
    rho: float = 1.0,
    alpha: float = 0.0,
) -> UncertaintyReport:
    """Uncertainty report for ``A = rho sin(phi - alpha)``, ``B = -i d/dphi``."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    psi = samples.values
    dpsi = derivative.values
    dens = np.abs(psi) ** 2
    nrm = _norm_sq(samples)

    a = rho * np.sin(samples.phi - alpha)
    mean_a = float(samples.integrate(a * dens) / nrm)
    var_a = float(samples.integrate((a - mean_a) ** 2 * dens) / nrm)

    b_psi = -1j * dpsi
    mean_b = float(np.real(samples.integrate(np.conj(psi) * b_psi)) / nrm)
    var_b = float(samples.integrate(np.abs(b_psi - mean_b * psi) ** 2) / nrm)

    comm = abs(float(rho * samples.integrate(np.cos(samples.phi - alpha) * dens) / nrm))
    if comm < COMMUTATOR_FLOOR:
        raise DegenerateProfileError(
            f"commutator expectation {comm:.3e} is below {COMMUTATOR_FLOOR}; "
            "the uncertainty gap is undefined for this profile"
        )
    ug = var_a * var_b / (comm * comm / 4.0)
    return UncertaintyReport(mean_a, var_a, mean_b, var_b, comm, ug)


def profile_samples(
    spec: AngularProfileSpec,
    quadrature: QuadratureConfig = QuadratureConfig(),
    alpha: float = 0.0,
) -> tuple[SampledCircleFunction, SampledCircleFunction]:
    """Samples of ``Phi(. - alpha)`` and its derivative on the quadrature nodes."""
    if isinstance(spec, CakeBSpline) and spec.k < 1:
        raise ValueError("order-0 cake profiles are not differentiable; UG is undefined")
    if isinstance(spec, CakeBSpline) and quadrature.spline_gauss:
        return sample_profile_gauss(spec, quadrature.gauss_nodes, shift=alpha)
    phi = circle_grid(quadrature.samples)
    vals = eval_profile(spec, phi - alpha)
    der = profile_derivative(spec, phi - alpha)
    return SampledCircleFunction(vals, phi), SampledCircleFunction(der, phi)


def uncertainty_gap(
    spec: AngularProfileSpec,
    rho: float = 1.0,
    quadrature: QuadratureConfig = QuadratureConfig(),
    alpha: float = 0.0,
) -> UncertaintyReport:
    """Uncertainty gap of ``spec`` for the generators ``rho sin`` and ``-i d/dphi``.

    A nonzero ``alpha`` rotates both the profile and the frequency vector
    (``rho R_alpha e2``); the gap is invariant under this.
    """
    samples, derivative = profile_samples(spec, quadrature, alpha)
    return report_from_samples(samples, derivative, rho, alpha)


def minimizer_residual(spec: AngularProfileSpec, lam: float, m: int = 8192) -> float:
    """Relative L2 residual of ``sin(phi) Phi + lam Phi'`` on a uniform grid.

    Zero exactly when ``Phi`` is a multiple of ``exp(cos(phi) / lam)``.
    """
    phi = circle_grid(m)
    vals = eval_profile(spec, phi)
    der = profile_derivative(spec, phi)
    res = np.sin(phi) * vals + lam * der
    return float(np.sqrt(np.sum(res * res) / np.sum(vals * vals)))


# Jacobi theta function


def _theta_series(mu: float) -> tuple[float, float]:
    """``S(mu) = sum_n exp(-mu n^2)`` and ``S'(mu)``, for ``mu >= 1``-ish."""
    s, ds = 0.0, 0.0
    n = 1
    while True:
        t = math.exp(-mu * n * n)
        s += t
        ds -= n * n * t
        if t < 1e-18 * (1.0 + s):
            break
        n += 1
    return 1.0 + 2.0 * s, 2.0 * ds


def _theta_and_derivative(lam: float) -> tuple[float, float]:
    """``T(lam) = theta_3(exp(-lam))`` and ``dT/dlam``."""
    if lam >= 1.0:
        return _theta_series(lam)
    # theta_3(e^-lam) = sqrt(pi/lam) theta_3(e^(-pi^2/lam))
    mu = math.pi**2 / lam
    s, ds = _theta_series(mu)
    pref = math.sqrt(math.pi / lam)
    t = pref * s
    dt = -0.5 * pref / lam * s + pref * ds * (-(math.pi**2) / lam**2)
    return t, dt


def theta3(q: float) -> float:
    """Jacobi theta ``theta_3(q) = sum_{n in Z} q^(n^2)`` for ``0 <= q < 1``."""
    if not 0.0 <= q < 1.0:
        raise ValueError(f"theta3 needs 0 <= q < 1, got {q}")
    if q == 0.0:
        return 1.0
    return _theta_and_derivative(-math.log(q))[0]


def theta3_squared_derivative(lam: float) -> float:
    """``d/dlam (theta_3(exp(-lam)))^2`` for ``lam > 0``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    t, dt = _theta_and_derivative(lam)
    return 2.0 * t * dt


# Error function of a complex argument

ERF_SERIES_RE_MAX = 2.5
ERF_IM_MAX = 50.0
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)


def _erf_series(z: complex) -> complex:
    # erf z = 2/sqrt(pi) sum_n (-1)^n z^(2n+1) / (n! (2n+1))
    z2 = z * z
    term = z
    total = z
    n = 0
    while True:
        n += 1
        term *= -z2 / n
        add = term / (2 * n + 1)
        total += add
        if abs(add) <= 1e-17 * abs(total) and n > abs(z2):
            break
    return _TWO_OVER_SQRTPI * total


def _erfc_continued_fraction(z: complex) -> complex:
    # erfc z = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
    # Re z > 0, evaluated with the modified Lentz algorithm.
    tiny = 1e-300
    f = z
    c = f
    d = 0.0
    for n in range(1, 10000):
        a = 0.5 * n
        d = z + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = z + a / c
        if c == 0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return np.exp(-z * z) / math.sqrt(math.pi) / f


def erf_complex(z: complex) -> complex:
    """``erf(z)`` for complex ``z`` with ``|Im z| <= 50``.

    Maclaurin series for ``|Re z| < 2.5`` (cancellation grows like
    ``exp(2 Re(z)^2)``, i.e. at most ~3e5 ulp), and the Laplace continued
    fraction for ``erfc`` otherwise. Odd symmetry handles ``Re z < 0``.
    Values whose magnitude exceeds the float range overflow to ``inf``.
    """
    z = complex(z)
    if abs(z.imag) > ERF_IM_MAX:
        raise ValueError(f"|Im z| must be <= {ERF_IM_MAX}, got {z.imag}")
    if z.real < 0:
        return -erf_complex(-z)
    if z.real < ERF_SERIES_RE_MAX:
        return _erf_series(z)
    return 1.0 - _erfc_continued_fraction(z)


def erf_real_part(z: complex) -> float:
    return float(erf_complex(z).real)


def ug_upper_bound_wrapped_gaussian(lam: float) -> float:
    """Closed-form upper bound on the uncertainty gap of the wrapped Gaussian.

    Tends to 1 as ``lam -> 0``. Only validated for ``0 < lam <= 2``.
    """
    if not 0.0 < lam <= 2.0:
        raise ValueError(f"the bound is only available for 0 < lambda <= 2, got {lam}")
    numerator = -(lam / math.pi) * math.sinh(lam) * theta3_squared_derivative(lam)

    c = math.sqrt(lam / (2.0 * math.pi)) * math.erfc(1.0 / math.sqrt(2.0 * lam))
    c += 2.0 * math.exp(-(math.pi**2) / (2.0 * lam))
    s2 = math.sqrt(2.0 * lam)
    denom = erf_real_part((2.0 * math.pi - 1j * lam) / math.sqrt(4.0 * lam))
    denom += (
        c
        * math.exp(-lam / 2.0)
        * math.sqrt(8.0 * math.pi * lam)
        * (
            erf_real_part((math.pi - 1j * lam) / s2)
            - erf_real_part((math.pi / 2.0 - 1j * lam) / s2)
        )
    )
    denom -= 2.0 * c * c
    return numerator / abs(denom) ** 2


# Convergence table


@dataclass
class UGTable:
    columns: list[str]
    rows: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def ug_convergence_table(
    ks: Sequence[int] = (3, 6, 9, 12),
    lambdas: Sequence[float] = tuple(np.round(np.arange(1, 21) * 0.05, 2)),
    quadrature: QuadratureConfig = QuadratureConfig(),
) -> UGTable:
    """Uncertainty gaps of the von Mises, wrapped Gaussian and cake profiles
    ``Phi_{N_lam(k), k}`` over a grid of ``lam``; one row per ``lam``."""
    for k in ks:
        if k < 1:
            raise ValueError(f"spline orders must be >= 1, got {k}")
    columns = ["lambda", "UG_opt", "UG_gauss"] + [f"UG_cake_k{k}" for k in ks]
    rows = np.empty((len(lambdas), len(columns)))
    for i, lam in enumerate(lambdas):
        rows[i, 0] = lam
        rows[i, 1] = uncertainty_gap(VonMises(lam), quadrature=quadrature).ug
        rows[i, 2] = uncertainty_gap(WrappedGaussian(lam), quadrature=quadrature).ug
        for j, k in enumerate(ks):
            spec = CakeBSpline(n_of_lambda(k, lam), k)
            rows[i, 3 + j] = uncertainty_gap(spec, quadrature=quadrature).ug
    return UGTable(columns, rows)
