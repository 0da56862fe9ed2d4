"""Discrete cake-wavelet filter banks.

Each orientation slice is built directly on the DFT frequency grid as

    slice_m(w) = M(|w|) * Phi_{N,k}(atan2(w2, w1) - base_angle - theta_m),

with ``theta_m = 2 pi m / N``. Frequencies are in radians per pixel (Nyquist
radius ``pi``), ``w1`` runs along image columns (x) and ``w2`` along rows
(y). Slices are stored in numpy FFT order, not centred.

With the default ``base_angle = pi/2`` the m = 0 wavelet sits on the positive
``w2`` axis in the Fourier domain, so it is elongated along x in space and
responds to horizontal structures; vertical structures land on
``theta = pi/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .profiles import CakeBSpline, cake_sum_units, wrap_angle

TWO_PI = 2.0 * math.pi
DC_POLICIES = ("split_uniform",)
TAPERS = ("hard", "erf")


class UnstableBandError(ValueError):
    """The stability measure vanishes somewhere inside the claimed disk."""


@dataclass(frozen=True)
class RadialProfileSpec:
    """Radial factor of the wavelet: indicator of the disk of radius
    ``rho0 * pi``, optionally with an erf roll-off of the given width (also a
    fraction of Nyquist) that ends at ``rho0``."""

    rho0: float = 0.8
    taper: str = "hard"
    width: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.rho0 <= 1.0:
            raise ValueError(f"rho0 must lie in (0, 1], got {self.rho0}")
        if self.taper not in TAPERS:
            raise ValueError(f"taper must be one of {TAPERS}, got {self.taper!r}")
        if self.taper == "erf" and not 0.0 < self.width < self.rho0:
            raise ValueError(f"taper width must lie in (0, rho0), got {self.width}")

    def mask(self, radius: np.ndarray) -> np.ndarray:
        """Evaluate at frequency radius given in radians per pixel."""
        r = np.asarray(radius, dtype=float) / math.pi
        inside = r < self.rho0
        if self.taper == "hard":
            return inside.astype(float)
        centre = self.rho0 - self.width / 2.0
        soft = 0.5 * erfc((r - centre) / (self.width / 6.0))
        return np.where(inside, soft, 0.0)


def frequency_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    """Signed DFT frequencies ``(w1, w2)`` of shape ``(height, width)``."""
    w1 = TWO_PI * np.fft.fftfreq(width)
    w2 = TWO_PI * np.fft.fftfreq(height)
    return np.broadcast_to(w1[None, :], (height, width)), np.broadcast_to(w2[:, None], (height, width))


def cake_fourier(
    w1: np.ndarray,
    w2: np.ndarray,
    n: int,
    k: int,
    m: int,
    radial: RadialProfileSpec,
    base_angle: float = math.pi / 2,
) -> np.ndarray:
    """Real Fourier wavelet of orientation ``m`` evaluated at ``(w1, w2)``.

    The angular factor is evaluated analytically at every point, so rotated
    slices never come from resampling. At ``w = 0`` each slice gets ``1/N``.

    The angle is converted to slice units once and the integer ``m`` is
    subtracted there; that subtraction is exact, so neighbouring slices see
    identical knot positions and sum to one even for ``k = 0``.
    """
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    radius = np.hypot(w1, w2)
    u = _slice_units(w1, w2, n, base_angle) - m
    u = np.where(u < -n / 2.0, u + n, u)
    out = radial.mask(radius) * cake_sum_units(CakeBSpline(n, k), u)
    return np.where(radius == 0.0, 1.0 / n, out)


def _slice_units(w1, w2, n, base_angle):
    return n * wrap_angle(np.arctan2(w2, w1) - base_angle) / TWO_PI


@dataclass(frozen=True, eq=False)
class CakeWaveletStack:
    width: int
    height: int
    n: int
    k: int
    radial: RadialProfileSpec
    dc_policy: str
    fourier_slices: np.ndarray = field(repr=False)
    base_angle: float = math.pi / 2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def thetas(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    def radial_mask(self) -> np.ndarray:
        w1, w2 = frequency_grid(self.width, self.height)
        return self.radial.mask(np.hypot(w1, w2))

    def disk(self) -> np.ndarray:
        """Frequencies strictly inside the disk of radius ``rho0 * pi``."""
        w1, w2 = frequency_grid(self.width, self.height)
        return np.hypot(w1, w2) < self.radial.rho0 * math.pi


def _validate(width, height, n, k, radial, dc_policy):
    for name, v in (("width", width), ("height", height)):
        if int(v) != v or v < 8:
            raise ValueError(f"{name} must be an integer >= 8, got {v}")
    if int(n) != n or n < 1:
        raise ValueError(f"number of orientations must be an integer >= 1, got {n}")
    if int(k) != k or k < 0:
        raise ValueError(f"spline order must be an integer >= 0, got {k}")
    if dc_policy not in DC_POLICIES:
        raise ValueError(f"dc_policy must be one of {DC_POLICIES}, got {dc_policy!r}")
    if radial.rho0 * min(width, height) / 2.0 < 2.0:
        raise ValueError(
            f"rho0={radial.rho0} leaves fewer than 2 frequency bins inside the disk "
            f"for a {width}x{height} grid"
        )


def build_stack(
    width: int,
    height: int,
    n: int,
    k: int,
    radial: RadialProfileSpec = RadialProfileSpec(),
    dc_policy: str = "split_uniform",
    base_angle: float = math.pi / 2,
) -> CakeWaveletStack:
    _validate(width, height, n, k, radial, dc_policy)
    w1, w2 = frequency_grid(width, height)
    slices = np.empty((n, height, width), dtype=complex)
    for m in range(n):
        slices[m] = cake_fourier(w1, w2, n, k, m, radial, base_angle)
    slices.setflags(write=False)
    return CakeWaveletStack(int(width), int(height), int(n), int(k), radial, dc_policy, slices, base_angle)


def spatial_kernel(stack: CakeWaveletStack, m: int) -> np.ndarray:
    """Spatial wavelet of orientation ``m`` with the origin at pixel
    ``(height // 2, width // 2)``."""
    if not 0 <= m < stack.n:
        raise IndexError(f"orientation index {m} out of range for N={stack.n}")
    return np.fft.fftshift(np.fft.ifft2(stack.fourier_slices[m]))


def n_psi(stack: CakeWaveletStack) -> np.ndarray:
    """Sum of the Fourier slices; equals the radial mask for cake wavelets."""
    return np.real(stack.fourier_slices.sum(axis=0))


def m_psi(stack: CakeWaveletStack) -> np.ndarray:
    """Sum of squared Fourier magnitudes (stability measure)."""
    return np.sum(np.abs(stack.fourier_slices) ** 2, axis=0)


@dataclass(frozen=True)
class StabilityReport:
    delta: float
    big_m: float
    cond_bound: float


def stability_report(stack: CakeWaveletStack) -> StabilityReport:
    """Bounds ``delta <= M_psi <= M`` over the open disk and ``M / delta``."""
    vals = m_psi(stack)[stack.disk()]
    delta, big = float(vals.min()), float(vals.max())
    if not delta > 0:
        raise UnstableBandError(
            "unstable band: the stability measure vanishes inside the disk "
            f"(min {delta:.3e}, max {big:.3e})"
        )
    return StabilityReport(delta, big, big / delta)


def directionality_moment(stack: CakeWaveletStack, m: int, exclude_nyquist: bool = True) -> float:
    """First moment ``sum w1_rot |slice_m|^2`` across the wavelet's own axis.

    ``w1_rot`` is the frequency coordinate perpendicular to the direction the
    slice is centred on. For even grid sizes the unpaired Nyquist row and
    column are dropped so the grid is reflection symmetric.
    """
    if not 0 <= m < stack.n:
        raise IndexError(f"orientation index {m} out of range for N={stack.n}")
    w1, w2 = frequency_grid(stack.width, stack.height)
    axis = stack.base_angle - math.pi / 2 + TWO_PI * m / stack.n
    w_rot = w1 * math.cos(axis) + w2 * math.sin(axis)
    power = np.abs(stack.fourier_slices[m]) ** 2
    if exclude_nyquist:
        power = power.copy()
        if stack.width % 2 == 0:
            power[:, stack.width // 2] = 0.0
        if stack.height % 2 == 0:
            power[stack.height // 2, :] = 0.0
    return float(np.sum(w_rot * power))
