"""Source amplitudes at the crystal exit.

Two models are provided.  ``build_spdc`` is the Gaussian pump envelope times
the collinear phase-matching sinc; ``build_double_gaussian`` replaces the sinc
with a Gaussian, which makes the Schmidt problem analytically solvable and is
used as a benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .field import Axis, Domain, TwoPhotonAmplitude, normalize

__all__ = [
    "SpdcParams",
    "DoubleGaussianParams",
    "build_spdc",
    "build_double_gaussian",
    "default_momentum_axis",
    "double_gaussian_axis",
]

# coarser than this and the pump envelope is not resolved on the momentum grid
MIN_SAMPLES_PER_WIDTH = 1.5


@dataclass(frozen=True)
class SpdcParams:
    """Degenerate type-I source: pump wavelength, crystal length, pump waist.

    ``pump_waist`` is the 1/e^2 intensity radius, so the pump amplitude is
    exp(-x^2 / w0^2) in position.
    """

    lambda_pump: float = 404e-9
    crystal_length: float = 2e-3
    pump_waist: float = 245e-6

    def __post_init__(self):
        for name in ("lambda_pump", "crystal_length", "pump_waist"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")

    @property
    def k_pump(self) -> float:
        return 2 * np.pi / self.lambda_pump

    @property
    def lambda_signal(self) -> float:
        return 2 * self.lambda_pump

    @property
    def k_signal(self) -> float:
        return 2 * np.pi / self.lambda_signal

    @property
    def sinc_zero(self) -> float:
        """|p - q| of the first zero of the phase-matching factor."""
        return float(np.sqrt(4 * np.pi * self.k_pump / self.crystal_length))

    @property
    def pump_width(self) -> float:
        """Momentum-sum scale 2/w0 of the pump envelope (1/e amplitude)."""
        return 2 / self.pump_waist


@dataclass(frozen=True)
class DoubleGaussianParams:
    """Widths (rad/m) of the momentum-sum and momentum-difference Gaussians."""

    sigma_plus: float
    sigma_minus: float

    def __post_init__(self):
        if not (self.sigma_plus > 0 and self.sigma_minus > 0):
            raise ConfigurationError("double-Gaussian widths must be positive")


def default_momentum_axis(params: SpdcParams, n: int = 1024, halfwidth_factor: float = 4.0) -> Axis:
    """Momentum grid covering both factors with a ``halfwidth_factor`` margin."""
    half = halfwidth_factor * max(params.sinc_zero, 4 / params.pump_waist)
    return Axis.symmetric(n, half, Domain.MOMENTUM)


def double_gaussian_axis(params: DoubleGaussianParams, n: int = 1024, halfwidth_factor: float = 4.0) -> Axis:
    half = halfwidth_factor * max(params.sigma_plus, params.sigma_minus)
    return Axis.symmetric(n, half, Domain.MOMENTUM)


def _check_axis(axis: Axis, narrowest: float, widest: float) -> None:
    if axis.domain is not Domain.MOMENTUM:
        raise DomainError("source amplitudes are built on a momentum axis")
    if not axis.is_centered:
        raise DomainError("source axis must be centred at 0")
    if axis.spacing * MIN_SAMPLES_PER_WIDTH > narrowest:
        raise ConfigurationError(
            f"momentum spacing {axis.spacing:.4g} rad/m too coarse for feature width {narrowest:.4g}"
        )
    if axis.extent < widest:
        raise ConfigurationError(
            f"momentum half-extent {axis.extent:.4g} rad/m does not cover the support {widest:.4g}"
        )


def build_spdc(params: SpdcParams, axis: Axis) -> TwoPhotonAmplitude:
    """Gaussian-pump times sinc phase-matching amplitude Phi(p, q) at z = 0.

    Phi = exp(-w0^2 (p+q)^2 / 4) * sinc(L (p-q)^2 / (4 k_p)), normalised.
    """
    # pump intensity width in p+q is 1/w0; the sinc main lobe must fit inside
    _check_axis(axis, 1 / params.pump_waist, params.sinc_zero)
    p = axis.coordinates
    s, d = p[:, None] + p[None, :], p[:, None] - p[None, :]
    pump = np.exp(-(params.pump_waist**2) * s**2 / 4)
    mismatch = params.crystal_length * d**2 / (4 * params.k_pump)
    values = pump * np.sinc(mismatch / np.pi)
    k = params.k_signal
    return normalize(TwoPhotonAmplitude(values, axis, axis, k, k, 0.0))


def build_double_gaussian(
    params: DoubleGaussianParams, axis: Axis, k: float = 2 * np.pi / 808e-9
) -> TwoPhotonAmplitude:
    """exp(-(p+q)^2 / (4 s+^2)) * exp(-(p-q)^2 / (4 s-^2)), normalised."""
    sp, sm = params.sigma_plus, params.sigma_minus
    _check_axis(axis, min(sp, sm), 2 * max(sp, sm))
    p = axis.coordinates
    s, d = p[:, None] + p[None, :], p[:, None] - p[None, :]
    values = np.exp(-(s**2) / (4 * sp**2) - d**2 / (4 * sm**2))
    return normalize(TwoPhotonAmplitude(values, axis, axis, k, k, 0.0))
