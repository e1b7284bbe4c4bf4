"""Sample grids, the two-photon amplitude container and unitary transforms.

Coordinates are SI throughout: positions in m, transverse wavevectors in
rad/m.  The continuous convention is the symmetric unitary Fourier pair

    phi(x) = (2 pi)^(-1/2) * integral phi~(p) exp(+i p x) dp

applied independently to the signal and idler coordinates.  On the grid the
transform carries a sqrt(dx/dp) factor so that it is exactly unitary with
respect to the weights ``dx`` and ``dp``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateInputError, DomainError

__all__ = [
    "Domain",
    "Axis",
    "TwoPhotonAmplitude",
    "Distribution1D",
    "reverse_index",
    "to_momentum",
    "to_position",
    "norm",
    "normalize",
]


class Domain(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class Axis:
    """Uniform 1D grid ``coordinate(j) = center + (j - n/2) * spacing``."""

    n: int
    spacing: float
    center: float = 0.0
    domain: Domain = Domain.POSITION

    def __post_init__(self):
        if self.n < 16 or self.n % 2:
            raise ValueError(f"axis needs an even sample count >= 16, got {self.n}")
        if self.n & (self.n - 1):
            raise ValueError(f"axis sample count must be a power of two, got {self.n}")
        if not self.spacing > 0:
            raise ValueError(f"axis spacing must be positive, got {self.spacing}")

    @property
    def coordinates(self) -> np.ndarray:
        return self.center + (np.arange(self.n) - self.n // 2) * self.spacing

    @property
    def extent(self) -> float:
        """Largest absolute offset of a sample from the centre."""
        return self.n // 2 * self.spacing

    @property
    def is_centered(self) -> bool:
        return self.center == 0.0

    def conjugate(self) -> "Axis":
        """Axis of the other representation (dp * dx * n = 2 pi)."""
        other = Domain.MOMENTUM if self.domain is Domain.POSITION else Domain.POSITION
        return Axis(self.n, 2 * np.pi / (self.n * self.spacing), 0.0, other)

    def scaled(self, factor: float) -> "Axis":
        return replace(self, spacing=abs(factor) * self.spacing, center=factor * self.center)

    def index_of(self, value: float) -> int:
        """Nearest sample index; raises if ``value`` lies outside the grid."""
        j = int(round((value - self.center) / self.spacing)) + self.n // 2
        if not 0 <= j < self.n:
            raise ValueError(f"coordinate {value:g} outside the axis range")
        return j

    @classmethod
    def symmetric(cls, n: int, half_extent: float, domain: Domain = Domain.POSITION) -> "Axis":
        """Centred axis whose outermost sample sits at ``-half_extent``."""
        return cls(n, 2 * half_extent / n, 0.0, domain)


def reverse_index(n: int) -> np.ndarray:
    """Index permutation implementing x -> -x on a centred grid.

    Sample j sits at (j - n/2) * spacing, so its mirror is n - j.  The
    outermost sample j = 0 has no partner inside the grid and is mapped onto
    itself.
    """
    return (n - np.arange(n)) % n


@dataclass(frozen=True, eq=False)
class TwoPhotonAmplitude:
    """Complex biphoton amplitude sampled on (signal, idler) axes.

    ``values[j, l]`` is the amplitude at signal coordinate ``axis_signal[j]``
    and idler coordinate ``axis_idler[l]``.  ``z_label`` is bookkeeping only.
    """

    values: np.ndarray
    axis_signal: Axis
    axis_idler: Axis
    k_signal: float
    k_idler: float
    z_label: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.axis_signal.n, self.axis_idler.n):
            raise ValueError(
                f"amplitude shape {values.shape} does not match axes "
                f"({self.axis_signal.n}, {self.axis_idler.n})"
            )
        if self.axis_signal.domain is not self.axis_idler.domain:
            raise DomainError("signal and idler axes must share one representation")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def domain(self) -> Domain:
        return self.axis_signal.domain

    @property
    def cell(self) -> float:
        """Area element of one grid cell."""
        return self.axis_signal.spacing * self.axis_idler.spacing

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def with_values(self, values: np.ndarray, **changes) -> "TwoPhotonAmplitude":
        return replace(self, values=values, **changes)

    def wavenumber(self, arm: str) -> float:
        return self.k_signal if arm == "signal" else self.k_idler

    def axis(self, arm: str) -> Axis:
        return self.axis_signal if arm == "signal" else self.axis_idler


@dataclass(frozen=True, eq=False)
class Distribution1D:
    """Nonnegative weights on an axis, e.g. a marginal or conditional profile."""

    axis: Axis
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.axis.n,):
            raise ValueError("weights do not match the axis length")
        if np.any(w < 0):
            raise ValueError("distribution weights must be nonnegative")
        total = w.sum() * self.axis.spacing
        if not (np.isfinite(total) and total > 0):
            raise DegenerateInputError("distribution has no weight")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def coordinates(self) -> np.ndarray:
        return self.axis.coordinates

    @property
    def integral(self) -> float:
        return float(self.weights.sum() * self.axis.spacing)

    def normalized(self) -> "Distribution1D":
        return Distribution1D(self.axis, self.weights / self.integral)


def _centered_fft(values: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    values = np.fft.ifftshift(values, axes=axis)
    if inverse:
        values = np.fft.ifft(values, axis=axis, norm="ortho")
    else:
        values = np.fft.fft(values, axis=axis, norm="ortho")
    return np.fft.fftshift(values, axes=axis)


def transform_axis(values: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    """Unitary centred DFT along one array axis.

    Forward maps position samples to momentum samples (kernel exp(-i p x));
    ``inverse`` maps back.  With ``norm="ortho"`` and centred grids this is the
    discretised unitary transform up to the sqrt(dx/dp) density factor, which
    the callers apply.
    """
    return _centered_fft(values, axis, inverse)


def _require_centered(tpa: TwoPhotonAmplitude) -> None:
    if not (tpa.axis_signal.is_centered and tpa.axis_idler.is_centered):
        raise DomainError("transform requires axes centred at 0")


def _change_representation(tpa: TwoPhotonAmplitude, inverse: bool) -> TwoPhotonAmplitude:
    _require_centered(tpa)
    a_s, a_i = tpa.axis_signal, tpa.axis_idler
    b_s, b_i = a_s.conjugate(), a_i.conjugate()
    values = transform_axis(transform_axis(tpa.values, 0, inverse), 1, inverse)
    values = values * np.sqrt(tpa.cell / (b_s.spacing * b_i.spacing))
    return replace(tpa, values=values, axis_signal=b_s, axis_idler=b_i)


def to_momentum(tpa: TwoPhotonAmplitude) -> TwoPhotonAmplitude:
    """Position representation -> transverse-wavevector representation."""
    if tpa.domain is not Domain.POSITION:
        raise DomainError("to_momentum expects a position-domain amplitude")
    return _change_representation(tpa, inverse=False)


def to_position(tpa: TwoPhotonAmplitude) -> TwoPhotonAmplitude:
    """Transverse-wavevector representation -> position representation."""
    if tpa.domain is not Domain.MOMENTUM:
        raise DomainError("to_position expects a momentum-domain amplitude")
    return _change_representation(tpa, inverse=True)


def norm(tpa: TwoPhotonAmplitude) -> float:
    """Discrete squared norm sum |phi|^2 ds di."""
    return float(np.sum(tpa.intensity) * tpa.cell)


def normalize(tpa: TwoPhotonAmplitude) -> TwoPhotonAmplitude:
    total = norm(tpa)
    if not (np.isfinite(total) and total > 0):
        raise DegenerateInputError("cannot normalize an all-zero amplitude")
    return tpa.with_values(tpa.values / np.sqrt(total))
