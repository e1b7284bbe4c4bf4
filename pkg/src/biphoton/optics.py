"""Paraxial propagation of the two-photon amplitude through free space and lenses.

Elements act independently on the signal and idler coordinates.  Free space
is a quadratic phase in momentum, a thin lens a quadratic phase in position.
Every phase mask is checked against the sampling criterion before it is
applied: the phase difference between neighbouring samples at the edge of
the grid must stay below pi, otherwise the mask aliases.

Propagating over long distances on a fixed grid quickly violates that
criterion because the beam outgrows the window.  ``propagate_abcd`` therefore
collapses a whole chain into its ray-transfer matrix and evaluates it as one
canonical transform whose output grid is rescaled with the beam.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import ConfigurationError, DomainError, SamplingError
from .field import (
    Axis,
    Domain,
    TwoPhotonAmplitude,
    reverse_index,
    to_momentum,
    to_position,
    transform_axis,
)

__all__ = [
    "FreeSpace",
    "ThinLens",
    "Element",
    "ArmChain",
    "propagate_free",
    "apply_lens",
    "apply_chain",
    "ray_matrix",
    "propagate_abcd",
    "sampling_phase_step",
]

ARMS = ("signal", "idler")


@dataclass(frozen=True)
class FreeSpace:
    distance: float

    def __post_init__(self):
        if self.distance < 0:
            raise ConfigurationError("free-space distance must be >= 0")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0, self.distance], [0.0, 1.0]])


@dataclass(frozen=True)
class ThinLens:
    focal_length: float

    def __post_init__(self):
        if self.focal_length == 0:
            raise ConfigurationError("focal length must be nonzero")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1.0, 0.0], [-1.0 / self.focal_length, 1.0]])


Element = Union[FreeSpace, ThinLens]


@dataclass(frozen=True)
class ArmChain:
    """Ordered optical elements seen by each photon, applied left to right."""

    signal_elements: tuple = field(default_factory=tuple)
    idler_elements: tuple = field(default_factory=tuple)

    @classmethod
    def both(cls, elements: Sequence[Element]) -> "ArmChain":
        return cls(tuple(elements), tuple(elements))


def sampling_phase_step(curvature: float, conjugate_extent: float, spacing: float) -> float:
    """Phase change between the two outermost samples of a quadratic mask.

    A mask exp(i c u^2 / 2) changes by about |c| * u_max * du per sample.
    """
    return abs(curvature) * conjugate_extent * spacing


def _check_sampling(step: float, what: str) -> None:
    if step >= np.pi:
        raise SamplingError(
            f"{what}: quadratic phase changes by {step:.3g} rad between adjacent samples (limit pi)"
        )


def _arm_flags(arm: str) -> tuple[bool, bool]:
    if arm == "both":
        return True, True
    if arm in ARMS:
        return arm == "signal", arm == "idler"
    raise ValueError(f"arm must be 'signal', 'idler' or 'both', got {arm!r}")


def propagate_free(tpa: TwoPhotonAmplitude, z_signal: float, z_idler: float) -> TwoPhotonAmplitude:
    """Fresnel propagation: multiply by exp(-i p^2 z / 2k) per photon in momentum space.

    The result is returned in the representation of the input.  ``z_label``
    is advanced by the signal distance.
    """
    if z_signal < 0 or z_idler < 0:
        raise ConfigurationError("propagation distances must be >= 0")
    if z_signal == 0 and z_idler == 0:
        return tpa
    start = tpa.domain
    mom = to_momentum(tpa) if start is Domain.POSITION else tpa
    a_s, a_i = mom.axis_signal, mom.axis_idler
    _check_sampling(sampling_phase_step(z_signal / mom.k_signal, a_s.extent, a_s.spacing), "free space (signal)")
    _check_sampling(sampling_phase_step(z_idler / mom.k_idler, a_i.extent, a_i.spacing), "free space (idler)")
    p, q = a_s.coordinates, a_i.coordinates
    phase_s = np.exp(-1j * p**2 * z_signal / (2 * mom.k_signal))
    phase_i = np.exp(-1j * q**2 * z_idler / (2 * mom.k_idler))
    out = mom.with_values(mom.values * phase_s[:, None] * phase_i[None, :], z_label=tpa.z_label + z_signal)
    return to_position(out) if start is Domain.POSITION else out


def apply_lens(tpa: TwoPhotonAmplitude, f: float, arm: str = "both") -> TwoPhotonAmplitude:
    """Thin lens exp(-i k x^2 / 2f) on the selected coordinate(s), applied in position space."""
    if f == 0:
        raise ConfigurationError("focal length must be nonzero")
    on_s, on_i = _arm_flags(arm)
    start = tpa.domain
    pos = to_position(tpa) if start is Domain.MOMENTUM else tpa
    values = pos.values
    for flag, index, k, ax in ((on_s, 0, pos.k_signal, pos.axis_signal), (on_i, 1, pos.k_idler, pos.axis_idler)):
        if not flag:
            continue
        _check_sampling(sampling_phase_step(k / f, ax.extent, ax.spacing), f"thin lens ({ARMS[index]})")
        mask = np.exp(-1j * k * ax.coordinates**2 / (2 * f))
        values = values * (mask[:, None] if index == 0 else mask[None, :])
    out = pos.with_values(values)
    return to_momentum(out) if start is Domain.MOMENTUM else out


def _apply_element(tpa: TwoPhotonAmplitude, element: Element, arm: str) -> TwoPhotonAmplitude:
    if isinstance(element, FreeSpace):
        zs = element.distance if arm == "signal" else 0.0
        zi = element.distance if arm == "idler" else 0.0
        return propagate_free(tpa, zs, zi)
    if isinstance(element, ThinLens):
        return apply_lens(tpa, element.focal_length, arm)
    raise TypeError(f"unknown optical element {element!r}")


def apply_chain(tpa: TwoPhotonAmplitude, chain: ArmChain) -> TwoPhotonAmplitude:
    """Apply each arm's elements in order on the fixed input grid."""
    out = tpa
    for element in chain.signal_elements:
        out = _apply_element(out, element, "signal")
    for element in chain.idler_elements:
        out = _apply_element(out, element, "idler")
    return out


def ray_matrix(elements: Sequence[Element]) -> np.ndarray:
    """Ray-transfer (ABCD) matrix of an element sequence, first element acts first."""
    m = np.eye(2)
    for element in elements:
        m = element.matrix @ m
    return m


# -- canonical transform ------------------------------------------------------


def _rescale(values: np.ndarray, index: int, scale: float, ax: Axis) -> tuple[np.ndarray, Axis]:
    """Relabel coordinates u -> scale * u, keeping the squared norm."""
    if scale < 0:
        values = np.take(values, reverse_index(ax.n), axis=index)
    values = values / np.sqrt(abs(scale))
    return values, Axis(ax.n, abs(scale) * ax.spacing, 0.0, Domain.POSITION)


def _chirp(values: np.ndarray, index: int, ax: Axis, curvature: float) -> np.ndarray:
    """Multiply by exp(i curvature u^2 / 2) along one array axis."""
    if curvature == 0:
        return values
    mask = np.exp(0.5j * curvature * ax.coordinates**2)
    return values * (mask[:, None] if index == 0 else mask[None, :])


def _abcd_one_arm(values, index, ax: Axis, k: float, m: np.ndarray, what: str):
    """Evaluate the canonical transform ``m`` along one coordinate.

    Two factorisations are available and the one with the gentler sampled
    phase is used:

    * free space over B/A, then magnification by A (needs A != 0),
    * lens of power -A/B, Fourier transform, then magnification by B/k
      (needs B != 0).

    The trailing output curvature is evaluated pointwise; it does not affect
    intensities, Schmidt spectra or parity overlaps.
    """
    (a, b), (c, d) = m
    if abs(a * d - b * c - 1) > 1e-9:
        raise ConfigurationError(f"{what}: ray matrix is not unimodular")
    dp = 2 * np.pi / (ax.n * ax.spacing)
    p_extent = ax.n // 2 * dp
    step_free = np.inf if a == 0 else sampling_phase_step((b / a) / k, p_extent, dp)
    step_lens = np.inf if b == 0 else sampling_phase_step(k * a / b, ax.extent, ax.spacing)
    if min(step_free, step_lens) >= np.pi:
        _check_sampling(min(step_free, step_lens), what)

    if step_free <= step_lens:
        if b != 0:
            spec = transform_axis(values, index, inverse=False)
            p = (np.arange(ax.n) - ax.n // 2) * dp
            mask = np.exp(-1j * p**2 * (b / a) / (2 * k))
            spec = spec * (mask[:, None] if index == 0 else mask[None, :])
            values = transform_axis(spec, index, inverse=True)
        values, out_ax = _rescale(values, index, a, ax)
        return _chirp(values, index, out_ax, k * c / a), out_ax

    values = _chirp(values, index, ax, k * a / b)
    values = transform_axis(values, index, inverse=False) * np.sqrt(ax.spacing / dp)
    mom = Axis(ax.n, dp, 0.0, Domain.POSITION)
    values, out_ax = _rescale(values, index, b / k, mom)
    return _chirp(values, index, out_ax, k * d / b), out_ax


def propagate_abcd(
    tpa: TwoPhotonAmplitude,
    matrix_signal: np.ndarray,
    matrix_idler: np.ndarray | None = None,
    z_label: float | None = None,
) -> TwoPhotonAmplitude:
    """Map a position-domain amplitude through per-arm ray-transfer matrices.

    The output grid spacing follows the optical magnification, so source and
    detection planes of very different size are handled without aliasing.
    The result is defined up to a constant global phase.
    """
    if tpa.domain is not Domain.POSITION:
        raise DomainError("propagate_abcd expects a position-domain amplitude")
    if not (tpa.axis_signal.is_centered and tpa.axis_idler.is_centered):
        raise DomainError("propagate_abcd requires centred axes")
    ms = np.asarray(matrix_signal, dtype=float)
    mi = ms if matrix_idler is None else np.asarray(matrix_idler, dtype=float)
    values, ax_s = _abcd_one_arm(tpa.values, 0, tpa.axis_signal, tpa.k_signal, ms, "signal")
    values, ax_i = _abcd_one_arm(values, 1, tpa.axis_idler, tpa.k_idler, mi, "idler")
    z = tpa.z_label if z_label is None else z_label
    return replace(tpa, values=values, axis_signal=ax_s, axis_idler=ax_i, z_label=z)
