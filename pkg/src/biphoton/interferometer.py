"""Ideal Mach-Zehnder with an image inversion in one arm of the signal channel.

In the 1D reduction one arm passes the signal unchanged and the other mirrors
it (x_s -> -x_s).  The two output ports carry

    c = (Phi(x_s, x_i) + e^{i theta} Phi(-x_s, x_i)) / 2
    d = (Phi(x_s, x_i) - e^{i theta} Phi(-x_s, x_i)) / 2

and the integrated coincidence rates P+- give K = (P+ + P-) / (P+ - P-).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError, PortLabelError, SaturationError
from .field import Axis, Domain, TwoPhotonAmplitude, reverse_index
from .measures import slit_window, marginal

__all__ = [
    "Slit",
    "PortIntensities",
    "PhaseScan",
    "invert_arm",
    "interfere",
    "conditional_rates",
    "single_rates",
    "schmidt_from_rates",
    "phase_scan",
    "slits_at_marginal_peaks",
]

# relative visibility below which K is reported as unbounded
VISIBILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class Slit:
    """Detection window ``center +- width/2``; ``None`` in its place means the full grid."""

    center: float
    width: float


@dataclass(frozen=True, eq=False)
class PortIntensities:
    p_constructive: np.ndarray
    p_destructive: np.ndarray
    theta: float
    axis_signal: Axis
    axis_idler: Axis


@dataclass(frozen=True, eq=False)
class PhaseScan:
    thetas: np.ndarray
    rates: np.ndarray
    visibility: float
    k_estimate: float
    saturated: bool = False


def _require_inversion_ready(tpa: TwoPhotonAmplitude, arm: str = "signal") -> None:
    if tpa.domain is not Domain.POSITION:
        raise DomainError("the interferometer acts on position-domain amplitudes")
    if not tpa.axis(arm).is_centered:
        raise DomainError(f"inversion needs the {arm} axis centred at 0")


def invert_arm(tpa: TwoPhotonAmplitude, arm: str = "signal") -> TwoPhotonAmplitude:
    """Mirror one coordinate about the grid centre by index reversal."""
    _require_inversion_ready(tpa, arm)
    index = 0 if arm == "signal" else 1
    n = tpa.values.shape[index]
    return tpa.with_values(np.take(tpa.values, reverse_index(n), axis=index))


def interfere(tpa: TwoPhotonAmplitude, theta: float = 0.0) -> PortIntensities:
    mirrored = invert_arm(tpa, "signal").values
    shifted = np.exp(1j * theta) * mirrored
    c = (tpa.values + shifted) / 2
    d = (tpa.values - shifted) / 2
    return PortIntensities(np.abs(c) ** 2, np.abs(d) ** 2, theta, tpa.axis_signal, tpa.axis_idler)


def _indices(axis: Axis, slit: Slit | None) -> np.ndarray:
    if slit is None:
        return np.arange(axis.n)
    return slit_window(axis, slit.center, slit.width)


def conditional_rates(
    ports: PortIntensities, slit_signal: Slit | None = None, slit_idler: Slit | None = None
) -> tuple[float, float]:
    """Coincidence probabilities (P+, P-) through the two slits; ``None`` integrates the whole grid."""
    js = _indices(ports.axis_signal, slit_signal)
    ji = _indices(ports.axis_idler, slit_idler)
    cell = ports.axis_signal.spacing * ports.axis_idler.spacing
    sel = np.ix_(js, ji)
    return float(ports.p_constructive[sel].sum() * cell), float(ports.p_destructive[sel].sum() * cell)


def single_rates(ports: PortIntensities, slit_signal: Slit | None = None) -> tuple[float, float]:
    """Signal-only rates at both ports, the idler traced out."""
    return conditional_rates(ports, slit_signal, None)


def schmidt_from_rates(p_plus: float, p_minus: float) -> float:
    if p_plus < 0 or p_minus < 0:
        raise ValueError("rates must be nonnegative")
    total = p_plus + p_minus
    if total <= 0:
        raise DegenerateInputError("no counts at either port")
    diff = p_plus - p_minus
    if abs(diff) <= VISIBILITY_FLOOR * total:
        raise SaturationError("P+ equals P-: visibility below the numeric floor")
    if diff < 0:
        raise PortLabelError("P- exceeds P+: constructive and destructive ports swapped")
    return total / diff


def slits_at_marginal_peaks(tpa: TwoPhotonAmplitude, width: float) -> tuple[Slit, Slit]:
    out = []
    for arm in ("signal", "idler"):
        m = marginal(tpa, arm)
        out.append(Slit(float(m.coordinates[int(np.argmax(m.weights))]), width))
    return out[0], out[1]


def phase_scan(
    tpa: TwoPhotonAmplitude,
    thetas,
    slit_signal: Slit | None = None,
    slit_idler: Slit | None = None,
    monitored_port: str = "constructive",
) -> PhaseScan:
    """Coincidence rate at one port versus interferometer phase, and its visibility."""
    thetas = np.asarray(thetas, dtype=float)
    if thetas.size < 2:
        raise ValueError("a phase scan needs at least two phases")
    if monitored_port not in ("constructive", "destructive"):
        raise ValueError(f"unknown port {monitored_port!r}")
    _require_inversion_ready(tpa)
    rates = np.empty(thetas.size)
    for j, theta in enumerate(thetas):
        p_plus, p_minus = conditional_rates(interfere(tpa, theta), slit_signal, slit_idler)
        rates[j] = p_plus if monitored_port == "constructive" else p_minus
    hi, lo = rates.max(), rates.min()
    if hi + lo <= 0:
        raise DegenerateInputError("zero coincidence rate over the whole scan")
    visibility = float((hi - lo) / (hi + lo))
    saturated = visibility <= VISIBILITY_FLOOR
    k = float("inf") if saturated else 1.0 / visibility
    return PhaseScan(thetas, rates, visibility, k, saturated)
