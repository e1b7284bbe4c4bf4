"""Intensity distributions, Gaussian width fits, Fedorov ratio and EPR witness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, MeasurementError
from .field import Axis, Distribution1D, Domain, TwoPhotonAmplitude, to_momentum, to_position

__all__ = [
    "GaussianFit",
    "FedorovResult",
    "EprWitness",
    "marginal",
    "conditional",
    "slit_average",
    "slit_window",
    "intensity_correlation",
    "fit_gaussian",
    "fedorov_ratio",
    "epr_witness",
]

MAX_ITERATIONS = 200
TOLERANCE = 1e-8
# products this close to 1/2 are treated as sitting on the bound
EPR_TOLERANCE = 1e-6


@dataclass(frozen=True)
class GaussianFit:
    """Least-squares fit of amplitude * exp(-(x - center)^2 / (2 sigma^2)) + offset."""

    amplitude: float
    center: float
    sigma: float
    offset: float
    rms_residual: float
    converged: bool
    iterations: int = 0


@dataclass(frozen=True)
class FedorovResult:
    width_unconditional: float
    width_conditional: float
    ratio: float
    fixed_coordinate: float
    fit_unconditional: GaussianFit | None = None
    fit_conditional: GaussianFit | None = None


@dataclass(frozen=True)
class EprWitness:
    delta_x: float
    delta_p: float
    product: float
    violated: bool


def _other(arm: str) -> str:
    if arm not in ("signal", "idler"):
        raise ValueError(f"arm must be 'signal' or 'idler', got {arm!r}")
    return "idler" if arm == "signal" else "signal"


def marginal(tpa: TwoPhotonAmplitude, arm: str = "signal") -> Distribution1D:
    """Unconditional distribution: |Phi|^2 integrated over the partner coordinate."""
    other = _other(arm)
    index = 1 if arm == "signal" else 0
    weights = tpa.intensity.sum(axis=index) * tpa.axis(other).spacing
    return Distribution1D(tpa.axis(arm), weights)


def slit_window(axis: Axis, center: float, width: float) -> np.ndarray:
    """Indices of the samples covered by a slit; the nearest one if the slit is narrower than a sample."""
    x = axis.coordinates
    if not (x[0] - width / 2 <= center <= x[-1] + width / 2):
        raise ValueError(f"slit at {center:g} lies outside the grid")
    if width <= axis.spacing:
        return np.array([axis.index_of(center)])
    idx = np.flatnonzero(np.abs(x - center) <= width / 2 + 1e-9 * axis.spacing)
    if idx.size == 0:
        raise ValueError(f"slit at {center:g} covers no samples")
    return idx


def conditional(
    tpa: TwoPhotonAmplitude, arm: str, fixed_value: float, slit_width: float = 0.0
) -> Distribution1D:
    """Distribution of ``arm`` given the partner detected through a slit at ``fixed_value``.

    Normalised to unit integral.
    """
    if slit_width < 0:
        raise ValueError("slit width must be >= 0")
    other = _other(arm)
    partner = tpa.axis(other)
    if not partner.coordinates[0] <= fixed_value <= partner.coordinates[-1]:
        raise ValueError(f"fixed coordinate {fixed_value:g} outside the {other} grid")
    cols = slit_window(partner, fixed_value, slit_width)
    intensity = tpa.intensity if arm == "signal" else tpa.intensity.T
    return Distribution1D(tpa.axis(arm), intensity[:, cols].mean(axis=1)).normalized()


def slit_average(dist: Distribution1D, slit_width: float) -> Distribution1D:
    """Box-average a profile over a scanning slit (odd number of samples)."""
    half = int(round(slit_width / (2 * dist.axis.spacing)))
    if half == 0:
        return dist
    kernel = np.ones(2 * half + 1) / (2 * half + 1)
    return Distribution1D(dist.axis, np.convolve(dist.weights, kernel, mode="same"))


def _gaussian(x, a, x0, s, b):
    return a * np.exp(-((x - x0) ** 2) / (2 * s**2)) + b


def _jacobian(x, a, x0, s, b):
    g = np.exp(-((x - x0) ** 2) / (2 * s**2))
    return np.column_stack([g, a * g * (x - x0) / s**2, a * g * (x - x0) ** 2 / s**3, np.ones_like(x)])


def fit_gaussian(dist: Distribution1D) -> GaussianFit:
    """Damped Gauss-Newton (Levenberg-Marquardt) fit of a Gaussian plus offset.

    Starts from the sample moments of the background-subtracted profile.
    Coordinates and weights are rescaled to order one internally.  Flat input
    is reported with ``converged=False`` rather than raised.
    """
    x = dist.coordinates
    y = dist.weights
    if x.size < 8:
        raise DegenerateInputError("need at least 8 samples for a Gaussian fit")
    nan = float("nan")
    floor, peak = float(y.min()), float(y.max())
    if peak - floor <= 1e-14 * max(abs(peak), 1e-300):
        return GaussianFit(nan, nan, nan, nan, nan, False)

    w = y - floor
    mean = float(np.sum(x * w) / np.sum(w))
    rms = float(np.sqrt(np.sum((x - mean) ** 2 * w) / np.sum(w)))
    if not rms > 0:
        rms = dist.axis.spacing
    # work in u = (x - mean) / rms, v = y / peak
    u = (x - mean) / rms
    v = y / peak
    theta = np.array([(peak - floor) / peak, 0.0, 1.0, floor / peak])
    r = _gaussian(u, *theta) - v
    cost = float(r @ r)
    damping = 1e-3
    converged = False
    it = 0
    for it in range(1, MAX_ITERATIONS + 1):
        jac = _jacobian(u, *theta)
        jtj = jac.T @ jac
        grad = jac.T @ r
        try:
            step = np.linalg.solve(jtj + damping * np.diag(np.diag(jtj) + 1e-30), -grad)
        except np.linalg.LinAlgError:
            break
        trial = theta + step
        r_trial = _gaussian(u, *trial) - v
        cost_trial = float(r_trial @ r_trial)
        if np.isfinite(cost_trial) and cost_trial <= cost:
            small = np.linalg.norm(step) <= TOLERANCE * (np.linalg.norm(trial) + TOLERANCE)
            theta, r, cost = trial, r_trial, cost_trial
            damping = max(damping / 3, 1e-12)
            if small:
                converged = True
                break
        else:
            damping *= 4
            if damping > 1e12:
                # no downhill direction left: a stationary point unless the gradient is large
                converged = np.linalg.norm(grad) <= 1e-10 * max(1.0, cost)
                break

    a, u0, s, b = theta
    sigma = abs(s) * rms
    if not (np.isfinite(sigma) and sigma > 0):
        converged = False
    rms_residual = float(np.sqrt(cost / u.size) * peak)
    return GaussianFit(
        amplitude=float(a * peak),
        center=float(mean + u0 * rms),
        sigma=float(sigma),
        offset=float(b * peak),
        rms_residual=rms_residual,
        converged=bool(converged),
        iterations=it,
    )


def _require(fit: GaussianFit, what: str) -> GaussianFit:
    if not fit.converged:
        raise MeasurementError(
            f"Gaussian fit of the {what} distribution did not converge "
            f"(sigma={fit.sigma:.4g}, rms residual={fit.rms_residual:.3g}, iterations={fit.iterations})"
        )
    return fit


def fedorov_ratio(
    tpa: TwoPhotonAmplitude,
    arm: str = "signal",
    slit_width: float = 0.0,
    fixed_value: float | None = None,
) -> FedorovResult:
    """Ratio of unconditional to conditional fitted width for ``arm``.

    The partner slit sits at ``fixed_value``, by default the peak of the
    partner's marginal.  A nonzero ``slit_width`` also averages both profiles
    over the scanning slit.
    """
    other = _other(arm)
    if fixed_value is None:
        partner = marginal(tpa, other)
        fixed_value = float(partner.coordinates[int(np.argmax(partner.weights))])
    uncond = slit_average(marginal(tpa, arm), slit_width)
    cond = slit_average(conditional(tpa, arm, fixed_value, slit_width), slit_width)
    fit_u = _require(fit_gaussian(uncond), "unconditional")
    fit_c = _require(fit_gaussian(cond), "conditional")
    return FedorovResult(
        width_unconditional=fit_u.sigma,
        width_conditional=fit_c.sigma,
        ratio=fit_u.sigma / fit_c.sigma,
        fixed_coordinate=fixed_value,
        fit_unconditional=fit_u,
        fit_conditional=fit_c,
    )


def epr_witness(tpa_source: TwoPhotonAmplitude, arm: str = "signal") -> EprWitness:
    """Product of conditional position and momentum widths of the source state.

    In (m, rad/m) units the separability bound reads delta_x * delta_p >= 1/2.
    A product within a relative ``EPR_TOLERANCE`` of the bound is not a violation.
    """
    if tpa_source.domain is Domain.POSITION:
        pos, mom = tpa_source, to_momentum(tpa_source)
    else:
        pos, mom = to_position(tpa_source), tpa_source
    dx = fedorov_ratio(pos, arm).width_conditional
    dp = fedorov_ratio(mom, arm).width_conditional
    product = dx * dp
    return EprWitness(delta_x=dx, delta_p=dp, product=product, violated=bool(product < 0.5 * (1 - EPR_TOLERANCE)))


def intensity_correlation(tpa: TwoPhotonAmplitude) -> float:
    """Pearson correlation of the signal and idler coordinates under |Phi|^2."""
    w = tpa.intensity
    w = w / w.sum()
    xs = tpa.axis_signal.coordinates[:, None]
    xi = tpa.axis_idler.coordinates[None, :]
    ms, mi = float((w * xs).sum()), float((w * xi).sum())
    cov = float((w * (xs - ms) * (xi - mi)).sum())
    vs = float((w * (xs - ms) ** 2).sum())
    vi = float((w * (xi - mi) ** 2).sum())
    return cov / np.sqrt(vs * vi)
