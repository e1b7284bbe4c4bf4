"""Schmidt decomposition of a sampled biphoton and related coherence quantities.

The amplitude matrix scaled by sqrt(ds * di) is a finite-dimensional
bipartite state, so its singular values give the Schmidt weights directly.
``purity`` computes tr(rho_s^2) from the reduced density matrix without any
factorisation and serves as the independent check of ``schmidt_number``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, DomainError
from .field import TwoPhotonAmplitude, norm, reverse_index

__all__ = [
    "SchmidtDecomposition",
    "GeometricFit",
    "decompose",
    "schmidt_number",
    "purity",
    "reduced_density",
    "g1_inverted_overlap",
    "parity_classification",
    "fit_geometric",
    "parity_weighted_sum",
]

TRUNCATION = 1e-12
AMBIGUOUS_PARITY = 0.9


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Descending Schmidt weights with grid-orthonormal mode functions.

    ``modes_signal[:, n]`` and ``modes_idler[:, n]`` are sampled on the signal
    and idler axes; Phi = sum_n sqrt(lambda_n) phi_n(x_s) psi_n(x_i).
    """

    lambdas: np.ndarray
    modes_signal: np.ndarray
    modes_idler: np.ndarray
    spacing_signal: float
    spacing_idler: float

    @property
    def rank(self) -> int:
        return int(self.lambdas.size)

    def reconstruct(self) -> np.ndarray:
        return (self.modes_signal * np.sqrt(self.lambdas)) @ self.modes_idler.T


@dataclass(frozen=True)
class GeometricFit:
    lambda0: float
    alpha: float
    rms_residual: float
    n_modes_used: int

    @property
    def normalisation_gap(self) -> float:
        """|lambda0 - (1 - alpha)|; zero for an exactly geometric, normalised spectrum."""
        return abs(self.lambda0 - (1 - self.alpha))


def _check_normalized(tpa: TwoPhotonAmplitude) -> None:
    total = norm(tpa)
    if abs(total - 1) > 1e-8:
        raise DegenerateInputError(f"amplitude must be normalised first (norm = {total:.12g})")


def decompose(tpa: TwoPhotonAmplitude) -> SchmidtDecomposition:
    _check_normalized(tpa)
    ds, di = tpa.axis_signal.spacing, tpa.axis_idler.spacing
    u, s, vh = np.linalg.svd(tpa.values * np.sqrt(ds * di), full_matrices=False)
    lambdas = s**2 / np.sum(s**2)
    keep = lambdas >= TRUNCATION
    lambdas = lambdas[keep] / lambdas[keep].sum()
    # SVD returns V^H; psi_n is the plain transpose so that Phi = U S V^H
    return SchmidtDecomposition(
        lambdas=lambdas,
        modes_signal=u[:, keep] / np.sqrt(ds),
        modes_idler=vh[keep, :].T / np.sqrt(di),
        spacing_signal=ds,
        spacing_idler=di,
    )


def schmidt_number(dec: SchmidtDecomposition) -> float:
    return float(1.0 / np.sum(dec.lambdas**2))


def reduced_density(tpa: TwoPhotonAmplitude) -> np.ndarray:
    """rho_s(x, x') = sum_i Phi(x, x_i) Phi*(x', x_i) di."""
    phi = tpa.values
    return (phi @ phi.conj().T) * tpa.axis_idler.spacing


def purity(tpa: TwoPhotonAmplitude) -> float:
    """tr(rho_s^2) by direct summation over the reduced density matrix."""
    _check_normalized(tpa)
    rho = reduced_density(tpa)
    ds = tpa.axis_signal.spacing
    return float(np.sum(np.abs(rho) ** 2) * ds * ds)


def g1_inverted_overlap(tpa: TwoPhotonAmplitude) -> complex:
    """sum_x G1_s(x, -x) dx: the signal overlapped with its mirror image."""
    if not tpa.axis_signal.is_centered:
        raise DomainError("inversion needs a signal axis centred at 0")
    rho = reduced_density(tpa)
    n = tpa.axis_signal.n
    return complex(np.sum(rho[np.arange(n), reverse_index(n)]) * tpa.axis_signal.spacing)


def parity_classification(dec: SchmidtDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Parity +1/-1 of each signal mode and the magnitude of its mirror overlap.

    The overlap sum_x phi(x) phi*(-x) dx is +-1 for modes of definite parity;
    a score below 0.9 flags a mode whose parity is mixed, typically by a
    near-degenerate partner.
    """
    phi = dec.modes_signal
    mirrored = phi[reverse_index(phi.shape[0]), :]
    overlap = np.sum(phi * mirrored.conj(), axis=0) * dec.spacing_signal
    parities = np.where(overlap.real >= 0, 1, -1)
    return parities, np.abs(overlap)


def parity_weighted_sum(dec: SchmidtDecomposition) -> float:
    """sum_n pi_n lambda_n, the visibility predicted from the Schmidt spectrum."""
    parities, _ = parity_classification(dec)
    return float(np.sum(parities * dec.lambdas))


def fit_geometric(lambdas, n_modes: int = 10) -> GeometricFit:
    """Least-squares line through log(lambda_m) for the leading ``n_modes`` weights."""
    lam = np.asarray(lambdas, dtype=float)[:n_modes]
    lam = lam[lam > 0]
    if n_modes < 3 or lam.size < 3:
        raise DegenerateInputError("need at least 3 positive eigenvalues for a geometric fit")
    m = np.arange(lam.size)
    slope, intercept = np.polyfit(m, np.log(lam), 1)
    fitted = np.exp(intercept + slope * m)
    rel = (fitted - lam) / lam
    return GeometricFit(
        lambda0=float(np.exp(intercept)),
        alpha=float(np.exp(slope)),
        rms_residual=float(np.sqrt(np.mean(rel**2))),
        n_modes_used=int(lam.size),
    )
