"""Named experiments driven by a ``Scenario``.

Each detection plane sits a distance z behind the lens; the lens itself is
``optics.lens_position`` behind the crystal.  Both photons see the same
chain, which is evaluated as one canonical transform per plane.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import interferometer as ifm
from . import measures, schmidt
from .errors import MeasurementError
from .field import Axis, Domain, TwoPhotonAmplitude, to_position
from .optics import FreeSpace, ThinLens, propagate_abcd, ray_matrix
from .scenario import Scenario
from .spdc import build_double_gaussian, build_spdc, default_momentum_axis, double_gaussian_axis

__all__ = [
    "ScanResult",
    "worker_count",
    "source_state",
    "detection_matrix",
    "state_at",
    "momentum_state_at",
    "sweep_positions",
    "fedorov_point",
    "schmidt_point",
    "run_fedorov_scan",
    "run_schmidt_scan",
    "run_modes",
    "run_phase_scan",
    "run_amplitude_dump",
    "decimate",
]

log = logging.getLogger(__name__)

WORKERS_ENV = "BIPHOTON_WORKERS"
MAX_DUMP = 256

FEDOROV_COLUMNS = ("z_mm", "width_unconditional_um", "width_conditional_um", "R")
SCHMIDT_COLUMNS = ("z_mm", "K_svd", "K_visibility", "P_plus", "P_minus", "geometric_alpha")


@dataclass
class ScanResult:
    """Rows for one CSV file plus anything worth recording in the run summary."""

    columns: tuple
    rows: list
    summary: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", WORKERS_ENV, raw)
    return os.cpu_count() or 1


def _map(fn, items):
    """Ordered parallel map; results come back in input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def source_state(scenario: Scenario) -> TwoPhotonAmplitude:
    """Normalised source amplitude in the position representation."""
    g = scenario.grid
    if scenario.model == "double_gaussian":
        params = scenario.double_gaussian
        axis = double_gaussian_axis(params, g.n, g.momentum_halfwidth_factor)
        mom = build_double_gaussian(params, axis, k=scenario.spdc.k_signal)
    else:
        axis = default_momentum_axis(scenario.spdc, g.n, g.momentum_halfwidth_factor)
        mom = build_spdc(scenario.spdc, axis)
    return to_position(mom)


def detection_matrix(scenario: Scenario, z: float) -> np.ndarray:
    o = scenario.optics
    return ray_matrix([FreeSpace(o.lens_position), ThinLens(o.lens_focal), FreeSpace(z)])


def state_at(scenario: Scenario, z: float, source: TwoPhotonAmplitude | None = None) -> TwoPhotonAmplitude:
    """Position-domain amplitude at the detection plane z behind the lens."""
    src = source_state(scenario) if source is None else source
    return propagate_abcd(src, detection_matrix(scenario, z), z_label=z)


def momentum_state_at(scenario: Scenario, z: float, source: TwoPhotonAmplitude | None = None) -> TwoPhotonAmplitude:
    """Transverse-wavevector amplitude at plane z.

    The momentum representation of a plane is the position representation
    behind an extra unit Fourier stage, so it is evaluated with the same
    rescaling transform instead of an FFT of the (possibly strongly curved)
    position field.
    """
    src = source_state(scenario) if source is None else source
    fourier = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = propagate_abcd(src, fourier @ detection_matrix(scenario, z), z_label=z)
    # coordinate is now p/k; relabel to p in rad/m
    ax_s = Axis(out.axis_signal.n, out.axis_signal.spacing * out.k_signal, 0.0, Domain.MOMENTUM)
    ax_i = Axis(out.axis_idler.n, out.axis_idler.spacing * out.k_idler, 0.0, Domain.MOMENTUM)
    values = out.values / np.sqrt(out.k_signal * out.k_idler)
    return TwoPhotonAmplitude(values, ax_s, ax_i, out.k_signal, out.k_idler, z)


def sweep_positions(scenario: Scenario) -> np.ndarray:
    s = scenario.sweep
    if s.steps == 1:
        return np.array([s.z_start])
    return np.linspace(s.z_start, s.z_stop, s.steps)


def fedorov_point(scenario: Scenario, z: float, source: TwoPhotonAmplitude | None = None) -> measures.FedorovResult:
    return measures.fedorov_ratio(state_at(scenario, z, source), "signal", scenario.detection.slit_fedorov)


def _schmidt_slits(scenario: Scenario, tpa: TwoPhotonAmplitude):
    if scenario.detection.schmidt_slit_mode == "full":
        return None, None
    return ifm.slits_at_marginal_peaks(tpa, scenario.detection.slit_schmidt)


def schmidt_point(scenario: Scenario, z: float, source: TwoPhotonAmplitude | None = None) -> dict:
    tpa = state_at(scenario, z, source)
    dec = schmidt.decompose(tpa)
    k_svd = schmidt.schmidt_number(dec)
    slit_s, slit_i = _schmidt_slits(scenario, tpa)
    p_plus, p_minus = ifm.conditional_rates(ifm.interfere(tpa, 0.0), slit_s, slit_i)
    try:
        k_vis = ifm.schmidt_from_rates(p_plus, p_minus)
    except MeasurementError as exc:
        log.warning("z = %.1f mm: %s", z * 1e3, exc)
        k_vis = None
    try:
        alpha = schmidt.fit_geometric(dec.lambdas, 10).alpha
    except ValueError:
        alpha = None
    return {
        "z": z,
        "K_svd": k_svd,
        "K_visibility": k_vis,
        "P_plus": p_plus,
        "P_minus": p_minus,
        "geometric_alpha": alpha,
        "parity_sum": schmidt.parity_weighted_sum(dec),
    }


def run_fedorov_scan(scenario: Scenario) -> ScanResult:
    source = source_state(scenario)
    zs = sweep_positions(scenario)

    def one(z):
        try:
            return fedorov_point(scenario, z, source)
        except MeasurementError as exc:
            return exc

    rows, warnings = [], []
    for z, res in zip(zs, _map(one, zs)):
        if isinstance(res, Exception):
            warnings.append(f"z = {z * 1e3:.3f} mm: {res}")
            rows.append((z * 1e3, None, None, None))
        else:
            rows.append((z * 1e3, res.width_unconditional * 1e6, res.width_conditional * 1e6, res.ratio))
    valid = [r for r in rows if r[3] is not None]
    summary = {"points": len(rows), "valid_points": len(valid)}
    if valid:
        best = min(valid, key=lambda r: r[3])
        summary.update(R_min=best[3], z_at_R_min_mm=best[0], R_max=max(r[3] for r in valid))
    return ScanResult(FEDOROV_COLUMNS, rows, summary, warnings)


def run_schmidt_scan(scenario: Scenario) -> ScanResult:
    source = source_state(scenario)
    zs = sweep_positions(scenario)
    points = _map(lambda z: schmidt_point(scenario, z, source), zs)
    rows, warnings = [], []
    for pt in points:
        if pt["K_visibility"] is None:
            warnings.append(f"z = {pt['z'] * 1e3:.3f} mm: visibility estimator failed")
        rows.append(
            (pt["z"] * 1e3, pt["K_svd"], pt["K_visibility"], pt["P_plus"], pt["P_minus"], pt["geometric_alpha"])
        )
    k = np.array([pt["K_svd"] for pt in points])
    summary = {
        "points": len(rows),
        "K_svd_mean": float(k.mean()),
        "K_svd_relative_spread": float((k.max() - k.min()) / k.mean()),
        "source_purity": schmidt.purity(source),
    }
    return ScanResult(SCHMIDT_COLUMNS, rows, summary, warnings)


def run_modes(scenario: Scenario, n_modes: int = 3) -> ScanResult:
    """Signal Schmidt modes of the source (position representation) and the spectrum."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    source = source_state(scenario)
    dec = schmidt.decompose(source)
    parities, scores = schmidt.parity_classification(dec)
    warnings = []
    if n_modes > dec.rank:
        warnings.append(f"requested {n_modes} modes but only {dec.rank} exceed the truncation threshold")
        n_modes = dec.rank
    modes = dec.modes_signal[:, :n_modes]
    # fix the arbitrary global phase: largest sample real and positive
    peak = modes[np.argmax(np.abs(modes), axis=0), np.arange(n_modes)]
    modes = modes * (np.abs(peak) / peak)
    columns = ["x_um"]
    for j in range(n_modes):
        columns += [f"phi{j}_re", f"phi{j}_im"]
    x = source.axis_signal.coordinates
    rows = []
    for i in range(x.size):
        row = [x[i] * 1e6]
        for j in range(n_modes):
            row += [modes[i, j].real, modes[i, j].imag]
        rows.append(tuple(row))
    eig_rows = [(j, dec.lambdas[j], int(parities[j]), scores[j]) for j in range(dec.rank)]
    summary = {
        "K_svd": schmidt.schmidt_number(dec),
        "rank": dec.rank,
        "modes_written": n_modes,
        "ambiguous_parity_modes": int(np.sum(scores[:n_modes] < schmidt.AMBIGUOUS_PARITY)),
    }
    extra = {"eigen_columns": ("n", "lambda", "parity", "parity_score"), "eigen_rows": eig_rows}
    return ScanResult(tuple(columns), rows, summary, warnings, extra)


def run_phase_scan(scenario: Scenario, n_thetas: int = 64, z: float | None = None, thetas=None) -> ScanResult:
    """Coincidence rate versus interferometer phase at plane z."""
    if thetas is None:
        if n_thetas < 3:
            raise ValueError("a phase scan needs at least 3 points, or explicit thetas {0, pi}")
        thetas = np.linspace(0.0, 2 * np.pi, n_thetas, endpoint=False)
    else:
        thetas = np.asarray(thetas, dtype=float)
        if thetas.size < 3 and not np.allclose(np.sort(thetas), [0.0, np.pi]):
            raise ValueError("two-point scans must use exactly theta = {0, pi}")
    z = scenario.sweep.z_start if z is None else z
    tpa = state_at(scenario, z)
    slit_s, slit_i = _schmidt_slits(scenario, tpa)
    scan = ifm.phase_scan(tpa, thetas, slit_s, slit_i, "constructive")
    rows = [(t, r) for t, r in zip(scan.thetas, scan.rates)]
    summary = {"z_mm": z * 1e3, "visibility": scan.visibility, "K": scan.k_estimate, "saturated": scan.saturated}
    return ScanResult(("theta_rad", "rate"), rows, summary)


def decimate(tpa: TwoPhotonAmplitude, limit: int = MAX_DUMP):
    """Block-average |Phi|^2 so that neither side exceeds ``limit`` samples."""
    inten = tpa.intensity
    fs = max(1, tpa.axis_signal.n // limit)
    fi = max(1, tpa.axis_idler.n // limit)
    ns, ni = tpa.axis_signal.n // fs, tpa.axis_idler.n // fi
    blocks = inten[: ns * fs, : ni * fi].reshape(ns, fs, ni, fi).mean(axis=(1, 3))
    xs = tpa.axis_signal.coordinates[: ns * fs].reshape(ns, fs).mean(axis=1)
    xi = tpa.axis_idler.coordinates[: ni * fi].reshape(ni, fi).mean(axis=1)
    return xs, xi, blocks


def run_amplitude_dump(scenario: Scenario, z: float, domain: str = "position") -> ScanResult:
    if domain == "position":
        tpa = state_at(scenario, z)
        scale, columns = 1e6, ("x_signal_um", "x_idler_um", "intensity")
    elif domain == "momentum":
        tpa = momentum_state_at(scenario, z)
        scale, columns = 1.0, ("p_signal_rad_per_m", "p_idler_rad_per_m", "intensity")
    else:
        raise ValueError(f"domain must be 'position' or 'momentum', got {domain!r}")
    xs, xi, blocks = decimate(tpa)
    rows = [(xs[a] * scale, xi[b] * scale, blocks[a, b]) for a in range(xs.size) for b in range(xi.size)]
    summary = {
        "z_mm": z * 1e3,
        "domain": domain,
        "shape": list(blocks.shape),
        "intensity_correlation": measures.intensity_correlation(tpa),
    }
    return ScanResult(columns, rows, summary, extra={"tpa": tpa})
