"""Figures written next to the CSV output of each experiment."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ScanResult  # noqa: E402

DPI = 150


def _column(result: ScanResult, name: str) -> np.ndarray:
    j = result.columns.index(name)
    return np.array([np.nan if r[j] is None else r[j] for r in result.rows], dtype=float)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def fedorov_figure(result: ScanResult, path, schmidt: ScanResult | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    z = _column(result, "z_mm")
    ax.plot(z, _column(result, "R"), "o-", color="tab:blue", ms=3, label="Fedorov ratio R")
    if schmidt is not None:
        ax.plot(_column(schmidt, "z_mm"), _column(schmidt, "K_svd"), "-", color="tab:red", label="K (SVD)")
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("detector distance z behind lens (mm)")
    ax.set_ylabel("R")
    ax.legend(frameon=False)
    return _save(fig, path)


def schmidt_figure(result: ScanResult, path) -> Path:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    z = _column(result, "z_mm")
    ax.plot(z, _column(result, "K_svd"), "-", color="tab:red", label="K from SVD")
    ax.plot(z, _column(result, "K_visibility"), "o", color="k", mfc="none", ms=4, label="K from visibility")
    ax.set_xlabel("detector distance z behind lens (mm)")
    ax.set_ylabel("Schmidt number")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False)
    return _save(fig, path)


def modes_figure(result: ScanResult, path) -> Path:
    eig = np.array([r[1] for r in result.extra["eigen_rows"]])
    x = _column(result, "x_um")
    n_modes = (len(result.columns) - 1) // 2
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6))
    for j in range(n_modes):
        ax0.plot(x, _column(result, f"phi{j}_re"), label=f"mode {j}")
    ax0.set_xlabel("x (um)")
    ax0.set_ylabel("Re phi_n")
    ax0.legend(frameon=False)
    m = min(eig.size, 60)
    ax1.semilogy(np.arange(m), eig[:m], "o", ms=3)
    ax1.set_xlabel("mode index n")
    ax1.set_ylabel("lambda_n")
    return _save(fig, path)


def phase_scan_figure(result: ScanResult, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    ax.plot(_column(result, "theta_rad"), _column(result, "rate"), "o-", ms=3)
    ax.set_xlabel("interferometer phase (rad)")
    ax.set_ylabel("coincidence probability, constructive port")
    vis = result.summary.get("visibility")
    if vis is not None:
        ax.set_title(f"visibility {vis:.4f}, K = {result.summary['K']:.3f}")
    return _save(fig, path)


def amplitude_figure(result: ScanResult, path) -> Path:
    xs = np.unique(_column(result, result.columns[0]))
    xi = np.unique(_column(result, result.columns[1]))
    img = _column(result, "intensity").reshape(xs.size, xi.size)
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    mesh = ax.pcolormesh(xi, xs, img, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax)
    ax.set_xlabel(result.columns[1])
    ax.set_ylabel(result.columns[0])
    ax.set_title(f"|Phi|^2 at z = {result.summary['z_mm']:.0f} mm")
    return _save(fig, path)
