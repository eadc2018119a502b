"""Matplotlib renderings of the report artifacts.

Each function writes one PNG next to the delimited data it visualizes.
The Agg backend is forced so the CLI runs headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def plot_band_structure(band, path, title=""):
    """Bands over the Brillouin zone, annotated with their Zak phases."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    k = band.k_grid
    for b in range(band.band_count):
        ax.plot(k, band.energies[:, b], lw=1.4)
        mid = band.energies[len(k) // 2, b]
        if band.isolated[b] and np.isfinite(band.zak[b]):
            label = f"$\\gamma_{{{b}}}={band.zak[b]:+.3f}$"
        else:
            label = f"$\\gamma_{{{b}}}$ undefined"
        ax.annotate(label, (k[len(k) // 2], mid), textcoords="offset points",
                    xytext=(4, 4), fontsize=8)
    ax.set_xlabel("$k$")
    ax.set_ylabel("energy [$\\kappa$]")
    ax.set_xlim(0, 2 * np.pi)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_open_spectrum(report, path, title=""):
    """Eigenvalues by index; in-gap states circled, gap windows shaded."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    idx = np.arange(len(report.energies))
    ax.plot(idx, report.energies, ".", ms=3, color="0.3", label="spectrum")
    hit = report.in_gap >= 0
    if hit.any():
        ax.plot(idx[hit], report.energies[hit], "o", mfc="none", mec="k", ms=9,
                label="in-gap states")
    for lo, hi in report.gap_windows:
        if hi > lo:
            ax.axhspan(lo, hi, color="tab:orange", alpha=0.15, lw=0)
    ax.set_xlabel("eigenstate index")
    ax.set_ylabel("energy [$\\kappa$]")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_edge_number_curve(curve, path, title=""):
    """N_edge against eigenenergy; gap windows shaded."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    ax.plot(curve.energies, curve.n_edge, ".", ms=4, color="tab:blue")
    for lo, hi in curve.gap_windows:
        if hi > lo:
            ax.axvspan(lo, hi, color="tab:orange", alpha=0.15, lw=0)
    ax.set_xlabel("energy [$\\kappa$]")
    ax.set_ylabel("$N_\\mathrm{edge}$")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_quench_trace(trace, path, title=""):
    """Heatmap of the site-resolved density p(j, t)."""
    fig, ax = plt.subplots(figsize=(5.6, 3.9))
    sites = np.arange(1, trace.site_count + 1)
    mesh = ax.pcolormesh(sites, trace.times, trace.distribution,
                         shading="nearest", cmap="magma")
    fig.colorbar(mesh, ax=ax, label="$p(j,t)$")
    ax.set_xlabel("site $j$")
    ax.set_ylabel("time [$1/\\kappa$]")
    if title:
        ax.set_title(title)
    _finish(fig, path)
