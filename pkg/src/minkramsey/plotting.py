"""SVG figures for search runs and bisector experiments (presentation only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

COLOURS = ("tab:red", "tab:blue")

# fixed metadata keeps the SVG bytes reproducible
_SVG_META = {"Date": None, "Creator": None}


def _save(fig, path) -> Path:
    path = Path(path)
    plt.rcParams["svg.hashsalt"] = "minkramsey"
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return path


def plot_search(result, path) -> Path:
    """Monochromatic segments I_0, I_1, ... and the certified copy."""
    fig, ax = plt.subplots(figsize=(6, 6))
    for i, seg in enumerate(result.segments):
        xy = np.array([seg.a, seg.b])
        ax.plot(xy[:, 0], xy[:, 1], color=COLOURS[seg.colour], lw=1.5, alpha=0.8)
        mid = xy.mean(axis=0)
        ax.annotate(f"$I_{{{i}}}$", mid, fontsize=7, xytext=(3, 3), textcoords="offset points")
    cert = result.certificate
    pts = cert.sequence.points
    ax.plot(pts[:, 0], pts[:, 1], "o", ms=4, color=COLOURS[cert.colour], mec="black", mew=0.5,
            label=f"copy, colour {cert.colour}")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_title(f"q = {cert.sequence.q:g}, oracle {cert.oracle}", fontsize=9)
    ax.legend(fontsize=8, loc="best")
    return _save(fig, path)


def plot_bisectors(traces, path, intersections=None, window=None) -> Path:
    """Traced bisector curves, their sites, and intersection markers."""
    fig, ax = plt.subplots(figsize=(6, 6))
    palette = ("tab:blue", "tab:orange", "tab:green", "tab:purple")
    for i, tr in enumerate(traces):
        c = palette[i % len(palette)]
        for piece in tr.pieces():
            ax.plot(piece[:, 0], piece[:, 1], color=c, lw=1.2)
        sites = np.array([tr.spec.y1, tr.spec.y2])
        ax.plot(sites[:, 0], sites[:, 1], "s", color=c, ms=5, label=f"sites {i + 1} (p = {tr.spec.p:g})")
    if intersections is not None and intersections.count:
        P = intersections.points
        ax.plot(P[:, 0], P[:, 1], "x", color="black", ms=8, mew=2, label="intersections")
    if window is not None:
        ax.set_xlim(window[0], window[1])
        ax.set_ylim(window[2], window[3])
    ax.set_aspect("equal")
    ax.legend(fontsize=8, loc="best")
    return _save(fig, path)
