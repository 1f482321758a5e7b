"""Matplotlib figure output for the CLI report paths."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_cloud_figure(points: np.ndarray, path: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(points.real, points.imag, s=0.05, marker=".", linewidths=0, color="k")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tiling_figure(groups: list[tuple[np.ndarray, int]], path: str) -> None:
    """Clouds of window translates, shaded by translate class."""
    cmap = plt.get_cmap("Greys")
    fig, ax = plt.subplots(figsize=(6, 6))
    for pts, level in groups:
        ax.scatter(
            pts.real,
            pts.imag,
            s=0.05,
            marker=".",
            linewidths=0,
            color=cmap(0.45 + 0.18 * (level % 3)),
        )
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_spectrum_figure(ks, intensities, path: str, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.vlines(ks, 0.0, intensities, color="k", linewidth=0.8)
    ax.plot(ks, intensities, "k.", markersize=3)
    ax.set_xlabel("k")
    ax.set_ylabel("intensity")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
