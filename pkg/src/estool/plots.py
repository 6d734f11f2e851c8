"""Figure rendering for the CLI report path.

Every report command writes its delimited output first and then calls
one of these helpers to drop a PNG next to it. Rendering is headless
(Agg) and deterministic apart from matplotlib's own versioning.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .analysis import SweepCurve


def save_sweep_figure(curve: SweepCurve, path, xlabel: str = "threshold",
                      ylabel: str = "mean event rate") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.parameters, curve.values, marker="o")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_entropy_figure(curves: dict[str, SweepCurve], path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for kind, curve in curves.items():
        ax.plot(curve.parameters, curve.values, marker="o", label=kind)
    ax.set_xlabel("steps")
    ax.set_ylabel("mean 2-D entropy (bits)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_histogram_figure(counts, edges, path, xlabel: str = "event rate") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    widths = [b - a for a, b in zip(edges[:-1], edges[1:])]
    ax.bar(edges[:-1], counts, width=widths, align="edge", edgecolor="black", alpha=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("samples")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_cost_figure(adds: float, mults: float, total_pj: float, per_frame_pj: float,
                     title: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(["FP32 +", "FP32 x"], [adds, mults], color=["tab:blue", "tab:orange"])
    ax.set_ylabel("operand count")
    ax.set_title(f"{title}\n{total_pj:.3e} pJ total, {per_frame_pj:.3e} pJ/frame")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
