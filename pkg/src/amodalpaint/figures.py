"""Matplotlib renderings of sweep and report summaries (Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_sweep_figure(groups: list[dict], path) -> None:
    """Line plot of mIoU against strength, one line per occlusion bin."""
    bins = sorted({g["bin"] for g in groups})
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for name in bins:
        rows = sorted(
            (g for g in groups if g["bin"] == name), key=lambda g: g["strength"]
        )
        ax.plot(
            [g["strength"] for g in rows],
            [g["miou"] for g in rows],
            marker="o",
            label=f"{name} (n={rows[0]['n']})",
        )
    ax.set_xlabel("strength r")
    ax.set_ylabel("mIoU")
    ax.set_ylim(0.0, 1.05)
    ax.set_title("Amodal mIoU vs inpainting strength")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_report_figure(report: dict, path) -> None:
    """Bar chart of mean occluded-pixel ratios plus per-scene scatter."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.5, 3.8))
    means = [
        report["primary_occluded_ratio_mean"],
        report["secondary_occluded_ratio_mean"] or 0.0,
    ]
    ax1.bar(["primary", "secondary"], means, color=["#d95f02", "#7570b3"])
    ax1.set_ylabel("mean occluded-pixel ratio")
    ax1.set_ylim(0.0, 1.0)
    ax1.set_title(f"Region coverage (n={report['n']})")
    for i, v in enumerate(means):
        ax1.text(i, v + 0.02, f"{v:.3f}", ha="center")

    records = report["records"]
    xs = [r["scene"] for r in records]
    ax2.scatter(
        xs,
        [r["primary_occluded_ratio"] for r in records],
        s=12,
        color="#d95f02",
        label="primary",
    )
    pts = [
        (r["scene"], r["secondary_occluded_ratio"])
        for r in records
        if r["secondary_occluded_ratio"] is not None
    ]
    if pts:
        ax2.scatter(
            [p[0] for p in pts],
            [p[1] for p in pts],
            s=12,
            color="#7570b3",
            label="secondary",
        )
    ax2.set_xlabel("scene")
    ax2.set_ylabel("occluded-pixel ratio")
    ax2.set_ylim(-0.05, 1.05)
    ax2.grid(alpha=0.3)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
