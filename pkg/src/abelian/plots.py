"""Figures for the report paths: scaling curves, estimator spread, sweep map.

All functions write a PNG next to the caller-chosen path and return the path
actually written.  The Agg backend is forced so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def save_scaling_figure(bench: dict, path: str) -> str:
    """Log-log access counts against group size, with reference slopes."""
    points = bench["points"]
    ns = np.array([pt.n for pt in points], dtype=float)
    totals = np.array([pt.total for pt in points], dtype=float)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(ns, totals, "o-", base=2, label="median accesses")
    anchor = totals[0]
    ax.loglog(ns, anchor * np.sqrt(ns / ns[0]), "--", base=2, label=r"$\sqrt{n}$ reference")
    ax.loglog(ns, anchor * (ns / ns[0]), ":", base=2, label=r"$n$ reference")
    slope = bench.get("slope")
    title = f"{bench['family']} ({bench['mode']}, {bench['model']})"
    if slope is not None:
        title += f" — fitted slope {slope:.3f}"
    ax.set_title(title)
    ax.set_xlabel("group size n")
    ax.set_ylabel("oracle accesses")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_estimate_figure(report: dict, path: str) -> str:
    """Histogram of size estimates with the truth and coverage band marked."""
    qs = np.array([q for q, _ in report["records"]], dtype=float)
    n = report["n"]
    upper = 70.0 * n * max(1.0, float(np.log2(n)))
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.hist(qs, bins=min(40, max(8, len(qs) // 8)), color="#4878a8", alpha=0.85)
    ax.axvline(n, color="black", lw=1.5, label=f"true n = {n}")
    ax.axvline(upper, color="firebrick", lw=1.2, ls="--", label="coverage bound")
    ax.set_title(
        f"size estimates for {report['group']} "
        f"(coverage {report['coverage']:.3f}, {report['trials']} trials)"
    )
    ax.set_xlabel("estimate q")
    ax.set_ylabel("trials")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_sweep_figure(records, path: str) -> str:
    """Access cost against group size for a sweep, colored by outcome."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    colors = {"ok": "#4878a8", "mismatch": "firebrick", "fail": "darkorange"}
    for outcome, color in colors.items():
        pts = [r for r in records if r.outcome == outcome]
        if not pts:
            continue
        sizes = [max(r.products + r.elements, 1) for r in pts]
        ns = [_spec_size(r.group) for r in pts]
        ax.scatter(ns, sizes, s=12, color=color, alpha=0.6, label=outcome)
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("group size n")
    ax.set_ylabel("oracle accesses")
    ax.set_title(f"sweep outcomes over {len(records)} trials")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _spec_size(group: str) -> int:
    from .oracle import parse_group_spec

    n = 1
    for f in parse_group_spec(group):
        n *= f
    return n