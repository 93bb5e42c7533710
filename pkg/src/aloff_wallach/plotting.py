"""Figures rendered from the same tables the CLI writes as CSV."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_sweep(rows: list[dict], path: str, vary: str = "A", title: str = "") -> None:
    """The irreducible branches +/- a and the reducible b against the varied parameter."""
    x = np.array([r["param_value"] for r in rows])
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(x, [r["a_plus"] for r in rows], color="C0", label="irreducible, a > 0")
    ax.plot(x, [r["a_minus"] for r in rows], color="C0", ls="--", label="irreducible, a < 0")
    ax.axhline(0.0, color="C3", lw=1.5, label="reducible, a = 0")
    ax.set_xlabel(vary)
    ax.set_ylabel("a")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_landscape(land, path: str, title: str = "", levels: int = 40) -> None:
    """Level sets of the energy in the (a, b) plane with critical points marked by index."""
    fig, ax = plt.subplots(figsize=(5.5, 5))
    A, B = np.meshgrid(land.a_values, land.b_values, indexing="ij")
    ax.contour(A, B, np.log(land.energy), levels=levels, cmap="viridis", linewidths=0.7)
    markers = {0: ("o", "C3", "minimum"), 1: ("x", "k", "saddle"), 2: ("^", "C1", "maximum")}
    used = set()
    for pt in land.critical_points:
        m, c, label = markers.get(pt.index, ("s", "C4", f"index {pt.index}"))
        a = getattr(pt.conn, land.a_name)
        ax.plot(a, pt.conn.b, m, color=c, ms=7, label=None if label in used else label)
        used.add(label)
    ax.set_xlabel(land.a_name)
    ax.set_ylabel("b")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
