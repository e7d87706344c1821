"""Static SVG figures for studies and computed fields."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import matplotlib.tri as mtri  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import ReportIOError, StudyReport, fitted_rate  # noqa: E402
from .fem import FeFunction  # noqa: E402

KINDS = ("error-curve", "solution-1d", "error-surface-2d")


def _save(fig, path):
    path = Path(path)
    try:
        fig.savefig(path, format="svg", bbox_inches="tight")
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or exc) from exc
    finally:
        plt.close(fig)
    return path


def _error_curve(report: StudyReport, ax):
    h = report.column("h")
    series = [
        ("Jh_interp", r"$J_h^\alpha(I_h u)$", "o-"),
        ("Jh_min", r"$J_h^\alpha(u_h)$", "s--"),
        ("linf_error", r"$\|u-u_h\|_\infty$", "^:"),
    ]
    fitted = None
    for name, label, style in series:
        vals = report.column(name)
        ok = np.isfinite(vals) & (vals > 0)
        if not ok.any():
            continue
        if ok.sum() >= 2:
            rate = fitted_rate(h[ok], vals[ok])
            label = f"{label}, slope {rate:.2f}"
            if fitted is None:
                fitted = rate
        ax.loglog(h[ok], vals[ok], style, label=label)
    ax.set_xlabel("h")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"{report.problem_name}, alpha = {report.alpha:.4g}, P{report.degree}")
    return fitted


def emit_plot(data, path, kind: str = "error-curve", exact=None, xlim=(0.0, 0.4)):
    """Write an SVG figure.

    ``error-curve`` takes a :class:`StudyReport`; ``solution-1d`` takes one
    FeFunction or a list of them and overlays ``exact`` if given;
    ``error-surface-2d`` takes a P1 FeFunction and ``exact`` and colours
    |u - u_h| per vertex.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {KINDS}")
    fig, ax = plt.subplots(figsize=(6, 4.5))

    if kind == "error-curve":
        if not isinstance(data, StudyReport) or not data.rows:
            plt.close(fig)
            raise ValueError("error-curve needs a nonempty StudyReport")
        _error_curve(data, ax)
        return _save(fig, path)

    funcs = [data] if isinstance(data, FeFunction) else list(data)
    if not funcs:
        plt.close(fig)
        raise ValueError("nothing to plot")

    if kind == "solution-1d":
        for f in funcs:
            x = f.space.dof_coords[:, 0]
            order = np.argsort(x)
            ax.plot(x[order], f.coeffs[order], "o--", ms=3, lw=0.8,
                    label=f"h = {f.space.mesh.h:.4g}")
        if exact is not None:
            xs = np.linspace(xlim[0], xlim[1], 400)
            ax.plot(xs, exact(xs[:, None]), "k-", lw=1.5, label="exact")
        ax.set_xlim(*xlim)
        ax.set_xlabel("x")
        ax.legend(loc="best", fontsize=8)
        return _save(fig, path)

    f = funcs[0]
    if exact is None:
        plt.close(fig)
        raise ValueError("error-surface-2d needs the exact solution")
    mesh = f.space.mesh
    nv = mesh.num_vertices
    err = np.abs(f.coeffs[:nv] - exact(mesh.vertices))
    tri = mtri.Triangulation(mesh.vertices[:, 0], mesh.vertices[:, 1], mesh.elements)
    tpc = ax.tripcolor(tri, err, shading="gouraud", cmap="viridis")
    fig.colorbar(tpc, ax=ax, label="|u - u_h|")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return _save(fig, path)
