"""Convergence studies, alpha sweeps and CSV output."""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .energy import energy_J, energy_Jh
from .fem import FeFunction, interpolate, linf_error
from .optimize import MinimizeOptions, solve_enhanced_fem, solve_standard_fem
from .quadrature import reference_rule

log = logging.getLogger(__name__)

CSV_HEADER = ["n", "h", "J_min", "Jh_min", "J_interp", "Jh_interp", "linf_error", "rate", "iters", "status"]
INTERPOLANT_ONLY = "interpolant-only"


class ReportIOError(OSError):
    def __init__(self, path, reason):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = str(path)


@dataclass(eq=False)
class StudyRow:
    n: int
    h: float
    J_min: float = math.nan
    Jh_min: float = math.nan
    J_interp: float = math.nan
    Jh_interp: float = math.nan
    linf_error: float = math.nan
    rate: float | None = None
    iterations: int = 0
    status: str = ""
    # values at the standard-FEM minimiser, kept in memory only
    J_std: float = math.nan
    Jh_std: float = math.nan
    solution: FeFunction | None = field(default=None, repr=False)
    standard_solution: FeFunction | None = field(default=None, repr=False)


@dataclass(eq=False)
class StudyReport:
    problem_name: str
    alpha: float
    degree: int
    warm_start: bool
    rows: list[StudyRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)


def nodal_error(f: FeFunction, exact) -> float:
    """Max |f - exact| over the degrees of freedom."""
    return float(np.max(np.abs(f.coeffs - exact(f.space.dof_coords))))


def convergence_rate(err_prev: float, err: float, n_prev: int, n: int) -> float:
    """Observed order between two levels; log2 of the error ratio when n doubles."""
    return math.log2(err_prev / err) / math.log2(n / n_prev)


def fill_rates(rows: list[StudyRow]) -> None:
    for k, row in enumerate(rows):
        if k == 0:
            row.rate = None
            continue
        prev = rows[k - 1]
        e0, e1 = prev.linf_error, row.linf_error
        if np.isfinite(e0) and np.isfinite(e1) and e0 > 0 and e1 > 0:
            row.rate = convergence_rate(e0, e1, prev.n, row.n)
        else:
            row.rate = math.nan


def fitted_rate(h, values) -> float:
    """Least-squares slope of log(values) against log(h)."""
    h = np.asarray(h, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(h) < 2:
        return math.nan
    return float(np.polyfit(np.log(h), np.log(values), 1)[0])


def _workers() -> int:
    raw = os.environ.get("LAVFEM_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring LAVFEM_THREADS=%r", raw)
        return 1


def _map_levels(func, levels):
    nworkers = min(_workers(), len(levels))
    if nworkers <= 1:
        return [func(n) for n in levels]
    with ThreadPoolExecutor(max_workers=nworkers) as pool:
        return list(pool.map(func, levels))


def _interp_values(problem, space, alpha, rule, row: StudyRow) -> None:
    if problem.exact_minimizer is None:
        return
    ih = interpolate(space, problem.exact_minimizer)
    row.J_interp = energy_J(problem.density, ih, rule)
    row.Jh_interp = energy_Jh(problem.density, ih, alpha, rule)


def _error(problem, u, error_samples):
    if problem.exact_minimizer is None:
        return math.nan
    if error_samples is None:
        return nodal_error(u, problem.exact_minimizer)
    return linf_error(u, problem.exact_minimizer, error_samples)


def _check_levels(levels):
    levels = [int(n) for n in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly increasing, got {levels}")
    return levels


def run_convergence_study(problem, alpha: float | None = None, degree: int = 1, levels=None,
                          warm_start: bool | None = None, opts: MinimizeOptions | None = None,
                          quad_degree: int | None = None, error_samples: int | None = None,
                          keep_solutions: bool = False) -> StudyReport:
    """Standard and capped solves on each level, with interpolant energies and errors.

    ``linf_error`` is the largest nodal error unless ``error_samples`` asks for
    dense sampling inside the elements. A solver exception is recorded in
    that row's status and the study moves on.
    """
    alpha = problem.alpha_default if alpha is None else float(alpha)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    warm_start = problem.warm_start_default if warm_start is None else bool(warm_start)
    levels = _check_levels(problem.default_levels if levels is None else levels)
    rule = reference_rule(problem.dim, quad_degree, degree)

    def one_level(n):
        mesh = problem.mesh(n)
        row = StudyRow(n=n, h=mesh.h)
        space = problem.space(mesh, degree)
        _interp_values(problem, space, alpha, rule, row)
        try:
            std = solve_standard_fem(problem, mesh, degree, opts, rule)
            row.J_std = std.final_energy
            row.Jh_std = energy_Jh(problem.density, std.minimizer, alpha, rule)
            init = std.minimizer if warm_start else None
            res = solve_enhanced_fem(problem, mesh, degree, alpha, opts, rule=rule, init=init)
        except Exception as exc:  # noqa: BLE001 - recorded per row
            log.error("level n=%d failed: %s", n, exc)
            row.status = f"error: {exc}"
            return row
        u = res.minimizer
        row.Jh_min = res.final_energy
        row.J_min = energy_J(problem.density, u, rule)
        row.linf_error = _error(problem, u, error_samples)
        row.iterations = res.iterations
        row.status = res.status
        if keep_solutions:
            row.solution = u
            row.standard_solution = std.minimizer
        log.info("n=%d Jh=%.3e err=%.3e (%s, %d its)", n, row.Jh_min, row.linf_error,
                 row.status, row.iterations)
        return row

    report = StudyReport(problem.name, alpha, degree, warm_start, _map_levels(one_level, levels))
    fill_rates(report.rows)
    return report


def interpolant_study(problem, alpha: float | None = None, degree: int = 1, levels=None,
                      quad_degree: int | None = None) -> StudyReport:
    """Optimiser-free report: only the interpolant columns are filled."""
    alpha = problem.alpha_default if alpha is None else float(alpha)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    levels = _check_levels(problem.default_levels if levels is None else levels)
    rule = reference_rule(problem.dim, quad_degree, degree)
    rows = []
    for n in levels:
        mesh = problem.mesh(n)
        row = StudyRow(n=n, h=mesh.h, status=INTERPOLANT_ONLY)
        _interp_values(problem, problem.space(mesh, degree), alpha, rule, row)
        rows.append(row)
    fill_rates(rows)
    return StudyReport(problem.name, alpha, degree, False, rows)


def run_alpha_sweep(problem, alphas, degree: int = 1, n: int = 160, opts: MinimizeOptions | None = None,
                    warm_start: bool | None = None, quad_degree: int | None = None,
                    error_samples: int | None = None, keep_solutions: bool = False):
    """One capped solve per alpha on a fixed mesh; returns ``[(alpha, StudyRow), ...]``."""
    alphas = [float(a) for a in alphas]
    for a in alphas:
        if not a > 0:
            raise ValueError(f"alpha must be positive, got {a}")
    warm_start = problem.warm_start_default if warm_start is None else bool(warm_start)
    rule = reference_rule(problem.dim, quad_degree, degree)
    mesh = problem.mesh(n)
    space = problem.space(mesh, degree)
    init = None
    if warm_start:
        init = solve_standard_fem(problem, mesh, degree, opts, rule).minimizer

    out = []
    for a in alphas:
        row = StudyRow(n=n, h=mesh.h)
        _interp_values(problem, space, a, rule, row)
        try:
            res = solve_enhanced_fem(problem, mesh, degree, a, opts, rule=rule, init=init)
        except Exception as exc:  # noqa: BLE001 - recorded per row
            row.status = f"error: {exc}"
            out.append((a, row))
            continue
        row.Jh_min = res.final_energy
        row.J_min = energy_J(problem.density, res.minimizer, rule)
        row.linf_error = _error(problem, res.minimizer, error_samples)
        row.iterations = res.iterations
        row.status = res.status
        if keep_solutions:
            row.solution = res.minimizer
        out.append((a, row))
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _row_fields(row: StudyRow) -> list[str]:
    return [
        _fmt(row.n), _fmt(row.h), _fmt(row.J_min), _fmt(row.Jh_min), _fmt(row.J_interp),
        _fmt(row.Jh_interp), _fmt(row.linf_error), _fmt(row.rate), _fmt(row.iterations), row.status,
    ]


def _write_rows(path, header, rows) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise ReportIOError(path, exc.strerror or exc) from exc
    return path


def emit_csv(report: StudyReport, path) -> Path:
    return _write_rows(path, CSV_HEADER, [_row_fields(r) for r in report.rows])


def emit_sweep_csv(sweep, path) -> Path:
    return _write_rows(path, ["alpha"] + CSV_HEADER, [[_fmt(a)] + _row_fields(r) for a, r in sweep])


def read_csv(path) -> list[dict]:
    """Parse a report CSV back into dicts of floats (empty cells become None)."""
    out = []
    with Path(path).open(newline="") as fh:
        for rec in csv.DictReader(fh):
            parsed = {}
            for key, val in rec.items():
                if key == "status":
                    parsed[key] = val
                elif key in ("n", "iters"):
                    parsed[key] = int(val)
                else:
                    parsed[key] = None if val == "" else float(val)
            out.append(parsed)
    return out
