"""Command line entry point: ``lavfem study|sweep|verify``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

import numpy as np

from .experiments import (
    ReportIOError,
    emit_csv,
    emit_sweep_csv,
    fitted_rate,
    interpolant_study,
    run_alpha_sweep,
    run_convergence_study,
)
from .problems import PROBLEMS, get_problem

INITIAL_GUESSES = {
    "x": lambda X: X[:, 0].copy(),
    "sqrt-x": lambda X: np.sqrt(X[:, 0]),
}


def _int_list(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _parser():
    p = argparse.ArgumentParser(prog="lavfem", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--problem", choices=sorted(PROBLEMS), required=True)
        sp.add_argument("--degree", type=int, choices=(1, 2), default=1)
        sp.add_argument("--quad-degree", type=int, default=None)
        sp.add_argument("--out", default=None, help="CSV output path")

    st = sub.add_parser("study", help="convergence study (standard vs capped FEM)")
    common(st)
    st.add_argument("--alpha", type=float, default=None)
    st.add_argument("--levels", type=_int_list, default=None)
    st.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=None)
    st.add_argument("--init", choices=sorted(INITIAL_GUESSES), default=None)
    st.add_argument("--plot", default=None, help="SVG error-curve output path")

    sw = sub.add_parser("sweep", help="capped solves for several alpha on one mesh")
    common(sw)
    sw.add_argument("--alphas", type=_float_list, required=True)
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=None)
    sw.add_argument("--init", choices=sorted(INITIAL_GUESSES), default=None)

    ve = sub.add_parser("verify", help="optimiser-free energies of the interpolated minimiser")
    common(ve)
    ve.add_argument("--alpha", type=float, default=None)
    ve.add_argument("--levels", type=_int_list, default=None)
    ve.add_argument("--plot", default=None, help="SVG error-curve output path")
    return p


def _print_rows(rows, with_alpha=False):
    head = "alpha      " if with_alpha else ""
    print(f"{head}{'n':>5} {'h':>10} {'J(u_h)':>11} {'Jh(u_h)':>11} {'J(I_h u)':>11} "
          f"{'Jh(I_h u)':>11} {'err':>10} {'rate':>6} {'iters':>6}  status")
    for key, r in rows:
        rate = "" if r.rate is None else f"{r.rate:6.2f}"
        lead = f"{key:<10.4g} " if with_alpha else ""
        print(f"{lead}{r.n:5d} {r.h:10.4g} {r.J_min:11.3e} {r.Jh_min:11.3e} {r.J_interp:11.3e} "
              f"{r.Jh_interp:11.3e} {r.linf_error:10.3e} {rate:>6} {r.iterations:6d}  {r.status}")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    problem = get_problem(args.problem)
    if getattr(args, "init", None):
        problem = dataclasses.replace(problem, initial_guess=INITIAL_GUESSES[args.init])

    try:
        if args.command == "verify":
            report = interpolant_study(problem, args.alpha, args.degree, args.levels, args.quad_degree)
            print(f"{problem.name}: alpha = {report.alpha:.6g}, P{report.degree}")
            print(f"{'n':>5} {'h':>10} {'Jh(I_h u)':>12} {'J(I_h u)':>12}")
            for r in report.rows:
                print(f"{r.n:5d} {r.h:10.4g} {r.Jh_interp:12.4e} {r.J_interp:12.4e}")
            print(f"fitted rate of Jh(I_h u): {fitted_rate(report.column('h'), report.column('Jh_interp')):.3f}")
            failed = []
        elif args.command == "study":
            report = run_convergence_study(problem, args.alpha, args.degree, args.levels,
                                           args.warm_start, quad_degree=args.quad_degree)
            print(f"{problem.name}: alpha = {report.alpha:.6g}, P{report.degree}, "
                  f"warm start {'on' if report.warm_start else 'off'}")
            _print_rows([(r.n, r) for r in report.rows])
            failed = [r for r in report.rows if r.status.startswith("error")]
        else:
            sweep = run_alpha_sweep(problem, args.alphas, args.degree, args.n,
                                    warm_start=args.warm_start, quad_degree=args.quad_degree)
            _print_rows(sweep, with_alpha=True)
            failed = [r for _, r in sweep if r.status.startswith("error")]
            if args.out:
                emit_sweep_csv(sweep, args.out)
            report = None

        if report is not None and args.out:
            emit_csv(report, args.out)
        if report is not None and getattr(args, "plot", None):
            from .plots import emit_plot

            emit_plot(report, args.plot, "error-curve")
    except (ReportIOError, ValueError) as exc:
        print(f"lavfem: error: {exc}", file=sys.stderr)
        return 1

    if failed:
        print(f"lavfem: {len(failed)} solve(s) failed", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
