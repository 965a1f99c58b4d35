"""Command-line interface: ``gnepkit solve | verify | transform | oracle``.

Exit codes: 0 converged or verified, 1 not converged or failed
certificate, 2 usage or input error. Errors are printed to stderr as a JSON
diagnostic.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .exceptions import GnepkitError, ProblemError
from .serialization import (dumps, game_to_dict, read_problem, report_to_dict,
                            write_json, write_report)
from .sets import Box
from .solvers import reformulate_add_player, solve_projected, solve_reformulated
from .verify import brute_force_projected, check_projected

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _csv(text: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not np.all(np.isfinite(v)):
        raise argparse.ArgumentTypeError("vector entries must be finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gnepkit", description="Projected solutions of generalized Nash games.")
    p.add_argument("--version", action="version", version=f"gnepkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="compute and certify a projected solution")
    s.add_argument("problem")
    s.add_argument("--method", choices=("direct", "reformulate"), default=None)
    s.add_argument("--tol", type=float, default=None, help="fixed-point tolerance")
    s.add_argument("--max-iter", type=int, default=None, help="iterations per start")
    s.add_argument("--damping", type=float, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("-o", "--output", default=None, help="report path (default: stdout)")
    s.add_argument("--timing", action="store_true",
                   help="record wall time in the report (makes it non-reproducible)")

    v = sub.add_parser("verify", help="certify a candidate pair")
    v.add_argument("problem")
    v.add_argument("--x", type=_csv, required=True, help="x_hat as comma-separated values")
    v.add_argument("--y", type=_csv, required=True, help="y_hat as comma-separated values")
    v.add_argument("--tol", type=float, default=1e-6)

    t = sub.add_parser("transform", help="emit the extra-player game as a problem file")
    t.add_argument("problem")
    t.add_argument("-o", "--output", default=None)

    o = sub.add_parser("oracle", help="brute-force grid search for projected solutions")
    o.add_argument("problem")
    o.add_argument("--grid", type=int, required=True, help="grid points per axis")
    o.add_argument("--box", nargs=2, type=_csv, metavar=("LOWER", "UPPER"), default=None,
                   help="search box as two comma-separated vectors")
    o.add_argument("-o", "--output", default=None)
    return p


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_solve(args) -> int:
    problem = read_problem(args.problem)
    if args.tol is not None and not args.tol > 0:
        raise _UsageError("--tol must be positive")
    opts = problem.solve_options(seed=args.seed, tol_fp=args.tol, max_outer=args.max_iter,
                                 damping=args.damping)
    method = args.method or problem.method
    t0 = time.perf_counter()
    if method == "reformulate":
        report = solve_reformulated(problem.game, opts, problem.search_box)
    else:
        report = solve_projected(problem.game, opts, problem.search_box)
    wall = (time.perf_counter() - t0) * 1e3 if args.timing else None
    if args.output is None:
        sys.stdout.write(dumps(report_to_dict(report, wall)))
    else:
        write_report(report, args.output, wall)
    return EXIT_OK if report.status == "converged" else EXIT_FAIL


def _cmd_verify(args) -> int:
    problem = read_problem(args.problem)
    cert = check_projected(problem.game, args.x, args.y, args.tol)
    sys.stdout.write(dumps(cert.to_dict()))
    return EXIT_OK if cert.passed else EXIT_FAIL


def _cmd_transform(args) -> int:
    problem = read_problem(args.problem)
    hat = reformulate_add_player(problem.game, problem.search_box)
    name = f"{problem.name}_hat" if problem.name else None
    doc = game_to_dict(hat, solver=problem.solver or None, name=name)
    if args.output is None:
        sys.stdout.write(dumps(doc))
    else:
        write_json(doc, args.output)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    problem = read_problem(args.problem)
    box = problem.search_box
    if args.box is not None:
        box = Box(args.box[0], args.box[1])
    res = brute_force_projected(problem.game, args.grid, box)
    reps = res.representatives()
    lo, hi = res.search_box.bounds()
    doc = {
        "grid_n": res.grid_n,
        "search_box": {"lower": lo.tolist(), "upper": hi.tolist()},
        "spacing": res.spacing,
        "n_candidates": len(res.candidates),
        "clusters": [
            {"x_hat": x.tolist(), "y_hat": y.tolist(), "fp_residual": r, "size": len(c)}
            for (x, y, r), c in zip(reps, res.clusters())
        ],
        "candidates": [{"x_hat": x.tolist(), "y_hat": y.tolist(), "fp_residual": r}
                       for x, y, r in res.candidates],
    }
    _emit(dumps(doc), args.output)
    return EXIT_OK if res.candidates else EXIT_FAIL


COMMANDS = {"solve": _cmd_solve, "verify": _cmd_verify, "transform": _cmd_transform,
            "oracle": _cmd_oracle}


def _diagnostic(kind: str, message: str, details=None) -> None:
    doc = {"error": {"type": kind, "message": message}}
    if details:
        doc["error"]["details"] = [{"pointer": p, "message": m} for p, m in details]
    sys.stderr.write(json.dumps(doc, indent=2) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        _diagnostic("usage", str(exc))
    except ProblemError as exc:
        _diagnostic("problem", "invalid problem file", exc.errors)
    except FileNotFoundError as exc:
        _diagnostic("io", str(exc))
    except OSError as exc:
        _diagnostic("io", f"{exc.filename or ''}: {exc.strerror or exc}".strip(": "))
    except (GnepkitError, ValueError, ArithmeticError) as exc:
        _diagnostic(type(exc).__name__, str(exc))
    return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
