"""Command line interface.

Subcommands: generate, solve, project, check, sweep.  Exit codes: 0 on
success, 1 on usage errors, 2 when a solve fails to converge, 3 on
validation failures (bad graph/field files or hypotheses).
"""

from __future__ import annotations

import argparse
import json
import sys

from .energy import NotAdmissible, ProblemInstance, load_field
from .graphs import GraphValidationError, WeightedGraph
from .lab import generate_graph, sweep, sweep_csv
from .nehari import NonConvergence, project_pair
from .solver import InfeasibleWell, SolveOptions, solve_ground, solve_nodal, verify

EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VALIDATION = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _dump(obj: dict, out: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(args) -> tuple[WeightedGraph, ProblemInstance]:
    graph = WeightedGraph.load(args.graph)
    if args.mode == "full":
        if args.lam is None:
            raise GraphValidationError("--lambda is required in full mode")
        inst = ProblemInstance.full(graph, args.lam)
    else:
        try:
            inst = ProblemInstance.dirichlet(graph)
        except ValueError as exc:
            raise GraphValidationError(str(exc)) from None
    return graph, inst


def build_parser() -> _Parser:
    parser = _Parser(prog="logschro", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit a fixture graph JSON file")
    p.add_argument("--topology", required=True, choices=["path", "cycle", "grid", "star"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--well", required=True, help="position range 'i..j' or comma list of ids")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--w", type=float, default=1.0)
    p.add_argument("--a-out", type=float, default=1.0)
    p.add_argument("--out")

    p = sub.add_parser("solve", help="compute a ground or nodal minimizer")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=["full", "dirichlet"], default="full")
    p.add_argument("--lambda", dest="lam", type=float)
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--nodal", action="store_true")
    kind.add_argument("--ground", action="store_true")
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out")

    p = sub.add_parser("project", help="pair-project a field onto the nodal Nehari set")
    p.add_argument("--graph", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)

    p = sub.add_parser("check", help="verify a field as a pointwise solution")
    p.add_argument("--graph", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--mode", choices=["full", "dirichlet"], default="full")
    p.add_argument("--lambda", dest="lam", type=float)

    p = sub.add_parser("sweep", help="run the large-coupling convergence experiment")
    p.add_argument("--graph", required=True)
    p.add_argument("--lambdas", required=True, help="comma separated increasing list")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=64)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "generate":
            data = generate_graph(
                args.topology, args.n, args.well, mu=args.mu, omega_w=args.w, a_out=args.a_out
            )
            _dump(data, args.out)
            return 0

        if args.command == "solve":
            graph, inst = _load_instance(args)
            opts = SolveOptions(starts=args.starts, seed=args.seed, tol_residual=args.tol)
            report = (solve_nodal if args.nodal else solve_ground)(inst, opts)
            _dump(report.to_dict(inst), args.out)
            return 0

        if args.command == "project":
            graph = WeightedGraph.load(args.graph)
            with open(args.state, "r", encoding="utf-8") as fh:
                u = load_field(graph, fh.read())
            inst = ProblemInstance.full(graph, args.lam)
            proj = project_pair(inst, u)
            _dump(proj.to_dict(), None)
            return 0

        if args.command == "check":
            graph, inst = _load_instance(args)
            with open(args.state, "r", encoding="utf-8") as fh:
                u = load_field(graph, fh.read())
            _dump(verify(inst, u).to_dict(), None)
            return 0

        if args.command == "sweep":
            graph = WeightedGraph.load(args.graph)
            try:
                lambdas = [float(tok) for tok in args.lambdas.split(",") if tok.strip()]
            except ValueError:
                raise GraphValidationError(f"bad --lambdas list {args.lambdas!r}") from None
            opts = SolveOptions(starts=args.starts, seed=args.seed)
            rows, summary = sweep(graph, lambdas, opts)
            text = sweep_csv(rows)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            print(json.dumps(summary.to_dict(), sort_keys=True), file=sys.stderr)
            if any(r.failed for r in rows):
                return EXIT_NONCONVERGENCE
            return 0
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (GraphValidationError, NotAdmissible, InfeasibleWell, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
