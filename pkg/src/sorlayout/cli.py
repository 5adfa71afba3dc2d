"""Command line front end for the benchmark harness."""

from __future__ import annotations

import argparse
import json
import sys

from .bench import (
    STRATEGIES,
    USE_CASES,
    fit_groups,
    read_csv,
    run_experiment,
    write_csv,
)
from .engine import SolverConfig
from .layout import generate_layout, layout_to_dict

FIT_HEADER = "use_case,strategy,beta0,beta1,beta2,beta3,r_squared"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sorlayout-bench",
        description="Run warm/cold layout-solver benchmarks and fit size trends.",
    )
    parser.add_argument(
        "--use-case",
        choices=(*USE_CASES, "all"),
        default="all",
        help="mutation kind to benchmark (default: all)",
    )
    parser.add_argument("--max-areas", type=int, default=201)
    parser.add_argument("--step", type=int, default=10)
    parser.add_argument("--layouts", type=int, default=10)
    parser.add_argument("--changes", type=int, default=20)
    parser.add_argument("--omega", type=float, default=0.7)
    parser.add_argument("--tolerance", type=float, default=0.01)
    parser.add_argument("--max-iterations", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", metavar="PATH", help="run the experiment, write CSV")
    parser.add_argument("--fit", metavar="PATH", help="fit cubic models to a CSV")
    parser.add_argument(
        "--dump-spec",
        metavar="PATH",
        help="write the JSON spec of one generated layout (--max-areas areas)",
    )
    return parser


def size_grid(max_areas: int, step: int) -> list[int]:
    """0, step, 2*step, ... plus max_areas itself when the grid misses it."""
    if max_areas < 0:
        raise ValueError("--max-areas must be non-negative")
    if step < 1:
        raise ValueError("--step must be at least 1")
    sizes = list(range(0, max_areas + 1, step))
    if sizes[-1] != max_areas:
        sizes.append(max_areas)
    return sizes


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if not (args.out or args.fit or args.dump_spec):
        print(
            "nothing to do: pass --out, --fit, and/or --dump-spec", file=sys.stderr
        )
        return 2

    try:
        config = SolverConfig(
            omega=args.omega,
            tolerance=args.tolerance,
            max_iterations=args.max_iterations,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"invalid solver configuration: {exc}", file=sys.stderr)
        return 2

    if args.dump_spec:
        layout = generate_layout(args.max_areas, 800.0, 600.0, args.seed)
        with open(args.dump_spec, "w") as handle:
            json.dump(layout_to_dict(layout), handle, indent=2)
        print(f"wrote layout spec ({len(layout.system)} constraints) to {args.dump_spec}")

    if args.out:
        try:
            sizes = size_grid(args.max_areas, args.step)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 2
        use_cases = USE_CASES if args.use_case == "all" else (args.use_case,)
        records = []
        for use_case in use_cases:
            for strategy in STRATEGIES:
                records.extend(
                    run_experiment(
                        use_case,
                        sizes,
                        layouts_per_size=args.layouts,
                        changes_per_layout=args.changes,
                        config=config,
                        strategy=strategy,
                    )
                )
        write_csv(records, args.out)
        print(f"wrote {len(records)} records to {args.out}")

    if args.fit:
        try:
            records = read_csv(args.fit)
        except (OSError, ValueError) as exc:
            print(f"cannot fit {args.fit}: {exc}", file=sys.stderr)
            return 1
        print(FIT_HEADER)
        for (use_case, strategy), fit in fit_groups(records).items():
            print(
                f"{use_case},{strategy},{fit.beta0:.6g},{fit.beta1:.6g},"
                f"{fit.beta2:.6g},{fit.beta3:.6g},{fit.r_squared:.6f}"
            )

    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
