"""Command-line front end: reproducible batch experiments over edge-list files.

Commands: gen, measure, percolate, sweep, trim, search, probe, balls, tower,
rerun. Every file-writing run also writes a manifest (full argv plus SHA-256
of each output), and `rerun <manifest>` replays it byte-identically.

Exit codes: 1 usage, 2 input data, 3 computation refused, 4 internal error.
Floats in all outputs are printed at 9 significant digits.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__, builders, matgroups, metrics, percolation, search
from .errors import ComputationRefused
from .graphcore import edge_subgraph, load_graph, save_graph
from .metrics import UNBOUNDED

EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_REFUSED = 3
EXIT_INTERNAL = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    """Canonical CSV cell for one value."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return f"{x:.9g}"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def _round9(obj):
    """Round every float in a JSON-ready structure to 9 significant digits."""
    if isinstance(obj, float):
        if math.isinf(obj) or math.isnan(obj):
            return str(obj)
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_round9(obj), indent=2) + "\n", encoding="ascii")


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header) + "\n"]
    lines.extend(",".join(_fmt(x) for x in row) + "\n" for row in rows)
    path.write_text("".join(lines), encoding="ascii", newline="")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(manifest_path: Path, command: str, argv: list[str], outputs: list[Path]) -> None:
    manifest = {
        "tool": "expanderlab",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="ascii")


def _finish(args, outputs: list[Path], manifest_path: Optional[Path] = None) -> int:
    outputs = [p for p in outputs if p is not None]
    if outputs:
        if manifest_path is None:
            manifest_path = Path(str(outputs[0]) + ".manifest.json")
        _write_manifest(manifest_path, args.command, args.full_argv, outputs)
    return 0


def _girth_cells(value) -> list:
    unbounded = value == UNBOUNDED
    return [None if unbounded else value, unbounded]


# --- command handlers -----------------------------------------------------


def _cmd_gen(args) -> int:
    spec = builders.parse_family_spec(args.spec)
    result = builders.build_family(spec)
    out = Path(args.output)
    save_graph(result.graph, out)
    outputs = [out]
    if result.labels is not None:
        label_path = Path(str(out) + ".labels")
        label_path.write_text(
            "".join(f"{i} {lab}\n" for i, lab in enumerate(result.labels)),
            encoding="ascii",
            newline="",
        )
        outputs.append(label_path)
    return _finish(args, outputs)


def _cmd_measure(args) -> int:
    g = load_graph(args.graph)
    report = metrics.measure(g, exact_max=args.exact_max)
    payload = metrics.report_to_json_dict(report)
    if args.output is None:
        sys.stdout.write(json.dumps(_round9(payload), indent=2) + "\n")
        return 0
    out = Path(args.output)
    _write_json(out, payload)
    return _finish(args, [out])


def _cmd_percolate(args) -> int:
    g = load_graph(args.graph)
    sample = percolation.percolate(g, args.p, args.seed)
    summary = percolation.component_summary(g, sample)
    header = ["p", "seed", "retained_edges", "components", "giant_fraction"]
    row = [args.p, args.seed, len(sample.retained), summary.count, summary.giant_fraction]
    if args.check_condition:
        check = percolation.condition_check(g, args.p)
        header += ["condition_value", "condition_ok"]
        row += [check.value, check.satisfied]
    out = Path(args.output)
    _write_csv(out, header, [row])
    outputs = [out]
    if args.keep_out:
        keep_path = Path(args.keep_out)
        save_graph(edge_subgraph(g, sample.retained), keep_path)
        outputs.append(keep_path)
    return _finish(args, outputs)


def _cmd_sweep(args) -> int:
    g = load_graph(args.graph)
    grid = [float(x) for x in args.grid.split(",") if x.strip() != ""]
    rows = percolation.percolation_sweep(g, grid, args.seeds_per, args.seed)
    out = Path(args.output)
    _write_csv(
        out,
        ["p", "seed_count", "giant_mean", "giant_std", "condition_value", "condition_ok"],
        [
            [r.p, r.seed_count, r.giant_mean, r.giant_std, r.condition_value, r.condition_ok]
            for r in rows
        ],
    )
    return _finish(args, [out])


def _cmd_trim(args) -> int:
    g = load_graph(args.graph)
    trimmed = search.trim_to_girth(g, args.girth)
    out = Path(args.output)
    save_graph(trimmed, out)
    return _finish(args, [out])


def _cmd_search(args) -> int:
    g = load_graph(args.graph)
    if (args.ratio is None) == (args.girth is None):
        raise ValueError("give exactly one of --ratio and --girth")
    result = search.search_spanning_subexpander(
        g,
        ratio=args.ratio,
        girth_target=args.girth,
        strategy=args.strategy,
        budget=args.budget,
        seed=args.seed,
    )
    out = Path(args.output)
    save_graph(edge_subgraph(g, result.kept), out)
    outputs = [out]
    if args.report:
        girth_cell, unbounded = _girth_cells(result.girth_achieved)
        report_path = Path(args.report)
        _write_json(
            report_path,
            {
                "strategy": result.strategy,
                "seed": result.seed,
                "budget": args.budget,
                "kept_edges": len(result.kept),
                "girth_achieved": girth_cell,
                "girth_unbounded": unbounded,
                "gap": result.gap,
                "h_exact_num": result.h_exact.numerator if result.h_exact else None,
                "h_exact_den": result.h_exact.denominator if result.h_exact else None,
                "connected": result.connected,
                "iterations_used": result.iterations_used,
            },
        )
        outputs.append(report_path)
    return _finish(args, outputs)


def _cmd_probe(args) -> int:
    specs = [builders.parse_family_spec(s) for s in args.family]
    ratios = [float(x) for x in args.ratios.split(",") if x.strip() != ""]
    strategies = (
        list(search.STRATEGIES)
        if args.strategies == "all"
        else [s.strip() for s in args.strategies.split(",")]
    )
    records, summaries = search.conjecture_probe(
        specs,
        ratios,
        strategies=strategies,
        budget=args.budget,
        seed=args.seed,
        threads=args.threads,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "probe.csv"
    rows = []
    for r in records:
        girth_cell = "unbounded" if r.best_girth == UNBOUNDED else r.best_girth
        rows.append(
            [
                r.family, r.instance, r.n, r.m, r.d, r.host_gap, r.host_h_exact,
                r.diameter, r.c, r.girth_target, r.strategy, girth_cell, r.best_gap,
                r.best_h_exact, r.ratio_achieved, r.success, r.degenerate_diameter,
                r.seed,
            ]
        )
    _write_csv(
        csv_path,
        [
            "family", "instance", "n", "m", "d", "host_gap", "host_h_exact",
            "diameter", "c", "girth_target", "strategy", "best_girth", "best_gap",
            "best_h_exact", "ratio_achieved", "success", "degenerate_diameter",
            "seed",
        ],
        rows,
    )
    json_path = out_dir / "probe_summary.json"
    _write_json(
        json_path,
        {
            "budget": args.budget,
            "seed": args.seed,
            "strategies": strategies,
            "families": [
                {
                    "family": s.family,
                    "per_ratio": [
                        {
                            "c": pr.c,
                            "min_gap": pr.min_gap,
                            "all_success": pr.all_success,
                            "girth_grew": pr.girth_grew,
                        }
                        for pr in s.per_ratio
                    ],
                }
                for s in summaries
            ],
        },
    )
    return _finish(args, [csv_path, json_path], manifest_path=out_dir / "manifest.json")


def _cmd_balls(args) -> int:
    g = load_graph(args.graph)
    rows, summary = metrics.ball_expansion_profile(g, args.radius, exact_limit=args.exact_limit)
    out = Path(args.output)
    csv_rows = [
        ["ball", r.vertex, r.ball_size, r.gap, r.h_exact, None, None, None]
        for r in rows
    ]
    csv_rows.append(
        ["summary", None, None, None, None, summary.min_gap, summary.median_gap, summary.min_h_exact]
    )
    _write_csv(
        out,
        ["kind", "vertex", "ball_size", "gap", "h_exact", "min_gap", "median_gap", "min_h_exact"],
        csv_rows,
    )
    return _finish(args, [out])


def _cmd_tower(args) -> int:
    rows = matgroups.girth_tower_report(
        args.p, args.levels, recipe=args.recipe, order_cap=args.order_cap
    )
    out = Path(args.output)
    csv_rows = []
    for r in rows:
        girth_cell, unbounded = _girth_cells(r.girth)
        csv_rows.append(
            [
                r.level, r.modulus, r.vertices, r.degree, girth_cell, unbounded,
                r.gap, r.reached_order, r.full_group_order,
            ]
        )
    _write_csv(
        out,
        [
            "level", "modulus", "vertices", "degree", "girth", "girth_unbounded",
            "gap", "reached_order", "full_group_order",
        ],
        csv_rows,
    )
    return _finish(args, [out])


def _cmd_rerun(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text(encoding="ascii"))
    argv = manifest.get("argv")
    if not isinstance(argv, list) or not argv:
        raise ValueError(f"manifest {args.manifest} has no argv to replay")
    return main(argv)


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="expanderlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="build a graph from a family spec")
    p.add_argument("spec", help="family spec, e.g. random-regular:n=64,d=4,seed=1")
    p.add_argument("-o", "--output", required=True, help="edge-list output path")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("measure", help="full metrics report for a graph file")
    p.add_argument("graph")
    p.add_argument("--exact-max", type=int, default=metrics.DEFAULT_EXACT_MAX)
    p.add_argument("-o", "--output", default=None, help="JSON path (default stdout)")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("percolate", help="one Bernoulli bond percolation sample")
    p.add_argument("graph")
    p.add_argument("-p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-condition", action="store_true")
    p.add_argument("--keep-out", default=None, help="write retained subgraph here")
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.set_defaults(func=_cmd_percolate)

    p = sub.add_parser("sweep", help="Monte Carlo giant-component sweep over a p grid")
    p.add_argument("graph")
    p.add_argument("--grid", required=True, help="comma-separated p values")
    p.add_argument("--seeds-per", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trim", help="delete shortest-cycle edges until girth >= target")
    p.add_argument("graph")
    p.add_argument("--girth", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_trim)

    p = sub.add_parser("search", help="spanning sub-expander search, one strategy")
    p.add_argument("graph")
    p.add_argument("--ratio", type=float, default=None, help="girth target = ceil(ratio*diameter)")
    p.add_argument("--girth", type=int, default=None, help="absolute girth target")
    p.add_argument("--strategy", choices=search.STRATEGIES, default="trim")
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="edge-list of the kept subgraph")
    p.add_argument("--report", default=None, help="JSON report path")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("probe", help="conjecture probe over families x ratios x strategies")
    p.add_argument("--family", action="append", required=True, help="family spec (repeatable)")
    p.add_argument("--ratios", required=True, help="comma-separated girth/diameter ratios")
    p.add_argument("--strategies", default="all")
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("balls", help="induced-ball expansion profile")
    p.add_argument("graph")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--exact-limit", type=int, default=16)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_balls)

    p = sub.add_parser("tower", help="Cayley girth/gap tower over p^1..p^levels")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--recipe", default="sanov")
    p.add_argument("--order-cap", type=int, default=500_000)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_tower)

    p = sub.add_parser("rerun", help="replay a run from its manifest")
    p.add_argument("manifest")
    p.set_defaults(func=_cmd_rerun)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    args.full_argv = list(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"expanderlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationRefused as exc:
        print(f"expanderlab: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (OSError, json.JSONDecodeError) as exc:
        print(f"expanderlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # internal failure taxonomy for scripts
        print(f"expanderlab: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
