"""Command-line front end.

Subcommands: ``gen`` (synthetic data), ``mle`` (parameter estimation),
``is`` (importance-sampling queries), ``fss`` (feature selection) and
``bench`` (timing sweeps with CSV + figure output).

Exit codes: 0 on success, 1 on usage errors, 2 on data or model errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import bench_sweep
from .data import read_all
from .errors import DatasetError, ModelError, QueryError
from .greedy import DEFAULT_THRESHOLD, FeatureSelection, greedy_search
from .mle import MleConfig, compute_mle
from .network import read_model, write_model
from .plotting import save_sweep_plot
from .sampling import expected_value, parse_evidence, parse_query
from .synthetic import SyntheticSpec, generate_data, make_superparent_network
from . import data as data_mod


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_spec(text: str, seed: int) -> SyntheticSpec:
    try:
        m_children, g_children = (int(part) for part in text.split(","))
    except ValueError:
        raise QueryError(
            f"--spec must be two comma-separated counts like '10,10', got {text!r}"
        ) from None
    return SyntheticSpec(m_children=m_children, g_children=g_children, seed=seed)


def _parse_values(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise QueryError(f"--values must be comma-separated integers, got {text!r}") from None


def _cmd_gen(args) -> int:
    spec = _parse_spec(args.spec, args.seed)
    bn = make_superparent_network(spec)
    if args.out_model:
        write_model(bn, args.out_model)
        print(f"model written to {args.out_model}")
    count = generate_data(bn, args.n, args.seed, args.out)
    print(f"{count} records written to {args.out}")
    return 0


def _cmd_mle(args) -> int:
    bn = read_model(args.structure)
    config = MleConfig(batch_size=args.batch_size, workers=args.workers)
    with data_mod.open_dataset(args.data, batch_size=args.batch_size) as source:
        learned = compute_mle(source, bn.dag, config)
    write_model(learned, args.out_model)
    print(f"model written to {args.out_model}")
    return 0


def _cmd_is(args) -> int:
    bn = read_model(args.model)
    name, f = parse_query(args.query)
    evidence = parse_evidence(args.evidence, bn) if args.evidence else None
    value = expected_value(bn, evidence, name, f, args.samples, args.seed, args.workers)
    print(f"{args.query} = {value}")
    return 0


def _cmd_fss(args) -> int:
    schema, values = read_all(args.data)
    problem = FeatureSelection(schema, values, getattr(args, "class"))
    _, trace = greedy_search(problem, threshold=args.threshold, workers=args.workers)
    for k, step in enumerate(trace, start=1):
        print(f"step {k}: +{problem.feature_name(step.payload)} score={step.score:.6f}")
    selected = ",".join(problem.feature_name(i) for i in (s.payload for s in trace))
    print(f"selected: {selected}")
    return 0


def _cmd_bench(args) -> int:
    bn = read_model(args.structure)
    values = _parse_values(args.values)
    sweep = args.sweep.replace("-", "_")
    report = bench_sweep(
        args.data,
        bn.dag,
        sweep,
        values,
        repetitions=args.reps,
        workers=args.workers,
        batch_size=args.batch_size,
    )
    report.to_csv(args.out_csv)
    print(f"report written to {args.out_csv}")
    if not args.no_plot:
        plot_path = Path(args.out_csv).with_suffix(".png")
        save_sweep_plot(report, plot_path)
        print(f"figure written to {plot_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="clgnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a synthetic network and dataset")
    p.add_argument("--spec", default="10,10", help="multinomial,gaussian child counts")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="dataset output path")
    p.add_argument("--out-model", help="also write the generating model here")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("mle", help="estimate parameters from a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--structure", required=True, help="model file providing the structure")
    p.add_argument("--batch-size", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-model", required=True)
    p.set_defaults(fn=_cmd_mle)

    p = sub.add_parser("is", help="importance-sampling query against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, help='e.g. "P(M1=1)", "P(G1<0.5)" or "E(G1)"')
    p.add_argument("--evidence", default="", help="name=value,name=value,...")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_is)

    p = sub.add_parser("fss", help="greedy wrapper feature selection")
    p.add_argument("--data", required=True)
    p.add_argument("--class", required=True, help="name of the class column")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_fss)

    p = sub.add_parser("bench", help="timing sweep; writes CSV and a figure")
    p.add_argument("--data", required=True)
    p.add_argument("--structure", required=True)
    p.add_argument("--sweep", required=True, choices=["workers", "batch_size", "batch-size"])
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--workers", type=int, default=1, help="fixed worker count for batch sweeps")
    p.add_argument("--batch-size", type=int, default=1000, help="fixed batch size for worker sweeps")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(fn=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except QueryError as e:
        print(f"clgnet: error: {e}", file=sys.stderr)
        return 1
    except (DatasetError, ModelError, ValueError, OSError) as e:
        print(f"clgnet: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
