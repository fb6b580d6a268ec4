"""Command-line front end: ``monoclt <command> [options]``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .coloring import SeedSpec, sample_coloring
from .decomposition import all_tuples, verify_decomposition, verify_martingale
from .embed import DEFAULT_MAX_COPIES, copies_from_vertex_lists, enumerate_copies, pattern_from_spec
from .errors import MonoError, ParseError, ValidationError
from .graph import generate, load_edge_list
from .joins import (
    DEFAULT_MAX_STEPS,
    census,
    classify,
    count_2shared_tuples,
    natural_ordering,
    sorted_ordering,
)
from .moments import brute_force_distribution, distribution_moments, exact_variance, expected_T
from .report import FOURTH_METHODS, assemble_report, dumps, fourth_gap, report_fields
from .simulate import histogram_csv, moment_sweep, simulate

EXIT_CODES = """exit codes:
  0  success
  1  verification failure (decompose-verify found a nonzero residual)
  2  usage error
  3  parse error (edge list, generator or pattern spec, copy list)
  4  validation error (bad graph, pattern, colors, parameters or unreadable file)
  5  capacity error (a configured cap would be exceeded)
  6  undefined statistic (e.g. Z when Var[T] = 0)
"""

COMMANDS = ("copies", "moments", "joins", "decompose-verify", "bound", "simulate", "sweep", "classify", "oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monoclt",
        description="Monochromatic subgraph counts under uniform random colorings.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_argument_group("host graph (exactly one source)")
    src.add_argument("--graph", help="edge-list file")
    src.add_argument("--gen", action="append", default=[], help="generator spec, e.g. complete:4 (repeatable for sweep)")
    parser.add_argument("--pattern", default="triangle", help="pattern spec or alias (triangle, cherry, edge)")
    parser.add_argument("--colors", "-c", type=int, default=2)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", help="write JSON here instead of stdout")
    parser.add_argument("--csv", help="simulate: write the T histogram as CSV")
    parser.add_argument("--ordering", choices=("sorted", "natural"), default="sorted")
    parser.add_argument("--max-copies", type=int, default=DEFAULT_MAX_COPIES)
    parser.add_argument("--max-tuples", type=int, default=DEFAULT_MAX_STEPS,
                        help="cap on candidate steps of the good-join enumeration")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--fourth-method", choices=FOURTH_METHODS, default="auto")
    parser.add_argument("--copies", dest="copy_lists",
                        help='classify: copies as vertex lists, e.g. "1,2,3;3,4,5;5,6,7;7,8,9"')
    return parser


def _host(args, required: bool = True):
    sources = len(args.gen) + (args.graph is not None)
    if sources == 0 and not required:
        return None, ""
    if sources != 1:
        raise _Usage("give exactly one of --graph FILE or --gen SPEC")
    if args.graph is not None:
        return load_edge_list(Path(args.graph).read_bytes()), args.graph
    return generate(args.gen[0]), args.gen[0]


class _Usage(Exception):
    pass


def _index(args):
    g, label = _host(args)
    idx = enumerate_copies(pattern_from_spec(args.pattern), g, args.max_copies)
    return idx, label


def _ordering(args, idx):
    return sorted_ordering(idx) if args.ordering == "sorted" else natural_ordering(idx)


def _emit(args, payload) -> None:
    text = dumps(payload) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _samples(args, default: int) -> int:
    n = default if args.samples is None else args.samples
    if n < 1:
        raise ValidationError("--samples must be >= 1")
    return n


def cmd_copies(args) -> int:
    idx, label = _index(args)
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "vertices": idx.host.vertex_count,
        "edges": len(idx.host.edges),
        "automorphisms": idx.pattern.automorphisms,
        "copies": len(idx),
        "vertex_sets": len(idx.classes),
    })
    return 0


def cmd_moments(args) -> int:
    idx, label = _index(args)
    var = exact_variance(idx, args.colors)
    fourth = fourth_gap(idx, args.colors, args.fourth_method, args.max_tuples) if var > 0 else None
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "c": args.colors,
        "copy_count": len(idx),
        "pair2_count": count_2shared_tuples(idx, 2),
        "mean_T": expected_T(idx, args.colors),
        "variance_T": var,
        "sigma": float(var) ** 0.5,
        "fourth_moment_Z": fourth.fourth_moment if fourth else None,
        "fourth_method": fourth.method if fourth else None,
    })
    return 0


def cmd_joins(args) -> int:
    idx, label = _index(args)
    rep = census(idx, _ordering(args, idx), args.max_tuples)
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "copies": rep.copies,
        "pair2_tuples": rep.pair2_tuples,
        "q4_tuples": rep.q4_tuples,
        "good_tuples": rep.good_tuples,
        "upsilon": rep.upsilon,
        "ordering_mode": args.ordering,
        "ordering": list(rep.ordering),
        "xi": list(rep.xi),
    })
    return 0


def cmd_decompose_verify(args) -> int:
    idx, label = _index(args)
    c = args.colors
    n = _samples(args, 20)
    ordering = _ordering(args, idx)
    tuples = all_tuples(idx, ordering)
    bad = 0
    worst_t = Fraction(0)
    worst_z = Fraction(0)
    for s in range(n):
        x = sample_coloring(idx.host.vertex_count, c, SeedSpec(args.seed, s))
        chk = verify_decomposition(idx, c, x, ordering, tuples)
        bad += not chk.ok
        worst_t = max(worst_t, abs(chk.t_identity_residual))
        worst_z = max(worst_z, abs(chk.z_identity_residual))
    violations = verify_martingale(idx, c, ordering)
    ok = bad == 0 and violations == 0
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "c": c,
        "colorings": n,
        "seed": args.seed,
        "tuples": sum(len(rows) for rows in tuples.values()),
        "max_t_identity_residual": worst_t,
        "max_z_identity_residual": worst_z,
        "failed_colorings": bad,
        "martingale_violations": violations,
        "ok": ok,
    })
    return 0 if ok else 1


def cmd_bound(args) -> int:
    idx, label = _index(args)
    sim = None
    if args.samples:
        sim = simulate(idx, args.colors, _samples(args, 1), args.seed, args.workers)
    rep = assemble_report(idx, args.colors, sim=sim, host=label,
                          fourth_method=args.fourth_method, max_steps=args.max_tuples)
    _emit(args, report_fields(rep))
    return 0


def cmd_simulate(args) -> int:
    idx, label = _index(args)
    sim = simulate(idx, args.colors, _samples(args, 10_000), args.seed, args.workers)
    if args.csv:
        Path(args.csv).write_text(histogram_csv(sim))
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "c": args.colors,
        "samples": sim.samples,
        "seed": sim.seed,
        "exact_mean_T": sim.exact_mean,
        "exact_sigma": sim.exact_sigma,
        "empirical_mean": sim.empirical_mean,
        "empirical_mean_se": sim.mean_se,
        "empirical_variance": sim.empirical_variance,
        "empirical_variance_se": sim.variance_se,
        "empirical_fourth_moment_Z": sim.empirical_fourth_moment_Z,
        "empirical_fourth_moment_Z_se": sim.fourth_se,
        "ks_distance": sim.ks_distance,
        "histogram": [list(row) for row in sim.histogram],
    })
    return 0


def cmd_sweep(args) -> int:
    if not args.gen:
        raise _Usage("sweep needs one or more --gen SPEC")
    if args.graph is not None:
        raise _Usage("sweep takes generator specs only")
    rows = moment_sweep(args.gen, pattern_from_spec(args.pattern), args.colors,
                        _samples(args, 10_000), args.seed, args.workers)
    _emit(args, {
        "pattern": args.pattern,
        "c": args.colors,
        "seed": args.seed,
        "rows": [
            {
                "host": row.host,
                "copies": row.copies,
                "samples": row.samples,
                **{f"abs_moment_{m}": val for m, (val, _) in row.moments.items()},
                **{f"abs_moment_{m}_se": se for m, (_, se) in row.moments.items()},
                "ks_distance": row.ks_distance,
            }
            for row in rows
        ],
    })
    return 0


def _parse_copy_lists(text: str) -> list[list[int]]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            out.append([int(v) for v in chunk.replace(" ", "").split(",")])
        except ValueError:
            raise ParseError(f"bad copy list {chunk!r}") from None
    return out


def cmd_classify(args) -> int:
    if not args.copy_lists:
        raise _Usage("classify needs --copies")
    pattern = pattern_from_spec(args.pattern)
    g, _ = _host(args, required=False)
    lists = _parse_copy_lists(args.copy_lists)
    if len(lists) != 4:
        raise ValidationError(f"classify expects four copies, got {len(lists)}")
    try:
        copies = copies_from_vertex_lists(pattern, g, lists)
    except ValidationError as exc:
        print(f"not-a-join: {exc}")
        return 0
    print(classify(copies))
    return 0


def cmd_oracle(args) -> int:
    idx, label = _index(args)
    dist = brute_force_distribution(idx, args.colors)
    dm = distribution_moments(dist)
    _emit(args, {
        "host": label,
        "pattern": args.pattern,
        "c": args.colors,
        "distribution": {str(t): p for t, p in dist.items()},
        "mean_T": dm.mean,
        "variance_T": dm.variance,
        "fourth_moment_Z": dm.fourth_moment_Z,
    })
    return 0


HANDLERS = {
    "copies": cmd_copies,
    "moments": cmd_moments,
    "joins": cmd_joins,
    "decompose-verify": cmd_decompose_verify,
    "bound": cmd_bound,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "oracle": cmd_oracle,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return HANDLERS[args.command](args)
    except _Usage as exc:
        parser.error(str(exc))
    except MonoError as exc:
        print(f"monoclt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"monoclt: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
