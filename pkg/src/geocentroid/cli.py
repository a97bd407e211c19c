"""Command-line entry point.

Subcommands::

    geocentroid compute  --pubs P --registry R [--weight citations] [--format geojson] --out F
    geocentroid stats    --pubs P --registry R [--granularity month] --out F
    geocentroid validate --pubs P [--registry R]
    geocentroid synth    --preset covid-2020-monthly --out-dir D

Option precedence is command-line flag, then ``GEOCENTROID_*`` environment
variable, then ``--config`` file (``key = value`` lines), then built-in default.
Exit status is 0 on success, 1 on a fatal error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
import time

from geocentroid import __version__
from geocentroid.engine import MODES, PLANAR
from geocentroid.export import (
    BaseMapError,
    RenderOptions,
    render_svg,
    write_csv,
    write_geojson,
    write_stats_csv,
)
from geocentroid.ingest import DEFAULT_YEAR_RANGE, RecordError, open_records, validate_stream
from geocentroid.pipeline import aggregate_file, default_workers
from geocentroid.registry import RegistryError, load_registry
from geocentroid.synth import PRESETS, SynthConfig, generate_synthetic, parse_plan
from geocentroid.trajectory import DEFAULT_MIN_RECORDS, MONTH, YEAR, TrajectoryConfig, parse_period
from geocentroid.weighting import WeightScheme

ENV_PREFIX = "GEOCENTROID_"
# environment variables recognized for path options
ENV_PATHS = ("pubs", "registry", "out", "stats_out", "base_map", "plot", "out_dir")
MAX_PRINTED_DIAGNOSTICS = 10


class FatalError(Exception):
    pass


def _scheme(text: str) -> WeightScheme:
    try:
        return WeightScheme.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _period(text: str):
    try:
        return parse_period(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _bounds(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    try:
        bounds = (int(lo), int(hi if sep else lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if bounds[0] < 0 or bounds[1] < bounds[0]:
        raise argparse.ArgumentTypeError(f"bad bounds {text!r}")
    return bounds


def _plan(text: str):
    try:
        return parse_plan(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_input_args(p: argparse.ArgumentParser, registry_required: bool = True) -> None:
    p.add_argument("--pubs", help="publication file, one JSON object per line (gzip ok)")
    p.add_argument("--registry", help="organization registry CSV (org_id,name,latitude,longitude)")
    p.add_argument("--strict", action="store_true", help="treat any bad row or record as fatal")
    p.add_argument("--min-year", type=int, default=DEFAULT_YEAR_RANGE[0])
    p.add_argument("--max-year", type=int, default=DEFAULT_YEAR_RANGE[1])
    p.set_defaults(registry_required=registry_required)


def _add_grouping_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--granularity", choices=(YEAR, MONTH), default=YEAR)
    p.add_argument("--from", dest="period_from", type=_period, help="first period, YYYY or YYYY-MM")
    p.add_argument("--to", dest="period_to", type=_period, help="last period, inclusive")
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker processes (default: available CPUs)")
    p.add_argument("--deterministic", action="store_true",
                   help="single sequential worker, bit-stable output")
    p.add_argument("--min-records", type=_non_negative_int, default=DEFAULT_MIN_RECORDS,
                   help="contributing records needed for a period to count as robust")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geocentroid",
        description="Weighted geographic centre of mass of research output per period.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key = value file supplying option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a centroid trajectory")
    _add_input_args(p)
    _add_grouping_args(p)
    p.add_argument("--weight", type=_scheme, default=WeightScheme(),
                   help="unweighted | citations | citations-window:N | custom:FIELD")
    p.add_argument("--mode", choices=MODES, default=PLANAR)
    p.add_argument("--format", choices=("csv", "geojson", "svg"), default="csv")
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--stats-out", help="period statistics CSV (default: <out>.stats.csv for csv output)")
    p.add_argument("--plot", help="also render a matplotlib figure of the trajectory (png/pdf/svg)")
    p.add_argument("--width", type=_positive_int, default=1000)
    p.add_argument("--height", type=_positive_int, default=500)
    p.add_argument("--base-map", help="world-outline GeoJSON drawn beneath the SVG trajectory")
    p.add_argument("--labels-every", type=_positive_int, default=10)
    p.add_argument("--no-labels", action="store_true")

    p = sub.add_parser("stats", help="per-period record counts")
    _add_input_args(p)
    _add_grouping_args(p)
    p.add_argument("--out", default="-")
    p.add_argument("--plot", help="also render a log-scaled count figure")

    p = sub.add_parser("validate", help="parse-only pass over the inputs")
    _add_input_args(p, registry_required=False)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--plan", type=_plan, help="PERIOD:COUNT list, e.g. 2020-01:289,2020-02:751")
    g.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--org-pool", type=_positive_int, default=500)
    p.add_argument("--authors", type=_bounds, default=(1, 8), metavar="LO:HI")
    p.add_argument("--orgs-per-author", type=_bounds, default=(1, 3), metavar="LO:HI")
    p.add_argument("--citations", type=_bounds, default=(0, 200), metavar="LO:HI")
    p.add_argument("--unknown-rate", type=float, default=0.05,
                   help="probability that an affiliation id is absent from the registry")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--registry-out", help="default: <out-dir>/registry.csv")
    p.add_argument("--pubs-out", help="default: <out-dir>/pubs.jsonl")
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for n, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError(f"{path}:{n}: expected key = value")
                values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc.strerror}") from None
    return values


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name)
    return None


def _apply_defaults(parser: argparse.ArgumentParser, argv) -> None:
    """Install config-file and environment values as subcommand defaults."""
    pre, _ = parser.parse_known_args(argv)
    sub = _subparser(parser, pre.command)
    dests = {a.dest: a for a in sub._actions}
    overrides = {}
    if pre.config:
        try:
            cfg = _read_config(pre.config)
        except ValueError as exc:
            parser.error(str(exc))
        for key, value in cfg.items():
            if key == "from":
                key = "period_from"
            elif key == "to":
                key = "period_to"
            if key not in dests or key == "help":
                parser.error(f"unknown config key {key!r} for {pre.command}")
            overrides[key] = value
    for key in ENV_PATHS:
        value = os.environ.get(ENV_PREFIX + key.upper())
        if value and key in dests:
            overrides[key] = value
    for key, value in overrides.items():
        action = dests[key]
        if action.nargs == 0:  # store_true flags
            value = value.lower() in ("1", "true", "yes", "on")
        sub.set_defaults(**{key: value})


def _summary(msg: str) -> None:
    print(f"geocentroid: {msg}", file=sys.stderr)


def _load_registry(args):
    if not args.registry:
        if args.registry_required:
            raise _Usage("--registry is required (or set GEOCENTROID_REGISTRY)")
        return None
    try:
        registry = load_registry(args.registry, strict=args.strict)
    except FileNotFoundError:
        raise FatalError(f"registry file not found: {args.registry}") from None
    except OSError as exc:
        raise FatalError(f"cannot read registry {args.registry}: {exc.strerror}") from None
    except RegistryError as exc:
        raise FatalError(f"{args.registry}: {exc}") from None
    if registry.errors:
        _summary(f"registry: {registry.rows_rejected} of {registry.rows_total} rows rejected")
        for err in registry.errors[:MAX_PRINTED_DIAGNOSTICS]:
            _summary(f"  {args.registry}: {err}")
    return registry


class _Usage(Exception):
    pass


def _require_pubs(args) -> str:
    if not args.pubs:
        raise _Usage("--pubs is required (or set GEOCENTROID_PUBS)")
    if not os.path.isfile(args.pubs):
        raise FatalError(f"publication file not found: {args.pubs}")
    return args.pubs


def _trajectory_config(args, scheme=None, mode=PLANAR) -> TrajectoryConfig:
    try:
        return TrajectoryConfig(
            scheme=scheme or WeightScheme(),
            mode=mode,
            granularity=args.granularity,
            min_records=args.min_records,
            period_from=args.period_from,
            period_to=args.period_to,
            year_range=(args.min_year, args.max_year),
            strict=args.strict,
        )
    except ValueError as exc:
        raise _Usage(str(exc)) from None


def _workers(args) -> int:
    if args.deterministic:
        return 1
    return args.threads or default_workers()


def _aggregate(args, registry, config, count_only):
    try:
        return aggregate_file(
            args.pubs, registry, config, workers=_workers(args), count_only=count_only
        )
    except RecordError as exc:
        raise FatalError(f"{args.pubs}: {exc}") from None
    except OSError as exc:
        raise FatalError(f"cannot read {args.pubs}: {exc}") from None


def _report_run(builder, n_periods, n_points, started, pubs_path) -> None:
    c = builder.counters
    skipped = sum(acc.n_skipped for acc in builder.accs.values())
    _summary(
        f"read {c['read']} records, {c['invalid']} invalid, {c['undated']} undated, "
        f"{c['filtered']} outside period filter, {skipped} skipped in periods; "
        f"{n_periods} periods, {n_points} trajectory points; "
        f"{time.perf_counter() - started:.2f}s"
    )
    details = [f"{k}={c[k]}" for k in (
        "no_authors", "unresolved", "dropped_authors", "unknown_org_refs",
        "missing_weight", "zero_weight", "degenerate") if c[k]]
    if details:
        _summary("  " + ", ".join(details))
    for err in builder.diagnostics[:MAX_PRINTED_DIAGNOSTICS]:
        _summary(f"  {pubs_path}: {err}")


def _open_out(path: str, binary: bool = False):
    if path in ("-", ""):
        return sys.stdout.buffer if binary else sys.stdout
    try:
        if binary:
            return open(path, "wb")
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise FatalError(f"cannot write {path}: {exc.strerror}") from None


def _write_text(path: str, writer) -> None:
    buf = io.StringIO()
    writer(buf)
    _write_bytes(path, buf.getvalue().encode("utf-8"))


def _write_bytes(path: str, data: bytes) -> None:
    out = _open_out(path, binary=True)
    try:
        out.write(data)
        out.flush()
    except OSError as exc:
        raise FatalError(f"cannot write {path}: {exc.strerror}") from None
    finally:
        if out is not sys.stdout.buffer:
            out.close()


def _stats_sibling(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.stats{ext or '.csv'}"


def cmd_compute(args) -> int:
    started = time.perf_counter()
    _require_pubs(args)
    registry = _load_registry(args)
    config = _trajectory_config(args, args.weight, args.mode)
    options = None
    if args.format == "svg":
        try:
            options = RenderOptions(
                width=args.width, height=args.height, show_labels=not args.no_labels,
                label_every=args.labels_every, base_map=args.base_map,
            )
        except ValueError as exc:
            raise _Usage(str(exc)) from None

    builder = _aggregate(args, registry, config, count_only=False)
    points = builder.points()
    stats = builder.period_stats()
    metadata = dict(config.metadata(), records_read=builder.counters["read"])

    if args.format == "csv":
        _write_text(args.out, lambda fh: write_csv(points, fh))
    elif args.format == "geojson":
        _write_text(args.out, lambda fh: write_geojson(points, metadata, fh))
    else:
        try:
            data = render_svg(points, options, config.metadata())
        except BaseMapError as exc:
            raise FatalError(str(exc)) from None
        _write_bytes(args.out, data)

    stats_out = args.stats_out
    if stats_out is None and args.format == "csv" and args.out not in ("-", ""):
        stats_out = _stats_sibling(args.out)
    if stats_out:
        _write_text(stats_out, lambda fh: write_stats_csv(stats, fh))
    if args.plot:
        from geocentroid.plotting import plot_trajectory

        plot_trajectory(points, args.plot, title=f"{config.scheme} centre of mass ({config.mode})")
    _report_run(builder, len(stats), len(points), started, args.pubs)
    return 0


def cmd_stats(args) -> int:
    started = time.perf_counter()
    _require_pubs(args)
    registry = _load_registry(args)
    config = _trajectory_config(args)
    builder = _aggregate(args, registry, config, count_only=True)
    stats = builder.period_stats()
    _write_text(args.out, lambda fh: write_stats_csv(stats, fh))
    if args.plot:
        from geocentroid.plotting import plot_period_counts

        plot_period_counts(stats, args.plot, min_records=args.min_records)
    _report_run(builder, len(stats), 0, started, args.pubs)
    return 0


def cmd_validate(args) -> int:
    started = time.perf_counter()
    _require_pubs(args)
    registry = _load_registry(args)
    try:
        with open_records(args.pubs) as fh:
            report = validate_stream(
                fh, strict=args.strict, year_range=(args.min_year, args.max_year)
            )
    except RecordError as exc:
        raise FatalError(f"{args.pubs}: {exc}") from None
    print(f"publications: {report.lines} records, {report.valid} valid, {report.n_errors} invalid")
    for err in report.errors:
        print(f"  {args.pubs}: {err}")
    if registry is not None:
        print(
            f"registry: {registry.rows_total} rows, {len(registry)} accepted, "
            f"{registry.rows_rejected} rejected"
        )
        for err in registry.errors:
            print(f"  {args.registry}: {err}")
    _summary(f"validated in {time.perf_counter() - started:.2f}s")
    return 0


def cmd_synth(args) -> int:
    plan = PRESETS[args.preset] if args.preset else args.plan
    if not plan:
        raise _Usage("synth needs --plan or --preset")
    try:
        config = SynthConfig(
            seed=args.seed, plan=list(plan), org_pool=args.org_pool, authors=args.authors,
            orgs_per_author=args.orgs_per_author, citations=args.citations,
            unknown_org_rate=args.unknown_rate,
        )
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    registry_out = args.registry_out or os.path.join(args.out_dir, "registry.csv")
    pubs_out = args.pubs_out or os.path.join(args.out_dir, "pubs.jsonl")
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        n = generate_synthetic(config, registry_out, pubs_out)
    except OSError as exc:
        raise FatalError(f"cannot write synthetic dataset: {exc}") from None
    _summary(f"wrote {n} records to {pubs_out} and {config.org_pool} organizations to {registry_out}")
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "stats": cmd_stats,
    "validate": cmd_validate,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _apply_defaults(parser, argv)
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"geocentroid {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except FatalError as exc:
        print(f"geocentroid: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
