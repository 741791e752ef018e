"""Command-line entry point: ``frubias audit | sweep | regions``.

Exit codes: 0 success, 1 runtime error, 2 validation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import dataset as ds
from .errors import FrubiasError, ValidationError
from .fru import AGGREGATIONS, level1, level2, parse_lambda_grid, sweep
from .granulation import compute_regions, write_boundary_delta_csv, write_membership_csv
from .operators import DistanceKind, FuzzyConfig, ImplicatorKind, TNormKind
from .report import AuditResult, format_summary, write_csv_tables, write_json, write_sweep_csv
from .stats.association import correlation_table
from .stats.fairness import group_metrics, individual_metrics, read_predictions
from .stats.scenarios import Thresholds, classify_scenarios

log = logging.getLogger("frubias")

EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2

GERMAN_PROTECTED = ("gender", "age")
GERMAN_GROUPS = ("gender=female", "age<25")


def _names(text):
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def _choices(enum):
    return [e.value for e in enum]


def _add_data_args(p):
    p.add_argument("--data", required=True, help="data file")
    p.add_argument("--format", dest="fmt", choices=["csv", "whitespace", "german"], default="csv",
                   help="csv has a header row; german reads UCI german.data and recodes gender")
    p.add_argument("--schema", help="JSON schema descriptor (column kinds, protected flags, label)")
    p.add_argument("--protected", help="comma-separated protected feature names")
    p.add_argument("--allow-missing", action="store_true",
                   help="keep missing cells; they get per-attribute distance 1")


def _add_config_args(p, grid=False):
    if not grid:
        p.add_argument("--lambda", dest="lam", type=float, default=0.5, help="smoothing parameter (> 0)")
        p.add_argument("--distance", choices=_choices(DistanceKind), default="hmom")
        p.add_argument("--implicator", choices=_choices(ImplicatorKind), default="lukasiewicz")
        p.add_argument("--tnorm", choices=_choices(TNormKind), default="minimum")
    norm = p.add_mutually_exclusive_group()
    norm.add_argument("--distance-normalization", dest="normalize", action="store_true",
                      help="divide HMOM by the active feature count and HEOM by its square root")
    norm.add_argument("--no-distance-normalization", dest="normalize", action="store_false",
                      help="raw heterogeneous distance aggregate (default)")
    p.set_defaults(normalize=False)
    p.add_argument("--aggregate", choices=AGGREGATIONS, default="mean", help="class aggregation of FRU")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frubias", description="Fuzzy-rough bias audit of tabular datasets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    audit = sub.add_parser("audit", help="Level-1 FRU, correlations and bias scenarios")
    _add_data_args(audit)
    _add_config_args(audit)
    thresholds = Thresholds.from_env()
    audit.add_argument("--fru-large", type=float, default=thresholds.fru_large,
                       help="relative FRU at or above which FRU counts as large")
    audit.add_argument("--corr-strong", type=float, default=thresholds.corr_strong,
                       help="absolute correlation at or above which correlation counts as strong")
    audit.add_argument("--out", default="frubias-report", help="output directory")
    audit.add_argument("--formats", default="json,csv", help="comma-separated subset of json,csv")
    audit.add_argument("--level2", action="store_true", help="also run the pairwise suppression analysis")
    audit.add_argument("--level2-baseline", choices=["full", "single"], default="full")
    audit.add_argument("--baseline", action="store_true", help="compute group fairness metrics")
    audit.add_argument("--unprivileged", action="append",
                       help="unprivileged group, NAME=CATEGORY or NAME<THRESHOLD (repeatable)")
    audit.add_argument("--favorable", help="original label of the favorable class (default: first class)")
    audit.add_argument("--predictions", help="CSV instance_id,prediction with class codes")
    audit.add_argument("--k-neighbors", type=int, default=5)
    audit.add_argument("--quiet", action="store_true", help="do not print the summary table")

    sw = sub.add_parser("sweep", help="Level-1 FRU over an operator/smoothing grid")
    _add_data_args(sw)
    _add_config_args(sw, grid=True)
    sw.add_argument("--lambdas", default="0.5", help="start:stop:step (inclusive) or comma list")
    sw.add_argument("--implicators", default="lukasiewicz")
    sw.add_argument("--tnorms", default="minimum")
    sw.add_argument("--distances", default="hmom")
    sw.add_argument("--out", default="sweep.csv", help="long-format CSV path")

    rg = sub.add_parser("regions", help="dump region memberships and boundary deltas")
    _add_data_args(rg)
    _add_config_args(rg)
    rg.add_argument("--mask", action="append", default=[],
                    help="comma-separated feature names to suppress (repeatable)")
    rg.add_argument("--out", default="regions", help="output directory")
    return parser


def load_data(args) -> ds.DataTable:
    schema = ds.read_schema(args.schema) if args.schema else None
    if args.fmt == "german":
        raw = ds.load_table(args.data, schema or ds.GERMAN_SCHEMA, fmt="german", allow_missing=args.allow_missing)
        table = ds.german_credit_adapter(raw)
    else:
        table = ds.load_table(args.data, schema, fmt=args.fmt, allow_missing=args.allow_missing)
    names = _names(args.protected)
    if names:
        table = table.with_protected(names)
    return table


def _config(args, **overrides) -> FuzzyConfig:
    values = dict(implicator=getattr(args, "implicator", "lukasiewicz"), tnorm=getattr(args, "tnorm", "minimum"),
                  distance=getattr(args, "distance", "hmom"), smoothing=getattr(args, "lam", 0.5),
                  normalize_distance=args.normalize)
    values.update(overrides)
    return FuzzyConfig(**values)


def _groups(table, specs):
    """Attach group columns; returns their names."""
    names = []
    for spec in specs:
        if "<" in spec:
            column, threshold = spec.split("<", 1)
            try:
                value = float(threshold)
            except ValueError:
                raise ValidationError(f"bad threshold in {spec!r}", module="cli") from None
            table = ds.binarize_age(table, value, column=column.strip(), group_name=spec)
        elif "=" in spec:
            column, category = spec.split("=", 1)
            table = ds.category_group(table, column.strip(), category.strip(), group_name=spec)
        else:
            raise ValidationError(f"unprivileged group must be NAME=CATEGORY or NAME<THRESHOLD, got {spec!r}",
                                  module="cli")
        names.append(spec)
    return table, names


def cmd_audit(args) -> int:
    formats = set(_names(args.formats))
    if not formats or formats - {"json", "csv"}:
        raise ValidationError(f"--formats must be a subset of json,csv, got {args.formats!r}", module="cli")
    table = load_data(args)
    if not table.protected_indices:
        if args.fmt != "german":
            raise ValidationError(
                f"no protected features; pass --protected (valid features: {', '.join(table.feature_names)})",
                module="cli")
        table = table.with_protected(GERMAN_PROTECTED)
    thresholds = Thresholds(args.fru_large, args.corr_strong)
    config = _config(args)
    protected = table.protected_indices

    log.info("level-1 analysis on %d instances x %d features", table.n_instances, table.n_features)
    rep1 = level1(table, config, aggregate=args.aggregate, jobs=args.jobs)
    correlations = correlation_table(table, protected)
    scenarios = classify_scenarios(rep1, correlations, thresholds, protected)
    audit = AuditResult(table, rep1, correlations, scenarios)

    if args.level2:
        for p in protected:
            audit.level2.append(level2(table, config, p, baseline=rep1.baseline,
                                       baseline_mode=args.level2_baseline, aggregate=args.aggregate,
                                       jobs=args.jobs))

    if args.baseline or args.predictions:
        specs = args.unprivileged or (list(GERMAN_GROUPS) if args.fmt == "german" else [])
        if not specs:
            raise ValidationError("--baseline needs at least one --unprivileged group", module="cli")
        favorable = 0
        if args.favorable is not None:
            if args.favorable not in table.class_labels:
                raise ValidationError(f"unknown class {args.favorable!r}; classes: {list(table.class_labels)}",
                                      module="cli")
            favorable = table.class_labels.index(args.favorable)
        grouped, names = _groups(table, specs)
        predictions = read_predictions(args.predictions, table) if args.predictions else None
        for name in names:
            audit.baseline[name] = group_metrics(grouped, name, favorable, predictions)
        if predictions is not None:
            audit.individual["all"] = individual_metrics(table, predictions, args.k_neighbors, favorable,
                                                         config.distance, config.normalize_distance)
            for p in protected:
                view = ds.apply_mask(table, ds.FeatureMask([p]))
                audit.individual[f"excluding {table.schema[p].name}"] = individual_metrics(
                    view, predictions, args.k_neighbors, favorable, config.distance, config.normalize_distance)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if "json" in formats:
        write_json(out / "report.json", audit.as_dict())
    if "csv" in formats:
        write_csv_tables(out, audit)
    if not args.quiet:
        print(format_summary(audit))
    return EXIT_OK


def cmd_sweep(args) -> int:
    table = load_data(args)
    lambdas = parse_lambda_grid(args.lambdas)
    grid = sweep(
        table,
        implicators=_names(args.implicators),
        tnorms=_names(args.tnorms),
        distances=_names(args.distances),
        lambdas=lambdas,
        normalize_distance=args.normalize,
        aggregate=args.aggregate,
        jobs=args.jobs,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    n = write_sweep_csv(out, grid, table.class_labels)
    print(f"{len(grid.cells)} cells, {n} rows -> {out}")
    return EXIT_OK


def cmd_regions(args) -> int:
    table = load_data(args)
    config = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    full = compute_regions(table, config)
    write_membership_csv(out / "regions_full.csv", full, table.class_labels)
    print(f"wrote {out / 'regions_full.csv'}")
    for spec in args.mask:
        names = _names(spec)
        mask = ds.feature_names_to_mask(table, names)
        masked = compute_regions(ds.apply_mask(table, mask), config)
        tag = "-".join(names)
        write_membership_csv(out / f"regions_minus_{tag}.csv", masked, table.class_labels)
        write_boundary_delta_csv(out / f"boundary_delta_{tag}.csv", full, masked, table.class_labels)
        print(f"wrote {out / f'regions_minus_{tag}.csv'} and {out / f'boundary_delta_{tag}.csv'}")
    return EXIT_OK


COMMANDS = {"audit": cmd_audit, "sweep": cmd_sweep, "regions": cmd_regions}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    except ValidationError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FrubiasError as exc:
        print(f"error [{exc.module}]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc, FileNotFoundError) else EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error [runtime]: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
