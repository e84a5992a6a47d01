"""Command-line entry point: classification, parabolics, atlas checks and sweep tables."""

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml
from jinja2 import Environment, FileSystemLoader
from xlsxwriter.workbook import Workbook

script_dir = Path(__file__).parent
if str(script_dir) not in sys.path:
    sys.path.insert(0, str(script_dir))

from atlas import (  # noqa: E402
    UnreachableOverlapError,
    admissible_charts,
    base_chart,
    enumerate_charts,
    sample_point,
    verify_atlas,
    verify_isotropy,
)
from classifier import classify_record, sweep  # noqa: E402
from parabolic import (  # noqa: E402
    FlagType,
    base_point,
    in_parabolic_window,
    parabolic_from_weights,
    satisfies_chain,
    stabilizer_direct,
    weight_tuple,
)
from superalgebra import Series, build_superalgebra, odd_summands, root_decomposition  # noqa: E402

logger = logging.getLogger(__name__)

TEXT, RECORDS = "text", "records"


def load_configuration(config_dir: Path | None = None) -> tuple[dict, dict]:
    """Read the sweep bounds and atlas sampling defaults."""
    data_dir = Path(config_dir) if config_dir else script_dir / "data"
    with open(data_dir / "sweep.yml", "r") as f:
        sweep_cfg = yaml.safe_load(f) or {}
    with open(data_dir / "atlas.yml", "r") as f:
        atlas_cfg = yaml.safe_load(f) or {}
    return sweep_cfg, atlas_cfg


def _environment() -> Environment:
    return Environment(loader=FileSystemLoader(script_dir / "templates"), trim_blocks=True, lstrip_blocks=True)


def _emit(args, template: str, records: list[dict], /, **context) -> None:
    if args.format == RECORDS:
        for record in records:
            print(json.dumps(record))
        return
    print(_environment().get_template(template).render(**context), end="")


def _int_tuple(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _flag_type(parser: argparse.ArgumentParser, args) -> FlagType:
    series = Series(args.series)
    if series is Series.Q:
        if args.l is not None and args.l != args.k:
            parser.error("q flags take only --k; l mirrors k")
        l = args.k  # noqa: E741
    elif args.l is None:
        parser.error(f"--l is required for {series.value}")
    else:
        l = args.l  # noqa: E741
    try:
        return FlagType(series, args.m, args.n, args.k, l)
    except ValueError as e:
        parser.error(str(e))


def cmd_classify(parser, args) -> int:
    record = classify_record(_flag_type(parser, args))
    _emit(args, "classify.txt.j2", [record.as_dict()], record=record)
    return 0 if record.agree else 1


def cmd_parabolic(parser, args) -> int:
    ft = _flag_type(parser, args)
    g = build_superalgebra(ft.series, ft.m, ft.n)
    w = weight_tuple(ft)
    base = base_point(ft)
    from_weights = parabolic_from_weights(g, w)
    stabilizer = stabilizer_direct(g, base)
    equal = from_weights == stabilizer
    record = {
        "series": ft.series.value,
        "m": ft.m,
        "n": ft.n,
        "k": list(ft.k),
        "l": list(ft.l),
        "a": list(w.a),
        "b": list(w.b),
        "chain": satisfies_chain(ft, w),
        "base_point": [list(v) for v in base],
        "parabolic_dim": list(from_weights.dims),
        "stabilizer_dim": list(stabilizer.dims),
        "equal": equal,
        "window": in_parabolic_window(ft),
    }
    bases = []
    if args.bases:
        for vector in stabilizer.basis_vectors():
            terms = (g.labels[t] if c == 1 else f"{c}*{g.labels[t]}" for t, c in sorted(vector.items()))
            bases.append(" + ".join(terms))
        record["stabilizer_basis"] = bases
    _emit(
        args,
        "parabolic.txt.j2",
        [record],
        flag=ft,
        algebra=g,
        weights=w,
        chain=record["chain"],
        base=[[_vector_name(ft, i) for i in v] for v in base],
        parabolic=from_weights,
        stabilizer=stabilizer,
        equal=equal,
        window=record["window"],
        bases=bases,
    )
    return 0 if equal or not record["window"] else 1


def _vector_name(ft: FlagType, index: int) -> str:
    if index < ft.m:
        if ft.series is Series.OSP and ft.m % 2:
            return f"e{index}"
        return f"e{index + 1}"
    if ft.series is Series.Q:
        return f"pi(e{index - ft.m + 1})"
    return f"f{index - ft.m + 1}"


def cmd_verify_atlas(parser, args, atlas_cfg: dict) -> int:
    ft = _flag_type(parser, args)
    count = args.seeds if args.seeds is not None else int(atlas_cfg.get("seeds", 50))
    seeds = range(args.seed, args.seed + count)
    bound = int(atlas_cfg.get("bound", 5))
    report = verify_atlas(ft, seeds, bound=bound, retries=int(atlas_cfg.get("retries", 1000)))
    record = report.as_dict()
    isotropy = None
    if ft.series is not Series.GL:
        isotropy = verify_isotropy(ft, seeds, bound=bound)
        record.update({k: v for k, v in isotropy.as_dict().items() if k.startswith("isotropy")})
    _emit(args, "atlas.txt.j2", [record], report=report, isotropy=isotropy)
    return 0 if report.ok and (isotropy is None or isotropy.ok) else 1


def _write_xlsx(path: str, records: list[dict]) -> None:
    workbook = Workbook(path)
    worksheet = workbook.add_worksheet("classification")
    header = list(records[0]) if records else []
    for c, name in enumerate(header):
        worksheet.write(0, c, name)
    for r, record in enumerate(records, start=1):
        for c, name in enumerate(header):
            value = record[name]
            worksheet.write(r, c, ",".join(map(str, value)) if isinstance(value, list) else value)
    workbook.close()
    logger.info("Wrote %d rows to %s", len(records), path)


def cmd_table(parser, args, sweep_cfg: dict) -> int:
    series_list = [Series(args.series)] if args.series else list(Series)
    records = []
    for series in series_list:
        bounds = sweep_cfg.get(series.value, {})
        max_m = args.max_m if args.max_m is not None else int(bounds.get("max_m", 0))
        max_n = args.max_n if args.max_n is not None else int(bounds.get("max_n", 0))
        max_r = args.max_r if args.max_r is not None else int(bounds.get("max_r", 0))
        records.extend(sweep(series, max_m, max_n, max_r, jobs=args.jobs))
    rows = [r.as_dict() for r in records]
    disagreements = sum(1 for r in records if not r.agree)
    if args.xlsx:
        _write_xlsx(args.xlsx, rows)
    _emit(args, "table.txt.j2", rows, records=records, disagreements=disagreements)
    return 0 if disagreements == 0 else 1


def cmd_algebra(parser, args) -> int:
    series = Series(args.series)
    try:
        g = build_superalgebra(series, args.m, args.n)
    except ValueError as e:
        parser.error(str(e))
    system = root_decomposition(g)
    matrices = []
    for t in range(g.dim):
        dense = g.matrix(t)
        matrices.append((g.labels[t], [[str(v) for v in row] for row in dense]))
    record = {
        "series": series.value,
        "m": g.m,
        "n": g.n,
        "dim": list(g.dims),
        "cartan": [g.labels[t] for t in g.cartan],
        "even_roots": system.labels(0),
        "odd_roots": system.labels(1),
        "zero_odd": [g.labels[t] for t in system.zero_odd],
        "summands": [{"name": s.name, "dim": s.dim} for s in odd_summands(g)],
        "basis": [
            {
                "label": g.labels[t],
                "parity": g.parity[t],
                "entries": [[r, c, str(v)] for (r, c), v in sorted(g.basis[t].items())],
            }
            for t in range(g.dim)
        ],
    }
    _emit(
        args,
        "algebra.txt.j2",
        [record],
        algebra=g,
        cartan=record["cartan"],
        even_roots=record["even_roots"],
        odd_roots=record["odd_roots"],
        zero_odd=record["zero_odd"],
        summands=odd_summands(g),
        matrices=matrices if args.matrices else [],
    )
    return 0


def cmd_sample(parser, args, atlas_cfg: dict) -> int:
    ft = _flag_type(parser, args)
    charts = enumerate_charts(ft)
    if args.chart is None:
        chart = base_chart(ft)
    elif 0 <= args.chart < len(charts):
        chart = charts[args.chart]
    else:
        parser.error(f"--chart must lie in 0..{len(charts) - 1}")
    overlap = admissible_charts(ft) if args.overlap else ()
    try:
        point = sample_point(
            ft,
            chart,
            args.seed,
            overlap=overlap,
            bound=int(atlas_cfg.get("bound", 5)),
            retries=int(atlas_cfg.get("retries", 1000)),
        )
    except UnreachableOverlapError as e:
        logger.error("%s", e)
        return 1
    record = {"flag": ft.label, **point.to_records()}
    if args.format == RECORDS:
        print(json.dumps(record))
    else:
        print(f"{ft.label}, chart {chart.label}, seed {args.seed}")
        for s, z in enumerate(point.matrices, start=1):
            print(f"Z_{s} = {z!r}")
    return 0


def _add_flag_arguments(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--series", required=True, choices=[s.value for s in Series], help="Series of the algebra")
    sub.add_argument("--m", type=int, required=True, help="Even dimension of the ambient space")
    sub.add_argument("--n", type=int, required=True, help="Odd dimension of the ambient space")
    sub.add_argument("--k", type=_int_tuple, required=True, help="Even stage dimensions, e.g. 2,1")
    sub.add_argument("--l", type=_int_tuple, default=None, help="Odd stage dimensions, e.g. 1,0")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[TEXT, RECORDS], default=TEXT, help="Human text or JSON lines")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    common.add_argument("--config", type=Path, default=None, help="Directory holding sweep.yml and atlas.yml")

    parser = argparse.ArgumentParser(description="Lie superalgebras and flag supermanifolds over the rationals.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    classify = subparsers.add_parser("classify", parents=[common], help="Classify H^0 for one flag type")
    _add_flag_arguments(classify)

    parabolic = subparsers.add_parser("parabolic", parents=[common], help="Compare parabolic and stabilizer")
    _add_flag_arguments(parabolic)
    parabolic.add_argument("--bases", action="store_true", help="Also print a basis of the stabilizer")

    atlas = subparsers.add_parser("verify-atlas", parents=[common], help="Check the chart atlas exactly")
    _add_flag_arguments(atlas)
    atlas.add_argument("--seeds", type=int, default=None, help="Number of seeds per chart")
    atlas.add_argument("--seed", type=int, default=1, help="First seed")

    table = subparsers.add_parser("table", parents=[common], help="Classify every flag type within bounds")
    table.add_argument("--series", choices=[s.value for s in Series], default=None, help="Restrict to one series")
    table.add_argument("--max-m", type=int, default=None)
    table.add_argument("--max-n", type=int, default=None)
    table.add_argument("--max-r", type=int, default=None)
    table.add_argument("--jobs", type=int, default=1, help="Worker processes")
    table.add_argument("--xlsx", type=str, default=None, help="Also write the table to this workbook")

    algebra = subparsers.add_parser("algebra", parents=[common], help="Dump a basis and its roots")
    algebra.add_argument("--series", required=True, choices=[s.value for s in Series])
    algebra.add_argument("--m", type=int, required=True)
    algebra.add_argument("--n", type=int, required=True)
    algebra.add_argument("--matrices", action="store_true", help="Print every basis matrix")

    sample = subparsers.add_parser("sample", parents=[common], help="Dump a sampled chart point")
    _add_flag_arguments(sample)
    sample.add_argument("--seed", type=int, default=1)
    sample.add_argument("--chart", type=int, default=None, help="Chart number in enumeration order")
    sample.add_argument("--overlap", action="store_true", help="Redraw until the point meets every chart")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s: %(message)s")
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        sweep_cfg, atlas_cfg = load_configuration(args.config)
    except FileNotFoundError as e:
        parser.error(f"configuration not found: {e.filename}")

    if args.command == "classify":
        return cmd_classify(parser, args)
    if args.command == "parabolic":
        return cmd_parabolic(parser, args)
    if args.command == "verify-atlas":
        return cmd_verify_atlas(parser, args, atlas_cfg)
    if args.command == "table":
        return cmd_table(parser, args, sweep_cfg)
    if args.command == "algebra":
        return cmd_algebra(parser, args)
    return cmd_sample(parser, args, atlas_cfg)


if __name__ == "__main__":
    sys.exit(main())
