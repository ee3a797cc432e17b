"""Command-line surface: generate | analyze | sweep | table | limit | compare-gps"""

import argparse
import re
import sys
from pathlib import Path
import logfire
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import CyclotomicPlan, FractionRotation, Rotation, UniformRotation
from cyclocode.models.schemas import AnalysisReport, CorrelationMethod, OutputFormat, RunConfig
from cyclocode.services import correlation, experiments, storage, theory
from cyclocode.services.numtheory import primes_in_progression
from cyclocode.services.plans import plan_subset, walsh_plan
from cyclocode.services.sequences import instantiate, quarter_rotation

WALSH_SPEC = re.compile(r"^walsh:(\d+)(?:\[([\d,\s]*)\])?$")
TABLE_ROW_COLUMNS = [c for c in storage.TABLE_COLUMNS if c not in ("guc_bound", "limit_adjusted_df")]
SWEEP_COLUMNS = ["r", "adjusted_df", "overlay"]


# Argument parsing

def int_list(text: str) -> list[int]:
    """'1,2,5-7' -> [1, 2, 5, 6, 7]"""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer list: {text!r}")
    return out


class CommandParser(argparse.ArgumentParser):
    """Usage errors raise ValidationError instead of exiting with status 2"""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value)
    parser.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
    parser.add_argument("--threads", type=int, help="worker threads (overrides CYCLOCODE_THREADS)")
    parser.add_argument("--fft-threshold", type=float, help="largest tolerated FFT rounding deviation")


def _plan_options(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument("--plan", required=required, help="walsh:k, walsh:k[rows] or a plan JSON file")
    parser.add_argument("--rows", type=int_list, help="Walsh row subset, e.g. 1,2,4-6")


def _instance_options(parser: argparse.ArgumentParser):
    rotation = parser.add_mutually_exclusive_group()
    rotation.add_argument("--rotate-uniform", type=int, metavar="R", help="advance every sequence by R")
    rotation.add_argument("--rotate-fraction", metavar="RHO", help="advance by floor(RHO * p), RHO reduced mod 1")
    rotation.add_argument("--rotate-map", type=Path, metavar="FILE", help="JSON map pattern index -> advancement")
    parser.add_argument("--unimodularize", action="store_true", help="replace the zero at index 0")
    parser.add_argument("--fill", type=int, default=1, choices=[1, -1], help="value put at index 0")


def build_parser() -> argparse.ArgumentParser:
    parser = CommandParser(prog="cyclocode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", help="write the p-instance of a plan as a codebook file")
    _plan_options(generate)
    generate.add_argument("--prime", type=int, required=True)
    _instance_options(generate)
    _common(generate)

    analyze = sub.add_parser("analyze", help="peak and demerit-factor metrics of a codebook file")
    analyze.add_argument("codebook", type=Path)
    analyze.add_argument("--method", choices=[m.value for m in CorrelationMethod], default="fft")
    analyze.add_argument("--bounds", action="store_true", help="attach peak bounds (needs a plan)")
    analyze.add_argument("--verify", action="store_true", help="check FFT spectra against direct sums")
    analyze.add_argument("--pcdf", action="store_true", dest="with_pcdf", help="also report PCDF")
    _plan_options(analyze, required=False)
    _common(analyze)

    sweep = sub.add_parser("sweep", help="adjusted demerit factor for every advancement r")
    _plan_options(sweep)
    sweep.add_argument("--prime", type=int, required=True)
    sweep.add_argument("--stride", type=int, default=1)
    sweep.add_argument("--unimodularize", action="store_true")
    sweep.add_argument("--fill", type=int, default=1, choices=[1, -1])
    sweep.add_argument("--plot", type=Path, help="write a figure of the sweep")
    _common(sweep)

    table = sub.add_parser("table", help="one metrics row per prime")
    _plan_options(table, required=False)
    primes = table.add_mutually_exclusive_group()
    primes.add_argument("--preset", choices=experiments.TABLE_PRESETS)
    primes.add_argument("--primes", type=int_list, help="explicit prime list")
    primes.add_argument("--range", nargs=2, type=int, metavar=("LO", "HI"), dest="prime_range")
    table.add_argument("--max-k", type=int, help="last doubling step for the table3 preset")
    table.add_argument("--theory", action="store_true", help="add bound and limit columns")
    table.add_argument("--compare", action="store_true", help="print differences to published rows")
    _instance_options(table)
    _common(table)

    limit = sub.add_parser("limit", help="asymptotic demerit factor of rotated Hadamard-plan instances")
    limit.add_argument("--n", type=int, required=True, help="plan index")
    limit.add_argument("--rho", type=float, default=0.25)
    _common(limit)

    gps = sub.add_parser("compare-gps", help="GPS C/A codes against the order-6 Walsh codebook")
    gps.add_argument("--prns", type=int_list, help="PRN set (default 1-36)")
    gps.add_argument("--no-fallback", action="store_false", dest="fallback")
    gps.add_argument("--compare", action="store_true", help="print differences to published rows")
    gps.add_argument("--method", choices=[m.value for m in CorrelationMethod], default="fft")
    _common(gps)
    return parser


def parse_config(argv=None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    if "prime" in args:
        prime = args.pop("prime")
        args["primes"] = [prime] if prime is not None else []
    return RunConfig(**{k: v for k, v in args.items() if v is not None})


# Shared resolution

def resolve_plan(spec: str, rows: list[int] | None = None) -> CyclotomicPlan:
    match = WALSH_SPEC.match(spec.strip())
    if match:
        plan = walsh_plan(int(match.group(1)))
        if match.group(2) is not None:
            plan = plan_subset(plan, int_list(match.group(2)))
    else:
        path = Path(spec)
        if not path.exists():
            raise ValidationError(f"plan {spec!r} is neither walsh:k nor an existing file")
        plan = storage.load_plan(path)
    return plan_subset(plan, rows) if rows else plan


def resolve_rotation(config: RunConfig, default: Rotation | None = None) -> Rotation | None:
    if config.rotate_uniform is not None:
        return UniformRotation(config.rotate_uniform)
    if config.rotate_fraction is not None:
        return FractionRotation(config.rotate_fraction)
    if config.rotate_map is not None:
        return storage.load_rotation_map(config.rotate_map)
    return default


def resolve_primes(config: RunConfig, n: int) -> list[int]:
    if config.preset:
        return experiments.preset_primes(config.preset, n, config.max_k)
    if config.prime_range:
        return primes_in_progression(*config.prime_range, n)
    return list(config.primes)


def _fill(config: RunConfig) -> int | None:
    return config.fill if config.unimodularize else None


def _single_prime(config: RunConfig) -> int:
    if len(config.primes) != 1:
        raise ValidationError("this command needs exactly one --prime")
    return config.primes[0]


def _emit_rows(config: RunConfig, columns: list[str], rows: list[dict], stream):
    storage.write_csv(config.output, columns, rows, stream)


def _emit_json(config: RunConfig, models, stream):
    storage.dump_json(models, config.output, stream)


# Commands

def cmd_generate(config: RunConfig, stream) -> int:
    plan = resolve_plan(config.plan, config.rows)
    p = _single_prime(config)
    book = instantiate(plan, p, resolve_rotation(config), unimodularize_fill=_fill(config), workers=config.threads)
    if config.output is None:
        stream.write(storage.codebook_document(book).model_dump_json(indent=2) + "\n")
    else:
        storage.save_codebook(book, config.output)
    return 0


def cmd_analyze(config: RunConfig, stream) -> int:
    book = storage.load_codebook(config.codebook)
    summary = correlation.metrics(
        book,
        method=config.method,
        threshold=config.fft_threshold,
        workers=config.threads,
        with_pcdf=config.with_pcdf,
    )
    report = AnalysisReport(metrics=summary)
    if config.bounds:
        spec = config.plan or book.name
        if book.p is None:
            raise ValidationError(f"codebook {book.name} carries no prime; bounds need one")
        plan = resolve_plan(spec, config.rows)
        report.bounds = theory.peak_bounds(plan, book.p, book.unimodularized, summary)
    if config.verify:
        report.oracle = correlation.verify_oracle(book, config.fft_threshold)
        if report.oracle.agrees is False:
            logfire.error("FFT and direct spectra disagree", codebook=book.name)

    if config.format == OutputFormat.JSON:
        _emit_json(config, report, stream)
        return 0
    row = storage.table_row(summary, book.p if book.p is not None else book.name)
    columns = list(TABLE_ROW_COLUMNS)
    guc = [b for b in report.bounds if b.name == "guc"]
    if guc:
        row.guc_bound = guc[0].bound / summary.sdc**0.5
        columns.append("guc_bound")
    _emit_rows(config, *storage.table_rows_csv([row], columns), stream)
    return 0


def cmd_sweep(config: RunConfig, stream) -> int:
    plan = resolve_plan(config.plan, config.rows)
    p = _single_prime(config)
    report = experiments.rotation_sweep(
        plan, p, config.stride, _fill(config), config.method, config.fft_threshold, config.threads
    )
    if config.plot is not None:
        experiments.plot_sweep(report, config.plot)
    print(f"# minimum {report.minimum:.6f} at r = {', '.join(map(str, report.argmin))}", file=sys.stderr)
    print(f"# maximum {report.maximum:.6f} at r = {', '.join(map(str, report.argmax))}", file=sys.stderr)
    if config.format == OutputFormat.JSON:
        _emit_json(config, report, stream)
        return 0
    rows = [
        {"r": pt.r, "adjusted_df": storage.fmt(pt.adjusted_df, 6), "overlay": storage.fmt(pt.overlay, 6)}
        for pt in report.points
    ]
    _emit_rows(config, SWEEP_COLUMNS, rows, stream)
    return 0


def _print_deltas(rows):
    deltas = experiments.compare_with_references(rows)
    if not deltas:
        return
    columns = list(dict.fromkeys(k for d in deltas for k in d))
    storage.write_csv(
        None,
        columns,
        [{k: (f"{v:+.6f}" if isinstance(v, float) else v) for k, v in d.items()} for d in deltas],
        sys.stderr,
    )


def cmd_table(config: RunConfig, stream) -> int:
    plan = resolve_plan(config.plan or "walsh:3", config.rows)
    primes = resolve_primes(config, plan.n)
    rows = experiments.table_rows(
        plan,
        primes,
        resolve_rotation(config, quarter_rotation()),
        _fill(config),
        with_theory=config.theory,
        method=config.method,
        threshold=config.fft_threshold,
        workers=config.threads,
    )
    if config.compare:
        _print_deltas(rows)
    if config.format == OutputFormat.JSON:
        _emit_json(config, rows, stream)
        return 0
    columns = storage.TABLE_COLUMNS if config.theory else TABLE_ROW_COLUMNS
    _emit_rows(config, *storage.table_rows_csv(rows, columns), stream)
    return 0


def cmd_limit(config: RunConfig, stream) -> int:
    report = theory.limit_report(config.n, config.rho)
    if config.format == OutputFormat.JSON:
        _emit_json(config, report, stream)
        return 0
    _emit_rows(config, *storage.model_rows([report]), stream)
    return 0


def cmd_compare_gps(config: RunConfig, stream) -> int:
    rows, prns = experiments.compare_gps(config.prns, config.fallback, config.method, config.threads)
    print(f"# PRN set: {','.join(map(str, prns))}", file=sys.stderr)
    if config.compare:
        _print_deltas(rows)
    if config.format == OutputFormat.JSON:
        _emit_json(config, rows, stream)
        return 0
    _emit_rows(config, *storage.table_rows_csv(rows, TABLE_ROW_COLUMNS), stream)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
    "table": cmd_table,
    "limit": cmd_limit,
    "compare-gps": cmd_compare_gps,
}


def dispatch(config: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    with logfire.span("command", command=config.command):
        return COMMANDS[config.command](config, stream)
