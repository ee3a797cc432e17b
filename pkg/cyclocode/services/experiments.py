"""Multi-prime tables, rotation sweeps and the GPS comparison"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
import math
import numpy as np
import logfire
from cyclocode.core.config import settings
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import (
    Codebook,
    CyclotomicPlan,
    FractionRotation,
    PerPatternRotation,
    Rotation,
    UniformRotation,
)
from cyclocode.models.schemas import (
    CorrelationMethod,
    DecompositionReport,
    SweepPoint,
    SweepReport,
    TableRow,
)
from cyclocode.services import baseline, correlation, references, theory
from cyclocode.services.numtheory import field_context, is_prime, next_usable_prime, primes_in_progression
from cyclocode.services.sequences import instantiate, quarter_rotation, rotate
from cyclocode.services.storage import table_row

TABLE_PRESETS = ("table1", "table3")
SMALL_PRIME_LIMIT = 1249
DOUBLING_RANGE = (4, 25)
COMPARISON_TOLERANCE = 5e-5


# Prime selection

def preset_primes(preset: str, n: int = 8, max_k: int | None = None) -> list[int]:
    """table1: primes = 1 (mod n) from 17 to 1249; table3: least such prime >= 2^k + 1"""
    match preset:
        case "table1":
            return primes_in_progression(17, SMALL_PRIME_LIMIT, n)
        case "table3":
            lo, hi = DOUBLING_RANGE
            hi = hi if max_k is None else min(hi, max_k)
            return [next_usable_prime(2**k + 1, n) for k in range(lo, hi + 1)]
    raise ValidationError(f"unknown preset {preset!r}; expected one of {', '.join(TABLE_PRESETS)}")


def _rotation_fraction(rotation: Rotation, p: int) -> float | None:
    match rotation:
        case FractionRotation(rho=rho):
            return float(rho)
        case UniformRotation(r=r):
            return (r % p) / p
    return None


# Tables

def table_row_for_prime(
    plan: CyclotomicPlan,
    p: int,
    rotation: Rotation | None = None,
    fill: int | None = 1,
    with_theory: bool = False,
    method: CorrelationMethod = CorrelationMethod.FFT,
    threshold: float | None = None,
    workers: int | None = None,
) -> TableRow:
    rotation = rotation or quarter_rotation()
    book = instantiate(plan, p, rotation, unimodularize_fill=fill, workers=workers)
    summary = correlation.metrics(book, method=method, threshold=threshold, workers=workers)
    row = table_row(summary, p)
    if with_theory:
        bounds = theory.peak_bounds(plan, p, unimodularized=fill is not None, summary=summary)
        guc = [b for b in bounds if b.name == "guc"]
        if guc:
            # on the same scale as guc_ratio
            row.guc_bound = guc[0].bound / math.sqrt(summary.sdc)
        rho = _rotation_fraction(rotation, p)
        if rho is not None and plan.flags.hadamard:
            row.limit_adjusted_df = theory.asymptotic_adjusted_df(plan.n, rho)
        elif isinstance(rotation, PerPatternRotation) and plan.flags.hadamard:
            cdf = theory.per_pattern_limit(plan, rotation, theory.v_parity(p, plan.n), p)
            row.limit_adjusted_df = (plan.n - 1) * (cdf - 1)
    return row


def table_rows(
    plan: CyclotomicPlan,
    primes: list[int],
    rotation: Rotation | None = None,
    fill: int | None = 1,
    with_theory: bool = False,
    method: CorrelationMethod = CorrelationMethod.FFT,
    threshold: float | None = None,
    workers: int | None = None,
) -> list[TableRow]:
    """One row per usable prime in input order; unusable primes are skipped with a warning"""
    with logfire.span("table_rows", plan=plan.name, primes=len(primes)):
        usable = []
        for p in primes:
            if not is_prime(p) or p == 2:
                logfire.warn("Prime skipped", plan=plan.name, p=p, reason=f"{p} is not an odd prime")
            elif (p - 1) % plan.n:
                logfire.warn("Prime skipped", plan=plan.name, p=p, reason=f"{plan.n} does not divide p - 1")
            else:
                usable.append(p)

        def run(p: int) -> TableRow:
            # pair-level parallelism inside metrics stays serial
            return table_row_for_prime(plan, p, rotation, fill, with_theory, method, threshold, workers=1)

        with ThreadPoolExecutor(max_workers=workers or settings.THREADS) as pool:
            rows = list(pool.map(run, usable))
        logfire.info("Table computed", plan=plan.name, rows=len(rows), skipped=len(primes) - len(usable))
        return rows


def compare_with_references(rows: list[TableRow]) -> list[dict]:
    """Per-cell differences against the published rows that exist"""
    out = []
    for row in rows:
        reference = references.reference_row(row.p)
        if reference is None:
            continue
        deltas = references.row_deltas(row, reference)
        worst = max((abs(v) for v in deltas.values()), default=0.0)
        out.append({"p": row.p, "max_abs_delta": worst, **deltas})
    return out


# Rotation sweep

def sweep_overlay(r, p: int):
    """1/3 + Phi(2r/p)"""
    return 1.0 / 3.0 + theory.phi(2 * np.asarray(r) / p)


def rotation_sweep(
    plan: CyclotomicPlan,
    p: int,
    stride: int = 1,
    fill: int | None = 1,
    method: CorrelationMethod = CorrelationMethod.FFT,
    threshold: float | None = None,
    workers: int | None = None,
) -> SweepReport:
    """Adjusted demerit factor for every advancement r = 0, stride, 2*stride, ... below p

    Extremes are located on exact rationals for binary codebooks, so every tied r is reported.
    """
    if stride < 1:
        raise ValidationError(f"stride must be positive, got {stride}")
    with logfire.span("rotation_sweep", plan=plan.name, p=p, stride=stride):
        base = instantiate(plan, p, UniformRotation(0), unimodularize_fill=fill, workers=workers)

        def run(r: int):
            book = Codebook(
                sequences=tuple(rotate(f, r) for f in base.periodic),
                name=base.name,
                p=p,
                n=base.n,
                rotation=UniformRotation(r).describe(),
                unimodularized=base.unimodularized,
                fill=base.fill,
            )
            summary = correlation.metrics(book, method=method, threshold=threshold, workers=1)
            exact = summary.adjusted_exact
            return exact if exact is not None else summary.adjusted_df

        shifts = list(range(0, p, stride))
        with ThreadPoolExecutor(max_workers=workers or settings.THREADS) as pool:
            values = list(pool.map(run, shifts))

        overlay = sweep_overlay(np.array(shifts), p)
        points = [
            SweepPoint(r=r, adjusted_df=float(v), overlay=float(o)) for r, v, o in zip(shifts, values, overlay)
        ]
        low, high = min(values), max(values)
        report = SweepReport(
            name=plan.name,
            p=p,
            points=points,
            minimum=float(low),
            argmin=[r for r, v in zip(shifts, values) if v == low],
            maximum=float(high),
            argmax=[r for r, v in zip(shifts, values) if v == high],
            max_overlay_gap=max(abs(pt.adjusted_df - pt.overlay) for pt in points),
        )
        logfire.info(
            "Sweep finished",
            plan=plan.name,
            p=p,
            minimum=report.minimum,
            argmin=report.argmin,
            maximum=report.maximum,
            argmax=report.argmax,
        )
        return report


def plot_sweep(report: SweepReport, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    r = [pt.r for pt in report.points]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(r, [pt.adjusted_df for pt in report.points], ".", markersize=2, label="measured")
    ax.plot(r, [pt.overlay for pt in report.points], "-", linewidth=1, label="1/3 + Phi(2r/p)")
    ax.set_xlabel("advancement r")
    ax.set_ylabel("adjusted demerit factor")
    ax.set_title(f"{report.name}, p = {report.p}")
    ax.set_xlim(0, report.p)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logfire.info("Sweep plot written", path=str(path))


# Demerit factor decomposition

def pair_demerits(f, g, periodic_f, periodic_g, threshold: float | None = None) -> tuple[float, float]:
    """(CDF(f, g), PCDF(f, g)) of one pair, both including shift 0"""
    energy = float(np.vdot(periodic_f.entries, periodic_f.entries).real) * float(
        np.vdot(periodic_g.entries, periodic_g.entries).real
    )
    ac = correlation.acorr_fft(f, g, threshold).values
    pc = correlation.pcorr(periodic_f, periodic_g, threshold).values
    return float(np.sum(np.abs(ac) ** 2)) / energy, float(np.sum(np.abs(pc) ** 2)) / energy


def decomposition_reports(
    plan: CyclotomicPlan, p: int, rotation: Rotation | None = None, threshold: float | None = None
) -> list[DecompositionReport]:
    """Decomposition residual for every pair i <= j of the derived (zero at 0) p-instance"""
    rotation = rotation or quarter_rotation()
    with logfire.span("decomposition_reports", plan=plan.name, p=p):
        ctx = field_context(p)
        book = instantiate(plan, p, rotation, unimodularize_fill=None, ctx=ctx)
        if book.collisions:
            raise ValidationError(f"plan {plan.name} collides at p = {p}")
        shifts = rotation.resolve(p, len(plan))
        reports = []
        for i in range(len(plan)):
            for j in range(i, len(plan)):
                cdf, pcdf = pair_demerits(
                    book.sequences[i], book.sequences[j], book.periodic[i], book.periodic[j], threshold
                )
                reports.append(
                    theory.cdf_decomposition_residual(
                        plan.patterns[i], plan.patterns[j], p, shifts[i], shifts[j], cdf, pcdf, first=i, second=j
                    )
                )
        failed = [(r.first, r.second) for r in reports if not r.satisfied]
        if failed:
            logfire.warn("Decomposition residual over bound", plan=plan.name, p=p, pairs=failed)
        return reports


# GPS comparison

def comparison_rows(gps: Codebook, wh: Codebook, method=CorrelationMethod.FFT, workers=None) -> list[TableRow]:
    with logfire.span("comparison_rows"):
        rows = [
            table_row(correlation.metrics(gps, method=method, workers=workers), "GPS"),
            table_row(correlation.metrics(wh, method=method, workers=workers), "WH"),
        ]
        block = correlation.cross_metrics(gps, wh, method=method, workers=workers, name="GPS/WH")
        rows.append(
            TableRow(
                p="GPS/WH",
                pcc_avg=block.pcc.avg,
                pcc_min=block.pcc.min,
                pcc_max=block.pcc.max,
                cdf_avg=block.pair_cdf.avg,
                cdf_min=block.pair_cdf.min,
                cdf_max=block.pair_cdf.max,
            )
        )
        rows.append(table_row(correlation.metrics(gps.merge(wh, name="GPS+WH"), method=method, workers=workers), "GPS+WH"))
        return rows


def _matches_reference(row: TableRow) -> bool:
    reference = references.reference_row(row.p)
    deltas = references.row_deltas(row, reference)
    return all(abs(v) <= COMPARISON_TOLERANCE for k, v in deltas.items() if k in ("guc_ratio", "adjusted_df"))


def compare_gps(
    prns=None, fallback: bool = True, method=CorrelationMethod.FFT, workers: int | None = None
) -> tuple[list[TableRow], tuple[int, ...]]:
    """GPS, WH, GPS/WH and GPS+WH rows, plus the PRN set used

    Without an explicit PRN set the standard PRN 1-36 is tried first and PRN 1-37 minus 34
    afterwards if the GPS row misses the published values.
    """
    with logfire.span("compare_gps"):
        chosen = tuple(baseline.DEFAULT_PRNS if prns is None else prns)
        wh = baseline.wh_comparison_codebook()
        rows = comparison_rows(baseline.gps_ca_codebook(chosen), wh, method, workers)
        if prns is None and fallback and not _matches_reference(rows[0]):
            logfire.warn("GPS row differs from published values; trying fallback PRN set", prns=baseline.FALLBACK_PRNS)
            chosen = baseline.FALLBACK_PRNS
            rows = comparison_rows(baseline.gps_ca_codebook(chosen), wh, method, workers)
        return rows, chosen
