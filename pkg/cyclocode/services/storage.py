"""Reading and writing plans, codebooks, spectra and reports"""

import csv
import json
from importlib import resources
from pathlib import Path
import numpy as np
import logfire
from pydantic import BaseModel, ValidationError as SchemaError
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import (
    AperiodicSeq,
    Codebook,
    CorrelationSpectrum,
    CyclotomicPattern,
    CyclotomicPlan,
    PerPatternRotation,
    from_exponents,
)
from cyclocode.models.schemas import (
    CodebookDocument,
    MetricsSummary,
    PatternKind,
    PlanDocument,
    SequenceRecord,
    TableRow,
)

ANALYSIS_SCHEMA = "schemas/analysis_report.schema.json"
TABLE_COLUMNS = list(TableRow.model_fields)
# Six decimals for ratios and demerit factors, four for averages
SIX_PLACES = {"guc_ratio", "adjusted_df", "guc_bound", "limit_adjusted_df"}
TEXT_SYMBOLS = {1: "+", -1: "-", 0: "0"}


def fmt(value, decimals: int = 4) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{value:.{decimals}f}"


def format_cell(name: str, value) -> str:
    if name == "p" or value is None or isinstance(value, str):
        return "" if value is None else str(value)
    if name.endswith(("_min", "_max")) and name.startswith(("psl", "pcc")) and float(value).is_integer():
        return str(int(value))
    return fmt(float(value), 6 if name in SIX_PLACES else 4)


def _complex_pair(x) -> tuple[float, float]:
    z = complex(x)
    return (z.real, z.imag)


def _read_json(path: Path, model: type[BaseModel]):
    try:
        return model.model_validate_json(Path(path).read_text())
    except SchemaError as e:
        raise ValidationError(f"{path}: {e.error_count()} schema error(s): {e.errors()[0]['msg']}") from e


# Plans

def plan_document(plan: CyclotomicPlan) -> PlanDocument:
    kinds = {d.kind for d in plan.patterns}
    if kinds <= {PatternKind.BINARY}:
        return PlanDocument(n=plan.n, m=2, patterns=[list(d.entries) for d in plan.patterns])
    if kinds == {PatternKind.M_ARY} and len({d.m for d in plan.patterns}) == 1:
        return PlanDocument(n=plan.n, m=plan.patterns[0].m, patterns=[list(d.entries) for d in plan.patterns])
    return PlanDocument(
        n=plan.n, patterns=[[_complex_pair(x) for x in d.values] for d in plan.patterns]
    )


def plan_from_document(doc: PlanDocument, name: str = "plan") -> CyclotomicPlan:
    patterns = []
    for entries in doc.patterns:
        if entries and isinstance(entries[0], (tuple, list)):
            patterns.append(CyclotomicPattern.from_values(complex(re, im) for re, im in entries))
        elif doc.m in (None, 2) and all(x in (1, -1) for x in entries):
            patterns.append(CyclotomicPattern.binary(entries))
        elif doc.m is not None:
            patterns.append(CyclotomicPattern.m_ary(doc.m, entries))
        else:
            raise ValidationError(f"plan {name}: integer entries other than +1/-1 need m")
    return CyclotomicPlan(n=doc.n, patterns=tuple(patterns), name=name)


def save_plan(plan: CyclotomicPlan, path: Path):
    Path(path).write_text(plan_document(plan).model_dump_json(indent=2))
    logfire.info("Plan saved", plan=plan.name, path=str(path))


def load_plan(path: Path) -> CyclotomicPlan:
    with logfire.span("load_plan", path=str(path)):
        doc = _read_json(path, PlanDocument)
        return plan_from_document(doc, name=Path(path).stem)


# Codebooks

def _common_order(book: Codebook) -> int | None:
    orders = {f.m if f.exponents is not None else None for f in book.sequences}
    return orders.pop() if len(orders) == 1 else None


def codebook_document(book: Codebook) -> CodebookDocument:
    m = _common_order(book)
    records = []
    for f, label in zip(book.sequences, book.labels()):
        if m is not None:
            entries = [int(k) for k in f.exponents]
        elif f.is_integer:
            entries = [int(x) for x in f.window]
        else:
            entries = [_complex_pair(x) for x in f.window]
        records.append(SequenceRecord(pattern_index=f.pattern_index, label=label, r=f.r, entries=entries))
    fill = book.fill if isinstance(book.fill, int) else _complex_pair(book.fill)
    return CodebookDocument(
        name=book.name,
        p=book.p,
        n=book.n,
        m=m,
        unimodularized=book.unimodularized,
        fill=fill,
        rotation=book.rotation,
        collisions=list(book.collisions),
        sequences=records,
    )


def codebook_from_document(doc: CodebookDocument) -> Codebook:
    sequences = []
    for record in doc.sequences:
        exponents = None
        if doc.m is not None:
            if record.entries and isinstance(record.entries[0], (tuple, list)):
                raise ValidationError(f"codebook {doc.name} gives m = {doc.m}; entries must be exponents")
            exponents = np.array(record.entries, dtype=np.int64)
            window = from_exponents(exponents, doc.m)
        elif record.entries and isinstance(record.entries[0], (tuple, list)):
            window = np.array([complex(re, im) for re, im in record.entries], dtype=np.complex128)
        else:
            window = np.array(record.entries, dtype=np.int8 if all(abs(x) <= 1 for x in record.entries) else np.int64)
        sequences.append(
            AperiodicSeq(
                window,
                r=record.r or 0,
                pattern_index=record.pattern_index,
                unimodularized=doc.unimodularized,
                label=record.label,
                exponents=exponents,
                m=doc.m,
            )
        )
    fill = complex(*doc.fill) if isinstance(doc.fill, tuple) else doc.fill
    return Codebook(
        sequences=tuple(sequences),
        name=doc.name,
        p=doc.p,
        n=doc.n,
        rotation=doc.rotation,
        unimodularized=doc.unimodularized,
        fill=fill,
        collisions=tuple(tuple(c) for c in doc.collisions),
    )


def codebook_text(book: Codebook) -> str:
    """Provenance comment lines, then one line of '+'/'-' per sequence ('0' marks a forced zero)"""
    if not book.is_integer:
        raise ValidationError(f"codebook {book.name} is not binary; use JSON")
    lines = [
        f"# name={book.name} p={book.p} n={book.n} rotation={book.rotation} "
        f"unimodularized={book.unimodularized} fill={book.fill}"
    ]
    for f in book.sequences:
        try:
            lines.append("".join(TEXT_SYMBOLS[int(x)] for x in f.window))
        except KeyError as e:
            raise ValidationError(f"entry {e.args[0]} has no text symbol") from e
    return "\n".join(lines) + "\n"


def codebook_from_text(text: str, name: str = "codebook") -> Codebook:
    values = {symbol: value for value, symbol in TEXT_SYMBOLS.items()}
    meta: dict[str, str] = {}
    sequences = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(item.split("=", 1) for item in line[1:].split() if "=" in item)
            continue
        try:
            window = np.array([values[c] for c in line], dtype=np.int8)
        except KeyError as e:
            raise ValidationError(f"unexpected symbol {e.args[0]!r} in codebook text") from e
        sequences.append(AperiodicSeq(window, pattern_index=len(sequences)))

    def number(key):
        value = meta.get(key)
        return int(value) if value not in (None, "None") else None

    return Codebook(
        sequences=tuple(sequences),
        name=meta.get("name", name),
        p=number("p"),
        n=number("n"),
        rotation=None if meta.get("rotation") in (None, "None") else meta["rotation"],
        unimodularized=meta.get("unimodularized") == "True",
        fill=1 if number("fill") is None else number("fill"),
    )


def save_codebook(book: Codebook, path: Path):
    path = Path(path)
    with logfire.span("save_codebook", codebook=book.name, path=str(path)):
        if path.suffix == ".txt":
            path.write_text(codebook_text(book))
        else:
            path.write_text(codebook_document(book).model_dump_json(indent=2))
        logfire.info("Codebook saved", codebook=book.name, size=len(book), path=str(path))


def load_codebook(path: Path) -> Codebook:
    path = Path(path)
    with logfire.span("load_codebook", path=str(path)):
        if not path.exists():
            raise ValidationError(f"codebook file {path} does not exist")
        if path.suffix == ".txt":
            book = codebook_from_text(path.read_text(), name=path.stem)
        else:
            book = codebook_from_document(_read_json(path, CodebookDocument))
        logfire.info("Codebook loaded", codebook=book.name, size=len(book))
        return book


def load_rotation_map(path: Path) -> PerPatternRotation:
    """JSON object {pattern index: advancement} or a list of advancements in pattern order"""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read rotation map {path}: {e}") from e
    if isinstance(raw, list):
        raw = dict(enumerate(raw))
    if not isinstance(raw, dict):
        raise ValidationError(f"rotation map {path} must be an object or a list")
    try:
        return PerPatternRotation({int(k): int(v) for k, v in raw.items()})
    except (TypeError, ValueError) as e:
        raise ValidationError(f"rotation map {path} has a non-integer entry") from e


# Spectra and reports

def spectrum_rows(spectrum: CorrelationSpectrum) -> tuple[list[str], list[dict]]:
    exact = spectrum.is_exact
    columns = ["shift", "re"] if exact else ["shift", "re", "im"]
    rows = []
    for s, v in zip(spectrum.shifts, spectrum.values):
        if exact:
            rows.append({"shift": int(s), "re": int(v)})
        else:
            z = complex(v)
            rows.append({"shift": int(s), "re": repr(z.real), "im": repr(z.imag)})
    return columns, rows


def write_csv(path: Path | None, columns: list[str], rows: list[dict], stream=None):
    """Rows to path, or to stream when path is None"""
    if path is None:
        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def table_row(summary: MetricsSummary, p: int | str) -> TableRow:
    """Published-table view of a summary: pairwise columns over distinct unordered pairs"""
    return TableRow(
        p=p,
        guc_ratio=summary.guc_ratio,
        psl_avg=summary.psl.avg,
        psl_min=summary.psl.min,
        psl_max=summary.psl.max,
        pcc_avg=summary.pcc.avg if summary.pcc else None,
        pcc_min=summary.pcc.min if summary.pcc else None,
        pcc_max=summary.pcc.max if summary.pcc else None,
        adjusted_df=summary.adjusted_df,
        adf_avg=summary.adf.avg,
        adf_min=summary.adf.min,
        adf_max=summary.adf.max,
        cdf_avg=summary.pair_cdf.avg if summary.pair_cdf else None,
        cdf_min=summary.pair_cdf.min if summary.pair_cdf else None,
        cdf_max=summary.pair_cdf.max if summary.pair_cdf else None,
    )


def table_rows_csv(rows: list[TableRow], columns: list[str] | None = None) -> tuple[list[str], list[dict]]:
    columns = columns or TABLE_COLUMNS
    return columns, [{c: format_cell(c, getattr(row, c)) for c in columns} for row in rows]


def model_rows(models: list[BaseModel]) -> tuple[list[str], list[dict]]:
    """Flat CSV view of pydantic reports; list fields are joined with ';'"""
    if not models:
        return [], []
    columns = list(type(models[0]).model_fields)
    rows = []
    for model in models:
        row = {}
        for c in columns:
            value = getattr(model, c)
            if isinstance(value, list):
                value = ";".join(str(x) for x in value)
            elif isinstance(value, float):
                value = fmt(value, 6)
            row[c] = value
        rows.append(row)
    return columns, rows


def dump_json(models, path: Path | None = None, stream=None):
    if isinstance(models, BaseModel):
        text = models.model_dump_json(indent=2)
    else:
        text = "[\n" + ",\n".join(m.model_dump_json(indent=2) for m in models) + "\n]"
    if path is None:
        stream.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")


def analysis_schema() -> dict:
    """JSON schema shipped for `analyze --format json` output"""
    return json.loads(resources.files("cyclocode").joinpath(ANALYSIS_SCHEMA).read_text())
