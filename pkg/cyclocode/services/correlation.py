from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import math
import numpy as np
import logfire
from cyclocode.core.config import settings
from cyclocode.core.errors import PrecisionLossError, ValidationError
from cyclocode.models.domain import (
    AperiodicSeq,
    Codebook,
    CorrelationSpectrum,
    CyclotomicNumberTable,
    CyclotomicPattern,
    PeriodicSeq,
)
from cyclocode.models.schemas import (
    Aggregate,
    BlockMetrics,
    CorrelationMethod,
    MetricsSummary,
    OracleCheck,
    OracleStatus,
    PairMetrics,
    SequenceMetrics,
    SpectrumKind,
)
from cyclocode.services import kernels, transforms


def _entries(x) -> np.ndarray:
    if isinstance(x, AperiodicSeq):
        return x.window
    if isinstance(x, PeriodicSeq):
        return x.entries
    return np.asarray(x)


def _is_integer(*arrays: np.ndarray) -> bool:
    return all(a.dtype.kind in "iub" for a in arrays)


def _threshold(threshold: float | None) -> float:
    return settings.FFT_DEVIATION_THRESHOLD if threshold is None else threshold


def _round_to_lattice(values: np.ndarray, threshold: float) -> tuple[np.ndarray, float]:
    rounded = np.rint(values.real)
    deviation = float(np.max(np.abs(values - rounded))) if values.size else 0.0
    if deviation > threshold:
        logfire.error("FFT precision loss", deviation=deviation, threshold=threshold)
        raise PrecisionLossError(deviation, threshold)
    return rounded.astype(np.int64), deviation


def _direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full aperiodic correlation, index s + len(b) - 1 holds shift s"""
    if _is_integer(a, b):
        return kernels.direct_correlation(a.astype(np.int64), b.astype(np.int64))
    return np.correlate(a.astype(np.complex128), b.astype(np.complex128), mode="full")


# Aperiodic spectra

def _aperiodic_shifts(la: int, lb: int) -> np.ndarray:
    return np.arange(-(lb - 1), la)


def acorr_direct(f, g) -> CorrelationSpectrum:
    """AC_{f,g}(s) = sum_j f_{j+s} conj(g_j) by direct summation"""
    a, b = _entries(f), _entries(g)
    if len(a) != len(b):
        raise ValidationError(f"length mismatch: {len(a)} vs {len(b)}")
    return CorrelationSpectrum(SpectrumKind.APERIODIC, _aperiodic_shifts(len(a), len(b)), _direct(a, b))


def _fft_correlation(a: np.ndarray, b: np.ndarray, threshold: float | None, chirp: bool = False):
    """Full aperiodic correlation through a zero-padded transform; (values, rounding deviation)"""
    la, lb = len(a), len(b)
    total = la + lb - 1
    if chirp:
        size = total
        spectrum = transforms.bluestein_dft(np.pad(a.astype(np.complex128), (0, size - la)))
        spectrum *= np.conj(transforms.bluestein_dft(np.pad(b.astype(np.complex128), (0, size - lb))))
        circular = transforms.bluestein_dft(spectrum, inverse=True) / size
    else:
        size = transforms.next_pow2(total)
        padded = np.zeros((2, size), dtype=np.complex128)
        padded[0, :la] = a
        padded[1, :lb] = b
        spectra = transforms.fft_pow2(padded)
        circular = transforms.ifft_pow2(spectra[0] * np.conj(spectra[1]))
    values = np.concatenate((circular[size - (lb - 1):], circular[:la]))
    if _is_integer(a, b):
        return _round_to_lattice(values, _threshold(threshold))
    return values, None


def acorr_fft(f, g, threshold: float | None = None, chirp: bool = False) -> CorrelationSpectrum:
    """AC_{f,g} through a zero-padded transform; integer inputs are rounded back exactly

    chirp=True transforms at the exact length 2l - 1 instead of the next power of two.
    """
    a, b = _entries(f), _entries(g)
    if len(a) != len(b):
        raise ValidationError(f"length mismatch: {len(a)} vs {len(b)}")
    values, deviation = _fft_correlation(a, b, threshold, chirp)
    return CorrelationSpectrum(SpectrumKind.APERIODIC, _aperiodic_shifts(len(a), len(b)), values, deviation)


# Periodic spectra

def pcorr(f, g, threshold: float | None = None) -> CorrelationSpectrum:
    """PC_{f,g}(s) = sum over j mod l of f_{j+s} conj(g_j), s = 0..l-1"""
    a, b = _entries(f), _entries(g)
    length = len(a)
    if len(b) != length:
        raise ValidationError(f"length mismatch: {length} vs {len(b)}")
    shifts = np.arange(length)
    if _is_integer(a, b) and length <= settings.DIRECT_ORACLE_MAX_LENGTH:
        full = _direct(a, b)
        values = full[length - 1:].copy()
        values[1:] += full[: length - 1]
        return CorrelationSpectrum(SpectrumKind.PERIODIC, shifts, values)
    fa = transforms.dft(a.astype(np.complex128))
    fb = transforms.dft(b.astype(np.complex128))
    values = transforms.dft(fa * np.conj(fb), inverse=True) / length
    deviation = None
    if _is_integer(a, b):
        values, deviation = _round_to_lattice(values, _threshold(threshold))
    return CorrelationSpectrum(SpectrumKind.PERIODIC, shifts, values, deviation)


def pcorr_via_cyclotomy(
    table: CyclotomicNumberTable, d: CyclotomicPattern, d_prime: CyclotomicPattern, u: int
) -> complex | int:
    """PC_{f,g}(alpha^u) = sum_{j,k} (k, j) d_{j+u} conj(d'_{k+u}) for the derived f, g"""
    if d.n != table.n or d_prime.n != table.n:
        raise ValidationError(f"pattern indices {d.n}, {d_prime.n} do not match table index {table.n}")
    dj = np.roll(d.values, -u)
    dk = np.conj(np.roll(d_prime.values, -u))
    value = dk @ table.entries @ dj
    if d.is_binary and d_prime.is_binary:
        return int(np.real(value))
    return complex(value)


def _periodic_entries(book) -> list[np.ndarray]:
    seqs = book.periodic if isinstance(book, Codebook) else book
    arrays = [_entries(f) for f in seqs]
    if not arrays:
        raise ValidationError("empty periodic codebook")
    if len({len(a) for a in arrays}) != 1:
        raise ValidationError("periodic codebook lengths differ")
    return arrays


def pcdf(book, threshold: float | None = None) -> Fraction | float:
    """Periodic crosscorrelation demerit factor of a codebook, ordered pairs including f = g"""
    arrays = _periodic_entries(book)
    size = len(arrays)
    exact = _is_integer(*arrays)
    with logfire.span("pcdf", size=size, length=len(arrays[0])):
        autos = [pcorr(a, a, threshold).values for a in arrays]
        energies = [a[0] for a in autos]
        if any(e == 0 for e in energies):
            raise ValidationError("zero sequence in codebook")

        if all(e == energies[0] for e in energies):
            total = np.sum(autos, axis=0)
            if exact:
                tail = sum(int(x) * int(x) for x in total[1:])
                c = int(energies[0])
                return 1 + Fraction(tail, size * size * c * c)
            c = float(np.real(energies[0]))
            return 1 + float(np.sum(np.abs(total[1:]) ** 2)) / (size * size * c * c)

        acc = Fraction(0) if exact else 0.0
        for i in range(size):
            for j in range(size):
                pc = pcorr(arrays[i], arrays[j], threshold).values
                if exact:
                    acc += Fraction(int(np.dot(pc, pc)), int(energies[i]) * int(energies[j]))
                else:
                    acc += float(np.sum(np.abs(pc) ** 2)) / float(np.real(energies[i] * energies[j]))
        return acc / (size * size)


def padf(book, threshold: float | None = None) -> list[Fraction | float]:
    """Periodic autocorrelation demerit factor of each sequence"""
    out = []
    for a in _periodic_entries(book):
        pc = pcorr(a, a, threshold).values
        if pc[0] == 0:
            raise ValidationError("zero sequence in codebook")
        if _is_integer(a):
            out.append(Fraction(int(np.dot(pc[1:], pc[1:])), int(pc[0]) ** 2))
        else:
            out.append(float(np.sum(np.abs(pc[1:]) ** 2)) / float(np.real(pc[0])) ** 2)
    return out


# Codebook metrics

def _pair_stats_direct(windows, pairs, exact):
    stats = []
    for i, j in pairs:
        c = _direct(windows[i], windows[j])
        if i == j:
            c = np.delete(c, len(windows[j]) - 1)
        stats.append(_reduce(c, exact))
    return stats, None


def _reduce(c: np.ndarray, exact: bool) -> tuple[float, int | float]:
    if c.size == 0:
        return 0.0, 0
    if exact:
        return float(np.max(np.abs(c))), int(np.dot(c, c))
    mags = np.abs(c)
    return float(np.max(mags)), float(np.sum(mags**2))


def _pair_stats_fft(windows, pairs, exact, threshold, workers):
    longest = max(len(w) for w in windows)
    size = transforms.next_pow2(2 * longest - 1)
    padded = np.zeros((len(windows), size), dtype=np.complex128)
    for i, w in enumerate(windows):
        padded[i, : len(w)] = w
    spectra = transforms.fft_pow2(padded)

    per_block = max(1, settings.PAIR_BLOCK_ELEMENTS // size)
    blocks = [pairs[k : k + per_block] for k in range(0, len(pairs), per_block)]

    def run(block):
        first = np.array([i for i, _ in block])
        second = np.array([j for _, j in block])
        circular = transforms.ifft_pow2(spectra[first] * np.conj(spectra[second]))
        deviation = None
        if exact:
            circular, deviation = _round_to_lattice(circular, threshold)
        out = []
        for row, (i, j) in zip(circular, block):
            # circular index 0 is shift 0
            out.append(_reduce(row[1:] if i == j else row, exact))
        return out, deviation

    with ThreadPoolExecutor(max_workers=workers or settings.THREADS) as pool:
        results = list(pool.map(run, blocks))

    stats = [s for block_stats, _ in results for s in block_stats]
    deviations = [d for _, d in results if d is not None]
    return stats, (max(deviations) if deviations else None)


def _pair_statistics(windows, pairs, method, threshold, workers):
    exact = _is_integer(*windows)
    if method == CorrelationMethod.DIRECT:
        return _pair_stats_direct(windows, pairs, exact)
    return _pair_stats_fft(windows, pairs, exact, _threshold(threshold), workers)


def _energies(windows) -> list:
    out = []
    for w in windows:
        if _is_integer(w):
            e = int(np.dot(w.astype(np.int64), w.astype(np.int64)))
        else:
            e = float(np.sum(np.abs(w) ** 2))
        if e == 0:
            raise ValidationError("zero sequence in codebook: normalization undefined")
        out.append(e)
    return out


def metrics(
    codebook: Codebook,
    method: CorrelationMethod = CorrelationMethod.FFT,
    threshold: float | None = None,
    workers: int | None = None,
    with_pcdf: bool = False,
) -> MetricsSummary:
    """Peak and mean-square quality measures of a codebook"""
    method = CorrelationMethod(method)
    with logfire.span("metrics", codebook=codebook.name, size=len(codebook), method=method.value):
        if len(codebook) == 0:
            raise ValidationError("empty codebook")
        windows = [np.asarray(f.window) for f in codebook.sequences]
        exact = _is_integer(*windows)
        energies = _energies(windows)
        size = len(windows)

        pairs = [(i, j) for i in range(size) for j in range(i, size)]
        stats, deviation = _pair_statistics(windows, pairs, method, threshold, workers)
        by_pair = dict(zip(pairs, stats))

        labels = codebook.labels()
        sequences = []
        pair_rows = []
        cdf_exact = Fraction(0) if exact else None
        cdf_float = 0.0
        for i in range(size):
            peak, tail = by_pair[(i, i)]
            e = energies[i]
            sequences.append(
                SequenceMetrics(index=i, label=labels[i], length=len(windows[i]), energy=e, psl=peak, adf=tail / (e * e))
            )
            if exact:
                cdf_exact += Fraction(tail + e * e, e * e)
            cdf_float += (tail + e * e) / (e * e)
        for i, j in pairs:
            if i == j:
                continue
            peak, total = by_pair[(i, j)]
            norm = energies[i] * energies[j]
            pair_rows.append(PairMetrics(first=i, second=j, pcc=peak, cdf=total / norm))
            if exact:
                cdf_exact += 2 * Fraction(total, norm)
            cdf_float += 2 * total / norm

        if exact:
            cdf_exact /= size * size
            cdf = float(cdf_exact)
        else:
            cdf = cdf_float / (size * size)

        guc = max([s.psl for s in sequences] + [q.pcc for q in pair_rows])
        sdc = min(energies)
        summary = MetricsSummary(
            name=codebook.name,
            size=size,
            method=method,
            sequences=sequences,
            pairs=pair_rows,
            guc=guc,
            sdc=sdc,
            guc_ratio=guc / math.sqrt(sdc),
            cdf=cdf,
            adjusted_df=float(size * (cdf_exact - 1)) if exact else size * (cdf - 1),
            # periodic correlation is rotation invariant; loaded books carry windows only
            pcdf=float(pcdf(codebook.periodic or codebook.sequences, threshold)) if with_pcdf else None,
            psl=Aggregate.of([s.psl for s in sequences]),
            adf=Aggregate.of([s.adf for s in sequences]),
            pcc=Aggregate.of([q.pcc for q in pair_rows]),
            pair_cdf=Aggregate.of([q.cdf for q in pair_rows]),
            max_deviation=deviation,
        )
        summary._cdf_exact = cdf_exact
        logfire.info(
            "Metrics computed",
            codebook=codebook.name,
            guc_ratio=summary.guc_ratio,
            adjusted_df=summary.adjusted_df,
            max_deviation=deviation,
        )
        return summary


def cross_metrics(
    book_a: Codebook,
    book_b: Codebook,
    method: CorrelationMethod = CorrelationMethod.FFT,
    threshold: float | None = None,
    workers: int | None = None,
    name: str | None = None,
) -> BlockMetrics:
    """PCC and CDF aggregates over the pairs (f, g) with f from book_a and g from book_b"""
    method = CorrelationMethod(method)
    name = name or f"{book_a.name}/{book_b.name}"
    with logfire.span("cross_metrics", block=name):
        windows = [np.asarray(f.window) for f in book_a.sequences + book_b.sequences]
        energies = _energies(windows)
        offset = len(book_a)
        pairs = [(i, offset + j) for i in range(len(book_a)) for j in range(len(book_b))]
        stats, _ = _pair_statistics(windows, pairs, method, threshold, workers)
        pccs = [peak for peak, _ in stats]
        cdfs = [total / (energies[i] * energies[j]) for (i, j), (_, total) in zip(pairs, stats)]
        return BlockMetrics(name=name, pairs=len(pairs), pcc=Aggregate.of(pccs), pair_cdf=Aggregate.of(cdfs))


def verify_oracle(codebook: Codebook, threshold: float | None = None) -> OracleCheck:
    """Compare rounded FFT spectra with direct sums for every pair, mixed lengths included"""
    with logfire.span("verify_oracle", codebook=codebook.name):
        windows = [np.asarray(f.window) for f in codebook.sequences]
        longest = max((len(w) for w in windows), default=0)
        if longest > settings.DIRECT_ORACLE_MAX_LENGTH:
            logfire.info("Direct oracle skipped", length=longest, cap=settings.DIRECT_ORACLE_MAX_LENGTH)
            return OracleCheck(status=OracleStatus.SKIPPED)
        agree, worst, pairs = True, 0.0, 0
        for i in range(len(windows)):
            for j in range(i, len(windows)):
                fast, deviation = _fft_correlation(windows[i], windows[j], threshold)
                slow = _direct(windows[i], windows[j])
                if _is_integer(windows[i], windows[j]):
                    agree = agree and np.array_equal(fast, slow)
                else:
                    agree = agree and np.allclose(fast, slow, atol=_threshold(threshold))
                worst = max(worst, deviation or 0.0)
                pairs += 1
        status = OracleStatus.AGREE if agree else OracleStatus.DISAGREE
        return OracleCheck(status=status, pairs=pairs, max_deviation=worst)
