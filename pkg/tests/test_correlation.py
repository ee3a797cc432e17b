from fractions import Fraction
import numpy as np
import pytest
from cyclocode.core.errors import PrecisionLossError, ValidationError
from cyclocode.models.domain import AperiodicSeq, Codebook, CyclotomicPattern, UniformRotation
from cyclocode.models.schemas import CorrelationMethod, OracleStatus
from cyclocode.services import correlation
from cyclocode.services.numtheory import cyclotomic_numbers, field_context
from cyclocode.services.plans import walsh_plan
from cyclocode.services.sequences import derive_periodic, instantiate, quarter_rotation


def _book(*windows, name="book"):
    return Codebook(sequences=tuple(AperiodicSeq(np.asarray(w)) for w in windows), name=name)


def test_aperiodic_conventions():
    spectrum = correlation.acorr_direct([1, 1, -1], [1, -1, -1])
    assert spectrum.shifts.tolist() == [-2, -1, 0, 1, 2]
    # AC(s) = sum_j f[j + s] g[j]
    assert spectrum.at(0) == 1 * 1 + 1 * -1 + -1 * -1
    assert spectrum.at(2) == -1 * 1
    assert spectrum.at(-2) == 1 * -1
    assert spectrum.at(5) == 0


def test_complex_direct_matches_definition(rng):
    f = rng.normal(size=6) + 1j * rng.normal(size=6)
    g = rng.normal(size=6) + 1j * rng.normal(size=6)
    spectrum = correlation.acorr_direct(f, g)
    for s in range(-5, 6):
        expected = sum(f[j + s] * np.conj(g[j]) for j in range(6) if 0 <= j + s < 6)
        assert np.isclose(spectrum.at(s), expected)


def test_fft_equals_direct_on_binary(random_binary):
    for length in (1, 2, 17, 100, 257, 1000):
        f, g = random_binary(length), random_binary(length)
        direct = correlation.acorr_direct(f, g)
        fast = correlation.acorr_fft(f, g)
        chirp = correlation.acorr_fft(f, g, chirp=True)
        assert direct.is_exact and fast.is_exact and chirp.is_exact
        assert np.array_equal(direct.values, fast.values)
        assert np.array_equal(direct.values, chirp.values)
        assert fast.max_deviation < 1e-5


def test_fft_complex_inputs(rng):
    f = rng.normal(size=40) + 1j * rng.normal(size=40)
    g = rng.normal(size=40) + 1j * rng.normal(size=40)
    fast = correlation.acorr_fft(f, g)
    assert not fast.is_exact and fast.max_deviation is None
    assert np.allclose(fast.values, correlation.acorr_direct(f, g).values, atol=1e-9)


def test_precision_threshold(random_binary):
    f = random_binary(64)
    with pytest.raises(PrecisionLossError) as info:
        correlation.acorr_fft(f, f, threshold=-1.0)
    assert info.value.threshold == -1.0


def test_length_mismatch():
    with pytest.raises(ValidationError):
        correlation.acorr_direct([1, -1], [1])
    with pytest.raises(ValidationError):
        correlation.pcorr([1, -1], [1])


def test_folding_identity(rng, random_binary):
    for _ in range(100):
        length = int(rng.integers(1, 65))
        f, g = random_binary(length), random_binary(length)
        periodic = correlation.pcorr(f, g).values
        for r in range(length):
            aperiodic = correlation.acorr_direct(np.roll(f, -r), np.roll(g, -r)).values
            # PC(s) = AC(s) + AC(s - length) on the windows rotated by r
            folded = aperiodic[length - 1 :] + np.concatenate(([0], aperiodic[: length - 1]))
            assert np.array_equal(periodic, folded), (length, r)


def test_periodic_fft_path_matches_direct(random_binary, monkeypatch):
    f, g = random_binary(50), random_binary(50)
    direct = correlation.pcorr(f, g).values
    monkeypatch.setattr(correlation.settings, "DIRECT_ORACLE_MAX_LENGTH", 0)
    via_dft = correlation.pcorr(f, g)
    assert np.array_equal(direct, via_dft.values)
    assert via_dft.max_deviation < 1e-5


def test_legendre_periodic_correlation():
    f = derive_periodic(field_context(5), walsh_plan(1).patterns[0])
    table = cyclotomic_numbers(field_context(5), 2)
    d = walsh_plan(1).patterns[0]
    assert correlation.pcorr(f, f).values.tolist() == [4, -1, -1, -1, -1]
    assert correlation.pcorr_via_cyclotomy(table, d, d, 0) == -1


@pytest.mark.parametrize("p", [13, 17, 29, 41, 73])
def test_periodic_correlation_from_cyclotomic_numbers(rng, p):
    ctx = field_context(p)
    for n in (d for d in (2, 4) if (p - 1) % d == 0):
        table = cyclotomic_numbers(ctx, n)
        for _ in range(5):
            d = CyclotomicPattern.from_values(rng.normal(size=n) + 1j * rng.normal(size=n))
            e = CyclotomicPattern.from_values(rng.normal(size=n) + 1j * rng.normal(size=n))
            pc = correlation.pcorr(derive_periodic(ctx, d), derive_periodic(ctx, e)).values
            for u in range(n):
                s = pow(ctx.alpha, u, p)
                assert np.isclose(correlation.pcorr_via_cyclotomy(table, d, e, u), pc[s])


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("p", [17, 41, 73, 97, 113, 193, 241, 257, 337, 433])
def test_hadamard_periodic_sums(k, p):
    n = 2**k
    if (p - 1) % n:
        pytest.skip(f"{n} does not divide {p - 1}")
    book = instantiate(walsh_plan(k), p, UniformRotation(0), unimodularize_fill=None)
    total = sum(correlation.pcorr(f, f).values for f in book.periodic)
    assert total[0] == (n - 1) * (p - 1)
    assert all(v == 1 - n for v in total[1:])
    assert correlation.pcdf(book) == Fraction(p, p - 1)


def test_pcdf_equals_pairwise_sum(random_binary):
    for trial in range(100):
        size = 1 + trial % 4
        length = 2 + (7 * trial) % 63
        seqs = [random_binary(length) for _ in range(size)]
        expected = Fraction(0)
        for a in seqs:
            for b in seqs:
                pc = correlation.pcorr(a, b).values
                expected += Fraction(int(np.dot(pc, pc)), length * length)
        assert correlation.pcdf(seqs) == expected / (size * size)


def test_pcdf_floor_and_padf(random_binary):
    seqs = [random_binary(31) for _ in range(3)]
    assert correlation.pcdf(seqs) >= 1
    padf = correlation.padf(seqs)
    assert len(padf) == 3 and all(isinstance(x, Fraction) for x in padf)


def test_metrics_d3_17(d3_book_17):
    summary = correlation.metrics(d3_book_17)
    assert summary.size == 7 and len(summary.pairs) == 21
    assert summary.sdc == 17
    assert summary.guc_ratio == pytest.approx(2.910428, abs=5e-7)
    assert (summary.psl.min, summary.psl.max) == (4, 8)
    assert summary.psl.avg == pytest.approx(6.0, abs=5e-5)
    assert (summary.pcc.min, summary.pcc.max) == (4, 12)
    assert summary.pcc.avg == pytest.approx(7.1429, abs=5e-5)
    assert summary.adjusted_df == pytest.approx(0.419179, abs=5e-7)
    assert summary.adf.avg == pytest.approx(0.8463, abs=5e-5)
    assert summary.pair_cdf.min == pytest.approx(0.3772, abs=5e-5)
    assert summary.max_deviation < 1e-5


def test_metrics_methods_agree_exactly(d3):
    book = instantiate(d3, 97, quarter_rotation(), unimodularize_fill=1)
    fast = correlation.metrics(book, method=CorrelationMethod.FFT)
    slow = correlation.metrics(book, method=CorrelationMethod.DIRECT)
    assert fast.cdf_exact == slow.cdf_exact
    assert fast.adjusted_exact == 7 * (fast.cdf_exact - 1)
    assert fast.model_dump(exclude={"method", "max_deviation"}) == slow.model_dump(exclude={"method", "max_deviation"})


def test_metrics_parallel_equals_serial(d3, monkeypatch):
    book = instantiate(d3, 257, quarter_rotation(), unimodularize_fill=1)
    serial = correlation.metrics(book, workers=1)
    monkeypatch.setattr(correlation.settings, "PAIR_BLOCK_ELEMENTS", 1024)
    parallel = correlation.metrics(book, workers=4)
    assert serial.model_dump(exclude={"max_deviation"}) == parallel.model_dump(exclude={"max_deviation"})
    assert serial.cdf_exact == parallel.cdf_exact


def test_cdf_definition_on_small_book():
    book = _book([1, 1], [1, -1])
    summary = correlation.metrics(book)
    # AC_ff = [1, 2, 1], AC_gg = [-1, 2, -1], AC_fg = [-1, 0, 1]
    assert summary.cdf_exact == Fraction((2 * 2 + 1 + 1) + (4 + 1 + 1) + 2 * 2, 4 * 4)
    assert [s.psl for s in summary.sequences] == [1, 1]
    assert summary.pairs[0].pcc == 1
    assert summary.guc == 1 and summary.sdc == 2


def test_single_sequence_has_no_pair_columns():
    summary = correlation.metrics(_book([1, 1, 1, -1, 1]))
    assert summary.pairs == [] and summary.pcc is None and summary.pair_cdf is None
    # Barker 5
    assert summary.psl.max == 1


def test_mixed_lengths():
    summary = correlation.metrics(_book([1, 1, -1], [1, -1, 1, 1, 1]))
    assert [s.length for s in summary.sequences] == [3, 5]
    assert summary.sdc == 3


def test_metrics_rejects_empty_and_zero():
    with pytest.raises(ValidationError):
        correlation.metrics(Codebook(sequences=()))
    with pytest.raises(ValidationError, match="zero sequence"):
        correlation.metrics(_book([0, 0, 0], [1, -1, 1]))


def test_unimodularization_moves_peaks_by_at_most_two(d3):
    for p in (17, 41, 73, 97, 113):
        plain = correlation.metrics(instantiate(d3, p, quarter_rotation(), unimodularize_fill=None))
        filled = correlation.metrics(instantiate(d3, p, quarter_rotation(), unimodularize_fill=1))
        for a, b in zip(plain.sequences, filled.sequences):
            assert abs(a.psl - b.psl) <= 2
        for a, b in zip(plain.pairs, filled.pairs):
            assert abs(a.pcc - b.pcc) <= 2


def test_cross_metrics_block(d3_book_17):
    block = correlation.cross_metrics(d3_book_17, d3_book_17, name="self")
    assert block.pairs == 49
    summary = correlation.metrics(d3_book_17)
    assert block.pcc.max == max(summary.guc, 17)


def test_verify_oracle(d3_book_17):
    check = correlation.verify_oracle(d3_book_17)
    assert check.status is OracleStatus.AGREE and check.agrees
    assert check.pairs == 28 and check.max_deviation < 1e-5


def test_verify_oracle_covers_mixed_lengths(d3_book_17):
    book = d3_book_17.merge(_book([1, 1, 1, -1, 1], name="barker"))
    check = correlation.verify_oracle(book)
    assert check.status is OracleStatus.AGREE
    assert check.pairs == 8 * 9 // 2


def test_verify_oracle_reports_skip(d3_book_17, monkeypatch):
    monkeypatch.setattr(correlation.settings, "DIRECT_ORACLE_MAX_LENGTH", 8)
    check = correlation.verify_oracle(d3_book_17)
    assert check.status is OracleStatus.SKIPPED
    assert check.agrees is None and check.pairs == 0 and check.max_deviation is None


def test_hadamard_sum_from_cyclotomic_numbers(d3, ctx17):
    table = cyclotomic_numbers(ctx17, 8)
    book = instantiate(d3, 17, UniformRotation(0), unimodularize_fill=None)
    for u in range(8):
        via_table = sum(correlation.pcorr_via_cyclotomy(table, d, d, u) for d in d3.patterns)
        assert via_table == 1 - 8
        s = pow(ctx17.alpha, u, 17)
        assert via_table == sum(int(correlation.pcorr(f, f).values[s]) for f in book.periodic)


def test_metrics_with_pcdf(d3):
    book = instantiate(d3, 41, quarter_rotation(), unimodularize_fill=None)
    assert correlation.metrics(book, with_pcdf=True).pcdf == pytest.approx(41 / 40)
