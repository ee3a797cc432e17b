import pytest
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import FractionRotation, PerPatternRotation, UniformRotation
from cyclocode.models.schemas import CorrelationMethod
from cyclocode.services import experiments, kernels, references, theory
from cyclocode.services.plans import walsh_plan

PUBLISHED_ROUNDING = 5e-5 + 1e-9


def test_table1_preset_matches_reference_primes():
    primes = experiments.preset_primes("table1")
    assert primes == list(references.SMALL_PRIME_ROWS)
    assert len(primes) == 47 and primes[0] == 17 and primes[-1] <= 1249


def test_table3_preset_matches_reference_primes():
    primes = experiments.preset_primes("table3", max_k=17)
    assert primes == list(references.DOUBLING_PRIME_ROWS)[:14]
    assert primes[-1] == 131113


def test_unknown_preset():
    with pytest.raises(ValidationError, match="unknown preset"):
        experiments.preset_primes("table2")


def test_table_rows_skip_unusable_primes(d3):
    rows = experiments.table_rows(d3, [17, 19, 15, 41], workers=2)
    assert [row.p for row in rows] == [17, 41]
    assert rows[0].guc_ratio == pytest.approx(2.910428, abs=5e-7)
    assert rows[1].guc_ratio == pytest.approx(2.342606, abs=5e-7)
    assert rows[1].psl_avg == pytest.approx(10.8571, abs=5e-5)


def test_small_primes_against_references(d3):
    rows = experiments.table_rows(d3, [17, 41, 73, 89, 97])
    comparison = experiments.compare_with_references(rows)
    assert [c["p"] for c in comparison] == [17, 41, 73, 89, 97]
    assert all(c["max_abs_delta"] <= PUBLISHED_ROUNDING for c in comparison)


def test_p257_adjusted_df(d3):
    row = experiments.table_row_for_prime(d3, 257)
    assert row.adjusted_df == pytest.approx(0.130258, abs=5e-7)


def test_row_with_theory(d3):
    row = experiments.table_row_for_prime(d3, 17, with_theory=True)
    assert row.limit_adjusted_df == pytest.approx(1 / 6)
    assert row.guc_bound > row.guc_ratio

    uniform = experiments.table_row_for_prime(d3, 17, UniformRotation(0), with_theory=True)
    assert uniform.limit_adjusted_df == pytest.approx(2 / 3)

    per_pattern = experiments.table_row_for_prime(d3, 17, PerPatternRotation({i: 4 for i in range(7)}), with_theory=True)
    assert per_pattern.limit_adjusted_df == pytest.approx((8 - 1) * (theory.per_pattern_limit(d3, [4 / 17] * 7, 0) - 1))

    plain = experiments.table_row_for_prime(d3, 17)
    assert plain.guc_bound is None and plain.limit_adjusted_df is None


def test_table_rows_direct_method(d3):
    fast = experiments.table_rows(d3, [41])
    slow = experiments.table_rows(d3, [41], method=CorrelationMethod.DIRECT)
    assert fast[0].model_dump() == slow[0].model_dump()


def test_sweep_with_full_stride(d3):
    report = experiments.rotation_sweep(d3, 17, stride=17)
    assert [pt.r for pt in report.points] == [0]
    assert report.argmin == report.argmax == [0]
    assert report.points[0].overlay == pytest.approx(2 / 3)


def test_sweep_reports_tied_extremes(d3):
    report = experiments.rotation_sweep(d3, 41, stride=1)
    assert len(report.points) == 41
    assert report.minimum <= report.maximum
    values = {pt.r: pt.adjusted_df for pt in report.points}
    assert all(values[r] == report.minimum for r in report.argmin)
    assert report.max_overlay_gap >= 0


def test_sweep_rejects_bad_stride(d3):
    with pytest.raises(ValidationError):
        experiments.rotation_sweep(d3, 17, stride=0)


@pytest.mark.slow
def test_full_sweep_at_1009(d3):
    report = experiments.rotation_sweep(d3, references.SWEEP_PRIME)
    minimum, argmin = references.SWEEP_MINIMUM
    maximum, argmax = references.SWEEP_MAXIMUM
    assert report.minimum == pytest.approx(minimum, abs=5e-7)
    assert report.argmin == argmin
    assert report.maximum == pytest.approx(maximum, abs=5e-7)
    assert report.argmax == argmax


def test_plot_sweep(tmp_path, d3):
    report = experiments.rotation_sweep(d3, 17, stride=4)
    path = tmp_path / "sweep.png"
    experiments.plot_sweep(report, path)
    assert path.stat().st_size > 0


def test_sweep_overlay():
    assert experiments.sweep_overlay(0, 17) == pytest.approx(2 / 3)
    assert experiments.sweep_overlay(1009 // 4, 1009) == pytest.approx(1 / 6, abs=1e-4)


def test_decomposition_reports_cover_pairs(d3):
    reports = experiments.decomposition_reports(d3, 41, FractionRotation("1/8"))
    assert len(reports) == 28
    assert {(r.first, r.second) for r in reports} == {(i, j) for i in range(7) for j in range(i, 7)}
    assert all(r.r == 5 and r.r_prime == 5 for r in reports)
    assert all(r.satisfied for r in reports)


def test_decomposition_reports_single_pattern():
    plan = walsh_plan(1)
    reports = experiments.decomposition_reports(plan, 13)
    assert len(reports) == 1 and reports[0].first == reports[0].second == 0


@pytest.mark.slow
def test_small_prime_table_matches_references(d3):
    rows = experiments.table_rows(d3, experiments.preset_primes("table1"))
    comparison = experiments.compare_with_references(rows)
    assert len(comparison) == 47
    assert all(c["max_abs_delta"] <= PUBLISHED_ROUNDING for c in comparison)


def test_doubling_rows_against_references(d3):
    rows = experiments.table_rows(d3, experiments.preset_primes("table3", max_k=12))
    comparison = experiments.compare_with_references(rows)
    assert len(comparison) == 9
    assert all(c["max_abs_delta"] <= PUBLISHED_ROUNDING for c in comparison)


@pytest.mark.slow
def test_large_doubling_rows(d3):
    rows = experiments.table_rows(d3, [65537, 131113])
    assert rows[0].adjusted_df == pytest.approx(0.164376, abs=5e-7)
    assert rows[1].adf_min == pytest.approx(0.1667, abs=5e-5)
    comparison = experiments.compare_with_references(rows)
    assert all(c["max_abs_delta"] <= PUBLISHED_ROUNDING for c in comparison)


def test_adjusted_df_envelope_tightens_toward_one_sixth(d3):
    rows = experiments.table_rows(d3, experiments.preset_primes("table3", max_k=12))
    deviation = {row.p: abs(row.adjusted_df - 1 / 6) for row in rows}
    early = [deviation[p] for p in (17, 41, 73, 137)]
    later = [deviation[p] for p in (257, 521, 1033, 2081, 4129)]
    assert max(later) < max(early)
    large = list(references.DOUBLING_PRIME_ROWS.values())[11:]
    assert large[0].p == 32801
    assert all(abs(row.adjusted_df - 1 / 6) < 3e-3 for row in large)


@pytest.mark.slow
def test_adjusted_df_near_one_sixth_above_2_20(d3):
    row = experiments.table_row_for_prime(d3, 1048601)
    assert abs(row.adjusted_df - 1 / 6) < 3e-3
    assert row.adjusted_df == pytest.approx(references.DOUBLING_PRIME_ROWS[1048601].adjusted_df, abs=5e-7)


def test_direct_kernel_runs_serially_under_worker_threads(d3):
    assert not kernels.direct_correlation.targetoptions.get("parallel")
    primes = [17, 41, 73, 89]
    threaded = experiments.table_rows(d3, primes, method=CorrelationMethod.DIRECT, workers=4)
    assert [row.model_dump() for row in threaded] == [row.model_dump() for row in experiments.table_rows(d3, primes)]
