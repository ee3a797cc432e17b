import numpy as np
import pytest
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import CharacterPattern, CyclotomicPattern, CyclotomicPlan
from cyclocode.services.plans import (
    character_pattern,
    cyclotomic_pattern,
    dft,
    hadamard_column_sums,
    idft,
    plan_subset,
    transform_norms,
    validate_plan,
    walsh_hadamard_matrix,
    walsh_plan,
)


def test_sylvester_matrix():
    h = walsh_hadamard_matrix(3)
    assert h.shape == (8, 8)
    assert np.array_equal(h @ h.T, 8 * np.eye(8, dtype=np.int64))
    assert h[0].tolist() == [1] * 8
    assert h[1].tolist() == [1, -1] * 4


def test_walsh_plan_rows_follow_matrix():
    h = walsh_hadamard_matrix(4)
    plan = walsh_plan(4)
    assert len(plan) == 15
    assert plan.row_labels == tuple(range(1, 16))
    for row, d in zip(plan.row_labels, plan.patterns):
        assert list(d.entries) == h[row].tolist()


@pytest.mark.parametrize("k", range(1, 7))
def test_walsh_plans_are_hadamard(k):
    flags = validate_plan(walsh_plan(k))
    assert flags.hadamard and flags.balanced and flags.orthogonal and flags.unimodular
    assert flags.m_ary == 2
    assert flags.count == 2**k - 1


def test_large_walsh_plan_orthogonality(monkeypatch):
    from cyclocode.services import plans

    monkeypatch.setattr(plans.settings, "PAIR_BLOCK_ELEMENTS", 1 << 16)
    assert validate_plan(walsh_plan(10)).hadamard


def test_orthogonality_catches_one_bad_pair():
    rows = walsh_hadamard_matrix(3)[1:].tolist()
    rows[5] = [-x for x in rows[5][:7]] + [rows[5][7]]
    plan = CyclotomicPlan(8, tuple(CyclotomicPattern.binary(r) for r in rows))
    flags = validate_plan(plan)
    assert not flags.orthogonal and not flags.hadamard

    quaternary = CyclotomicPlan(
        4, (CyclotomicPattern.m_ary(4, [0, 1, 2, 3]), CyclotomicPattern.m_ary(4, [0, 3, 2, 1]))
    )
    assert validate_plan(quaternary).orthogonal
    skewed = CyclotomicPlan(
        4, (CyclotomicPattern.m_ary(4, [0, 1, 2, 3]), CyclotomicPattern.m_ary(4, [0, 1, 2, 1]))
    )
    assert not validate_plan(skewed).orthogonal


def test_walsh_plan_order_limits():
    with pytest.raises(ValidationError):
        walsh_plan(0)
    with pytest.raises(ValidationError):
        walsh_plan(3, rows=[0])
    with pytest.raises(ValidationError):
        walsh_hadamard_matrix(17)


def test_plan_subset_keeps_row_numbers():
    sub = plan_subset(walsh_plan(3), [4, 2])
    assert sub.row_labels == (4, 2)
    assert list(sub.patterns[0].entries) == walsh_hadamard_matrix(3)[4].tolist()
    assert not sub.flags.hadamard
    assert sub.flags.orthogonal
    with pytest.raises(ValidationError):
        plan_subset(walsh_plan(3), [0])


def test_plan_rejects_duplicates_and_mismatched_lengths():
    d = CyclotomicPattern.binary([1, -1, 1, -1])
    with pytest.raises(ValidationError, match="duplicates"):
        CyclotomicPlan(4, (d, d))
    with pytest.raises(ValidationError, match="length"):
        CyclotomicPlan(4, (d, CyclotomicPattern.binary([1, -1])))


def test_pattern_validation():
    with pytest.raises(ValidationError):
        CyclotomicPattern.binary([1, 0, -1])
    with pytest.raises(ValidationError):
        CyclotomicPattern.binary([])
    quaternary = CyclotomicPattern.m_ary(4, [0, 1, 2, 3])
    assert np.allclose(quaternary.values, [1, 1j, -1, -1j])
    assert validate_plan(CyclotomicPlan(4, (quaternary,))).m_ary == 4


def test_unbalanced_plan_flags():
    plan = CyclotomicPlan(2, (CyclotomicPattern.binary([1, 1]),))
    flags = validate_plan(plan)
    assert not flags.balanced and not flags.hadamard and flags.unimodular


def test_hadamard_column_sums():
    d2 = walsh_plan(2)
    assert hadamard_column_sums(d2, 0, 0) == 3
    assert hadamard_column_sums(d2, 0, 1) == -1
    assert hadamard_column_sums(walsh_plan(1), 1, 1) == 1
    for k in (2, 3, 4):
        plan = walsh_plan(k)
        for j in range(plan.n):
            for i in range(plan.n):
                assert hadamard_column_sums(plan, j, i) == (plan.n - 1 if i == j else -1)


def test_hadamard_column_sums_needs_hadamard_plan():
    with pytest.raises(ValidationError):
        hadamard_column_sums(plan_subset(walsh_plan(2), [1]), 0, 0)


def test_balanced_iff_zeroth_coefficient_vanishes(rng):
    for _ in range(200):
        n = int(rng.integers(1, 65))
        d = CyclotomicPattern.binary((1 - 2 * rng.integers(0, 2, size=n)).tolist())
        balanced = d.values.sum() == 0
        assert balanced == (abs(dft(d.values)[0]) < 1e-12)


def test_parseval(rng):
    for n in (2, 3, 8, 12, 17):
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.isclose(np.vdot(b, a), n * np.vdot(dft(b), dft(a)))


def test_character_pattern_round_trip():
    for d in walsh_plan(3).patterns:
        e = character_pattern(d)
        assert isinstance(e, CharacterPattern)
        back = cyclotomic_pattern(e)
        assert back.is_binary and back.entries == d.entries


def test_idft_inverts_dft(rng):
    x = rng.normal(size=12) + 1j * rng.normal(size=12)
    assert np.allclose(idft(dft(x)), x, atol=1e-12)


def test_transform_norms():
    l1, l2 = transform_norms(CyclotomicPattern.binary([1, -1]))
    assert l1 == pytest.approx(1.0)
    assert l2 == pytest.approx(1.0)
    # unimodular pattern of length n has |d^|_2 = 1
    for d in walsh_plan(4).patterns:
        _, l2 = transform_norms(d)
        assert l2 == pytest.approx(1.0)
