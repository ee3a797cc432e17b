import numpy as np
import logfire
from cyclocode.core.config import settings
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import CharacterPattern, CyclotomicPattern, CyclotomicPlan
from cyclocode.models.schemas import PatternKind, PlanFlags
from cyclocode.services import transforms

MAX_WALSH_ORDER = 16
COMPLEX_TOLERANCE = 1e-9


# Fourier duality

def dft(values) -> np.ndarray:
    """Forward transform normalized by 1/n"""
    x = np.asarray(values, dtype=np.complex128)
    if x.shape[-1] < 1:
        raise ValidationError("cannot transform an empty pattern")
    return transforms.dft(x) / x.shape[-1]


def idft(values) -> np.ndarray:
    """Unnormalized inverse: out_k = sum_j exp(2 pi i j k / n) e_j"""
    x = np.asarray(values, dtype=np.complex128)
    if x.shape[-1] < 1:
        raise ValidationError("cannot transform an empty pattern")
    return transforms.dft(x, inverse=True)


def character_pattern(pattern: CyclotomicPattern) -> CharacterPattern:
    return CharacterPattern(tuple(dft(pattern.values)))


def cyclotomic_pattern(e: CharacterPattern) -> CyclotomicPattern:
    """Inverse of character_pattern; snaps to a binary pattern when the values are +1/-1"""
    values = idft(e.values)
    snapped = np.rint(values.real)
    if np.all(np.abs(values - snapped) < COMPLEX_TOLERANCE) and np.all(np.abs(snapped) == 1):
        return CyclotomicPattern.binary(snapped.astype(int).tolist())
    return CyclotomicPattern.from_values(values.tolist())


def transform_norms(pattern: CyclotomicPattern) -> tuple[float, float]:
    """(l1, l2) norms of the normalized transform of a pattern"""
    e = dft(pattern.values)
    return float(np.abs(e).sum()), float(np.sqrt((np.abs(e) ** 2).sum()))


# Walsh-Hadamard plans

def walsh_hadamard_matrix(k: int) -> np.ndarray:
    """Sylvester matrix H_k of order 2^k with H_0 = [1]"""
    if k < 0 or k > MAX_WALSH_ORDER:
        raise ValidationError(f"Walsh order must lie in 0..{MAX_WALSH_ORDER}, got {k}")
    h = np.ones((1, 1), dtype=np.int8)
    for _ in range(k):
        h = np.block([[h, h], [h, -h]])
    return h


def _walsh_row(k: int, row: int) -> np.ndarray:
    # H_k[i, j] = (-1)^popcount(i & j)
    j = np.arange(1 << k)
    parity = np.zeros(1 << k, dtype=np.int64)
    masked = j & row
    while masked.any():
        parity ^= masked & 1
        masked >>= 1
    return 1 - 2 * parity


def walsh_plan(k: int, rows=None) -> CyclotomicPlan:
    """Rows of H_k other than the all-ones row, in row order"""
    if k < 1 or k > MAX_WALSH_ORDER:
        raise ValidationError(f"Walsh plan order must lie in 1..{MAX_WALSH_ORDER}, got {k}")
    n = 1 << k
    rows = list(range(1, n)) if rows is None else list(rows)
    for row in rows:
        if not 1 <= row < n:
            raise ValidationError(f"Walsh row {row} is outside 1..{n - 1}")
    patterns = tuple(CyclotomicPattern.binary(_walsh_row(k, row).tolist()) for row in rows)
    return CyclotomicPlan(n=n, patterns=patterns, name=f"walsh:{k}", row_labels=tuple(rows))


def plan_subset(plan: CyclotomicPlan, row_indices) -> CyclotomicPlan:
    """Sub-plan addressed by Walsh row numbers (the all-ones row is row 0)"""
    labels = plan.row_labels or tuple(range(1, len(plan) + 1))
    position = {row: i for i, row in enumerate(labels)}
    picked = []
    for row in row_indices:
        if row == 0:
            raise ValidationError("row 0 is the all-ones row and never part of a plan")
        if row not in position:
            raise ValidationError(f"row {row} is not in plan {plan.name}")
        picked.append(row)
    return CyclotomicPlan(
        n=plan.n,
        patterns=tuple(plan.patterns[position[row]] for row in picked),
        name=f"{plan.name}[{','.join(map(str, picked))}]" if picked else f"{plan.name}[]",
        row_labels=tuple(picked),
    )


# Structural validation

def _is_zero(x, exact: bool) -> bool:
    return x == 0 if exact else abs(x) < COMPLEX_TOLERANCE


def _root_order(pattern: CyclotomicPattern) -> int | None:
    match pattern.kind:
        case PatternKind.BINARY:
            return 2
        case PatternKind.M_ARY:
            order = 1
            for k in pattern.entries:
                order = np.lcm(order, pattern.m // np.gcd(pattern.m, k))
            return int(order)
    return None


def _gram_is_diagonal(values: list[np.ndarray], exact: bool) -> bool:
    """Every pair of distinct rows has zero inner product, one block of rows at a time"""
    if len(values) < 2:
        return True
    # float64 sums of +-1 products stay exact integers
    rows = np.stack(values).astype(np.float64 if exact else np.complex128)
    adjoint = rows.conj().T
    per_block = max(1, settings.PAIR_BLOCK_ELEMENTS // len(rows))
    for start in range(0, len(rows), per_block):
        gram = rows[start : start + per_block] @ adjoint
        idx = np.arange(len(gram))
        gram[idx, start + idx] = 0
        if exact and np.any(gram):
            return False
        if not exact and np.any(np.abs(gram) >= COMPLEX_TOLERANCE):
            return False
    return True


def validate_plan(plan: CyclotomicPlan) -> PlanFlags:
    """Compute balanced / orthogonal / unimodular / m-ary / Hadamard flags"""
    with logfire.span("validate_plan", plan=plan.name, n=plan.n, count=len(plan)):
        exact = all(d.is_binary for d in plan.patterns)
        values = [d.values for d in plan.patterns]

        balanced = all(_is_zero(v.sum(), exact) for v in values)
        unimodular = all(
            np.all(np.abs(v) == 1) if exact else np.all(np.abs(np.abs(v) - 1) < COMPLEX_TOLERANCE)
            for v in values
        )
        orthogonal = _gram_is_diagonal(values, exact)

        m_ary = None
        orders = [_root_order(d) for d in plan.patterns]
        if orders and None not in orders:
            m_ary = int(np.lcm.reduce(orders))

        hadamard = balanced and orthogonal and unimodular and len(plan) == plan.n - 1
        return PlanFlags(
            count=len(plan),
            balanced=bool(balanced),
            orthogonal=bool(orthogonal),
            unimodular=bool(unimodular),
            m_ary=m_ary,
            hadamard=bool(hadamard),
        )


def hadamard_column_sums(plan: CyclotomicPlan, j: int, k: int) -> complex | int:
    """sum over patterns d of d_j * conj(d_k)"""
    if not plan.flags.hadamard:
        raise ValidationError(f"plan {plan.name} is not a Hadamard plan")
    total = sum(d.values[j % plan.n] * np.conj(d.values[k % plan.n]) for d in plan.patterns)
    if all(d.is_binary for d in plan.patterns):
        return int(np.real(total))
    return complex(total)
