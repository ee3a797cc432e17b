"""Closed-form reference quantities to compare measured metrics against

Logarithms are natural throughout.
"""

import math
import numpy as np
import logfire
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import CyclotomicPattern, CyclotomicPlan, PerPatternRotation
from cyclocode.models.schemas import BoundReport, DecompositionReport, LimitReport, MetricsSummary
from cyclocode.services.plans import dft, transform_norms

BALANCE_TOLERANCE = 1e-9


# Rotation dependence

def phi(x):
    """Phi(x) = 2(x - 1/2)^2 - 1/6 on [0, 1], extended with period 1"""
    t = np.mod(np.asarray(x, dtype=np.float64), 1.0)
    out = 2.0 * (t - 0.5) ** 2 - 1.0 / 6.0
    return float(out) if np.ndim(out) == 0 else out


def xi(x):
    """Xi = Phi + 2/3"""
    return phi(x) + 2.0 / 3.0


def _require_index(n: int):
    if n < 2:
        raise ValidationError(f"asymptotic formulas need index n >= 2, got {n}")


def asymptotic_cdf(n: int, rho) -> float:
    """Limiting CDF of rotated Hadamard-plan instances of index n advanced by rho * p"""
    _require_index(n)
    return 1.0 + 1.0 / (3 * (n - 1)) + phi(2 * rho) / (n - 1)


def asymptotic_adjusted_df(n: int, rho) -> float:
    """(n - 1)(CDF - 1) in the limit: 1/3 + Phi(2 rho)"""
    _require_index(n)
    return 1.0 / 3.0 + phi(2 * rho)


def asymptotic_minimizers(lo: float = 0.0, hi: float = 1.0) -> list[float]:
    """Every rho = (2k + 1)/4 in [lo, hi]"""
    first = math.ceil((4 * lo - 1) / 2)
    out = []
    k = first
    while (2 * k + 1) / 4 <= hi:
        out.append((2 * k + 1) / 4)
        k += 1
    return out


def limit_report(n: int, rho: float = 0.25) -> LimitReport:
    _require_index(n)
    return LimitReport(
        n=n,
        rho=rho,
        cdf=asymptotic_cdf(n, rho),
        adjusted_df=asymptotic_adjusted_df(n, rho),
        minimum_cdf=1.0 + 1.0 / (6 * (n - 1)),
        minimum_adjusted_df=1.0 / 6.0,
        minimizers=asymptotic_minimizers(0.0, 1.0),
    )


# Pair parameters

def v_parity(p: int, n: int) -> int:
    """sigma = ((p - 1)/n) mod 2"""
    if (p - 1) % n:
        raise ValidationError(f"index {n} does not divide p - 1 = {p - 1}")
    return ((p - 1) // n) % 2


def pair_params(d: CyclotomicPattern, d_prime: CyclotomicPattern, sigma: int) -> tuple[float, float]:
    """(U, V^(sigma)) for a pair of patterns of equal index"""
    if d.n != d_prime.n:
        raise ValidationError(f"pattern indices differ: {d.n} vs {d_prime.n}")
    a = d.values.astype(np.complex128)
    b = d_prime.values.astype(np.complex128)
    norms = float(np.vdot(a, a).real) * float(np.vdot(b, b).real)
    if norms == 0:
        raise ValidationError("pair parameters are undefined for a zero pattern")
    u = abs(np.vdot(b, a)) ** 2 / norms
    shift = (sigma % 2) * (d.n // 2) if d.n % 2 == 0 else 0
    v = abs(np.sum(a * np.roll(b, -shift))) ** 2 / norms
    return float(u), float(v)


def per_pattern_limit(plan: CyclotomicPlan, rhos, sigma: int, p: int | None = None) -> float:
    """Limiting CDF of a Hadamard plan whose pattern d is advanced by rho(d) * p

    rhos is a sequence of fractions, or a PerPatternRotation whose shifts are read relative to p.
    """
    if not plan.flags.hadamard:
        raise ValidationError(f"plan {plan.name} is not a Hadamard plan")
    n = plan.n
    _require_index(n)
    if isinstance(rhos, PerPatternRotation):
        if p is None:
            raise ValidationError("per-pattern shifts need the prime they were chosen for")
        rhos = [r / p for r in rhos.resolve(p, len(plan))]
    rhos = list(rhos)
    if len(rhos) != len(plan):
        raise ValidationError(f"need {len(plan)} rotation fractions, got {len(rhos)}")
    total = 0.0
    for i, d in enumerate(plan.patterns):
        for j, d_prime in enumerate(plan.patterns):
            _, v = pair_params(d, d_prime, sigma)
            total += v * phi(rhos[i] + rhos[j])
    return 1.0 + 1.0 / (3 * (n - 1)) + total / (n - 1) ** 2


# Peak bounds

def weil_peak_term(p: int) -> float:
    """2 sqrt(p) + (4/pi) sqrt(p) log(4p/pi)"""
    root = math.sqrt(p)
    return 2 * root + (4 / math.pi) * root * math.log(4 * p / math.pi)


def m_sequence_psl_bound(length: int) -> float:
    """1 + (2/pi) sqrt(l + 1) log(4l/pi) for binary m-sequences of length l"""
    return 1 + (2 / math.pi) * math.sqrt(length + 1) * math.log(4 * length / math.pi)


def _is_balanced(d: CyclotomicPattern) -> bool:
    total = d.values.sum()
    return total == 0 if d.is_binary else abs(total) < BALANCE_TOLERANCE


def _is_orthogonal(d: CyclotomicPattern, d_prime: CyclotomicPattern) -> bool:
    ip = np.vdot(d_prime.values, d.values)
    return ip == 0 if d.is_binary and d_prime.is_binary else abs(ip) < BALANCE_TOLERANCE


def peak_bounds(
    plan: CyclotomicPlan, p: int, unimodularized: bool, summary: MetricsSummary | None = None
) -> list[BoundReport]:
    """PSL, PCC and GUC upper bounds for the p-instances of a plan, paired with measurements if given"""
    with logfire.span("peak_bounds", plan=plan.name, p=p):
        weil = weil_peak_term(p)
        extra = 2.0 if unimodularized else 0.0
        norms = [transform_norms(d) for d in plan.patterns]
        aligned = summary is not None and summary.size == len(plan)
        reports = []

        for i, d in enumerate(plan.patterns):
            if not _is_balanced(d):
                continue
            l1, l2 = norms[i]
            reports.append(
                BoundReport(
                    name=f"psl[{i}]",
                    p=p,
                    n=plan.n,
                    l1_norms=[l1],
                    l2_norms=[l2],
                    bound=l1 * l1 * weil + extra,
                    measured=summary.sequences[i].psl if aligned else None,
                )
            )

        measured_pcc = {(q.first, q.second): q.pcc for q in summary.pairs} if aligned else {}
        for i in range(len(plan)):
            for j in range(i + 1, len(plan)):
                d, d_prime = plan.patterns[i], plan.patterns[j]
                if not _is_orthogonal(d, d_prime) or not (_is_balanced(d) or _is_balanced(d_prime)):
                    continue
                reports.append(
                    BoundReport(
                        name=f"pcc[{i},{j}]",
                        p=p,
                        n=plan.n,
                        l1_norms=[norms[i][0], norms[j][0]],
                        l2_norms=[norms[i][1], norms[j][1]],
                        bound=norms[i][0] * norms[j][0] * weil + extra,
                        measured=measured_pcc.get((i, j)),
                    )
                )

        flags = plan.flags
        if len(plan) and flags.balanced and flags.orthogonal:
            reports.append(
                BoundReport(
                    name="guc",
                    p=p,
                    n=plan.n,
                    l1_norms=[l1 for l1, _ in norms],
                    l2_norms=[l2 for _, l2 in norms],
                    bound=max(l1 * l1 for l1, _ in norms) * weil + extra,
                    measured=summary.guc if summary is not None else None,
                )
            )

        violated = [r.name for r in reports if r.satisfied is False]
        if violated:
            logfire.warn("Peak bounds violated", plan=plan.name, p=p, bounds=violated)
        return reports


def correlation_envelope(
    d: CyclotomicPattern, d_prime: CyclotomicPattern, p: int, r: int, r_prime: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """(shifts, centres B(s), radius) with |AC_{f^(r), g^(r')}(s) - B(s)| <= radius for derived f, g"""
    if d.n != d_prime.n:
        raise ValidationError(f"pattern indices differ: {d.n} vs {d_prime.n}")
    e, e_prime = dft(d.values), dft(d_prime.values)
    shifts = np.arange(-(p - 1), p)
    span = p - np.abs(shifts)
    aligned = (shifts - (r_prime - r)) % p == 0
    centres = np.where(aligned, span * np.vdot(e_prime, e), span * e[0] * np.conj(e_prime[0]))
    radius = float(np.abs(e).sum() * np.abs(e_prime).sum()) * weil_peak_term(p)
    return shifts, centres, radius


def envelope_report(spectrum_values, d, d_prime, p: int, r: int, r_prime: int, unimodularized: bool = False) -> BoundReport:
    """Largest distance of a measured aperiodic spectrum from its envelope centres"""
    _, centres, radius = correlation_envelope(d, d_prime, p, r, r_prime)
    distance = float(np.max(np.abs(np.asarray(spectrum_values) - centres)))
    l1 = [float(np.abs(dft(x.values)).sum()) for x in (d, d_prime)]
    return BoundReport(
        name="envelope",
        p=p,
        n=d.n,
        l1_norms=l1,
        bound=radius + (2.0 if unimodularized else 0.0),
        measured=distance,
    )


# Demerit factor decomposition

def decomposition_bound(p: int, width: float) -> float:
    """Residual bound for pair width W = |d^|_1 |d'^|_1 / (|d^|_2 |d'^|_2)"""
    return 192 * width**2 * math.sqrt(p) * (1 + math.log(p)) ** 3 / (p - 1) + (22 * p - 4) / (3 * p * (p - 1))


def cdf_decomposition_residual(
    d: CyclotomicPattern,
    d_prime: CyclotomicPattern,
    p: int,
    r: int,
    r_prime: int,
    cdf: float,
    pcdf: float,
    first: int | None = None,
    second: int | None = None,
) -> DecompositionReport:
    """Residual E of ((p-1)/p) CDF = 1/3 + (2/3) PCDF + U Phi((r-r')/p) + V Phi((r+r')/p) + E"""
    if not (_is_balanced(d) and _is_balanced(d_prime)):
        raise ValidationError("decomposition needs balanced patterns")
    sigma = v_parity(p, d.n)
    u, v = pair_params(d, d_prime, sigma)
    scale = (p - 1) / p
    residual = scale * cdf - 1 / 3 - (2 / 3) * pcdf - u * phi((r - r_prime) / p) - v * phi((r + r_prime) / p)
    l1, l2 = transform_norms(d)
    l1_prime, l2_prime = transform_norms(d_prime)
    bound = decomposition_bound(p, (l1 * l1_prime) / (l2 * l2_prime))
    return DecompositionReport(
        first=first,
        second=second,
        p=p,
        r=r,
        r_prime=r_prime,
        u=u,
        v=v,
        s=scale * pcdf - 1 - u - v,
        cdf=cdf,
        pcdf=pcdf,
        residual=residual,
        bound=bound,
        satisfied=abs(residual) <= bound,
    )


# Unimodularization and random references

def unimodularization_cdf_gap(cdf: float, length: int, after: bool = False) -> float:
    """Bound on |sqrt(CDF after) - sqrt(CDF before)| for one unimodularized pair

    With after=True, cdf is the unimodularized value and the bound uses l - 1.
    """
    if length <= 1:
        raise ValidationError(f"length must exceed 1, got {length}")
    denom = length - 1 if after else length
    return math.sqrt(cdf) / denom + 2 * math.sqrt(length) / denom


def random_codebook_expectations(size: int, length: int) -> dict[str, float]:
    """Expected ADF, CDF(F) and adjusted DF for independent uniformly random binary sequences"""
    if size < 1 or length < 1:
        raise ValidationError("size and length must be positive")
    cdf = 1 + 1 / size - 1 / (size * length)
    return {"adf": 1 - 1 / length, "cdf": cdf, "adjusted_df": size * (cdf - 1)}
