from concurrent.futures import ThreadPoolExecutor
import numpy as np
import logfire
from cyclocode.core.config import settings
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import (
    AperiodicSeq,
    CharacterPattern,
    Codebook,
    CyclotomicPattern,
    CyclotomicPlan,
    FieldContext,
    FractionRotation,
    PeriodicSeq,
    Rotation,
    UniformRotation,
    from_exponents,
    roots_of_unity,
)
from cyclocode.models.schemas import PatternKind
from cyclocode.services.numtheory import class_vector, field_context

UNIMODULAR_TOLERANCE = 1e-9


# Periodic sequences

def derive_periodic(
    ctx: FieldContext, pattern: CyclotomicPattern, pattern_index: int | None = None, plan_name: str | None = None
) -> PeriodicSeq:
    """f_0 = 0 and f_h = d_k for h in class k"""
    if (ctx.p - 1) % pattern.n:
        raise ValidationError(f"pattern index {pattern.n} does not divide p - 1 = {ctx.p - 1}")
    cls = class_vector(ctx, pattern.n)
    if pattern.kind == PatternKind.M_ARY and pattern.m > 2:
        exponents = np.asarray(pattern.entries, dtype=np.int64)[np.maximum(cls, 0)]
        exponents[0] = -1
        f = from_exponents(exponents, pattern.m)
        return PeriodicSeq(f, pattern_index, plan_name, exponents=exponents, m=pattern.m)
    if pattern.kind == PatternKind.COMPLEX:
        lookup = np.asarray(pattern.values, dtype=np.complex128)
    else:
        # binary, and m-ary with m <= 2, are exact +-1
        lookup = np.rint(np.real(pattern.values)).astype(np.int8)
    f = lookup[np.maximum(cls, 0)]
    f[0] = 0
    return PeriodicSeq(f, pattern_index=pattern_index, plan_name=plan_name)


def derive_via_characters(ctx: FieldContext, e: CharacterPattern) -> PeriodicSeq:
    """f_h = sum_j e_j chi^j(h), chi(alpha^k) = exp(2 pi i k / n)"""
    n = e.n
    if (ctx.p - 1) % n:
        raise ValidationError(f"pattern index {n} does not divide p - 1 = {ctx.p - 1}")
    cls = class_vector(ctx, n)
    j = np.arange(n)
    characters = np.exp(2j * np.pi * np.outer(j, j) / n)  # characters[j, k] = chi^j(alpha^k)
    per_class = e.values @ characters
    f = per_class[np.maximum(cls, 0)]
    f[0] = 0
    return PeriodicSeq(f)


def unimodularize(seq: PeriodicSeq, fill: int | complex = 1) -> PeriodicSeq:
    """Replace the forced zero at index 0 with a unimodular value"""
    if abs(abs(complex(fill)) - 1) > UNIMODULAR_TOLERANCE:
        raise ValidationError(f"fill value {fill} is not unimodular")
    rest = np.abs(seq.entries[1:])
    if not np.all(np.abs(rest - 1) <= UNIMODULAR_TOLERANCE):
        raise ValidationError("sequence has non-unimodular entries away from index 0")
    integer_fill = complex(fill).imag == 0 and complex(fill).real in (1, -1)
    if seq.is_integer and integer_fill:
        u = seq.entries.copy()
        u[0] = int(complex(fill).real)
        return PeriodicSeq(u, seq.pattern_index, seq.plan_name, unimodularized=True)

    u = seq.entries.astype(np.complex128)
    u[0] = complex(fill)
    exponents, m = None, None
    if seq.exponents is not None:
        ring = roots_of_unity(np.arange(seq.m), seq.m)
        hits = np.flatnonzero(np.abs(ring - complex(fill)) <= UNIMODULAR_TOLERANCE)
        if hits.size:
            # fill is itself an m-th root of unity
            exponents, m = seq.exponents.copy(), seq.m
            exponents[0] = hits[0]
            u[0] = ring[hits[0]]
    return PeriodicSeq(u, seq.pattern_index, seq.plan_name, unimodularized=True, exponents=exponents, m=m)


def rotate(seq: PeriodicSeq, r: int, label: str | None = None) -> AperiodicSeq:
    """window[j] = seq[(r + j) mod p]"""
    r %= seq.p
    return AperiodicSeq(
        np.roll(seq.entries, -r),
        r=r,
        pattern_index=seq.pattern_index,
        plan_name=seq.plan_name,
        unimodularized=seq.unimodularized,
        label=label,
        exponents=None if seq.exponents is None else np.roll(seq.exponents, -r),
        m=seq.m,
    )


# Codebook instances

def instantiate(
    plan: CyclotomicPlan,
    p: int,
    rotation: Rotation | None = None,
    unimodularize_fill: int | complex | None = 1,
    ctx: FieldContext | None = None,
    workers: int | None = None,
) -> Codebook:
    """p-instance of a plan: derive, optionally unimodularize, rotate, drop collisions

    unimodularize_fill=None keeps the zero at index 0.
    """
    rotation = rotation or UniformRotation(0)
    with logfire.span("instantiate", plan=plan.name, p=p, rotation=rotation.describe()):
        if ctx is None or ctx.p != p:
            ctx = field_context(p)
        if (p - 1) % plan.n:
            raise ValidationError(f"plan index {plan.n} does not divide p - 1 = {p - 1}")
        shifts = rotation.resolve(p, len(plan))

        def build(i: int) -> tuple[PeriodicSeq, AperiodicSeq]:
            f = derive_periodic(ctx, plan.patterns[i], i, plan.name)
            if unimodularize_fill is not None:
                f = unimodularize(f, unimodularize_fill)
            return f, rotate(f, shifts[i])

        class_vector(ctx, plan.n)
        with ThreadPoolExecutor(max_workers=workers or settings.THREADS) as pool:
            built = list(pool.map(build, range(len(plan))))

        kept_periodic, kept, collisions = [], [], []
        seen: dict[bytes, int] = {}
        for i, (f, window) in enumerate(built):
            key = window.window.tobytes()
            if key in seen:
                collisions.append((seen[key], i))
                logfire.warn(
                    "Pattern instances collide",
                    plan=plan.name,
                    p=p,
                    first=seen[key],
                    second=i,
                    first_r=shifts[seen[key]],
                    second_r=shifts[i],
                )
                continue
            seen[key] = i
            kept_periodic.append(f)
            kept.append(window)

        logfire.info("Codebook instantiated", plan=plan.name, p=p, size=len(kept), collisions=len(collisions))
        return Codebook(
            sequences=tuple(kept),
            name=plan.name,
            p=p,
            n=plan.n,
            rotation=rotation.describe(),
            unimodularized=unimodularize_fill is not None,
            fill=unimodularize_fill if unimodularize_fill is not None else 0,
            collisions=tuple(collisions),
            periodic=tuple(kept_periodic),
        )


def quarter_rotation() -> FractionRotation:
    """Advancement floor(p/4), equal to (p - 1)/4 for p = 1 (mod 8)"""
    return FractionRotation(0.25)
