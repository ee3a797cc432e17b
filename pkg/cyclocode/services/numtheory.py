import math
import random
import numpy as np
import logfire
from cyclocode.core.config import settings
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import CyclotomicNumberTable, FieldContext
from cyclocode.services.kernels import class_walk, generator_walk

# Deterministic for every n < 3.3e24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


# Primality and factoring

def is_prime(m: int) -> bool:
    """Deterministic Miller-Rabin"""
    if m < 2:
        return False
    for q in _WITNESSES:
        if m % q == 0:
            return m == q
    d, s = m - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _WITNESSES:
        x = pow(a, d, m)
        if x in (1, m - 1):
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


def _pollard_brent(m: int, rng: random.Random) -> int:
    """A nontrivial factor of composite odd m"""
    while True:
        y, c, block = rng.randrange(1, m), rng.randrange(1, m), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % m
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(block, r - k)):
                    y = (y * y + c) % m
                    q = q * abs(x - y) % m
                g = math.gcd(q, m)
                k += block
            r *= 2
        if g == m:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % m
                g = math.gcd(abs(x - ys), m)
        if g != m:
            return g


def factorize(m: int) -> list[int]:
    """Prime factors of m with multiplicity, ascending"""
    if m < 1:
        raise ValidationError(f"cannot factor {m}")
    factors = []
    for q in (2, 3, 5):
        while m % q == 0:
            factors.append(q)
            m //= q
    q, step = 7, 4
    while q * q <= m and q < 1 << 12:
        while m % q == 0:
            factors.append(q)
            m //= q
        q += step
        step = 6 - step
    stack = [m] if m > 1 else []
    rng = random.Random(m)
    while stack:
        x = stack.pop()
        if is_prime(x):
            factors.append(x)
            continue
        d = _pollard_brent(x, rng)
        stack.extend((d, x // d))
    return sorted(factors)


def next_usable_prime(start: int, n: int = 1) -> int:
    """Least prime p >= start with p = 1 (mod n)"""
    if n < 1:
        raise ValidationError(f"modulus must be positive, got {n}")
    candidate = max(start, 2)
    if n > 1:
        candidate += (1 - candidate) % n
    step = n if n > 1 else 1
    while candidate <= settings.MAX_PRIME:
        if is_prime(candidate):
            return candidate
        candidate += step
    raise ValidationError(
        f"no prime = 1 (mod {n}) at or above {start} up to the supported limit {settings.MAX_PRIME}"
    )


def primes_in_progression(lo: int, hi: int, n: int = 1) -> list[int]:
    """All primes p in [lo, hi] with p = 1 (mod n)"""
    out = []
    p = next_usable_prime(lo, n) if lo <= hi else hi + 1
    while p <= hi:
        out.append(p)
        p = next_usable_prime(p + 1, n)
    return out


# Field structure

def primitive_root(p: int) -> int:
    """Least positive primitive root of the prime p"""
    if p == 2:
        return 1
    cofactors = [(p - 1) // q for q in sorted(set(factorize(p - 1)))]
    for g in range(2, p):
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
    raise ValidationError(f"{p} has no primitive root")


def _require_odd_prime(p: int):
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if p == 2:
        raise ValidationError("p = 2 is not supported; sequences need an odd prime")


def field_context(p: int, build_table: bool | None = None) -> FieldContext:
    """Least primitive root of p plus, below the table cap, a full discrete-log table"""
    _require_odd_prime(p)
    with logfire.span("field_context", p=p):
        alpha = primitive_root(p)
        if build_table is None:
            build_table = p <= settings.DLOG_TABLE_CAP
        table = generator_walk(p, alpha) if build_table else None
        return FieldContext(p=p, alpha=alpha, index_table=table)


def _require_index(ctx: FieldContext, n: int):
    if n < 1 or (ctx.p - 1) % n:
        raise ValidationError(f"index {n} does not divide p - 1 = {ctx.p - 1}")


def cyclotomic_class_index(ctx: FieldContext, n: int, h: int) -> int:
    """Class k in [0, n) with h in alpha^k times the n-th powers"""
    _require_index(ctx, n)
    h %= ctx.p
    if h == 0:
        raise ValidationError("0 lies in no cyclotomic class")
    if ctx.index_table is not None:
        return int(ctx.index_table[h]) % n
    # h^((p-1)/n) = beta^(log h) with beta = alpha^((p-1)/n) of order n
    e = (ctx.p - 1) // n
    target = pow(h, e, ctx.p)
    beta = pow(ctx.alpha, e, ctx.p)
    x = 1
    for k in range(n):
        if x == target:
            return k
        x = x * beta % ctx.p
    raise ValidationError(f"no class found for {h} mod {ctx.p}")


def class_vector(ctx: FieldContext, n: int) -> np.ndarray:
    """Array c with c[h] = class of h for h in 1..p-1 and c[0] = -1"""
    _require_index(ctx, n)
    cached = ctx._class_vectors.get(n)
    if cached is not None:
        return cached
    if ctx.index_table is not None:
        cls = ctx.index_table % n
        cls[0] = -1
    elif ctx.alpha * ctx.p < 1 << 62:
        cls = class_walk(ctx.p, ctx.alpha, n)
    else:
        cls = np.array([-1] + [cyclotomic_class_index(ctx, n, h) for h in range(1, ctx.p)])
    cls.setflags(write=False)
    ctx._class_vectors[n] = cls
    return cls


def cyclotomic_numbers(ctx: FieldContext, n: int) -> CyclotomicNumberTable:
    """Table of (j, k) = #{x in class j : x + 1 in class k}"""
    _require_index(ctx, n)
    with logfire.span("cyclotomic_numbers", p=ctx.p, n=n):
        cls = class_vector(ctx, n).astype(np.int64)
        # x runs over 1..p-2 so that x + 1 stays nonzero
        flat = np.bincount(cls[1:-1] * n + cls[2:], minlength=n * n)
        return CyclotomicNumberTable(p=ctx.p, n=n, entries=flat.reshape(n, n))
