from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
import math
import numpy as np
from cyclocode.core.errors import ValidationError
from cyclocode.models.schemas import PatternKind, PlanFlags, SpectrumKind


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


_QUARTER_TURNS = np.array([1, 1j, -1, -1j], dtype=np.complex128)


def roots_of_unity(exponents, m: int) -> np.ndarray:
    """exp(2 pi i k / m) per exponent k, exact at multiples of a quarter turn"""
    k = np.asarray(exponents, dtype=np.int64) % m
    out = np.exp(2j * np.pi * k / m)
    quarter = (4 * k) % m == 0
    out[quarter] = _QUARTER_TURNS[(4 * k[quarter]) // m]
    return out


# Prime field

@dataclass(frozen=True, eq=False)
class FieldContext:
    """Prime modulus with its least primitive root and an optional discrete-log table"""

    p: int
    alpha: int
    index_table: np.ndarray | None = field(default=None, repr=False)
    _class_vectors: dict = field(default_factory=dict, repr=False)

    @property
    def has_table(self) -> bool:
        return self.index_table is not None


@dataclass(frozen=True, eq=False)
class CyclotomicNumberTable:
    """Entry (j, k) counts x in class j with x + 1 in class k"""

    p: int
    n: int
    entries: np.ndarray

    def __post_init__(self):
        _frozen(self.entries)

    def __getitem__(self, jk: tuple[int, int]) -> int:
        j, k = jk
        return int(self.entries[j % self.n, k % self.n])

    def check_identities(self) -> dict[str, bool]:
        n, p, t = self.n, self.p, self.entries
        column = t.sum(axis=0)
        expected = np.full(n, (p - 1) // n)
        expected[0] -= 1
        idx = np.arange(n)
        mirrored = t[(-idx[:, None]) % n, (idx[None, :] - idx[:, None]) % n]
        return {
            "columns": bool(np.array_equal(column, expected)),
            "diagonal": int(np.trace(t)) == (p - 1) // n - 1,
            "total": int(t.sum()) == p - 2,
            "symmetry": bool(np.array_equal(t, mirrored)),
        }


# Patterns and plans

@dataclass(frozen=True)
class CyclotomicPattern:
    """Length-n template assigning one value per cyclotomic class

    Binary patterns store +1/-1 integers, m-ary patterns store exponents k of
    exp(2*pi*i*k/m), anything else stores complex values.
    """

    entries: tuple
    kind: PatternKind = PatternKind.BINARY
    m: int | None = None

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ValidationError("pattern must have at least one entry")
        match self.kind:
            case PatternKind.BINARY:
                if any(x not in (1, -1) for x in self.entries):
                    raise ValidationError(f"binary pattern entries must be +1/-1: {self.entries}")
                object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
                object.__setattr__(self, "m", 2)
            case PatternKind.M_ARY:
                if self.m is None or self.m < 1:
                    raise ValidationError(f"m-ary pattern needs m >= 1, got {self.m}")
                object.__setattr__(self, "entries", tuple(int(x) % self.m for x in self.entries))
            case PatternKind.COMPLEX:
                object.__setattr__(self, "entries", tuple(complex(x) for x in self.entries))
                object.__setattr__(self, "m", None)

    @classmethod
    def binary(cls, values) -> "CyclotomicPattern":
        return cls(tuple(values), PatternKind.BINARY)

    @classmethod
    def m_ary(cls, m: int, exponents) -> "CyclotomicPattern":
        return cls(tuple(exponents), PatternKind.M_ARY, m)

    @classmethod
    def from_values(cls, values) -> "CyclotomicPattern":
        values = tuple(values)
        if all(complex(x) in (1, -1) for x in values):
            return cls.binary(int(complex(x).real) for x in values)
        return cls(values, PatternKind.COMPLEX)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def is_binary(self) -> bool:
        return self.kind == PatternKind.BINARY

    @cached_property
    def values(self) -> np.ndarray:
        """Entries as an array: int64 for binary, complex128 otherwise"""
        if self.kind == PatternKind.BINARY:
            return _frozen(np.array(self.entries, dtype=np.int64))
        if self.kind == PatternKind.M_ARY:
            return _frozen(roots_of_unity(self.entries, self.m))
        return _frozen(np.array(self.entries, dtype=np.complex128))

    def key(self) -> tuple:
        return tuple(np.round(self.values.astype(np.complex128), 12).tolist())


@dataclass(frozen=True)
class CharacterPattern:
    """Weights on the n characters of order dividing n"""

    entries: tuple[complex, ...]

    def __post_init__(self):
        if len(self.entries) < 1:
            raise ValidationError("character pattern must have at least one entry")
        object.__setattr__(self, "entries", tuple(complex(x) for x in self.entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def values(self) -> np.ndarray:
        return _frozen(np.array(self.entries, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class CyclotomicPlan:
    n: int
    patterns: tuple[CyclotomicPattern, ...]
    name: str = "plan"
    row_labels: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "patterns", tuple(self.patterns))
        if self.n < 1:
            raise ValidationError(f"plan index must be positive, got {self.n}")
        seen = {}
        for i, d in enumerate(self.patterns):
            if d.n != self.n:
                raise ValidationError(f"pattern {i} has length {d.n}, plan index is {self.n}")
            if d.key() in seen:
                raise ValidationError(f"pattern {i} duplicates pattern {seen[d.key()]}")
            seen[d.key()] = i
        if self.row_labels is not None:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))
            if len(self.row_labels) != len(self.patterns):
                raise ValidationError("row labels must match the number of patterns")

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    @cached_property
    def flags(self) -> PlanFlags:
        from cyclocode.services.plans import validate_plan

        return validate_plan(self)


# Sequences

def _check_exponents(values: np.ndarray, exponents: np.ndarray | None, m: int | None):
    if exponents is None:
        return
    if m is None or m < 1:
        raise ValidationError("exponents need the root order m")
    if exponents.shape != values.shape:
        raise ValidationError(f"{len(exponents)} exponents for {len(values)} entries")
    _frozen(exponents)


def from_exponents(exponents, m: int) -> np.ndarray:
    """Entries of an m-ary sequence; exponent -1 gives 0"""
    exponents = np.asarray(exponents, dtype=np.int64)
    values = roots_of_unity(np.maximum(exponents, 0), m)
    values[exponents < 0] = 0
    return values


@dataclass(frozen=True, eq=False)
class PeriodicSeq:
    """Length-p sequence indexed by residues 0..p-1

    m-ary sequences also keep their exponents k mod m, -1 marking a zero entry.
    """

    entries: np.ndarray
    pattern_index: int | None = None
    plan_name: str | None = None
    unimodularized: bool = False
    exponents: np.ndarray | None = field(default=None, repr=False)
    m: int | None = None

    def __post_init__(self):
        _frozen(self.entries)
        _check_exponents(self.entries, self.exponents, self.m)

    @property
    def p(self) -> int:
        return len(self.entries)

    @property
    def is_integer(self) -> bool:
        return self.entries.dtype.kind in "iu"


@dataclass(frozen=True, eq=False)
class AperiodicSeq:
    """Window f^(r): window[j] = f[(r + j) mod p], zero outside 0..p-1"""

    window: np.ndarray
    r: int = 0
    pattern_index: int | None = None
    plan_name: str | None = None
    unimodularized: bool = False
    label: str | None = None
    exponents: np.ndarray | None = field(default=None, repr=False)
    m: int | None = None

    def __post_init__(self):
        _frozen(self.window)
        _check_exponents(self.window, self.exponents, self.m)

    def __len__(self) -> int:
        return len(self.window)

    @property
    def is_integer(self) -> bool:
        return self.window.dtype.kind in "iu"


@dataclass(frozen=True, eq=False)
class Codebook:
    sequences: tuple[AperiodicSeq, ...]
    name: str = "codebook"
    p: int | None = None
    n: int | None = None
    rotation: str | None = None
    unimodularized: bool = False
    fill: int | complex = 1
    collisions: tuple[tuple[int, int], ...] = ()
    periodic: tuple[PeriodicSeq, ...] = field(default=(), repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        object.__setattr__(self, "periodic", tuple(self.periodic))

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self):
        return iter(self.sequences)

    @property
    def lengths(self) -> list[int]:
        return [len(f) for f in self.sequences]

    @property
    def length(self) -> int | None:
        """Common length, or None for an empty or mixed-length codebook"""
        lengths = set(self.lengths)
        return lengths.pop() if len(lengths) == 1 else None

    @property
    def is_integer(self) -> bool:
        return all(f.is_integer for f in self.sequences)

    def labels(self) -> list[str]:
        out = []
        for i, f in enumerate(self.sequences):
            if f.label is not None:
                out.append(f.label)
            elif f.pattern_index is not None:
                out.append(f"{self.name}[{f.pattern_index}]")
            else:
                out.append(f"{self.name}[{i}]")
        return out

    def merge(self, other: "Codebook", name: str | None = None) -> "Codebook":
        """Union of two codebooks, sequences labelled by their source"""
        def labelled(book: "Codebook") -> list[AperiodicSeq]:
            return [replace(f, label=label) for f, label in zip(book.sequences, book.labels())]

        return Codebook(
            sequences=tuple(labelled(self) + labelled(other)),
            name=name or f"{self.name}+{other.name}",
        )


# Rotations

@dataclass(frozen=True)
class UniformRotation:
    r: int = 0

    def resolve(self, p: int, count: int) -> list[int]:
        return [self.r % p] * count

    def describe(self) -> str:
        return f"uniform:{self.r}"


@dataclass(frozen=True)
class FractionRotation:
    """Advance every sequence by floor(rho * p), rho reduced mod 1"""

    rho: Fraction

    def __post_init__(self):
        rho = self.rho if isinstance(self.rho, Fraction) else Fraction(str(self.rho))
        object.__setattr__(self, "rho", rho % 1)

    def resolve(self, p: int, count: int) -> list[int]:
        return [math.floor(self.rho * p)] * count

    def describe(self) -> str:
        return f"fraction:{self.rho}"


@dataclass(frozen=True)
class PerPatternRotation:
    """Advancement per pattern index"""

    shifts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        items = self.shifts.items() if isinstance(self.shifts, dict) else self.shifts
        object.__setattr__(self, "shifts", tuple(sorted((int(i), int(r)) for i, r in items)))

    def resolve(self, p: int, count: int) -> list[int]:
        mapping = dict(self.shifts)
        missing = [i for i in range(count) if i not in mapping]
        if missing:
            raise ValidationError(f"no advancement given for pattern(s) {missing}")
        return [mapping[i] % p for i in range(count)]

    def describe(self) -> str:
        return "per-pattern:" + ",".join(f"{i}={r}" for i, r in self.shifts)


Rotation = UniformRotation | FractionRotation | PerPatternRotation


# Correlation

@dataclass(frozen=True, eq=False)
class CorrelationSpectrum:
    kind: SpectrumKind
    shifts: np.ndarray
    values: np.ndarray
    max_deviation: float | None = None

    def __post_init__(self):
        _frozen(self.shifts)
        _frozen(self.values)

    @property
    def is_exact(self) -> bool:
        return self.values.dtype.kind in "iu"

    def at(self, s: int):
        if self.kind == SpectrumKind.PERIODIC:
            return self.values[s % len(self.values)]
        i = s - int(self.shifts[0])
        if 0 <= i < len(self.values):
            return self.values[i]
        return self.values.dtype.type(0)

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)


# Baseline

@dataclass(frozen=True)
class LfsrSpec:
    """Fibonacci LFSR: bit i of taps is the coefficient of x^i in the feedback polynomial"""

    degree: int
    taps: int
    seed: int = 1

    def __post_init__(self):
        if self.degree < 1:
            raise ValidationError(f"degree must be positive, got {self.degree}")
        if not (self.taps >> self.degree) & 1 or self.taps >> (self.degree + 1):
            raise ValidationError(f"taps {self.taps:#b} do not describe a degree-{self.degree} polynomial")
        if not self.taps & 1:
            raise ValidationError(f"taps {self.taps:#b} lack a constant term")
        if not 0 < self.seed < (1 << self.degree):
            raise ValidationError(f"seed must be a nonzero {self.degree}-bit state, got {self.seed}")

    @classmethod
    def from_exponents(cls, exponents, seed: int = 1) -> "LfsrSpec":
        """Polynomial given by its exponents, e.g. (3, 1, 0) for x^3 + x + 1"""
        taps = 0
        for e in exponents:
            taps |= 1 << e
        return cls(max(exponents), taps | 1, seed)
