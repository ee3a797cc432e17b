"""Gold-code and GPS C/A reference codebooks"""

import numpy as np
import logfire
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import AperiodicSeq, Codebook, LfsrSpec, UniformRotation
from cyclocode.services.kernels import lfsr_walk
from cyclocode.services.plans import walsh_plan
from cyclocode.services.sequences import instantiate

CA_LENGTH = 1023
CA_REGISTER = 10
G1_FEEDBACK = (3, 10)
G2_FEEDBACK = (2, 3, 6, 8, 9, 10)

# Phase-select taps on the G2 register for PRN 1-37; PRN 34 and 37 share a code
PRN_TAPS = {
    1: (2, 6), 2: (3, 7), 3: (4, 8), 4: (5, 9), 5: (1, 9), 6: (2, 10), 7: (1, 8), 8: (2, 9),
    9: (3, 10), 10: (2, 3), 11: (3, 4), 12: (5, 6), 13: (6, 7), 14: (7, 8), 15: (8, 9),
    16: (9, 10), 17: (1, 4), 18: (2, 5), 19: (3, 6), 20: (4, 7), 21: (5, 8), 22: (6, 9),
    23: (1, 3), 24: (4, 6), 25: (5, 7), 26: (6, 8), 27: (7, 9), 28: (8, 10), 29: (1, 6),
    30: (2, 7), 31: (3, 8), 32: (4, 9), 33: (5, 10), 34: (4, 10), 35: (1, 7), 36: (2, 8),
    37: (4, 10),
}

# G2 output delays in chips for PRN 1-32
G2_DELAYS = {
    1: 5, 2: 6, 3: 7, 4: 8, 5: 17, 6: 18, 7: 139, 8: 140, 9: 141, 10: 251, 11: 252, 12: 254,
    13: 255, 14: 256, 15: 257, 16: 258, 17: 469, 18: 470, 19: 471, 20: 472, 21: 473, 22: 474,
    23: 509, 24: 512, 25: 513, 26: 514, 27: 515, 28: 516, 29: 859, 30: 860, 31: 861, 32: 862,
}

DEFAULT_PRNS = tuple(range(1, 37))
FALLBACK_PRNS = tuple(prn for prn in range(1, 38) if prn != 34)

# Walsh rows of the order-6 plan kept in the comparison codebook
WH_PRIME = 1153
WH_ROTATION = 288
WH_ROWS = (
    1, 2, 3, 4, 6, 8, 9, 12, 13, 16, 17, 18, 19, 21, 23, 24, 25, 27,
    29, 31, 32, 34, 35, 36, 42, 43, 44, 46, 48, 50, 51, 52, 58, 59, 60, 62,
)


def to_chips(bits: np.ndarray) -> np.ndarray:
    """bit b -> (-1)^b"""
    return (1 - 2 * np.asarray(bits, dtype=np.int8)).astype(np.int8)


# Maximal-length sequences

def m_sequence_bits(spec: LfsrSpec) -> np.ndarray:
    period = (1 << spec.degree) - 1
    bits, found = lfsr_walk(spec.degree, spec.taps, spec.seed, period)
    if found != period:
        raise ValidationError(f"feedback polynomial {spec.taps:#b} is not primitive: period {found}, not {period}")
    return bits


def m_sequence(spec: LfsrSpec) -> np.ndarray:
    """+1/-1 m-sequence of length 2^degree - 1"""
    return to_chips(m_sequence_bits(spec))


def gold_family(spec_a: LfsrSpec, spec_b: LfsrSpec, name: str = "gold") -> Codebook:
    """a, b and a xor (b shifted by k) for every k; the pair must share a degree"""
    if spec_a.degree != spec_b.degree:
        raise ValidationError(f"degrees differ: {spec_a.degree} vs {spec_b.degree}")
    with logfire.span("gold_family", degree=spec_a.degree):
        a, b = m_sequence_bits(spec_a), m_sequence_bits(spec_b)
        rows = [a, b] + [a ^ np.roll(b, -k) for k in range(len(b))]
        labels = ["a", "b"] + [f"a^b<<{k}" for k in range(len(b))]
        return Codebook(
            sequences=tuple(AperiodicSeq(to_chips(row), label=label) for row, label in zip(rows, labels)),
            name=name,
        )


# GPS C/A codes

def _register_states(feedback: tuple[int, ...]) -> np.ndarray:
    """Cell contents (columns 1..10 at 0..9) before each of the 1023 clocks, all-ones start"""
    cells = np.ones(CA_REGISTER, dtype=np.int8)
    states = np.empty((CA_LENGTH, CA_REGISTER), dtype=np.int8)
    taps = [c - 1 for c in feedback]
    for t in range(CA_LENGTH):
        states[t] = cells
        bit = np.bitwise_xor.reduce(cells[taps])
        cells = np.roll(cells, 1)
        cells[0] = bit
    return states


_G1 = _register_states(G1_FEEDBACK)
_G2 = _register_states(G2_FEEDBACK)


def ca_code_bits(prn: int) -> np.ndarray:
    """0/1 chips of one C/A code from the G2 phase-select taps"""
    if prn not in PRN_TAPS:
        raise ValidationError(f"PRN {prn} has no phase assignment (1-37)")
    a, b = PRN_TAPS[prn]
    return _G1[:, 9] ^ _G2[:, a - 1] ^ _G2[:, b - 1]


def ca_code_by_delay(prn: int) -> np.ndarray:
    """Same chips built from the G2 output delayed by the tabulated number of chips"""
    if prn not in G2_DELAYS:
        raise ValidationError(f"PRN {prn} has no tabulated G2 delay (1-32)")
    return _G1[:, 9] ^ np.roll(_G2[:, 9], G2_DELAYS[prn])


def first_chips_octal(bits: np.ndarray, count: int = 10) -> str:
    """Leading chips read as a binary number, in octal"""
    return format(int("".join(str(int(b)) for b in bits[:count]), 2), "o")


def gps_ca_codebook(prns=None) -> Codebook:
    """Unrotated C/A codes, one period each, labelled PRN<k>"""
    prns = tuple(DEFAULT_PRNS if prns is None else prns)
    with logfire.span("gps_ca_codebook", count=len(prns)):
        seen: dict[bytes, int] = {}
        sequences = []
        for prn in prns:
            chips = to_chips(ca_code_bits(prn))
            key = chips.tobytes()
            if key in seen:
                raise ValidationError(f"PRN {prn} repeats the code of PRN {seen[key]}")
            seen[key] = prn
            sequences.append(AperiodicSeq(chips, label=f"PRN{prn}"))
        return Codebook(sequences=tuple(sequences), name="GPS")


def wh_comparison_codebook() -> Codebook:
    """Order-6 Walsh rows at p = 1153, rotated by 288 and unimodularized with +1"""
    plan = walsh_plan(6, rows=WH_ROWS)
    book = instantiate(plan, WH_PRIME, UniformRotation(WH_ROTATION), unimodularize_fill=1)
    return Codebook(
        sequences=tuple(
            AperiodicSeq(f.window, f.r, f.pattern_index, f.plan_name, f.unimodularized, f"row{WH_ROWS[f.pattern_index]}")
            for f in book.sequences
        ),
        name="WH",
        p=book.p,
        n=book.n,
        rotation=book.rotation,
        unimodularized=True,
        fill=1,
        collisions=book.collisions,
        periodic=book.periodic,
    )
