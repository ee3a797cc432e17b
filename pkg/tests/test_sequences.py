import numpy as np
import pytest
from cyclocode.core.errors import ValidationError
from cyclocode.models.domain import (
    CyclotomicPattern,
    CyclotomicPlan,
    FractionRotation,
    PerPatternRotation,
    UniformRotation,
    roots_of_unity,
)
from cyclocode.services.numtheory import field_context
from cyclocode.services.plans import character_pattern, walsh_plan
from cyclocode.services.sequences import (
    derive_periodic,
    derive_via_characters,
    instantiate,
    quarter_rotation,
    rotate,
    unimodularize,
)


def test_legendre_sequence(legendre_plan):
    ctx = field_context(5)
    f = derive_periodic(ctx, legendre_plan.patterns[0])
    assert f.entries.tolist() == [0, 1, -1, -1, 1]
    u = unimodularize(f)
    assert u.entries.tolist() == [1, 1, -1, -1, 1]
    assert u.unimodularized and u.is_integer
    assert unimodularize(f, -1).entries.tolist() == [-1, 1, -1, -1, 1]


def test_unimodularize_rejects_bad_input(legendre_plan):
    f = derive_periodic(field_context(5), legendre_plan.patterns[0])
    with pytest.raises(ValidationError):
        unimodularize(f, 2)
    zero_pattern = CyclotomicPattern.from_values([0.5, 1])
    with pytest.raises(ValidationError):
        unimodularize(derive_periodic(field_context(5), zero_pattern))


def test_complex_fill_promotes_to_complex(legendre_plan):
    f = derive_periodic(field_context(5), legendre_plan.patterns[0])
    u = unimodularize(f, 1j)
    assert not u.is_integer
    assert u.entries[0] == 1j


def test_derive_requires_divisibility(d3):
    with pytest.raises(ValidationError, match="does not divide"):
        derive_periodic(field_context(19), d3.patterns[0])


def test_rotation_window():
    f = derive_periodic(field_context(5), walsh_plan(1).patterns[0])
    window = rotate(f, 2)
    assert window.window.tolist() == [-1, -1, 1, 0, 1]
    assert window.r == 2
    assert rotate(f, 7).r == 2


@pytest.mark.parametrize("p", [5, 13, 17, 41, 73, 97])
def test_characters_agree_with_classes(rng, p):
    ctx = field_context(p)
    for n in (d for d in (2, 4, 8) if (p - 1) % d == 0):
        for _ in range(8):
            d = CyclotomicPattern.from_values(rng.normal(size=n) + 1j * rng.normal(size=n))
            direct = derive_periodic(ctx, d).entries
            via = derive_via_characters(ctx, character_pattern(d)).entries
            assert np.allclose(direct, via, atol=1e-10)


def test_instantiate_d3_at_17(d3_book_17):
    book = d3_book_17
    assert len(book) == 7 and book.length == 17
    assert book.is_integer and book.unimodularized
    assert book.rotation == "fraction:1/4"
    assert all(f.r == 4 for f in book.sequences)
    assert all(set(np.unique(f.window).tolist()) <= {-1, 1} for f in book.sequences)
    assert book.collisions == ()


def test_rotation_specs():
    assert UniformRotation(20).resolve(17, 3) == [3, 3, 3]
    assert FractionRotation(1.25).rho == FractionRotation(0.25).rho
    assert FractionRotation("1/4").resolve(1009, 1) == [252]
    assert quarter_rotation().resolve(17, 2) == [4, 4]
    spec = PerPatternRotation({1: 5, 0: 2})
    assert spec.resolve(17, 2) == [2, 5]
    assert spec.describe() == "per-pattern:0=2,1=5"
    with pytest.raises(ValidationError):
        spec.resolve(17, 3)


def test_instantiate_per_pattern(d3):
    book = instantiate(d3, 17, PerPatternRotation({i: i for i in range(7)}), unimodularize_fill=None)
    assert [f.r for f in book.sequences] == list(range(7))
    assert not book.unimodularized
    assert all(f.window[(-f.r) % 17] == 0 for f in book.sequences)


def test_colliding_patterns_are_dropped():
    # at p = 3 the unimodularized windows [1, 1, -1] and roll([1, -1, 1], -2) coincide
    plan = CyclotomicPlan(2, (CyclotomicPattern.binary([1, -1]), CyclotomicPattern.binary([-1, 1])))
    book = instantiate(plan, 3, PerPatternRotation({0: 0, 1: 2}), unimodularize_fill=1)
    assert len(book) == 1
    assert book.collisions == ((0, 1),)
    assert len(instantiate(plan, 3, UniformRotation(0), unimodularize_fill=1)) == 2


def test_instantiate_rejects_bad_primes(d3):
    with pytest.raises(ValidationError, match="15 is not prime"):
        instantiate(d3, 15)
    with pytest.raises(ValidationError, match="does not divide"):
        instantiate(d3, 19)


def test_codebook_merge_labels(d3_book_17):
    merged = d3_book_17.merge(d3_book_17, name="both")
    assert len(merged) == 14
    assert merged.labels()[0] == "walsh:3[0]"
    assert merged.name == "both"


def test_roots_of_unity_exact_at_quarter_turns():
    values = roots_of_unity(np.arange(8), 8)
    assert values[[0, 2, 4, 6]].tolist() == [1, 1j, -1, -1j]
    assert np.isclose(values[1], np.exp(1j * np.pi / 4))
    assert roots_of_unity([-1, 7], 4).tolist() == [-1j, -1j]


def test_m_ary_sequence_keeps_exponents():
    quaternary = CyclotomicPattern.m_ary(4, [0, 1, 2, 3])
    f = derive_periodic(field_context(13), quaternary)
    assert f.m == 4 and f.exponents[0] == -1 and f.entries[0] == 0
    quarter_turns = np.array([1, 1j, -1, -1j])
    assert np.array_equal(f.entries[1:], quarter_turns[f.exponents[1:]])
    # 2 generates the multiplicative group mod 13
    assert f.exponents[2] == 1 and f.entries[2] == 1j

    u = unimodularize(f, 1j)
    assert u.exponents[0] == 1 and u.entries[0] == 1j
    assert np.array_equal(u.exponents[1:], f.exponents[1:])
    assert unimodularize(f, np.exp(0.3j)).exponents is None

    window = rotate(u, 5)
    assert window.m == 4
    assert np.array_equal(window.exponents, np.roll(u.exponents, -5))
    assert np.array_equal(window.window, quarter_turns[window.exponents])


def test_binary_m_ary_pattern_stays_integer():
    f = derive_periodic(field_context(5), CyclotomicPattern.m_ary(2, [0, 1]))
    assert f.is_integer and f.exponents is None
    assert f.entries.tolist() == [0, 1, -1, -1, 1]
