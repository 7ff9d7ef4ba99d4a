"""Field arithmetic, the degree-3 hash family and seed derivation."""

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.errors import UsageError
from src.hashing import (
    FIELD_POLYNOMIALS,
    PolyHash,
    SignHash,
    SliceHash,
    binary_field,
    derive_seed,
    enumerate_family,
    eval_sign,
    eval_slice,
    evaluate_batch,
    is_irreducible,
    kwise_uniformity_report,
    sample_coefficients,
    sample_polyhash,
    splitmix64,
)

U64S = st.integers(min_value=0, max_value=2 ** 64 - 1)
SMALL_FIELDS = st.sampled_from(sorted(m for m in FIELD_POLYNOMIALS if m <= 16))


@st.composite
def polyhashes(draw, field_bits=None):
    m = draw(SMALL_FIELDS) if field_bits is None else field_bits
    limit = (1 << m) - 1
    coefficients = [draw(st.integers(min_value=0, max_value=limit)) for _ in range(4)]
    return PolyHash(*coefficients, field_bits=m)


# =============================================================================
# Field Arithmetic
# =============================================================================

@pytest.mark.parametrize("bits", sorted(m for m in FIELD_POLYNOMIALS if m <= 16))
def test_small_field_polynomials_are_irreducible(bits):
    polynomial = FIELD_POLYNOMIALS[bits]
    assert polynomial.bit_length() - 1 == bits
    assert is_irreducible(polynomial)


def test_reducible_polynomials_detected():
    assert not is_irreducible(0b101)        # (x + 1)^2
    assert not is_irreducible(0b11110)      # x * (x^3 + x^2 + x + 1)
    assert not is_irreducible(0x11B ^ 0x2)


def test_aes_field_known_products():
    field = binary_field(8)
    assert field.multiply(0x57, 0x83) == 0xC1
    assert field.multiply(0x57, 0x13) == 0xFE


def test_full_field_wraps_through_pentanomial():
    field = binary_field(64)
    assert field.multiply(1 << 63, 2) == 0x1B
    assert int(field.multiply_array(np.uint64(1 << 63), np.uint64(2))) == 0x1B


def test_unsupported_field_width():
    with pytest.raises(UsageError):
        binary_field(17)


@given(a=U64S, b=U64S)
def test_full_field_scalar_and_vector_agree(a, b):
    field = binary_field(64)
    assert int(field.multiply_array(np.uint64(a), np.uint64(b))) == field.multiply(a, b)


@given(a=U64S, b=U64S, c=U64S)
def test_full_field_distributes(a, b, c):
    field = binary_field(64)
    assert field.multiply(a, b ^ c) == field.multiply(a, b) ^ field.multiply(a, c)
    assert field.multiply(field.multiply(a, b), c) == field.multiply(a, field.multiply(b, c))


@settings(max_examples=50)
@given(m=SMALL_FIELDS, data=st.data())
def test_every_nonzero_element_has_an_inverse(m, data):
    field = binary_field(m)
    a = data.draw(st.integers(min_value=1, max_value=field.mask))
    products = field.multiply_array(np.uint64(a), np.arange(field.size, dtype=np.uint64))
    assert np.unique(products).size == field.size


# =============================================================================
# Hash Family
# =============================================================================

@settings(max_examples=200)
@given(h=polyhashes(), data=st.data())
def test_scalar_and_vector_evaluation_agree(h, data):
    xs = data.draw(st.lists(st.integers(min_value=0, max_value=(1 << h.field_bits) - 1), min_size=1, max_size=20))
    vector = h.evaluate_many(np.array(xs, dtype=np.uint64))
    assert [int(v) for v in vector] == [h.evaluate(x) for x in xs]


@given(c=st.lists(U64S, min_size=4, max_size=4), xs=st.lists(st.integers(0, 2 ** 30 - 1), min_size=1, max_size=10))
def test_full_field_evaluation_agrees(c, xs):
    h = PolyHash(*c)
    assert [int(v) for v in h.evaluate_many(np.array(xs, dtype=np.uint64))] == [h.evaluate(x) for x in xs]


def test_constant_polynomial():
    h = PolyHash(0, 0, 0, 0xABC)
    assert h.evaluate_many(np.arange(5, dtype=np.uint64)).tolist() == [0xABC] * 5


def test_coefficient_outside_field():
    with pytest.raises(UsageError):
        PolyHash(16, 0, 0, 0, field_bits=4)


def test_coefficient_dict_is_zero_padded_hex():
    h = PolyHash(1, 2, 3, 0xFFFFFFFFFFFFFFFF)
    assert h.to_dict() == {
        "c3": "0000000000000001",
        "c2": "0000000000000002",
        "c1": "0000000000000003",
        "c0": "ffffffffffffffff",
    }
    assert PolyHash.from_dict(h.to_dict()) == h


@settings(max_examples=100)
@given(h=polyhashes(), t=st.integers(min_value=0, max_value=2), x=st.integers(min_value=0, max_value=3))
def test_sign_and_slice_views(h, t, x):
    sign = SignHash(h)
    slicer = SliceHash(h, t)
    value = h.evaluate(x)
    assert sign(np.array([x]))[0] == (1 if value % 2 == 0 else -1) == eval_sign(sign, x)
    assert slicer(np.array([x]))[0] == value % (1 << t) == eval_slice(slicer, x)


def test_slice_bits_limited_by_field():
    h = PolyHash(0, 0, 0, 0, field_bits=4)
    with pytest.raises(UsageError):
        SliceHash(h, 5)
    assert SliceHash(h, 0)(np.arange(4)).tolist() == [0, 0, 0, 0]


def test_sampling_is_seed_deterministic():
    a = sample_polyhash(np.random.default_rng(9))
    b = sample_polyhash(np.random.default_rng(9))
    assert a == b
    rows = sample_coefficients(np.random.default_rng(9), 3, field_bits=8)
    assert rows.shape == (3, 4)
    assert int(rows.max()) <= 0xFF


def test_batch_evaluation_matches_rows():
    rng = np.random.default_rng(4)
    rows = sample_coefficients(rng, 6)
    points = np.array([0, 1, 2, 77, 2 ** 20 + 3], dtype=np.uint64)
    batch = evaluate_batch(rows, points)
    assert batch.shape == (6, 5)
    for r, row in enumerate(rows):
        h = PolyHash(*(int(c) for c in row))
        assert np.array_equal(batch[r], h.evaluate_many(points))


def test_hand_computed_evaluations():
    # x^3 + x^2 + x + 1 at x = 2 has no reduction in any field of width >= 4
    for m in (4, 8, 64):
        assert PolyHash(1, 1, 1, 1, field_bits=m).evaluate(2) == 0xF
    assert PolyHash(0, 0, 0x57, 0x01, field_bits=8).evaluate(0x83) == 0xC0
    assert PolyHash(1, 0, 0, 0).evaluate(1 << 21) == 1 << 63
    # x^66 = x^2 * (x^4 + x^3 + x + 1)
    assert PolyHash(1, 0, 0, 0).evaluate(1 << 22) == 0x6C
    assert int(PolyHash(1, 0, 0, 0).evaluate_many(np.array([1 << 22], dtype=np.uint64))[0]) == 0x6C


def test_hand_computed_views():
    h = PolyHash(1, 1, 1, 1)
    assert eval_sign(SignHash(h), 2) == -1
    assert eval_slice(SliceHash(h, 2), 2) == 3
    assert SliceHash(h, 3)(np.array([0, 2], dtype=np.uint64)).tolist() == [1, 7]
    assert SignHash(PolyHash(0, 0, 1, 0))(np.arange(4, dtype=np.uint64)).tolist() == [1, -1, 1, -1]


def test_sampled_coefficients_follow_the_generator_stream():
    for seed in (0, 1, 2 ** 63):
        h = sample_polyhash(np.random.default_rng(seed))
        draws = np.random.default_rng(seed).integers(0, 2 ** 64 - 1, size=4, dtype=np.uint64, endpoint=True)
        assert h.coefficients == tuple(int(c) for c in draws)
        assert h.evaluate(0) == h.c0
        assert eval_sign(SignHash(h), 0) == 1 - 2 * (h.c0 & 1)


def test_slice_histogram_is_flat_on_average():
    # each slice count has variance 2^16 * (1/16) * (15/16) over the family
    rows = sample_coefficients(np.random.default_rng(0), 64)
    slices = evaluate_batch(rows, np.arange(1 << 16, dtype=np.uint64)) & np.uint64(15)
    counts = np.stack([np.bincount(row.astype(np.int64), minlength=16) for row in slices])
    sigma = np.sqrt((1 << 16) * (1 / 16) * (15 / 16)) / np.sqrt(len(rows))
    assert counts.sum(axis=1).tolist() == [1 << 16] * len(rows)
    assert np.all(np.abs(counts.mean(axis=0) - 4096) <= 6 * sigma)


# =============================================================================
# Exhaustive Family Checks
# =============================================================================

def test_family_row_order():
    outputs = enumerate_family(2, [0, 1])
    # row r = (c3, c2, c1, c0) digits; at x = 0 only c0 survives
    assert outputs[:, 0].tolist() == [r & 0b11 for r in range(256)]
    h = PolyHash(1, 2, 3, 1, field_bits=2)
    row = (1 << 6) | (2 << 4) | (3 << 2) | 1
    assert int(outputs[row, 1]) == h.evaluate(1)


def test_four_points_jointly_uniform():
    report = kwise_uniformity_report(4, [0, 1, 7, 15])
    assert report.family_size == 1 << 16
    assert report.outcome_count == 1 << 16
    assert report.uniform
    assert report.min_count == report.max_count == 1


def test_three_points_each_outcome_sixteen_times():
    report = kwise_uniformity_report(4, [2, 3, 9])
    assert report.uniform
    assert report.min_count == 16


def test_single_point_marginal():
    report = kwise_uniformity_report(4, [5])
    assert report.uniform
    assert report.min_count == 16 ** 3
    assert report.to_dict()["outcome_count"] == 16


def test_five_points_not_uniform():
    report = kwise_uniformity_report(4, [0, 1, 2, 3, 4])
    assert not report.uniform
    assert report.family_size < report.outcome_count


@pytest.mark.parametrize(
    "points,degree",
    [([], 4), ([1, 1], 4), ([1, 2], 5)],
)
def test_kwise_report_rejects(points, degree):
    with pytest.raises(UsageError):
        kwise_uniformity_report(4, points, degree=degree)


def test_family_too_large_to_enumerate():
    with pytest.raises(UsageError):
        enumerate_family(8, [1])


def test_sign_balance_and_pairwise_products():
    outputs = enumerate_family(4, [3, 6, 11])
    signs = 1 - 2 * (outputs & np.uint64(1)).astype(np.int64)
    assert signs.sum(axis=0).tolist() == [0, 0, 0]
    assert int((signs[:, 0] * signs[:, 1]).sum()) == 0
    assert int((signs[:, 0] * signs[:, 1] * signs[:, 2]).sum()) == 0


# =============================================================================
# Seeds
# =============================================================================

def test_splitmix_reference_output():
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_derive_seed_is_a_pure_function():
    assert derive_seed(7, 3) == derive_seed(7, 3)
    assert derive_seed(7) == 7
    assert len({derive_seed(7, i) for i in range(1000)}) == 1000
    assert derive_seed(7, 1, 2) != derive_seed(7, 2, 1)


@given(root=U64S, counter=st.integers(min_value=0, max_value=2 ** 42))
def test_derived_seeds_fit_in_64_bits(root, counter):
    assert 0 <= derive_seed(root, counter) < 2 ** 64
