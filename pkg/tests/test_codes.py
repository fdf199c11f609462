import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzysketch.codes import (
    ERASED,
    CodeParameterError,
    ExhaustiveBoundError,
    NoOverlapError,
    ReedMullerCode,
    enumerate_codewords,
    hamming_distance,
    masked_relative_distance,
    ml_decode_oracle,
    rm_encode,
    rotated_best_distance,
)


def truth_table(m, message):
    """Evaluate a0 + a1 x1 + ... + am xm at every point, x1 the least significant index bit."""
    out = []
    for point in itertools.product((0, 1), repeat=m):
        xs = point[::-1]  # product() varies the last entry fastest; make x1 fastest
        out.append((message[0] + sum(a * x for a, x in zip(message[1:], xs))) % 2)
    return out


@pytest.mark.parametrize(
    "m, message, expected",
    [
        (1, (0, 0), (0, 0)),
        (1, (1, 0), (1, 1)),
        (2, (0, 1, 0), (0, 1, 0, 1)),
    ],
)
def test_rm_encode_examples(m, message, expected):
    assert tuple(rm_encode(ReedMullerCode(m), message)) == expected
    assert list(expected) == truth_table(m, message)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_rm_encode_matches_truth_table(m):
    for message in itertools.product((0, 1), repeat=m + 1):
        assert list(rm_encode(ReedMullerCode(m), message)) == truth_table(m, message)


def test_rm_encode_length_mismatch():
    with pytest.raises(CodeParameterError):
        rm_encode(ReedMullerCode(3), [0, 1])


@given(st.integers(1, 6), st.data())
def test_rm_encode_linear(m, data):
    code = ReedMullerCode(m)
    u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=m + 1, max_size=m + 1)), dtype=np.uint8)
    v = np.array(data.draw(st.lists(st.integers(0, 1), min_size=m + 1, max_size=m + 1)), dtype=np.uint8)
    assert np.array_equal(rm_encode(code, u ^ v), rm_encode(code, u) ^ rm_encode(code, v))


def test_enumerate_m1_order():
    words = [tuple(w) for w in enumerate_codewords(ReedMullerCode(1))]
    assert words == [(0, 0), (1, 1), (0, 1), (1, 0)]


def test_enumerate_m2_weights():
    words = enumerate_codewords(ReedMullerCode(2))
    assert len(words) == 8
    assert sorted(int(w.sum()) for w in words) == [0, 2, 2, 2, 2, 2, 2, 4]


@pytest.mark.parametrize("m", range(1, 7))
def test_codeword_table_structure(m):
    code = ReedMullerCode(m)
    table = code.codeword_table
    assert table.shape == (2 ** (m + 1), 2**m)
    assert len({w.tobytes() for w in table}) == 2 ** (m + 1)
    assert not table[0].any()
    weights = table.sum(axis=1)
    nontrivial = (weights != 0) & (weights != 2**m)
    assert (weights[nontrivial] == 2 ** (m - 1)).all()
    # closed under XOR
    rows = {w.tobytes() for w in table}
    for a in table[:: max(1, len(table) // 16)]:
        for b in table:
            assert (a ^ b).tobytes() in rows


@pytest.mark.parametrize("m", range(1, 7))
def test_minimum_distance_exhaustive(m):
    t = ReedMullerCode(m).codeword_table.astype(np.int64)
    d = t @ (1 - t).T + (1 - t) @ t.T
    np.fill_diagonal(d, 10**6)
    assert d.min() == 2 ** (m - 1) == ReedMullerCode(m).min_distance


def test_exhaustive_bound():
    assert ReedMullerCode(8).codeword_table.shape == (512, 256)
    with pytest.raises(ExhaustiveBoundError):
        enumerate_codewords(ReedMullerCode(9))


def test_masked_distance_examples():
    z4, f4 = [0, 0, 0, 0], [1, 1, 1, 1]
    assert masked_relative_distance(z4, [0, 1, 0, 1], f4, [1, 1, 1, 0]) == Fraction(1, 3)
    assert masked_relative_distance([1, 0, 1, 1], [1, 0, 1, 1], [1, 0, 1, 0], [0, 0, 1, 1]) == 0
    assert masked_relative_distance(z4, f4, f4, f4) == 1


def test_masked_distance_no_overlap():
    with pytest.raises(NoOverlapError):
        masked_relative_distance([0, 1], [1, 1], [1, 0], [0, 1])


@given(st.data())
def test_masked_distance_symmetric(data):
    n = data.draw(st.integers(1, 64))
    vec = st.lists(st.integers(0, 1), min_size=n, max_size=n)
    i1, i2, m1, m2 = (np.array(data.draw(vec), dtype=np.uint8) for _ in range(4))
    if not (m1 & m2).any():
        return
    assert masked_relative_distance(i1, i2, m1, m2) == masked_relative_distance(i2, i1, m2, m1)


def test_rotated_best_distance(rng):
    i1 = rng.integers(0, 2, 64, dtype=np.uint8)
    m1 = rng.integers(0, 2, 64, dtype=np.uint8) | 1
    i2 = rng.integers(0, 2, 64, dtype=np.uint8)
    m2 = np.ones(64, dtype=np.uint8)
    assert rotated_best_distance(i1, m1, i2, m2, [0]) == (masked_relative_distance(i1, i2, m1, m2), 0)

    full = np.ones(64, dtype=np.uint8)
    shifted = np.roll(i1, 2)
    assert rotated_best_distance(i1, full, shifted, full, [-2, 0, 2]) == (0, -2)

    score, _ = rotated_best_distance(i1, m1, i2, m2, range(-6, 7))
    assert score <= masked_relative_distance(i1, i2, m1, m2)


def test_rotated_tie_prefers_small_then_negative():
    # a period-2 pattern: every even shift gives distance 0
    i = np.array([0, 1] * 8, dtype=np.uint8)
    full = np.ones(16, dtype=np.uint8)
    assert rotated_best_distance(i, full, i, full, [4, -4, 2, -2]) == (0, -2)
    assert rotated_best_distance(i, full, i, full, [4, 0, -2]) == (0, 0)


def test_rotated_all_empty_overlap():
    with pytest.raises(NoOverlapError):
        rotated_best_distance([0, 0], [1, 0], [0, 0], [0, 0], [0, 1])


def test_ml_oracle_examples():
    table = ReedMullerCode(2).codeword_table
    c = table[5]
    assert ml_decode_oracle(table, c)[0].tolist() == c.tolist()
    assert ml_decode_oracle(table, c)[1] is False
    assert ml_decode_oracle(table, [ERASED] * 4)[1] is True

    # brute force over every even-weight word of length 4 (that is RM(1,2))
    received = (1, 1, 1, ERASED)
    code = [w for w in itertools.product((0, 1), repeat=4) if sum(w) % 2 == 0]
    dist = {w: sum(a != b for a, b in zip(w[:3], received[:3])) for w in code}
    best = min(dist.values())
    winners = [w for w, d in dist.items() if d == best]
    assert winners == [(1, 1, 1, 1)]
    word, ambiguous = ml_decode_oracle(table, received)
    assert tuple(word) == (1, 1, 1, 1) and not ambiguous


@pytest.mark.parametrize("m", [2, 3, 4])
def test_ml_oracle_recovers_with_few_erasures(m, rng):
    code = ReedMullerCode(m)
    table = code.codeword_table
    for _ in range(50):
        c = table[rng.integers(len(table))]
        received = c.astype(np.int8)
        received[rng.choice(code.length, code.min_distance - 1, replace=False)] = ERASED
        word, ambiguous = ml_decode_oracle(table, received)
        assert not ambiguous and hamming_distance(word, c) == 0
