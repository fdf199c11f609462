import numpy as np
import pytest

from fuzzysketch.channel import random_template
from fuzzysketch.codes import CodeParameterError
from fuzzysketch.minsum import ProductCode, is_product_codeword, min_sum_decode
from fuzzysketch.sketch import (
    DIGEST_ALGORITHMS,
    Interleaver,
    Sketch,
    SketchFormatError,
    Template,
    UnknownDigestError,
    digest,
    enroll,
    received_word,
    verify,
)


@pytest.fixture
def template(rng):
    return random_template(2048, rng)


def test_round_trip_accepts_at_zero(pc_full, template):
    for seed in range(5):
        result = verify(enroll(template, pc_full, seed), template, pc_full)
        assert result.accepted and result.rotation == 0 and result.iterations == 0


def test_round_trip_with_masks(pc_full, rng):
    t = Template(rng.integers(0, 2, 2048, dtype=np.uint8), (rng.random(2048) < 0.7).astype(np.uint8))
    assert verify(enroll(t, pc_full, 1), t, pc_full).accepted


def test_z_binds_a_codeword(pc_full, template):
    for seed in range(5):
        s = enroll(template, pc_full, seed)
        pi = Interleaver.from_seed(s.interleaver_seed, 2048)
        c = s.z ^ pi.forward(template.code)
        assert is_product_codeword(pc_full, c)
        assert digest(c) == s.check_digest


def test_enrollments_differ(pc_full, template):
    zs = {enroll(template, pc_full, seed).z.tobytes() for seed in range(50)}
    assert len(zs) == 50


def test_enroll_deterministic(pc_full, template):
    a, b = enroll(template, pc_full, 42), enroll(template, pc_full, 42)
    assert a.to_bytes() == b.to_bytes()


def test_enroll_length_mismatch(pc_full):
    with pytest.raises(CodeParameterError):
        enroll(Template.full_mask(np.zeros(64, dtype=np.uint8)), pc_full, 0)


def test_z_bits_unbiased(pc_full, template):
    trials = 4000
    total = np.zeros(2048)
    for seed in range(trials):
        total += enroll(template, pc_full, seed).z
    sigma = np.sqrt(0.25 / trials)
    assert np.abs(total / trials - 0.5).max() <= 5 * sigma


def test_accepts_below_half_distance(pc_full, template, rng):
    s = enroll(template, pc_full, 3)
    for _ in range(10):
        code = template.code.copy()
        code[rng.choice(2048, 255, replace=False)] ^= 1
        assert verify(s, Template(code, template.mask), pc_full, (0,)).accepted


def test_rejects_random_probe(pc_full, template, rng):
    s = enroll(template, pc_full, 3)
    for _ in range(5):
        result = verify(s, random_template(2048, rng), pc_full)
        assert not result.accepted and result.rotation is None and result.attempts == 9


def test_rotation_recovered(pc_full, rng):
    t = random_template(2048, rng)
    s = enroll(t, pc_full, 8)
    probe = t.rotated(4)
    result = verify(s, probe, pc_full)
    assert result.accepted and result.rotation == -4


def test_erasures_follow_the_interleaver(rng):
    pc = ProductCode.from_params(2, 2)
    t = Template(rng.integers(0, 2, 16, dtype=np.uint8), np.ones(16, dtype=np.uint8))
    s = enroll(t, pc, 5)
    probe_mask = np.ones(16, dtype=np.uint8)
    probe_mask[3] = 0
    pi = Interleaver.from_seed(s.interleaver_seed, 16)
    word = received_word(s, Template(t.code, probe_mask), pi)
    assert np.flatnonzero(word < 0).tolist() == [int(np.flatnonzero(pi.permutation == 3)[0])]


def test_wrong_codeword_never_accepted(pc_16, rng):
    # heavy noise on a tiny code: the decoder often lands on some codeword, only c passes the digest
    t = random_template(16, rng)
    s = enroll(t, pc_16, 1)
    pi = Interleaver.from_seed(s.interleaver_seed, 16)
    c = s.z ^ pi.forward(t.code)
    wrong = 0
    for _ in range(300):
        probe = random_template(16, rng)
        decoded = min_sum_decode(received_word(s, probe, pi), pc_16)
        accepted = verify(s, probe, pc_16, (0,)).accepted
        if decoded.ok and not np.array_equal(decoded.word, c):
            wrong += 1
            assert not accepted
        else:
            assert accepted == decoded.ok
    assert wrong > 50


def test_interleaver_inverse(rng):
    pi = Interleaver.from_seed(123, 2048)
    x = rng.integers(0, 2, 2048)
    assert np.array_equal(pi.inverse(pi.forward(x)), x)
    assert np.array_equal(pi.forward(pi.inverse(x)), x)
    assert sorted(pi.permutation) == list(range(2048))
    assert np.array_equal(Interleaver.from_seed(123, 2048).permutation, pi.permutation)
    assert np.array_equal(Interleaver.identity(8).forward(np.arange(8)), np.arange(8))


def test_interleaver_spreads_bursts():
    n, burst = 2048, 512
    errors = np.zeros(n, dtype=np.uint8)
    errors[700 : 700 + burst] = 1
    identity_max = errors.reshape(32, 64).sum(axis=1).max()
    better = 0
    for seed in range(1000):
        spread = Interleaver.from_seed(seed, n).forward(errors)
        better += spread.reshape(32, 64).sum(axis=1).max() < identity_max
    assert better >= 990


def test_digest_properties(rng):
    word = rng.integers(0, 2, 2048, dtype=np.uint8)
    for alg, (_, size) in DIGEST_ALGORITHMS.items():
        assert digest(word, alg) == digest(word.copy(), alg)
        assert len(digest(word, alg)) == size
    base = digest(word)
    for pos in rng.integers(0, 2048, 1000):
        other = word.copy()
        other[pos] ^= 1
        assert digest(other) != base
    with pytest.raises(UnknownDigestError):
        digest(word, 99)


def test_sketch_serialization_round_trip(pc_full, template):
    for alg in DIGEST_ALGORITHMS:
        s = enroll(template, pc_full, 11, digest_algorithm_id=alg)
        data = s.to_bytes()
        assert len(data) == 16 + 256 + 256 + DIGEST_ALGORITHMS[alg][1]
        back = Sketch.from_bytes(data)
        assert back.to_bytes() == data
        assert back.interleaver_seed == s.interleaver_seed and back.code_params == (6, 5)


def test_sketch_layout():
    z = np.zeros(32, dtype=np.uint8)
    z[0] = 1
    mask = np.ones(32, dtype=np.uint8)
    s = Sketch(z, mask, 0x0102030405060708, (3, 2), bytes(32), 1)
    data = s.to_bytes()
    assert data[:4] == b"FSKT"
    assert list(data[4:8]) == [1, 1, 3, 2]
    assert data[8:16] == bytes([1, 2, 3, 4, 5, 6, 7, 8])
    assert data[16:20] == bytes([0x80, 0, 0, 0])
    assert data[20:24] == b"\xff" * 4
    assert data[24:] == bytes(32)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: b"XSKT" + d[4:],
        lambda d: d[:4] + b"\x02" + d[5:],
        lambda d: d[:5] + b"\x09" + d[6:],
        lambda d: d[:-1],
        lambda d: d[:10],
    ],
)
def test_sketch_parse_errors(pc_16, mutate, rng):
    s = enroll(random_template(16, rng), pc_16, 0)
    with pytest.raises(SketchFormatError):
        Sketch.from_bytes(mutate(s.to_bytes()))


def test_identity_sketch_not_serializable(pc_16, rng):
    s = enroll(random_template(16, rng), pc_16, 0, interleave=False)
    assert s.interleaver_seed is None
    with pytest.raises(SketchFormatError):
        s.to_bytes()
