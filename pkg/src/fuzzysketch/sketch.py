"""Fuzzy sketch enrollment and verification over a product code.

Enrollment binds a random product codeword ``c`` to an iris template ``b`` by
storing ``z = c XOR pi(b)``, where ``pi`` is a seeded interleaver moving
template bits into code coordinates. Verification forms ``z XOR pi(b')``, marks
unreliable positions as erasures, decodes with min-sum and accepts when the
decoded word hashes to the stored digest.

Randomness comes from ``numpy.random.default_rng`` (PCG64 seeded through
``SeedSequence``), so every result is reproducible from the integer seeds.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .codes import ERASED, CodeParameterError, as_bits, rotation_order
from .minsum import DEFAULT_MAX_ITERATIONS, DecodeStatus, ProductCode, min_sum_decode, product_encode

MAGIC = b"FSKT"
FORMAT_VERSION = 1
DEFAULT_DIGEST_ID = 1
DEFAULT_ROTATIONS = tuple(range(-8, 9, 2))

# id -> (hashlib name, digest length in bytes)
DIGEST_ALGORITHMS = {
    1: ("sha256", 32),
    2: ("sha512", 64),
    3: ("blake2b", 32),
}

_HEADER = struct.Struct(">4sBBBBQ")


class SketchFormatError(ValueError):
    """Malformed or inconsistent serialized sketch."""


class UnknownDigestError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Template:
    """Iris code and its reliability mask (1 = reliable bit)."""

    code: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        code = as_bits(self.code, name="code")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "mask", as_bits(self.mask, code.size, "mask"))

    @classmethod
    def full_mask(cls, code) -> "Template":
        code = as_bits(code, name="code")
        return cls(code, np.ones(code.size, dtype=np.uint8))

    @property
    def length(self) -> int:
        return self.code.size

    @property
    def erasure_count(self) -> int:
        return int(self.length - self.mask.sum())

    def rotated(self, shift: int) -> "Template":
        return Template(np.roll(self.code, shift), np.roll(self.mask, shift))

    def __eq__(self, other):
        if not isinstance(other, Template):
            return NotImplemented
        return np.array_equal(self.code, other.code) and np.array_equal(self.mask, other.mask)


@dataclass(frozen=True, eq=False)
class Interleaver:
    """Bit permutation between template positions and code coordinates.

    ``forward(x)[k] == x[permutation[k]]``. The permutation for a seed is
    ``numpy.random.default_rng(seed).permutation(n)``. ``seed=None`` is the
    identity, used as a baseline.
    """

    seed: int | None
    permutation: np.ndarray = field(repr=False)

    @classmethod
    def from_seed(cls, seed: int | None, n: int) -> "Interleaver":
        if seed is None:
            return cls(None, np.arange(n))
        return cls(int(seed), np.random.default_rng(int(seed)).permutation(n))

    @classmethod
    def identity(cls, n: int) -> "Interleaver":
        return cls.from_seed(None, n)

    def forward(self, x) -> np.ndarray:
        return np.asarray(x)[self.permutation]

    def inverse(self, y) -> np.ndarray:
        y = np.asarray(y)
        out = np.empty_like(y)
        out[self.permutation] = y
        return out


@dataclass(frozen=True, eq=False)
class Sketch:
    z: np.ndarray
    enrollment_mask: np.ndarray
    interleaver_seed: int | None
    code_params: tuple[int, int]
    check_digest: bytes
    digest_algorithm_id: int = DEFAULT_DIGEST_ID

    def __post_init__(self):
        m1, m2 = self.code_params
        n = (1 << m1) * (1 << m2)
        object.__setattr__(self, "z", as_bits(self.z, n, "z"))
        object.__setattr__(self, "enrollment_mask", as_bits(self.enrollment_mask, n, "enrollment_mask"))
        if len(self.check_digest) != digest_length(self.digest_algorithm_id):
            raise SketchFormatError("digest length does not match its algorithm id")

    @property
    def length(self) -> int:
        return self.z.size

    def to_bytes(self) -> bytes:
        if self.interleaver_seed is None:
            raise SketchFormatError("identity-interleaver sketches have no serialized form")
        m1, m2 = self.code_params
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, self.digest_algorithm_id, m1, m2, self.interleaver_seed)
        return header + np.packbits(self.z).tobytes() + np.packbits(self.enrollment_mask).tobytes() + self.check_digest

    @classmethod
    def from_bytes(cls, data: bytes) -> "Sketch":
        if len(data) < _HEADER.size:
            raise SketchFormatError("truncated sketch header")
        magic, version, alg, m1, m2, seed = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise SketchFormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise SketchFormatError(f"unsupported sketch version {version}")
        try:
            dlen = digest_length(alg)
        except UnknownDigestError as exc:
            raise SketchFormatError(str(exc)) from None
        if not (1 <= m1 <= 8 and 1 <= m2 <= 8):
            raise SketchFormatError(f"bad code parameters ({m1}, {m2})")
        n = (1 << m1) * (1 << m2)
        nbytes = n // 8
        expected = _HEADER.size + 2 * nbytes + dlen
        if len(data) != expected:
            raise SketchFormatError(f"sketch is {len(data)} bytes, expected {expected}")
        body = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size)
        z = np.unpackbits(body[:nbytes])
        mask = np.unpackbits(body[nbytes : 2 * nbytes])
        return cls(z, mask, seed, (m1, m2), bytes(body[2 * nbytes :]), alg)


def digest_length(algorithm_id: int) -> int:
    if algorithm_id not in DIGEST_ALGORITHMS:
        raise UnknownDigestError(f"unknown digest algorithm id {algorithm_id}")
    return DIGEST_ALGORITHMS[algorithm_id][1]


def digest(word, algorithm_id: int = DEFAULT_DIGEST_ID) -> bytes:
    """Hash of the codeword bits packed MSB-first."""
    name, size = DIGEST_ALGORITHMS.get(algorithm_id, (None, 0))
    if name is None:
        raise UnknownDigestError(f"unknown digest algorithm id {algorithm_id}")
    data = np.packbits(as_bits(word, name="word")).tobytes()
    if name == "blake2b":
        return hashlib.blake2b(data, digest_size=size).digest()
    return hashlib.new(name, data).digest()


def enroll(
    template: Template,
    pc: ProductCode,
    randomness_seed: int,
    *,
    digest_algorithm_id: int = DEFAULT_DIGEST_ID,
    interleave: bool = True,
) -> Sketch:
    if template.length != pc.length:
        raise CodeParameterError(f"template has {template.length} bits, code length is {pc.length}")
    rng = np.random.default_rng(randomness_seed)
    message = rng.integers(0, 2, size=pc.dimension, dtype=np.uint8)
    seed = int(rng.integers(0, 1 << 64, dtype=np.uint64)) if interleave else None
    c = product_encode(pc, message)
    pi = Interleaver.from_seed(seed, pc.length)
    z = c ^ pi.forward(template.code)
    return Sketch(z, template.mask.copy(), seed, pc.params, digest(c, digest_algorithm_id), digest_algorithm_id)


@dataclass(frozen=True)
class VerifyResult:
    accepted: bool
    rotation: int | None  # set only on acceptance
    iterations: int  # of the accepting decode, or of the last attempt
    status: DecodeStatus
    attempts: int


def received_word(sketch: Sketch, probe: Template, pi: Interleaver) -> np.ndarray:
    """Ternary word ``z XOR pi(b')`` with erasures where either mask is unreliable."""
    word = (sketch.z ^ pi.forward(probe.code)).astype(np.int8)
    unreliable = pi.forward((sketch.enrollment_mask & probe.mask) == 0)
    word[unreliable] = ERASED
    return word


def verify(
    sketch: Sketch,
    probe: Template,
    pc: ProductCode,
    rotation_set: Sequence[int] = DEFAULT_ROTATIONS,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> VerifyResult:
    """Try each rotation of the probe, smallest magnitude first, until one decodes to the enrolled codeword."""
    if probe.length != sketch.length or sketch.code_params != pc.params:
        raise CodeParameterError("probe, sketch and code disagree on length or parameters")
    pi = Interleaver.from_seed(sketch.interleaver_seed, sketch.length)
    result = VerifyResult(False, None, 0, DecodeStatus.MAX_ITERATIONS, 0)
    for attempt, shift in enumerate(rotation_order(rotation_set), start=1):
        decoded = min_sum_decode(received_word(sketch, probe.rotated(shift), pi), pc, max_iterations)
        accepted = decoded.ok and digest(decoded.word, sketch.digest_algorithm_id) == sketch.check_digest
        result = VerifyResult(accepted, shift if accepted else None, decoded.iterations_used, decoded.status, attempt)
        if accepted:
            break
    return result
