"""First-order Reed-Muller codes and Hamming-space helpers.

Bit vectors are plain ``numpy`` arrays of ``uint8`` holding 0/1. Vectors that
may carry erasures ("ternary" vectors) use ``int8`` with :data:`ERASED` marking
an unknown symbol at a known position.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

ERASED = -1
MAX_EXHAUSTIVE_M = 8


class CodeParameterError(ValueError):
    """Raised on length or parameter mismatches."""


class ExhaustiveBoundError(CodeParameterError):
    """Raised when a code is too large to enumerate exhaustively."""


class NoOverlapError(ValueError):
    """Raised when two masks share no reliable position."""


def as_bits(x, length: int | None = None, name: str = "bits") -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise CodeParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise CodeParameterError(f"{name} must contain only 0/1")
    if length is not None and arr.size != length:
        raise CodeParameterError(f"{name} has length {arr.size}, expected {length}")
    return arr.astype(np.uint8, copy=False)


def as_ternary(x, length: int | None = None, name: str = "received") -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise CodeParameterError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1, ERASED)).all():
        raise CodeParameterError(f"{name} must contain only 0, 1 or ERASED")
    if length is not None and arr.size != length:
        raise CodeParameterError(f"{name} has length {arr.size}, expected {length}")
    return arr.astype(np.int8, copy=False)


def erase(bits, erasure_mask) -> np.ndarray:
    """Return a ternary copy of ``bits`` with positions where ``erasure_mask`` is 1 erased."""
    out = as_bits(bits).astype(np.int8)
    out[as_bits(erasure_mask, out.size, "erasure_mask").astype(bool)] = ERASED
    return out


def hamming_weight(x) -> int:
    return int(np.count_nonzero(x))


def hamming_distance(x, y) -> int:
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape:
        raise CodeParameterError(f"length mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


@dataclass(frozen=True)
class ReedMullerCode:
    """The binary first-order Reed-Muller code RM(1, m), a [2^m, m+1, 2^(m-1)] code.

    Coordinate ``p`` is the evaluation point whose i-th variable (1-based) is
    bit ``i-1`` of ``p``, so ``x1`` is the least significant index bit.
    """

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise CodeParameterError(f"RM(1, m) needs an integer m >= 1, got {self.m!r}")

    @property
    def length(self) -> int:
        return 1 << self.m

    @property
    def dimension(self) -> int:
        return self.m + 1

    @property
    def min_distance(self) -> int:
        return 1 << (self.m - 1)

    @cached_property
    def generator(self) -> np.ndarray:
        points = np.arange(self.length)
        rows = [np.ones(self.length, dtype=np.uint8)]
        rows += [((points >> i) & 1).astype(np.uint8) for i in range(self.m)]
        return np.array(rows, dtype=np.uint8)

    @cached_property
    def codeword_table(self) -> np.ndarray:
        """All 2^(m+1) codewords, row ``i`` encoding the message whose bit ``j`` is ``a_j``."""
        if self.m > MAX_EXHAUSTIVE_M:
            raise ExhaustiveBoundError(
                f"RM(1,{self.m}) exceeds the exhaustive bound m <= {MAX_EXHAUSTIVE_M}"
            )
        k = self.dimension
        messages = (np.arange(1 << k)[:, None] >> np.arange(k)) & 1
        table = (messages @ self.generator) & 1
        table = table.astype(np.uint8)
        table.setflags(write=False)
        return table

    def __repr__(self) -> str:
        return f"RM(1,{self.m})"


def rm_encode(code: ReedMullerCode, message) -> np.ndarray:
    msg = as_bits(message, code.dimension, "message")
    return ((msg.astype(np.int64) @ code.generator) & 1).astype(np.uint8)


def enumerate_codewords(code: ReedMullerCode) -> list[np.ndarray]:
    return list(code.codeword_table)


def masked_relative_distance(i1, i2, m1, m2) -> Fraction:
    """Fraction of jointly reliable bits on which two iris codes disagree.

    Mask bit 1 means reliable. Raises :class:`NoOverlapError` when the masks
    share no reliable bit.
    """
    i1 = as_bits(i1, name="i1")
    n = i1.size
    i2, m1, m2 = as_bits(i2, n, "i2"), as_bits(m1, n, "m1"), as_bits(m2, n, "m2")
    joint = m1 & m2
    support = int(joint.sum())
    if support == 0:
        raise NoOverlapError("masks have no common reliable bit")
    return Fraction(int(((i1 ^ i2) & joint).sum()), support)


def rotation_order(shifts: Iterable[int]) -> list[int]:
    """Shifts sorted by magnitude, negative before positive on equal magnitude."""
    return sorted(set(int(s) for s in shifts), key=lambda s: (abs(s), s > 0))


def rotated_best_distance(i1, m1, i2, m2, rotation_set: Sequence[int]) -> tuple[Fraction, int]:
    """Lowest masked distance over cyclic rotations of the second template.

    Both ``i2`` and ``m2`` are rotated with ``numpy.roll`` by each shift. Ties go
    to the smallest shift magnitude, then to the negative shift.
    """
    if len(rotation_set) == 0:
        raise CodeParameterError("rotation_set is empty")
    i2, m2 = as_bits(i2, name="i2"), as_bits(m2, name="m2")
    best: tuple[Fraction, int] | None = None
    for shift in rotation_order(rotation_set):
        try:
            score = masked_relative_distance(i1, np.roll(i2, shift), m1, np.roll(m2, shift))
        except NoOverlapError:
            continue
        if best is None or score < best[0]:
            best = (score, shift)
    if best is None:
        raise NoOverlapError("no rotation leaves a common reliable bit")
    return best


def ml_decode_oracle(codeword_table, received) -> tuple[np.ndarray, bool]:
    """Brute-force nearest codeword on the non-erased positions.

    Returns the first minimizer in table order and whether the minimum is
    shared by two or more codewords.
    """
    table = np.asarray(codeword_table)
    if table.ndim != 2 or table.shape[0] == 0:
        raise CodeParameterError("codeword table must be a nonempty 2-D array")
    r = as_ternary(received, table.shape[1])
    known = r != ERASED
    dist = (table[:, known] != r[known]).sum(axis=1)
    best = dist.min()
    winners = np.flatnonzero(dist == best)
    return table[winners[0]].astype(np.uint8), bool(winners.size > 1)
