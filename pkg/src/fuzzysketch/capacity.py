"""Capacity limits for error-and-erasure decoding at a given code dimension.

For a code of length ``N`` and dimension ``k``, a comparison with ``w_n``
errors and ``w_e`` erasures leaves a punctured code of rate
``R' = k / (N - w_e)``. No code and no decoder recovers the codeword with
non-vanishing probability when ``w_n / (N - w_e)`` exceeds
``theta = h^-1(1 - R')``, with ``h`` the binary entropy. Counting the
comparisons above the threshold gives the lowest reachable false-reject rate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

BISECTION_STEPS = 64


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSample:
    w_n: int
    w_e: int
    N: int

    def __post_init__(self):
        if min(self.w_n, self.w_e) < 0 or self.N <= 0:
            raise CapacityError(f"invalid sample {self}")
        if self.w_e > self.N or self.w_n > self.N - self.w_e:
            raise CapacityError(f"inconsistent sample {self}: need w_e <= N and w_n <= N - w_e")

    @property
    def error_fraction(self) -> float:
        return self.w_n / (self.N - self.w_e)


@dataclass(frozen=True)
class CapacityQuery:
    N: int
    k: int

    def __post_init__(self):
        if not 0 < self.k <= self.N:
            raise CapacityError(f"need 0 < k <= N, got k={self.k}, N={self.N}")


class Threshold(NamedTuple):
    value: float
    rate_saturated: bool


class Verdict(enum.Enum):
    DECODABLE = "decodable"
    NOT_DECODABLE = "not_decodable"
    DEGENERATE = "degenerate"  # every position erased


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise CapacityError(f"entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def entropy_inverse(y: float) -> float:
    """The x in [0, 1/2] with h(x) = y, by bisection."""
    if not 0.0 <= y <= 1.0:
        raise CapacityError(f"entropy value {y} outside [0, 1]")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def theta(q: CapacityQuery, w_e: int) -> Threshold:
    """Error-fraction threshold on the non-erased positions.

    When ``k`` exceeds the number of non-erased positions the punctured rate is
    above 1; the threshold is then 0 and flagged as rate-saturated.
    """
    if not 0 <= w_e <= q.N:
        raise CapacityError(f"erasure count {w_e} outside [0, {q.N}]")
    remaining = q.N - w_e
    if q.k > remaining:
        return Threshold(0.0, True)
    return Threshold(entropy_inverse(1.0 - q.k / remaining), False)


def decodability(s: ChannelSample, q: CapacityQuery) -> Verdict:
    if s.N != q.N:
        raise CapacityError(f"sample length {s.N} differs from query length {q.N}")
    if s.w_e == s.N:
        return Verdict.DEGENERATE
    limit = theta(q, s.w_e).value
    return Verdict.DECODABLE if s.error_fraction <= limit else Verdict.NOT_DECODABLE


def is_decodable_in_principle(s: ChannelSample, q: CapacityQuery) -> bool:
    return decodability(s, q) is Verdict.DECODABLE


def best_theoretical_frr(samples: Sequence[ChannelSample], q: CapacityQuery) -> Fraction:
    if not samples:
        raise CapacityError("empty sample list")
    failures = sum(not is_decodable_in_principle(s, q) for s in samples)
    return Fraction(failures, len(samples))


def hamming_sphere_volume(M: int, radius: int) -> int:
    """Exact number of words within Hamming distance ``radius`` in {0,1}^M."""
    return sum(math.comb(M, i) for i in range(0, min(radius, M) + 1))


def read_samples(path: str | Path) -> tuple[int, list[ChannelSample]]:
    """Parse a sample file: ``N=<int>`` header, then ``w_n,w_e`` per line."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith("N="):
        raise CapacityError(f"{path}: missing 'N=<int>' header")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise CapacityError(f"{path}: bad header {lines[0]!r}") from None
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            w_n, w_e = line.split(",")
            samples.append(ChannelSample(int(w_n), int(w_e), n))
        except ValueError as exc:
            raise CapacityError(f"{path}:{lineno}: {exc}") from None
    return n, samples


def format_samples(n: int, samples: Iterable[ChannelSample]) -> str:
    return "".join([f"N={n}\n"] + [f"{s.w_n},{s.w_e}\n" for s in samples])


def write_samples(path: str | Path, n: int, samples: Iterable[ChannelSample]) -> None:
    Path(path).write_text(format_samples(n, samples), encoding="ascii", newline="\n")
