"""Product codes and two-dimensional iterative min-sum decoding.

A product codeword is an ``N2 x N1`` matrix whose rows lie in the row code
(length ``N1``) and whose columns lie in the column code (length ``N2``).
Flat vectors use row-major order.

The decoder state is a cost table of shape ``(N2, N1, 2)``: ``costs[i, j, x]``
is the current cost of putting symbol ``x`` at coordinate ``(i, j)``. Costs are
``int64`` and are normalized after every pass so that the smaller of the two is
zero. Because the passes feed total (not extrinsic) costs forward, confident
coordinates grow geometrically, so costs saturate at :data:`COST_CAP`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .codes import ERASED, MAX_EXHAUSTIVE_M, CodeParameterError, ExhaustiveBoundError, ReedMullerCode, as_bits, as_ternary

# Line sums of up to 2**MAX_EXHAUSTIVE_M capped costs stay exact in float64.
COST_CAP = 1 << 44
DEFAULT_MAX_ITERATIONS = 20
MAX_PRODUCT_TABLE_DIMENSION = 20


class DecodeStatus(str, enum.Enum):
    CODEWORD = "Codeword"
    UNDECIDED = "Undecided"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class DecodeResult:
    status: DecodeStatus
    word: np.ndarray  # ternary, flat row-major
    iterations_used: int

    @property
    def ok(self) -> bool:
        return self.status is DecodeStatus.CODEWORD


class _PassTables:
    """Index tables for one component code used by a min-sum pass."""

    def __init__(self, code: ReedMullerCode):
        table = code.codeword_table
        # float64 so that the line sums go through BLAS; all values are exact integers.
        self.table = table.astype(np.float64)
        self.table_t = np.ascontiguousarray(self.table.T)
        self.not_table_t = 1.0 - self.table_t
        # Every coordinate of RM(1, m) is 0 on exactly half of the codewords.
        self.with_zero = np.array([np.flatnonzero(col == 0) for col in table.T])
        self.with_one = np.array([np.flatnonzero(col == 1) for col in table.T])


@dataclass(frozen=True)
class ProductCode:
    row_code: ReedMullerCode
    col_code: ReedMullerCode

    @classmethod
    def from_params(cls, m1: int, m2: int) -> "ProductCode":
        for m in (m1, m2):
            if m > MAX_EXHAUSTIVE_M:
                raise ExhaustiveBoundError(f"component RM(1,{m}) exceeds m <= {MAX_EXHAUSTIVE_M}")
        return cls(ReedMullerCode(m1), ReedMullerCode(m2))

    @property
    def params(self) -> tuple[int, int]:
        return (self.row_code.m, self.col_code.m)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.col_code.length, self.row_code.length)

    @property
    def length(self) -> int:
        return self.row_code.length * self.col_code.length

    @property
    def dimension(self) -> int:
        return self.row_code.dimension * self.col_code.dimension

    @property
    def min_distance(self) -> int:
        return self.row_code.min_distance * self.col_code.min_distance

    @cached_property
    def _row_tables(self) -> _PassTables:
        return _PassTables(self.row_code)

    @cached_property
    def _col_tables(self) -> _PassTables:
        return _PassTables(self.col_code)

    def __repr__(self) -> str:
        return f"{self.row_code!r}x{self.col_code!r}"


def product_encode(pc: ProductCode, message) -> np.ndarray:
    """Encode ``k1*k2`` message bits, read row-major as a ``k2 x k1`` matrix."""
    k1, k2 = pc.row_code.dimension, pc.col_code.dimension
    u = as_bits(message, k1 * k2, "message").reshape(k2, k1).astype(np.int64)
    rows = (u @ pc.row_code.generator) & 1
    grid = (pc.col_code.generator.T.astype(np.int64) @ rows) & 1
    return grid.astype(np.uint8).reshape(-1)


def product_codeword_table(pc: ProductCode) -> np.ndarray:
    """All product codewords, for brute-force checks on small codes."""
    k = pc.dimension
    if k > MAX_PRODUCT_TABLE_DIMENSION:
        raise ExhaustiveBoundError(f"product dimension {k} too large to enumerate")
    messages = ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(np.uint8)
    return np.array([product_encode(pc, u) for u in messages], dtype=np.uint8)


def _rows_in_code(rows: np.ndarray, tables: _PassTables) -> np.ndarray:
    r = rows.astype(np.float64)
    mismatches = r @ tables.not_table_t + (1.0 - r) @ tables.table_t
    return (mismatches == 0).any(axis=1)


def is_product_codeword(pc: ProductCode, word) -> bool:
    """True iff ``word`` (flat, no erasures) has every row and column in its component code."""
    w = np.asarray(word)
    if w.size != pc.length or np.any((w != 0) & (w != 1)):
        return False
    grid = w.reshape(pc.shape)
    return bool(_rows_in_code(grid, pc._row_tables).all() and _rows_in_code(grid.T, pc._col_tables).all())


def init_costs(received, pc: ProductCode) -> np.ndarray:
    r = as_ternary(received, pc.length).reshape(pc.shape)
    costs = np.zeros(pc.shape + (2,), dtype=np.int64)
    costs[..., 0] = r == 1
    costs[..., 1] = r == 0
    return costs


def _normalize(costs: np.ndarray) -> np.ndarray:
    costs = costs - costs.min(axis=-1, keepdims=True)
    return np.minimum(costs, COST_CAP, out=costs)


def _min_sum_pass(costs: np.ndarray, tables: _PassTables) -> np.ndarray:
    # Cost of placing each component codeword on each line, as (codewords, lines).
    zero_cost = costs[..., 0]
    delta = (costs[..., 1] - zero_cost).astype(np.float64)
    line_cost = zero_cost.sum(axis=-1) + (tables.table @ delta.T).astype(np.int64)
    out = np.empty_like(costs)
    out[..., 0] = line_cost[tables.with_zero].min(axis=1).T
    out[..., 1] = line_cost[tables.with_one].min(axis=1).T
    return _normalize(out)


def row_iteration(costs_in: np.ndarray, pc: ProductCode) -> np.ndarray:
    """One min-sum pass over the rows with the row code."""
    return _min_sum_pass(np.asarray(costs_in, dtype=np.int64), pc._row_tables)


def column_iteration(costs_in: np.ndarray, pc: ProductCode) -> np.ndarray:
    """One min-sum pass over the columns with the column code."""
    costs = np.asarray(costs_in, dtype=np.int64).transpose(1, 0, 2)
    return np.ascontiguousarray(_min_sum_pass(costs, pc._col_tables).transpose(1, 0, 2))


def hard_decision(costs: np.ndarray) -> np.ndarray:
    """Flat ternary word: the strictly cheaper symbol, or ERASED on a tie."""
    c = np.asarray(costs)
    word = np.full(c.shape[:-1], ERASED, dtype=np.int8)
    word[c[..., 0] < c[..., 1]] = 0
    word[c[..., 1] < c[..., 0]] = 1
    return word.reshape(-1)


def min_sum_decode(received, pc: ProductCode, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> DecodeResult:
    """Alternate row and column passes until the hard decision is a codeword.

    One iteration is a row pass followed by a column pass. The codeword check
    runs on the received word and after every pass; ``iterations_used`` counts
    iterations that were started.
    """
    if max_iterations < 1:
        raise CodeParameterError("max_iterations must be >= 1")
    costs = init_costs(received, pc)
    word = hard_decision(costs)
    if is_product_codeword(pc, word):
        return DecodeResult(DecodeStatus.CODEWORD, word, 0)
    for iteration in range(1, max_iterations + 1):
        for step in (row_iteration, column_iteration):
            costs = step(costs, pc)
            word = hard_decision(costs)
            if is_product_codeword(pc, word):
                return DecodeResult(DecodeStatus.CODEWORD, word, iteration)
    status = DecodeStatus.UNDECIDED if np.any(word == ERASED) else DecodeStatus.MAX_ITERATIONS
    return DecodeResult(status, word, max_iterations)
