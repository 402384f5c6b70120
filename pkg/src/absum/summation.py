"""Summatory functions and the exact step-function Abel decomposition.

The central identity: with A(x) = sum_{n<=x} a_n,

    sum_{n<=x} a_n / n  =  A(x)/x  +  integral_1^x A(t)/t^2 dt,

where the integral over the step function A is evaluated exactly as

    sum_{n=1}^{floor(x)-1} A(n) * (1/n - 1/(n+1))  +  A(floor(x)) * (1/floor(x) - 1/x).

Accumulation policy, pinned for reproducibility:

- terms are consumed in ascending n, in fixed blocks of ACCUMULATION_CHUNK
  aligned to absolute n (never to grid points), summed pairwise by numpy
  inside a block and combined across blocks with Neumaier compensation;
- a checkpoint inside a block reads the running state plus a pairwise sum
  of the partial block, without advancing the state, so refining a grid
  never changes the value reported at an existing point;
- integer tables with weight 0 are accumulated as exact Python integers
  (unbounded width), never through floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ShapeError, UsageError
from .sieves import INTEGER_VALUED, REAL_VALUED, FunctionTable

ACCUMULATION_CHUNK = 1 << 16


class CompensatedSum:
    """Running compensated (Neumaier) sum of doubles.

    Keeps a carry for the low-order bits lost by each addition, so long
    series keep far more significant digits than a bare running total.
    """

    __slots__ = ("total", "carry")

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float) -> None:
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.carry += (self.total - t) + value
        else:
            self.carry += (value - t) + self.total
        self.total = t

    def peek(self, extra: float = 0.0) -> float:
        """Current value with ``extra`` added, without mutating the state."""
        return (self.total + self.carry) + extra


@dataclass(frozen=True)
class CheckpointGrid:
    """Strictly increasing evaluation points x_1 < ... < x_q, each >= 1."""

    points: tuple

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        if not pts:
            raise UsageError("grid needs at least one point")
        if not all(math.isfinite(x) for x in pts):
            raise UsageError("grid points must be finite")
        if pts[0] < 1.0:
            raise UsageError(f"grid points must be >= 1, got {pts[0]}")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise UsageError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def geometric(cls, x_min: float, x_max: float, count: int) -> "CheckpointGrid":
        """Geometric checkpoints rounded to integers and deduplicated."""
        if count < 1:
            raise UsageError(f"count must be >= 1, got {count}")
        if x_min > x_max:
            raise UsageError(f"x_min={x_min} exceeds x_max={x_max}")
        if count == 1 or x_min == x_max:
            return cls((float(round(x_max)),))
        r = (x_max / x_min) ** (1.0 / (count - 1))
        pts = sorted({int(round(x_min * r**i)) for i in range(count)})
        return cls(tuple(float(p) for p in pts if p >= 1))

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)


@dataclass
class SummatorySeries:
    """sums[i] = sum_{n <= x_i} a_n / n^k sampled on a checkpoint grid.

    For weight 0 over an integer table the entries are exact Python ints;
    otherwise they are doubles.
    """

    source: str
    weight_exponent: int
    grid: CheckpointGrid
    sums: list

    def __post_init__(self):
        if len(self.sums) != len(self.grid):
            raise ShapeError(
                f"{len(self.sums)} sums for {len(self.grid)} grid points"
            )


@dataclass
class AbelDecomposition:
    """Boundary term A(x)/x and the exact step integral, per checkpoint."""

    grid: CheckpointGrid
    boundary: list = field(repr=False)
    integral: list = field(repr=False)
    total: list = field(repr=False)


def _check_grid(grid: CheckpointGrid, n_max: int) -> list:
    top = grid.points[-1]
    if top > n_max:
        raise RangeError(f"grid point {top} exceeds n_max={n_max}")
    return [int(math.floor(x)) for x in grid.points]


def _chunks(n_top: int):
    for start in range(1, n_top + 1, ACCUMULATION_CHUNK):
        yield start, min(start + ACCUMULATION_CHUNK, n_top + 1)


def _exact_block_sum(block: np.ndarray) -> int:
    """Exact Python-int sum of an integer block (no width limit).

    int64 blocks are split into high and low 32-bit halves so each half
    sums without overflow; smaller dtypes sum directly in int64.
    """
    if block.dtype == np.int64:
        lo = np.sum(block & np.int64(0xFFFFFFFF), dtype=np.int64)
        hi = np.sum(block >> np.int64(32), dtype=np.int64)
        return (int(hi) << 32) + int(lo)
    return int(np.sum(block, dtype=np.int64))


def _exact_series(chunk_values, floors: list) -> list:
    out = []
    running = 0
    gi = 0
    for start, stop in _chunks(floors[-1]):
        block = chunk_values(start, stop)
        while gi < len(floors) and floors[gi] < stop:
            out.append(running + _exact_block_sum(block[: floors[gi] - start + 1]))
            gi += 1
        running += _exact_block_sum(block)
    return out


def _float_series(chunk_values, k: int, floors: list) -> list:
    out = []
    acc = CompensatedSum()
    gi = 0
    for start, stop in _chunks(floors[-1]):
        terms = chunk_values(start, stop)
        if k == 1:
            terms = terms / np.arange(start, stop, dtype=np.float64)
        elif k:
            terms = terms / np.arange(start, stop, dtype=np.float64) ** k
        while gi < len(floors) and floors[gi] < stop:
            out.append(acc.peek(float(np.sum(terms[: floors[gi] - start + 1]))))
            gi += 1
        acc.add(float(np.sum(terms)))
    return out


def _raw_chunks(table: FunctionTable):
    values = table.values

    def chunk_values(start, stop):
        return values[start - 1 : stop - 1]

    return chunk_values


def _float_chunks(table: FunctionTable):
    values = table.values
    if values.dtype == np.float64:
        return _raw_chunks(table)

    def chunk_values(start, stop):
        return values[start - 1 : stop - 1].astype(np.float64)

    return chunk_values


def partial_sums(table: FunctionTable, grid: CheckpointGrid) -> SummatorySeries:
    """A(x) = sum_{n<=x} a_n at every grid point (weight 0).

    Integer tables give exact integer sums; real tables use the
    compensated float path.
    """
    floors = _check_grid(grid, table.n_max)
    if table.kind == INTEGER_VALUED:
        sums = _exact_series(_raw_chunks(table), floors)
    else:
        sums = _float_series(_float_chunks(table), 0, floors)
    return SummatorySeries(table.name, 0, grid, sums)


def weighted_sums(table: FunctionTable, k: int, grid: CheckpointGrid) -> SummatorySeries:
    """sum_{n<=x} a_n / n^k at every grid point, for positive integer k."""
    if k < 1:
        raise UsageError(f"weight k must be >= 1, got {k}; use partial_sums for k=0")
    floors = _check_grid(grid, table.n_max)
    sums = _float_series(_float_chunks(table), k, floors)
    return SummatorySeries(table.name, k, grid, sums)


def abel_decompose(table: FunctionTable, grid: CheckpointGrid) -> AbelDecomposition:
    """Split sum a_n/n into boundary A(x)/x plus the exact step integral.

    The running prefix A(n) advances left to right once; the step
    integral adds A(n)*(1/n - 1/(n+1)) for n < floor(x) and closes with
    A(floor(x))*(1/floor(x) - 1/x), which vanishes at integer x.
    """
    floors = _check_grid(grid, table.n_max)
    exact = table.kind == INTEGER_VALUED
    chunk_values = _raw_chunks(table)

    boundary, integral, total = [], [], []
    acc = CompensatedSum()  # integral terms for all completed blocks
    offset = 0 if exact else CompensatedSum()  # A at the top of completed blocks
    gi = 0
    for start, stop in _chunks(floors[-1]):
        block = chunk_values(start, stop)
        base = float(offset) if exact else offset.peek()
        prefix = base + np.cumsum(block, dtype=np.float64)
        n = np.arange(start, stop, dtype=np.float64)
        terms = prefix * (1.0 / (n * (n + 1.0)))
        while gi < len(floors) and floors[gi] < stop:
            x = grid.points[gi]
            m = floors[gi]
            a_m = float(prefix[m - start])
            part = float(np.sum(terms[: m - start]))
            tail = a_m * (1.0 / m - 1.0 / x)  # exactly 0 at integer x
            b = a_m / x
            i = acc.peek(part + tail)
            boundary.append(b)
            integral.append(i)
            total.append(b + i)
            gi += 1
        acc.add(float(np.sum(terms)))
        if exact:
            offset += _exact_block_sum(block)
        else:
            offset.add(float(np.sum(block, dtype=np.float64)))
    return AbelDecomposition(grid, boundary, integral, total)


def prime_restricted_sums(
    table: FunctionTable,
    prime_indicator: FunctionTable,
    k: int,
    grid: CheckpointGrid,
) -> SummatorySeries:
    """sum over primes p <= x of a_p / p^k, by masking with the indicator."""
    if table.n_max != prime_indicator.n_max:
        raise ShapeError(
            f"table n_max={table.n_max} != indicator n_max={prime_indicator.n_max}"
        )
    if k < 0:
        raise UsageError(f"weight k must be >= 0, got {k}")
    floors = _check_grid(grid, table.n_max)
    values = table.values
    mask = prime_indicator.values

    if table.kind == INTEGER_VALUED and k == 0:
        def chunk_ints(start, stop):
            sl = slice(start - 1, stop - 1)
            return values[sl].astype(np.int64) * (mask[sl] != 0)

        sums = _exact_series(chunk_ints, floors)
    else:
        def chunk_floats(start, stop):
            sl = slice(start - 1, stop - 1)
            return values[sl].astype(np.float64) * (mask[sl] != 0)

        sums = _float_series(chunk_floats, k, floors)
    return SummatorySeries(f"{table.name}|prime", k, grid, sums)


def masked_by_primes(table: FunctionTable, prime_indicator: FunctionTable) -> FunctionTable:
    """Copy of ``table`` zeroed at composite n (same kind and n_max)."""
    if table.n_max != prime_indicator.n_max:
        raise ShapeError(
            f"table n_max={table.n_max} != indicator n_max={prime_indicator.n_max}"
        )
    keep = prime_indicator.values != 0
    if table.kind == INTEGER_VALUED:
        values = table.values.astype(np.int64) * keep
    else:
        values = table.values * keep
    return FunctionTable(f"{table.name}|prime", table.n_max, table.kind, values)


def format_number(v) -> str:
    """17-significant-digit text for doubles; exact text for ints."""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def series_to_csv(series: SummatorySeries) -> str:
    """CSV export: header ``x,sum`` then one full-precision row per point."""
    lines = ["x,sum"]
    for x, s in zip(series.grid.points, series.sums):
        lines.append(f"{format_number(x)},{format_number(s)}")
    return "\n".join(lines) + "\n"
