"""Segmented sieves producing exact tables of arithmetic functions.

Provides:
- Mobius function mu(n) (signed 8-bit)
- divisor count tau(n) and divisor sum sigma(n)^power
- prime indicator
- log(p) at primes (theta terms) and log(p) at prime powers (mangoldt)
- elementary pointwise tables: 1, log^k(n), n^m

All tables are built segment by segment so large n_max fits in the output
array plus a small, fixed working set.  Segments are independent, so the
result is bit-identical for any segment size or thread count.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ShapeError, SizingError, UsageError

INTEGER_VALUED = "integer-valued"
REAL_VALUED = "real-valued"

DEFAULT_SEGMENT_SIZE = 1 << 20

# Refuse table allocations beyond this many bytes (output array only; the
# per-segment working set is bounded by the segment size).
MEMORY_BUDGET_BYTES = 2 << 30

# sigma(n) < n * (1 + log n), so sigma(n)^2 stays below 2^63 up to 1e8.
# Past that the per-entry 64-bit width could wrap, which must never be silent.
SIGMA_SQUARED_NMAX_CAP = 10**8

CACHE_MAGIC = b"ABSM"
CACHE_VERSION = 1


@dataclass
class FunctionTable:
    """Exact values of an arithmetic function f(n) for 1 <= n <= n_max.

    ``values`` has length ``n_max`` and is 0-indexed: ``values[i]`` holds
    f(i + 1).  Integer tables store exact integers; real tables store
    finite doubles.  The array is frozen after construction and safe to
    share between threads.
    """

    name: str
    n_max: int
    kind: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in (INTEGER_VALUED, REAL_VALUED):
            raise UsageError(f"unknown table kind {self.kind!r}")
        if len(self.values) != self.n_max:
            raise ShapeError(
                f"table {self.name}: {len(self.values)} values for n_max={self.n_max}"
            )
        if self.kind == REAL_VALUED:
            if self.values.dtype != np.float64:
                raise UsageError("real-valued tables store doubles")
            if not np.isfinite(self.values).all():
                raise UsageError(f"table {self.name}: non-finite entry")
        elif not np.issubdtype(self.values.dtype, np.integer):
            raise UsageError("integer-valued tables store integers")
        self.values.setflags(write=False)

    def value_at(self, n: int):
        """Return f(n) as a Python scalar."""
        if not 1 <= n <= self.n_max:
            raise RangeError(f"n={n} outside table range [1, {self.n_max}]")
        v = self.values[n - 1]
        return float(v) if self.kind == REAL_VALUED else int(v)


def _check_sizing(n_max: int, min_n: int, itemsize: int) -> None:
    if n_max < min_n:
        raise SizingError(f"n_max={n_max} below the minimum {min_n} for this table")
    if n_max * itemsize > MEMORY_BUDGET_BYTES:
        raise SizingError(
            f"n_max={n_max} needs {n_max * itemsize} bytes, over the "
            f"{MEMORY_BUDGET_BYTES}-byte budget"
        )


def base_primes(limit: int) -> np.ndarray:
    """Primes up to ``limit`` by a plain Eratosthenes sieve (int64 array)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def _segments(n_max: int, first: int, segment_size: int):
    if segment_size < 1:
        raise UsageError(f"segment_size must be positive, got {segment_size}")
    return [
        (lo, min(lo + segment_size, n_max + 1))
        for lo in range(first, n_max + 1, segment_size)
    ]


def _run_segments(tasks, fill, threads: int) -> None:
    # Each task writes a disjoint slice of the output, so thread scheduling
    # cannot change the result.
    if threads <= 1 or len(tasks) <= 1:
        for lo, hi in tasks:
            fill(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda t: fill(*t), tasks))


def _first_multiple_index(lo: int, p: int) -> int:
    """Offset in [lo, hi) of the first multiple of p."""
    return ((lo + p - 1) // p) * p - lo


def _divide_out(res: np.ndarray, start: int, p: int) -> np.ndarray:
    """Divide every power of p out of res[start::p]; return the exponents.

    res[start::p] holds numbers divisible by p at least once.  On return
    those entries have all factors p removed and the int64 result is the
    exponent of p in each.
    """
    view = res[start::p]
    view //= p
    e = np.ones(view.shape[0], dtype=np.int64)
    idx = np.flatnonzero(view % p == 0)
    while idx.size:
        sub = view[idx] // p
        view[idx] = sub
        e[idx] += 1
        idx = idx[sub % p == 0]
    return e


def sieve_mobius(
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Table of the Mobius function mu(n) for n = 1..n_max.

    mu(n) is 0 when a square divides n, else (-1)^(number of prime
    factors).  Segmented: each segment flips signs for the base primes up
    to sqrt(n_max), zeroes square multiples, then flips once more where a
    prime factor larger than sqrt(n_max) remains.
    """
    _check_sizing(n_max, 1, 1)
    out = np.empty(n_max, dtype=np.int8)
    bp = [int(p) for p in base_primes(math.isqrt(n_max))]

    def fill(lo, hi):
        seg = np.ones(hi - lo, dtype=np.int8)
        res = np.arange(lo, hi, dtype=np.int64)
        for p in bp:
            start = _first_multiple_index(lo, p)
            np.negative(seg[start::p], out=seg[start::p])
            res[start::p] //= p
            p2 = p * p
            if p2 < hi:
                seg[_first_multiple_index(lo, p2) :: p2] = 0
        # leftover res > 1 is exactly one prime factor above sqrt(n_max)
        np.negative(seg, out=seg, where=res > 1)
        out[lo - 1 : hi - 1] = seg

    _run_segments(_segments(n_max, 1, segment_size), fill, threads)
    return FunctionTable("mobius", n_max, INTEGER_VALUED, out)


def sieve_tau(
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Table of tau(n), the number of positive divisors, for n = 1..n_max."""
    _check_sizing(n_max, 1, 4)
    out = np.empty(n_max, dtype=np.uint32)
    bp = [int(p) for p in base_primes(math.isqrt(n_max))]

    def fill(lo, hi):
        seg = np.ones(hi - lo, dtype=np.uint32)
        res = np.arange(lo, hi, dtype=np.int64)
        for p in bp:
            start = _first_multiple_index(lo, p)
            e = _divide_out(res, start, p)
            seg[start::p] *= (e + 1).astype(np.uint32)
        seg[res > 1] *= 2
        out[lo - 1 : hi - 1] = seg

    _run_segments(_segments(n_max, 1, segment_size), fill, threads)
    return FunctionTable("tau", n_max, INTEGER_VALUED, out)


def sieve_sigma(
    n_max: int,
    power: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Table of sigma(n)^power, the divisor sum raised per entry.

    Parameters
    ----------
    n_max : int
        Upper table bound (inclusive).
    power : int
        1 for sigma(n), 2 for sigma(n)^2.  Entries are exact int64;
        power 2 is capped at n_max = 1e8 so the width can never wrap.
    """
    if power not in (1, 2):
        raise UsageError(f"power must be 1 or 2, got {power}")
    if power == 2 and n_max > SIGMA_SQUARED_NMAX_CAP:
        raise SizingError(
            f"sigma^2 entries would overflow int64 beyond n_max={SIGMA_SQUARED_NMAX_CAP}"
        )
    _check_sizing(n_max, 1, 8)
    out = np.empty(n_max, dtype=np.int64)
    bp = [int(p) for p in base_primes(math.isqrt(n_max))]

    def fill(lo, hi):
        seg = np.ones(hi - lo, dtype=np.int64)
        res = np.arange(lo, hi, dtype=np.int64)
        for p in bp:
            start = _first_multiple_index(lo, p)
            e = _divide_out(res, start, p)
            # sigma contribution of p^e is (p^(e+1) - 1)/(p - 1), exact in int64
            seg[start::p] *= (p ** (e + 1) - 1) // (p - 1)
        big = res > 1
        seg[big] *= res[big] + 1
        if power == 2:
            seg *= seg
        out[lo - 1 : hi - 1] = seg

    _run_segments(_segments(n_max, 1, segment_size), fill, threads)
    return FunctionTable("sigma" if power == 1 else "sigma2", n_max, INTEGER_VALUED, out)


def sieve_prime_indicator(
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Table with 1 at primes and 0 elsewhere, for n = 1..n_max (n_max >= 2)."""
    _check_sizing(n_max, 2, 1)
    out = np.zeros(n_max, dtype=np.uint8)
    bp = [int(p) for p in base_primes(math.isqrt(n_max))]

    def fill(lo, hi):
        seg = np.ones(hi - lo, dtype=np.uint8)
        for p in bp:
            start = max(p * p, ((lo + p - 1) // p) * p) - lo
            if start < hi - lo:
                seg[start::p] = 0
        out[lo - 1 : hi - 1] = seg

    _run_segments(_segments(n_max, 2, segment_size), fill, threads)
    return FunctionTable("prime", n_max, INTEGER_VALUED, out)


def table_theta_terms(
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Real table with log(n) at primes and 0 elsewhere.

    Partial sums of this table are the first Chebyshev function theta(x).
    """
    ind = sieve_prime_indicator(n_max, segment_size, threads)
    _check_sizing(n_max, 2, 8)
    out = np.zeros(n_max, dtype=np.float64)
    primes = np.flatnonzero(ind.values) + 1
    out[primes - 1] = np.log(primes.astype(np.float64))
    return FunctionTable("theta", n_max, REAL_VALUED, out)


def table_mangoldt(
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Real table with log(p) at prime powers p^k and 0 elsewhere.

    Partial sums give the second Chebyshev function psi(x).  Built from
    the theta table: proper prime powers only exist for p <= sqrt(n_max).
    """
    theta = table_theta_terms(n_max, segment_size, threads)
    out = theta.values.copy()
    for p in base_primes(math.isqrt(n_max)):
        p = int(p)
        log_p = math.log(p)
        pk = p * p
        while pk <= n_max:
            out[pk - 1] = log_p
            pk *= p
    return FunctionTable("mangoldt", n_max, REAL_VALUED, out)


POINTWISE_SHAPES = ("constant", "log_power", "power")


def table_pointwise(
    shape: str,
    n_max: int,
    exponent: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
) -> FunctionTable:
    """Real table of an elementary function: 1, log^k(n), or n^m.

    ``exponent`` is the k of log_power or the m of power (>= 1); it is
    ignored for the constant shape.  Values are doubles via the platform
    natural logarithm.
    """
    if shape not in POINTWISE_SHAPES:
        raise UsageError(f"shape must be one of {POINTWISE_SHAPES}, got {shape!r}")
    if shape != "constant" and exponent < 1:
        raise UsageError(f"exponent must be >= 1, got {exponent}")
    _check_sizing(n_max, 1, 8)
    out = np.empty(n_max, dtype=np.float64)

    def fill(lo, hi):
        n = np.arange(lo, hi, dtype=np.float64)
        if shape == "constant":
            out[lo - 1 : hi - 1] = 1.0
        elif shape == "log_power":
            out[lo - 1 : hi - 1] = np.log(n) ** exponent
        else:
            out[lo - 1 : hi - 1] = n**exponent

    _run_segments(_segments(n_max, 1, segment_size), fill, threads)
    if shape == "constant":
        name = "const"
    elif shape == "log_power":
        name = f"log{exponent}"
    else:
        name = f"pow{exponent}"
    return FunctionTable(name, n_max, REAL_VALUED, out)


# ---------------------------------------------------------------------------
# named builders (used by the claim catalog and the CLI)

_BUILDERS = {
    "mobius": lambda n, s, t: sieve_mobius(n, s, t),
    "tau": lambda n, s, t: sieve_tau(n, s, t),
    "sigma": lambda n, s, t: sieve_sigma(n, 1, s, t),
    "sigma2": lambda n, s, t: sieve_sigma(n, 2, s, t),
    "prime": lambda n, s, t: sieve_prime_indicator(n, s, t),
    "theta": lambda n, s, t: table_theta_terms(n, s, t),
    "mangoldt": lambda n, s, t: table_mangoldt(n, s, t),
    "const": lambda n, s, t: table_pointwise("constant", n, 1, s, t),
    "log1": lambda n, s, t: table_pointwise("log_power", n, 1, s, t),
    "log2": lambda n, s, t: table_pointwise("log_power", n, 2, s, t),
    "pow1": lambda n, s, t: table_pointwise("power", n, 1, s, t),
    "pow2": lambda n, s, t: table_pointwise("power", n, 2, s, t),
}

TABLE_NAMES = tuple(_BUILDERS)


def build_named_table(
    name: str,
    n_max: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    threads: int = 1,
    cache_dir=None,
) -> FunctionTable:
    """Build one of the named tables, optionally via an on-disk cache.

    The cache is purely an optimization: a hit is loaded and returned,
    a miss is built and stored, and the result is identical either way.
    """
    if name not in _BUILDERS:
        raise UsageError(f"unknown table {name!r}; known: {', '.join(TABLE_NAMES)}")
    if cache_dir is not None:
        from pathlib import Path

        path = Path(cache_dir) / f"{name}-{n_max}.absm"
        if path.exists():
            return load_table(path)
        table = _BUILDERS[name](n_max, segment_size, threads)
        save_table(table, path)
        return table
    return _BUILDERS[name](n_max, segment_size, threads)


# ---------------------------------------------------------------------------
# binary cache

_DTYPE_CODES = {"int8": 1, "uint8": 2, "uint32": 3, "int64": 4, "float64": 5}
_CODE_DTYPES = {v: k for k, v in _DTYPE_CODES.items()}


def save_table(table: FunctionTable, path) -> None:
    """Write a table to ``path``: ABSM header, then raw little-endian values."""
    dtype = str(table.values.dtype)
    code = _DTYPE_CODES.get(dtype)
    if code is None:
        raise UsageError(f"dtype {dtype} not cacheable")
    name_bytes = table.name.encode("utf-8")
    kind_code = 0 if table.kind == INTEGER_VALUED else 1
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<IBBH", CACHE_VERSION, kind_code, code, len(name_bytes)))
        fh.write(name_bytes)
        fh.write(struct.pack("<Q", table.n_max))
        fh.write(np.ascontiguousarray(table.values, dtype=np.dtype(dtype).newbyteorder("<")))


def load_table(path) -> FunctionTable:
    """Read a table written by :func:`save_table`."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CACHE_MAGIC:
            raise UsageError(f"{path}: bad magic {magic!r}")
        version, kind_code, dtype_code, name_len = struct.unpack("<IBBH", fh.read(8))
        if version != CACHE_VERSION:
            raise UsageError(f"{path}: unsupported cache version {version}")
        name = fh.read(name_len).decode("utf-8")
        (n_max,) = struct.unpack("<Q", fh.read(8))
        dtype = np.dtype(_CODE_DTYPES[dtype_code]).newbyteorder("<")
        values = np.frombuffer(fh.read(), dtype=dtype).astype(_CODE_DTYPES[dtype_code])
    kind = INTEGER_VALUED if kind_code == 0 else REAL_VALUED
    return FunctionTable(name, int(n_max), kind, values)
