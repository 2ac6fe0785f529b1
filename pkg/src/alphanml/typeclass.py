"""Type classes: grouping length-n sequences over an m-ary alphabet by counts.

Every predictor in this package is exchangeable, so any sum over the m^n
sequences collapses to a sum over the C(n+m-1, m-1) occupancy-count vectors,
each weighted by its multinomial multiplicity. Enumeration streams count
vectors in ascending lexicographic order with O(m) state, carrying the log
multiplicity along incrementally (each step updates the previous binomial
factor with a constant number of operations; ``log_multinomial`` is the
exact fallback).

``reduce_over_type_classes`` is the one reduction primitive. It always works
in fixed-size chunks whose boundaries do not depend on the worker count, and
combines per-chunk partial log-sums in chunk order, so a run with 8 threads
is bit-identical to a run with 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .numerics import LogProb, log_multinomial, log_sum_exp

CHUNK_SIZE = 2048


@dataclass(frozen=True)
class CountVector:
    """Occupancy counts of a sequence: counts[i] = multiplicity of symbol i+1."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) < 2:
            raise ValueError("count vectors need an alphabet of size >= 2")
        if any((not isinstance(c, int)) or c < 0 for c in self.counts):
            raise ValueError(f"counts must be non-negative integers, got {self.counts}")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def m(self) -> int:
        return len(self.counts)

    def with_symbol(self, symbol: int) -> "CountVector":
        """Counts after observing one more symbol (1-based)."""
        if not 1 <= symbol <= self.m:
            raise ValueError(f"symbol {symbol} outside alphabet 1..{self.m}")
        cs = list(self.counts)
        cs[symbol - 1] += 1
        return CountVector(tuple(cs))

    @classmethod
    def from_sequence(cls, sequence: Sequence[int], m: int) -> "CountVector":
        cs = [0] * int(m)
        for x in sequence:
            if not 1 <= x <= m:
                raise ValueError(f"symbol {x} outside alphabet 1..{m}")
            cs[x - 1] += 1
        return cls(tuple(cs))

    @classmethod
    def zeros(cls, m: int) -> "CountVector":
        return cls((0,) * int(m))


def _validate_nm(n: int, m: int) -> tuple[int, int]:
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n}")
    if int(m) != m or m < 2:
        raise ValueError(f"alphabet size m must be an integer >= 2, got {m}")
    return int(n), int(m)


def count_vector_total(n: int, m: int) -> int:
    """Number of type classes: C(n+m-1, m-1)."""
    n, m = _validate_nm(n, m)
    return math.comb(n + m - 1, m - 1)


def _walk(n: int, m: int) -> Iterator[tuple[tuple[int, ...], float]]:
    """Yield (counts, log multiplicity) in ascending lexicographic order.

    The multiplicity factors as a product of binomials, one per coordinate;
    each is updated from its predecessor in O(1).
    """

    def rec(prefix: tuple[int, ...], remaining: int, parts: int, log_coeff: float):
        if parts == 1:
            yield prefix + (remaining,), log_coeff
            return
        lb = 0.0  # ln C(remaining, c) for the current first coordinate c
        for c in range(remaining + 1):
            yield from rec(prefix + (c,), remaining - c, parts - 1, log_coeff + lb)
            if c < remaining:
                lb += math.log((remaining - c) / (c + 1.0))

    yield from rec((), n, m, 0.0)


def enumerate_count_vectors(n: int, m: int) -> Iterator[CountVector]:
    """Stream every count vector of (n, m) exactly once, lexicographically."""
    n, m = _validate_nm(n, m)
    for counts, _ in _walk(n, m):
        yield CountVector(counts)


def iter_with_log_multiplicity(n: int, m: int) -> Iterator[tuple[CountVector, float]]:
    """Stream (count vector, ln multiplicity) pairs in lexicographic order."""
    n, m = _validate_nm(n, m)
    for counts, log_mult in _walk(n, m):
        yield CountVector(counts), log_mult


def _eval_chunk(chunk: list[tuple[CountVector, float]], term: Callable[[CountVector], LogProb]) -> float:
    return log_sum_exp([log_mult + term(cv) for cv, log_mult in chunk])


def reduce_over_type_classes(
    n: int,
    m: int,
    term: Callable[[CountVector], LogProb],
    *,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
    serial: bool = False,
) -> float:
    """ln sum over type classes of multiplicity * exp(term(counts)).

    ``term`` must be a pure function of the count vector. The chunked path is
    canonical and thread-count independent; ``serial=True`` is the unchunked
    reference mode used by consistency checks.
    """
    n, m = _validate_nm(n, m)
    if serial:
        return log_sum_exp([log_mult + term(cv) for cv, log_mult in iter_with_log_multiplicity(n, m)])

    def chunks() -> Iterator[list[tuple[CountVector, float]]]:
        block: list[tuple[CountVector, float]] = []
        for item in iter_with_log_multiplicity(n, m):
            block.append(item)
            if len(block) == chunk_size:
                yield block
                block = []
        if block:
            yield block

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda ch: _eval_chunk(ch, term), chunks()))
    else:
        partials = [_eval_chunk(ch, term) for ch in chunks()]
    return log_sum_exp(partials)


def verify_multiplicities(n: int, m: int, rel_tol: float = 1e-12) -> bool:
    """Check the incremental log multiplicities against exact log_multinomial."""
    for cv, log_mult in iter_with_log_multiplicity(n, m):
        exact = log_multinomial(n, cv.counts)
        if not math.isclose(log_mult, exact, rel_tol=rel_tol, abs_tol=1e-12):
            return False
    return True
