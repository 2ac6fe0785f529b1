"""Brute-force oracles for desk-scale validation.

These routes deliberately avoid the type-class machinery: sums run over all
m^n explicit sequences via itertools, maxima over dense parameter grids, and
integrals through adaptive quadrature. They share only scalar numerics
primitives with the production code, so an agreement between the two is
evidence that the grouped fast paths are right.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _integrate

from .exceptions import NumericError, UnsupportedError
from .numerics import LogProb, log_sum_exp

_ENUMERATION_GUARD = 10_000_000
_STREAM_CHUNK = 1 << 15


@dataclass(frozen=True)
class OracleConfig:
    """Safety rails and accuracy targets for brute-force runs."""

    max_n: int = 8
    max_m: int = 3
    grid_points: int = 1_000_000
    quadrature_tol: float = 1e-10


def _check_enumeration(n: int, m: int) -> None:
    if int(n) != n or n < 0 or int(m) != m or m < 2:
        raise ValueError(f"need integer n >= 0 and m >= 2, got n={n}, m={m}")
    if m**n > _ENUMERATION_GUARD:
        raise ValueError(
            f"m^n = {m}^{n} exceeds the enumeration guard of {_ENUMERATION_GUARD}"
        )


def brute_sequence_sum(
    n: int,
    m: int,
    per_sequence_term: Callable[[tuple[int, ...]], LogProb],
    config: OracleConfig | None = None,
) -> float:
    """ln sum over all m^n sequences of exp(per_sequence_term(sequence)).

    Sequences are tuples of symbols in 1..m, streamed in lexicographic order
    and reduced in fixed-size chunks to bound memory.
    """
    _check_enumeration(n, m)
    partials: list[float] = []
    block: list[float] = []
    for seq in itertools.product(range(1, m + 1), repeat=n):
        block.append(per_sequence_term(seq))
        if len(block) == _STREAM_CHUNK:
            partials.append(log_sum_exp(block))
            block = []
    if block:
        partials.append(log_sum_exp(block))
    return log_sum_exp(partials)


def brute_simplex_max(
    objective: Callable[[np.ndarray], np.ndarray],
    m: int = 2,
    config: OracleConfig | None = None,
) -> tuple[float, float]:
    """(theta, value) maximizing a vectorized objective over the 1-simplex.

    Only m = 2 is supported: theta parametrizes (theta, 1 - theta) on a dense
    uniform grid of config.grid_points + 1 points including both endpoints.
    Ties resolve to the smallest theta.
    """
    if m != 2:
        raise UnsupportedError(f"brute_simplex_max supports m=2 only, got m={m}")
    cfg = config or OracleConfig()
    edges = np.linspace(0.0, 1.0, cfg.grid_points + 1)
    best_val = -math.inf
    best_theta = 0.0
    for start in range(0, edges.size, _STREAM_CHUNK):
        chunk = edges[start : start + _STREAM_CHUNK]
        vals = np.asarray(objective(chunk), dtype=np.float64)
        idx = int(np.argmax(vals))
        if vals[idx] > best_val:
            best_val = float(vals[idx])
            best_theta = float(chunk[idx])
    return best_theta, best_val


def simplex_quadrature(
    integrand: Callable[[float], float],
    tol: float | None = None,
    m: int = 2,
    config: OracleConfig | None = None,
) -> float:
    """Adaptive integral of ``integrand`` over the 1-simplex [0, 1].

    The interval is split near both endpoints (margin 1e-3) so integrable
    endpoint singularities, e.g. Dirichlet(1/2) densities, converge cleanly.
    Raises NumericError carrying the partial estimate if the combined error
    estimate misses the tolerance.
    """
    if m != 2:
        raise UnsupportedError(f"simplex_quadrature supports m=2 only, got m={m}")
    cfg = config or OracleConfig()
    if tol is None:
        tol = cfg.quadrature_tol
    margin = 1e-3
    total = 0.0
    err = 0.0
    for lo, hi in ((0.0, margin), (margin, 1.0 - margin), (1.0 - margin, 1.0)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _integrate.IntegrationWarning)
            value, estimate = _integrate.quad(
                integrand, lo, hi, epsabs=tol / 4.0, epsrel=1e-12, limit=200
            )
        total += value
        err += estimate
    if err > max(tol, 1e-13):
        raise NumericError(
            f"quadrature error estimate {err:.3e} exceeds tolerance {tol:.3e}",
            partial=total,
        )
    return total


def sequence_counts(sequence: Sequence[int], m: int) -> tuple[int, ...]:
    """Occupancy counts of an explicit sequence (direct counting, no grouping)."""
    counts = [0] * m
    for x in sequence:
        if not 1 <= x <= m:
            raise ValueError(f"symbol {x} outside alphabet {{1, ..., {m}}}")
        counts[x - 1] += 1
    return tuple(counts)


def sequential_mixture_log_prob(sequence: Sequence[int], m: int, a: Sequence[float]) -> float:
    """ln p(sequence) under a Dirichlet(a) mixture via the predictive chain.

    Multiplies (c_k + a_k) / (i + sum a) step by step; an independent route
    to the same value as the Beta-function closed form.
    """
    counts = [0] * m
    total_a = math.fsum(a)
    log_p = 0.0
    for i, x in enumerate(sequence):
        log_p += math.log((counts[x - 1] + a[x - 1]) / (i + total_a))
        counts[x - 1] += 1
    return log_p


def sequence_max_likelihood_log_prob(sequence: Sequence[int], m: int) -> float:
    """ln sup over theta of p_theta(sequence), from direct counting."""
    counts = sequence_counts(sequence, m)
    n = len(sequence)
    out = 0.0
    for c in counts:
        if c > 0:
            out += c * math.log(c / n)
    return out
