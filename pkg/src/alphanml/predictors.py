"""Predictor family over discrete memoryless sources.

Five predictor kinds share one evaluation surface:

* ``Mixture(a)``        - Bayes mixture under a Dirichlet(a) prior; the
                          Jeffreys case a = (1/2, ..., 1/2) is the KT
                          estimator and a = (1, ..., 1) is Laplace's rule.
* ``AlphaNML(alpha, a)``- power-of-alpha mixture, renormalized at horizon n:
                          joint proportional to (integral of w * p^alpha)^(1/alpha).
                          alpha = 1 is exactly the mixture; alpha -> infinity
                          approaches NML.
* ``NML()``             - normalized maximum likelihood: joint proportional
                          to the maximized likelihood of the counts.
* ``LuckinessNML(b)``   - NML with the likelihood tilted by a Dirichlet(b)
                          luckiness density inside the supremum.
* ``LuckinessAlphaNML(alpha, b)`` - the alpha family with the same tilt;
                          the tilted prior has parameters alpha*(b-1)+1,
                          which must stay positive for the integral to exist.

All joints are exchangeable (functions of the count vector alone) and are
computed in the natural-log domain. Everything that needs a per-horizon
normalizer goes through ``log_normalizer``, which memoizes in a thread-safe
cache keyed by (spec, n, m).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import InfeasibleModelError
from .numerics import (
    LogProb,
    log_gamma,
    log_multivariate_beta,
    log_sum_exp,
    xlogy,
)
from .typeclass import CountVector, iter_with_log_multiplicity, reduce_over_type_classes

_INTEGER_PRODUCT_CAP = 4096  # largest alpha unrolled as an explicit product


@dataclass(frozen=True)
class DirichletParams:
    """Parameters of a Dirichlet distribution on the m-simplex; all positive."""

    a: tuple[float, ...]

    def __post_init__(self):
        if len(self.a) < 2:
            raise ValueError("Dirichlet parameters need length >= 2")
        if any((not math.isfinite(x)) or x <= 0.0 for x in self.a):
            raise ValueError(f"Dirichlet parameters must be positive and finite, got {self.a}")

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def total(self) -> float:
        return math.fsum(self.a)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=np.float64)

    @classmethod
    def jeffreys(cls, m: int) -> "DirichletParams":
        return cls((0.5,) * int(m))

    @classmethod
    def uniform(cls, m: int) -> "DirichletParams":
        return cls((1.0,) * int(m))


class PredictorSpec:
    """Immutable, hashable description of a predictor (a tagged union)."""

    label = "predictor"


@dataclass(frozen=True)
class Mixture(PredictorSpec):
    a: DirichletParams

    label = "mixture"


@dataclass(frozen=True)
class AlphaNML(PredictorSpec):
    alpha: float
    a: DirichletParams

    label = "anml"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 1.0):
            raise ValueError(f"alpha must be a finite real >= 1, got {self.alpha}")


@dataclass(frozen=True)
class NML(PredictorSpec):
    label = "nml"


@dataclass(frozen=True)
class LuckinessNML(PredictorSpec):
    b: DirichletParams

    label = "lnml"


@dataclass(frozen=True)
class LuckinessAlphaNML(PredictorSpec):
    alpha: float
    b: DirichletParams

    label = "lanml"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 1.0):
            raise ValueError(f"alpha must be a finite real >= 1, got {self.alpha}")
        tilted_params(self.alpha, self.b)  # raises if the tilt is infeasible


def kt(m: int) -> Mixture:
    """KT estimator: Dirichlet(1/2, ..., 1/2) mixture."""
    return Mixture(DirichletParams.jeffreys(m))


def laplace(m: int) -> Mixture:
    """Laplace's rule of succession: Dirichlet(1, ..., 1) mixture."""
    return Mixture(DirichletParams.uniform(m))


def tilted_params(alpha: float, b: DirichletParams) -> DirichletParams:
    """Parameters alpha*(b_i - 1) + 1 of the tilted luckiness prior.

    The tilted density is integrable iff every parameter is positive; an
    infeasible tilt is a model that does not exist, not a numeric failure.
    """
    vals = tuple(alpha * (x - 1.0) + 1.0 for x in b.a)
    if any(v <= 0.0 for v in vals):
        raise InfeasibleModelError(
            f"tilted luckiness prior is not integrable: alpha*(b_i-1)+1 must be "
            f"positive for every i, got {vals} from alpha={alpha}, b={b.a}"
        )
    return DirichletParams(vals)


def spec_alphabet_size(spec: PredictorSpec) -> int | None:
    """The alphabet size pinned by the predictor's parameters, if any."""
    if isinstance(spec, Mixture):
        return spec.a.m
    if isinstance(spec, AlphaNML):
        return spec.a.m
    if isinstance(spec, LuckinessNML):
        return spec.b.m
    if isinstance(spec, LuckinessAlphaNML):
        return spec.b.m
    return None


def _check_spec_m(spec: PredictorSpec, m: int) -> None:
    sm = spec_alphabet_size(spec)
    if sm is not None and sm != m:
        raise ValueError(f"spec is over an alphabet of size {sm}, got m={m}")


def log_ml(counts: CountVector) -> LogProb:
    """ln of the maximized likelihood: sum c_i ln(c_i / n), with 0 ln 0 = 0."""
    cs = np.asarray(counts.counts, dtype=np.float64)
    n = float(cs.sum())
    return float(np.sum(xlogy(cs, cs)) - xlogy(n, n))


def log_dirichlet_alpha_integral(counts: CountVector, alpha: float, a: DirichletParams) -> LogProb:
    """ln integral of Dirichlet(a) * p_theta^alpha over the simplex.

    Closed form: ln B(alpha*counts + a) - ln B(a).
    """
    if counts.m != a.m:
        raise ValueError(f"counts have m={counts.m}, prior has m={a.m}")
    if not alpha >= 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    params = alpha * np.asarray(counts.counts, dtype=np.float64) + a.as_array()
    return log_multivariate_beta(params) - log_multivariate_beta(a.as_array())


def log_luckiness_supremum(counts: CountVector, b: DirichletParams) -> LogProb:
    """ln sup over theta of Dirichlet(b)(theta) * p_theta(counts).

    With exponents e_i = n_i + b_i - 1 the supremum sits at theta_i = e_i / E
    and equals sum e_i ln(e_i / E) - ln B(b). Any negative exponent makes the
    supremum infinite, i.e. the luckiness NML does not exist for that b.
    """
    if counts.m != b.m:
        raise ValueError(f"counts have m={counts.m}, luckiness has m={b.m}")
    e = np.asarray(counts.counts, dtype=np.float64) + b.as_array() - 1.0
    if np.any(e < 0.0):
        raise InfeasibleModelError(
            f"luckiness NML does not exist for b={b.a}: exponent {e.min()} < 0 at "
            f"counts={counts.counts} makes the tilted supremum unbounded"
        )
    total = float(e.sum())
    return float(np.sum(xlogy(e, e)) - xlogy(total, total) - log_multivariate_beta(b.as_array()))


def _log_numerator(spec: PredictorSpec, counts: CountVector) -> LogProb:
    """Unnormalized log joint; constants common to all counts may be dropped."""
    if isinstance(spec, Mixture):
        return log_dirichlet_alpha_integral(counts, 1.0, spec.a)
    if isinstance(spec, AlphaNML):
        if spec.alpha == 1.0:
            return log_dirichlet_alpha_integral(counts, 1.0, spec.a)
        return log_dirichlet_alpha_integral(counts, spec.alpha, spec.a) / spec.alpha
    if isinstance(spec, NML):
        return log_ml(counts)
    if isinstance(spec, LuckinessNML):
        return log_luckiness_supremum(counts, spec.b)
    if isinstance(spec, LuckinessAlphaNML):
        params = spec.alpha * np.asarray(counts.counts, dtype=np.float64) + tilted_params(
            spec.alpha, spec.b
        ).as_array()
        return log_multivariate_beta(params) / spec.alpha
    raise TypeError(f"unknown predictor spec {spec!r}")


class NormalizerCache:
    """Thread-safe memo for log normalizers, keyed by (spec, n, m).

    Values are deterministic functions of the key, so concurrent writers are
    idempotent (last write wins with an identical value).
    """

    def __init__(self):
        self._values: dict[tuple[PredictorSpec, int, int], float] = {}
        self._lock = threading.Lock()

    def get_or_compute(self, spec: PredictorSpec, n: int, m: int, compute: Callable[[], float]) -> float:
        key = (spec, n, m)
        with self._lock:
            if key in self._values:
                return self._values[key]
        value = compute()
        with self._lock:
            self._values[key] = value
        return value

    def verify(self, spec: PredictorSpec, n: int, m: int, rel_tol: float = 1e-12) -> bool:
        """Recompute an entry in serial reference mode and compare."""
        key = (spec, n, m)
        with self._lock:
            if key not in self._values:
                raise KeyError(f"no cached normalizer for {key}")
            cached = self._values[key]
        fresh = _compute_log_normalizer(spec, n, m, threads=1, serial=True)
        return math.isclose(cached, fresh, rel_tol=rel_tol, abs_tol=1e-12)

    def clear(self) -> None:
        with self._lock:
            self._values.clear()

    def __len__(self) -> int:
        with self._lock:
            return len(self._values)


DEFAULT_CACHE = NormalizerCache()


def _compute_log_normalizer(
    spec: PredictorSpec, n: int, m: int, *, threads: int = 1, serial: bool = False
) -> float:
    return reduce_over_type_classes(
        n, m, lambda cv: _log_numerator(spec, cv), threads=threads, serial=serial
    )


def log_normalizer(
    spec: PredictorSpec,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> float:
    """ln sum over type classes of multiplicity * exp(log numerator).

    For a mixture (or alpha = 1) this is ~0 by normalization; for NML it is
    the log Shtarkov sum, the minimax worst-case regret.
    """
    _check_spec_m(spec, m)
    if cache is None:
        return _compute_log_normalizer(spec, n, m, threads=threads)
    return cache.get_or_compute(
        spec, n, m, lambda: _compute_log_normalizer(spec, n, m, threads=threads)
    )


def log_joint(
    spec: PredictorSpec,
    counts: CountVector,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> LogProb:
    """ln of the predictor's probability of one sequence with these counts."""
    n, m = counts.n, counts.m
    _check_spec_m(spec, m)
    if isinstance(spec, Mixture):
        return _log_numerator(spec, counts)
    if isinstance(spec, AlphaNML) and spec.alpha == 1.0:
        # exact identity: the alpha family at alpha = 1 is the mixture
        return log_dirichlet_alpha_integral(counts, 1.0, spec.a)
    return _log_numerator(spec, counts) - log_normalizer(spec, n, m, cache=cache, threads=threads)


def _product_form(spec: PredictorSpec) -> tuple[float, DirichletParams] | None:
    """(alpha, effective Dirichlet params) for kinds whose joint is a Beta ratio."""
    if isinstance(spec, Mixture):
        return 1.0, spec.a
    if isinstance(spec, AlphaNML):
        return spec.alpha, spec.a
    if isinstance(spec, LuckinessAlphaNML):
        return spec.alpha, tilted_params(spec.alpha, spec.b)
    return None


def _extension_log_weight(
    spec: PredictorSpec, past: CountVector, symbol: int, use_integer_fast_path: bool | None
) -> float:
    """Log weight of extending ``past`` by ``symbol`` at horizon past.n + 1.

    Terms common to all symbols are dropped; only ratios matter.
    """
    form = _product_form(spec)
    if form is not None:
        alpha, params = form
        c_k = float(past.counts[symbol - 1])
        a_k = float(params.a[symbol - 1])
        base = alpha * c_k + a_k
        is_int = float(alpha).is_integer() and alpha <= _INTEGER_PRODUCT_CAP
        if use_integer_fast_path is True and not is_int:
            raise ValueError(f"integer fast path requested for non-integer alpha={alpha}")
        use_product = is_int if use_integer_fast_path is None else use_integer_fast_path
        if use_product:
            # Gamma(base + alpha) / Gamma(base) unrolled as an explicit product
            return math.fsum(math.log(base + j) for j in range(int(alpha))) / alpha
        return (log_gamma(base + alpha) - log_gamma(base)) / alpha
    # ratio-of-joints kinds: the horizon-(n+1) normalizer is common and cancels
    return _log_numerator(spec, past.with_symbol(symbol))


def _log_marginal_numerator(spec: PredictorSpec, counts: CountVector, horizon: int) -> float:
    """ln of the horizon-``horizon`` joint, marginalized over all suffixes.

    The common normalizer is omitted; ratios at a fixed horizon are exact.
    """
    suffix = horizon - counts.n
    if suffix < 0:
        raise ValueError(f"horizon {horizon} shorter than observed length {counts.n}")
    if suffix == 0:
        return _log_numerator(spec, counts)
    terms = []
    for tail, log_mult in iter_with_log_multiplicity(suffix, counts.m):
        merged = CountVector(tuple(c + t for c, t in zip(counts.counts, tail.counts)))
        terms.append(log_mult + _log_numerator(spec, merged))
    return log_sum_exp(terms)


def conditional_distribution(
    spec: PredictorSpec,
    past_counts: CountVector,
    horizon: int | None = None,
    *,
    use_integer_fast_path: bool | None = None,
) -> np.ndarray:
    """Next-symbol probabilities given past counts.

    The alpha family and NML are horizon-dependent, so the conditional is
    defined relative to a horizon; the default (past length + 1) is the
    one-step extension, where joints at the extended length are compared
    directly. A longer horizon marginalizes the horizon-length joint over
    all suffixes. Integer alpha takes an explicit product; otherwise the
    Gamma-ratio path is used; ``use_integer_fast_path`` forces one route.
    """
    n0 = past_counts.n
    m = past_counts.m
    _check_spec_m(spec, m)
    if horizon is None:
        horizon = n0 + 1
    if horizon < n0 + 1:
        raise ValueError(f"horizon must be at least past length + 1 = {n0 + 1}, got {horizon}")
    if horizon == n0 + 1:
        weights = np.array(
            [_extension_log_weight(spec, past_counts, k, use_integer_fast_path) for k in range(1, m + 1)]
        )
    else:
        weights = np.array(
            [
                _log_marginal_numerator(spec, past_counts.with_symbol(k), horizon)
                for k in range(1, m + 1)
            ]
        )
    shifted = weights - np.max(weights)
    probs = np.exp(shifted)
    return probs / probs.sum()


def cumulative_log_loss(
    spec: PredictorSpec,
    sequence: Sequence[int],
    m: int | None = None,
    *,
    horizon: int | None = None,
) -> float:
    """Sum over the sequence of -ln p(next symbol | past), in nats.

    Horizon-dependent predictors are evaluated at the full sequence length,
    so the chain of conditionals telescopes back to -log_joint.
    """
    seq = [int(x) for x in sequence]
    if m is None:
        m = spec_alphabet_size(spec)
        if m is None:
            raise ValueError("alphabet size m is required for this predictor kind")
    for x in seq:
        if not 1 <= x <= m:
            raise ValueError(f"symbol {x} outside alphabet 1..{m}")
    if horizon is None:
        horizon = len(seq)
    if horizon < len(seq):
        raise ValueError(f"horizon {horizon} shorter than the sequence length {len(seq)}")
    total = 0.0
    past = CountVector.zeros(m)
    for x in seq:
        probs = conditional_distribution(spec, past, horizon=horizon)
        total -= math.log(probs[x - 1])
        past = past.with_symbol(x)
    return total
