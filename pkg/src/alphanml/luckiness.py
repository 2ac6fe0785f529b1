"""Luckiness variants: tilting the regret benchmark by a Dirichlet density.

A luckiness function reweights the maximized likelihood by a Dirichlet(b)
density before normalization, which turns NML into luckiness NML and the
alpha family into its tilted counterpart. Conditioning on past observations
is the special case b = past counts + 1 (the likelihood of the past acts as
the tilt), so conditional predictors reduce exactly to explicit ones.

Regret measures mirror the plain ones: a worst-case scan where the
benchmark is the tilted supremum, an average regret integrated against the
luckiness density, an alpha-regret integrated against the tilted prior
(parameters alpha*(b-1)+1), and a supremum form sup_theta [ln pi(theta) +
D_alpha(p_theta || predictor)] that recovers the worst case as alpha grows.
The b = (1, ..., 1) luckiness is the constant density on the simplex, under
which every measure collapses to its plain counterpart (for m = 2, where
the constant is 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import NumericError, UnsupportedError
from .numerics import LogProb
from .predictors import (
    DEFAULT_CACHE,
    DirichletParams,
    LuckinessAlphaNML,
    LuckinessNML,
    NormalizerCache,
    PredictorSpec,
    log_joint,
    log_luckiness_supremum,
    tilted_params,
)
from .regret import (
    JointFn,
    RegretReport,
    TypeClassTable,
    dirichlet_log_pdf,
    integrate_unit_interval,
    maximize_on_simplex,
    resolve_joint,
    strictly_better,
)
from .typeclass import CountVector, iter_with_log_multiplicity


@dataclass(frozen=True)
class LuckinessFunction:
    """A Dirichlet(b) tilt of the likelihood, with its origin recorded.

    ``origin`` is "explicit" for a user-chosen b and "conditional" when b
    was derived from past observations as past counts + 1.
    """

    b: DirichletParams
    origin: str = "explicit"
    past: CountVector | None = None

    @classmethod
    def explicit(cls, b: DirichletParams) -> "LuckinessFunction":
        return cls(b=b)

    @classmethod
    def from_past(cls, past_counts: CountVector) -> "LuckinessFunction":
        b = DirichletParams(tuple(c + 1.0 for c in past_counts.counts))
        return cls(b=b, origin="conditional", past=past_counts)


@dataclass(frozen=True)
class TiltedPrior:
    """The Dirichlet prior with parameters alpha*(b_i - 1) + 1.

    Construction fails (InfeasibleModelError) when the tilt is not
    integrable, i.e. some parameter would be <= 0.
    """

    alpha: float
    b: DirichletParams

    def __post_init__(self):
        tilted_params(self.alpha, self.b)

    @property
    def params(self) -> DirichletParams:
        return tilted_params(self.alpha, self.b)


def _as_luckiness(pi: LuckinessFunction | DirichletParams) -> LuckinessFunction:
    if isinstance(pi, LuckinessFunction):
        return pi
    if isinstance(pi, DirichletParams):
        return LuckinessFunction(b=pi)
    raise TypeError(f"pi must be a LuckinessFunction or DirichletParams, got {pi!r}")


def luckiness_nml_log_joint(
    counts: CountVector,
    pi: LuckinessFunction | DirichletParams,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> LogProb:
    """ln joint of the luckiness NML predictor for these counts."""
    return log_joint(LuckinessNML(_as_luckiness(pi).b), counts, cache=cache, threads=threads)


def luckiness_alpha_nml_log_joint(
    counts: CountVector,
    alpha: float,
    pi: LuckinessFunction | DirichletParams,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> LogProb:
    """ln joint of the tilted alpha predictor for these counts."""
    return log_joint(
        LuckinessAlphaNML(alpha, _as_luckiness(pi).b), counts, cache=cache, threads=threads
    )


def worst_case_luckiness_regret(
    predictor: PredictorSpec | JointFn,
    pi: LuckinessFunction | DirichletParams,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> RegretReport:
    """Max over counts of ln(tilted supremum) - ln(predictor joint).

    For the luckiness NML predictor itself this equals the log of the tilted
    Shtarkov sum, by the same cancellation as in the plain case.
    """
    lf = _as_luckiness(pi)
    if lf.b.m != m:
        raise ValueError(f"luckiness has m={lf.b.m}, got m={m}")
    joint = resolve_joint(predictor, n, m, cache=cache, threads=threads)
    best = -math.inf
    arg: CountVector | None = None
    for cv, _ in iter_with_log_multiplicity(n, m):
        val = log_luckiness_supremum(cv, lf.b) - joint(cv)
        if strictly_better(val, best):
            best = val
            arg = cv
    return RegretReport(
        kind="luckiness_worst_case", value_nats=best, n=n, m=m, predictor=predictor, maximizer=arg
    )


def average_luckiness_regret(
    predictor: PredictorSpec | JointFn,
    pi: LuckinessFunction | DirichletParams,
    n: int,
    m: int = 2,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
    tol: float = 1e-8,
) -> float:
    """E over theta ~ Dirichlet(b) of KL(p_theta || predictor), by quadrature.

    The Dirichlet(b) mixture minimizes this among all predictors, with the
    excess of any other predictor equal to KL(mixture || predictor) on
    sequence space. Supported for m = 2.
    """
    lf = _as_luckiness(pi)
    if m != 2 or lf.b.m != 2:
        raise UnsupportedError("average luckiness regret is quadrature-based and supports m = 2 only")
    table = TypeClassTable(n, m, predictor, cache=cache, threads=threads)

    def integrand(t: float) -> float:
        theta = np.array([[t, 1.0 - t]])
        pdf = math.exp(dirichlet_log_pdf(theta, lf.b)[0])
        return pdf * float(table.kl_values(theta)[0])

    value, err = integrate_unit_interval(integrand)
    if err > tol:
        raise NumericError(f"quadrature error {err:.2e} exceeds {tol:.2e}", partial=value)
    return value


def luckiness_alpha_regret(
    predictor: PredictorSpec | JointFn,
    pi: LuckinessFunction | DirichletParams,
    n: int,
    alpha: float,
    m: int = 2,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
    tol: float = 1e-7,
) -> float:
    """Tilted alpha-regret: (1/(alpha-1)) ln E_tilted[sum_x p^alpha q^(1-alpha)].

    The expectation runs over theta ~ the tilted prior (parameters
    alpha*(b-1)+1). The tilted alpha predictor minimizes it, and its value
    equals the information radius of order alpha under the tilted prior.
    Supported for m = 2 and alpha > 1.
    """
    if alpha <= 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    lf = _as_luckiness(pi)
    if m != 2 or lf.b.m != 2:
        raise UnsupportedError("luckiness alpha-regret is quadrature-based and supports m = 2 only")
    tilt = tilted_params(alpha, lf.b)
    table = TypeClassTable(n, m, predictor, cache=cache, threads=threads)

    def integrand(t: float) -> float:
        theta = np.array([[t, 1.0 - t]])
        pdf = math.exp(dirichlet_log_pdf(theta, tilt)[0])
        lp = table.log_ptheta(theta)[0]
        inner = table.log_mult + alpha * lp + (1.0 - alpha) * table.log_joint
        hi = np.max(inner)
        return pdf * math.exp(hi) * float(np.sum(np.exp(inner - hi)))

    value, err = integrate_unit_interval(integrand)
    if value <= 0.0 or err > tol * max(value, 1e-300):
        raise NumericError(
            f"quadrature for the tilted alpha-regret did not converge (value={value:.3e}, err={err:.3e})",
            partial=value,
        )
    return math.log(value) / (alpha - 1.0)


def luckiness_alpha_regret_supform(
    predictor: PredictorSpec | JointFn,
    pi: LuckinessFunction | DirichletParams,
    n: int,
    m: int,
    alpha: float,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> RegretReport:
    """sup over theta of [ln pi(theta) + D_alpha(p_theta || predictor)].

    The alpha -> 1 path maximizes ln pi(theta) + KL; as alpha grows the
    value approaches the worst-case luckiness regret. Under the constant
    m = 2 luckiness b = (1, 1) this is exactly the plain alpha-regret.
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    lf = _as_luckiness(pi)
    if lf.b.m != m:
        raise ValueError(f"luckiness has m={lf.b.m}, got m={m}")
    table = TypeClassTable(n, m, predictor, cache=cache, threads=threads)

    def objective(thetas: np.ndarray) -> np.ndarray:
        return dirichlet_log_pdf(thetas, lf.b) + table.renyi_values(thetas, alpha)

    point, value = maximize_on_simplex(m, objective)
    return RegretReport(
        kind="luckiness_alpha_sup",
        value_nats=value,
        n=n,
        m=m,
        predictor=predictor,
        alpha=alpha,
        maximizer=point,
    )
