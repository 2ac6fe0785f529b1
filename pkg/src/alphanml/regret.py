"""Regret analysis for exchangeable predictors over memoryless sources.

Three regret notions share one engine:

* worst-case regret: max over sequences of ln(maximized likelihood / p-hat),
  computed as a scan over type classes;
* average regret: sup over source parameters theta of KL(p_theta || p-hat)
  on sequence space;
* alpha-regret: sup over theta of the Renyi divergence of order alpha,
  which recovers the average regret as alpha -> 1 and the worst case as
  alpha -> infinity.

The information radius I_alpha (a Sibson mutual information between the
source parameter and the sequence) is the matching lower bound and shows up
in the identity checks: the worst-case regret of any predictor equals
I_infinity plus its order-infinity divergence from NML, and for the alpha
family it splits into ((alpha-1)/alpha) I_alpha plus a closed-form remainder
with a Gamma-ratio expression under the Jeffreys prior.

Maximization over theta uses a dense grid plus golden-section refinement on
the 1-simplex, and a triangular lattice plus Nelder-Mead refinement on the
2-simplex. Argmax ties break to the lexicographically smallest point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy import optimize as _optimize
from scipy.special import gammaln as _gammaln

from .exceptions import NumericError, UnsupportedError
from .numerics import (
    LOG_PI,
    LOG_TWO,
    log_gamma,
    log_multivariate_beta,
    log_sum_exp,
    log_sum_exp_array,
    xlogy,
)
from .predictors import (
    DEFAULT_CACHE,
    AlphaNML,
    DirichletParams,
    Mixture,
    NML,
    NormalizerCache,
    PredictorSpec,
    log_dirichlet_alpha_integral,
    log_joint,
    log_ml,
    log_normalizer,
)
from .typeclass import (
    CountVector,
    enumerate_count_vectors,
    iter_with_log_multiplicity,
    reduce_over_type_classes,
)

JointFn = Callable[[CountVector], float]

GRID_POINTS = 4096  # m = 2 grid resolution before golden-section refinement
LATTICE_STEP = 256  # m = 3 triangular-lattice resolution (step 1/256)
REFINE_ITERS = 200  # m = 3 Nelder-Mead refinement iterations
GOLDEN_TOL = 1e-10  # m = 2 refinement width in theta
TIE_REL = 1e-12  # relative window treating argmax candidates as tied


def strictly_better(val: float, best: float) -> bool:
    """True when val beats best by more than rounding noise.

    Count-vector argmax loops use this so that flat regret profiles
    (equal up to a few ulp) keep the lexicographically smallest argument
    instead of whichever vector rounding happens to favor.
    """
    if best == -math.inf:
        return val > best
    return val > best + TIE_REL * max(1.0, abs(best))


@dataclass(frozen=True)
class SimplexPoint:
    """A point of the probability simplex; coordinates sum to 1 within 1e-12."""

    theta: tuple[float, ...]

    def __post_init__(self):
        if len(self.theta) < 2:
            raise ValueError("simplex points need dimension >= 2")
        if any(t < 0.0 or t > 1.0 for t in self.theta):
            raise ValueError(f"coordinates outside [0, 1]: {self.theta}")
        if abs(math.fsum(self.theta) - 1.0) > 1e-12:
            raise ValueError(f"coordinates must sum to 1, got {self.theta}")

    @property
    def m(self) -> int:
        return len(self.theta)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=np.float64)


@dataclass(frozen=True)
class RegretReport:
    """Result of one regret computation, in nats (bits derived on demand)."""

    kind: str
    value_nats: float
    n: int
    m: int
    predictor: object
    alpha: float | None = None
    maximizer: object | None = None
    asymptotic_nats: float | None = None

    @property
    def value_bits(self) -> float:
        return self.value_nats / LOG_TWO


class WAlphaResult(NamedTuple):
    value: float
    maximizer: CountVector


def resolve_joint(
    predictor: PredictorSpec | JointFn,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> JointFn:
    """Turn a predictor spec, or any counts -> log-prob callable, into a joint fn."""
    if isinstance(predictor, PredictorSpec):
        return lambda cv: log_joint(predictor, cv, cache=cache, threads=threads)
    if callable(predictor):
        return predictor
    raise TypeError(f"predictor must be a PredictorSpec or callable, got {predictor!r}")


class TypeClassTable:
    """Precomputed per-type-class arrays for one (n, m, predictor) triple.

    Holds counts, log multiplicities and predictor log joints, and evaluates
    divergence objectives vectorized over batches of source parameters.
    """

    def __init__(
        self,
        n: int,
        m: int,
        predictor: PredictorSpec | JointFn,
        *,
        cache: NormalizerCache | None = DEFAULT_CACHE,
        threads: int = 1,
    ):
        joint = resolve_joint(predictor, n, m, cache=cache, threads=threads)
        counts: list[tuple[int, ...]] = []
        log_mult: list[float] = []
        log_jnt: list[float] = []
        for cv, lm in iter_with_log_multiplicity(n, m):
            counts.append(cv.counts)
            log_mult.append(lm)
            log_jnt.append(joint(cv))
        self.n = n
        self.m = m
        self.counts = np.asarray(counts, dtype=np.float64)
        self.log_mult = np.asarray(log_mult, dtype=np.float64)
        self.log_joint = np.asarray(log_jnt, dtype=np.float64)

    def log_ptheta(self, thetas: np.ndarray) -> np.ndarray:
        """(P, K) matrix of ln p_theta(counts) for a (P, m) batch of thetas."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
        out = np.zeros((thetas.shape[0], self.counts.shape[0]))
        for i in range(self.m):
            out += xlogy(self.counts[None, :, i], thetas[:, i][:, None])
        return out

    def renyi_values(self, thetas: np.ndarray, alpha: float) -> np.ndarray:
        """D_alpha(p_theta || predictor) on sequence space, per theta row."""
        lp = self.log_ptheta(thetas)
        if alpha == 1.0:
            return self.kl_values(thetas)
        inner = self.log_mult[None, :] + alpha * lp + (1.0 - alpha) * self.log_joint[None, :]
        return log_sum_exp_array(inner, axis=1) / (alpha - 1.0)

    def kl_values(self, thetas: np.ndarray) -> np.ndarray:
        """KL(p_theta || predictor) on sequence space, per theta row."""
        lp = self.log_ptheta(thetas)
        weight = np.exp(self.log_mult[None, :] + lp)
        gap = np.where(np.isfinite(lp), lp - self.log_joint[None, :], 0.0)
        return np.sum(weight * gap, axis=1)


def integrate_unit_interval(
    f: Callable[[float], float], *, epsabs: float = 1e-11, margin: float = 1e-3, limit: int = 200
) -> tuple[float, float]:
    """Adaptive integral of f over [0, 1] with endpoint-singularity splitting.

    Returns (value, error estimate); callers compare the estimate against
    their own tolerance.
    """
    total = 0.0
    err = 0.0
    for lo, hi in ((0.0, margin), (margin, 1.0 - margin), (1.0 - margin, 1.0)):
        value, estimate = _integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=limit)
        total += value
        err += estimate
    return total, err


def dirichlet_log_pdf(thetas: np.ndarray, params: DirichletParams) -> np.ndarray:
    """ln of the Dirichlet density at each row of a (P, m) batch of thetas."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    a = params.as_array()
    out = -log_multivariate_beta(a) * np.ones(thetas.shape[0])
    for i in range(params.m):
        out += xlogy(a[i] - 1.0, thetas[:, i])
    return out


def _golden_section_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    a, b = lo, hi
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    c = a + invphi2 * h
    d = a + invphi * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc >= yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + invphi2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + invphi * h
            yd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _embed2(ts: np.ndarray) -> np.ndarray:
    return np.stack([ts, 1.0 - ts], axis=1)


def maximize_on_simplex(
    m: int,
    objective: Callable[[np.ndarray], np.ndarray],
    *,
    grid_points: int = GRID_POINTS,
    lattice_step: int = LATTICE_STEP,
    refine_iters: int = REFINE_ITERS,
) -> tuple[SimplexPoint, float]:
    """Maximize a vectorized objective((P, m) thetas) -> (P,) over the simplex.

    m = 2: uniform grid of ``grid_points`` points on [0, 1] including both
    endpoints, then golden-section refinement to width 1e-10. m = 3:
    triangular lattice of step 1/``lattice_step`` then Nelder-Mead
    refinement capped at ``refine_iters`` iterations. First (smallest)
    argmax wins ties; larger alphabets are unsupported.
    """
    if m == 2:
        ts = np.linspace(0.0, 1.0, grid_points)
        vals = np.asarray(objective(_embed2(ts)), dtype=np.float64)
        j = int(np.argmax(vals))
        best_t, best_v = float(ts[j]), float(vals[j])

        def f(t: float) -> float:
            return float(objective(_embed2(np.array([t])))[0])

        lo = float(ts[max(j - 1, 0)])
        hi = float(ts[min(j + 1, grid_points - 1)])
        t_ref, v_ref = _golden_section_max(f, lo, hi, GOLDEN_TOL)
        if v_ref > best_v:
            best_t, best_v = t_ref, v_ref
        return SimplexPoint((best_t, 1.0 - best_t)), best_v
    if m == 3:
        step = lattice_step
        pts = []
        for i in range(step + 1):
            for jj in range(step - i + 1):
                pts.append((i / step, jj / step, (step - i - jj) / step))
        thetas = np.asarray(pts, dtype=np.float64)
        best_v = -math.inf
        best_theta = thetas[0]
        for start in range(0, thetas.shape[0], 8192):
            chunk = thetas[start : start + 8192]
            vals = np.asarray(objective(chunk), dtype=np.float64)
            k = int(np.argmax(vals))
            if vals[k] > best_v:
                best_v = float(vals[k])
                best_theta = chunk[k]

        def neg(xy: np.ndarray) -> float:
            t1, t2 = float(xy[0]), float(xy[1])
            t3 = 1.0 - t1 - t2
            if t1 < 0.0 or t2 < 0.0 or t3 < 0.0:
                return math.inf
            return -float(objective(np.array([[t1, t2, t3]]))[0])

        res = _optimize.minimize(
            neg,
            x0=best_theta[:2],
            method="Nelder-Mead",
            options={"maxiter": refine_iters, "xatol": 1e-12, "fatol": 1e-13},
        )
        if math.isfinite(res.fun) and -res.fun > best_v:
            t1 = min(max(float(res.x[0]), 0.0), 1.0)
            t2 = min(max(float(res.x[1]), 0.0), 1.0 - t1)
            best_v = -float(res.fun)
            best_theta = np.array([t1, t2, 1.0 - t1 - t2])
        point = SimplexPoint((float(best_theta[0]), float(best_theta[1]), 1.0 - float(best_theta[0]) - float(best_theta[1])))
        return point, best_v
    raise UnsupportedError(f"simplex maximization supports m in {{2, 3}}, got m={m}")


def worst_case_regret(
    predictor: PredictorSpec | JointFn,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> RegretReport:
    """Max over type classes of ln(maximized likelihood) - ln(predictor joint).

    Ties break to the lexicographically smallest count vector. A predictor
    that assigns zero probability to an achievable type class yields +inf.
    """
    joint = resolve_joint(predictor, n, m, cache=cache, threads=threads)
    best = -math.inf
    arg: CountVector | None = None
    for cv, _ in iter_with_log_multiplicity(n, m):
        val = log_ml(cv) - joint(cv)
        if strictly_better(val, best):
            best = val
            arg = cv
    return RegretReport(
        kind="worst_case", value_nats=best, n=n, m=m, predictor=predictor, maximizer=arg
    )


def sibson_mi_infinity(n: int, m: int, *, threads: int = 1) -> float:
    """ln of the Shtarkov sum: the minimax worst-case regret (NML's regret)."""
    return reduce_over_type_classes(n, m, log_ml, threads=threads)


def sibson_mi_alpha(
    n: int, m: int, alpha: float, a: DirichletParams, *, threads: int = 1
) -> float:
    """Information radius of order alpha between the prior and the source.

    For alpha > 1: (alpha/(alpha-1)) * ln sum over counts of multiplicity *
    (integral of Dirichlet(a) * p^alpha)^(1/alpha). The alpha = 1 limit is
    the mutual information E_a[KL(p_theta || mixture)], computed by
    quadrature and supported for m = 2 only.
    """
    if a.m != m:
        raise ValueError(f"prior has m={a.m}, got m={m}")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if alpha == 1.0:
        if m != 2:
            raise UnsupportedError("the alpha = 1 limit is quadrature-based and supports m = 2 only")
        table = TypeClassTable(n, m, Mixture(a))

        def integrand(t: float) -> float:
            theta = np.array([[t, 1.0 - t]])
            pdf = math.exp(dirichlet_log_pdf(theta, a)[0])
            return pdf * float(table.kl_values(theta)[0])

        value, err = integrate_unit_interval(integrand)
        if err > 1e-8:
            raise NumericError(f"quadrature error {err:.2e} too large for I_1", partial=value)
        return value
    term = lambda cv: log_dirichlet_alpha_integral(cv, alpha, a) / alpha
    radius = reduce_over_type_classes(n, m, term, threads=threads)
    return alpha / (alpha - 1.0) * radius


def w_alpha_direct(n: int, m: int, alpha: float, a: DirichletParams) -> WAlphaResult:
    """Max over counts of ln ML - (1/alpha) ln(integral of prior * p^alpha).

    The remainder term in the worst-case-regret identity for the alpha
    family; ties break lexicographically smallest.
    """
    if a.m != m:
        raise ValueError(f"prior has m={a.m}, got m={m}")
    counts = np.array([cv.counts for cv in enumerate_count_vectors(n, m)], dtype=float)
    params = np.asarray(a.as_array())
    if n > 0:
        ml = np.sum(xlogy(counts, counts / n), axis=1)
    else:
        ml = np.zeros(len(counts))
    log_beta = np.sum(_gammaln(alpha * counts + params), axis=1) - _gammaln(
        alpha * n + params.sum()
    )
    vals = ml - (log_beta - log_multivariate_beta(a.a)) / alpha
    best = float(vals.max())
    window = TIE_REL * max(1.0, abs(best))
    idx = int(np.argmax(vals >= best - window))
    arg = CountVector(tuple(int(c) for c in counts[idx]))
    return WAlphaResult(float(vals[idx]), arg)


def w_alpha_closed(n: int, m: int, alpha: float, a: DirichletParams | None = None) -> float:
    """Closed form of the worst-case remainder under the Jeffreys prior.

    (1/alpha) * [ln Gamma(alpha n + m/2) - ln Gamma(alpha n + 1/2)]
    + ln(pi)/(2 alpha) - ln Gamma(m/2)/alpha. Only the Jeffreys prior has
    this form; other priors raise UnsupportedError.
    """
    if a is not None and tuple(a.a) != (0.5,) * m:
        raise UnsupportedError("the closed form holds for the Jeffreys prior only")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return (
        (log_gamma(alpha * n + m / 2.0) - log_gamma(alpha * n + 0.5)) / alpha
        + LOG_PI / (2.0 * alpha)
        - log_gamma(m / 2.0) / alpha
    )


def infinity_split_check(
    predictor: PredictorSpec | JointFn,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> tuple[float, float]:
    """Both sides of: worst-case regret = ln Shtarkov sum + D_inf(NML || predictor).

    Returns (lhs, rhs); a zero-probability type class makes both sides +inf.
    """
    lhs = worst_case_regret(predictor, n, m, cache=cache, threads=threads).value_nats
    joint = resolve_joint(predictor, n, m, cache=cache, threads=threads)
    nml = NML()
    gap = -math.inf
    for cv, _ in iter_with_log_multiplicity(n, m):
        gap = max(gap, log_joint(nml, cv, cache=cache, threads=threads) - joint(cv))
    rhs = sibson_mi_infinity(n, m, threads=threads) + gap
    return lhs, rhs


def alpha_split_check(
    alpha: float,
    n: int,
    m: int,
    a: DirichletParams,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> tuple[float, float]:
    """Both sides of the alpha-family worst-case decomposition.

    lhs: worst-case regret of the alpha predictor. rhs: ((alpha-1)/alpha) *
    I_alpha + the direct remainder maximum.
    """
    lhs = worst_case_regret(AlphaNML(alpha, a), n, m, cache=cache, threads=threads).value_nats
    rhs = (alpha - 1.0) / alpha * sibson_mi_alpha(n, m, alpha, a, threads=threads) + w_alpha_direct(
        n, m, alpha, a
    ).value
    return lhs, rhs


def renyi_divergence_vs_predictor(
    theta: Sequence[float] | SimplexPoint,
    predictor: PredictorSpec | JointFn,
    n: int,
    alpha: float,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> float:
    """D_alpha(p_theta^n || predictor) on sequence space; alpha = 1 is KL."""
    if isinstance(theta, SimplexPoint):
        point = theta.as_array()
    else:
        point = SimplexPoint(tuple(float(t) for t in theta)).as_array()
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    table = TypeClassTable(n, point.size, predictor, cache=cache, threads=threads)
    return float(table.renyi_values(point[None, :], alpha)[0])


def average_regret(
    predictor: PredictorSpec | JointFn,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> RegretReport:
    """sup over theta of KL(p_theta || predictor): the alpha -> 1 regret."""
    return alpha_regret(predictor, n, m, 1.0, cache=cache, threads=threads)


def alpha_regret(
    predictor: PredictorSpec | JointFn,
    n: int,
    m: int,
    alpha: float,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
    grid_points: int = GRID_POINTS,
) -> RegretReport:
    """sup over theta of D_alpha(p_theta || predictor) on sequence space.

    alpha = 1 gives the average regret (KL objective). The order relates to
    an exponential tilt of the loss by tilt = alpha - 1. Supported for
    m in {2, 3}; the maximizing theta is reported.
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if m not in (2, 3):
        raise UnsupportedError(f"alpha_regret supports m in {{2, 3}}, got m={m}")
    table = TypeClassTable(n, m, predictor, cache=cache, threads=threads)

    def objective(thetas: np.ndarray) -> np.ndarray:
        return table.renyi_values(thetas, alpha)

    point, value = maximize_on_simplex(m, objective, grid_points=grid_points)
    kind = "average" if alpha == 1.0 else "alpha"
    return RegretReport(
        kind=kind,
        value_nats=value,
        n=n,
        m=m,
        predictor=predictor,
        alpha=alpha,
        maximizer=point,
    )


def predictor_kl(
    p: PredictorSpec | JointFn,
    q: PredictorSpec | JointFn,
    n: int,
    m: int,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> float:
    """KL(p || q) between two exchangeable predictors on sequence space."""
    pf = resolve_joint(p, n, m, cache=cache, threads=threads)
    qf = resolve_joint(q, n, m, cache=cache, threads=threads)
    total = 0.0
    for cv, lm in iter_with_log_multiplicity(n, m):
        lp = pf(cv)
        if lp == -math.inf:
            continue
        total += math.exp(lm + lp) * (lp - qf(cv))
    return total


def asymptotic_rmax(n: int, m: int, alpha: float) -> float:
    """Large-n worst-case regret of the alpha family under the Jeffreys prior.

    (m-1)/2 ln(n/2) + ln(pi)/2 - ln Gamma(m/2) + (m-1)/(2 alpha) ln 2; the
    last term vanishes as alpha -> infinity, recovering the NML asymptote.
    """
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    base = (m - 1) / 2.0 * math.log(n / 2.0) + LOG_PI / 2.0 - log_gamma(m / 2.0)
    return base + (m - 1) / (2.0 * alpha) * LOG_TWO


def asymptotic_min_alpha_regret(n: int, m: int, alpha: float) -> float:
    """Large-n minimax alpha-regret (the I_alpha asymptote), alpha > 1."""
    if alpha <= 1.0:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    base = (m - 1) / 2.0 * math.log(n / 2.0) + LOG_PI / 2.0 - log_gamma(m / 2.0)
    return base - (m - 1) / (2.0 * (alpha - 1.0)) * math.log(alpha)


def figure1_table(
    n_list: Sequence[int],
    alpha_list: Sequence[float],
    m: int = 2,
    *,
    cache: NormalizerCache | None = DEFAULT_CACHE,
    threads: int = 1,
) -> list[dict]:
    """Percent worst-case-regret increase of the alpha family over NML.

    One row per (n, alpha): 100 * (Rmax(alpha predictor) - Rmax(NML)) /
    Rmax(NML) under the Jeffreys prior, plus both regrets in nats.
    """
    rows: list[dict] = []
    a = DirichletParams.jeffreys(m)
    for n in n_list:
        nml_regret = sibson_mi_infinity(n, m, threads=threads)
        for alpha in alpha_list:
            spec = Mixture(a) if alpha == 1.0 else AlphaNML(float(alpha), a)
            value = worst_case_regret(spec, n, m, cache=cache, threads=threads).value_nats
            rows.append(
                {
                    "n": int(n),
                    "alpha": float(alpha),
                    "regret_nats": value,
                    "nml_regret_nats": nml_regret,
                    "percent_increase": 100.0 * (value - nml_regret) / nml_regret,
                }
            )
    return rows
