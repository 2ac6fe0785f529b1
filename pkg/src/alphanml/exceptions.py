"""Exception types shared across the package.

The CLI maps these onto its exit-code contract, so library code raises the
most specific type that applies instead of bare RuntimeError.
"""

from __future__ import annotations


class InfeasibleModelError(ValueError):
    """The requested predictor does not exist for the given parameters.

    Raised when a tilted luckiness prior is not integrable
    (alpha * (b_i - 1) + 1 <= 0 for some i) or when a luckiness NML
    supremum is unbounded (some exponent n_i + b_i - 1 < 0).
    """


class UnsupportedError(ValueError):
    """The operation is well defined but outside the supported range,
    e.g. grid-based regret maximization for alphabet sizes above 3."""


class NumericError(RuntimeError):
    """A numeric routine failed to reach its accuracy target.

    Carries the partial estimate so callers can still inspect it.
    """

    def __init__(self, message: str, partial: float | None = None):
        super().__init__(message)
        self.partial = partial
