"""Shared fixtures: seeded RNG and random exchangeable joints."""

from __future__ import annotations

import numpy as np
import pytest

from alphanml import CountVector, iter_with_log_multiplicity


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def make_exchangeable(rng):
    """Factory for random exchangeable joints over length-n sequences.

    Draws a Dirichlet weight for every type class and spreads it uniformly
    over the class, returning a callable from CountVector to the log of the
    per-sequence probability. Repeated calls draw fresh joints from the
    fixture's seeded generator, so the suite is reproducible.
    """

    def make(n: int, m: int):
        cells = list(iter_with_log_multiplicity(n, m))
        weights = rng.dirichlet(np.ones(len(cells)))
        table = {cv: float(np.log(w)) - lm for (cv, lm), w in zip(cells, weights)}

        def joint(cv: CountVector) -> float:
            return table[cv]

        return joint

    return make
