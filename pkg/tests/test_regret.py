"""Worst-case, average and alpha-regret, with closed forms and asymptotes."""

from __future__ import annotations

import math

import numpy as np
import pytest

from alphanml import (
    AlphaNML,
    DirichletParams,
    Mixture,
    NML,
    SimplexPoint,
    TypeClassTable,
    UnsupportedError,
    alpha_regret,
    asymptotic_min_alpha_regret,
    asymptotic_rmax,
    average_regret,
    figure1_table,
    kt,
    infinity_split_check,
    alpha_split_check,
    log_sum_exp,
    maximize_on_simplex,
    predictor_kl,
    sibson_mi_alpha,
    sibson_mi_infinity,
    w_alpha_closed,
    w_alpha_direct,
    worst_case_regret,
)

J2 = DirichletParams.jeffreys(2)
J3 = DirichletParams.jeffreys(3)


class TestWorstCase:
    """Max over type classes of ln ML minus ln joint."""

    def test_kt_golden(self):
        rep = worst_case_regret(kt(2), 10, 2)
        np.testing.assert_allclose(rep.value_nats, 1.7361522965964522, rtol=1e-12)
        assert rep.maximizer.counts == (0, 10)
        np.testing.assert_allclose(rep.value_bits, rep.value_nats / math.log(2), rtol=1e-15)

    def test_nml_regret_is_flat_log_normalizer(self):
        """For NML the regret equals the log normalizing sum on every class."""
        rep = worst_case_regret(NML(), 10, 2)
        np.testing.assert_allclose(rep.value_nats, sibson_mi_infinity(10, 2), rtol=1e-12)
        assert rep.maximizer.counts == (0, 10)

    def test_nml_tiny_horizons(self):
        """ln 2 at n = 1 and ln(5/2) at n = 2 for two symbols."""
        np.testing.assert_allclose(
            worst_case_regret(NML(), 1, 2).value_nats, math.log(2.0), rtol=1e-14
        )
        np.testing.assert_allclose(
            worst_case_regret(NML(), 2, 2).value_nats, math.log(2.5), rtol=1e-14
        )

    def test_nml_is_minimax(self):
        """No family member beats NML's worst case."""
        base = worst_case_regret(NML(), 8, 2).value_nats
        for spec in (kt(2), AlphaNML(2.0, J2), AlphaNML(5.0, J2)):
            assert worst_case_regret(spec, 8, 2).value_nats >= base - 1e-12

    def test_monotone_decreasing_in_alpha(self):
        values = [worst_case_regret(AlphaNML(a, J2), 12, 2).value_nats for a in (1.0, 2.0, 4.0, 8.0)]
        assert values == sorted(values, reverse=True)
        assert all(v > 0 for v in values)

    def test_accepts_callable_joint(self, make_exchangeable):
        q = make_exchangeable(4, 2)
        rep = worst_case_regret(q, 4, 2)
        assert math.isfinite(rep.value_nats)
        assert rep.value_nats > 0


class TestDecompositions:
    """Identities splitting the worst-case regret into radius plus remainder."""

    @pytest.mark.parametrize("m", [2, 3])
    @pytest.mark.parametrize(
        "spec_builder",
        [lambda m: Mixture(DirichletParams.jeffreys(m)), lambda m: AlphaNML(2.0, DirichletParams.jeffreys(m))],
    )
    def test_infinity_split(self, m, spec_builder):
        """Worst case = log normalizing sum + flat-top divergence, to 1e-10."""
        lhs, rhs = infinity_split_check(spec_builder(m), 6, m)
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    @pytest.mark.parametrize("alpha", [2.0, 2.5, 5.0])
    @pytest.mark.parametrize("m", [2, 3])
    def test_alpha_split(self, alpha, m):
        """Worst case = ((alpha-1)/alpha) radius + remainder, to 1e-10."""
        lhs, rhs = alpha_split_check(alpha, 5, m, DirichletParams.jeffreys(m))
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_alpha_split_golden(self):
        """Frozen worst-case value for alpha=2.5, n=5, m=2 under Jeffreys."""
        lhs, _ = alpha_split_check(2.5, 5, 2, J2)
        np.testing.assert_allclose(lhs, 1.315106594195323, rtol=1e-12)


class TestRemainderClosedForm:
    """Gamma-ratio closed form of the worst-case remainder, Jeffreys prior."""

    @pytest.mark.parametrize("alpha", [1.0, 2.0, 5.0])
    @pytest.mark.parametrize("nm", [(4, 2), (20, 3), (12, 4)])
    def test_matches_direct_maximum(self, alpha, nm):
        n, m = nm
        direct = w_alpha_direct(n, m, alpha, DirichletParams.jeffreys(m))
        np.testing.assert_allclose(w_alpha_closed(n, m, alpha), direct.value, atol=1e-10)

    def test_maximum_sits_at_a_corner(self):
        res = w_alpha_direct(4, 2, 2.0, J2)
        assert max(res.maximizer.counts) == 4
        assert res.maximizer.counts == (0, 4)
        np.testing.assert_allclose(res.value, 0.8138502941844769, rtol=1e-12)

    def test_non_jeffreys_rejected(self):
        with pytest.raises(UnsupportedError):
            w_alpha_closed(4, 2, 2.0, DirichletParams.uniform(2))


class TestInformationRadius:
    """Prior-to-source information radius of order alpha."""

    def test_order_infinity_small_horizons(self):
        """ln(5/2) at n = m = 2 and ln(9/2) at n = 2, m = 3."""
        np.testing.assert_allclose(sibson_mi_infinity(2, 2), math.log(2.5), rtol=1e-12)
        np.testing.assert_allclose(sibson_mi_infinity(2, 3), math.log(4.5), rtol=1e-12)

    def test_order_one_quadrature_golden(self):
        np.testing.assert_allclose(
            sibson_mi_alpha(3, 2, 1.0, J2), 0.6078069436032765, atol=1e-9
        )

    def test_order_one_multi_symbol_unsupported(self):
        with pytest.raises(UnsupportedError):
            sibson_mi_alpha(3, 3, 1.0, J3)

    def test_order_two_golden(self):
        np.testing.assert_allclose(
            sibson_mi_alpha(3, 2, 2.0, J2), 0.7375968953536434, rtol=1e-12
        )

    def test_monotone_in_alpha(self):
        values = [sibson_mi_alpha(4, 2, a, J2) for a in (1.5, 2.0, 4.0, 16.0)]
        values.append(sibson_mi_infinity(4, 2))
        assert values == sorted(values)


class TestAlphaRegret:
    """sup over theta of the order-alpha divergence from source to predictor."""

    def test_lower_bound_by_radius(self):
        """The matching-order regret of the family member is at least the radius."""
        for a in (J2, DirichletParams.uniform(2), DirichletParams((2.0, 2.0))):
            for n in (1, 3, 6):
                val = alpha_regret(AlphaNML(2.0, a), n, 2, 2.0).value_nats
                assert val >= sibson_mi_alpha(n, 2, 2.0, a) - 1e-9

    def test_golden_and_kind(self):
        rep = alpha_regret(AlphaNML(2.0, J2), 3, 2, 2.0)
        np.testing.assert_allclose(rep.value_nats, 1.1133254952156513, rtol=1e-10)
        assert rep.kind == "alpha"
        assert isinstance(rep.maximizer, SimplexPoint)

    def test_average_is_order_one(self):
        rep_a = average_regret(kt(2), 3, 2)
        rep_b = alpha_regret(kt(2), 3, 2, 1.0)
        assert rep_a.kind == rep_b.kind == "average"
        np.testing.assert_allclose(rep_a.value_nats, rep_b.value_nats, rtol=1e-12)
        np.testing.assert_allclose(rep_a.value_nats, 1.1631508098056809, rtol=1e-10)

    def test_unsupported_alphabet(self):
        with pytest.raises(UnsupportedError):
            alpha_regret(kt(4), 3, 4, 2.0)

    def test_three_symbols_runs(self):
        rep = alpha_regret(AlphaNML(2.0, J3), 3, 3, 2.0)
        assert rep.value_nats >= sibson_mi_alpha(3, 3, 2.0, J3) - 1e-9


class TestSimplexMaximization:
    """Grid plus local refinement on the 2- and 3-simplex."""

    def test_two_symbol_quadratic(self):
        point, value = maximize_on_simplex(2, lambda th: -((th[:, 0] - 0.3) ** 2))
        np.testing.assert_allclose(point.theta[0], 0.3, atol=1e-8)
        np.testing.assert_allclose(value, 0.0, atol=1e-15)

    def test_three_symbol_quadratic(self):
        target = np.array([0.2, 0.3, 0.5])

        def objective(th):
            return -np.sum((th - target) ** 2, axis=1)

        point, value = maximize_on_simplex(3, objective)
        np.testing.assert_allclose(point.as_array(), target, atol=1e-4)
        assert value > -1e-7

    def test_corner_maximum(self):
        point, _ = maximize_on_simplex(2, lambda th: th[:, 1])
        np.testing.assert_allclose(point.theta, (0.0, 1.0), atol=1e-12)

    def test_larger_alphabets_rejected(self):
        with pytest.raises(UnsupportedError):
            maximize_on_simplex(4, lambda th: th[:, 0])


class TestTypeClassTable:
    """Vectorized per-class tables used by the simplex objectives."""

    def test_source_probabilities_normalize(self, rng):
        table = TypeClassTable(6, 2, kt(2))
        thetas = rng.dirichlet((1.0, 1.0), size=5)
        lp = table.log_ptheta(thetas)
        totals = [log_sum_exp(list(table.log_mult + lp[i])) for i in range(5)]
        np.testing.assert_allclose(totals, 0.0, atol=1e-10)

    def test_order_one_is_kl(self, rng):
        table = TypeClassTable(5, 2, kt(2))
        thetas = rng.dirichlet((2.0, 2.0), size=4)
        np.testing.assert_allclose(
            table.renyi_values(thetas, 1.0), table.kl_values(thetas), rtol=1e-12
        )


class TestAsymptotes:
    """Large-horizon formulas for worst-case and radius growth."""

    def test_rmax_golden_values(self):
        np.testing.assert_allclose(asymptotic_rmax(100, 2, 1.0), 2.874950035918746, rtol=1e-14)
        np.testing.assert_allclose(asymptotic_rmax(100, 2, 2.0), 2.7016632407787595, rtol=1e-14)

    def test_rmax_order_infinity_drops_half_log_two_per_symbol(self):
        gap = asymptotic_rmax(50, 2, 1.0) - asymptotic_rmax(50, 2, math.inf)
        np.testing.assert_allclose(gap, 0.5 * math.log(2), rtol=1e-14)

    def test_min_alpha_regret_below_rmax(self):
        for alpha in (2.0, 4.0):
            assert asymptotic_min_alpha_regret(400, 2, alpha) < asymptotic_rmax(400, 2, alpha)

    def test_min_alpha_regret_golden(self):
        np.testing.assert_allclose(
            asymptotic_min_alpha_regret(100, 2, 2.0), 2.1818028553588005, rtol=1e-14
        )

    def test_rmax_tracks_finite_value(self):
        """The formula approaches the exact worst case as n grows."""
        gaps = [
            worst_case_regret(kt(2), n, 2).value_nats - asymptotic_rmax(n, 2, 1.0)
            for n in (50, 200)
        ]
        assert all(g > 0 for g in gaps)
        assert gaps[1] < gaps[0]


class TestComparisonTable:
    """Percent worst-case increase over the minimax baseline."""

    def test_small_table_goldens(self):
        rows = figure1_table([10], [1.0, 2.0, 3.0])
        percents = [r["percent_increase"] for r in rows]
        np.testing.assert_allclose(
            percents, [12.8058909129, 6.4271609826, 4.28695538412], atol=1e-6
        )

    def test_rows_complete(self):
        rows = figure1_table([5, 10], [1.0, 2.0])
        assert [(r["n"], r["alpha"]) for r in rows] == [(5, 1.0), (5, 2.0), (10, 1.0), (10, 2.0)]
        for r in rows:
            assert r["regret_nats"] > r["nml_regret_nats"] > 0
            assert r["percent_increase"] > 0


class TestPredictorDivergence:
    """KL between two predictors on sequence space."""

    def test_self_divergence_zero(self):
        np.testing.assert_allclose(predictor_kl(kt(2), kt(2), 5, 2), 0.0, atol=1e-12)

    def test_nonnegative_and_asymmetric(self):
        ab = predictor_kl(kt(2), NML(), 5, 2)
        ba = predictor_kl(NML(), kt(2), 5, 2)
        assert ab > 0 and ba > 0
        assert abs(ab - ba) > 1e-6
