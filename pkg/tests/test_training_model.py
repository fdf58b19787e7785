"""Closed-form expected powers, LMMSE statistics, and energy accounting."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wetopt import order_stats
from wetopt.training_model import (
    SystemParams,
    TrainingPlan,
    average_harvested_energy,
    esnr,
    expected_selected_power,
    lmmse_stats,
    net_harvested_energy,
    refinement_threshold,
)


def params(**overrides) -> SystemParams:
    base = dict(m=4, n=12, n2=3, ps=0.06, eta=0.8, t=1e-3, beta=1e-6, n0=1e-19)
    base.update(overrides)
    return SystemParams(**base)


class TestSystemParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            params(m=0)
        with pytest.raises(ValueError):
            params(n2=13)
        with pytest.raises(ValueError):
            params(eta=1.5)
        with pytest.raises(ValueError):
            params(beta=0.0)

    def test_plan_validation(self):
        p = params()
        with pytest.raises(ValueError):
            TrainingPlan(n1=5, e1=-1.0, e2=(0.0,) * 3)
        with pytest.raises(ValueError):
            TrainingPlan(n1=2, e1=0.0, e2=(0.0,) * 3).validate_against(p)
        with pytest.raises(ValueError):
            TrainingPlan(n1=5, e1=0.0, e2=(0.0,) * 2).validate_against(p)

    def test_plan_cost(self):
        plan = TrainingPlan(n1=5, e1=2.0, e2=(1.0, 0.5, 0.25))
        assert plan.cost == pytest.approx(10.0 + 1.75)


class TestExpectedSelectedPower:
    def test_no_training_gives_prior(self):
        p = params()
        for rank in (1, 2, 3):
            assert expected_selected_power(rank, 8, 0.0, p) == pytest.approx(
                p.beta * p.m, rel=1e-14
            )

    def test_large_energy_reaches_ordered_gain(self):
        p = params()
        g1 = order_stats.gain(1, 8, p.m)
        value = expected_selected_power(1, 8, 1.0, p)  # e1/n0 ~ 1e19
        assert value == pytest.approx(p.beta * g1, rel=1e-9)

    def test_single_band_has_no_selection_gain(self):
        p = params(n2=1)
        for e1 in (0.0, 1e-15, 1e-3):
            assert expected_selected_power(1, 1, e1, p) == pytest.approx(
                p.beta * p.m, rel=1e-12
            )

    def test_bounds_and_monotonicity(self):
        p = params()
        g2 = order_stats.gain(2, 10, p.m)
        grid = [0.0] + list(np.geomspace(1e-16, 1e-6, 40))
        vals = [expected_selected_power(2, 10, e1, p) for e1 in grid]
        assert all(p.beta * p.m - 1e-20 <= v <= p.beta * g2 + 1e-20 for v in vals)
        assert all(a <= b + 1e-20 for a, b in zip(vals, vals[1:]))

    def test_rank_ordering(self):
        p = params()
        e1 = 3e-13
        vals = [expected_selected_power(r, 9, e1, p) for r in (1, 2, 3)]
        assert vals[0] >= vals[1] >= vals[2]

    def test_invalid_rank(self):
        with pytest.raises(ValueError):
            expected_selected_power(4, 3, 0.0, params())


class TestLmmse:
    def test_no_observation(self):
        p = params()
        stats = lmmse_stats(2e-6, 0.0, p)
        assert stats.coeff == 0.0
        assert stats.mse == pytest.approx(2e-6)
        assert stats.est_power == 0.0

    def test_perfect_estimation_limit(self):
        p = params()
        stats = lmmse_stats(2e-6, 1e3, p)
        assert stats.mse <= 1e-12 * 2e-6  # vanishes relative to the prior
        assert stats.est_power == pytest.approx(2e-6, rel=1e-12)

    @settings(max_examples=80, deadline=None, derandomize=True)
    @given(
        rn=st.floats(min_value=1e-9, max_value=1e-3),
        e2=st.floats(min_value=0.0, max_value=1e-6),
    )
    def test_orthogonality_decomposition(self, rn, e2):
        stats = lmmse_stats(rn, e2, params())
        assert stats.mse + stats.est_power == pytest.approx(rn, rel=1e-12)
        assert stats.mse >= 0.0 and stats.est_power >= 0.0


class TestHarvestedEnergy:
    def test_single_antenna_ignores_phase2(self):
        p = params(m=1)
        base = TrainingPlan(n1=6, e1=1e-13, e2=(0.0,) * 3)
        spent = TrainingPlan(n1=6, e1=1e-13, e2=(1e-12, 2e-12, 3e-12))
        assert average_harvested_energy(base, p) == pytest.approx(
            average_harvested_energy(spent, p), rel=1e-14
        )

    def test_infinite_pilots_reach_selection_harvest(self):
        p = params()
        plan = TrainingPlan(n1=8, e1=2e-13, e2=(1.0,) * 3)
        expected = p.eta_t_ps * math.fsum(
            expected_selected_power(r, 8, 2e-13, p) for r in (1, 2, 3)
        )
        assert average_harvested_energy(plan, p) == pytest.approx(expected, rel=1e-9)

    def test_zero_plan_value(self):
        p = params()
        plan = TrainingPlan(n1=p.n2, e1=0.0, e2=(0.0,) * p.n2)
        expected = p.eta_t_ps * p.beta * p.n2
        assert average_harvested_energy(plan, p) == pytest.approx(expected, rel=1e-14)
        assert net_harvested_energy(plan, p) == pytest.approx(expected, rel=1e-14)

    def test_monotone_in_phase2_energy(self):
        p = params()
        values = [
            average_harvested_energy(TrainingPlan(n1=8, e1=1e-13, e2=(e2, 0.0, 0.0)), p)
            for e2 in (0.0, 1e-13, 1e-12, 1e-11)
        ]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_harvest_ceiling(self):
        p = params()
        plan = TrainingPlan(n1=8, e1=1e-9, e2=(1e-9,) * 3)
        ceiling = p.eta_t_ps * p.beta * float(
            np.sum(order_stats.gains_up_to(3, 8, p.m))
        )
        assert average_harvested_energy(plan, p) <= ceiling

    def test_net_can_go_negative(self):
        p = params()
        plan = TrainingPlan(n1=12, e1=1.0, e2=(0.0,) * 3)
        assert net_harvested_energy(plan, p) < 0.0


class TestScalars:
    def test_esnr_quadratic_in_path_gain(self):
        p = params()
        assert esnr(params(beta=2e-6)) == pytest.approx(4.0 * esnr(p), rel=1e-12)

    def test_esnr_ism_value(self):
        p = params(m=10, n=866, n2=16, t=5e-5)
        assert esnr(p) == pytest.approx(24.0, rel=1e-12)

    def test_single_antenna_threshold_is_infinite(self):
        assert refinement_threshold(params(m=1)) == math.inf

    def test_threshold_grows_like_sqrt_dimension(self):
        # alpha = sqrt(n0) m / sqrt(eta t ps (m-1)) ~ sqrt(n0 m / (eta t ps))
        a64 = refinement_threshold(params(m=64))
        a16 = refinement_threshold(params(m=16))
        assert a64 / a16 == pytest.approx(4.0 * math.sqrt(15.0 / 63.0), rel=1e-12)
        assert a64 / a16 == pytest.approx(math.sqrt(64.0 / 16.0), rel=0.03)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(
        m=st.integers(min_value=2, max_value=128),
        scale=st.floats(min_value=1e-22, max_value=1e-10),
    )
    def test_threshold_identity(self, m, scale):
        p = params(m=m, n0=scale)
        alpha = refinement_threshold(p)
        assert alpha**2 * (m - 1) / m**2 * p.eta_t_ps / p.n0 == pytest.approx(
            1.0, rel=1e-12
        )
