"""Tests for deviation metrics, ensemble averaging and the mean recursion."""

import numpy as np
import pytest

from vplms.attractors import PenaltyParams
from vplms.filters import AlgoKind
from vplms.metrics import (
    EnsembleTrace,
    RunTrace,
    ensemble_average,
    lms_msd_prediction,
    mean_misalignment_step,
    squared_deviation,
    steady_state_msd,
)


def trace(msd, p=(), algo=AlgoKind.LMS, seed=0):
    return RunTrace(algo=algo, msd_per_iteration=np.asarray(msd, float),
                    p_per_iteration=np.asarray(p, float), run_seed=seed)


class TestSquaredDeviation:
    def test_identical(self):
        assert squared_deviation([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_unit_deviation(self):
        assert squared_deviation([1.0, 0.0], [0.0, 0.0]) == pytest.approx(1.0)

    def test_hand_evaluated(self):
        assert squared_deviation([1.0, 2.0], [2.0, 0.0]) == pytest.approx(5.0)

    def test_symmetric_and_permutation_invariant(self):
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal(8), rng.standard_normal(8)
        assert squared_deviation(a, b) == pytest.approx(squared_deviation(b, a))
        perm = rng.permutation(8)
        assert squared_deviation(a[perm], b[perm]) == pytest.approx(squared_deviation(a, b))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            squared_deviation([1.0], [1.0, 2.0])


class TestEnsembleAverage:
    def test_single_trace_is_identity(self):
        t = trace([1.0, 2.0, 3.0])
        ens = ensemble_average([t])
        assert np.array_equal(ens.mean_msd, t.msd_per_iteration)
        assert ens.num_runs == 1

    def test_two_trace_mean(self):
        ens = ensemble_average([trace([1.0, 1.0]), trace([3.0, 3.0], seed=1)])
        assert np.array_equal(ens.mean_msd, [2.0, 2.0])

    def test_order_insensitive(self):
        rng = np.random.default_rng(1)
        traces = [trace(rng.random(50), seed=i) for i in range(20)]
        a = ensemble_average(traces).mean_msd
        b = ensemble_average(traces[::-1]).mean_msd
        assert np.allclose(a, b, rtol=1e-12, atol=0.0)

    def test_identical_traces_average_to_themselves(self):
        t = trace([0.5, 0.25, 0.125])
        ens = ensemble_average([t, t, t])
        assert np.array_equal(ens.mean_msd, t.msd_per_iteration)

    def test_p_traces_averaged(self):
        a = trace([1.0], p=[0.9], algo=AlgoKind.VP_GSE_LMS)
        b = trace([3.0], p=[0.7], algo=AlgoKind.VP_GSE_LMS, seed=1)
        ens = ensemble_average([a, b])
        assert np.array_equal(ens.mean_p, [0.8])

    def test_rejections(self):
        with pytest.raises(ValueError):
            ensemble_average([])
        with pytest.raises(ValueError):
            ensemble_average([trace([1.0]), trace([1.0], algo=AlgoKind.LP_LMS)])
        with pytest.raises(ValueError):
            ensemble_average([trace([1.0]), trace([1.0, 2.0])])


class TestSteadyStateMsd:
    def test_constant_trace(self):
        ens = EnsembleTrace(mean_msd=np.full(100, 0.42), mean_p=np.empty(0), num_runs=1)
        assert steady_state_msd(ens, 50) == pytest.approx(0.42)

    def test_full_window_is_overall_mean(self):
        msd = np.arange(10, dtype=float)
        ens = EnsembleTrace(mean_msd=msd, mean_p=np.empty(0), num_runs=1)
        assert steady_state_msd(ens, 10) == pytest.approx(msd.mean())

    def test_window_bounds(self):
        ens = EnsembleTrace(mean_msd=np.ones(10), mean_p=np.empty(0), num_runs=1)
        with pytest.raises(ValueError):
            steady_state_msd(ens, 11)
        with pytest.raises(ValueError):
            steady_state_msd(ens, 0)


class TestLmsPrediction:
    def test_reference_point(self):
        # mu sigma_n^2 N / (2 - mu N) for the standard bench parameters
        assert lms_msd_prediction(0.05, 0.01, 16) == pytest.approx(6.6667e-3, rel=1e-3)


class TestMeanMisalignmentStep:
    PEN = PenaltyParams(rho=5e-4, epsilon=0.05, p=0.5)

    def test_penalty_free_contraction(self):
        v = np.array([1.0, -2.0, 0.5])
        pen = PenaltyParams(rho=0.0, epsilon=0.05, p=0.5)
        out = mean_misalignment_step(v, np.eye(3), 0.05, pen, np.zeros(3), "lp")
        assert out == pytest.approx(0.95 * v)

    def test_fixed_point_at_zero(self):
        out = mean_misalignment_step(np.zeros(4), np.eye(4), 0.05, self.PEN,
                                     np.zeros(4), "lp")
        assert np.array_equal(out, np.zeros(4))

    def test_lp_correction_pulls_toward_zero(self):
        rng = np.random.default_rng(2)
        v = rng.standard_normal(6)
        w = np.abs(rng.standard_normal(6)) + 0.1  # all-positive snapshot
        contraction = (np.eye(6) - 0.05 * np.eye(6)) @ v
        out = mean_misalignment_step(v, np.eye(6), 0.05, self.PEN, w, "lp")
        assert np.all(out - contraction <= 0.0)  # subtracted attractor term

    def test_pl_correction_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            v = rng.standard_normal(6)
            w = rng.standard_normal(6) * 2.0
            contraction = (np.eye(6) - 0.05 * np.eye(6)) @ v
            out = mean_misalignment_step(v, np.eye(6), 0.05, self.PEN, w, "pl")
            bound = self.PEN.rho * self.PEN.p / self.PEN.epsilon
            assert np.all(np.abs(out - contraction) <= bound + 1e-15)

    def test_kind_and_dimension_validation(self):
        with pytest.raises(ValueError):
            mean_misalignment_step(np.zeros(3), np.eye(3), 0.05, self.PEN,
                                   np.zeros(3), "l2")
        with pytest.raises(ValueError):
            mean_misalignment_step(np.zeros(3), np.eye(2), 0.05, self.PEN,
                                   np.zeros(3), "lp")
