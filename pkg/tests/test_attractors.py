"""Tests for the penalty norms, zero attractors and the Newton power
approximation."""

import numpy as np
import pytest

from vplms.attractors import (
    NewtonPowConfig,
    PenaltyParams,
    lp_attractor,
    lp_norm,
    newton_pow,
    pl_attractor,
    rational_power_seed,
    sign,
)

PARAMS = PenaltyParams(rho=5e-4, epsilon=0.05, p=0.5)


def random_weights(rng, n=16, lo=0.05, hi=3.0):
    return rng.uniform(lo, hi, n) * rng.choice([-1.0, 1.0], n)


class TestLpNorm:
    def test_zero_vector(self):
        assert lp_norm([0.0, 0.0, 0.0], 0.5) == 0.0

    def test_single_unit_entry(self):
        assert lp_norm([1.0], 0.5) == pytest.approx(1.0)

    def test_hand_evaluated(self):
        # (sqrt(4) + sqrt(4))^2 = 16
        assert lp_norm([4.0, 4.0], 0.5) == pytest.approx(16.0)

    def test_p_validation(self):
        with pytest.raises(ValueError):
            lp_norm([1.0], 0.0)
        with pytest.raises(ValueError):
            lp_norm([1.0], 1.5)

    def test_near_zero_entries_masked(self):
        assert lp_norm([1.0, 1e-15], 0.5) == pytest.approx(1.0)


class TestSign:
    def test_zero(self):
        assert sign(0.0) == 0

    def test_negative(self):
        assert sign(-3.2) == -1

    def test_elementwise(self):
        assert np.array_equal(sign(np.array([1.0, 0.0, -2.0])), [1, 0, -1])


class TestLpAttractor:
    def test_zero_start_state(self):
        g = lp_attractor(np.zeros(8), PARAMS)
        assert np.array_equal(g, np.zeros(8))

    def test_hand_evaluated(self):
        # ||w||_0.5 = 1, |1|^0.5 = 1 -> G = [1/1.05, 0]
        g = lp_attractor([1.0, 0.0], PARAMS)
        assert g == pytest.approx([1.0 / 1.05, 0.0])

    def test_odd_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            w = random_weights(rng)
            p = PenaltyParams(rho=5e-4, epsilon=0.05, p=rng.uniform(0.2, 1.0))
            assert np.array_equal(lp_attractor(-w, p), -lp_attractor(w, p))

    def test_pull_direction_matches_sign(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            w = random_weights(rng)
            g = lp_attractor(w, PARAMS)
            assert np.all(np.sign(g) == np.sign(w))

    def test_magnitude_bound(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            w = random_weights(rng)
            p = rng.uniform(0.2, 1.0)
            params = PenaltyParams(rho=5e-4, epsilon=0.05, p=p)
            bound = lp_norm(w, p) ** (1.0 - p) / params.epsilon
            assert np.all(np.abs(lp_attractor(w, params)) <= bound + 1e-12)


class TestPlAttractor:
    def test_zero_vector(self):
        assert np.array_equal(pl_attractor(np.zeros(4), PARAMS), np.zeros(4))

    def test_hand_evaluated(self):
        g = pl_attractor([1.0], PARAMS)
        assert g == pytest.approx([0.5 / 1.05])

    def test_scaling_in_p_at_unit_magnitude(self):
        # |1|^(1-p) = 1 for every p, so G scales exactly with p
        a = pl_attractor([1.0], PenaltyParams(rho=1.0, epsilon=0.05, p=0.3))
        b = pl_attractor([1.0], PenaltyParams(rho=1.0, epsilon=0.05, p=0.6))
        assert b[0] == pytest.approx(2.0 * a[0])

    def test_odd_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            w = random_weights(rng)
            assert np.array_equal(pl_attractor(-w, PARAMS), -pl_attractor(w, PARAMS))

    def test_bounded_by_p_over_epsilon(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            w = rng.uniform(-5, 5, 16)
            p = rng.uniform(0.1, 1.0)
            params = PenaltyParams(rho=5e-4, epsilon=0.05, p=p)
            assert np.all(np.abs(pl_attractor(w, params)) <= p / params.epsilon + 1e-15)


class TestNewtonPow:
    def test_unit_base_is_fixed_point(self):
        for expo in (0.1, 0.5, 0.9):
            for j in (1, 3, 7):
                cfg = NewtonPowConfig(iterations=j, initial_guess=1.0)
                assert newton_pow(1.0, expo, cfg) == pytest.approx(1.0)

    def test_three_iterations_from_unit_guess(self):
        # g0=1: 1 -> 2.5 -> 2.05 -> ~2.0006 toward sqrt(4) = 2
        cfg = NewtonPowConfig(delta_n=0.5, iterations=3, initial_guess=1.0)
        g = newton_pow(4.0, 0.5, cfg)
        assert g == pytest.approx(2.0006, abs=5e-5)

    def test_converges_with_more_iterations(self):
        errs = []
        for j in (2, 4, 6, 8):
            cfg = NewtonPowConfig(iterations=j, initial_guess=1.0)
            errs.append(abs(newton_pow(4.0, 0.5, cfg) - 2.0))
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-12

    def test_sweep_with_rational_seed(self):
        cfg = NewtonPowConfig(iterations=4, initial_guess=None)
        for base in np.linspace(0.1, 10.0, 23):
            for expo in np.linspace(0.2, 0.8, 13):
                exact = base ** expo
                approx = newton_pow(float(base), float(expo), cfg)
                assert abs(approx - exact) / exact <= 1e-3

    def test_monotone_error_decrease(self):
        for base in (0.1, 0.5, 2.0, 10.0):
            for expo in (0.2, 0.5, 0.8):
                exact = base ** expo
                errs = []
                for j in range(1, 7):
                    for guess in (1.0, None):
                        cfg = NewtonPowConfig(iterations=j, initial_guess=guess)
                        errs.append((guess, j, abs(newton_pow(base, expo, cfg) - exact)))
                for guess in (1.0, None):
                    seq = [e for g, _, e in errs if g == guess]
                    assert all(b <= a + 1e-15 for a, b in zip(seq, seq[1:]))

    def test_zero_exponent(self):
        assert newton_pow(7.0, 0.0) == 1.0

    def test_rational_seed_close_to_power(self):
        for base in (0.1, 0.5, 2.0, 10.0):
            for expo in (0.2, 0.5, 0.8):
                seed = rational_power_seed(base, expo)
                assert seed > 0
                assert abs(seed - base**expo) / base**expo < 0.35

    def test_validation(self):
        with pytest.raises(ValueError):
            newton_pow(0.0, 0.5)
        with pytest.raises(ValueError):
            newton_pow(2.0, 1.0)
        with pytest.raises(ValueError):
            NewtonPowConfig(iterations=0)
        with pytest.raises(ValueError):
            NewtonPowConfig(delta_n=-0.1)

    def test_divergence_reported(self):
        # delta far below the exponent makes the inner constant overflow
        cfg = NewtonPowConfig(delta_n=0.05, iterations=2, initial_guess=1.0)
        with pytest.raises(FloatingPointError):
            newton_pow(1e300, 0.5, cfg)


class TestNewtonModeAttractors:
    """Attractors with the power approximation switched on."""

    def _params(self, p):
        return PenaltyParams(
            rho=5e-4, epsilon=0.05, p=p,
            newton=NewtonPowConfig(iterations=4, initial_guess=None),
        )

    def test_lp_close_to_exact_at_moderate_magnitudes(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            w = random_weights(rng, lo=0.05, hi=3.0)
            p = rng.uniform(0.2, 0.9)
            exact = lp_attractor(w, PenaltyParams(rho=5e-4, epsilon=0.05, p=p))
            approx = lp_attractor(w, self._params(p))
            assert approx == pytest.approx(exact, rel=1e-2)

    def test_pl_close_to_exact_at_moderate_magnitudes(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            w = random_weights(rng, lo=0.05, hi=3.0)
            p = rng.uniform(0.2, 0.9)
            exact = pl_attractor(w, PenaltyParams(rho=5e-4, epsilon=0.05, p=p))
            approx = pl_attractor(w, self._params(p))
            assert approx == pytest.approx(exact, rel=1e-2)

    def test_p_equal_one_is_exact(self):
        w = np.array([0.5, -2.0, 0.0])
        exact = lp_attractor(w, PenaltyParams(rho=1e-3, epsilon=0.05, p=1.0))
        approx = lp_attractor(w, self._params(1.0))
        assert np.array_equal(exact, approx)


class TestPenaltyParamsValidation:
    def test_rho_zero_allowed(self):
        PenaltyParams(rho=0.0, epsilon=0.05, p=0.5)

    def test_invalid_fields(self):
        with pytest.raises(ValueError):
            PenaltyParams(rho=-1.0, epsilon=0.05, p=0.5)
        with pytest.raises(ValueError):
            PenaltyParams(rho=1.0, epsilon=0.0, p=0.5)
        with pytest.raises(ValueError):
            PenaltyParams(rho=1.0, epsilon=0.05, p=0.0)
        with pytest.raises(ValueError):
            PenaltyParams(rho=1.0, epsilon=0.05, p=1.1)
        with pytest.raises(ValueError):
            PenaltyParams(rho=1.0, epsilon=0.05, p=0.5, zero_floor=0.0)
