"""Entropy primitives and the distortion triple."""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from rlfb import (
    ChannelSpec,
    FeedbackBudget,
    binary_entropy,
    inverse_binary_entropy,
    min_distortion,
    outer_bound_params,
)

# Independent oracle: solve H(p) = h on [0, 1/2] with Brent's method, never
# with the package's own bisection.


def oracle_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def oracle_inverse(h: float) -> float:
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    return brentq(lambda p: oracle_entropy(p) - h, 1e-300, 0.5, xtol=1e-15, rtol=8.9e-16)


# Frozen from oracle_inverse(oracle_entropy(0.4) - 0.5).
D_STAR_04_05 = 0.10061769707330366
GAMMA_04_05 = D_STAR_04_05 / 0.4
BETA_04_05 = GAMMA_04_05 + (1 - GAMMA_04_05) * 1.4


class TestBinaryEntropy:
    def test_half_is_one(self):
        assert binary_entropy(0.5) == 1.0

    def test_endpoints_are_zero(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_value_at_04(self):
        assert binary_entropy(0.4) == pytest.approx(0.9709505944546686, abs=1e-12)

    def test_symmetry(self):
        for p in np.linspace(0.0, 0.5, 101):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1.0 - p), abs=1e-15)

    def test_range(self):
        for p in np.linspace(0.0, 1.0, 201):
            assert 0.0 <= binary_entropy(float(p)) <= 1.0

    @pytest.mark.parametrize("bad", [-0.1, 1.1, float("nan"), float("inf")])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            binary_entropy(bad)


class TestInverseBinaryEntropy:
    def test_one_maps_to_half(self):
        assert inverse_binary_entropy(1.0) == 0.5

    def test_zero_maps_to_zero(self):
        assert inverse_binary_entropy(0.0) == 0.0

    def test_inverse_of_h04(self):
        assert inverse_binary_entropy(0.9709505944546686) == pytest.approx(0.4, abs=1e-10)

    def test_round_trip_grid(self):
        for h in np.linspace(0.0, 1.0, 1001):
            p = inverse_binary_entropy(float(h))
            assert 0.0 <= p <= 0.5
            assert binary_entropy(p) == pytest.approx(float(h), abs=1e-10)

    def test_against_oracle(self):
        for h in [1e-6, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97, 0.999, 1.0 - 1e-9]:
            assert inverse_binary_entropy(h) == pytest.approx(oracle_inverse(h), abs=1e-12)

    @pytest.mark.parametrize("bad", [-1e-9, 1.0 + 1e-9, float("nan")])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            inverse_binary_entropy(bad)


class TestMinDistortion:
    def test_large_budget_is_exactly_zero(self):
        d = min_distortion(ChannelSpec(0.4), FeedbackBudget(1.0))
        assert d == 0.0

    def test_zero_budget_hits_min(self):
        assert min_distortion(ChannelSpec(0.4), FeedbackBudget(0.0)) == 0.4

    def test_intermediate_budget(self):
        d = min_distortion(ChannelSpec(0.4), FeedbackBudget(0.5))
        assert d == pytest.approx(D_STAR_04_05, abs=1e-12)

    def test_zero_budget_grid(self):
        for delta in np.linspace(0.0, 1.0, 1000):
            spec = ChannelSpec(float(delta))
            assert min_distortion(spec, FeedbackBudget(0.0)) == min(delta, 1.0 - delta)

    def test_monotone_in_budget(self):
        for delta in (0.1, 0.4, 0.5, 0.6, 0.9):
            spec = ChannelSpec(delta)
            values = [
                min_distortion(spec, FeedbackBudget(float(c))) for c in np.linspace(0, 1.1, 120)
            ]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_clamp_is_bitwise_zero_at_capacity(self):
        for delta in np.linspace(0.01, 0.99, 99):
            spec = ChannelSpec(float(delta))
            h = binary_entropy(float(delta))
            assert min_distortion(spec, FeedbackBudget(h)) == 0.0
            assert min_distortion(spec, FeedbackBudget(h + 1e-12)) == 0.0

    def test_degenerate_deltas(self):
        assert min_distortion(ChannelSpec(0.0), FeedbackBudget(0.0)) == 0.0
        assert min_distortion(ChannelSpec(1.0), FeedbackBudget(0.0)) == 0.0

    def test_delta_above_half(self):
        # The defining equation is symmetric in delta <-> 1 - delta.
        d_low = min_distortion(ChannelSpec(0.4), FeedbackBudget(0.5))
        d_high = min_distortion(ChannelSpec(0.6), FeedbackBudget(0.5))
        assert d_low == pytest.approx(d_high, abs=1e-14)


class TestOuterBoundParams:
    def test_saturated_budget(self):
        p = outer_bound_params(ChannelSpec(0.4), FeedbackBudget(1.0))
        assert (p.d_star, p.gamma_out, p.beta_out) == (0.0, 0.0, 1.4)

    def test_zero_budget(self):
        p = outer_bound_params(ChannelSpec(0.4), FeedbackBudget(0.0))
        assert (p.d_star, p.gamma_out, p.beta_out) == (0.4, 1.0, 1.0)

    def test_intermediate_budget(self):
        p = outer_bound_params(ChannelSpec(0.4), FeedbackBudget(0.5))
        assert p.d_star == pytest.approx(D_STAR_04_05, abs=1e-12)
        assert p.gamma_out == pytest.approx(GAMMA_04_05, abs=1e-12)
        assert p.beta_out == pytest.approx(BETA_04_05, abs=1e-12)

    def test_beta_bounds_and_edges(self):
        for delta in np.linspace(0.01, 0.99, 50):
            for cfb in np.linspace(0.0, 1.2, 25):
                p = outer_bound_params(ChannelSpec(float(delta)), FeedbackBudget(float(cfb)))
                assert 1.0 - 1e-12 <= p.beta_out <= 1.0 + delta + 1e-12
                assert (abs(p.beta_out - 1.0) < 1e-12) == (abs(p.gamma_out - 1.0) < 1e-12)
                assert (abs(p.beta_out - (1.0 + delta)) < 1e-12) == (p.gamma_out < 1e-12)

    def test_beta_monotone_in_budget(self):
        for delta in (0.2, 0.4, 0.7):
            spec = ChannelSpec(delta)
            betas = [
                outer_bound_params(spec, FeedbackBudget(float(c))).beta_out
                for c in np.linspace(0, 1.1, 100)
            ]
            assert all(a <= b + 1e-12 for a, b in zip(betas, betas[1:]))

    def test_degenerate_delta(self):
        p0 = outer_bound_params(ChannelSpec(0.0), FeedbackBudget(0.0))
        assert (p0.gamma_out, p0.beta_out) == (0.0, 1.0)
        p1 = outer_bound_params(ChannelSpec(1.0), FeedbackBudget(0.0))
        assert (p1.gamma_out, p1.beta_out) == (0.0, 2.0)


class TestTypes:
    def test_channel_spec_validation(self):
        with pytest.raises(ValueError):
            ChannelSpec(-0.1)
        with pytest.raises(ValueError):
            ChannelSpec(1.5)
        with pytest.raises(ValueError):
            ChannelSpec(float("nan"))
        with pytest.raises(ValueError):
            ChannelSpec(0.4, block_len=0)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            FeedbackBudget(-0.01)
        with pytest.raises(ValueError):
            FeedbackBudget(float("inf"))
        assert FeedbackBudget(0.0).cfb == 0.0
