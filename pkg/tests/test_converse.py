"""Correlation-bound oracles: closed form, explicit construction, LP relaxation."""

import numpy as np
import pytest
from scipy.optimize import linprog

from rlfb import (
    ChannelSpec,
    DistortionBreakdown,
    FeedbackBudget,
    JointPmf4,
    MaxOffReport,
    binary_entropy,
    build_max_off_report,
    constructive_pmf,
    max_min_a,
    max_off_closed_form,
    max_off_constructive,
    max_off_lp,
    max_off_lp_solution,
    outer_bound_params,
)
from rlfb.converse import _lp_arrays

# Frozen regression value: LP relaxation optimum at (delta=0.4, d_fb=0.1),
# confirmed independently with scipy HiGHS on first run. The relaxation
# drops the encoder's ignorance of the silent user's state, which is worth
# exactly d_fb * delta here (0.26 = 0.22 + 0.04).
LP_REGRESSION_04_01 = 0.26


def pmf_constraints_ok(spec: ChannelSpec, d_fb: float, pmf: JointPmf4, tol: float = 1e-12) -> bool:
    delta = spec.delta
    marg = pmf.marginal_fn()
    expect = np.array(
        [[delta * delta, delta * (1 - delta)], [(1 - delta) * delta, (1 - delta) * (1 - delta)]]
    )
    return (
        np.max(np.abs(marg - expect)) <= tol
        and abs(pmf.pr_tilde_one() - (1 - delta)) <= tol
        and abs(pmf.distortion_f_hat() - d_fb) <= tol
        and pmf.distortion_hat_tilde() <= d_fb + tol
    )


class TestClosedForm:
    def test_low_delta_branch(self):
        assert max_off_closed_form(ChannelSpec(0.4), 0.1) == pytest.approx(0.22, abs=1e-15)

    def test_zero_distortion_is_independence(self):
        for delta in (0.0, 0.3, 0.5, 0.8, 1.0):
            assert max_off_closed_form(ChannelSpec(delta), 0.0) == pytest.approx(
                delta * delta, abs=1e-15
            )

    def test_high_delta_branch(self):
        assert max_off_closed_form(ChannelSpec(0.6), 0.1) == pytest.approx(0.42, abs=1e-15)

    def test_branch_agreement_at_half(self):
        lo = max_off_closed_form(ChannelSpec(0.5 - 1e-9), 0.2)
        hi = max_off_closed_form(ChannelSpec(0.5 + 1e-9), 0.2)
        assert abs(lo - hi) <= 1e-8  # both tend to 0.25 + 0.1
        assert max_off_closed_form(ChannelSpec(0.5), 0.2) == pytest.approx(0.35, abs=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            max_off_closed_form(ChannelSpec(0.4), 0.5)
        with pytest.raises(ValueError):
            max_off_closed_form(ChannelSpec(0.4), -0.01)


class TestConstructive:
    def test_matches_examples(self):
        assert max_off_constructive(ChannelSpec(0.4), 0.1) == pytest.approx(0.22, abs=1e-12)
        assert max_off_constructive(ChannelSpec(0.4), 0.0) == pytest.approx(0.16, abs=1e-12)
        assert max_off_constructive(ChannelSpec(0.5), 0.2) == pytest.approx(0.35, abs=1e-12)

    def test_equals_closed_form_on_grid(self):
        for delta in np.linspace(0.02, 0.98, 50):
            spec = ChannelSpec(float(delta))
            d_max = min(delta, 1 - delta)
            for d_fb in np.linspace(0.0, d_max, 50):
                got = max_off_constructive(spec, float(d_fb))
                want = max_off_closed_form(spec, float(d_fb))
                assert abs(got - want) <= 1e-12, (delta, d_fb)

    def test_pmf_satisfies_claim_constraints_on_grid(self):
        for delta in np.linspace(0.05, 0.95, 19):
            spec = ChannelSpec(float(delta))
            d_max = min(delta, 1 - delta)
            for d_fb in np.linspace(0.0, d_max, 9):
                pmf = constructive_pmf(spec, float(d_fb))
                assert pmf_constraints_ok(spec, float(d_fb), pmf, tol=1e-12), (delta, d_fb)

    def test_breakdown_consistency(self):
        pmf = constructive_pmf(ChannelSpec(0.4), 0.1)
        b = pmf.breakdown()
        assert b.d_fb == pytest.approx(0.1, abs=1e-12)
        assert b.d10 + b.d01 == pytest.approx(b.d_fb, abs=1e-12)
        assert b.d10_tilde + b.d01_tilde <= b.d_fb + 1e-12

    def test_boundary_distortion(self):
        # d_fb at its maximum pins the transition probabilities at 1.
        assert max_off_constructive(ChannelSpec(0.3), 0.3) == pytest.approx(
            max_off_closed_form(ChannelSpec(0.3), 0.3), abs=1e-12
        )
        assert max_off_constructive(ChannelSpec(0.8), 0.2) == pytest.approx(
            max_off_closed_form(ChannelSpec(0.8), 0.2), abs=1e-12
        )


class TestLpRelaxation:
    def test_zero_distortion_forces_independence(self):
        assert max_off_lp(ChannelSpec(0.4), 0.0) == pytest.approx(0.16, abs=1e-9)

    def test_regression_value(self):
        assert max_off_lp(ChannelSpec(0.4), 0.1) == pytest.approx(LP_REGRESSION_04_01, abs=1e-9)

    def test_capped_by_silent_user_marginal(self):
        assert max_off_lp(ChannelSpec(0.5), 0.5) <= 0.5 + 1e-9

    def test_dominates_closed_form_on_grid(self):
        for delta in np.linspace(0.05, 0.95, 10):
            spec = ChannelSpec(float(delta))
            d_max = min(delta, 1 - delta)
            for d_fb in np.linspace(0.0, d_max, 10):
                lp = max_off_lp(spec, float(d_fb))
                assert lp >= max_off_closed_form(spec, float(d_fb)) - 1e-9, (delta, d_fb)

    def test_solution_feasible_independently(self):
        for delta, d_fb in [(0.3, 0.12), (0.5, 0.25), (0.7, 0.2), (0.92, 0.05)]:
            value, pmf = max_off_lp_solution(ChannelSpec(delta), d_fb)
            assert pmf_constraints_ok(ChannelSpec(delta), d_fb, pmf, tol=1e-10)
            assert value == pytest.approx(pmf.pr_tilde_zero_and_n_zero(), abs=1e-10)

    def test_matches_scipy_on_spot_checks(self):
        for delta, d_fb in [(0.25, 0.1), (0.4, 0.3), (0.6, 0.35), (0.85, 0.1)]:
            spec = ChannelSpec(delta)
            obj, a_eq, b_eq, a_ub, b_ub = _lp_arrays(spec, d_fb, True)
            ref = linprog(
                -obj, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
            )
            assert ref.status == 0
            assert max_off_lp(spec, d_fb) == pytest.approx(-ref.fun, abs=1e-9)

    def test_inequality_variant_dominates_equality(self):
        for delta, d_fb in [(0.4, 0.1), (0.6, 0.25)]:
            eq = max_off_lp(ChannelSpec(delta), d_fb, distortion_equality=True)
            le = max_off_lp(ChannelSpec(delta), d_fb, distortion_equality=False)
            assert le >= eq - 1e-9


class TestMaxMinA:
    def test_zero_budget(self):
        assert max_min_a(ChannelSpec(0.4), FeedbackBudget(0.0)) == pytest.approx(0.6, abs=1e-12)

    def test_saturated_budget(self):
        assert max_min_a(ChannelSpec(0.4), FeedbackBudget(1.0)) == pytest.approx(0.84, abs=1e-12)

    def test_intermediate(self):
        # Chained from the frozen bisection oracle for D*(0.4, 0.5).
        assert max_min_a(ChannelSpec(0.4), FeedbackBudget(0.5)) == pytest.approx(
            0.7796293817560177, abs=1e-12
        )

    def test_identity_with_beta_on_grid(self):
        for delta in np.linspace(0.01, 0.99, 99):
            spec = ChannelSpec(float(delta))
            for cfb in np.linspace(0.0, 1.2, 20):
                budget = FeedbackBudget(float(cfb))
                a = max_min_a(spec, budget)
                beta = outer_bound_params(spec, budget).beta_out
                assert abs(a - beta * (1.0 - delta)) <= 1e-12, (delta, cfb)


class TestReportAndTypes:
    def test_report_fields_and_self_check(self):
        report = build_max_off_report(ChannelSpec(0.4), 0.1)
        d = report.to_json_dict()
        assert set(d) == {"delta", "d_fb", "closed_form", "constructive", "lp_upper", "a_value"}
        assert d["a_value"] == pytest.approx(1.0 - d["closed_form"], abs=1e-12)
        report.self_check()

    def test_self_check_rejects_inconsistent_report(self):
        bad = MaxOffReport(
            delta=0.4, d_fb=0.1, closed_form=0.22, constructive=0.23, lp_upper=0.26, a_value=0.78
        )
        with pytest.raises(RuntimeError):
            bad.self_check()
        low_lp = MaxOffReport(
            delta=0.4, d_fb=0.1, closed_form=0.22, constructive=0.22, lp_upper=0.1, a_value=0.78
        )
        with pytest.raises(RuntimeError):
            low_lp.self_check()

    def test_distortion_breakdown_validation(self):
        DistortionBreakdown(d_fb=0.2, d10=0.15, d01=0.05, d10_tilde=0.1, d01_tilde=0.05)
        with pytest.raises(ValueError):
            DistortionBreakdown(d_fb=0.2, d10=0.05, d01=0.05, d10_tilde=0.0, d01_tilde=0.0)
        with pytest.raises(ValueError):
            DistortionBreakdown(d_fb=0.1, d10=0.05, d01=0.05, d10_tilde=0.2, d01_tilde=0.0)

    def test_joint_pmf_validation(self):
        with pytest.raises(ValueError):
            JointPmf4(np.full(16, 0.1))
        with pytest.raises(ValueError):
            bad = np.zeros(16)
            bad[0] = 1.5
            bad[1] = -0.5
            JointPmf4(bad)

    def test_a_value_tracks_gamma_tilde(self):
        # At maximal d_fb the report's A matches the zero-budget outer value.
        report = build_max_off_report(ChannelSpec(0.4), 0.4)
        assert report.a_value == pytest.approx(0.6, abs=1e-12)
