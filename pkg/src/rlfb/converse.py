"""Combinatorial oracles for the outer bound's worst-case correlation step.

Three independent routes to the maximal probability that a marginal-
preserving reimagined state sequence and the silent user's state are
simultaneously zero, given a feedback distortion level d_fb:

* a closed form, branching on which of delta, 1-delta is smaller;
* an explicit joint pmf over (S_F, S_N, S_hat, S_tilde) realizing it;
* an LP relaxation solved by dense simplex, which upper-bounds both.

Also the max-min quantity A = gamma (1-delta) + (1-gamma)(1-delta^2), which
ties the distortion parameters to the region coefficient via A = beta (1-delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .infotheory import ChannelSpec, FeedbackBudget, outer_bound_params
from .simplex import solve_lp

__all__ = [
    "ConstructionInfeasible",
    "DistortionBreakdown",
    "JointPmf4",
    "MaxOffReport",
    "max_off_closed_form",
    "constructive_pmf",
    "max_off_constructive",
    "max_off_lp",
    "max_off_lp_solution",
    "max_min_a",
    "build_max_off_report",
]

_RANGE_TOL = 1e-12
_PMF_TOL = 1e-12


class ConstructionInfeasible(Exception):
    """The explicit transition recipe could not place the required mass."""


def _check_d_fb(spec: ChannelSpec, d_fb: float) -> float:
    d_max = min(spec.delta, 1.0 - spec.delta)
    if not math.isfinite(d_fb) or d_fb < -_RANGE_TOL or d_fb > d_max + _RANGE_TOL:
        raise ValueError(f"d_fb must lie in [0, {d_max:g}], got {d_fb!r}")
    return min(max(d_fb, 0.0), d_max)


@dataclass(frozen=True)
class DistortionBreakdown:
    """Error-direction bookkeeping for a feedback strategy at distortion d_fb.

    d10/d01 split the source-to-estimate errors by direction (they sum to
    d_fb); d10_tilde/d01_tilde are the estimate-to-reimagined-sequence
    directions, whose sum may not exceed d_fb.
    """

    d_fb: float
    d10: float
    d01: float
    d10_tilde: float
    d01_tilde: float

    def __post_init__(self) -> None:
        for name in ("d_fb", "d10", "d01", "d10_tilde", "d01_tilde"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if abs(self.d10 + self.d01 - self.d_fb) > 1e-9:
            raise ValueError(f"d10 + d01 = {self.d10 + self.d01} != d_fb = {self.d_fb}")
        if self.d10_tilde + self.d01_tilde > self.d_fb + 1e-9:
            raise ValueError("d10_tilde + d01_tilde exceeds d_fb")


class JointPmf4:
    """Joint pmf over (s_f, s_n, s_hat, s_tilde) in {0,1}^4."""

    def __init__(self, p: np.ndarray):
        p = np.asarray(p, dtype=float)
        if p.shape != (2, 2, 2, 2):
            p = p.reshape(2, 2, 2, 2)
        if np.any(p < -_PMF_TOL):
            raise ValueError(f"pmf has a negative cell: min={p.min():.3e}")
        total = float(p.sum())
        if abs(total - 1.0) > _PMF_TOL:
            raise ValueError(f"pmf mass is {total!r}, not 1")
        self.p = np.clip(p, 0.0, None)

    def pr_tilde_zero_and_n_zero(self) -> float:
        return float(self.p[:, 0, :, 0].sum())

    def marginal_fn(self) -> np.ndarray:
        return self.p.sum(axis=(2, 3))

    def pr_tilde_one(self) -> float:
        return float(self.p[:, :, :, 1].sum())

    def distortion_f_hat(self) -> float:
        return float(self.p[0, :, 1, :].sum() + self.p[1, :, 0, :].sum())

    def distortion_hat_tilde(self) -> float:
        return float(self.p[:, :, 0, 1].sum() + self.p[:, :, 1, 0].sum())

    def breakdown(self) -> DistortionBreakdown:
        return DistortionBreakdown(
            d_fb=self.distortion_f_hat(),
            d10=float(self.p[1, :, 0, :].sum()),
            d01=float(self.p[0, :, 1, :].sum()),
            d10_tilde=float(self.p[:, :, 0, 1].sum()),
            d01_tilde=float(self.p[:, :, 1, 0].sum()),
        )


def max_off_closed_form(spec: ChannelSpec, d_fb: float) -> float:
    """Maximal Pr(S_tilde = S_N = 0) at distortion budget d_fb.

    delta^2 + d_fb (1-delta) when delta <= 1/2, else delta^2 + d_fb delta;
    the branches agree at delta = 1/2.
    """
    d_fb = _check_d_fb(spec, d_fb)
    delta = spec.delta
    if delta <= 0.5:
        return delta * delta + d_fb * (1.0 - delta)
    return delta * delta + d_fb * delta


def constructive_pmf(spec: ChannelSpec, d_fb: float) -> JointPmf4:
    """Joint pmf realizing the closed-form optimum by explicit transitions.

    (S_F, S_N) is product Bernoulli(1-delta). For delta <= 1/2 the estimate
    raises a d_fb mass of zeros to ones (independently of S_N), and the
    reimagined sequence lowers the same mass back to zero on cells where
    S_N = 0, restoring the Bernoulli(1-delta) marginal while landing the
    extra mass on the target event. For delta > 1/2 the mirror recipe lowers
    ones first and re-raises on S_N = 1 cells.
    """
    d_fb = _check_d_fb(spec, d_fb)
    delta = spec.delta
    p = np.zeros((2, 2, 2, 2))
    p_one = 1.0 - delta  # Pr(state = 1)

    if d_fb == 0.0:
        for s_f, pf in ((0, delta), (1, p_one)):
            for s_n, pn in ((0, delta), (1, p_one)):
                p[s_f, s_n, s_f, s_f] = pf * pn
        return JointPmf4(p)

    if delta <= 0.5:
        # Estimate flips 0 -> 1 with mass d_fb; requires d_fb <= delta.
        phi = d_fb / delta
        denom = (p_one + d_fb) * delta  # Pr(S_hat = 1, S_N = 0)
        psi = d_fb / denom if denom > 0.0 else 0.0
        if phi > 1.0 + _RANGE_TOL or psi > 1.0 + _RANGE_TOL:
            raise ConstructionInfeasible(
                f"transition masses out of range: phi={phi!r}, psi={psi!r}"
            )
        phi, psi = min(phi, 1.0), min(psi, 1.0)
        p[1, 1, 1, 1] = p_one * p_one
        p[1, 0, 1, 0] = p_one * delta * psi
        p[1, 0, 1, 1] = p_one * delta * (1.0 - psi)
        p[0, 1, 1, 1] = delta * p_one * phi
        p[0, 1, 0, 0] = delta * p_one * (1.0 - phi)
        p[0, 0, 1, 0] = delta * delta * phi * psi
        p[0, 0, 1, 1] = delta * delta * phi * (1.0 - psi)
        p[0, 0, 0, 0] = delta * delta * (1.0 - phi)
    else:
        # Estimate flips 1 -> 0 with mass d_fb; requires d_fb <= 1 - delta.
        phi = d_fb / p_one
        denom = (delta + d_fb) * p_one  # Pr(S_hat = 0, S_N = 1)
        psi = d_fb / denom if denom > 0.0 else 0.0
        if phi > 1.0 + _RANGE_TOL or psi > 1.0 + _RANGE_TOL:
            raise ConstructionInfeasible(
                f"transition masses out of range: phi={phi!r}, psi={psi!r}"
            )
        phi, psi = min(phi, 1.0), min(psi, 1.0)
        p[1, 1, 1, 1] = p_one * p_one * (1.0 - phi)
        p[1, 1, 0, 1] = p_one * p_one * phi * psi
        p[1, 1, 0, 0] = p_one * p_one * phi * (1.0 - psi)
        p[1, 0, 1, 1] = p_one * delta * (1.0 - phi)
        p[1, 0, 0, 0] = p_one * delta * phi
        p[0, 1, 0, 1] = delta * p_one * psi
        p[0, 1, 0, 0] = delta * p_one * (1.0 - psi)
        p[0, 0, 0, 0] = delta * delta
    return JointPmf4(p)


def max_off_constructive(spec: ChannelSpec, d_fb: float) -> float:
    """Pr(S_tilde = S_N = 0) summed directly from the explicit pmf."""
    return constructive_pmf(spec, d_fb).pr_tilde_zero_and_n_zero()


def _lp_arrays(spec: ChannelSpec, d_fb: float, distortion_equality: bool):
    delta = spec.delta
    p_one = 1.0 - delta
    idx = {
        (sf, sn, sh, st): ((sf * 2 + sn) * 2 + sh) * 2 + st
        for sf in (0, 1)
        for sn in (0, 1)
        for sh in (0, 1)
        for st in (0, 1)
    }
    n = 16

    obj = np.zeros(n)  # maximize Pr(S_tilde = 0, S_N = 0)
    for sf in (0, 1):
        for sh in (0, 1):
            obj[idx[sf, 0, sh, 0]] = 1.0

    a_eq, b_eq = [], []
    for sf, pf in ((0, delta), (1, p_one)):
        for sn, pn in ((0, delta), (1, p_one)):
            row = np.zeros(n)
            for sh in (0, 1):
                for st in (0, 1):
                    row[idx[sf, sn, sh, st]] = 1.0
            a_eq.append(row)
            b_eq.append(pf * pn)

    row = np.zeros(n)  # Pr(S_tilde = 1) = 1 - delta
    for sf in (0, 1):
        for sn in (0, 1):
            for sh in (0, 1):
                row[idx[sf, sn, sh, 1]] = 1.0
    a_eq.append(row)
    b_eq.append(p_one)

    dist_f = np.zeros(n)  # E d(S_F, S_hat)
    for sf in (0, 1):
        for sn in (0, 1):
            for st in (0, 1):
                dist_f[idx[sf, sn, 1 - sf, st]] = 1.0
    a_ub, b_ub = [], []
    if distortion_equality:
        a_eq.append(dist_f)
        b_eq.append(d_fb)
    else:
        a_ub.append(dist_f)
        b_ub.append(d_fb)

    dist_t = np.zeros(n)  # E d(S_hat, S_tilde) <= d_fb
    for sf in (0, 1):
        for sn in (0, 1):
            for sh in (0, 1):
                dist_t[idx[sf, sn, sh, 1 - sh]] = 1.0
    a_ub.append(dist_t)
    b_ub.append(d_fb)

    return obj, np.array(a_eq), np.array(b_eq), np.array(a_ub), np.array(b_ub)


def max_off_lp_solution(
    spec: ChannelSpec, d_fb: float, distortion_equality: bool = True
) -> tuple[float, JointPmf4]:
    """LP relaxation optimum and its optimizing pmf.

    The per-symbol LP keeps the marginal, distortion, and product
    constraints but drops the feedback-encoder consistency structure, so its
    value upper-bounds (and need not equal) the closed form.
    """
    d_fb = _check_d_fb(spec, d_fb)
    obj, a_eq, b_eq, a_ub, b_ub = _lp_arrays(spec, d_fb, distortion_equality)
    result = solve_lp(-obj, a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub)
    pmf = JointPmf4(result.x)
    value = -result.objective
    _check_lp_feasibility(spec, d_fb, pmf, distortion_equality)
    return value, pmf


def max_off_lp(spec: ChannelSpec, d_fb: float, distortion_equality: bool = True) -> float:
    value, _ = max_off_lp_solution(spec, d_fb, distortion_equality)
    return value


def _check_lp_feasibility(
    spec: ChannelSpec, d_fb: float, pmf: JointPmf4, distortion_equality: bool, tol: float = 1e-10
) -> None:
    # Re-derived from the pmf cells, independently of the simplex tableau.
    delta = spec.delta
    marg = pmf.marginal_fn()
    expect = np.array(
        [[delta * delta, delta * (1 - delta)], [(1 - delta) * delta, (1 - delta) * (1 - delta)]]
    )
    if np.max(np.abs(marg - expect)) > tol:
        raise RuntimeError("LP solution violates the product state marginal")
    if abs(pmf.pr_tilde_one() - (1.0 - delta)) > tol:
        raise RuntimeError("LP solution violates the reimagined-sequence marginal")
    df = pmf.distortion_f_hat()
    if distortion_equality and abs(df - d_fb) > tol:
        raise RuntimeError(f"LP solution violates the estimate distortion: {df!r}")
    if not distortion_equality and df > d_fb + tol:
        raise RuntimeError(f"LP solution violates the estimate distortion: {df!r}")
    if pmf.distortion_hat_tilde() > d_fb + tol:
        raise RuntimeError("LP solution violates the reimagining distortion")


def max_min_a(spec: ChannelSpec, budget: FeedbackBudget) -> float:
    """Worst-case probability that at least one of the two states is on.

    A = gamma (1-delta) + (1-gamma)(1-delta^2) with gamma from the
    outer-bound parameters; algebraically A = beta (1-delta).
    """
    gamma = outer_bound_params(spec, budget).gamma_out
    delta = spec.delta
    return gamma * (1.0 - delta) + (1.0 - gamma) * (1.0 - delta * delta)


@dataclass(frozen=True)
class MaxOffReport:
    """All routes to the d_fb-level correlation bound at one operating point."""

    delta: float
    d_fb: float
    closed_form: float
    constructive: float
    lp_upper: float
    a_value: float

    def to_json_dict(self) -> dict:
        return {
            "delta": self.delta,
            "d_fb": self.d_fb,
            "closed_form": self.closed_form,
            "constructive": self.constructive,
            "lp_upper": self.lp_upper,
            "a_value": self.a_value,
        }

    def self_check(self) -> None:
        if abs(self.constructive - self.closed_form) > 1e-12:
            raise RuntimeError(
                f"constructive {self.constructive!r} deviates from closed form {self.closed_form!r}"
            )
        if self.lp_upper < self.closed_form - 1e-9:
            raise RuntimeError(
                f"LP optimum {self.lp_upper!r} fell below closed form {self.closed_form!r}"
            )


def build_max_off_report(spec: ChannelSpec, d_fb: float) -> MaxOffReport:
    """Evaluate all three routes plus the complement-event value at gamma~ = d_fb / min."""
    d_fb = _check_d_fb(spec, d_fb)
    delta = spec.delta
    d_max = min(delta, 1.0 - delta)
    gamma_t = d_fb / d_max if d_max > 0.0 else 0.0
    a_value = gamma_t * (1.0 - delta) + (1.0 - gamma_t) * (1.0 - delta * delta)
    return MaxOffReport(
        delta=delta,
        d_fb=d_fb,
        closed_form=max_off_closed_form(spec, d_fb),
        constructive=max_off_constructive(spec, d_fb),
        lp_upper=max_off_lp(spec, d_fb),
        a_value=a_value,
    )
