"""Rate regions as half-plane intersections.

A region is a list of half-planes a*R_F + b*R_N <= c intersected with the
nonnegative quadrant. Provides the feedback-limited outer bound, the
global-delayed-feedback capacity region, the no-feedback baseline, the
partial-CSI time-sharing baseline, corner-point enumeration, and sum-rate
sweeps over the feedback capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .infotheory import ChannelSpec, FeedbackBudget, binary_entropy, outer_bound_params

__all__ = [
    "RatePair",
    "RateRegion",
    "SumRateRow",
    "SumRateCurve",
    "SWEEP_CSV_HEADER",
    "outer_region",
    "global_feedback_region",
    "no_feedback_region",
    "symmetric_sum_rate",
    "partial_csi_sum_rate",
    "sweep",
    "corner_points",
]

_FEAS_TOL = 1e-12
_DEDUP_TOL = 1e-9

SWEEP_CSV_HEADER = "cfb,d_star,gamma_out,beta_out,sum_outer,sum_global_fb,sum_no_fb,sum_partial_csi"


@dataclass(frozen=True)
class RatePair:
    r_f: float
    r_n: float

    def __post_init__(self) -> None:
        if self.r_f < 0.0 or self.r_n < 0.0:
            raise ValueError(f"rates must be nonnegative, got ({self.r_f}, {self.r_n})")


@dataclass(frozen=True)
class RateRegion:
    """Intersection of half-planes a*R_F + b*R_N <= c with the quadrant R_F, R_N >= 0."""

    halfplanes: tuple[tuple[float, float, float], ...]
    label: str = ""

    def __post_init__(self) -> None:
        for a, b, c in self.halfplanes:
            if a == 0.0 and b == 0.0:
                raise ValueError("half-plane normal must be nonzero")
            if c < 0.0:
                raise ValueError(f"half-plane offset must be nonnegative, got {c}")

    def contains(self, r_f: float, r_n: float, tol: float = _FEAS_TOL) -> bool:
        if r_f < -tol or r_n < -tol:
            return False
        return all(a * r_f + b * r_n <= c + tol for a, b, c in self.halfplanes)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "halfplanes": [[a, b, c] for a, b, c in self.halfplanes],
            "corners": [[p.r_f, p.r_n] for p in corner_points(self)],
        }


def outer_region(spec: ChannelSpec, budget: FeedbackBudget) -> RateRegion:
    """Outer bound { R_F + beta R_N <= beta(1-delta) ; beta R_F + R_N <= beta(1-delta) }.

    Always exactly two half-planes; they coincide when beta == 1.
    """
    params = outer_bound_params(spec, budget)
    beta = params.beta_out
    c = beta * (1.0 - spec.delta)
    return RateRegion(
        halfplanes=((1.0, beta, c), (beta, 1.0, c)),
        label=f"outer(delta={spec.delta:g}, cfb={budget.cfb:g})",
    )


def global_feedback_region(spec: ChannelSpec) -> RateRegion:
    """Capacity region with global delayed state feedback.

    R_F/(1-delta^2) + R_N/(1-delta) <= 1 and the mirror, cleared of
    denominators so each plane reads a*R_F + b*R_N <= (1+delta)(1-delta).
    At delta = 1 both offsets are 0 and the region degenerates to {(0, 0)}.
    """
    d = spec.delta
    c = (1.0 + d) * (1.0 - d)
    return RateRegion(
        halfplanes=((1.0, 1.0 + d, c), (1.0 + d, 1.0, c)),
        label=f"global_fb(delta={d:g})",
    )


def no_feedback_region(spec: ChannelSpec) -> RateRegion:
    """Time-sharing baseline { R_F + R_N <= 1 - delta }."""
    return RateRegion(
        halfplanes=((1.0, 1.0, 1.0 - spec.delta),),
        label=f"no_fb(delta={spec.delta:g})",
    )


def symmetric_sum_rate(region: RateRegion) -> float:
    """max { R_F + R_N : R_F = R_N in the region } = 2 min_i c_i / (a_i + b_i)."""
    best = math.inf
    for a, b, c in region.halfplanes:
        denom = a + b
        if denom <= 0.0:
            raise ValueError(f"half-plane ({a}, {b}, {c}) is unbounded along the diagonal")
        best = min(best, c / denom)
    if not region.halfplanes:
        raise ValueError("region has no half-planes")
    return 2.0 * best


def partial_csi_sum_rate(spec: ChannelSpec, budget: FeedbackBudget) -> float:
    """Sum rate of feeding back a fraction of the state sequence losslessly.

    A lambda = min{1, cfb/H(delta)} fraction of the block gets perfect delayed
    state feedback (compressed at entropy rate), the rest runs without
    feedback; the result is the time-sharing interpolation between the two
    symmetric sum rates.
    """
    d = spec.delta
    if d == 0.0 or d == 1.0:
        return 1.0 - d
    lam = min(1.0, budget.cfb / binary_entropy(d))
    s_fb = symmetric_sum_rate(global_feedback_region(spec))
    return lam * s_fb + (1.0 - lam) * (1.0 - d)


@dataclass(frozen=True)
class SumRateRow:
    cfb: float
    d_star: float
    gamma_out: float
    beta_out: float
    sum_outer: float
    sum_global_fb: float
    sum_no_fb: float
    sum_partial_csi: float


@dataclass(frozen=True)
class SumRateCurve:
    """Sum-rate values on a uniform cfb grid, with the feedback-saturation point.

    point_a_cfb is the exact capacity H(delta) at which the outer bound meets
    the global-feedback region; point_a_index is the first grid row at or
    beyond it (None if the grid stops short).
    """

    delta: float
    rows: tuple[SumRateRow, ...]
    point_a_cfb: float
    point_a_index: int | None

    def write_csv(self, out: TextIO) -> None:
        out.write(SWEEP_CSV_HEADER + "\n")
        for r in self.rows:
            out.write(
                ",".join(
                    format(v, ".17g")
                    for v in (
                        r.cfb,
                        r.d_star,
                        r.gamma_out,
                        r.beta_out,
                        r.sum_outer,
                        r.sum_global_fb,
                        r.sum_no_fb,
                        r.sum_partial_csi,
                    )
                )
                + "\n"
            )


def sweep(spec: ChannelSpec, cfb_min: float, cfb_max: float, steps: int) -> SumRateCurve:
    """Evaluate all four sum rates on a uniform grid of `steps` cfb values."""
    if not 0.0 <= cfb_min < cfb_max:
        raise ValueError(f"need 0 <= cfb_min < cfb_max, got [{cfb_min}, {cfb_max}]")
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    h_delta = binary_entropy(spec.delta)
    s_no_fb = symmetric_sum_rate(no_feedback_region(spec))
    s_global = symmetric_sum_rate(global_feedback_region(spec))
    rows = []
    point_a_index = None
    for i in range(steps):
        cfb = cfb_min + (cfb_max - cfb_min) * i / (steps - 1)
        budget = FeedbackBudget(cfb)
        params = outer_bound_params(spec, budget)
        rows.append(
            SumRateRow(
                cfb=cfb,
                d_star=params.d_star,
                gamma_out=params.gamma_out,
                beta_out=params.beta_out,
                sum_outer=symmetric_sum_rate(outer_region(spec, budget)),
                sum_global_fb=s_global,
                sum_no_fb=s_no_fb,
                sum_partial_csi=partial_csi_sum_rate(spec, budget),
            )
        )
        if point_a_index is None and cfb >= h_delta:
            point_a_index = i
    return SumRateCurve(
        delta=spec.delta, rows=tuple(rows), point_a_cfb=h_delta, point_a_index=point_a_index
    )


def _recession_directions(lines: Sequence[tuple[float, float, float]]) -> Iterable[tuple[float, float]]:
    # Extreme rays of the recession cone lie on constraint boundaries or the axes.
    yield (1.0, 0.0)
    yield (0.0, 1.0)
    for a, b, _ in lines:
        for dx, dy in ((b, -a), (-b, a)):
            norm = math.hypot(dx, dy)
            if norm > 0.0 and dx >= -_FEAS_TOL * norm and dy >= -_FEAS_TOL * norm:
                yield (dx / norm, dy / norm)


def corner_points(region: RateRegion) -> list[RatePair]:
    """Vertices of the polygon cut by the half-planes and the axes.

    Sorted counterclockwise starting from (0, 0); candidate intersections are
    kept only when they satisfy every other constraint within 1e-12. Raises
    on unbounded regions.
    """
    planes = list(region.halfplanes)
    for dx, dy in _recession_directions(planes):
        if all(a * dx + b * dy <= _FEAS_TOL for a, b, _ in planes):
            raise ValueError(f"region {region.label!r} is unbounded along ({dx:g}, {dy:g})")

    lines = planes + [(-1.0, 0.0, 0.0), (0.0, -1.0, 0.0)]
    candidates: list[tuple[float, float]] = []
    for i in range(len(lines)):
        a1, b1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, b2, c2 = lines[j]
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-14:
                continue
            x = (c1 * b2 - c2 * b1) / det
            y = (a1 * c2 - a2 * c1) / det
            if x < -_FEAS_TOL or y < -_FEAS_TOL:
                continue
            if all(a * x + b * y <= c + _FEAS_TOL for a, b, c in planes):
                candidates.append((x + 0.0 if x != 0.0 else 0.0, y + 0.0 if y != 0.0 else 0.0))

    unique: list[tuple[float, float]] = []
    for x, y in candidates:
        if not any(abs(x - ux) <= _DEDUP_TOL and abs(y - uy) <= _DEDUP_TOL for ux, uy in unique):
            unique.append((x, y))
    if not unique:
        raise ValueError(f"region {region.label!r} has no feasible vertices")
    if len(unique) == 1:
        return [RatePair(*unique[0])]

    cx = sum(x for x, _ in unique) / len(unique)
    cy = sum(y for _, y in unique) / len(unique)
    unique.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
    origin = min(range(len(unique)), key=lambda k: unique[k][0] ** 2 + unique[k][1] ** 2)
    ordered = unique[origin:] + unique[:origin]
    return [RatePair(x, y) for x, y in ordered]
