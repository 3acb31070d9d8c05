"""Scalar information-theoretic primitives.

Binary entropy, its numerical inverse on the monotone branch [0, 1/2], and
the derived feedback-distortion triple (D*, gamma, beta) that parameterizes
the outer-bound region. All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ChannelSpec",
    "FeedbackBudget",
    "OuterBoundParams",
    "binary_entropy",
    "inverse_binary_entropy",
    "min_distortion",
    "outer_bound_params",
]

# Bisection: interval width well below the 1e-12 contract, hard iteration cap.
_BISECT_WIDTH = 1e-15
_BISECT_MAX_ITER = 200


@dataclass(frozen=True)
class ChannelSpec:
    """Homogeneous two-user erasure channel: erasure probability and block length.

    A state bit is 1 ("received") with probability 1 - delta, independently
    across time and across users.
    """

    delta: float
    block_len: int = 1

    def __post_init__(self) -> None:
        if not math.isfinite(self.delta):
            raise ValueError(f"delta must be finite, got {self.delta!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta}")
        if int(self.block_len) != self.block_len or self.block_len < 1:
            raise ValueError(f"block_len must be a positive integer, got {self.block_len}")


@dataclass(frozen=True)
class FeedbackBudget:
    """Per-use capacity of the feedback link, in bits per channel use."""

    cfb: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.cfb) or self.cfb < 0.0:
            raise ValueError(f"cfb must be a finite nonnegative number, got {self.cfb!r}")


@dataclass(frozen=True)
class OuterBoundParams:
    """Derived triple (D*, gamma, beta) for one (delta, cfb) operating point.

    d_star is the minimum attainable Hamming distortion when describing the
    Bernoulli(1 - delta) state process at rate cfb; gamma normalizes it by
    min{delta, 1 - delta}; beta interpolates between 1 (no feedback) and
    1 + delta (feedback-rich).
    """

    d_star: float
    gamma_out: float
    beta_out: float


def binary_entropy(p: float) -> float:
    """H(p) = -p log2 p - (1-p) log2(1-p), with 0 log 0 = 0."""
    if not math.isfinite(p):
        raise ValueError(f"p must be finite, got {p!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def inverse_binary_entropy(h: float) -> float:
    """The unique p in [0, 1/2] with binary_entropy(p) == h.

    Bisection on the increasing restriction of H to [0, 1/2]; H' vanishes at
    1/2, which rules out a naive Newton iteration there. Absolute tolerance
    on p is 1e-12 (the interval is driven well below that).
    """
    if not math.isfinite(h):
        raise ValueError(f"h must be finite, got {h!r}")
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"h must lie in [0, 1], got {h}")
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(_BISECT_MAX_ITER):
        if hi - lo <= _BISECT_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def min_distortion(spec: ChannelSpec, budget: FeedbackBudget) -> float:
    """Minimum Hamming distortion D* for the state process at rate cfb.

    Solves H(D) = (H(delta) - cfb)^+ for D in [0, min{delta, 1-delta}].
    The positive part uses an exact >= comparison against H(delta): whenever
    cfb >= H(delta) the result is exactly 0.0, not merely small.
    """
    d_max = min(spec.delta, 1.0 - spec.delta)
    excess = binary_entropy(spec.delta) - budget.cfb
    if excess <= 0.0:
        return 0.0
    if budget.cfb == 0.0:
        # H(D) = H(delta) with D <= 1/2 forces D = min{delta, 1-delta} exactly.
        return d_max
    d = inverse_binary_entropy(excess)
    return min(max(d, 0.0), d_max)


def outer_bound_params(spec: ChannelSpec, budget: FeedbackBudget) -> OuterBoundParams:
    """The triple (D*, gamma, beta) for the outer-bound region.

    gamma = D* / min{delta, 1-delta}, taken as 0 when delta is 0 or 1 (D* is
    forced to 0 there, and this choice keeps beta = 1 + delta continuous);
    beta = gamma + (1 - gamma)(1 + delta).
    """
    d_star = min_distortion(spec, budget)
    d_max = min(spec.delta, 1.0 - spec.delta)
    if d_max == 0.0:
        gamma = 0.0
    else:
        gamma = min(d_star / d_max, 1.0)
    beta = gamma + (1.0 - gamma) * (1.0 + spec.delta)
    return OuterBoundParams(d_star=d_star, gamma_out=gamma, beta_out=beta)
