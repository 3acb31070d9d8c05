"""Two-user broadcast erasure channel with one-sided rate-limited feedback.

Distortion-based outer bounds, converse-verification oracles, and Monte
Carlo simulations of feedback strategies and network-coded delivery.
"""

from .converse import (
    ConstructionInfeasible,
    DistortionBreakdown,
    JointPmf4,
    MaxOffReport,
    build_max_off_report,
    constructive_pmf,
    max_min_a,
    max_off_closed_form,
    max_off_constructive,
    max_off_lp,
    max_off_lp_solution,
)
from .infotheory import (
    ChannelSpec,
    FeedbackBudget,
    OuterBoundParams,
    binary_entropy,
    inverse_binary_entropy,
    min_distortion,
    outer_bound_params,
)
from .regions import (
    RatePair,
    RateRegion,
    SumRateCurve,
    SumRateRow,
    corner_points,
    global_feedback_region,
    no_feedback_region,
    outer_region,
    partial_csi_sum_rate,
    sweep,
    symmetric_sum_rate,
)
from .simulator import (
    BudgetViolation,
    ConverseViolation,
    FeedbackTranscript,
    ReconstructionSequence,
    SimulationReport,
    StateSequence,
    StrategyResult,
    estimate_distortion,
    feedback_codebook,
    feedback_decimated,
    feedback_lossless_block,
    feedback_perfect,
    generate_states,
    run_distortion_converse_sweep,
    run_point_a_demo,
    run_two_phase_scheme,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "FeedbackBudget",
    "OuterBoundParams",
    "binary_entropy",
    "inverse_binary_entropy",
    "min_distortion",
    "outer_bound_params",
    "RatePair",
    "RateRegion",
    "SumRateCurve",
    "SumRateRow",
    "outer_region",
    "global_feedback_region",
    "no_feedback_region",
    "symmetric_sum_rate",
    "partial_csi_sum_rate",
    "sweep",
    "corner_points",
    "ConstructionInfeasible",
    "DistortionBreakdown",
    "JointPmf4",
    "MaxOffReport",
    "max_off_closed_form",
    "max_off_constructive",
    "max_off_lp",
    "max_off_lp_solution",
    "max_min_a",
    "constructive_pmf",
    "build_max_off_report",
    "BudgetViolation",
    "ConverseViolation",
    "StateSequence",
    "ReconstructionSequence",
    "FeedbackTranscript",
    "SimulationReport",
    "StrategyResult",
    "generate_states",
    "feedback_perfect",
    "feedback_decimated",
    "feedback_lossless_block",
    "feedback_codebook",
    "estimate_distortion",
    "run_two_phase_scheme",
    "run_point_a_demo",
    "run_distortion_converse_sweep",
]
