"""Information-driven gimbal view planning."""

from ._core import (
    InfoMap,
    PlannerError,
    curve_argmax,
    fisher_matrix,
    fisher_trace,
    fit_curve,
    gimbal_ik,
    plan_once,
    run_scenario_text,
    sample_gains,
    wrap_angle,
)

__all__ = [
    "InfoMap",
    "PlannerError",
    "curve_argmax",
    "fisher_matrix",
    "fisher_trace",
    "fit_curve",
    "gimbal_ik",
    "plan_once",
    "run_scenario_text",
    "sample_gains",
    "wrap_angle",
]
