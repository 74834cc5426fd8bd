"""Filippov prey-switching model: sliding dynamics and Shilnikov connection search."""

from ._core import (
    PreyswitchError,
    build_n_point,
    classify,
    distance_to_connection,
    find_connection,
    first_integral_F,
    first_return,
    focus,
    load_params,
    lv_period,
    mu_curve,
    mu_point,
    simulate,
    sliding_field,
    validate,
    verify_connection,
)

__all__ = [
    "PreyswitchError",
    "build_n_point",
    "classify",
    "distance_to_connection",
    "find_connection",
    "first_integral_F",
    "first_return",
    "focus",
    "load_params",
    "lv_period",
    "mu_curve",
    "mu_point",
    "simulate",
    "sliding_field",
    "validate",
    "verify_connection",
]
