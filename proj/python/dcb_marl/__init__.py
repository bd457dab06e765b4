"""Demand-capacity balancing with multiagent ground-delay learners."""

from ._core import (
    DcbError,
    LearnerConfig,
    Method,
    RewardParams,
    Scenario,
    TrafficModel,
    degree_of_difficulty,
    epsilon_at,
    global_reward,
    hotspot_cost,
    oracle,
    run_metrics,
    train,
)

__all__ = [
    "DcbError",
    "LearnerConfig",
    "Method",
    "RewardParams",
    "Scenario",
    "TrafficModel",
    "degree_of_difficulty",
    "epsilon_at",
    "global_reward",
    "hotspot_cost",
    "oracle",
    "run_metrics",
    "train",
]
