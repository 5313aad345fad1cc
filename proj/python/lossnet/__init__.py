"""Routing games on loss networks: optimum, equilibria, price of anarchy."""

from ._core import (
    CapacityExceeded,
    Instance,
    InvalidArgument,
    best_response_dynamics,
    brute_force_optimal,
    enumerate_nash,
    instance_from_json,
    is_nash,
    is_nash_oracle,
    loss_rate,
    poa_report,
    preset_sweep_csv,
    run_sweep,
    simulate,
    solve_optimal,
    total_traffic,
    traffic_rates,
    two_source_classify,
    two_source_scan,
)

__all__ = [
    "CapacityExceeded",
    "Instance",
    "InvalidArgument",
    "best_response_dynamics",
    "brute_force_optimal",
    "enumerate_nash",
    "instance_from_json",
    "is_nash",
    "is_nash_oracle",
    "loss_rate",
    "poa_report",
    "preset_sweep_csv",
    "run_sweep",
    "simulate",
    "solve_optimal",
    "total_traffic",
    "traffic_rates",
    "two_source_classify",
    "two_source_scan",
]
