"""Lower bounds for binary quadratic programs from SDP and DNN relaxations."""

from ._core import (
    BqpInstance,
    FileError,
    FormatError,
    MaxCutGraph,
    brute_force_bqp,
    brute_force_maxcut,
    generate_instance,
    load_graph,
    load_instance,
    performance_profile,
    random_graph,
    rank_one_certificate,
    solve_maxcut,
    solve_relaxation,
    verify_theorem3,
    verify_theorem4,
)

__all__ = [
    "BqpInstance",
    "FileError",
    "FormatError",
    "MaxCutGraph",
    "brute_force_bqp",
    "brute_force_maxcut",
    "generate_instance",
    "load_graph",
    "load_instance",
    "performance_profile",
    "random_graph",
    "rank_one_certificate",
    "solve_maxcut",
    "solve_relaxation",
    "verify_theorem3",
    "verify_theorem4",
]
