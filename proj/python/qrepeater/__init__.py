"""Optimal entanglement swapping in quantum repeater chains."""

from ._core import (
    Intractable,
    InvalidArgument,
    NumericalError,
    enumerate_states,
    evaluate,
    mdp_size,
    policy,
    predicted_count,
    simulate,
    solve,
)

__all__ = [
    "Intractable",
    "InvalidArgument",
    "NumericalError",
    "enumerate_states",
    "evaluate",
    "mdp_size",
    "policy",
    "predicted_count",
    "simulate",
    "solve",
]
