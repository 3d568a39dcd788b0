"""Tie-range analytics, the tie formation model and endowment fitting."""

from ._core import (
    Error,
    Graph,
    InvalidArgument,
    TemporalNetwork,
    TieTable,
    benefit,
    decompose,
    fit,
    generate,
    ingest,
    loss,
    optimal_investment,
    range_distribution,
    read_events,
    simulate,
    strength_series,
    tie_range,
    tie_range_all,
    transition_matrix,
)

__all__ = [
    "Error",
    "Graph",
    "InvalidArgument",
    "TemporalNetwork",
    "TieTable",
    "benefit",
    "decompose",
    "fit",
    "generate",
    "ingest",
    "loss",
    "optimal_investment",
    "range_distribution",
    "read_events",
    "simulate",
    "strength_series",
    "tie_range",
    "tie_range_all",
    "transition_matrix",
]
