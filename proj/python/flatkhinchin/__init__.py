"""Straight-line flows, periodic cylinders, and first-return interval
exchanges on translation surfaces (C++ core)."""

from ._core import (
    FlatSurfaceError,
    Iet,
    Surface,
    covers_circle,
    cylinders,
    distance,
    divergence_verdict,
    first_return_iet,
    flow_point,
    minimal_covering_constant,
    partial_sums,
    recurrence_scan,
    run_iet_recurrence,
    run_khinchin_flow,
    saddle_connections,
    trace,
    union_measure,
)

__all__ = [
    "FlatSurfaceError",
    "Iet",
    "Surface",
    "covers_circle",
    "cylinders",
    "distance",
    "divergence_verdict",
    "first_return_iet",
    "flow_point",
    "minimal_covering_constant",
    "partial_sums",
    "recurrence_scan",
    "run_iet_recurrence",
    "run_khinchin_flow",
    "saddle_connections",
    "trace",
    "union_measure",
]
