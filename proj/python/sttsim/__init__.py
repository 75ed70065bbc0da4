"""Trace-driven simulator of an SRAM/STT-RAM cache hierarchy under attack."""

import json

from ._core import (
    MtjParams,
    __version__,
    canonical_config,
    config_hash,
    detection_lead,
    effective_barrier,
    flip_probability,
    generate_trace_text,
    retention_time,
    run_json,
    sweep_csv,
    thermal_barrier,
)

__all__ = [
    "MtjParams",
    "__version__",
    "canonical_config",
    "config_hash",
    "detection_lead",
    "effective_barrier",
    "flip_probability",
    "generate_trace_text",
    "retention_time",
    "run",
    "run_json",
    "sweep_csv",
    "thermal_barrier",
]


def run(config_text, trace_text="", apply_env=False):
    """Simulate one configuration and return the report as a dict."""
    return json.loads(run_json(config_text, trace_text, apply_env))
