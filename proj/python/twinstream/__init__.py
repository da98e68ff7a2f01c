"""Digital-twin adaptive streaming simulator (C++ core)."""

import json as _json

from ._twinstream import (
    Error,
    PreferenceTree,
    PreferenceVector,
    Rendition,
    TwinProfile,
    default_catalog,
    download_time,
    ema_update,
    load_catalog,
    optimize_ladder,
    predict_throughput,
    run_experiment,
    run_report,
    select_quality,
    train_tree,
    update_profile,
)

__all__ = [
    "Error",
    "PreferenceTree",
    "PreferenceVector",
    "Rendition",
    "TwinProfile",
    "default_catalog",
    "download_time",
    "ema_update",
    "load_catalog",
    "optimize_ladder",
    "predict_throughput",
    "run",
    "run_experiment",
    "run_report",
    "select_quality",
    "train_tree",
    "update_profile",
]


def run(config, overrides=None, threads=0):
    """Run a configured experiment and return the parsed report.json."""
    report, _ = run_report(str(config), {k: str(v) for k, v in (overrides or {}).items()}, threads)
    return _json.loads(report)
