"""Python bindings for the overton political-position audit toolkit."""

import json as _json
from dataclasses import dataclass
from typing import Optional

from ._overton import (
    Axis,
    ConfigError,
    GeometryError,
    OvertonError,
    ParseError,
    Persona,
    Proposition,
    Rating,
    ReplayMissError,
    SurveyInstrument,
    UndefinedPositionError,
    area_pct,
    binary_agreement,
    build_prompt,
    classify,
    cohen_kappa,
    compute_position,
    convex_hull,
    load_instrument,
    parse_rating,
    persona_catalog,
    quadrant_coverage,
)
from . import _overton


@dataclass
class AuditRun:
    exit_code: int
    report: Optional[dict]
    live_calls: int
    message: str


def reliability_report(gold, pred) -> dict:
    return _json.loads(_overton.reliability_report_json(gold, pred))


def run_audit(manifest, mode: Optional[str] = None, out=None) -> AuditRun:
    """Run the audit a manifest describes. `mode` is live-record, replay-strict or replay-fallthrough."""
    code, report, calls, message = _overton.run_audit_json(str(manifest), mode, None if out is None else str(out))
    return AuditRun(code, _json.loads(report) if report else None, calls, message)


__all__ = [
    "AuditRun", "Axis", "ConfigError", "GeometryError", "OvertonError", "ParseError", "Persona",
    "Proposition", "Rating", "ReplayMissError", "SurveyInstrument", "UndefinedPositionError",
    "area_pct", "binary_agreement", "build_prompt", "classify", "cohen_kappa", "compute_position",
    "convex_hull", "load_instrument", "parse_rating", "persona_catalog", "quadrant_coverage",
    "reliability_report", "run_audit",
]
