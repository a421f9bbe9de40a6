"""Analysis reports and their JSON / CSV encodings."""
from __future__ import annotations

import csv
import io
import json
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from . import __version__

CSV_HEADER = ("t", "analytic", "quad_err", "mc", "mc_halfwidth", "mode", "terms")
FORMATS = ("json", "csv")


class PointRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    t: float
    analytic_value: Optional[float] = Field(default=None, alias="analyticValue")
    quad_error: Optional[float] = Field(default=None, alias="quadError")
    mc_estimate: Optional[float] = Field(default=None, alias="mcEstimate")
    mc_half_width: Optional[float] = Field(default=None, alias="mcHalfWidth")
    mode: str = "exact"
    term_count: int = Field(default=0, alias="termCount")


class AnalysisReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True, protected_namespaces=())

    model_digest: str = Field(alias="modelDigest")
    seed: Optional[int] = None
    tool_version: str = Field(default=__version__, alias="toolVersion")
    method: str = "analytic"
    points: List[PointRecord] = Field(default_factory=list)


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: AnalysisReport, fmt: str = "json") -> bytes:
    """Encode ``report``; identical reports give identical bytes."""
    if fmt == "json":
        payload = report.model_dump(by_alias=True)
        return (json.dumps(payload, indent=2, ensure_ascii=True) + "\n").encode("utf-8")
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for point in report.points:
            writer.writerow(
                [
                    _cell(point.t),
                    _cell(point.analytic_value),
                    _cell(point.quad_error),
                    _cell(point.mc_estimate),
                    _cell(point.mc_half_width),
                    point.mode,
                    point.term_count,
                ]
            )
        return buffer.getvalue().encode("utf-8")
    raise ValueError(f"Unknown report format: {fmt}")
