"""Render text reports with Jinja2."""

from __future__ import annotations

import math
from typing import Any

import jinja2

from .const import LOWERBOUND_REPORT_TEMPLATE, PACKAGE_NAME, RUN_REPORT_TEMPLATE
from .model import (
    DumbbellReport,
    LayeredReport,
    PhaseRatioReport,
    SimConfig,
    TrialSummary,
)
from .util import lower_median


def _environment() -> jinja2.Environment:
    return jinja2.Environment(
        trim_blocks=True,
        lstrip_blocks=True,
        keep_trailing_newline=True,
        autoescape=False,
        loader=jinja2.PackageLoader(PACKAGE_NAME, "resources"),
    )


def _number(value: float | None, digits: int = 4) -> str:
    if value is None or math.isnan(value):
        return "-"
    return f"{value:.{digits}g}"


def render_run_report(
    cfg: SimConfig,
    n: int,
    summary: TrialSummary,
    warnings: list[str],
    violations: int,
    phase_ratios: PhaseRatioReport | None = None,
    generated: str | None = None,
) -> str:
    """Render report of a batch of runs."""
    template = _environment().get_template(RUN_REPORT_TEMPLATE)
    ratios: dict[str, Any] = {}
    if phase_ratios is not None and phase_ratios.per_trial:
        ratios = {
            "d": phase_ratios.d,
            "T": phase_ratios.T,
            "median_growth": lower_median(phase_ratios.round_ratios),
            "median_final": lower_median(phase_ratios.final_ratios),
            "skipped": phase_ratios.skipped,
        }
    return template.render(
        cfg=cfg,
        n=n,
        summary=summary,
        warnings=sorted(set(warnings)),
        violations=violations,
        ratios=ratios,
        generated=generated,
        number=_number,
    )


def render_lowerbound_report(
    report: LayeredReport | DumbbellReport, generated: str | None = None
) -> str:
    """Render report of a lower-bound suite."""
    template = _environment().get_template(LOWERBOUND_REPORT_TEMPLATE)
    layered = isinstance(report, LayeredReport)
    return template.render(
        report=report,
        layered=layered,
        stars=report.stars.to_dict("records") if layered else [],
        generated=generated,
        number=_number,
    )
