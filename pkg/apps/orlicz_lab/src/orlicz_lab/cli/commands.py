"""The norm, kconst and verify commands."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import json
import logging
import math
import sys

from pydantic import ValidationError

from orlicz_lab.cli.manifest import RunRecorder
from orlicz_lab.cli.models import (
    ONE_DIMENSIONAL,
    ExperimentConfig,
    NormKind,
    NormSpec,
    RunConfig,
    RunOptions,
)
from orlicz_lab.core.config import config
from orlicz_lab.core.errors import ConfigError, OrliczLabError
from orlicz_lab.numerics.constants import KConstantReport, k1_phi, kp_phi, kp_phi_tilde
from orlicz_lab.numerics.functions import TestFunction2D
from orlicz_lab.numerics.norms import (
    gauge_norm_1d,
    gauge_norm_2d,
    iterated_gauge,
    lp_norm,
    lp_norm_2d,
    mixed_norm_hat,
    mixed_norm_p_phi,
    mixed_norm_pq,
)
from orlicz_lab.reporting.serialize import atomic_write_text, dumps, format_number, write_csv, write_json
from orlicz_lab.reporting.utils.template_management import summary_template
from orlicz_lab.verify.battery import CheckKind, run_experiment
from orlicz_lab.verify.checks import CheckStatus, Experiment, VerificationReport, describe
from orlicz_lab.verify.sharpness import check_sharpness


logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    CONFIG_ERROR = 2
    NUMERIC_ERROR = 3


@dataclass
class Job:
    experiment: Experiment
    functions: list[tuple[str, TestFunction2D]]
    checks: list[CheckKind] = field(default_factory=lambda: list(CheckKind))
    sharpness_axes: list[int] = field(default_factory=list)
    refinement: bool = False


def describe_validation_error(error: ValidationError) -> str:
    """One 'field.path: message' line per validation error."""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return "\n".join(lines)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise ConfigError(f"cannot read config: {error.strerror}", field=str(path)) from error
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError(f"line {error.lineno} column {error.colno}: {error.msg}", field=str(path)) from error
    return RunConfig.model_validate(data)


def _build_experiment(index: int, spec: ExperimentConfig, options: RunOptions) -> Experiment:
    try:
        return spec.build(options.statement_exponent, options.tolerance, options.abs_floor, options.c1_scale)
    except (OrliczLabError, ValueError) as error:
        raise ConfigError(str(error), field=f"experiments.{index}") from error


def _intervals(exp: Experiment):
    return (exp.mu1.a, exp.mu1.b), (exp.mu2.a, exp.mu2.b)


def build_jobs(run: RunConfig, options: RunOptions, seed: int) -> list[Job]:
    """Configured experiments first, then the default grid, each with its test functions."""
    jobs = []
    for index, spec in enumerate(run.experiments):
        exp = _build_experiment(index, spec, options)
        families = run.families if spec.families is None else spec.families
        functions = [member for family in families for member in family.build(_intervals(exp), seed)]
        jobs.append(Job(exp, functions, list(spec.checks), list(spec.sharpness_axes), spec.refinement_check))

    if run.default_grid is not None:
        grid = run.default_grid.build(
            statement_exponent=options.statement_exponent,
            tolerance=options.tolerance,
            abs_floor=options.abs_floor,
            c1_scale=options.c1_scale,
        )
        for exp in grid:
            functions = [member for family in run.families for member in family.build(_intervals(exp), seed)]
            jobs.append(Job(exp, functions, list(run.default_grid.checks)))
    return jobs


def run_job(job: Job, seed: int) -> list[VerificationReport]:
    reports = run_experiment(job.experiment, job.functions, job.checks, seed, job.refinement)
    reports.extend(check_sharpness(job.experiment, axis, seed=seed) for axis in job.sharpness_axes)
    return reports


# norm

def _norm_value(kind: NormKind, exp: Experiment, spec: NormSpec, measure, g, F) -> float:
    phi = exp.phi
    if kind is NormKind.GAUGE1D:
        return gauge_norm_1d(phi, measure, g)
    if kind is NormKind.LP:
        return lp_norm(measure, spec.p, g)
    if kind is NormKind.GAUGE2D:
        return gauge_norm_2d(phi, exp.mu, F)
    if kind is NormKind.LP2D:
        return lp_norm_2d(exp.mu, spec.p, F)
    if kind is NormKind.MIXED_P_PHI:
        return mixed_norm_p_phi(exp.w1, spec.p, exp.mu2, phi, F)
    if kind is NormKind.HAT:
        return mixed_norm_hat(exp.nu1, spec.s, exp.w2, spec.p, F)
    if kind is NormKind.PQ:
        return mixed_norm_pq(exp.mu1, spec.p, exp.mu2, spec.s, F)
    return iterated_gauge(phi, exp.mu1, exp.mu2, F)


def cmd_norm(run: RunConfig, options: RunOptions) -> int:
    """Evaluate the requested norms of the configured test function under the first experiment."""
    spec = run.norm or NormSpec()
    exp = _build_experiment(0, run.experiments[0], options) if run.experiments else None
    if exp is None:
        raise ConfigError("the norm command needs an explicit experiment", field="experiments")
    measure = getattr(exp, spec.measure)

    try:
        F = None if spec.function is None else spec.function.build(_intervals(exp))
        g = None if spec.function_1d is None else spec.function_1d.build((measure.a, measure.b))
    except ValueError as error:
        raise ConfigError(str(error), field="norm.function") from error

    if options.kind is not None:
        kinds = [options.kind]
    elif spec.kinds:
        kinds = list(spec.kinds)
    else:
        kinds = [kind for kind in NormKind if (g if kind in ONE_DIMENSIONAL else F) is not None]
    if not kinds:
        raise ConfigError("no test function to evaluate", field="norm.function")

    norms = {}
    for kind in kinds:
        needed = "function_1d" if kind in ONE_DIMENSIONAL else "function"
        if getattr(spec, needed) is None:
            raise ConfigError(f"{kind.value} needs a {needed}", field=f"norm.{needed}")
        norms[kind.value] = _norm_value(kind, exp, spec, measure, g, F)
        logger.info(f"{kind.value} norm = {format_number(norms[kind.value])}")

    sys.stdout.write(dumps({"name": exp.name, "norms": norms}))
    return ExitCode.OK


# kconst

def _gap(k: float, k_tilde: float) -> float:
    if math.isinf(k) and math.isinf(k_tilde):
        return math.nan
    if k_tilde == 0.0:
        return math.nan if k == 0.0 else math.inf
    return k / k_tilde


def _axis_constants(exp: Experiment, axis: int) -> dict:
    mu, nu, w, p = (exp.mu1, exp.nu1, exp.w1, exp.p1) if axis == 1 else (exp.mu2, exp.nu2, exp.w2, exp.p2)
    if p == 1.0:
        k_report: KConstantReport = k1_phi(exp.phi, mu, nu, w)
        tilde_report = k_report
        constant = k_report.value
    else:
        k_report = kp_phi(exp.phi, mu, nu, w, p)
        tilde_report = kp_phi_tilde(exp.phi, mu, nu, w, p)
        constant = exp.phi.c0() * k_report.value
    return {
        "axis": axis,
        "p": p,
        "K": k_report.value,
        "K_tilde": tilde_report.value,
        "gap": _gap(k_report.value, tilde_report.value),
        "C": constant,
        "K_report": k_report,
        "K_tilde_report": tilde_report,
    }


def cmd_kconst(run: RunConfig, options: RunOptions) -> int:
    """K and K~ on both axes of every configured experiment, as JSON on stdout."""
    results = []
    for index, spec in enumerate(run.experiments):
        exp = _build_experiment(index, spec, options)
        results.append({"name": exp.name, "axes": [_axis_constants(exp, axis) for axis in (1, 2)]})
    text = dumps(results)
    if options.out_dir is not None:
        write_json(Path(options.out_dir) / "kconst.json", results)
    sys.stdout.write(text)
    return ExitCode.OK


# verify

def _summary_rows(reports: list[VerificationReport]) -> tuple[list[dict], list[dict]]:
    failures = [
        {
            "name": report.name,
            "lhs": format_number(report.lhs),
            "rhs": format_number(report.rhs),
            "relative_slack": format_number(report.relative_slack),
            "links": [name for name, ok in report.links.items() if not ok],
        }
        for report in reports
        if report.status is CheckStatus.FAILED
    ]
    flagged = [{"name": report.name, "flags": report.flags} for report in reports if report.flags]
    return failures, flagged


def cmd_verify(run: RunConfig, options: RunOptions, config_path: str | None = None) -> int:
    """Run the battery, write reports.csv, reports.json, manifest.json and summary.md into the output directory."""
    seed = run.seed if options.seed is None else options.seed
    out_dir = Path(options.out_dir or config.OUT_DIR)
    jobs = build_jobs(run, options, seed)
    logger.info(f"verifying {len(jobs)} experiments with {options.jobs} worker(s)")

    with RunRecorder("verify", config_path, seed) as recorder:
        with ThreadPoolExecutor(max_workers=options.jobs) as pool:
            batches = list(pool.map(lambda job: run_job(job, seed), jobs))
        reports = [report for batch in batches for report in batch]
        recorder.add(write_csv(out_dir / "reports.csv", reports))
        recorder.add(write_json(out_dir / "reports.json", reports))

    failed = [report for report in reports if report.status is CheckStatus.FAILED]
    exit_code = ExitCode.FAILED if failed else ExitCode.OK
    counts = {status.value: sum(1 for r in reports if r.status is status) for status in CheckStatus}

    manifest = recorder.manifest(int(exit_code))
    manifest.result_files.extend(["manifest.json", "summary.md"])
    failures, flagged = _summary_rows(reports)
    summary = summary_template().render(manifest=manifest, counts=counts, failures=failures, flagged=flagged)
    atomic_write_text(out_dir / "summary.md", summary)
    write_json(out_dir / "manifest.json", manifest)

    for report in failed:
        logger.error(describe(report))
        sys.stderr.write(dumps(report))
    sys.stdout.write(
        f"{counts['passed']} passed, {counts['failed']} failed, {counts['skipped']} skipped; reports in {out_dir}\n"
    )
    return exit_code
