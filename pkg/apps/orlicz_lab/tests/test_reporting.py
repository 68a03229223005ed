import json
import math

import numpy as np
import pytest

from orlicz_lab.cli.manifest import RunRecorder
from orlicz_lab.reporting.serialize import (
    CSV_COLUMNS,
    atomic_write_text,
    dumps,
    format_number,
    render_csv,
    to_jsonable,
    write_csv,
)
from orlicz_lab.reporting.utils.template_management import summary_template
from orlicz_lab.verify.checks import CheckStatus, make_report

from conftest import lebesgue_experiment


@pytest.mark.parametrize(
    "value, text",
    [
        (1.0 / 3.0, "0.333333333333"),
        (0.375, "0.375"),
        (1e-20, "1e-20"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        (np.float64(2.0), "2"),
    ],
)
def test_format_number(value, text):
    assert format_number(value) == text


def test_to_jsonable_handles_reports_and_numpy():
    report = make_report("x", 1.0 / 3.0, math.inf, lebesgue_experiment(), links={"a": True})
    data = to_jsonable(report)
    assert data["lhs"] == 0.333333333333
    assert data["rhs"] == "inf"
    assert data["status"] == "passed"
    assert data["links"] == {"a": True}
    assert to_jsonable({"v": np.array([1.5, np.nan]), "n": np.int64(3), "b": np.bool_(False)}) == {
        "v": [1.5, "nan"],
        "n": 3,
        "b": False,
    }
    assert json.loads(dumps(report))["name"] == "x"


def test_csv_layout(tmp_path):
    exp = lebesgue_experiment()
    reports = [
        make_report("ok", 0.5, 1.0, exp, seed=3, grid="2x2"),
        make_report("bad", 2.0, 1.0, exp),
        make_report("open", 1.0, math.inf, exp),
    ]
    lines = render_csv(reports).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "ok,0.5,1,0.5,0.5,true,3,2x2"
    assert lines[2] == "bad,2,1,-1,-1,false,,"
    assert lines[3] == "open,1,inf,inf,inf,true,,"
    path = write_csv(tmp_path / "nested" / "reports.csv", reports)
    assert path.read_text(encoding="utf-8").splitlines() == lines


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write_text(target, "first")
    atomic_write_text(target, "second")
    assert target.read_text(encoding="utf-8") == "second"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_summary_lists_failures_and_flags():
    with RunRecorder("verify", "quick.json", 7) as recorder:
        pass
    manifest = recorder.manifest(1)
    failures = [{"name": "bad", "lhs": "2", "rhs": "1", "relative_slack": "-1", "links": ["triangle"]}]
    flagged = [{"name": "open", "flags": ["infinite_constant"]}]
    counts = {status.value: 1 for status in CheckStatus}
    text = summary_template().render(manifest=manifest, counts=counts, failures=failures, flagged=flagged)
    assert f"# orlicz-lab run {manifest.run_id}" in text
    assert "| bad | 2 | 1 | -1 | triangle |" in text
    assert "- open: infinite_constant" in text
    assert manifest.seed == 7 and manifest.exit_code == 1

    clean = summary_template().render(manifest=manifest, counts=counts, failures=[], flagged=[])
    assert "Every check passed or was skipped." in clean
