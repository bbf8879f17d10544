"""The full acceptance battery, one test per criterion.

Each test prints a single ``criterion NN PASS|FAIL`` line with a short
summary of what was measured, then asserts the verdict.  Runtime budgets are
part of the verdict for the criteria that state one.
"""
import json

import pytest

from lpvariance import validate


def _summary(res):
    m = res.get("measured", {})
    keep = {k: v for k, v in m.items() if k not in ("rows", "p_gt_n")}
    if "rows" in m:
        keep["rows"] = len(m["rows"])
    text = json.dumps(keep, sort_keys=True)
    if "error" in res:
        text += f" error={res['error']}"
    return text[:240]


@pytest.mark.parametrize("cid", validate.CRITERIA_IDS)
def test_criterion(cid, capsys):
    res = validate.run_criterion(cid, validate.Context())
    secs = res.pop("_seconds")
    with capsys.disabled():
        print(f"\ncriterion {cid:02d} {res['status'].upper():4} {res['name']} ({secs:.1f}s) {_summary(res)}")
    assert res["status"] == "pass", res
