import json

import pytest

from lpvariance import cli, specfun, validate
from lpvariance.config import Windows


def test_quick_report_lists_every_criterion(tmp_path):
    out = tmp_path / "quick.json"
    assert cli.main(["validate", "--suite", "quick", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] is True
    assert [c["id"] for c in rep["criteria"]] == list(range(1, 16))
    ran = {c["id"] for c in rep["criteria"] if c["status"] != "skipped"}
    assert ran == {1, 2, 3, 7, 9}
    assert all("seconds" not in c for c in rep["criteria"])


def test_corrupted_moment_fails(tmp_path, monkeypatch):
    good = specfun.moment_g
    monkeypatch.setattr(specfun, "moment_g", lambda p, a: 1.01 * good(p, a))
    assert cli.main(["validate", "--suite", "quick", "--out", str(tmp_path / "bad.json")]) != 0
    rep = json.loads((tmp_path / "bad.json").read_text())
    assert [c["id"] for c in rep["criteria"] if c["status"] == "fail"] == [1]


def test_windows_come_from_config():
    ctx = validate.Context(windows=Windows(permavg=(0.9, 5.0)))
    passed, measured = validate.crit_permavg(ctx)
    assert not passed
    assert validate.crit_permavg(validate.Context())[0]


def test_crash_is_a_failure(monkeypatch):
    def boom(ctx):
        raise RuntimeError("kaput")
    monkeypatch.setitem(validate.CRITERIA, 10, ("permutation average", boom))
    res = validate.run_criterion(10, validate.Context())
    assert res["status"] == "fail" and "kaput" in res["error"]


def test_unknown_suite():
    with pytest.raises(ValueError):
        validate.run_suite("medium")
