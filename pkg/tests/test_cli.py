import csv
import json

import pytest

from lpvariance import cli, svgplot

GOLDEN = {
    "ratio": "p,n,theta_mode,theta_seed,N,e_norm2,e_norm2_se,var_norm2,var_norm2_se,lambda2,ratio,"
             "ratio_se,ratio_over_log1p,scale_n_pow,term1,term2,term3,term4",
    "moments": "quantity,p,n,alpha,N,empirical,empirical_se,oracle,z",
    "orlicz": "p,n,theta_mode,theta_seed,N,norm_M,certificate,e_psi,e_psi_se,e_phi,e_phi_se,ratio,"
              "ratio_se,sqrt_p_epsi,in_window",
    "steiner": "p,n,theta_mode,theta_seed,N,var_x,var_x_se,var_y,var_y_se,diff,diff_se,bound,"
               "theta4_gap,theta4_gap_se,ratio_x,ratio_y,in_window",
    "permavg": "n,q,case,brute,rearrangement,ratio,in_window",
}
ARGS = {
    "ratio": ["--p", "2", "--n", "3", "--theta", "axis", "--samples", "100000"],
    "moments": ["--p", "2", "--n", "8", "--samples", "100000"],
    "orlicz": ["--p", "1,2", "--n", "16", "--samples", "30000"],
    "steiner": ["--p", "1.5", "--n", "3", "--theta", "axis", "--samples", "100000"],
    "permavg": ["--n", "4,5"],
}


def _run(tmp_path, sub, extra=(), name="out.csv"):
    out = tmp_path / name
    assert cli.main([sub, *ARGS[sub], *extra, "--out", str(out)]) == 0
    return out


@pytest.mark.parametrize("sub", sorted(GOLDEN))
def test_golden_header_and_determinism(tmp_path, sub):
    a = _run(tmp_path, sub, name="a.csv").read_bytes()
    b = _run(tmp_path, sub, name="b.csv").read_bytes()
    assert a == b
    assert a.decode().splitlines()[0] == GOLDEN[sub]


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_ratio_disk_row(tmp_path):
    row = _rows(_run(tmp_path, "ratio"))[0]
    assert abs(float(row["ratio"]) - 2 / 3) <= 4 * float(row["ratio_se"])
    assert float(row["scale_n_pow"]) == pytest.approx(1 / 3)
    # cells are written with 17 significant digits
    assert row["e_norm2"] == "%.17g" % float(row["e_norm2"])


def test_moments_rows(tmp_path):
    rows = _rows(_run(tmp_path, "moments"))
    disk = [r for r in rows if r["quantity"] == "g" and float(r["alpha"]) == 2][0]
    assert float(disk["oracle"]) == pytest.approx(0.5)
    assert all(abs(float(r["z"])) <= 4 for r in rows)


def test_orlicz_rows(tmp_path):
    rows = _rows(_run(tmp_path, "orlicz"))
    p1 = [r for r in rows if float(r["p"]) == 1]
    assert p1 and all(r["norm_M"] == "nan" for r in p1)
    for r in rows:
        if float(r["p"]) > 1:
            assert 0.1 <= float(r["ratio"]) <= 10 and r["in_window"] == "true"
            assert abs(float(r["certificate"]) - 1) <= 1e-6


def test_steiner_axis_row(tmp_path):
    row = _rows(_run(tmp_path, "steiner"))[0]
    assert abs(float(row["diff"])) <= 4 * float(row["diff_se"])


def test_permavg_ones(tmp_path):
    rows = _rows(_run(tmp_path, "permavg"))
    ones = [r for r in rows if r["case"] == "ones"]
    assert [float(r["brute"]) for r in ones] == [2.0, pytest.approx(5 ** 0.5, abs=1e-12)]
    assert all(r["in_window"] == "true" for r in rows)


def test_json_format(tmp_path):
    out = _run(tmp_path, "permavg", ["--format", "json"], "out.json")
    recs = json.loads(out.read_text())
    assert recs[0]["case"] == "ones" and recs[0]["brute"] == 2.0


def test_precedence(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"p": [3.0], "n": [5], "samples": 40000, "seed": 11}))
    args = cli.build_parser().parse_args(["ratio", "--config", str(cfg_file), "--seed", "12"])
    cfg = cli.build_config(args)
    assert cfg.p == [3.0] and cfg.n == [5] and cfg.samples == 40000 and cfg.seed == 12


def test_direction_file(tmp_path):
    f = tmp_path / "dirs.txt"
    f.write_text("0 0 1\n1 1 1\n")
    out = tmp_path / "r.csv"
    assert cli.main(["ratio", "--p", "2", "--n", "3", "--theta", f"file:{f}", "--samples", "100000",
                     "--out", str(out)]) == 0
    rows = _rows(out)
    assert [r["theta_mode"] for r in rows] == ["file", "file"]
    assert abs(float(rows[0]["ratio"]) - 2 / 3) <= 4 * float(rows[0]["ratio_se"])


def test_errors(tmp_path, capsys):
    assert cli.main(["permavg", "--n", "12"]) == 2
    assert "n must be <= 8" in capsys.readouterr().err
    assert cli.main(["ratio", "--config", str(tmp_path / "missing.json")]) == 2
    assert "missing.json" in capsys.readouterr().err
    assert cli.main(["permavg", "--n", "3", "--out", str(tmp_path / "no" / "dir.csv")]) == 2
    assert "dir.csv" in capsys.readouterr().err
    assert cli.main(["ratio", "--samples", "10"]) == 2


def test_plot(tmp_path):
    src = _run(tmp_path, "ratio", ["--p", "1,2,4", "--n", "4,6", "--theta", "diag"])
    for kind in ("ratio", "terms"):
        a, b = tmp_path / f"{kind}1.svg", tmp_path / f"{kind}2.svg"
        assert cli.main(["plot", str(src), "--kind", kind, "--out", str(a)]) == 0
        assert cli.main(["plot", str(src), "--kind", kind, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().startswith("<svg")
    assert (tmp_path / "ratio1.svg").read_text().count("<polyline") == 2


def test_plot_epsi(tmp_path):
    src = _run(tmp_path, "orlicz", ["--n", "8,16"])
    out = tmp_path / "e.svg"
    assert cli.main(["plot", str(src), "--kind", "epsi", "--out", str(out)]) == 0
    assert out.read_text().count("<polyline") == 2


def test_plot_schema_errors(tmp_path, capsys):
    src = _run(tmp_path, "permavg")
    out = tmp_path / "x.svg"
    assert cli.main(["plot", str(src), "--kind", "ratio", "--out", str(out)]) == 2
    assert "missing column 'p'" in capsys.readouterr().err
    empty = tmp_path / "empty.csv"
    empty.write_text(GOLDEN["ratio"] + "\n")
    assert cli.main(["plot", str(empty), "--kind", "ratio", "--out", str(out)]) == 2
    assert not out.exists()
    with pytest.raises(svgplot.SchemaError):
        svgplot.read_table(empty, "ratio")
