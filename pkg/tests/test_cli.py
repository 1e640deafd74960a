import csv
import json
import math
from fractions import Fraction

import pytest

from loopmaps import cli, critline, mapcount, ringgen, twistline
from loopmaps.mapcount import WeightProfile


def _run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.reader(text.splitlines()))


def test_critical_line_contract(tmp_path, capsys):
    path = tmp_path / "line.csv"
    code, _, _ = _run(["critical-line", "--a", "1", "--b", "0.3", "--grid", "200", "--out", str(path)], capsys)
    assert code == 0
    rows = _rows(path.read_text())
    assert rows[0] == ["param", "g", "h", "kappa_2mb", "phase"]
    assert len(rows) == 201
    assert rows[-1][4] == "dilute" and all(r[4] == "dense" for r in rows[1:-1])
    ref = critline.dilute_point(1.0, critline.n_of_b(0.3))
    assert float(rows[-1][1]) == ref.g and float(rows[-1][2]) == ref.h


def test_byte_identical_output(tmp_path, capsys):
    texts = []
    for i in range(2):
        p = tmp_path / f"o{i}.csv"
        assert cli.main(["critical-line", "--a", "2", "--n", "1", "--grid", "30", "--out", str(p)]) == 0
        texts.append(p.read_bytes())
    assert texts[0] == texts[1]


def test_seventeen_digits_round_trip(capsys):
    code, out, _ = _run(["twist-line", "--b", "0.3", "--grid", "5"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["h2", "g", "kappa_2mb", "phase"]
    line = twistline.twist_critical_line(twistline.n_twist(0.3), points=5)
    for r, s in zip(rows[1:], line):
        assert float(r[0]) == s.h2 and float(r[1]) == s.g
    assert rows[1][3] == "dilute"


def test_dilute_point_ising_json(capsys):
    code, out, _ = _run(["dilute-point", "--a", "1", "--n", "1", "--json"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["schema_version"] == 1
    assert obj["g"] == pytest.approx(math.sqrt(5) / (2 * math.sqrt(2) * 7**0.75), abs=1e-8)
    assert obj["h"] == pytest.approx(math.sqrt(20 / math.sqrt(7) - 5) / 12, abs=1e-8)


def test_verify_clean(capsys):
    code, out, err = _run(["verify"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["passed"] and len(obj["results"]) == len(cli.CHECKS)
    assert err.count("PASS") == len(cli.CHECKS)


def test_verify_reports_failure(monkeypatch, capsys):
    monkeypatch.setattr(cli, "CHECKS", cli.CHECKS + [("always fails", lambda: (False, "x"))])
    code, out, err = _run(["verify"], capsys)
    assert code == 1 and "FAIL  always fails" in err
    assert json.loads(out)["passed"] is False


@pytest.mark.parametrize(
    "args",
    [
        ["bogus"],
        ["dilute-point", "--a", "1", "--n", "1", "--b", "0.3"],
        ["dilute-point", "--a", "1"],
        ["dilute-point", "--a", "1", "--n", "2.5"],
        ["twist-line", "--n", "1.2"],
        ["rings", "--family", "pentagonal", "--h", "1"],
        ["rings", "--family", "triangular"],
        ["enumerate", "--weights", "x:1"],
        ["critical-line", "--a", "1", "--n", "1", "--tol", "-1"],
        ["classify", "--family", "twisting", "--h2", "0.1", "--cut=0,1"],
    ],
)
def test_usage_errors(args, capsys):
    code, out, err = _run(args, capsys)
    assert code == 2 and out == "" and "usage error" in err


def test_numeric_failure(capsys):
    code, out, err = _run(["dilute-point", "--a", "4.2", "--n", "1"], capsys)
    assert code == 1 and "numeric failure" in err and out == ""


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"b": 0.3, "grid": 4}))
    code, out, _ = _run(["twist-line", "--config", str(cfg)], capsys)
    assert code == 0 and len(_rows(out)) == 5
    code, out, _ = _run(["twist-line", "--config", str(cfg), "--grid", "7"], capsys)
    assert code == 0 and len(_rows(out)) == 8
    cfg.write_text(json.dumps({"b": 0.3, "colour": "red"}))
    assert _run(["twist-line", "--config", str(cfg)], capsys)[0] == 2
    assert _run(["twist-line", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_rings_match_library(capsys):
    code, out, _ = _run(["rings", "--family", "bending", "--a", "3/2", "--h", "1/5", "--kmax", "4"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["k", "kp", "coefficient_num", "coefficient_den"]
    fam = ringgen.Bending(Fraction(3, 2), Fraction(1, 5))
    for k, kp, num, den in rows[1:]:
        assert Fraction(int(num), int(den)) == ringgen.ring_coeff(fam, int(k), int(kp))


def test_enumerate_schema(capsys):
    code, out, _ = _run(["enumerate", "--weights", "3:1", "--pmax", "3", "--order", "4"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["p", "order", "coefficient_num", "coefficient_den"]
    assert len(rows) == 1 + 4 * 5
    ser = mapcount.disk_series(WeightProfile.formal({3: 1}), 3, 4)
    for p, e, num, den in rows[1:]:
        if p == "3":
            assert Fraction(int(num), int(den)) == ser.coeff(int(e))


@pytest.mark.parametrize(
    "args",
    [
        ["density", "--a", "2", "--b", "0.3", "--grid", "6"],
        ["density", "--a", "1", "--n", "1", "--point", "dense", "--grid", "6"],
        ["density", "--model", "twist", "--b", "0.3", "--grid", "6"],
    ],
)
def test_density_schema(args, capsys):
    code, out, _ = _run(args, capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["v", "x", "rho"] and len(rows) == 7
    assert all(float(r[2]) > 0 for r in rows[1:])


def test_fixed_point_and_classify(capsys):
    base = ["--n", "1", "--family", "bending", "--a", "2", "--h", "0.05", "--weights", "3:0.05"]
    code, out, _ = _run(["fixed-point", *base], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["schema_version"] == 1 and obj["residual"] <= 1e-10
    code, out, _ = _run(["classify", *base], capsys)
    assert code == 0
    obj = json.loads(out)
    lo, hi = obj["cut"]
    s = ringgen.involution_of(ringgen.Bending(2.0, 0.05))
    assert obj["case"] == ringgen.classify_configuration(s, (lo, hi)).label
    code, out, _ = _run(["classify", "--family", "bending", "--a", "0.5", "--h", "0.2", "--cut=-1,2"], capsys)
    assert code in (0, 1)
