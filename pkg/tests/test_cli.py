import csv
import io
import json

import jsonschema
import pytest

from kofn_standby import cli
from kofn_standby.distributions import Geometric
from kofn_standby.orderstats import SystemSpec

from test_lifetime import HeavyTail

PAIR = {"n": 2, "k": 2, "iid": {"family": "geometric", "p": 0.5}, "standby": {"family": "geometric", "p": 0.5}}
SINGLE = {"n": 1, "k": 1, "active": [{"family": "geometric", "p": 0.5}], "standby": {"family": "geometric", "p": 0.5}}


@pytest.fixture
def spec_file(tmp_path):
    def write(obj, name="spec.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return write


def run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_et_text_and_json(capsys, spec_file):
    code, out, _ = run(capsys, ["et", "--spec", spec_file(SINGLE)])
    assert code == 0 and out.splitlines()[0] == "E_T=2.0000"
    assert "rule=exact-geometric" in out
    code, out, _ = run(capsys, ["et", "--spec", spec_file(PAIR), "--d", "1e-6", "--json"])
    result = json.loads(out)
    jsonschema.validate(result, cli.ET_RESULT_SCHEMA)
    assert result["certified_error"] <= 1e-6 and result["d"] == 1e-6


def test_reliability_csv(capsys, spec_file):
    code, out, _ = run(capsys, ["reliability", "--spec", spec_file(PAIR), "--t-max", "3"])
    table = rows(out)
    assert code == 0 and table[0] == ["t", "P_T_gt_t"] and len(table) == 5
    # P(T > 0) = P(both actives > 0) + P(exactly one = 0) P(Z > 0)
    assert float(table[1][1]) == pytest.approx(0.25 + 0.5 * 0.5, abs=1e-9)


def test_mrl_csv_and_gaps(capsys, spec_file):
    code, out, _ = run(capsys, ["mrl", "--spec", spec_file(PAIR), "--kind", "system", "--t-max", "4"])
    table = rows(out)
    assert code == 0 and table[0] == ["t", "mrl", "err"] and len(table) == 6
    values = [float(r[1]) for r in table[1:]]
    assert max(values) - min(values) <= 2e-3
    dead = {"n": 1, "k": 1, "active": [{"family": "pmf", "weights": [1, 1]}], "standby": {"family": "pmf", "weights": [1]}}
    code, out, _ = run(capsys, ["mrl", "--spec", spec_file(dead), "--kind", "usual", "--t-max", "3"])
    assert code == 0 and rows(out)[-1] == ["3", "nan", "gap"]


def test_reproduce_table(capsys):
    code, out, _ = run(capsys, ["reproduce", "--table", "1"])
    table = rows(out)
    assert code == 0
    assert table[0] == ["p", "g", "n", "k", "E_T", "E_X", "E_T_4dp", "E_X_4dp"]
    assert len(table) == 9
    assert table[1][-2:] == ["3.8869", "2.3977"]


def test_reproduce_figure_to_file(capsys, tmp_path):
    target = tmp_path / "fig.csv"
    code, out, _ = run(capsys, ["reproduce", "--figure", "1", "--out", str(target)])
    assert code == 0 and out == ""
    table = rows(target.read_text())
    assert table[0] == ["t", "usual", "usual_err", "system", "system_err", "working", "working_err"]
    assert len(table) == 32


def test_global_out(capsys, spec_file, tmp_path):
    target = tmp_path / "et.txt"
    code, out, _ = run(capsys, ["--out", str(target), "et", "--spec", spec_file(SINGLE)])
    assert code == 0 and out == "" and target.read_text().startswith("E_T=2.0000")


def test_simulate(capsys, spec_file):
    argv = ["simulate", "--spec", spec_file(PAIR), "--samples", "20000", "--seed", "9", "--json"]
    code, out, _ = run(capsys, argv)
    first = json.loads(out)
    jsonschema.validate(first, cli.SIM_RESULT_SCHEMA)
    assert code == 0 and first["seed"] == 9 and first["n_samples"] == 20000
    _, again, _ = run(capsys, argv)
    assert json.loads(again) == first
    code, out, _ = run(capsys, ["simulate", "--spec", spec_file(PAIR), "--samples", "1000",
                                "--query", "stat=sf,condition=usual,t=1,s=0"])
    assert code == 0 and out.startswith("estimate=")
    code, _, err = run(capsys, ["simulate", "--spec", spec_file(PAIR), "--query", "stat=bogus"])
    assert code == 2 and "--query" in err


def test_compare(capsys, spec_file):
    weak = spec_file(PAIR, "a.json")
    strong = spec_file({**PAIR, "iid": {"family": "negbinomial", "r": 2, "p": 0.5}}, "b.json")
    code, out, _ = run(capsys, ["compare", "--spec-a", weak, "--spec-b", strong])
    assert code == 0 and out.startswith("ordered=yes")
    code, out, _ = run(capsys, ["compare", "--spec-a", strong, "--spec-b", weak])
    assert code == 1 and "counterexample_t=" in out
    other = spec_file({**PAIR, "n": 3}, "c.json")
    code, _, err = run(capsys, ["compare", "--spec-a", weak, "--spec-b", other])
    assert code == 2 and "differ" in err


def test_bad_inputs(capsys, spec_file, tmp_path):
    code, _, err = run(capsys, ["et", "--spec", spec_file('{"n": 2,\n  "k": }')])
    assert code == 2 and ":2:8:" in err
    code, _, err = run(capsys, ["et", "--spec", spec_file({**PAIR, "iid": {"family": "geometric", "p": 1.5}})])
    assert code == 2 and "iid" in err
    code, _, err = run(capsys, ["et", "--spec", spec_file({**PAIR, "k": 3})])
    assert code == 2
    code, _, err = run(capsys, ["et", "--spec", str(tmp_path / "missing.json")])
    assert code == 2 and "missing.json" in err
    with pytest.raises(SystemExit):
        cli.main(["et", "--spec", spec_file(PAIR), "--d", "-1"])


def test_unbounded_tail_exit_code(capsys, monkeypatch):
    heavy = SystemSpec(2, 2, [HeavyTail(0.3), Geometric(0.3)], Geometric(0.5))
    monkeypatch.setattr(cli, "load_spec", lambda path: heavy)
    code, _, err = run(capsys, ["et", "--spec", "ignored.json"])
    assert code == 3 and "tail" in err
