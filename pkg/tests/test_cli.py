import json
import subprocess
import sys
from importlib import resources

import pytest

from listop.cli import ConfigError, format_value, main, resolve_config
from listop.codeio import save_code
from listop.constructions import random_code
from listop.scenarios import SCENARIOS, scenario_schema

SMALL = {
    "estimate-E": ({"generator": "random", "q": 2, "n": 8, "N": 6},
                   {"kind": "aggregate_t", "t": 2, "n": 4, "L": 2, "trials": 6, "batch": 2}),
    "xor-ld": ({"generator": "random_linear", "q": 2, "n": 10, "k": 3}, {"t": 3, "n": 8, "trials": 4}),
    "fold-ld": ({"generator": "random", "q": 2, "n": 8, "N": 6}, {"t": 2, "trials": 4}),
    "aggregate-ld": ({"generator": "random", "q": 3, "n": 6, "N": 6}, {"t": 2, "n": 5, "trials": 4}),
    "subcode-ld": ({"generator": "random", "q": 2, "n": 8, "N": 200}, {"rho": "1/8", "trials": 5}),
    "cluster-lb": (None, {"trials": 5}),
    "concat-decode": ({"generator": "reed_solomon", "q": 7, "k": 2}, {"eps": "1/2", "trials": 5}),
    "johnson-audit": (None, {"instances": 20}),
    "replacement-test": ({"generator": "random", "q": 2, "n": 4, "N": 5}, {"trials": 20, "configs": 3}),
}


def write_config(tmp_path, scenario, base, params, **extra):
    cfg = {"scenario": scenario, "params": params, "master_seed": 12345,
           "output": str(tmp_path / f"{scenario}.csv"), **extra}
    if base is not None:
        cfg["base_code"] = base
    path = tmp_path / f"{scenario}.json"
    path.write_text(json.dumps(cfg))
    return path


def run(tmp_path, scenario, base, params, *args, **extra):
    path = write_config(tmp_path, scenario, base, params, **extra)
    code = main([scenario, "--config", str(path), *args])
    return code, tmp_path / f"{scenario}.csv"


def test_format_value():
    from fractions import Fraction
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(Fraction(1, 3)) == "1/3"
    assert format_value(float("inf")) == "inf"
    assert format_value(7) == "7"


@pytest.mark.parametrize("scenario", sorted(SMALL))
def test_every_scenario_runs_and_is_deterministic(tmp_path, scenario):
    base, params = SMALL[scenario]
    code, out = run(tmp_path, scenario, base, params)
    assert code == 0
    first = out.read_bytes()
    code, _ = run(tmp_path, scenario, base, params, "--threads", "8")
    assert code == 0 and out.read_bytes() == first
    lines = first.decode().splitlines()
    assert lines[0].startswith("# listop ")
    echo = json.loads(lines[0][len("# listop "):])
    assert echo["scenario"] == scenario and "output" not in echo
    assert lines[1].split(",") == SCENARIOS[scenario].columns
    assert len(lines) > 2
    assert not (tmp_path / f"{scenario}.csv.partial").exists()


def test_rows_carry_reproducing_seed(tmp_path):
    base, params = SMALL["concat-decode"]
    run(tmp_path, "concat-decode", base, params)
    rows = (tmp_path / "concat-decode.csv").read_text().splitlines()[2:]
    seeds = [int(r.split(",")[2]) for r in rows]
    assert len(set(seeds)) == len(seeds)


def test_single_codeword_set_row(tmp_path):
    code, out = run(tmp_path, "estimate-E", {"generator": "random", "q": 2, "n": 9, "N": 4},
                    {"kind": "sampling", "n": 9, "L": 1, "trials": 1})
    assert code == 0
    header, row = out.read_text().splitlines()[1:3]
    rec = dict(zip(header.split(","), row.split(",")))
    assert rec["mean"] == "9" and rec["std_dev"] == "0"


def test_seed_and_out_overrides(tmp_path):
    base, params = SMALL["xor-ld"]
    path = write_config(tmp_path, "xor-ld", base, params)
    other = tmp_path / "other.csv"
    assert main(["xor-ld", "--config", str(path), "--out", str(other), "--seed", "99"]) == 0
    assert json.loads(other.read_text().splitlines()[0][9:])["master_seed"] == 99
    assert main(["xor-ld", "--config", str(path), "--out", str(tmp_path / "b.csv"), "--seed", "99"]) == 0
    assert other.read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_presets_fill_t_and_n(tmp_path):
    code, out = run(tmp_path, "xor-ld", {"generator": "random_linear", "q": 2, "n": 12, "k": 3},
                    {"trials": 2, "eps": "1/2"})
    assert code == 0
    header, row = out.read_text().splitlines()[1:3]
    rec = dict(zip(header.split(","), row.split(",")))
    assert int(rec["t"]) >= 1 and int(rec["n"]) >= 1


def test_fold_bad_t_exit_2(tmp_path, capsys):
    code, out = run(tmp_path, "fold-ld", {"generator": "random", "q": 2, "n": 8, "N": 6}, {"t": 3})
    assert code == 2 and not out.exists()
    assert "t=3" in capsys.readouterr().err
    assert not (tmp_path / "fold-ld.csv.partial").exists()


@pytest.mark.parametrize("extra,field", [
    ({"colour": "red"}, "colour"),
])
def test_unknown_top_level_key(tmp_path, capsys, extra, field):
    code, _ = run(tmp_path, "xor-ld", *SMALL["xor-ld"], **extra)
    assert code == 2 and field in capsys.readouterr().err


def test_unknown_param_and_missing_required(tmp_path, capsys):
    code, _ = run(tmp_path, "xor-ld", SMALL["xor-ld"][0], {"t": 2, "n": 3, "width": 1})
    assert code == 2 and "width" in capsys.readouterr().err
    code, _ = run(tmp_path, "estimate-E", SMALL["estimate-E"][0], {"n": 3})
    assert code == 2 and "params.kind" in capsys.readouterr().err
    code, _ = run(tmp_path, "xor-ld", None, {"t": 2, "n": 3})
    assert code == 2 and "base_code" in capsys.readouterr().err


def test_scenario_mismatch_and_bad_json(tmp_path):
    path = write_config(tmp_path, "xor-ld", *SMALL["xor-ld"])
    assert main(["fold-ld", "--config", str(path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["xor-ld", "--config", str(bad)]) == 2
    assert main(["xor-ld", "--config", str(tmp_path / "missing.json")]) == 2


def test_budget_exit_3(tmp_path, monkeypatch):
    monkeypatch.setenv("LISTOP_BUDGET", "10")
    code, out = run(tmp_path, "subcode-ld", *SMALL["subcode-ld"])
    assert code == 3 and not out.exists()


def test_base_code_file(tmp_path):
    save_code(random_code(2, 8, 6, seed=3), tmp_path / "base.code")
    code, out = run(tmp_path, "fold-ld", {"file": "base.code"}, {"t": 4, "trials": 2})
    assert code == 0
    (tmp_path / "broken.code").write_text("q=2 n=3 N=2\n0 1 0\n0 2 1\n")
    code, _ = run(tmp_path, "fold-ld", {"file": "broken.code"}, {"t": 3})
    assert code == 2


def test_resolve_config_fills_defaults():
    cfg = resolve_config({"params": {"t": 2}, "output": "x.csv", "base_code": {"file": "c"}}, "fold-ld")
    assert cfg["params"]["trials"] == 10 and cfg["master_seed"] == 0
    with pytest.raises(ConfigError):
        resolve_config({"params": {}, "output": "x.csv", "base_code": {"file": "a", "generator": "b"}},
                       "fold-ld")
    with pytest.raises(ConfigError):
        resolve_config({"params": {}}, "johnson-audit")
    with pytest.raises(ConfigError):
        resolve_config({"output": "x", "master_seed": -1}, "johnson-audit")


def test_schema_file_matches_scenarios():
    shipped = json.loads(resources.files("listop").joinpath("schema.json").read_text())
    assert shipped == json.loads(json.dumps(scenario_schema()))


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "listop.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for name, sc in SCENARIOS.items():
        assert name in out.stdout
        assert ", ".join(sc.columns) in out.stdout


def test_console_script_exit_codes(tmp_path):
    path = write_config(tmp_path, "johnson-audit", None, {"instances": 5})
    ok = subprocess.run(["listop", "johnson-audit", "--config", str(path)], capture_output=True)
    assert ok.returncode == 0
    path = write_config(tmp_path, "fold-ld", {"generator": "random", "q": 2, "n": 8, "N": 6}, {"t": 5})
    bad = subprocess.run(["listop", "fold-ld", "--config", str(path)], capture_output=True, text=True)
    assert bad.returncode == 2 and "validation error" in bad.stderr
