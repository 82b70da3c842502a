import json
import subprocess
import sys

import numpy as np
import pytest

from chebolab import acceptance
from chebolab.cli import (EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, EXIT_TOLERANCE, determinism_check,
                          read_config_file, resolve_config, run)
from chebolab.covers import splitting_data_from_json, sweep_report_from_csv
from chebolab.errors import LabError
from chebolab.localglobal import linking_from_csv
from chebolab.orbitgen import knots_from_jsonl


def _lines(path):
    return path.read_text().splitlines()


def test_orbits_cat(tmp_path, capsys):
    assert run(["orbits", "--family", "cat", "--numax", "5", "--out", str(tmp_path)]) == EXIT_OK
    lines = _lines(tmp_path / "orbits.jsonl")
    summary = json.loads(lines[-1])["summary"]
    assert summary["fixed_point_counts"] == [1, 5, 16, 45, 121]
    assert summary["orbits_per_period"] == {"1": 0, "2": 2, "3": 5, "4": 10, "5": 24}
    assert len(lines) == 1 + 2 + 5 + 10 + 24
    first = json.loads(lines[0])
    assert set(first) >= {"family", "index", "period_or_word", "translation_or_trace"}
    knots = knots_from_jsonl((tmp_path / "orbits.jsonl").read_text())
    assert len(knots) == 41
    assert json.loads(capsys.readouterr().out)["knots"] == 41


def test_orbits_include_origin(tmp_path):
    assert run(["orbits", "--numax", "3", "--include-origin", "yes", "--out", str(tmp_path)]) == EXIT_OK
    summary = json.loads(_lines(tmp_path / "orbits.jsonl")[-1])["summary"]
    assert summary["orbits_per_period"]["1"] == 1


def test_orbits_modular_round_trip(tmp_path):
    assert run(["orbits", "--family", "modular", "--maxlen", "8", "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "orbits.jsonl").read_text()
    knots = knots_from_jsonl(text)
    assert len(knots) == 69
    # re-import through the CLI and re-emit the same bytes
    again = tmp_path / "again"
    assert run(["orbits", "--family", "import", "--input", str(tmp_path / "orbits.jsonl"),
                "--out", str(again)]) == EXIT_OK
    assert (again / "orbits.jsonl").read_text() == text


def test_density_modular(tmp_path, capsys):
    code = run(["density", "--family", "modular", "--mod", "2", "--maxlen", "18", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    rows = _lines(tmp_path / "density.csv")
    ident = next(r.split(",") for r in rows[1:] if r.split(",")[1] == "1")
    assert float(ident[3]) == pytest.approx(6719 / 31040)
    assert abs(float(ident[3]) - 1 / 6) < 0.05
    doc = json.loads((tmp_path / "density.json").read_text())
    assert doc["total_knots"] == 31040
    assert _lines(tmp_path / "running.csv")[-1].startswith("31040,")
    # the transposition class drifts further than 0.05 at this truncation
    assert code in (EXIT_OK, EXIT_TOLERANCE)
    assert "max |natural - expected|" in out


def test_density_tolerance_failure(tmp_path, capsys):
    code = run(["density", "--family", "modular", "--mod", "2", "--maxlen", "10", "--tolerance", "0.001",
                "--out", str(tmp_path)])
    assert code == EXIT_TOLERANCE
    assert "TOLERANCE_FAIL" in capsys.readouterr().out


def test_zeta(tmp_path):
    assert run(["zeta", "--family", "modular", "--mod", "3", "--maxlen", "9", "--out", str(tmp_path)]) == EXIT_OK
    rows = _lines(tmp_path / "zeta.csv")
    assert rows[0] == "s,class_rep,log_zeta_relative"
    by_s = {}
    for r in rows[1:]:
        s, rep, v = r.split(",")
        by_s.setdefault(s, {})[rep] = float(v)
    for vals in by_s.values():
        total = vals.pop("all")
        assert sum(vals.values()) == pytest.approx(total, rel=1e-13)


def test_split(tmp_path):
    assert run(["split", "--group", "Z6", "--mu", "3", "--lam", "2", "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "splitting.json").read_text()
    d = splitting_data_from_json(text)
    assert (d.e, d.f, d.g) == (2, 3, 1)
    assert json.loads(text)["induced_length_factor"] == {"DECOMP_ORDER": 6.0, "COVERING_DEGREE": 3.0}


def test_split_with_group_file(tmp_path):
    table = tmp_path / "z3.csv"
    table.write_text("0,1,2\n1,2,0\n2,0,1\n")
    assert run(["split", "--group", str(table), "--mu", "0", "--lam", "1", "--subgroup", "0",
                "--out", str(tmp_path)]) == EXIT_OK
    d = json.loads((tmp_path / "splitting.json").read_text())
    assert (d["e"], d["f"], d["g"]) == (1, 3, 1) and d["components"] == [[0, 1, 3]]


def test_split_noncommuting_is_config_error(tmp_path, capsys):
    assert run(["split", "--group", "D6", "--mu", "1", "--lam", "2", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "NONCOMMUTING_PERIPHERAL" in capsys.readouterr().err


def test_unknown_group_or_missing_file(tmp_path):
    assert run(["split", "--group", "NoSuchGroup", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert run(["orbits", "--family", "import", "--input", str(tmp_path / "none.jsonl"),
                "--out", str(tmp_path)]) == EXIT_CONFIG


def test_sweep(tmp_path, capsys):
    assert run(["sweep", "--order-bound", "16", "--out", str(tmp_path)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("0 counterexamples")
    rep = sweep_report_from_csv((tmp_path / "sweep.csv").read_text(), 16)
    assert rep.counterexamples == [] and len(rep.rows) > 100


def test_lgp_experiment(tmp_path):
    assert run(["lgp", "--n", "20", "--trials", "40", "--seed", "3", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "lgp.json").read_text())
    assert doc["verdict"] == "PASS" and doc["seed"] == 3
    L = linking_from_csv((tmp_path / "linking.csv").read_text())
    assert L.n == 20


def test_lgp_control_is_tolerance_failure(tmp_path):
    # the unlink control has rate 0, which is the control's own PASS
    assert run(["lgp", "--n", "8", "--trials", "10", "--control", "true", "--out", str(tmp_path)]) == EXIT_OK


def test_lgp_from_linking_file(tmp_path):
    f = tmp_path / "hopf.csv"
    f.write_text("0,1\n1,0\n")
    assert run(["lgp", "--linking", str(f), "--indices", "0", "--p", "2", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "lgp.json").read_text())
    assert doc["rank"] == 2 and doc["surjective"] and doc["kernel_excluding_S"] == 0


def test_lgp_asymmetric_linking_file(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("0,1\n0,0\n")
    assert run(["lgp", "--linking", str(f), "--out", str(tmp_path)]) == EXIT_CONFIG


# --------------------------------------------------------------------------
# configuration and exit codes


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# cat run\nfamily = cat\nnumax = 4\n\nout = " + str(tmp_path / "a") + "\n")
    assert run(["orbits", "--config", str(cfg)]) == EXIT_OK
    assert len(_lines(tmp_path / "a" / "orbits.jsonl")) == 1 + 2 + 5 + 10
    assert run(["orbits", "--config", str(cfg), "--numax", "3", "--out", str(tmp_path / "b")]) == EXIT_OK
    assert len(_lines(tmp_path / "b" / "orbits.jsonl")) == 1 + 2 + 5


def test_read_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("numax 4\n")
    with pytest.raises(LabError) as exc:
        read_config_file(str(bad))
    assert exc.value.code == "CONFIG_INVALID"
    with pytest.raises(LabError) as exc:
        read_config_file(str(tmp_path / "missing.cfg"))
    assert exc.value.code == "CONFIG_INVALID"


@pytest.mark.parametrize("values", [{"numax": "five"}, {"colour": "blue"}, {"control": "maybe"}])
def test_resolve_config_rejects(values):
    with pytest.raises(LabError) as exc:
        resolve_config(values, {})
    assert exc.value.code == "CONFIG_INVALID"


@pytest.mark.parametrize("argv", [
    ["orbits", "--family", "hyperbolic"],
    ["orbits", "--numax", "0"],
    ["orbits", "--matrix", "1,1,0,1"],
    ["density", "--family", "import"],
    ["split"],
    ["nonsense"],
    ["orbits", "--bogus", "1"],
])
def test_config_errors_exit_1(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)] if argv[0] != "nonsense" else argv) == EXIT_CONFIG


def test_invariant_violation_writes_report(tmp_path, monkeypatch):
    from chebolab import oracles
    monkeypatch.setattr(oracles, "det_count", lambda A, nu: 0)
    assert run(["orbits", "--numax", "3", "--out", str(tmp_path)]) == EXIT_INVARIANT
    report = json.loads((tmp_path / "violations.json").read_text())
    assert report["command"] == "orbits"
    assert {v["check"] for v in report["violations"]} == {"fixed_point_count"}


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["sweep", "--order-bound", "4", "--out", str(blocker)]) == EXIT_CONFIG


# --------------------------------------------------------------------------
# verify


def test_verify_subset(tmp_path, capsys):
    assert run(["verify", "--only", "1,5,8", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "3/3 criteria pass"
    assert all("PASS" in line for line in out[:3])


def test_verify_tight_tolerance_is_not_a_crash(tmp_path, capsys):
    assert run(["verify", "--only", "3", "--tolerance", "0.001", "--out", str(tmp_path)]) == EXIT_TOLERANCE
    out = capsys.readouterr().out
    assert acceptance.TOLERANCE_FAIL in out and acceptance.CRASH not in out


def test_empty_dataset():
    cfg = acceptance.AcceptanceConfig(cat_nu_max=1, modular_max_len=1)
    with pytest.raises(LabError) as exc:
        acceptance.verify_all(cfg, echo=lambda _: None)
    assert exc.value.code == "DATASET_EMPTY"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "chebolab.cli", "sweep", "--order-bound", "6",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("0 counterexamples")


@pytest.mark.slow
def test_byte_identical_reruns():
    same, names = determinism_check(seed=0)
    assert same and len(names) >= 12
