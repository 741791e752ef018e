import csv
import json
import math
import subprocess
import sys

import pytest

from frubias.cli import main

RAW_TOY_OMEGA = (1 - math.exp(-0.5)) / math.exp(-0.5)
NORM_TOY_OMEGA = (1 - math.exp(-0.25)) / math.exp(-0.25)


def _report(out):
    return json.loads((out / "report.json").read_text())


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("flag,expected", [([], RAW_TOY_OMEGA), (["--distance-normalization"], NORM_TOY_OMEGA)])
def test_audit_toy(tmp_path, toy_csv, flag, expected, capsys):
    out = tmp_path / "rep"
    code = main(["audit", "--data", str(toy_csv), "--protected", "f1", "--out", str(out), *flag])
    assert code == 0
    doc = _report(out)
    assert doc["report_version"] == 1
    f1, f2 = doc["level1"]["features"]
    assert f1["fru_per_class"][0] == pytest.approx(expected, abs=1e-12)
    assert f2["fru_per_class"] == [0.0, 0.0]
    assert doc["level1"]["reference_feature"] == 0
    assert {p.name for p in out.iterdir()} == {"report.json", "features.csv", "level1.csv", "correlations.csv"}
    assert "reference feature: f1" in capsys.readouterr().out


def test_audit_unknown_protected(tmp_path, toy_csv, capsys):
    code = main(["audit", "--data", str(toy_csv), "--protected", "gender", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "error [dataset]" in err and "f1, f2" in err


def test_audit_without_protected(tmp_path, toy_csv, capsys):
    assert main(["audit", "--data", str(toy_csv), "--out", str(tmp_path)]) == 2
    assert "--protected" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["audit", "--data", "missing.csv", "--protected", "f1"],
    ["audit", "--protected", "f1"],
    ["sweep", "--data", "{toy}", "--lambdas", "0:1:0.5"],
    ["audit", "--data", "{toy}", "--protected", "f1", "--lambda", "-1"],
    ["audit", "--data", "{toy}", "--protected", "f1", "--formats", "xml"],
    ["audit", "--data", "{toy}", "--protected", "f1", "--fru-large", "1.5"],
    ["regions", "--data", "{toy}", "--mask", "f1,f2"],
    ["bogus"],
])
def test_validation_exit_code(tmp_path, toy_csv, argv, capsys):
    argv = [a.replace("{toy}", str(toy_csv)) for a in argv]
    assert main(argv + ["--out", str(tmp_path / "o")] if argv[0] != "bogus" else argv) == 2


def test_runtime_exit_code(tmp_path, toy_csv, monkeypatch, capsys):
    import frubias.cli as cli

    def boom(*args, **kwargs):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(cli, "level1", boom)
    assert main(["audit", "--data", str(toy_csv), "--protected", "f1", "--out", str(tmp_path)]) == 1
    assert "disk on fire" in capsys.readouterr().err


def test_env_thresholds(tmp_path, toy_csv, monkeypatch):
    monkeypatch.setenv("FRUBIAS_FRU_LARGE", "0.25")
    monkeypatch.setenv("FRUBIAS_CORR_STRONG", "0.75")
    out = tmp_path / "rep"
    assert main(["audit", "--data", str(toy_csv), "--protected", "f1", "--out", str(out), "--quiet"]) == 0
    assert _report(out)["scenarios"][0]["thresholds"] == {"fru_large": 0.25, "corr_strong": 0.75}
    monkeypatch.setenv("FRUBIAS_FRU_LARGE", "2")
    assert main(["audit", "--data", str(toy_csv), "--protected", "f1", "--out", str(out)]) == 2


def test_regions_toy(tmp_path, toy_csv):
    out = tmp_path / "reg"
    assert main(["regions", "--data", str(toy_csv), "--mask", "f1", "--out", str(out)]) == 0
    rows = _read_csv(out / "regions_full.csv")
    assert len(rows) == 4 * 2
    for row in rows:
        assert float(row["pos"]) + float(row["bnd"]) + float(row["neg"]) == pytest.approx(1.0, abs=1e-11)
    delta = _read_csv(out / "boundary_delta_f1.csv")
    assert len(delta) == 8
    for row in delta:
        assert float(row["delta"]) == pytest.approx(float(row["bnd_masked"]) - float(row["bnd_full"]), abs=1e-11)
    assert (out / "regions_minus_f1.csv").exists()


def test_sweep_toy_tnorms(tmp_path, toy_csv, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--data", str(toy_csv), "--tnorms", "minimum,product,lukasiewicz,drastic",
                 "--lambdas", "0.5", "--out", str(out)])
    assert code == 0
    assert "4 cells, 8 rows" in capsys.readouterr().out
    rows = _read_csv(out)
    by_tnorm = {}
    for row in rows:
        by_tnorm.setdefault(row["tnorm"], []).append((row["feature"], row["fru"]))
    assert len(by_tnorm) == 4
    assert len({tuple(v) for v in by_tnorm.values()}) == 1


@pytest.mark.slow
def test_sweep_german_grid(tmp_path, german_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--data", str(german_path), "--format", "german", "--lambdas", "0.1:1.0:0.1",
                 "--implicators", "lukasiewicz,zadeh", "--distances", "hmom,heom", "--out", str(out),
                 "--jobs", "4"])
    assert code == 0
    assert "40 cells, 800 rows" in capsys.readouterr().out
    rows = _read_csv(out)
    assert len(rows) == 800
    fru = {(r["implicator"], r["distance"], float(r["lambda"]), r["feature"]): float(r["fru"]) for r in rows}
    assert len({k[3] for k in fru}) == 20
    # Zadeh <= Lukasiewicz at the default setting; at lambda >= 0.6 a few features invert slightly
    for f in range(20):
        assert fru[("zadeh", "hmom", 0.5, str(f))] <= fru[("lukasiewicz", "hmom", 0.5, str(f))]


def test_german_audit(tmp_path, german_path, capsys):
    out = tmp_path / "rep"
    code = main(["audit", "--data", str(german_path), "--format", "german", "--lambda", "0.5",
                 "--distance", "hmom", "--implicator", "lukasiewicz", "--protected", "gender,age",
                 "--baseline", "--out", str(out), "--jobs", "4"])
    assert code == 0
    doc = _report(out)
    ref = doc["level1"]["reference_feature"]
    assert doc["dataset"]["features"][ref]["name"] == "checking_account"
    assert set(doc["baseline"]["group"]) == {"gender=female", "age<25"}
    age = next(s for s in doc["scenarios"] if s["protected_name"] == "age")
    names = [e["unprotected_name"] for e in age["ranked_evidence"]]
    assert {"residence_since", "employment_since"} <= set(names)
    summary = capsys.readouterr().out
    assert "checking_account" in summary and "age: safe" in summary


def test_json_independent_of_jobs(tmp_path, german_path):
    texts = []
    for jobs in ("1", "3"):
        out = tmp_path / f"j{jobs}"
        assert main(["audit", "--data", str(german_path), "--format", "german", "--out", str(out),
                     "--jobs", jobs, "--quiet", "--formats", "json"]) == 0
        texts.append((out / "report.json").read_bytes())
    assert texts[0] == texts[1]


def test_predictions_flow(tmp_path, toy_csv):
    preds = tmp_path / "p.csv"
    preds.write_text("instance_id,prediction\n0,0\n1,0\n2,1\n3,1\n")
    out = tmp_path / "rep"
    code = main(["audit", "--data", str(toy_csv), "--protected", "f1", "--unprivileged", "f2<1",
                 "--predictions", str(preds), "--k-neighbors", "1", "--out", str(out), "--quiet"])
    assert code == 0
    doc = _report(out)
    assert doc["baseline"]["individual"]["all"]["gei"] == 0.0
    group = doc["baseline"]["group"]["f2<1"]
    assert group["basis"] == "predictions" and group["equal_opportunity"] == 0.0


def test_module_entry_point(toy_csv, tmp_path):
    res = subprocess.run([sys.executable, "-m", "frubias.cli", "audit", "--data", str(toy_csv),
                          "--protected", "nope", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 2
    assert "f1, f2" in res.stderr
