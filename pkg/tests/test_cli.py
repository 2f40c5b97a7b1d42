import csv
import json
from pathlib import Path

import jsonschema
import pytest

from sbforms import __version__
from sbforms.cli import COMMANDS, CSV_HEADER, job_hash, load_schema, main

ROOT = Path(__file__).resolve().parents[1]
JOBS = ROOT / "jobs"


def run(tmp_path, command, job, *flags, name="out"):
    if isinstance(job, dict):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(job))
    else:
        path = job
    out = tmp_path / name
    code = main([command, "--job", str(path), "--out", str(out), *flags])
    return code, json.loads((out / "report.json").read_text()), out


def load_job(name):
    return json.loads((JOBS / f"{name}.json").read_text())


def test_published_schemas_match_package():
    for command in COMMANDS:
        published = json.loads((ROOT / "docs" / "schemas" / f"{command}.json").read_text())
        assert published == load_schema(command)
        jsonschema.Draft202012Validator.check_schema(published)


@pytest.mark.parametrize("command", COMMANDS)
def test_shipped_jobs_are_schema_valid(command):
    jsonschema.validate(load_job(command), load_schema(command))


def test_verify_job_passes(tmp_path):
    code, rep, _ = run(tmp_path, "verify", JOBS / "verify.json")
    assert code == 0 and rep["status"] == "pass"
    assert rep["version"] == __version__
    assert rep["job_hash"] == job_hash(load_job("verify"))
    names = [s["name"] for s in rep["result"]["suites"]]
    assert set(rep["tolerances"]) == set(names)
    assert all(s["passed"] for s in rep["result"]["suites"])


def test_tol_flag_overrides(tmp_path):
    code, rep, _ = run(tmp_path, "verify", JOBS / "verify.json", "--tol", "1e-30")
    assert code == 1
    assert set(rep["tolerances"].values()) == {1e-30}


def test_measure_check(tmp_path):
    code, rep, _ = run(tmp_path, "measure-check", JOBS / "measure-check.json")
    assert code == 0
    assert rep["result"]["suites"][0]["residual"] < 1e-6


def test_fourier_expand_writes_csv(tmp_path):
    code, rep, out = run(tmp_path, "fourier-expand", JOBS / "fourier-expand.json", "--plot")
    assert code == 0
    with open(out / "coefficients.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_HEADER
    assert len(rows) - 1 == len(rep["result"]["coefficients"])
    assert (out / "coefficients.png").stat().st_size > 0
    found = {(tuple(r["I"]), r["m"]): r["coefficient"] for r in rep["result"]["coefficients"]}
    c = found[((1,), -0.125)]
    assert c == pytest.approx([0.3, -0.2], abs=1e-12)


def test_fourier_expand_flags_off_lattice_mode(tmp_path):
    job = load_job("fourier-expand")
    job["params"]["function"]["components"][1]["m"] = -0.2
    code, rep, _ = run(tmp_path, "fourier-expand", job)
    assert code == 1
    assert rep["result"]["off_lattice_modes"][0]["m"] == -0.2


def test_koecher_injected_mode_named(tmp_path):
    code, rep, _ = run(tmp_path, "koecher-check", JOBS / "koecher-check-injected.json")
    assert code == 1
    offending = rep["result"]["koecher"]["offending"]
    assert {o["m"] for o in offending} == {1.0}
    assert [item["passed"] for item in rep["result"]["liouville"]] == [True, False]


def test_koecher_clean_job_passes(tmp_path):
    code, _, _ = run(tmp_path, "koecher-check", JOBS / "koecher-check.json")
    assert code == 0


def test_satake_classify_job(tmp_path):
    code, rep, out = run(tmp_path, "satake-classify", JOBS / "satake-classify.json", "--plot")
    assert code == 0
    res = rep["result"]
    assert res["verdict"] == "ConstantTermObstruction"
    assert {"verdict", "s_values", "bounds", "partials"} <= set(res)
    assert res["partials"][0]["diagnostic"] == "growing"
    assert (out / "partials.png").exists()


def test_satake_classify_profile_only(tmp_path):
    job = {"command": "satake-classify", "params": {"n": 2, "k": 4, "rho": 0, "profile": {"M0": -1.0}, "expect": "CuspLike"}}
    code, rep, _ = run(tmp_path, "satake-classify", job)
    assert code == 0
    assert all(b["finite"] for b in rep["result"]["bounds"].values())


def test_satake_below_threshold_is_check_failure(tmp_path):
    job = {"command": "satake-classify", "params": {"n": 2, "k": 3, "rho": 0, "profile": {"has_constant_term": True}}}
    code, rep, _ = run(tmp_path, "satake-classify", job)
    assert code == 1 and rep["result"]["verdict"] is None


@pytest.mark.parametrize(
    "job",
    [
        {"command": "verify", "params": {"n": 1, "r": 0}},
        {"command": "verify", "params": {"r": 0}},
        {"command": "fourier-expand", "params": {"n": 2}},
        {"command": "verify", "params": {"n": 2, "r": 0, "suites": ["nope"]}},
        [1, 2, 3],
    ],
)
def test_schema_violations_exit_2(tmp_path, job):
    code, rep, _ = run(tmp_path, "verify", job)
    assert code == 2 and rep["status"] == "schema_error"


def test_invalid_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep, _ = run(tmp_path, "verify", bad)
    assert code == 2 and rep["job_hash"] is None


def test_dimension_mismatch_exit_2(tmp_path):
    job = load_job("fourier-expand")
    job["params"]["cusp"]["D"] = [0.25]
    code, _, _ = run(tmp_path, "fourier-expand", job)
    assert code == 2


def test_domain_failure_exit_3(tmp_path):
    job = load_job("fourier-expand")
    job["params"]["bases"] = [[[0.01, 0.0], [1.0, 0.0]]]
    code, rep, _ = run(tmp_path, "fourier-expand", job)
    assert code == 3 and rep["status"] == "numerical_error"


def test_reports_are_byte_identical(tmp_path):
    for command in ("verify", "fourier-expand", "satake-classify"):
        outs = []
        for i in range(2):
            _, _, out = run(tmp_path, command, JOBS / f"{command}.json", "--seed", "3", "--threads", "1", name=f"{command}{i}")
            outs.append(out)
        for fname in ("report.json", "coefficients.csv"):
            a, b = outs[0] / fname, outs[1] / fname
            if a.exists():
                assert a.read_bytes() == b.read_bytes()


def test_threads_do_not_change_coefficients(tmp_path):
    _, r1, o1 = run(tmp_path, "fourier-expand", JOBS / "fourier-expand.json", "--threads", "1", name="t1")
    _, r4, o4 = run(tmp_path, "fourier-expand", JOBS / "fourier-expand.json", "--threads", "4", name="t4")
    assert r1["result"] == r4["result"]
    assert (o1 / "coefficients.csv").read_bytes() == (o4 / "coefficients.csv").read_bytes()
