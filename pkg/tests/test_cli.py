import json
import subprocess
import sys

import pytest

from hypotrees.cli import EXIT_CHECK, EXIT_OK, EXIT_USAGE, Config, UsageError, main


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert main(["build", "--steps", "1", "--out", str(out)]) == EXIT_OK
    return out


def test_build_is_byte_stable(built, tmp_path):
    assert main(["build", "--steps", "1", "--out", str(tmp_path)]) == EXIT_OK
    for n in (0, 1):
        name = f"state_{n}.json"
        assert (tmp_path / name).read_bytes() == (built / name).read_bytes()


def test_verify_writes_reports(built, tmp_path):
    out = tmp_path / "v"
    out.mkdir()
    for n in (0, 1):
        (out / f"state_{n}.json").write_bytes((built / f"state_{n}.json").read_bytes())
    assert main(["verify", "--steps", "1", "--ext-len", "1", "--out", str(out)]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert [s["ok"] for s in summary] == [True, True]
    rep = json.loads((out / "report_1" / "report.json").read_text())
    assert rep["n"] == 1 and "timings" not in rep
    assert "Overall: pass" in (out / "report_1" / "report.md").read_text()


def test_tampered_state_fails_verification(built, tmp_path):
    doc = json.loads((built / "state_0.json").read_text())
    doc["k"] = doc["k"] + 1
    doc["k_history"][-1] = doc["k"]
    (tmp_path / "state_0.json").write_text(json.dumps(doc))
    assert main(["verify", "--steps", "0", "--ext-len", "1", "--out", str(tmp_path)]) == EXIT_CHECK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert "growth_law" in summary[0]["failed"]


def test_missing_or_corrupt_state_is_a_usage_error(tmp_path):
    assert main(["verify", "--steps", "0", "--out", str(tmp_path)]) == EXIT_USAGE
    (tmp_path / "state_0.json").write_text("{not json")
    assert main(["verify", "--steps", "0", "--out", str(tmp_path)]) == EXIT_USAGE


def test_export_depth_zero_is_the_root(built, tmp_path):
    out = tmp_path
    (out / "state_0.json").write_bytes((built / "state_0.json").read_bytes())
    assert main(["export", "T", "--depth", "0", "--format", "json", "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "T_0_d0.json").read_text())
    assert len(doc["vertices"]) == 1


def test_export_gadget_as_dot(built, tmp_path):
    (tmp_path / "state_0.json").write_bytes((built / "state_0.json").read_bytes())
    assert main(["export", "T_tilde", "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "T_tilde_0.dot").read_text()
    assert text.startswith("graph") and text.count("--") == 118


def test_bad_arguments(tmp_path):
    assert main(["export", "Q", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["build", "--steps", "-1", "--out", str(tmp_path)]) == EXIT_USAGE
    with pytest.raises(UsageError):
        Config(depth=-1)


def test_environment_supplies_defaults(monkeypatch, tmp_path):
    monkeypatch.setenv("HYPOTREES_OUT", str(tmp_path))
    monkeypatch.setenv("HYPOTREES_STEPS", "0")
    assert main(["build"]) == EXIT_OK
    assert (tmp_path / "state_0.json").exists() and not (tmp_path / "state_1.json").exists()


def test_selftest_and_module_entry_point(tmp_path):
    assert main(["selftest", "--trees", "30", "--seed", "3"]) == EXIT_OK
    run = subprocess.run([sys.executable, "-m", "hypotrees", "--help"], capture_output=True, text=True)
    assert run.returncode == 0 and "verify" in run.stdout
