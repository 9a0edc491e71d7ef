import json
import shutil
from pathlib import Path

import pytest
from pydantic import ValidationError

from catgkp import experiment as ex
from catgkp.cli import main
from catgkp.fock import load_state

ROOT = Path(__file__).resolve().parents[1]

SMALL = """\
schema_version: 1
protocol:
  scheme: scheme1
  input: {kind: fock, n: 6}
  k: 2
  eta_total: [0.3, 0.7]
  inline_db: 6
  cutoff: 40
ensemble: {runs: 3, master_seed: 1}
"""


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def test_seed_derivation():
    assert ex.derive_seed(1, 0, 0) == ex.derive_seed(1, 0, 0)
    seeds = {ex.derive_seed(m, p, i) for m in range(3) for p in range(3) for i in range(10)}
    assert len(seeds) == 90
    assert 0 <= ex.derive_seed(7, 2, 5) < 2**64


def test_overrides():
    assert ex.parse_override("protocol.k=3") == ("protocol.k", 3)
    assert ex.parse_override("protocol.eta_total=[0.1, 0.2]")[1] == [0.1, 0.2]
    with pytest.raises(ValueError):
        ex.parse_override("protocol.k")
    d = {}
    ex.set_path(d, "a.b.c", 1)
    assert d == {"a": {"b": {"c": 1}}}


def test_schema_rejects_bad_files(tmp_path, small):
    exp = ex.load_experiment(small)
    assert exp.protocol.etas() == [0.3, 0.7]
    with pytest.raises(ValidationError) as err:
        ex.load_experiment(small, ["protocol.cutoff=null"])
    assert "cutoff" in str(err.value)
    with pytest.raises(ValidationError):
        ex.load_experiment(small, ["protocol.speed=1"])
    with pytest.raises(ValidationError):
        ex.load_experiment(small, ["protocol.eta_total=1.5"])
    with pytest.raises(ValidationError):
        ex.load_experiment(small, ["schema_version=2"])
    with pytest.raises(ValidationError):
        ex.load_experiment(small, ["protocol.scheme=homodyne"])  # k = 2 is invalid for homodyne


def test_prepare_writes_summary_and_records(tmp_path, small, capsys):
    assert main(["prepare", "--config", str(small), "--out", str(tmp_path / "o"), "--jobs", "1"]) == 0
    lines = (tmp_path / "o" / "summary.csv").read_text().splitlines()
    assert lines[0].split(",") == list(ex.SUMMARY_COLUMNS)
    assert len(lines) == 3
    rec = json.loads((tmp_path / "o" / "point_00" / "run_0000.json").read_text())
    assert rec["config"]["scheme"] == "scheme1" and len(rec["outcomes"]) == 2


def test_rerun_is_byte_identical_across_job_counts(tmp_path, small):
    main(["prepare", "--config", str(small), "--out", str(tmp_path / "a"), "--jobs", "1"])
    main(["prepare", "--config", str(small), "--out", str(tmp_path / "b"), "--jobs", "2"])
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes()
    for f in (tmp_path / "a" / "point_01").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / "point_01" / f.name).read_bytes()


def test_seed_and_runs_flags(tmp_path, small):
    main(["prepare", "--config", str(small), "--out", str(tmp_path / "a"), "--seed", "5", "--runs", "2", "--jobs", "1"])
    main(["prepare", "--config", str(small), "--out", str(tmp_path / "b"), "--seed", "6", "--runs", "2", "--jobs", "1"])
    a = (tmp_path / "a" / "summary.csv").read_text()
    assert a.splitlines()[1].split(",")[1] == "2"
    assert a != (tmp_path / "b" / "summary.csv").read_text()


def test_optional_outputs(tmp_path, small):
    args = ["prepare", "--config", str(small), "--out", str(tmp_path / "o"), "--jobs", "1", "--runs", "1",
            "--set", "outputs.save_states=true", "--set", "outputs.wigner.enabled=true",
            "--set", "outputs.wigner.step=0.1", "--set", "outputs.phase.enabled=true"]
    assert main(args) == 0
    d = tmp_path / "o" / "point_00"
    assert {p.name for p in d.iterdir()} >= {"run_0000.json", "run_0000.state", "run_0000_wigner.csv",
                                             "run_0000_phase.csv"}
    assert load_state(d / "run_0000.state").cutoff == 40


def test_missing_cutoff_exits_2(tmp_path, small, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(SMALL.replace("  cutoff: 40\n", ""))
    assert main(["prepare", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "protocol.cutoff" in capsys.readouterr().err


def test_bad_yaml_and_missing_file_exit_2(tmp_path, small):
    bad = tmp_path / "bad.yaml"
    bad.write_text("protocol: [unclosed\n")
    assert main(["prepare", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert main(["prepare", "--config", str(tmp_path / "none.yaml"), "--out", str(tmp_path / "o")]) == 2
    assert main(["prepare", "--config", str(small), "--out", str(tmp_path / "o"), "--set", "novalue"]) == 2


def test_unknown_flag_exits_2(small):
    with pytest.raises(SystemExit) as err:
        main(["prepare", "--config", str(small), "--out", "x", "--bogus"])
    assert err.value.code == 2


def test_cutoff_exceeded_exits_3(tmp_path, small, capsys):
    args = ["prepare", "--config", str(small), "--out", str(tmp_path / "o"), "--jobs", "1",
            "--set", "protocol.cutoff=8", "--set", "protocol.inline_db=12"]
    assert main(args) == 3
    assert "cutoff exceeded" in capsys.readouterr().err


def test_fig4_recipe_has_nine_points(tmp_path):
    cfg = ROOT / "configs" / "fig4_scheme1.yaml"
    assert main(["prepare", "--config", str(cfg), "--out", str(tmp_path / "o"), "--runs", "2", "--jobs", "2"]) == 0
    lines = (tmp_path / "o" / "summary.csv").read_text().splitlines()
    assert len(lines) == 1 + 9


@pytest.mark.slow
def test_breed_depth_two(tmp_path):
    cfg = ROOT / "configs" / "fig5_breeding.yaml"
    assert main(["breed", "--config", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "2"]) == 0
    bred = sorted(p.name for p in (tmp_path / "b").glob("level_[12]_*.state"))
    assert bred == ["level_1_0.state", "level_1_1.state", "level_2_0.state"]
    # saved leaves can be bred again
    leaves = sorted(str(p) for p in (tmp_path / "b").glob("level_0_*.state"))
    assert main(["breed", "--config", str(cfg), "--out", str(tmp_path / "c"), "--depth", "1",
                 "--states", *leaves[:2]]) == 0
    assert (tmp_path / "c" / "level_1_0.json").exists()


def test_analyze(tmp_path, capsys):
    from catgkp.fock import save_state
    from catgkp.states import CatSpec, cat

    path = tmp_path / "cat.state"
    save_state(cat(CatSpec(2.0, 0.2, "even", 40)), path)
    assert main(["analyze", str(path), "--wigner", "--step", "0.1", "--phase", "--fit", "--out", str(tmp_path)]) == 0
    fit = json.loads((tmp_path / "cat_fit.json").read_text())
    assert fit["alpha_fit"] == pytest.approx(2.0, abs=1e-4)
    assert (tmp_path / "cat_wigner.csv").exists() and (tmp_path / "cat_phase.csv").exists()


def test_module_entry_point(tmp_path, small):
    import subprocess
    import sys

    out = subprocess.run([sys.executable, "-m", "catgkp", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "prepare" in out.stdout
    assert shutil.which("catgkp") is None or subprocess.run(["catgkp", "--help"], capture_output=True).returncode == 0
