"""CLI commands, exit codes and output determinism."""

import json
from pathlib import Path

import pytest

from branchlevy.cli import (
    EXIT_BUDGET_ABORT,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    RunManifest,
    main,
    run,
)

REPO = Path(__file__).resolve().parent.parent
YULE_CONFIG = REPO / "configs" / "yule.json"
BBM_CONFIG = REPO / "configs" / "bbm.json"
NESTED_CONFIG = REPO / "configs" / "nested_demo.json"


def manifest(command, config, out, **kw):
    return RunManifest(command=command, config_path=str(config), out_dir=str(out), **kw)


def read_without_hash(path: Path) -> list[str]:
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# manifest_hash=")
    return lines


class TestCommands:
    def test_simulate_writes_artifacts(self, tmp_path):
        code = run(manifest("simulate", YULE_CONFIG, tmp_path, replicas=5, seed=1))
        assert code == EXIT_OK
        snaps = read_without_hash(tmp_path / "snapshots.csv")
        assert snaps[1].split(",")[:3] == ["replica", "time", "n_atoms"]
        assert (tmp_path / "forests.txt").exists()

    def test_verify_passes_on_yule(self, tmp_path):
        code = run(manifest("verify", YULE_CONFIG, tmp_path, replicas=600, seed=3))
        assert code == EXIT_OK
        rows = read_without_hash(tmp_path / "report.csv")
        assert rows[1].startswith("check,")
        assert len(rows) > 5

    def test_kappa_grid_value(self, tmp_path):
        code = run(manifest("kappa", BBM_CONFIG, tmp_path))
        assert code == EXIT_OK
        rows = read_without_hash(tmp_path / "kappa.csv")
        mid = rows[2 + 20].split(",")  # r = 0 for the 41-point symmetric grid
        assert float(mid[0]) == 0.0
        # kappa(theta) = sigma2 theta^2/2 + a theta + beta = 1.5 for this model
        assert float(mid[1]) == pytest.approx(1.5)
        assert float(mid[2]) == pytest.approx(0.0)

    def test_check_measure_reports(self, tmp_path):
        code = run(manifest("check-measure", YULE_CONFIG, tmp_path))
        assert code == EXIT_OK
        rows = read_without_hash(tmp_path / "measure_report.csv")
        assert any("square_integrable_x1" in r for r in rows)

    def test_nested_zero_violations(self, tmp_path):
        code = run(manifest("nested", NESTED_CONFIG, tmp_path, replicas=30, seed=5))
        assert code == EXIT_OK
        gaps = read_without_hash(tmp_path / "kappa_gap.csv")
        assert len(gaps) == 2 + 3  # hash + header + one row per level


class TestExitCodes:
    def test_missing_config_is_config_error(self, tmp_path):
        assert run(manifest("verify", tmp_path / "nope.json", tmp_path)) == EXIT_CONFIG_ERROR

    def test_malformed_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(manifest("verify", bad, tmp_path)) == EXIT_CONFIG_ERROR

    def test_inadmissible_model_blocks_runs(self, tmp_path):
        cfg = tmp_path / "inadmissible.json"
        cfg.write_text(json.dumps({
            "model": {
                "sigma2": 0.0, "a": 0.0, "theta": 1.0,
                "lambda": {"geometric_cascade": {
                    "base_weight": 1.0, "ratio": 2.0, "atom_template": [0.0, 0.0]
                }},
            },
            "level": 2.0,
            "horizon": 1.0,
        }))
        assert run(manifest("simulate", cfg, tmp_path / "o")) == EXIT_CONFIG_ERROR
        # but check-measure still reports, flagging the failure
        assert run(manifest("check-measure", cfg, tmp_path / "m")) == EXIT_CHECK_FAILED

    def test_budget_abort(self, tmp_path):
        cfg = tmp_path / "super.json"
        cfg.write_text(json.dumps({
            "model": {
                "sigma2": 0.0, "a": 0.0, "theta": 0.0,
                "lambda": {"components": [{"weight": 20.0, "atoms": [0.0, 0.0]}]},
            },
            "horizon": 2.0,
            "max_particles": 40,
        }))
        assert run(manifest("simulate", cfg, tmp_path / "o", replicas=3)) == EXIT_BUDGET_ABORT


class TestDeterminism:
    def test_verify_byte_identical(self, tmp_path):
        m1 = manifest("verify", YULE_CONFIG, tmp_path / "a", replicas=120, seed=9)
        m2 = manifest("verify", YULE_CONFIG, tmp_path / "b", replicas=120, seed=9)
        assert run(m1) == run(m2)
        assert (tmp_path / "a/report.csv").read_bytes() == (tmp_path / "b/report.csv").read_bytes()

    def test_simulate_byte_identical(self, tmp_path):
        m1 = manifest("simulate", BBM_CONFIG, tmp_path / "a", replicas=10, seed=11)
        m2 = manifest("simulate", BBM_CONFIG, tmp_path / "b", replicas=10, seed=11)
        assert run(m1) == run(m2) == EXIT_OK
        for name in ("snapshots.csv", "forests.txt"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_seed_changes_output(self, tmp_path):
        m1 = manifest("simulate", BBM_CONFIG, tmp_path / "a", replicas=10, seed=11)
        m2 = manifest("simulate", BBM_CONFIG, tmp_path / "b", replicas=10, seed=12)
        run(m1), run(m2)
        assert (tmp_path / "a/snapshots.csv").read_bytes() != (tmp_path / "b/snapshots.csv").read_bytes()


def test_main_entry_point(tmp_path):
    code = main([
        "kappa", "--config", str(BBM_CONFIG), "--out", str(tmp_path),
    ])
    assert code == EXIT_OK
