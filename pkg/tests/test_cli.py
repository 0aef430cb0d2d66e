import json

import pytest

from tesalocs.cli import main


class TestListFunctions:
    def test_prints_all_names(self, capsys):
        assert main(["list-functions"]) == 0
        out = capsys.readouterr().out
        for name in ("ackley", "yang", "trid"):
            assert name in out


class TestRun:
    def test_small_experiment_writes_reports(self, tmp_path, capsys):
        code = main([
            "run", "--functions", "sphere", "--dim", "3", "--budget", "120",
            "--repeats", "2", "--local", "none", "--grid-nodes", "8",
            "--batch", "10", "--elite", "3", "--rank", "2",
            "--out-dir", str(tmp_path), "--format", "csv,json",
        ])
        assert code == 0
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "report.json").exists()
        assert not (tmp_path / "report.txt").exists()
        assert list((tmp_path / "traces").glob("*.csv"))

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = {
            "functions": "sphere,rastrigin",
            "dim": 3,
            "budget": 100,
            "repeats": 1,
            "local": "none",
            "grid_nodes": 8,
            "batch": 10,
            "elite": 2,
            "rank": 2,
            "out_dir": str(tmp_path / "from-file"),
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out_dir = tmp_path / "overridden"
        code = main([
            "run", "--config", str(cfg_path), "--functions", "sphere",
            "--out-dir", str(out_dir),
        ])
        assert code == 0
        lines = (out_dir / "report.csv").read_text().strip().splitlines()
        assert len(lines) == 3  # header + sphere x {random, tesalocs}
        assert all("rastrigin" not in line for line in lines)

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text('{"no_such_key": 1}')
        with pytest.raises(SystemExit):
            main(["run", "--config", str(cfg_path)])

    def test_nonzero_exit_on_failed_cells(self, tmp_path):
        import numpy as np

        from tesalocs import benchmarks

        exploding = benchmarks.BenchmarkFunction(
            name="cli-exploding-test",
            evaluate=lambda x: (_ for _ in ()).throw(ValueError("boom")),
            _box=lambda d: (-1.0, 1.0),
            _fmin=lambda d: 0.0,
            _xmin=lambda d: np.zeros(d),
        )
        benchmarks.register(exploding)
        try:
            code = main([
                "run", "--functions", "cli-exploding-test", "--dim", "2",
                "--budget", "50", "--repeats", "1", "--local", "none",
                "--grid-nodes", "8", "--batch", "5", "--elite", "2",
                "--rank", "1", "--out-dir", str(tmp_path),
            ])
            assert code == 1
        finally:
            benchmarks._REGISTRY.pop("cli-exploding-test")

    def test_single_init_arm(self, tmp_path):
        code = main([
            "run", "--functions", "sphere", "--dim", "2", "--budget", "60",
            "--repeats", "1", "--local", "none", "--grid-nodes", "8",
            "--batch", "6", "--elite", "2", "--rank", "1",
            "--init", "tesalocs", "--out-dir", str(tmp_path),
        ])
        assert code == 0
        lines = (tmp_path / "report.csv").read_text().strip().splitlines()
        assert len(lines) == 2
        assert "tesalocs" in lines[1]
