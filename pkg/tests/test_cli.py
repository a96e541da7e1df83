import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from asmop.cli import main
from asmop.dataio import read_trace

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL = {
    "problem": {"family": "logistic", "synthetic": {"n": 6, "N": 200, "seed": 1}},
    "solver": {"max_iter": 40},
    "smg": {"max_iter": 40},
    "seeds": [0],
}


def config(tmp_path, data, name="c.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return str(path)


class TestRun:
    def test_bundled_config(self, tmp_path, capsys):
        code = main(["run", str(CONFIGS / "logistic.yaml"), "--budget", "20000", "--seed", "0",
                     "--out", str(tmp_path)])
        assert code == 0
        trace = read_trace(tmp_path / "asmop_seed0.csv")
        assert len(trace) > 0
        assert (tmp_path / "omega.svg").exists() and (tmp_path / "samplesize.svg").exists()
        assert "asmop seed=0" in capsys.readouterr().out

    def test_missing_config(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "missing.yaml")]) == 1
        assert "not found" in capsys.readouterr().err

    def test_budget_override(self, tmp_path):
        path = config(tmp_path, {**SMALL, "solver": {"max_iter": None, "budget": 10 ** 9}})
        assert main(["run", path, "--budget", "1000"]) == 0
        trace = read_trace(tmp_path / "out" / "asmop_seed0.csv")
        costs = [r.cost for r in trace.records]
        per_iter = max(b - a for a, b in zip([0] + costs, costs))
        assert costs[-1] <= 1000 + per_iter

    def test_solver_override(self, tmp_path):
        path = config(tmp_path, SMALL)
        assert main(["run", path, "--solver", "smg"]) == 0
        assert (tmp_path / "out" / "smg_seed0.csv").exists()

    def test_invalid_budget_override(self, tmp_path):
        assert main(["run", config(tmp_path, SMALL), "--budget", "-5"]) == 1

    def test_runtime_failure_exit_code(self, tmp_path, capsys):
        data = {**SMALL, "solver": {"max_iter": 5, "x0": [1.0, 2.0]}}
        assert main(["run", config(tmp_path, data)]) == 2
        assert "InputError" in capsys.readouterr().err


class TestCompare:
    def test_two_solvers(self, tmp_path):
        path = config(tmp_path, {**SMALL, "solvers": ["asmop", "smg"]})
        assert main(["compare", path]) == 0
        svg = (tmp_path / "out" / "compare_omega.svg").read_text(encoding="utf-8")
        assert svg.count("<polyline") == 2

    def test_empty_solver_list(self, tmp_path):
        assert main(["compare", config(tmp_path, {**SMALL, "solvers": []})]) == 1

    def test_byte_identical(self, tmp_path):
        path = config(tmp_path, {**SMALL, "solvers": ["asmop", "smg"]})
        main(["compare", path, "--out", "a"])
        main(["compare", path, "--out", "b"])
        for name in ("asmop_seed0.csv", "smg_seed0.csv", "compare_omega.svg", "compare_samplesize.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


class TestPareto:
    QUAD = {"problem": {"family": "quadratic", "centers": [[[0.0, 0.0]], [[1.0, 0.0]]]},
            "front": {"n_seeds": 4, "rounds": 1, "inner_iterations": 10}}

    def test_front_outputs(self, tmp_path):
        assert main(["pareto", config(tmp_path, self.QUAD)]) == 0
        rows = (tmp_path / "out" / "front.csv").read_text(encoding="utf-8").splitlines()
        assert rows[0] == "f1,f2,x1,x2"
        assert len(rows) - 1 >= 4
        assert (tmp_path / "out" / "front.svg").exists()

    def test_three_objectives_skip_svg(self, tmp_path, caplog):
        data = {**self.QUAD, "problem": {"family": "quadratic",
                                         "centers": [[[0.0, 0.0]], [[1.0, 0.0]], [[0.0, 1.0]]]}}
        assert main(["pareto", config(tmp_path, data)]) == 0
        assert (tmp_path / "out" / "front.csv").exists()
        assert not (tmp_path / "out" / "front.svg").exists()
        assert "front plot skipped" in caplog.text

    def test_rounds_zero(self, tmp_path):
        assert main(["pareto", config(tmp_path, {**self.QUAD, "front": {"rounds": 0}})]) == 1


class TestMisc:
    @pytest.mark.parametrize("name", ["logistic.yaml", "compare.yaml", "quadratic_front.yaml"])
    def test_bundled_configs_validate(self, name, capsys):
        assert main(["validate-config", str(CONFIGS / name)]) == 0
        assert "OK" in capsys.readouterr().out

    def test_selftest(self, capsys):
        assert main(["selftest"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3 and all(line.startswith("[PASS]") for line in lines)

    def test_selftest_failure_exit(self, monkeypatch):
        from asmop import selftest

        monkeypatch.setattr(selftest, "SUITES", [("broken", lambda: (False, "nope"))])
        assert main(["selftest"]) == 2

    def test_help_lists_flags(self):
        out = subprocess.run([sys.executable, "-m", "asmop", "run", "--help"], capture_output=True, text=True)
        assert out.returncode == 0
        for flag in ("--seed", "--budget", "--solver", "--out"):
            assert flag in out.stdout

    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            main([])
