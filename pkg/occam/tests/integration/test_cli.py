"""命令行集成测试"""

import pandas as pd
import pytest

from occam.main import EXIT_FAILED_ROWS, EXIT_OK, EXIT_USAGE, main
from occam.utils.io import read_key_values, read_membership_csv


@pytest.fixture
def generated(tmp_path):
    """用 generate 子命令生成一张小图"""
    out = tmp_path / "network"
    code = main(["generate", "--n", "60", "--k", "3", "--rho", "0.2", "--degree", "10", "--seed", "1",
                 "--out", str(out)])
    assert code == EXIT_OK
    return out


def sweep_args(tmp_path, grid: str, *extra):
    return [
        "sweep-rho", "--n", "60", "--degree", "10", "--grid", grid, "--reps", "1", "--workers", "1",
        "--no-progress", "--out", str(tmp_path / "rho.csv"), *extra,
    ]


class TestGenerate:
    """generate 子命令测试类"""

    def test_outputs(self, generated):
        for name in ("edges.txt", "z.csv", "gamma.csv", "theta.csv", "metadata.txt"):
            assert (generated / name).exists()

        meta = read_key_values(generated / "metadata.txt")
        assert meta["n"] == "60"
        assert meta["saturate"] == "False"
        assert read_membership_csv(generated / "z.csv").shape == (60, 3)
        assert (generated / "edges.txt").read_text(encoding="utf-8").startswith("# n=60\n")

    def test_deterministic(self, tmp_path, generated):
        again = tmp_path / "again"
        main(["generate", "--n", "60", "--k", "3", "--rho", "0.2", "--degree", "10", "--seed", "1",
              "--out", str(again)])

        assert (again / "edges.txt").read_bytes() == (generated / "edges.txt").read_bytes()

    def test_hub_enables_saturation(self, tmp_path):
        out = tmp_path / "hub"
        code = main(["generate", "--n", "200", "--theta", "hub", "--degree", "20", "--out", str(out)])

        assert code == EXIT_OK
        assert read_key_values(out / "metadata.txt")["saturate"] == "True"

    @pytest.mark.parametrize("profile", ["A", "B", "A-caption", "pure"])
    def test_two_communities(self, tmp_path, profile):
        """测试 K=2 时各重叠结构预设均可生成"""
        out = tmp_path / profile
        code = main(["generate", "--n", "60", "--k", "2", "--profile", profile, "--degree", "10",
                     "--out", str(out)])

        assert code == EXIT_OK
        assert read_membership_csv(out / "z.csv").shape == (60, 2)

    def test_degree_too_large(self, tmp_path, capsys):
        code = main(["generate", "--n", "10", "--degree", "50", "--out", str(tmp_path / "bad")])

        assert code == EXIT_USAGE
        assert "执行失败" in capsys.readouterr().err


class TestFitAndEval:
    """fit 与 eval 子命令测试类"""

    def test_fit_then_eval(self, tmp_path, generated, capsys):
        fit_dir = tmp_path / "fit"
        code = main(["fit", "--graph", str(generated / "edges.txt"), "--k", "3", "--seed", "0",
                     "--out", str(fit_dir)])
        assert code == EXIT_OK
        assert read_membership_csv(fit_dir / "z_hat.csv").shape == (60, 3)
        assert "tau" in read_key_values(fit_dir / "metadata.txt")
        capsys.readouterr()

        code = main(["eval", "--truth", str(generated / "gamma.csv"), "--estimate", str(fit_dir / "gamma_hat.csv")])
        lines = capsys.readouterr().out.splitlines()
        assert code == EXIT_OK
        assert lines[0].startswith("exnvi=")
        assert lines[1].startswith("membership_error=")
        assert 0.0 <= float(lines[0].split("=")[1]) <= 1.0

    def test_eval_identical(self, generated, capsys):
        code = main(["eval", "--truth", str(generated / "z.csv"), "--estimate", str(generated / "z.csv")])
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())

        assert code == EXIT_OK
        assert float(out["exnvi"]) == 1.0
        assert float(out["membership_error"]) == 0.0

    def test_malformed_edge_list(self, tmp_path, capsys):
        graph = tmp_path / "bad.txt"
        graph.write_text("0 1\n1 1\n", encoding="utf-8")
        code = main(["fit", "--graph", str(graph), "--k", "2", "--out", str(tmp_path / "fit")])

        assert code == EXIT_USAGE
        assert "第 2 行" in capsys.readouterr().err

    def test_missing_graph(self, tmp_path):
        assert main(["fit", "--graph", str(tmp_path / "none.txt"), "--k", "2"]) == EXIT_USAGE


class TestSweep:
    """扫描子命令测试类"""

    def test_success(self, tmp_path):
        summary = tmp_path / "summary.csv"
        code = main(sweep_args(tmp_path, "0.0,0.1", "--summary", str(summary)))
        frame = pd.read_csv(tmp_path / "rho.csv", comment="#")

        assert code == EXIT_OK
        assert (tmp_path / "rho.csv").read_text(encoding="utf-8").startswith("# schema=1 kind=sweep-rho\n")
        assert len(frame) == 2
        assert set(frame["status"]) == {"ok"}
        assert "wall_time_ms" not in frame.columns
        assert len(pd.read_csv(summary, comment="#")) == 2

    def test_timing_flag(self, tmp_path):
        assert main(sweep_args(tmp_path, "0.1", "--timing")) == EXIT_OK
        assert "wall_time_ms" in pd.read_csv(tmp_path / "rho.csv", comment="#").columns

    def test_failed_rows_exit_code(self, tmp_path):
        """测试存在失败行时退出码为 2，且输出仍然写出"""
        code = main(sweep_args(tmp_path, "0.1,1.0"))
        frame = pd.read_csv(tmp_path / "rho.csv", comment="#")

        assert code == EXIT_FAILED_ROWS
        assert frame["status"].tolist() == ["ok", "failed"]

    def test_spec_file(self, tmp_path):
        spec = tmp_path / "spec.txt"
        spec.write_text("n=60\ndegree=10\ngrid=0.5,1\nreplications=1\nworkers=2\n", encoding="utf-8")
        code = main(["sweep-ctau", "--spec", str(spec), "--no-progress", "--out", str(tmp_path / "ctau.csv")])

        assert code == EXIT_OK
        assert len(pd.read_csv(tmp_path / "ctau.csv", comment="#")) == 2

    def test_trend_with_four_communities(self, tmp_path):
        """测试 trend-n 接受 K=4"""
        out = tmp_path / "trend.csv"
        code = main(["trend-n", "--k", "4", "--rho", "0", "--degree", "40", "--grid", "400", "--reps", "1",
                     "--workers", "1", "--no-progress", "--out", str(out)])

        assert code in (EXIT_OK, EXIT_FAILED_ROWS)
        assert len(pd.read_csv(out, comment="#")) == 1

    def test_preset_kind_mismatch(self, tmp_path):
        code = main(["sweep-rho", "--preset", "fig1-n500-rho0.1-nohub-d40", "--out", str(tmp_path / "x.csv")])
        assert code == EXIT_USAGE


class TestUsage:
    """用法错误测试类"""

    def test_no_command(self):
        assert main([]) == EXIT_USAGE

    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["fit", "--graph", "edges.txt"])
        assert excinfo.value.code == EXIT_USAGE

    def test_unknown_preset(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["sweep-ctau", "--preset", "nope"])
        assert excinfo.value.code == EXIT_USAGE
