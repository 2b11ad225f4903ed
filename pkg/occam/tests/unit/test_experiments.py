"""模拟实验框架单元测试"""

import numpy as np
import pandas as pd
import pytest

from occam.core.exceptions import InvalidParameterError
from occam.core.experiments import (
    CTAU_GRID,
    N_GRID,
    RHO_GRID,
    ExperimentRunner,
    get_preset,
    load_spec,
    mean_by_value,
    preset_names,
    run_ctau_sweep,
    run_rho_sweep,
    run_single_fit,
    spec_from_key_values,
    summarize_rows,
    write_rows_csv,
)
from occam.core.sampler import generate_network
from occam.models.experiment import ExperimentKind, ExperimentRow, ExperimentSpec, RowStatus
from occam.utils.io import read_membership_csv, write_edge_list
from occam.tests.fixtures import fast_options, sampler_config


def small_spec(kind=ExperimentKind.RHO_SWEEP, grid=(0.0, 0.2), replications=2, **overrides) -> ExperimentSpec:
    values = dict(
        kind=kind,
        grid=tuple(grid),
        replications=replications,
        base=sampler_config(n=60, degree=10.0),
        opts=fast_options(),
        master_seed=123,
    )
    values.update(overrides)
    return ExperimentSpec(**values)


def read_result_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    return lines[0], pd.read_csv(path, comment="#")


class TestGrids:
    """默认网格测试类"""

    def test_ctau_grid(self):
        assert len(CTAU_GRID) == 13
        assert CTAU_GRID[0] == 2.0 ** -12
        assert CTAU_GRID[-1] == 2.0 ** 12

    def test_rho_grid(self):
        assert len(RHO_GRID) == 11
        assert RHO_GRID[0] == 0.0
        assert RHO_GRID[-1] == 0.5

    def test_n_grid_increasing(self):
        assert list(N_GRID) == sorted(N_GRID)


class TestExperimentSpec:
    """实验描述校验测试类"""

    def test_row_count(self):
        assert small_spec(grid=(0.0, 0.1, 0.2), replications=4).row_count == 12

    @pytest.mark.parametrize("overrides", [
        {"replications": 0},
        {"grid": ()},
        {"workers": 0},
        {"kind": ExperimentKind.N_TREND, "grid": (500, 250)},
    ])
    def test_invalid(self, overrides):
        with pytest.raises(ValueError):
            small_spec(**overrides)


class TestExperimentRunner:
    """扫描执行测试类"""

    def test_rows_ordered(self):
        """测试按 (网格下标, 重复下标) 排序"""
        rows = run_rho_sweep(small_spec())

        assert [(r.grid_index, r.replication_index) for r in rows] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert [r.swept_value for r in rows] == [0.0, 0.0, 0.2, 0.2]
        assert all(r.status is RowStatus.OK for r in rows)
        assert all(0.0 <= r.exnvi <= 1.0 for r in rows)
        assert all(r.wall_time_ms is None for r in rows)

    def test_independent_of_workers(self):
        """测试结果与并行数无关"""
        serial = ExperimentRunner(small_spec(workers=1)).run()
        parallel = ExperimentRunner(small_spec(workers=3)).run()

        assert [r.to_record() for r in serial] == [r.to_record() for r in parallel]

    def test_replications_differ(self):
        rows = run_rho_sweep(small_spec(grid=(0.1,), replications=3))
        assert len({r.alpha_hat for r in rows}) > 1

    def test_failed_row_isolated(self):
        """测试单行失败不影响其余行"""
        rows = run_rho_sweep(small_spec(grid=(0.1, 1.0), replications=1))

        assert rows[0].status is RowStatus.OK
        assert rows[1].failed
        assert rows[1].exnvi is None
        assert rows[1].error.startswith("InvalidParameterError")

    def test_ctau_sweep_changes_tau(self):
        rows = run_ctau_sweep(small_spec(kind=ExperimentKind.CTAU_SWEEP, grid=(0.1, 1.0), replications=1))
        for row in rows:
            expected = row.swept_value * row.alpha_hat ** 0.2 * 3 ** 1.5 / 60 ** 0.3
            assert row.tau == pytest.approx(expected, rel=1e-12)

    def test_empty_graph_rows_fail(self):
        """测试 α=0 生成空图时每行都记录为失败"""
        rows = run_rho_sweep(small_spec(base=sampler_config(n=60, alpha=0.0)))

        assert all(row.failed for row in rows)
        assert all(row.error.startswith("NonpositiveAlpha") for row in rows)

    def test_kind_checked(self):
        with pytest.raises(InvalidParameterError):
            run_ctau_sweep(small_spec())

    def test_timing_recorded(self):
        rows = ExperimentRunner(small_spec(grid=(0.1,), replications=1, record_timing=True)).run()
        assert rows[0].wall_time_ms > 0

    def test_writes_csv(self, tmp_path):
        path = tmp_path / "out" / "rho.csv"
        ExperimentRunner(small_spec(output_path=path)).run()
        header, frame = read_result_csv(path)

        assert header == "# schema=1 kind=sweep-rho"
        assert list(frame.columns) == [
            "grid_index", "swept_value", "replication_index", "status",
            "exnvi", "membership_error", "alpha_hat", "tau", "error",
        ]
        assert len(frame) == 4


class TestResultFiles:
    """结果文件测试类"""

    def rows(self):
        return [
            ExperimentRow(0, 0.1, 0, RowStatus.OK, exnvi=0.9, membership_error=0.1, alpha_hat=0.01, tau=0.04,
                          wall_time_ms=12.5),
            ExperimentRow(0, 0.1, 1, RowStatus.OK, exnvi=0.7, membership_error=0.3, alpha_hat=0.01, tau=0.04,
                          wall_time_ms=13.0),
            ExperimentRow(1, 0.2, 0, RowStatus.FAILED, error="DegreeTooLarge: 目标平均度过大"),
        ]

    def test_timing_column_optional(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_rows_csv(self.rows(), path, include_timing=True)
        _, frame = read_result_csv(path)

        assert "wall_time_ms" in frame.columns
        assert frame["wall_time_ms"].iloc[0] == 12.5

    def test_lf_line_endings(self, tmp_path):
        path = tmp_path / "rows.csv"
        write_rows_csv(self.rows(), path)

        assert b"\r\n" not in path.read_bytes()

    def test_summary(self):
        summary = summarize_rows(self.rows())

        first = summary[summary["swept_value"] == 0.1].iloc[0]
        assert first["exnvi_mean"] == pytest.approx(0.8)
        assert first["count"] == 2
        assert first["failed"] == 0
        assert summary[summary["swept_value"] == 0.2].iloc[0]["failed"] == 1

    def test_mean_by_value_skips_failed(self):
        assert mean_by_value(self.rows(), "exnvi") == {0.1: pytest.approx(0.8)}


class TestPresets:
    """预设实验测试类"""

    def test_names(self):
        names = preset_names()

        assert len(names) == 29
        assert "fig1-n500-rho0.1-nohub-d40" in names
        assert "fig2-A-caption-d20-hub" in names

    def test_ctau_preset(self):
        spec = get_preset("fig1-n2000-rho0.25-hub-d20", replications=2, master_seed=5)

        assert spec.kind is ExperimentKind.CTAU_SWEEP
        assert spec.grid == CTAU_GRID
        assert spec.replications == 2
        assert spec.master_seed == 5
        assert spec.base.n == 2000
        assert spec.base.b.entries[0, 1] == pytest.approx(0.25)
        assert spec.base.target_degree == 20.0
        assert spec.base.saturate

    def test_rho_preset(self):
        spec = get_preset("fig2-B-d40-nohub")

        assert spec.kind is ExperimentKind.RHO_SWEEP
        assert spec.grid == RHO_GRID
        assert spec.base.n == 500
        assert spec.opts.c_tau == pytest.approx(0.1)
        assert not spec.base.saturate
        assert spec.base.profile.masses[0] == pytest.approx(0.25)

    def test_unknown_preset(self):
        with pytest.raises(InvalidParameterError):
            get_preset("fig3")


class TestSpecFile:
    """key=value 实验描述测试类"""

    def test_load_spec(self, tmp_path):
        path = tmp_path / "spec.txt"
        path.write_text(
            "kind=sweep-ctau\ngrid=0.5,1,2\nreplications=3\nn=80\ndegree=12\ntheta=hub\nsaturate=false\n"
            "master_seed=9\nworkers=2\ntiming=yes\n",
            encoding="utf-8",
        )
        spec = load_spec(path)

        assert spec.kind is ExperimentKind.CTAU_SWEEP
        assert spec.grid == (0.5, 1.0, 2.0)
        assert spec.replications == 3
        assert spec.base.n == 80
        assert spec.base.theta_law.mean == pytest.approx(4.8)
        assert not spec.base.saturate
        assert spec.master_seed == 9
        assert spec.workers == 2
        assert spec.record_timing

    def test_defaults(self):
        spec = spec_from_key_values({"kind": "sweep-rho"})

        assert spec.grid == RHO_GRID
        assert spec.base.n == 500

    @pytest.mark.parametrize("values", [{}, {"kind": "unknown"}, {"kind": "fit"}, {"kind": "sweep-rho", "grid": "a,b"}])
    def test_invalid(self, values):
        with pytest.raises(InvalidParameterError):
            spec_from_key_values(values)


class TestSingleFit:
    """单图拟合测试类"""

    def test_outputs(self, tmp_path):
        network = generate_network(sampler_config(n=60, degree=10.0, seed=2))
        graph = tmp_path / "edges.txt"
        write_edge_list(network.a, graph)
        paths = run_single_fit(graph, 3, fast_options(), tmp_path / "fit")

        z_hat = read_membership_csv(paths["z_hat"])
        gamma_hat = read_membership_csv(paths["gamma_hat"])
        assert z_hat.shape == (60, 3)
        np.testing.assert_allclose(np.linalg.norm(z_hat, axis=1), 1.0, atol=1e-10)
        assert set(np.unique(gamma_hat)) <= {0.0, 1.0}
        assert "alpha_hat=" in paths["metadata"].read_text(encoding="utf-8")
