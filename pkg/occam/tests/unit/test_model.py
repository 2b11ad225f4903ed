"""模型核心单元测试"""

import numpy as np
import pytest

from occam.core.exceptions import DimensionMismatch, EntryOutOfRange, InvalidParameterError, NotPSD
from occam.core.model import (
    expected_matrix,
    hausdorff_centers_distance,
    planted_partition_b,
    planted_partition_sqrt_closed_form,
    sqrt_psd,
    validate_identifiability,
)
from occam.core.sampler import generate_network
from occam.models.generation import ThetaLaw
from occam.models.network import (
    AdjacencyMatrix,
    ConnectivityMatrix,
    DegreeParams,
    MembershipMatrix,
    ModelParams,
)
from occam.tests.fixtures import sampler_config, two_block_params


def make_params(alpha, theta, z, b) -> ModelParams:
    return ModelParams(
        alpha=alpha,
        theta=DegreeParams(theta),
        z=MembershipMatrix(z),
        b=ConnectivityMatrix(b),
    )


class TestTypes:
    """数据类型测试类"""

    def test_arrays_are_read_only(self):
        """测试构造后不可变"""
        z = np.eye(3)
        membership = MembershipMatrix(z)
        z[0, 0] = 5.0

        assert membership.entries[0, 0] == 1.0
        with pytest.raises(ValueError):
            membership.entries[0, 0] = 2.0

    def test_dimension_mismatch(self):
        """测试维度不一致"""
        with pytest.raises(DimensionMismatch):
            make_params(1.0, np.ones(3), np.eye(2), np.eye(2))
        with pytest.raises(DimensionMismatch):
            make_params(1.0, np.ones(3), np.eye(3), np.eye(2))

    def test_negative_alpha(self):
        """测试负的 α"""
        with pytest.raises(InvalidParameterError):
            make_params(-1.0, np.ones(2), np.eye(2), np.eye(2))

    @pytest.mark.parametrize("entries", [
        [[0, 1], [0, 0]],
        [[1, 0], [0, 0]],
        [[0, 2], [2, 0]],
        [[0, 0.5], [0.5, 0]],
        [[0, -1], [-1, 0]],
        [[0, 256], [256, 0]],
    ])
    def test_adjacency_validation(self, entries):
        """测试邻接矩阵必须对称、0/1、对角为零"""
        with pytest.raises(InvalidParameterError):
            AdjacencyMatrix(np.array(entries))

    def test_normalized_keeps_w(self):
        """测试 θ 归一化不改变 W"""
        rng = np.random.default_rng(3)
        z = rng.random((6, 2))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        params = make_params(1e-3, np.array([1, 20, 1, 1, 20, 1.0]), z, planted_partition_b(2, 0.3).entries)
        normalized = params.normalized()

        assert normalized.theta.mean == pytest.approx(1.0)
        np.testing.assert_allclose(expected_matrix(normalized).entries, expected_matrix(params).entries, atol=1e-14)

    def test_latent_positions_gram(self):
        """测试 XXᵀ 等于 W"""
        network = generate_network(sampler_config(n=30, degree=5.0))
        x = network.params.latent_positions()

        np.testing.assert_allclose(x @ x.T, network.w.entries, atol=1e-12)


class TestExpectedMatrix:
    """期望边概率矩阵测试类"""

    def test_identity_case(self):
        """测试 Θ=I, Z=I 时 W=B"""
        b = planted_partition_b(3, 0.25).entries
        w = expected_matrix(make_params(1.0, np.ones(3), np.eye(3), b))

        np.testing.assert_allclose(w.entries, b, atol=1e-15)

    def test_zero_alpha(self):
        """测试 α=0 得到零矩阵"""
        w = expected_matrix(two_block_params(alpha=0.0))
        assert not w.entries.any()

    def test_two_blocks(self):
        """测试两个纯社区的手算结果"""
        w = expected_matrix(two_block_params(alpha=0.5)).entries
        expected = np.array([
            [0.5, 0.5, 0, 0],
            [0.5, 0.5, 0, 0],
            [0, 0, 0.5, 0.5],
            [0, 0, 0.5, 0.5],
        ])
        np.testing.assert_allclose(w, expected, atol=1e-15)

    def test_exactly_symmetric(self):
        """测试逐位对称"""
        rng = np.random.default_rng(11)
        z = rng.random((25, 3))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        theta = rng.uniform(0.5, 1.5, 25)
        w = expected_matrix(make_params(0.1, theta, z, planted_partition_b(3, 0.2).entries)).entries

        assert np.array_equal(w, w.T)

    def test_out_of_range(self):
        """测试越界时报错而不是截断"""
        with pytest.raises(EntryOutOfRange):
            expected_matrix(two_block_params(alpha=1.5))

    def test_negative_entries(self):
        """测试负的边概率"""
        b = np.array([[1.0, -0.5], [-0.5, 1.0]])
        z = np.array([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(EntryOutOfRange):
            expected_matrix(make_params(1.0, np.ones(2), z, b))


class TestValidateIdentifiability:
    """可识别性条件测试类"""

    def test_planted_partition_passes(self):
        """测试植入划分加两两重叠的配置全部通过"""
        network = generate_network(sampler_config(n=100, rho=0.25, masses=(0.3, 1 / 30)))
        params = network.params.normalized()
        report = validate_identifiability(params)

        assert report.passed, report
        assert report.failed() == ()

    def test_bad_diagonal(self):
        """测试 B 对角线不为 1"""
        b = np.array([[0.9, 0.1], [0.1, 1.0]])
        report = validate_identifiability(make_params(0.1, np.ones(2), np.eye(2), b))

        assert not report["I1"].passed
        assert report["I2"].passed
        assert report["I3"].passed

    def test_indefinite_b(self):
        """测试 B 不正定"""
        b = np.array([[1.0, 1.0], [1.0, 1.0]])
        assert not validate_identifiability(make_params(0.1, np.ones(2), np.eye(2), b))["I1"].passed

    def test_missing_pure_node(self):
        """测试社区缺少纯节点"""
        s = 1 / np.sqrt(2)
        z = np.array([[1.0, 0, 0], [0, 1.0, 0], [s, 0, s], [s, s, 0]])
        report = validate_identifiability(make_params(0.1, np.ones(4), z, np.eye(3)))

        assert not report["I2"].passed
        assert any("社区 2" in detail for detail in report["I2"].details)

    def test_unnormalized_rows(self):
        """测试行范数不为 1"""
        z = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        assert not validate_identifiability(make_params(0.1, np.ones(3), z, np.eye(2)))["I2"].passed

    def test_theta_mean(self):
        """测试 θ 均值偏离 1"""
        report = validate_identifiability(make_params(0.1, np.array([1.0, 2.0]), np.eye(2), np.eye(2)))

        assert not report["I3"].passed
        assert not report.passed

    def test_hub_law_passes_after_normalization(self):
        """测试枢纽分布归一化后满足 I3"""
        network = generate_network(sampler_config(n=200, theta=ThetaLaw.two_point_hub(), degree=10.0, seed=4,
                                                   saturate=True))

        assert not validate_identifiability(network.params)["I3"].passed
        assert validate_identifiability(network.params.normalized()).passed

    def test_never_raises(self):
        """测试诊断从不抛出异常"""
        report = validate_identifiability(make_params(0.0, np.array([-1.0, 0.0]), -np.eye(2), -np.eye(2)))

        assert report.failed() == ("I1", "I2", "I3")


class TestSqrtPsd:
    """矩阵平方根测试类"""

    def test_identity(self):
        """测试单位阵"""
        np.testing.assert_allclose(sqrt_psd(np.eye(3)), np.eye(3), atol=1e-15)

    def test_diagonal(self):
        """测试对角阵"""
        np.testing.assert_allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_planted_values(self):
        """测试 K=3, ρ=0.25 的数值"""
        root = sqrt_psd(planted_partition_b(3, 0.25).entries)

        np.testing.assert_allclose(np.diag(root), 0.985599, atol=1e-5)
        assert root[0, 1] == pytest.approx(0.119573, abs=1e-5)

    def test_random_spectra(self):
        """测试随机半正定矩阵的平方根"""
        rng = np.random.default_rng(2024)
        for _ in range(50):
            k = int(rng.integers(1, 7))
            q, _ = np.linalg.qr(rng.normal(size=(k, k)))
            spectrum = rng.uniform(0, 5, k)
            spectrum[rng.random(k) < 0.2] = 0.0
            m = (q * spectrum) @ q.T
            m = (m + m.T) / 2
            root = sqrt_psd(m)

            assert np.array_equal(root, root.T)
            assert np.linalg.norm(root @ root - m) < 1e-9

    def test_small_negative_clamped(self):
        """测试容差内的负特征值被截断"""
        m = np.diag([1.0, -1e-10])
        np.testing.assert_allclose(sqrt_psd(m), np.diag([1.0, 0.0]), atol=1e-15)

    def test_not_psd(self):
        """测试不定矩阵"""
        with pytest.raises(NotPSD):
            sqrt_psd(np.diag([1.0, -0.1]))

    def test_not_symmetric(self):
        """测试非对称矩阵"""
        with pytest.raises(InvalidParameterError):
            sqrt_psd(np.array([[1.0, 0.5], [0.0, 1.0]]))


class TestPlantedPartition:
    """植入划分测试类"""

    def test_rho_zero(self):
        """测试 ρ=0 为单位阵"""
        np.testing.assert_array_equal(planted_partition_b(3, 0.0).entries, np.eye(3))
        np.testing.assert_allclose(planted_partition_sqrt_closed_form(3, 0.0), np.eye(3), atol=1e-15)

    def test_two_by_two(self):
        """测试 K=2, ρ=0.5"""
        np.testing.assert_allclose(planted_partition_b(2, 0.5).entries, [[1.0, 0.5], [0.5, 1.0]])

    def test_eigenvalues(self):
        """测试特征值 1+(K-1)ρ 与 1-ρ"""
        eigenvalues = planted_partition_b(3, 0.25).eigenvalues

        assert eigenvalues[-1] == pytest.approx(1.5)
        assert eigenvalues[0] == pytest.approx(0.75)
        assert eigenvalues[1] == pytest.approx(0.75)

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
    @pytest.mark.parametrize("rho", [0.0, 0.1, 0.25, 0.4])
    def test_closed_form_matches_sqrt(self, k, rho):
        """测试闭式平方根与数值平方根一致"""
        closed = planted_partition_sqrt_closed_form(k, rho)
        b = planted_partition_b(k, rho).entries

        np.testing.assert_allclose(sqrt_psd(b), closed, atol=1e-8)
        np.testing.assert_allclose(closed @ closed, b, atol=1e-10)

    @pytest.mark.parametrize("k, rho", [(0, 0.1), (3, 1.0), (3, -0.1)])
    def test_invalid_arguments(self, k, rho):
        """测试非法参数"""
        with pytest.raises(InvalidParameterError):
            planted_partition_b(k, rho)


class TestHausdorffDistance:
    """中心 Hausdorff 距离测试类"""

    def test_identical(self):
        """测试相同矩阵"""
        s = np.random.default_rng(0).random((3, 3))
        assert hausdorff_centers_distance(s, s) == 0.0

    def test_row_permutation(self):
        """测试行置换不变"""
        s = np.random.default_rng(1).random((4, 4))
        assert hausdorff_centers_distance(s, s[[2, 0, 3, 1]]) == 0.0

    def test_hand_example(self):
        """测试 S=I₂, T=diag(1, 2)"""
        assert hausdorff_centers_distance(np.eye(2), np.diag([1.0, 2.0])) == pytest.approx(1.0)

    def test_pseudometric(self):
        """测试对称性与三角不等式"""
        rng = np.random.default_rng(7)
        for _ in range(100):
            s, t, u = (rng.random((3, 3)) for _ in range(3))
            d_st = hausdorff_centers_distance(s, t)

            assert d_st == pytest.approx(hausdorff_centers_distance(t, s), abs=1e-15)
            assert d_st <= hausdorff_centers_distance(s, u) + hausdorff_centers_distance(u, t) + 1e-12
