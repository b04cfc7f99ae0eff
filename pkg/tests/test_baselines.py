import math

import numpy as np
import pytest
from scipy.special import roots_hermite

from scaledlattice.baselines import (
    QuadratureRule1D,
    gauss_hermite_1d,
    level_count,
    smolyak_node_count,
    smolyak_quadrature,
    tensor_quadrature,
    tensor_quadrature_lebesgue,
)
from scaledlattice.errors import DomainError, ResourceError


def hermite_moment(k):
    """int x^k exp(-x^2) dx."""
    return 0.0 if k % 2 else math.gamma((k + 1) / 2)


class TestGaussHermite:
    def test_single_node(self):
        rule = gauss_hermite_1d(1)
        assert rule.nodes.tolist() == [0.0]
        assert rule.weights[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)

    def test_two_nodes(self):
        rule = gauss_hermite_1d(2)
        assert np.allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=0, atol=1e-15)
        assert np.allclose(rule.weights, math.sqrt(math.pi) / 2, rtol=1e-14)

    def test_second_moment(self):
        rule = gauss_hermite_1d(2)
        assert abs(np.sum(rule.weights * rule.nodes ** 2) - math.sqrt(math.pi) / 2) <= 1e-14

    @pytest.mark.parametrize("count", [1, 2, 5, 17, 65, 257, 513])
    def test_mass(self, count):
        assert abs(math.fsum(gauss_hermite_1d(count).weights) - math.sqrt(math.pi)) <= 1e-12

    def test_exactness_degrees(self):
        rule = gauss_hermite_1d(5)
        for k in range(10):
            val = math.fsum(rule.weights * rule.nodes ** k)
            assert val == pytest.approx(hermite_moment(k), rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("count", [3, 9, 33, 129, 257])
    def test_symmetry_and_positivity(self, count):
        rule = gauss_hermite_1d(count)
        assert np.array_equal(rule.nodes, -rule.nodes[::-1])
        assert np.array_equal(rule.weights, rule.weights[::-1])
        assert np.all(rule.weights > 0)

    @pytest.mark.parametrize("count", [4, 9, 33, 100, 200])
    def test_matches_reference_rule(self, count):
        x, w = roots_hermite(count)
        rule = gauss_hermite_1d(count)
        assert np.allclose(rule.nodes, x, rtol=1e-13, atol=1e-13)
        assert np.allclose(rule.weights, w, rtol=1e-10, atol=0)

    def test_largest_rule_underflows_only_beyond_double_range(self):
        rule = gauss_hermite_1d(513)
        # weights below the smallest subnormal are exactly zero; all others positive
        assert np.all(rule.weights[np.abs(rule.nodes) < 26] > 0)

    @pytest.mark.parametrize("count", [0, 514, 2.5])
    def test_bad_count(self, count):
        with pytest.raises(DomainError):
            gauss_hermite_1d(count)

    def test_level_counts(self):
        assert [level_count(l) for l in range(5)] == [1, 3, 5, 9, 17]
        with pytest.raises(DomainError):
            level_count(-1)


class TestTensor:
    @pytest.mark.parametrize("count", [1, 2, 5])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_constant(self, count, d):
        assert tensor_quadrature(gauss_hermite_1d(count), d, lambda x: np.ones(x.shape[0])) == pytest.approx(1.0, abs=1e-14)

    def test_second_moments(self):
        assert tensor_quadrature(gauss_hermite_1d(2), 2, lambda x: np.sum(x * x, axis=1)) == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("count", [2, 3, 9])
    def test_even_integer_sigma_exact(self, count):
        # (1 + x^2) per axis against the normal density: E = 2 per axis
        for d in (1, 2, 3):
            val = tensor_quadrature(gauss_hermite_1d(count), d, lambda x: np.prod(1 + x * x, axis=1))
            assert val == pytest.approx(2.0 ** d, rel=1e-13)

    def test_lebesgue_wrapper(self):
        # g / phi = (1 + x_1^2)(1 + x_2^2) is a polynomial, so 2 nodes are exact
        g = lambda x: np.prod((1 + x * x) * np.exp(-x * x / 2) / math.sqrt(2 * math.pi), axis=1)  # noqa: E731
        assert tensor_quadrature_lebesgue(gauss_hermite_1d(2), 2, g) == pytest.approx(4.0, rel=1e-14)

    def test_budget(self):
        with pytest.raises(ResourceError):
            tensor_quadrature(gauss_hermite_1d(513), 3, lambda x: np.ones(x.shape[0]))


class TestSmolyak:
    @pytest.mark.parametrize("level", range(0, 8))
    def test_d1_equals_tensor(self, level):
        f = lambda x: np.cos(x[:, 0]) + x[:, 0] ** 4  # noqa: E731
        assert smolyak_quadrature(level, 1, f) == tensor_quadrature(gauss_hermite_1d(level_count(level)), 1, f)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_constant(self, d):
        for level in range(0, 5):
            assert smolyak_quadrature(level, d, lambda x: np.ones(x.shape[0])) == pytest.approx(1.0, abs=1e-13)

    def test_level0_linear_exact(self):
        f = lambda x: 3.0 + 2.0 * x[:, 0] - 5.0 * x[:, 1]  # noqa: E731
        assert smolyak_quadrature(0, 2, f) == pytest.approx(3.0, abs=1e-15)

    def test_mixed_moment(self):
        f = lambda x: x[:, 0] ** 2 * x[:, 1] ** 2 * x[:, 2] ** 4  # noqa: E731
        assert smolyak_quadrature(4, 3, f) == pytest.approx(3.0, rel=1e-12)

    def test_level_cap(self):
        with pytest.raises(DomainError):
            smolyak_quadrature(11, 1, lambda x: x[:, 0])

    def test_node_count_below_tensor(self):
        assert smolyak_node_count(6, 3) < level_count(6) ** 3


def test_rule_normal_mapping():
    rule = QuadratureRule1D(np.array([1.0]), np.array([math.sqrt(math.pi)])).normal()
    assert rule.nodes[0] == math.sqrt(2.0)
    assert rule.weights[0] == pytest.approx(1.0, rel=1e-15)
