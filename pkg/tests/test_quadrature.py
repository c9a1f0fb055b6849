import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cauchy_leray.quadrature import (
    GradedScheme,
    QuadratureError,
    axis_rule,
    gauss_rule,
    integrate_box,
    integrate_graded,
    tensor_rule,
)


def test_gauss_rule_examples():
    r2 = gauss_rule(2)
    np.testing.assert_allclose(np.sort(r2.nodes), [-0.5773503, 0.5773503], atol=1e-7)
    np.testing.assert_allclose(r2.weights, [1, 1])
    r1 = gauss_rule(1)
    assert r1.nodes[0] == 0 and r1.weights[0] == 2


@pytest.mark.parametrize("order", [0, 65])
def test_gauss_rule_order_guard(order):
    with pytest.raises(QuadratureError):
        gauss_rule(order)


@settings(max_examples=60, deadline=None)
@given(order=st.integers(1, 40), data=st.data())
def test_gauss_exactness(order, data):
    j = data.draw(st.integers(0, 2 * order - 1))
    x, w = gauss_rule(order).mapped(0.0, 1.0)
    assert np.sum(w * x**j) == pytest.approx(1.0 / (j + 1), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(lo=st.floats(-5, 5), width=st.floats(1e-3, 10), order=st.integers(1, 64))
def test_weights_positive_and_sum_to_length(lo, width, order):
    x, w = gauss_rule(order).mapped(lo, lo + width)
    assert np.all(w > 0)
    assert np.sum(w) == pytest.approx(width, rel=1e-13)


def test_integrate_box_examples():
    val, _ = integrate_box([0, 0, 0], [1, 1, 1], lambda t: np.ones(len(t)))
    assert val == pytest.approx(1.0, abs=1e-15)
    val, _ = integrate_box([0], [1], lambda t: t[:, 0] ** 2, orders=2)
    assert val == pytest.approx(1 / 3, abs=1e-15)
    val, err = integrate_box([0], [1], lambda t: np.exp(t[:, 0]), orders=8)
    assert val == pytest.approx(np.e - 1, abs=1e-12)
    assert err < 1e-12


def test_integrate_box_rejects_nonfinite():
    with pytest.raises(QuadratureError):
        integrate_box([0], [1], lambda t: np.full(len(t), np.nan))


def test_graded_examples():
    val, err = integrate_graded([0], [1], lambda t: np.ones(len(t)), GradedScheme(gamma=-0.5))
    assert val == pytest.approx(2.0, abs=1e-8)
    c = 8.3333e-4
    val, _ = integrate_graded([-c], [c], lambda t: np.ones(len(t)), GradedScheme(gamma=-0.5))
    assert val == pytest.approx(4 * np.sqrt(c), abs=1e-8)
    # a = 1/12, delta = 0.1 (mpmath oracle)
    c = 0.01 / 12
    val, _ = integrate_graded([-c], [c], lambda t: np.ones(len(t)), GradedScheme(gamma=-0.5))
    assert val == pytest.approx(0.11547005383792515, abs=1e-8)


def test_graded_guard():
    with pytest.raises(QuadratureError):
        GradedScheme(gamma=-1.0)
    with pytest.raises(QuadratureError):
        GradedScheme(levels=0)


def test_graded_converges_in_levels():
    c = 0.3
    f = lambda t: np.cos(t[:, 0])
    v12, _ = integrate_graded([-c], [c], f, GradedScheme(levels=12, gamma=-0.5))
    v24, _ = integrate_graded([-c], [c], f, GradedScheme(levels=24, gamma=-0.5))
    assert abs(v12 - v24) < 1e-8


def test_error_estimate_shrinks_with_order():
    f = lambda t: 1.0 / (0.05 + t[:, 0]) ** 2
    _, e4 = integrate_box([0], [1], f, orders=4)
    _, e8 = integrate_box([0], [1], f, orders=8)
    assert e8 < e4


def test_axis_rule_off_zero_applies_weight():
    scheme = GradedScheme(gamma=-0.5)
    x, w = axis_rule(1.0, 4.0, 20, scheme)
    assert np.sum(w) == pytest.approx(2.0, rel=1e-10)


def test_tensor_rule_shape_and_order():
    nodes, w = tensor_rule([0, 0], [1, 2], (3, 4))
    assert nodes.shape == (12, 2)
    assert np.sum(w) == pytest.approx(2.0)
    with pytest.raises(QuadratureError):
        axis_rule(1.0, 0.0, 4)
