import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cann import _kernels, mlp
from cann.errors import ConfigurationError, DivergenceError, ShapeError


def fd_gradient(net, x, h=1e-6):
    """Central differences of the network output w.r.t. every parameter."""
    out = np.empty_like(net.flat)
    for k in range(net.flat.size):
        saved = net.flat[k]
        net.flat[k] = saved + h
        up = mlp.forward(net, x)
        net.flat[k] = saved - h
        down = mlp.forward(net, x)
        net.flat[k] = saved
        out[k] = (up - down) / (2 * h)
    return out


def assert_grad_close(analytic, numeric, rel=1e-6, abs_=1e-9):
    err = np.abs(analytic - numeric)
    ok = (err <= rel * np.abs(numeric)) | (err <= abs_)
    assert ok.all(), f"worst mismatch {err.max():.3e}"


def test_init_is_deterministic():
    a = mlp.init_random([2, 5, 5, 1], seed=3)
    b = mlp.init_random([2, 5, 5, 1], seed=3)
    assert a == b
    assert not np.array_equal(a.flat, mlp.init_random([2, 5, 5, 1], seed=4).flat)


def test_init_statistics():
    net = mlp.init_random([1, 300, 330, 1], seed=11)
    draws = net.flat
    assert draws.size >= 100_000
    assert -0.005 < draws.mean() < 0.005
    assert 0.095 < draws.std() < 0.105


@pytest.mark.parametrize("sizes", [[2, 1], [2, 3, 2], [0, 3, 1]])
def test_bad_sizes(sizes):
    with pytest.raises(ConfigurationError):
        mlp.init_random(sizes, 0)


def test_weights_are_views_into_flat():
    net = mlp.init_random([3, 4, 1], 0)
    assert net.weights[0].shape == (4, 3) and net.biases[0].shape == (4,)
    assert net.weights[1].shape == (1, 4) and net.biases[1].shape == (1,)
    net.flat[:] = 0.0
    assert not net.weights[0].any()


def test_forward_zero_net():
    net = mlp.zeros([3, 6, 1])
    assert mlp.forward(net, [1.0, -2.0, 5.0]) == 0.0


def test_forward_hand_evaluation():
    net = mlp.MlpNetwork.from_layers([[[1.0]], [[1.0]]], [[0.0], [0.0]])
    assert mlp.forward(net, [0.5]) == pytest.approx(math.tanh(0.5))
    assert mlp.forward(net, [0.5]) == pytest.approx(0.462117, abs=5e-7)


def test_output_affine_in_last_bias():
    net = mlp.init_random([2, 5, 5, 1], 1)
    x = np.array([0.3, -0.2])
    y0 = mlp.forward(net, x)
    net.biases[-1][0] += 0.75
    assert mlp.forward(net, x) == pytest.approx(y0 + 0.75, abs=1e-15)


def test_forward_shape_error():
    with pytest.raises(ShapeError):
        mlp.forward(mlp.zeros([2, 3, 1]), [1.0, 2.0, 3.0])


def test_forward_batch_matches_single():
    net = mlp.init_random([3, 7, 4, 1], 5)
    X = np.random.default_rng(0).normal(size=(9, 3))
    batch = mlp.forward_batch(net, X)
    single = [mlp.forward(net, x) for x in X]
    np.testing.assert_allclose(batch, single, rtol=1e-14, atol=1e-15)
    compiled = _kernels.forward_rows(net.flat, np.array(net.layer_sizes), X)
    np.testing.assert_allclose(compiled, single, rtol=1e-13, atol=1e-15)


def test_backward_zero_scale():
    net = mlp.init_random([2, 4, 1], 2)
    g = mlp.backward(net, [0.1, 0.2], 0.0)
    assert not g.flat.any()


def test_backward_identity_output_bias():
    net = mlp.MlpNetwork.from_layers([[[1.0]], [[1.0]]], [[0.0], [0.0]])
    g = mlp.backward(net, [0.5], 1.0)
    assert g.biases[-1][0] == 1.0
    assert g.weights[-1][0, 0] == pytest.approx(math.tanh(0.5))
    assert g.dx[0] == pytest.approx(1 - math.tanh(0.5) ** 2)


def test_backward_matches_finite_differences_fixed():
    rng = np.random.default_rng(0)
    for _ in range(100):
        sizes = [int(rng.integers(1, 8)), int(rng.integers(1, 10)), 1]
        if rng.random() < 0.5:
            sizes.insert(2, int(rng.integers(1, 10)))
        net = mlp.MlpNetwork(sizes, rng.normal(0, 0.5, mlp.n_params(sizes)))
        x = rng.normal(size=sizes[0])
        assert_grad_close(mlp.backward(net, x, 1.0).flat, fd_gradient(net, x))


@settings(max_examples=40, deadline=None)
@given(
    depth=st.sampled_from([3, 4]),
    widths=st.lists(st.integers(1, 16), min_size=3, max_size=3),
    seed=st.integers(0, 2**31 - 1),
)
def test_gradient_property(depth, widths, seed):
    sizes = widths[: depth - 1] + [1]
    rng = np.random.default_rng(seed)
    net = mlp.MlpNetwork(sizes, rng.normal(0, 0.4, mlp.n_params(sizes)))
    x = rng.normal(size=sizes[0])
    assert_grad_close(mlp.backward(net, x, 1.0).flat, fd_gradient(net, x))


def test_input_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    net = mlp.MlpNetwork([4, 6, 1], rng.normal(0, 0.5, mlp.n_params([4, 6, 1])))
    x = rng.normal(size=4)
    h = 1e-6
    fd = [(mlp.forward(net, x + h * e) - mlp.forward(net, x - h * e)) / (2 * h) for e in np.eye(4)]
    assert_grad_close(mlp.backward(net, x, 1.0).dx, np.array(fd))


def test_saturation_is_finite():
    net = mlp.MlpNetwork.from_layers([[[20.0]], [[1.0]]], [[0.0], [0.0]])
    for x in (-1.0, 1.0):
        assert np.isfinite(mlp.forward(net, [x]))
        assert np.all(np.isfinite(mlp.backward(net, [x], 1.0).flat))


def test_sgd_step_rules():
    net = mlp.init_random([2, 3, 1], 0)
    before = net.copy()
    mlp.sgd_step(net, mlp.GradientBuffer(net.layer_sizes), 0.01)
    assert net == before

    one = mlp.MlpNetwork([1, 1, 1])
    one.flat[0] = 1.0
    g = mlp.GradientBuffer(one.layer_sizes)
    g.flat[0] = 2.0
    mlp.sgd_step(one, g, 0.01)
    assert one.flat[0] == pytest.approx(0.98)


def test_sgd_two_steps_equal_one_double_step():
    a = mlp.init_random([2, 3, 1], 9)
    b = a.copy()
    g = mlp.backward(a, [0.2, -0.4], 1.3)
    g2 = mlp.GradientBuffer(a.layer_sizes, 2 * g.flat)
    mlp.sgd_step(a, g, 0.01)
    mlp.sgd_step(a, g, 0.01)
    mlp.sgd_step(b, g2, 0.01)
    np.testing.assert_allclose(a.flat, b.flat, rtol=0, atol=1e-16)


def test_sgd_rejects_bad_gradient():
    net = mlp.init_random([2, 3, 1], 0)
    g = mlp.GradientBuffer(net.layer_sizes)
    g.flat[1] = np.nan
    with pytest.raises(DivergenceError):
        mlp.sgd_step(net, g, 0.01)
    with pytest.raises(ShapeError):
        mlp.sgd_step(net, mlp.GradientBuffer([2, 4, 1]), 0.01)


def test_layer_dump_round_trip():
    net = mlp.init_random([7, 8, 8, 1], 21)
    assert mlp.LayerDump.of(net).to_network() == net
