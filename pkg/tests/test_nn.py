import math

import numpy as np
import pytest

from activesense import nn
from oracles import finite_difference, max_rel_err


def test_zero_net_gives_zero():
    params = nn.MLPParams([np.zeros((3, 4)), np.zeros((2, 3))], [np.zeros(3), np.zeros(2)])
    np.testing.assert_array_equal(nn.forward(params, np.ones(4))[0], np.zeros(2))


def test_identity_layer():
    params = nn.MLPParams([np.eye(3)], [np.zeros(3)])
    x = np.array([1.5, -2.0, 0.25])
    np.testing.assert_array_equal(nn.forward(params, x)[0], x)


def test_hand_evaluated_2_2_1():
    params = nn.MLPParams(
        [np.array([[1.0, -1.0], [0.5, 2.0]]), np.array([[3.0, -1.0]])],
        [np.array([0.0, -1.0]), np.array([0.5])],
    )
    # hidden pre-activation: [1 - 2, 0.5 + 4 - 1] = [-1, 3.5] -> relu [0, 3.5]
    # output: 3*0 - 3.5 + 0.5 = -3
    assert nn.forward(params, np.array([1.0, 2.0]))[0][0] == pytest.approx(-3.0)


def test_shape_mismatch():
    params = nn.MLPParams([np.eye(3)], [np.zeros(3)])
    with pytest.raises(ValueError):
        nn.forward(params, np.ones(4))
    with pytest.raises(ValueError):
        nn.MLPParams([np.eye(3), np.eye(2)], [np.zeros(3), np.zeros(2)])


def test_zero_upstream_gradient():
    params = nn.init_mlp([4, 5, 3], np.random.default_rng(0))
    _, cache = nn.forward(params, np.ones(4))
    grads = nn.backward(params, cache, np.zeros(3))
    assert all(np.all(g == 0) for g in grads.arrays())


def test_linear_unit_gradient():
    params = nn.MLPParams([np.array([[0.7]])], [np.array([0.1])])
    _, cache = nn.forward(params, np.array([2.5]))
    grads = nn.backward(params, cache, np.array([1.0]))
    assert grads.weights[0][0, 0] == 2.5
    assert grads.biases[0][0] == 1.0


LOSSES = {
    "sum": lambda out, t: (float(np.sum(out)), np.ones_like(out)),
    "squared": lambda out, t: (float(np.sum((out - t) ** 2)), 2 * (out - t)),
}


def _ce(out, t):
    # out are probabilities from a softmax head, t a class index
    return float(-np.log(out[t])), -np.eye(out.size)[t] / out[t]


@pytest.mark.parametrize("trial", range(20))
def test_gradient_check(trial):
    rng = np.random.default_rng(100 + trial)
    dims = list(rng.integers(1, 9, size=int(rng.integers(2, 5))))
    kind = ["sum", "squared", "ce"][trial % 3]
    if kind == "ce":
        dims[-1] = max(dims[-1], 2)
    head = "softmax" if kind == "ce" else "identity"
    params = nn.init_mlp(dims, rng, head=head)
    for b in params.biases:
        b[...] = rng.normal(scale=0.5, size=b.shape)
    x = rng.normal(size=dims[0])
    target = int(rng.integers(dims[-1])) if kind == "ce" else rng.normal(size=dims[-1])
    lossfn = _ce if kind == "ce" else LOSSES[kind]

    def f():
        return lossfn(nn.forward(params, x)[0], target)[0]

    out, cache = nn.forward(params, x)
    analytic = nn.backward(params, cache, lossfn(out, target)[1]).arrays()
    numeric = finite_difference(f, params.arrays())
    assert max_rel_err(analytic, numeric) <= 1e-4


def test_batched_gradient_equals_sum_of_singles():
    rng = np.random.default_rng(5)
    params = nn.init_mlp([4, 6, 3], rng)
    X = rng.normal(size=(5, 4))
    _, cache = nn.forward(params, X)
    batch = nn.backward(params, cache, np.ones((5, 3))).arrays()
    total = [np.zeros_like(a) for a in params.arrays()]
    for x in X:
        _, c = nn.forward(params, x)
        for acc, g in zip(total, nn.backward(params, c, np.ones(3)).arrays()):
            acc += g
    for a, b in zip(batch, total):
        np.testing.assert_allclose(a, b, atol=1e-12)


def test_input_gradient():
    rng = np.random.default_rng(8)
    params = nn.init_mlp([3, 5, 2], rng, head="softmax")
    x = rng.normal(size=3)
    out, cache = nn.forward(params, x)
    _, dx = nn.backward(params, cache, np.array([1.0, -2.0]), input_grad=True)
    num = finite_difference(lambda: float(nn.forward(params, x)[0] @ [1.0, -2.0]), [x])[0]
    np.testing.assert_allclose(dx, num, atol=1e-8)


def test_forward_backward_pure():
    rng = np.random.default_rng(9)
    params = nn.init_mlp([4, 8, 8, 3], rng)
    x = rng.normal(size=4)
    o1, c1 = nn.forward(params, x)
    o2, c2 = nn.forward(params, x)
    assert np.array_equal(o1, o2)
    g1 = nn.backward(params, c1, np.ones(3)).arrays()
    g2 = nn.backward(params, c2, np.ones(3)).arrays()
    assert all(np.array_equal(a, b) for a, b in zip(g1, g2))


class TestSoftmax:
    def test_examples(self):
        np.testing.assert_allclose(nn.softmax([0.0, 0.0]), [0.5, 0.5])
        np.testing.assert_allclose(nn.softmax([math.log(1), math.log(3)]), [0.25, 0.75], atol=1e-15)

    def test_simplex_and_shift(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            z = rng.normal(scale=20, size=7)
            s = nn.softmax(z)
            assert abs(s.sum() - 1) <= 1e-12 and np.all(s >= 0)
            np.testing.assert_allclose(nn.softmax(z + rng.normal(scale=100)), s, atol=1e-12)

    def test_log_softmax_consistent(self):
        z = np.array([1.0, -3.0, 700.0])
        np.testing.assert_allclose(np.exp(nn.log_softmax(z)), nn.softmax(z), atol=1e-15)


class TestAdam:
    def _scalar(self, value=0.0):
        params = nn.MLPParams([np.array([[value]])], [np.array([0.0])])
        return params, nn.AdamState.for_params(params)

    def test_zero_gradient(self):
        params, state = self._scalar(1.5)
        nn.adam_step(params, state, nn.zeros_like_mlp(params))
        assert params.weights[0][0, 0] == 1.5 and state.t == 1

    def test_first_step(self):
        params, state = self._scalar(0.0)
        grads = nn.zeros_like_mlp(params)
        grads.weights[0][0, 0] = 1.0
        nn.adam_step(params, state, grads)
        assert params.weights[0][0, 0] == pytest.approx(-1e-3 / (1 + 1e-8), rel=1e-12)

    def test_rejects_non_finite(self):
        params, state = self._scalar()
        grads = nn.zeros_like_mlp(params)
        grads.biases[0][0] = np.nan
        with pytest.raises(FloatingPointError):
            nn.adam_step(params, state, grads)

    def test_deterministic(self):
        def run():
            rng = np.random.default_rng(4)
            net = nn.Network.create([3, 4, 2], rng)
            for _ in range(10):
                x = rng.normal(size=3)
                out, cache = nn.forward(net.params, x)
                net.step(nn.backward(net.params, cache, out))
            return net.params.arrays()

        assert all(np.array_equal(a, b) for a, b in zip(run(), run()))

    def test_moments_nonnegative(self):
        rng = np.random.default_rng(3)
        net = nn.Network.create([3, 4, 2], rng)
        for _ in range(5):
            out, cache = nn.forward(net.params, rng.normal(size=3))
            net.step(nn.backward(net.params, cache, rng.normal(size=2)))
        assert all(np.all(v >= 0) for v in net.adam.v)

    def test_lagged_snapshot_is_previous_params(self):
        rng = np.random.default_rng(2)
        net = nn.Network.create([2, 3, 1], rng, lagged=True)
        before = net.params.copy()
        out, cache = nn.forward(net.params, np.ones(2))
        net.step(nn.backward(net.params, cache, np.ones(1)))
        assert all(np.array_equal(a, b) for a, b in zip(net.lagged.arrays(), before.arrays()))
        assert not all(np.array_equal(a, b) for a, b in zip(net.params.arrays(), before.arrays()))


def test_init_bounds():
    rng = np.random.default_rng(0)
    params = nn.init_mlp([8, 64, 64, 7], rng)
    for w, b in zip(params.weights, params.biases):
        lim = math.sqrt(6 / (w.shape[0] + w.shape[1]))
        assert np.all(np.abs(w) <= lim) and np.all(b == 0)
