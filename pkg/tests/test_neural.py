"""Hand-rolled Q-network: forward oracle, gradient checks, optimizers, I/O."""

from __future__ import annotations

import io

import numpy as np
import pytest

from steerbench.neural import (
    QNetwork,
    apply_update,
    clone_weights,
    forward,
    forward_batch,
    init_optimizer,
    load_qnet,
    loss_and_gradients,
    n_parameters,
    qnet_init,
    save_qnet,
)


def _oracle_forward(net: QNetwork, x: np.ndarray) -> np.ndarray:
    """Forward pass written neuron by neuron, sharing no code with the
    production implementation."""
    a = [float(v) for v in x]
    n_layers = len(net.weights)
    for l in range(n_layers):
        W, b = net.weights[l], net.biases[l]
        out = []
        for i in range(W.shape[0]):
            s = b[i]
            for j in range(W.shape[1]):
                s += W[i, j] * a[j]
            if l < n_layers - 1 and s < 0.0:
                s = 0.0
            out.append(s)
        a = out
    return np.array(a)


def test_forward_matches_neuron_level_oracle():
    rng = np.random.default_rng(0)
    net = qnet_init((5, 7, 6, 4), rng)
    for _ in range(20):
        x = rng.normal(size=5)
        np.testing.assert_allclose(forward(net, x), _oracle_forward(net, x), atol=1e-12)


def test_forward_batch_matches_single():
    rng = np.random.default_rng(1)
    net = qnet_init((8, 16, 8, 3), rng)
    X = rng.normal(size=(32, 8))
    batch = forward_batch(net, X)
    for i in range(32):
        np.testing.assert_allclose(batch[i], forward(net, X[i]), atol=1e-14)


def test_parameter_count_formula():
    rng = np.random.default_rng(0)
    sizes = (49, 128, 64, 11)
    net = qnet_init(sizes, rng)
    expect = sum(
        sizes[l] * sizes[l + 1] + sizes[l + 1] for l in range(len(sizes) - 1)
    )
    assert n_parameters(net) == expect == 15_371


def test_init_is_seed_deterministic_and_he_bounded():
    a = qnet_init((10, 20, 5), np.random.default_rng(99))
    b = qnet_init((10, 20, 5), np.random.default_rng(99))
    for wa, wb in zip(a.weights, b.weights):
        np.testing.assert_array_equal(wa, wb)
    for w, fan_in in zip(a.weights, (10, 20)):
        limit = np.sqrt(6.0 / fan_in)
        assert np.all(np.abs(w) <= limit)
    for bias in a.biases:
        assert not bias.any()


def _min_preactivation(net: QNetwork, X: np.ndarray) -> float:
    """Smallest |z| over the hidden layers; the loss is not differentiable
    where a pre-activation sits exactly on the ReLU kink, so finite
    differences are only checked away from it."""
    a = X
    worst = np.inf
    for l, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W.T + b
        if l < len(net.weights) - 1:
            worst = min(worst, float(np.min(np.abs(z))))
            a = np.maximum(z, 0.0)
        else:
            a = z
    return worst


def test_gradients_match_central_differences():
    """100 random cases; relative error below 1e-4 everywhere."""
    rng = np.random.default_rng(7)
    h = 1e-6
    checked = 0
    while checked < 100:
        sizes = (
            int(rng.integers(2, 6)),
            int(rng.integers(3, 9)),
            int(rng.integers(3, 9)),
            int(rng.integers(2, 5)),
        )
        net = qnet_init(sizes, rng)
        batch = int(rng.integers(1, 5))
        X = rng.normal(size=(batch, sizes[0]))
        actions = rng.integers(0, sizes[-1], size=batch)
        targets = rng.normal(size=batch)
        if _min_preactivation(net, X) < 1e-3:
            continue
        checked += 1
        _, grads = loss_and_gradients(net, X, actions, targets)

        def loss_of(perturbed):
            q = forward_batch(perturbed, X)
            d = q[np.arange(batch), actions] - targets
            return float(np.mean(d**2))

        for l in range(len(net.weights)):
            for arr, g in ((net.weights[l], grads.weights[l]), (net.biases[l], grads.biases[l])):
                flat = arr.reshape(-1)
                # probe a handful of coordinates per tensor
                for idx in rng.choice(flat.size, size=min(4, flat.size), replace=False):
                    orig = flat[idx]
                    flat[idx] = orig + h
                    up = loss_of(net)
                    flat[idx] = orig - h
                    down = loss_of(net)
                    flat[idx] = orig
                    numeric = (up - down) / (2 * h)
                    analytic = g.reshape(-1)[idx]
                    denom = max(1e-8, abs(numeric) + abs(analytic))
                    assert abs(numeric - analytic) / denom < 1e-4


def test_loss_value_is_mse_on_chosen_actions():
    rng = np.random.default_rng(3)
    net = qnet_init((4, 6, 3), rng)
    X = rng.normal(size=(5, 4))
    actions = np.array([0, 2, 1, 1, 0])
    targets = rng.normal(size=5)
    loss, _ = loss_and_gradients(net, X, actions, targets)
    q = forward_batch(net, X)
    assert loss == pytest.approx(np.mean((q[np.arange(5), actions] - targets) ** 2))


def test_sgd_step_is_plain_descent():
    rng = np.random.default_rng(0)
    net = qnet_init((3, 4, 2), rng)
    before = clone_weights(net)
    opt = init_optimizer(net, "sgd", lr=0.1)
    X = rng.normal(size=(4, 3))
    _, grads = loss_and_gradients(net, X, np.zeros(4, dtype=int), np.ones(4))
    apply_update(net, grads, opt)
    for w0, w1, g in zip(before.weights, net.weights, grads.weights):
        np.testing.assert_allclose(w1, w0 - 0.1 * g, atol=1e-15)


def test_adam_first_step_has_unit_scaled_direction():
    """After one step m-hat = g and v-hat = g^2, so the move is
    -lr * g / (|g| + eps) elementwise."""
    rng = np.random.default_rng(0)
    net = qnet_init((3, 4, 2), rng)
    before = clone_weights(net)
    opt = init_optimizer(net, "adam", lr=0.01)
    X = rng.normal(size=(4, 3))
    _, grads = loss_and_gradients(net, X, np.zeros(4, dtype=int), np.ones(4))
    apply_update(net, grads, opt)
    for w0, w1, g in zip(before.weights, net.weights, grads.weights):
        expect = w0 - 0.01 * g / (np.abs(g) + 1e-8)
        np.testing.assert_allclose(w1, expect, atol=1e-12)


def test_training_reduces_loss_on_fixed_batch():
    rng = np.random.default_rng(5)
    net = qnet_init((6, 16, 4), rng)
    opt = init_optimizer(net, "adam", lr=1e-2)
    X = rng.normal(size=(32, 6))
    actions = rng.integers(0, 4, size=32)
    targets = rng.normal(size=32)
    first, grads = loss_and_gradients(net, X, actions, targets)
    for _ in range(200):
        loss, grads = loss_and_gradients(net, X, actions, targets)
        apply_update(net, grads, opt)
    assert loss < 0.05 * first


def test_clone_is_independent():
    net = qnet_init((3, 4, 2), np.random.default_rng(0))
    twin = clone_weights(net)
    twin.weights[0][0, 0] += 1.0
    assert net.weights[0][0, 0] != twin.weights[0][0, 0]


def test_unknown_optimizer_rejected():
    net = qnet_init((3, 4, 2), np.random.default_rng(0))
    with pytest.raises(ValueError):
        init_optimizer(net, "rmsprop")


def test_save_load_round_trip_is_bit_exact():
    net = qnet_init((5, 9, 4), np.random.default_rng(11))
    buf = io.BytesIO()
    save_qnet(net, buf)
    buf.seek(0)
    back = load_qnet(buf)
    assert back.sizes == net.sizes
    for a, b in zip(net.weights, back.weights):
        np.testing.assert_array_equal(a, b)
    for a, b in zip(net.biases, back.biases):
        np.testing.assert_array_equal(a, b)


def test_load_rejects_wrong_magic():
    with pytest.raises(ValueError):
        load_qnet(io.BytesIO(b"NOPE" + b"\x00" * 64))


def test_load_rejects_truncated_blob():
    net = qnet_init((5, 9, 4), np.random.default_rng(11))
    buf = io.BytesIO()
    save_qnet(net, buf)
    clipped = buf.getvalue()[:-16]  # drop part of the last layer
    with pytest.raises(ValueError, match="declared layer sizes"):
        load_qnet(io.BytesIO(clipped))
