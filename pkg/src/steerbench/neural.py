"""Dense Q-network with hand-written forward and backward passes.

No autograd anywhere: gradients are derived by hand for the MSE-on-chosen-
action loss and verified against central differences in the test suite.
Everything is float64 numpy, which keeps training bit-reproducible for a
fixed seed on a given platform.

Layers are fully connected with ReLU on the hidden layers and identity on
the output. Weights use He-uniform initialization, U(-sqrt(6/fan_in),
+sqrt(6/fan_in)); biases start at zero.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "QNetwork",
    "Gradients",
    "OptimizerState",
    "qnet_init",
    "forward",
    "forward_batch",
    "loss_and_gradients",
    "init_optimizer",
    "apply_update",
    "clone_weights",
    "n_parameters",
    "save_qnet",
    "load_qnet",
]

_MAGIC = b"SBQN"
_FORMAT_VERSION = 1


@dataclass
class QNetwork:
    sizes: tuple[int, ...]
    weights: list[np.ndarray] = field(repr=False)  # weights[l]: (sizes[l+1], sizes[l])
    biases: list[np.ndarray] = field(repr=False)


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def qnet_init(sizes: tuple[int, ...], rng: np.random.Generator) -> QNetwork:
    """Fresh network with He-uniform weights, drawn layer by layer."""
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return QNetwork(sizes=tuple(sizes), weights=weights, biases=biases)


def n_parameters(net: QNetwork) -> int:
    return sum(w.size + b.size for w, b in zip(net.weights, net.biases))


def _forward_cached(net: QNetwork, X: np.ndarray):
    """Batch forward pass keeping pre-activations for backprop."""
    acts = [X]
    zs = []
    a = X
    last = len(net.weights) - 1
    for l, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ W.T + b
        zs.append(z)
        a = z if l == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts, zs


def forward_batch(net: QNetwork, X: np.ndarray) -> np.ndarray:
    acts, _ = _forward_cached(net, np.asarray(X, dtype=float))
    return acts[-1]


def forward(net: QNetwork, x: np.ndarray) -> np.ndarray:
    """Q-values for a single observation."""
    return forward_batch(net, np.asarray(x, dtype=float)[None, :])[0]


def loss_and_gradients(
    net: QNetwork, X: np.ndarray, actions: np.ndarray, targets: np.ndarray
) -> tuple[float, Gradients]:
    """Mean squared error on the chosen actions' Q-values, with gradients.

    loss = mean_i (Q(x_i)[a_i] - y_i)^2. Unchosen outputs get zero output
    gradient; the rest is standard dense backprop.
    """
    X = np.asarray(X, dtype=float)
    actions = np.asarray(actions, dtype=int)
    targets = np.asarray(targets, dtype=float)
    batch = X.shape[0]
    acts, zs = _forward_cached(net, X)
    q = acts[-1]
    rows = np.arange(batch)
    diff = q[rows, actions] - targets
    loss = float(np.mean(diff**2))

    delta = np.zeros_like(q)
    delta[rows, actions] = 2.0 * diff / batch
    g_w = [None] * len(net.weights)
    g_b = [None] * len(net.biases)
    for l in range(len(net.weights) - 1, -1, -1):
        g_w[l] = delta.T @ acts[l]
        g_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ net.weights[l]) * (zs[l - 1] > 0.0)
    return loss, Gradients(weights=g_w, biases=g_b)


@dataclass
class OptimizerState:
    kind: str
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m_w: list[np.ndarray] | None = None
    v_w: list[np.ndarray] | None = None
    m_b: list[np.ndarray] | None = None
    v_b: list[np.ndarray] | None = None


def init_optimizer(net: QNetwork, kind: str = "adam", lr: float = 1e-3) -> OptimizerState:
    if kind not in ("adam", "sgd"):
        raise ValueError(f"unknown optimizer: {kind!r}")
    state = OptimizerState(kind=kind, lr=lr)
    if kind == "adam":
        state.m_w = [np.zeros_like(w) for w in net.weights]
        state.v_w = [np.zeros_like(w) for w in net.weights]
        state.m_b = [np.zeros_like(b) for b in net.biases]
        state.v_b = [np.zeros_like(b) for b in net.biases]
    return state


def apply_update(net: QNetwork, grads: Gradients, opt: OptimizerState) -> None:
    """One optimizer step, in place."""
    if opt.kind == "sgd":
        for w, gw in zip(net.weights, grads.weights):
            w -= opt.lr * gw
        for b, gb in zip(net.biases, grads.biases):
            b -= opt.lr * gb
        return
    opt.t += 1
    bc1 = 1.0 - opt.beta1**opt.t
    bc2 = 1.0 - opt.beta2**opt.t
    params = [*net.weights, *net.biases]
    gs = [*grads.weights, *grads.biases]
    ms = [*opt.m_w, *opt.m_b]
    vs = [*opt.v_w, *opt.v_b]
    for p, g, m, v in zip(params, gs, ms, vs):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        p -= opt.lr * (m / bc1) / (np.sqrt(v / bc2) + opt.eps)


def clone_weights(net: QNetwork) -> QNetwork:
    return QNetwork(
        sizes=net.sizes,
        weights=[w.copy() for w in net.weights],
        biases=[b.copy() for b in net.biases],
    )


def save_qnet(net: QNetwork, fh) -> None:
    """Write the network to a binary file object (layout: magic, version,
    layer sizes, then per layer the raw little-endian float64 W and b)."""
    fh.write(_MAGIC)
    fh.write(struct.pack("<II", _FORMAT_VERSION, len(net.sizes)))
    fh.write(struct.pack(f"<{len(net.sizes)}I", *net.sizes))
    for w, b in zip(net.weights, net.biases):
        fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_qnet(fh) -> QNetwork:
    magic = fh.read(4)
    if magic != _MAGIC:
        raise ValueError("not a network blob")
    version, n_sizes = struct.unpack("<II", fh.read(8))
    if version != _FORMAT_VERSION:
        raise ValueError(f"unsupported network blob version {version}")
    sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        raw_w = fh.read(8 * fan_in * fan_out)
        raw_b = fh.read(8 * fan_out)
        if len(raw_w) != 8 * fan_in * fan_out or len(raw_b) != 8 * fan_out:
            raise ValueError("network blob shorter than its declared layer sizes")
        weights.append(np.frombuffer(raw_w, dtype="<f8").reshape(fan_out, fan_in).astype(float))
        biases.append(np.frombuffer(raw_b, dtype="<f8").astype(float))
    return QNetwork(sizes=tuple(int(s) for s in sizes), weights=weights, biases=biases)
