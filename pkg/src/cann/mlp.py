"""Fully connected tanh network with an identity output layer.

Parameters live in one flat float64 vector; ``weights[i]`` and
``biases[i]`` are reshaped views into it, so an SGD update on the flat
vector updates every layer in place.  Layout per layer ``i``: the
``n_{i+1} x n_i`` weight matrix (row-major) followed by its bias vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DivergenceError, ShapeError

INIT_STD = 0.1


def _check_sizes(layer_sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(n) for n in layer_sizes)
    if len(sizes) < 3:
        raise ConfigurationError(f"need at least one hidden layer (M >= 3), got {list(sizes)}")
    if sizes[-1] != 1:
        raise ConfigurationError(f"output layer must have one neuron, got {sizes[-1]}")
    if any(n < 1 for n in sizes):
        raise ConfigurationError(f"layer sizes must be positive, got {list(sizes)}")
    return sizes


def n_params(layer_sizes: Sequence[int]) -> int:
    return sum(n_out * n_in + n_out for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]))


def _split(flat: np.ndarray, sizes: Sequence[int]):
    weights, biases = [], []
    pos = 0
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        weights.append(flat[pos : pos + n_out * n_in].reshape(n_out, n_in))
        pos += n_out * n_in
        biases.append(flat[pos : pos + n_out])
        pos += n_out
    return weights, biases


class _FlatParams:
    """Flat parameter vector with per-layer weight/bias views."""

    def __init__(self, layer_sizes: Sequence[int], flat: np.ndarray | None = None):
        self.layer_sizes = _check_sizes(layer_sizes)
        size = n_params(self.layer_sizes)
        if flat is None:
            flat = np.zeros(size)
        flat = np.ascontiguousarray(flat, dtype=np.float64)
        if flat.shape != (size,):
            raise ShapeError(f"expected {size} parameters, got shape {flat.shape}")
        self.flat = flat
        self.weights, self.biases = _split(self.flat, self.layer_sizes)


class MlpNetwork(_FlatParams):
    def copy(self) -> "MlpNetwork":
        return MlpNetwork(self.layer_sizes, self.flat.copy())

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MlpNetwork)
            and self.layer_sizes == other.layer_sizes
            and np.array_equal(self.flat, other.flat)
        )

    def __repr__(self) -> str:
        return f"MlpNetwork(layer_sizes={list(self.layer_sizes)})"

    @classmethod
    def from_layers(cls, weights, biases) -> "MlpNetwork":
        weights = [np.atleast_2d(np.asarray(w, dtype=float)) for w in weights]
        biases = [np.atleast_1d(np.asarray(b, dtype=float)) for b in biases]
        sizes = [weights[0].shape[1]] + [w.shape[0] for w in weights]
        net = cls(sizes)
        for dst, src in zip(net.weights + net.biases, weights + biases):
            if dst.shape != src.shape:
                raise ShapeError(f"layer shape {src.shape} does not fit {dst.shape}")
            dst[...] = src
        return net


class GradientBuffer(_FlatParams):
    """Gradient of the network output w.r.t. every parameter, same layout as the net.

    ``dx`` holds the gradient w.r.t. the input vector.
    """

    def __init__(self, layer_sizes, flat=None, dx=None):
        super().__init__(layer_sizes, flat)
        self.dx = np.zeros(self.layer_sizes[0]) if dx is None else dx


def zeros(layer_sizes: Sequence[int]) -> MlpNetwork:
    return MlpNetwork(layer_sizes)


def init_random(layer_sizes: Sequence[int], seed: int) -> MlpNetwork:
    """Draw every weight and bias i.i.d. from N(0, 0.1^2) with a seeded PCG64 stream."""
    sizes = _check_sizes(layer_sizes)
    rng = np.random.Generator(np.random.PCG64(seed))
    return MlpNetwork(sizes, rng.normal(0.0, INIT_STD, size=n_params(sizes)))


def _check_input(net: MlpNetwork, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (net.n_inputs,):
        raise ShapeError(f"network expects {net.n_inputs} inputs, got shape {x.shape}")
    return x


def forward(net: MlpNetwork, x) -> float:
    h = _check_input(net, x)
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = W @ h + b
        h = z if i == last else np.tanh(z)
    return float(h[0])


def forward_batch(net: MlpNetwork, X: np.ndarray) -> np.ndarray:
    """Evaluate the network on each row of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.n_inputs:
        raise ShapeError(f"expected (rows, {net.n_inputs}) inputs, got {X.shape}")
    h = X.T
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = W @ h + b[:, None]
        h = z if i == last else np.tanh(z)
    return h[0].copy()


def backward(net: MlpNetwork, x, dL_dy: float) -> GradientBuffer:
    """Reverse-mode gradient of ``dL_dy * net(x)`` w.r.t. all parameters and ``x``."""
    h = _check_input(net, x)
    acts = [h]
    last = len(net.weights) - 1
    for i, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = W @ h + b
        h = z if i == last else np.tanh(z)
        acts.append(h)

    grad = GradientBuffer(net.layer_sizes)
    delta = np.array([float(dL_dy)])
    for i in range(last, -1, -1):
        if i < last:
            delta = delta * (1.0 - acts[i + 1] ** 2)
        grad.weights[i][...] = np.outer(delta, acts[i])
        grad.biases[i][...] = delta
        delta = net.weights[i].T @ delta
    grad.dx = delta
    return grad


def sgd_step(net: MlpNetwork, grad: GradientBuffer, alpha: float) -> None:
    if grad.layer_sizes != net.layer_sizes:
        raise ShapeError(
            f"gradient shapes {list(grad.layer_sizes)} do not match network {list(net.layer_sizes)}"
        )
    if not alpha > 0:
        raise ConfigurationError(f"learning rate must be positive, got {alpha}")
    if not np.all(np.isfinite(grad.flat)):
        raise DivergenceError("non-finite gradient entry")
    net.flat -= alpha * grad.flat


@dataclass
class LayerDump:
    """Plain-list form of a network, used for JSON serialization."""

    layer_sizes: list
    weights: list
    biases: list

    @classmethod
    def of(cls, net: MlpNetwork) -> "LayerDump":
        return cls(
            list(net.layer_sizes),
            [w.tolist() for w in net.weights],
            [b.tolist() for b in net.biases],
        )

    def to_network(self) -> MlpNetwork:
        net = MlpNetwork.from_layers(self.weights, self.biases)
        if list(net.layer_sizes) != list(self.layer_sizes):
            raise ShapeError(
                f"stored layer_sizes {self.layer_sizes} disagree with weights {list(net.layer_sizes)}"
            )
        return net
