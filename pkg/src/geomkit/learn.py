"""A minimal multilayer perceptron with hand-written backpropagation and
full-batch gradient descent."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InvalidArgument, TrainingDivergedError


@dataclass(frozen=True)
class Activation:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


ACTIVATIONS: dict[str, Activation] = {
    "identity": Activation("identity", lambda z: z, np.ones_like),
    # relu'(0) := 0
    "relu": Activation("relu", lambda z: np.maximum(z, 0.0), lambda z: (z > 0).astype(float)),
    "sigmoid": Activation("sigmoid", _sigmoid, lambda z: _sigmoid(z) * (1.0 - _sigmoid(z))),
    "tanh": Activation("tanh", np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
}


def get_activation(act: Union[str, Activation]) -> Activation:
    if isinstance(act, Activation):
        return act
    try:
        return ACTIVATIONS[act]
    except KeyError:
        raise InvalidArgument(f"unknown activation {act!r}") from None


@dataclass
class Layer:
    W: np.ndarray
    b: np.ndarray
    activation: Union[str, Activation] = "identity"

    def __post_init__(self):
        self.W = np.atleast_2d(np.asarray(self.W, dtype=float))
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if self.b.shape != (self.W.shape[0],):
            raise InvalidArgument(f"bias shape {self.b.shape} does not match W {self.W.shape}")
        get_activation(self.activation)

    @property
    def d_in(self) -> int:
        return self.W.shape[1]

    @property
    def d_out(self) -> int:
        return self.W.shape[0]


@dataclass
class MLPParams:
    layers: list[Layer]

    def __post_init__(self):
        if not self.layers:
            raise InvalidArgument("an MLP needs at least one layer")
        for l, (prev, nxt) in enumerate(zip(self.layers, self.layers[1:])):
            if nxt.d_in != prev.d_out:
                raise InvalidArgument(f"layer {l + 1} expects {nxt.d_in} inputs, layer {l} gives {prev.d_out}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def sizes(self) -> list[int]:
        return [self.layers[0].d_in] + [layer.d_out for layer in self.layers]

    def copy(self) -> "MLPParams":
        return MLPParams([Layer(l.W.copy(), l.b.copy(), l.activation) for l in self.layers])

    def flatten(self) -> np.ndarray:
        """All parameters in layer order, each layer as row-major W then b."""
        return np.concatenate([np.concatenate([l.W.ravel(), l.b]) for l in self.layers])

    def unflatten(self, w: np.ndarray) -> "MLPParams":
        """New params of the same architecture holding the values in ``w``."""
        w = np.asarray(w, dtype=float)
        if w.size != self.n_params:
            raise InvalidArgument(f"expected {self.n_params} values, got {w.size}")
        layers, pos = [], 0
        for l in self.layers:
            nW = l.W.size
            W = w[pos:pos + nW].reshape(l.W.shape)
            b = w[pos + nW:pos + nW + l.d_out]
            pos += nW + l.d_out
            layers.append(Layer(W.copy(), b.copy(), l.activation))
        return MLPParams(layers)

    @property
    def n_params(self) -> int:
        return sum(l.W.size + l.b.size for l in self.layers)


def init_mlp(sizes: Sequence[int], activations: Union[str, Sequence], seed: int = 0) -> MLPParams:
    """Uniform ``[-1/sqrt(d_in), 1/sqrt(d_in)]`` initialization from a seeded generator."""
    if len(sizes) < 2:
        raise InvalidArgument("need at least input and output sizes")
    n_layers = len(sizes) - 1
    if isinstance(activations, (str, Activation)):
        activations = [activations] * n_layers
    if len(activations) != n_layers:
        raise InvalidArgument("one activation per layer required")
    rng = np.random.default_rng(seed)
    layers = []
    for d_in, d_out, act in zip(sizes[:-1], sizes[1:], activations):
        bound = 1.0 / math.sqrt(d_in)
        layers.append(Layer(rng.uniform(-bound, bound, (d_out, d_in)), rng.uniform(-bound, bound, d_out), act))
    return MLPParams(layers)


@dataclass
class ForwardTrace:
    inputs: np.ndarray
    pre_activations: list[np.ndarray] = field(default_factory=list)
    activations: list[np.ndarray] = field(default_factory=list)

    def a(self, l: int) -> np.ndarray:
        """Activation of layer l, with ``a(0)`` the network input."""
        return self.inputs if l == 0 else self.activations[l - 1]


@dataclass
class GradientSet:
    dW: list[np.ndarray]
    db: list[np.ndarray]

    def flatten(self) -> np.ndarray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.dW, self.db)])


def mlp_forward(params: MLPParams, x) -> tuple[np.ndarray, ForwardTrace]:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (params.layers[0].d_in,):
        raise InvalidArgument(f"input has shape {x.shape}, network expects ({params.layers[0].d_in},)")
    trace = ForwardTrace(x)
    a = x
    for layer in params.layers:
        z = layer.W @ a + layer.b
        a = get_activation(layer.activation).fn(z)
        trace.pre_activations.append(z)
        trace.activations.append(a)
    return a, trace


def mse_loss(pred, target) -> tuple[float, np.ndarray]:
    pred = np.atleast_1d(np.asarray(pred, dtype=float))
    target = np.atleast_1d(np.asarray(target, dtype=float))
    if pred.shape != target.shape:
        raise InvalidArgument(f"prediction {pred.shape} and target {target.shape} differ")
    r = pred - target
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is reported by train
        return float(np.mean(r ** 2)), 2.0 * r / r.size


def mlp_backward(params: MLPParams, trace: ForwardTrace, loss_grad) -> GradientSet:
    """Reverse sweep of vector-Jacobian products through the layers."""
    if len(trace.pre_activations) != params.depth:
        raise InvalidArgument("trace does not belong to these parameters")
    for layer, z in zip(params.layers, trace.pre_activations):
        if z.shape != (layer.d_out,):
            raise InvalidArgument("trace does not belong to these parameters")
    g = np.atleast_1d(np.asarray(loss_grad, dtype=float))
    if g.shape != (params.layers[-1].d_out,):
        raise InvalidArgument("loss gradient has the wrong length")

    L = params.depth
    dW: list[np.ndarray] = [None] * L
    db: list[np.ndarray] = [None] * L
    delta = g * get_activation(params.layers[-1].activation).deriv(trace.pre_activations[-1])
    for l in range(L - 1, -1, -1):
        dW[l] = np.outer(delta, trace.a(l))
        db[l] = delta.copy()
        if l > 0:
            back = params.layers[l].W.T @ delta
            delta = back * get_activation(params.layers[l - 1].activation).deriv(trace.pre_activations[l - 1])
    return GradientSet(dW, db)


def gd_step(w, grad, eta: float) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if w.shape != grad.shape:
        raise InvalidArgument("parameter and gradient lengths differ")
    if eta < 0:
        raise InvalidArgument("learning rate must be non-negative")
    return w - eta * grad


def batch_loss_and_grad(params: MLPParams, dataset) -> tuple[float, np.ndarray]:
    """Mean MSE over the dataset and its gradient w.r.t. the flat parameters."""
    total = 0.0
    grad = np.zeros(params.n_params)
    for x, y in dataset:
        out, trace = mlp_forward(params, x)
        loss, g = mse_loss(out, y)
        total += loss
        grad += mlp_backward(params, trace, g).flatten()
    n = len(dataset)
    return total / n, grad / n


def train(params: MLPParams, dataset, eta: float, steps: int) -> tuple[MLPParams, list[float]]:
    """Full-batch gradient descent on the mean squared error.

    ``history[t]`` is the loss at the parameters before update ``t``.
    """
    if not eta > 0:
        raise InvalidArgument("learning rate must be positive")
    if steps < 1:
        raise InvalidArgument("need at least one step")
    dataset = list(dataset)
    if not dataset:
        raise InvalidArgument("dataset is empty")
    current = params.copy()
    w = current.flatten()
    history = []
    for t in range(steps):
        loss, grad = batch_loss_and_grad(current, dataset)
        if not math.isfinite(loss):
            raise TrainingDivergedError(t, loss)
        history.append(loss)
        w = gd_step(w, grad, eta)
        current = current.unflatten(w)
    return current, history
