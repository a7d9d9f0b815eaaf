"""Feed-forward tanh network mapping the input vector alpha to circuit angles."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ShapeError, ValidationError

ALPHA_DIM = 4
_HIDDEN = {
    "model1": [10],
    "model2": [30],
    "model3": [10, 20],
}
MODEL_KINDS = tuple(_HIDDEN)


@dataclass(frozen=True)
class MlpArchitecture:
    layer_dims: tuple[int, ...]
    activation: str = "tanh"

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise ConfigurationError(f"invalid layer dims {self.layer_dims}")
        if self.activation != "tanh":
            raise ConfigurationError("only the tanh activation is supported")
        object.__setattr__(self, "layer_dims", dims)

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]


def make_architecture(kind: str, n: int, L: int) -> MlpArchitecture:
    if kind not in _HIDDEN:
        raise ConfigurationError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
    if n < 1 or L < 1:
        raise ConfigurationError("n and L must be positive")
    return MlpArchitecture((ALPHA_DIM, *_HIDDEN[kind], n * L))


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)


@dataclass(frozen=True)
class MlpModel:
    arch: MlpArchitecture
    layers: tuple[Layer, ...]

    def __post_init__(self):
        dims = self.arch.layer_dims
        if len(self.layers) != len(dims) - 1:
            raise ShapeError("layer count does not match architecture")
        for k, layer in enumerate(self.layers):
            if layer.weight.shape != (dims[k + 1], dims[k]) or layer.bias.shape != (dims[k + 1],):
                raise ShapeError(f"layer {k} shapes do not match architecture")

    def parameters(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out += [layer.weight, layer.bias]
        return out

    def n_params(self) -> int:
        return sum(p.size for p in self.parameters())

    def to_json(self) -> str:
        return json.dumps({
            "layer_dims": list(self.arch.layer_dims),
            "activation": self.arch.activation,
            "weights": [layer.weight.tolist() for layer in self.layers],
            "biases": [layer.bias.tolist() for layer in self.layers],
        })

    @classmethod
    def from_json(cls, text: str) -> "MlpModel":
        d = json.loads(text)
        arch = MlpArchitecture(tuple(d["layer_dims"]), d.get("activation", "tanh"))
        layers = tuple(
            Layer(np.asarray(w, dtype=float).reshape(arch.layer_dims[k + 1], arch.layer_dims[k]),
                  np.asarray(b, dtype=float))
            for k, (w, b) in enumerate(zip(d["weights"], d["biases"]))
        )
        return cls(arch, layers)


def init_model(arch: MlpArchitecture, seed) -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and biases.

    ``seed`` may be an int, a seed sequence, or a ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    layers = []
    dims = arch.layer_dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bound, bound, size=fan_out)
        layers.append(Layer(w, b))
    return MlpModel(arch, tuple(layers))


@dataclass(frozen=True)
class ForwardCache:
    inputs: tuple[np.ndarray, ...]  # input to each layer
    outputs: tuple[np.ndarray, ...]  # tanh output of each layer
    weights: tuple[np.ndarray, ...] = field(repr=False)


@dataclass(frozen=True)
class MlpGradients:
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    alpha: np.ndarray

    def flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts += [w.ravel(), b]
        parts.append(self.alpha)
        return np.concatenate(parts)


def forward(model: MlpModel, alpha) -> tuple[np.ndarray, ForwardCache]:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (model.arch.input_dim,):
        raise ShapeError(f"alpha must have shape ({model.arch.input_dim},), got {alpha.shape}")
    inputs, outputs = [], []
    a = alpha
    for layer in model.layers:
        inputs.append(a)
        a = np.tanh(layer.weight @ a + layer.bias)
        outputs.append(a)
    cache = ForwardCache(tuple(inputs), tuple(outputs), tuple(l.weight for l in model.layers))
    return a, cache


def backward(model: MlpModel, cache: ForwardCache, upstream) -> MlpGradients:
    """Reverse-mode gradients given ``dC/dtheta``."""
    if len(cache.weights) != len(model.layers) or any(
        w is not layer.weight for w, layer in zip(cache.weights, model.layers)
    ):
        raise ValidationError("forward cache does not belong to this model")
    g = np.asarray(upstream, dtype=float)
    if g.shape != (model.arch.output_dim,):
        raise ShapeError(f"upstream gradient must have shape ({model.arch.output_dim},)")
    dws, dbs = [], []
    for layer, x, y in zip(model.layers[::-1], cache.inputs[::-1], cache.outputs[::-1]):
        delta = g * (1.0 - y * y)
        dws.append(np.outer(delta, x))
        dbs.append(delta)
        g = layer.weight.T @ delta
    return MlpGradients(tuple(dws[::-1]), tuple(dbs[::-1]), g)


def sgd_step(model: MlpModel, alpha, grads: MlpGradients, eta: float) -> tuple[MlpModel, np.ndarray]:
    layers = tuple(
        Layer(layer.weight - eta * dw, layer.bias - eta * db)
        for layer, dw, db in zip(model.layers, grads.weights, grads.biases)
    )
    return MlpModel(model.arch, layers), np.asarray(alpha, dtype=float) - eta * grads.alpha
