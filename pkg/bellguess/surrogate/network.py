import json
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

import h5py
import numpy as np
from scipy.linalg import block_diag
from scipy.special import expit

from .spec import LayerSpec, NetworkSpec
from ..enums import Activation, ModelKind
from ..errors import DimensionMismatchError
from ..settings import get_settings

__all__ = ['Dense', 'Network', 'activate', 'activation_derivative', 'FORMAT_VERSION']

FORMAT_VERSION = '1.0'


def activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    if activation is Activation.RELU:
        return np.maximum(z, 0.)
    if activation is Activation.SIGMOID:
        return expit(z)
    if activation is Activation.LINEAR:
        return z
    out = z.copy()
    out[:, -1] = expit(z[:, -1])
    return out


def activation_derivative(z: np.ndarray, a: np.ndarray, activation: Activation) -> np.ndarray:
    """Elementwise derivative of the activation, given its input `z` and output `a`."""
    if activation is Activation.RELU:
        return (z > 0).astype(z.dtype)
    if activation is Activation.SIGMOID:
        return a * (1 - a)
    if activation is Activation.LINEAR:
        return np.ones_like(z)
    out = np.ones_like(z)
    out[:, -1] = a[:, -1] * (1 - a[:, -1])
    return out


class Dense:
    def __init__(self, weights: np.ndarray, bias: np.ndarray, activation: Activation):
        if weights.shape[1] != bias.shape[0]:
            raise DimensionMismatchError('bias', weights.shape[1], bias.shape[0])
        self.weights = weights
        self.bias = bias
        self.activation = Activation(activation)

    @classmethod
    def initialize(cls, fan_in: int, spec: LayerSpec, rng: np.random.Generator) -> 'Dense':
        """He initialization for relu layers, Xavier for sigmoid and linear ones; zero biases."""
        if spec.activation is Activation.RELU:
            std = np.sqrt(2 / fan_in)
        else:
            std = np.sqrt(2 / (fan_in + spec.width))
        return cls(rng.normal(0., std, size=(fan_in, spec.width)), np.zeros(spec.width), spec.activation)

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        z = x @ self.weights + self.bias
        return z, activate(z, self.activation)


class _Compiled(NamedTuple):
    weights: np.ndarray
    bias: np.ndarray
    segments: Tuple[Tuple[Optional[slice], Activation], ...]  # None: every column


def _segments(activations: List[Tuple[int, Activation]]) -> Tuple[Tuple[Optional[slice], Activation], ...]:
    """Column ranges of a stacked layer with their activation; adjacent equal activations are merged."""
    out, start = [], 0
    for width, activation in activations:
        if activation is Activation.LINEAR_SIGMOID:
            parts = [(width - 1, Activation.LINEAR), (1, Activation.SIGMOID)]
        else:
            parts = [(width, activation)]
        for w, a in parts:
            if w == 0:
                continue
            if out and out[-1][1] is a:
                out[-1] = (slice(out[-1][0].start, start + w), a)
            else:
                out.append((slice(start, start + w), a))
            start += w
    if len(out) == 1:
        return (None, out[0][1]),
    return tuple(out)


def _compile(chains: List[List[Dense]], dtype) -> List[_Compiled]:
    """
    Fuses parallel layer chains of equal depth that read the same input into one chain: their first layers side
    by side, all later layers block-diagonally.
    """
    compiled = []
    for depth, group in enumerate(zip(*chains)):
        if depth == 0:
            weights = np.hstack([layer.weights for layer in group])
        else:
            weights = block_diag(*[layer.weights for layer in group])
        bias = np.concatenate([layer.bias for layer in group])
        segments = _segments([(layer.bias.shape[0], layer.activation) for layer in group])
        compiled.append(_Compiled(np.ascontiguousarray(weights, dtype=dtype), bias.astype(dtype), segments))
    return compiled


def _run(chain: List[_Compiled], a: np.ndarray) -> np.ndarray:
    for layer in chain:
        a = a @ layer.weights
        a += layer.bias
        for columns, activation in layer.segments:
            if activation is Activation.LINEAR:
                continue
            target = a if columns is None else a[:, columns]
            if activation is Activation.RELU:
                np.maximum(target, 0., out=target)
            else:
                expit(target, out=target)
    return a


class Network:
    """
    Feed-forward network of `NetworkSpec` with numpy float64 parameters. `forward` and the training methods work
    on the parameters themselves; `predict` runs on contiguous copies in `INFERENCE_DTYPE`, with parallel heads
    of equal depth fused into one chain. The copies are rebuilt after the parameters were handed out.
    """

    def __init__(self, spec: NetworkSpec, trunk: List[Dense], heads: List[List[Dense]], seed: int = None):
        self.spec = spec
        self.trunk = trunk
        self.heads = heads
        self.seed = seed
        self.metadata: Dict = {}
        self._compiled: Optional[List[List[_Compiled]]] = None

    @classmethod
    def initialize(cls, spec: NetworkSpec, seed: int = 0) -> 'Network':
        rng = np.random.default_rng(seed)
        width = spec.input_width
        trunk = []
        for layer in spec.trunk:
            trunk.append(Dense.initialize(width, layer, rng))
            width = layer.width
        heads = []
        for head in spec.heads:
            layers, head_width = [], width
            for layer in head:
                layers.append(Dense.initialize(head_width, layer, rng))
                head_width = layer.width
            heads.append(layers)
        return cls(spec, trunk, heads, seed=seed)

    @property
    def kind(self) -> ModelKind:
        return self.spec.kind

    @property
    def layers(self) -> List[Dense]:
        return self.trunk + [layer for head in self.heads for layer in head]

    def parameters(self) -> List[np.ndarray]:
        self._compiled = None
        return [p for layer in self.layers for p in (layer.weights, layer.bias)]

    @property
    def n_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.reshape(-1) for p in self.parameters()])

    def set_flat(self, vector: np.ndarray):
        if vector.size != self.n_parameters:
            raise DimensionMismatchError('parameter vector', self.n_parameters, vector.size)
        offset = 0
        for p in self.parameters():
            p[...] = vector[offset:offset + p.size].reshape(p.shape)
            offset += p.size

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.spec.input_width:
            raise DimensionMismatchError('network input', self.spec.input_width, x.shape[1])
        return x

    def _forward(self, x: np.ndarray):
        cache = []
        a = x
        for layer in self.trunk:
            z, out = layer.forward(a)
            cache.append((a, z, out))
            a = out
        head_caches, outputs = [], []
        for head in self.heads:
            h_cache, h = [], a
            for layer in head:
                z, out = layer.forward(h)
                h_cache.append((h, z, out))
                h = out
            head_caches.append(h_cache)
            outputs.append(h)
        return np.concatenate(outputs, axis=1), cache, head_caches

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Raw network output for a batch (rows) or a single behavior vector."""
        return self._forward(self._check_input(x))[0]

    def compile(self) -> 'Network':
        dtype = np.dtype(get_settings().INFERENCE_DTYPE)
        trunk = _compile([self.trunk], dtype)
        if len({len(head) for head in self.heads}) == 1:
            chains = [trunk + _compile(self.heads, dtype)]
        else:
            chains = [trunk] + [_compile([head], dtype) for head in self.heads]
        self._compiled = chains
        return self

    def predict(self, p: np.ndarray) -> Tuple[Optional[np.ndarray], np.ndarray]:
        """
        Predicted Bell coefficients (None for the guessing-probability model) and guessing probabilities, one row
        per behavior; a single behavior vector gives one row.
        """
        if self._compiled is None:
            self.compile()
        chains = self._compiled
        a = np.asarray(p, dtype=chains[0][0].weights.dtype)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.shape[1] != self.spec.input_width:
            raise DimensionMismatchError('network input', self.spec.input_width, a.shape[1])
        if len(chains) == 1:
            out = _run(chains[0], a)
        else:
            a = _run(chains[0], a)
            out = np.concatenate([_run(chain, a) for chain in chains[1:]], axis=1)
        out = out.astype(np.float64)
        if self.kind.predicts_inequality:
            return out[:, :-1], out[:, -1]
        return None, out[:, 0]

    def loss(self, x: np.ndarray, h: Optional[np.ndarray], p_guess: np.ndarray) -> float:
        return self.loss_and_gradients(x, h, p_guess, gradients=False)[0]

    def loss_and_gradients(self, x: np.ndarray, h: Optional[np.ndarray], p_guess: np.ndarray,
                           gradients: bool = True) -> Tuple[float, Optional[List[np.ndarray]]]:
        """
        MSE of the guessing probability, plus the MSE over all Bell coefficients for the joint models, with the
        gradients in `parameters()` order.
        """
        x = self._check_input(x)
        out, cache, head_caches = self._forward(x)
        n = x.shape[0]
        residual_pg = out[:, -1] - p_guess
        loss = float(np.mean(residual_pg ** 2))
        d_out = np.zeros_like(out)
        d_out[:, -1] = 2 * residual_pg / n
        if self.kind.predicts_inequality:
            residual_h = out[:, :-1] - h
            loss += float(np.mean(residual_h ** 2))
            d_out[:, :-1] = 2 * residual_h / residual_h.size
        if not gradients:
            return loss, None

        grads_heads, d_trunk, offset = [], 0., 0
        for head, h_cache in zip(self.heads, head_caches):
            width = head[-1].weights.shape[1]
            delta = d_out[:, offset:offset + width]
            offset += width
            head_grads, delta = self._backward(head, h_cache, delta)
            grads_heads.append(head_grads)
            d_trunk = d_trunk + delta
        trunk_grads, _ = self._backward(self.trunk, cache, d_trunk)
        grads = trunk_grads + [g for head_grads in grads_heads for g in head_grads]
        return loss, grads

    @staticmethod
    def _backward(layers: List[Dense], cache, delta: np.ndarray):
        """Backpropagates d(loss)/d(output) through `layers`; returns their gradients and d(loss)/d(input)."""
        grads = []
        for layer, (a_in, z, out) in zip(reversed(layers), reversed(cache)):
            delta = delta * activation_derivative(z, out, layer.activation)
            grads.append((delta.sum(axis=0), a_in.T @ delta))
            delta = delta @ layer.weights.T
        flat = []
        for d_bias, d_weights in reversed(grads):
            flat += [d_weights, d_bias]
        return flat, delta

    def to_hdf5(self, filename: Union[str, Path], metadata: Dict = None):
        compress = get_settings().hdf5_compress_args
        with h5py.File(filename, 'w') as f:
            f.attrs['formatVersion'] = FORMAT_VERSION
            f.attrs['spec'] = self.spec.json()
            f.attrs['seed'] = -1 if self.seed is None else self.seed
            f.attrs['metadata'] = json.dumps({**self.metadata, **(metadata or {})}, sort_keys=True)
            group = f.create_group('layers')
            for i, layer in enumerate(self.layers):
                g = group.create_group(str(i))
                g.create_dataset('weights', data=layer.weights, **compress)
                g.create_dataset('bias', data=layer.bias, **compress)
                g.attrs['activation'] = layer.activation.value

    @classmethod
    def from_hdf5(cls, filename: Union[str, Path]) -> 'Network':
        if not Path(filename).is_file():
            raise FileNotFoundError("File {} not found".format(filename))
        with h5py.File(filename, 'r') as f:
            spec = NetworkSpec.parse_raw(f.attrs['spec'])
            seed = int(f.attrs['seed'])
            layers = [Dense(f['layers'][str(i)]['weights'][:], f['layers'][str(i)]['bias'][:],
                            Activation(f['layers'][str(i)].attrs['activation']))
                      for i in range(len(f['layers']))]
            metadata = json.loads(f.attrs['metadata'])
        n_trunk = len(spec.trunk)
        trunk, rest = layers[:n_trunk], layers[n_trunk:]
        heads = []
        for head in spec.heads:
            heads.append(rest[:len(head)])
            rest = rest[len(head):]
        network = cls(spec, trunk, heads, seed=None if seed < 0 else seed)
        network.metadata = metadata
        return network
