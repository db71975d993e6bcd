"""Dense neural-network engine: forward, backprop, Huber loss, Adam. No ML framework."""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LayerSpec:
    input_size: int
    output_size: int
    activation: str = "relu"  # "relu" | "linear"

    def __post_init__(self):
        if self.input_size < 1 or self.output_size < 1:
            raise ValueError("layer sizes must be >= 1")
        if self.activation not in ("relu", "linear"):
            raise ValueError(f"unknown activation {self.activation!r}")


class Mlp:
    """Stack of fully connected layers with per-layer activation."""

    def __init__(self, specs: list[LayerSpec], rng: np.random.Generator):
        for a, b in zip(specs, specs[1:]):
            if a.output_size != b.input_size:
                raise ValueError("layer shapes do not chain")
        self.specs = list(specs)
        self.weights = []
        self.biases = []
        for s in specs:
            # Glorot uniform; biases start at zero
            limit = np.sqrt(6.0 / (s.input_size + s.output_size))
            self.weights.append(rng.uniform(-limit, limit, size=(s.input_size, s.output_size)))
            self.biases.append(np.zeros(s.output_size))

    @property
    def input_size(self) -> int:
        return self.specs[0].input_size

    @property
    def output_size(self) -> int:
        return self.specs[-1].output_size

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Returns (output, cache); x is (batch, in) or (in,)."""
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        if x.shape[1] != self.input_size:
            raise ValueError(f"input size {x.shape[1]} != {self.input_size}")
        cache = [x]
        for spec, w, b in zip(self.specs, self.weights, self.biases):
            z = x @ w + b
            x = np.maximum(z, 0.0) if spec.activation == "relu" else z
            cache.append(x)
        return (x[0] if squeeze else x), cache

    def backward(
        self, cache: list[np.ndarray], grad_out: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray]:
        """Reverse-mode gradients; returns (param grads matching parameters(), input grad)."""
        if len(cache) != len(self.specs) + 1:
            raise ValueError("cache does not match network depth")
        g = np.asarray(grad_out, dtype=np.float64)
        squeeze = g.ndim == 1
        if squeeze:
            g = g[None, :]
        w_grads = [None] * len(self.weights)
        b_grads = [None] * len(self.biases)
        for i in reversed(range(len(self.specs))):
            act_out = cache[i + 1]
            if self.specs[i].activation == "relu":
                g = g * (act_out > 0)
            w_grads[i] = cache[i].T @ g
            b_grads[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
        grads = []
        for wg, bg in zip(w_grads, b_grads):
            grads.append(wg)
            grads.append(bg)
        return grads, (g[0] if squeeze else g)


def huber_loss(y_pred, y_target, delta: float = 1.0):
    """Elementwise Huber loss and its gradient w.r.t. y_pred."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    e = np.asarray(y_pred, dtype=np.float64) - np.asarray(y_target, dtype=np.float64)
    quad = np.abs(e) <= delta
    loss = np.where(quad, 0.5 * e**2, delta * np.abs(e) - 0.5 * delta**2)
    grad = np.clip(e, -delta, delta)
    return loss, grad


class Adam:
    """Standard Adam with bias correction over a fixed list of parameter arrays."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise ValueError("gradient list does not match parameters")
        self.t += 1
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            if g.shape != p.shape:
                raise ValueError("gradient shape mismatch")
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g**2
            m_hat = m / (1 - self.beta1**self.t)
            v_hat = v / (1 - self.beta2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


# --- checkpoint serialization ----------------------------------------------

CHECKPOINT_VERSION = 1


def _encode_array(a: np.ndarray) -> dict:
    return {
        "shape": list(a.shape),
        "data": base64.b64encode(np.ascontiguousarray(a, dtype=np.float64).tobytes()).decode(),
    }


def _decode_array(d: dict) -> np.ndarray:
    return np.frombuffer(base64.b64decode(d["data"]), dtype=np.float64).reshape(d["shape"]).copy()


def mlp_to_dict(net: Mlp) -> dict:
    return {
        "specs": [[s.input_size, s.output_size, s.activation] for s in net.specs],
        "weights": [_encode_array(w) for w in net.weights],
        "biases": [_encode_array(b) for b in net.biases],
    }


def mlp_from_dict(d: dict) -> Mlp:
    specs = [LayerSpec(i, o, a) for i, o, a in d["specs"]]
    net = Mlp(specs, np.random.default_rng(0))
    net.weights = [_decode_array(w) for w in d["weights"]]
    net.biases = [_decode_array(b) for b in d["biases"]]
    return net


def adam_to_dict(adam: Adam) -> dict:
    return {
        "lr": adam.lr, "beta1": adam.beta1, "beta2": adam.beta2, "eps": adam.eps,
        "t": adam.t,
        "m": [_encode_array(a) for a in adam.m],
        "v": [_encode_array(a) for a in adam.v],
    }


def adam_from_dict(d: dict, params: list[np.ndarray]) -> Adam:
    adam = Adam(params, lr=d["lr"], beta1=d["beta1"], beta2=d["beta2"], eps=d["eps"])
    adam.t = d["t"]
    adam.m = [_decode_array(a) for a in d["m"]]
    adam.v = [_decode_array(a) for a in d["v"]]
    return adam


def dumps_checkpoint(payload: dict) -> str:
    return json.dumps({"version": CHECKPOINT_VERSION, **payload}, sort_keys=True)


def loads_checkpoint(text: str) -> dict:
    d = json.loads(text)
    if d.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {d.get('version')!r}")
    return d
