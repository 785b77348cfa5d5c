"""Small fully connected networks with manual backprop and Adam.

Inputs may be a single vector ``(d,)`` or a batch ``(B, d)``; outputs follow
the same rank. Weight matrices are stored ``(fan_out, fan_in)``.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

HEADS = ("identity", "softmax", "relu")


def softmax(z, axis=-1):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - np.max(z, axis=axis, keepdims=True))
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(z, axis=-1):
    z = np.asarray(z, dtype=np.float64)
    s = z - np.max(z, axis=axis, keepdims=True)
    return s - np.log(np.sum(np.exp(s), axis=axis, keepdims=True))


@dataclass
class MLPParams:
    """Affine layers with ReLU between them and a configurable output head."""

    weights: list
    biases: list
    head: str = "identity"

    def __post_init__(self):
        if self.head not in HEADS:
            raise ValueError(f"unknown head {self.head!r}")
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias per weight matrix and at least one layer")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ValueError(f"layer {i}: weight {w.shape} incompatible with bias {b.shape}")
            if i and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValueError(f"layer {i} expects {w.shape[1]} inputs, previous emits "
                                 f"{self.weights[i - 1].shape[0]}")

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def arrays(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    def copy(self) -> "MLPParams":
        return copy.deepcopy(self)

    def assign(self, other: "MLPParams") -> None:
        for dst, src in zip(self.arrays(), other.arrays()):
            dst[...] = src


def init_mlp(layer_dims, rng: np.random.Generator, head="identity") -> MLPParams:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        lim = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-lim, lim, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MLPParams(weights, biases, head)


def zeros_like_mlp(params: MLPParams) -> MLPParams:
    return MLPParams([np.zeros_like(w) for w in params.weights],
                     [np.zeros_like(b) for b in params.biases], params.head)


def forward(params: MLPParams, x):
    """Returns ``(output, cache)``; the cache feeds :func:`backward`."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != params.weights[0].shape[1]:
        raise ValueError(f"input width {h.shape[1]} != {params.weights[0].shape[1]}")
    acts = [h]
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if i < last or params.head == "relu":
            h = np.maximum(h, 0.0)
        acts.append(h)
    out = softmax(h) if params.head == "softmax" else h
    cache = (acts, out, single)
    return (out[0] if single else out), cache


def cached_logits(cache):
    """Pre-head activations of the last layer (the logits for a softmax head)."""
    acts, _, single = cache
    return acts[-1][0] if single else acts[-1]


def backward(params: MLPParams, cache, dout, input_grad=False, wrt_logits=False):
    """Reverse-mode gradients given dLoss/dOutput.

    With ``wrt_logits`` the upstream gradient of a softmax head is taken with
    respect to the pre-softmax logits. Returns an :class:`MLPParams`-shaped
    gradient bundle, or ``(bundle, dLoss/dInput)`` when ``input_grad`` is set.
    """
    acts, out, single = cache
    g = np.asarray(dout, dtype=np.float64)
    if single:
        g = g[None, :]
    if g.shape != out.shape:
        raise ValueError(f"upstream gradient {g.shape} does not match output {out.shape}")
    if params.head == "softmax" and not wrt_logits:
        g = out * (g - np.sum(g * out, axis=1, keepdims=True))
    dws, dbs = [None] * len(params.weights), [None] * len(params.weights)
    last = len(params.weights) - 1
    for i in range(last, -1, -1):
        if i < last or params.head == "relu":
            g = g * (acts[i + 1] > 0.0)
        dws[i] = g.T @ acts[i]
        dbs[i] = g.sum(axis=0)
        if i or input_grad:
            g = g @ params.weights[i]
    grads = MLPParams(dws, dbs, params.head)
    if input_grad:
        return grads, (g[0] if single else g)
    return grads


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params, **hyper) -> "AdamState":
        return cls([np.zeros_like(a) for a in params.arrays()],
                   [np.zeros_like(a) for a in params.arrays()], **hyper)


def adam_step(params, state: AdamState, grads) -> None:
    """In-place Adam update with bias correction.

    ``params`` and ``grads`` are anything exposing matching ``arrays()``.
    """
    garrs = grads.arrays()
    for g in garrs:
        if not np.all(np.isfinite(g)):
            raise FloatingPointError("non-finite gradient passed to adam_step")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1 ** state.t
    c2 = 1.0 - b2 ** state.t
    for p, g, m, v in zip(params.arrays(), garrs, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


@dataclass
class Network:
    """A parameter set bundled with its optimiser and an optional lagged copy.

    ``lagged`` holds the parameters from before the most recent update, the
    frozen snapshot used for bootstrapped targets.
    """

    params: MLPParams
    adam: AdamState
    lagged: MLPParams | None = field(default=None)

    @classmethod
    def create(cls, layer_dims, rng, head="identity", lagged=False, **adam_hyper):
        params = init_mlp(layer_dims, rng, head)
        return cls(params, AdamState.for_params(params, **adam_hyper),
                   params.copy() if lagged else None)

    def __call__(self, x):
        return forward(self.params, x)[0]

    def step(self, grads: MLPParams) -> None:
        if self.lagged is not None:
            before = self.params.copy()
            adam_step(self.params, self.adam, grads)
            self.lagged = before
        else:
            adam_step(self.params, self.adam, grads)
