"""A minimal discrete ternary-commitment classifier.

Every connection holds three selection logits, one per committed state
{-W, 0, +W}. Soft mode mixes the states with a Gumbel-Softmax at temperature
``tau`` (used for training); hard mode snaps each connection to its argmax
state (used for evaluation). Hidden units use tanh; pre-activations are
scaled by 1/sqrt(fan_in). There are no biases, so the network is made of
ternary weights only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

STATE_VALUES = np.array([-1.0, 0.0, 1.0])
BANDS = ("coarse", "triadic", "fine")


def softmax(z: np.ndarray, axis: int = -1) -> np.ndarray:
    z = z - z.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def sample_gumbel(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.gumbel(size=shape)


def gumbel_softmax_select(logits, tau: float, noise=None) -> np.ndarray:
    """Relaxed one-hot over the last axis: softmax((logits + noise) / tau)."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    z = np.asarray(logits, dtype=float)
    if noise is not None:
        z = z + np.asarray(noise, dtype=float)
    return softmax(z / tau)


@dataclass
class TernaryLayer:
    logits: np.ndarray  # (fan_in, fan_out, 3)
    magnitude: float = 1.0
    band: str = "coarse"

    @property
    def shape(self) -> tuple[int, int]:
        return self.logits.shape[:2]

    def soft_weights(self, tau: float, noise=None) -> tuple[np.ndarray, np.ndarray]:
        probs = gumbel_softmax_select(self.logits, tau, noise)
        return self.magnitude * (probs[..., 2] - probs[..., 0]), probs

    def hard_states(self) -> np.ndarray:
        return STATE_VALUES[self.logits.argmax(axis=-1)]

    def hard_weights(self) -> np.ndarray:
        return self.magnitude * self.hard_states()


@dataclass
class TernaryNet:
    layers: list[TernaryLayer] = field(default_factory=list)

    @classmethod
    def initialize(
        cls,
        rng: np.random.Generator,
        sizes: Sequence[int],
        magnitude: float = 1.0,
        init_std: float = 0.1,
    ) -> "TernaryNet":
        """Layer sizes ``[n_in, hidden..., n_classes]``.

        Bands follow depth: first layer coarse, last layer fine, anything between triadic.
        """
        n_layers = len(sizes) - 1
        layers = []
        for i, (a, b) in enumerate(zip(sizes[:-1], sizes[1:])):
            if i == 0:
                band = "coarse"
            elif i == n_layers - 1:
                band = "fine"
            else:
                band = "triadic"
            layers.append(TernaryLayer(rng.normal(0.0, init_std, size=(a, b, 3)), magnitude, band))
        return cls(layers)

    @property
    def n_inputs(self) -> int:
        return self.layers[0].shape[0]

    @property
    def n_classes(self) -> int:
        return self.layers[-1].shape[1]

    def copy(self) -> "TernaryNet":
        return TernaryNet([TernaryLayer(l.logits.copy(), l.magnitude, l.band) for l in self.layers])

    def zero_fraction(self) -> float:
        """Fraction of connections whose hard state is 0 (withheld commitment)."""
        zeros = sum(int((l.logits.argmax(axis=-1) == 1).sum()) for l in self.layers)
        total = sum(l.logits.shape[0] * l.logits.shape[1] for l in self.layers)
        return zeros / total


def _propagate(weights: Sequence[np.ndarray], x: np.ndarray) -> list[np.ndarray]:
    """Activations of every layer, input first; the last entry is the output logits."""
    acts = [x]
    h = x
    for i, w in enumerate(weights):
        a = h @ w / math.sqrt(w.shape[0])
        h = np.tanh(a) if i < len(weights) - 1 else a
        acts.append(h)
    return acts


@dataclass(frozen=True)
class ForwardResult:
    class_scores: np.ndarray  # (n, n_classes) probabilities
    confidence: np.ndarray  # (n,) max class probability
    committed: np.ndarray  # (n,) bool
    zero_fraction: float

    @property
    def predicted(self) -> np.ndarray:
        return self.class_scores.argmax(axis=1)


def forward(
    model: TernaryNet,
    x: np.ndarray,
    tau: float,
    mode: str = "hard",
    noise: Optional[Sequence[np.ndarray]] = None,
    threshold: float = 0.7,
    zero_cap: Optional[float] = None,
) -> ForwardResult:
    """Class probabilities, confidence and commitment for a batch.

    A prediction is committed when its confidence reaches ``threshold``; with
    ``zero_cap`` set it is also committed whenever the network's zero-state
    fraction is below the cap.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.n_inputs:
        raise ValueError(f"input has {x.shape[1]} features, model expects {model.n_inputs}")
    if mode == "soft":
        noise = noise if noise is not None else [None] * len(model.layers)
        weights = [l.soft_weights(tau, g)[0] for l, g in zip(model.layers, noise)]
    elif mode == "hard":
        weights = [l.hard_weights() for l in model.layers]
    else:
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")
    probs = softmax(_propagate(weights, x)[-1])
    confidence = probs.max(axis=1)
    zf = model.zero_fraction()
    committed = confidence >= threshold
    if zero_cap is not None and zf < zero_cap:
        committed = np.ones_like(committed)
    return ForwardResult(probs, confidence, committed, zf)


def loss_and_gradients(
    model: TernaryNet,
    x: np.ndarray,
    y: np.ndarray,
    tau: float,
    noise: Optional[Sequence[np.ndarray]] = None,
) -> tuple[float, list[np.ndarray], np.ndarray]:
    """Mean cross-entropy of the soft forward pass and its gradient w.r.t. every layer's logits.

    Returns ``(loss, grads, probs)``; ``grads[i]`` has the shape of ``model.layers[i].logits``.
    """
    noise = noise if noise is not None else [None] * len(model.layers)
    weights, selections = [], []
    for layer, g in zip(model.layers, noise):
        w, p = layer.soft_weights(tau, g)
        weights.append(w)
        selections.append(p)
    acts = _propagate(weights, x)
    logits = acts[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    n = len(y)
    loss = -log_probs[np.arange(n), y].mean()
    probs = np.exp(log_probs)

    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads: list[np.ndarray] = [None] * len(weights)
    for i in reversed(range(len(weights))):
        w = weights[i]
        scale = math.sqrt(w.shape[0])
        grad_w = acts[i].T @ delta / scale
        if i > 0:
            delta = (delta @ w.T / scale) * (1.0 - acts[i] ** 2)
        p = selections[i]
        mix = (p[..., 2] - p[..., 0])[..., None]
        # d(p2 - p0)/dlogit_j = [j=2] p2 - [j=0] p0 - p_j (p2 - p0), times 1/tau
        dmix = -p * mix
        dmix[..., 0] -= p[..., 0]
        dmix[..., 2] += p[..., 2]
        grads[i] = grad_w[..., None] * dmix * (model.layers[i].magnitude / tau)
    return float(loss), grads, probs
