"""A small GIN-style graph classifier in plain numpy.

Per layer, node states are aggregated as ``(1 + eps) * h_v + sum of neighbor
states`` and passed through a two-linear-map ReLU MLP; the graph embedding is
the sum of final-layer node states, classified by a linear head with softmax.
Sum aggregation and sum readout make the output invariant to node
permutations, and the model happily consumes disconnected graphs.

Everything is float64 and hand-backpropagated, so gradients can be checked
tightly against central finite differences.  Training is plain minibatch SGD;
with ``subsample_training`` enabled, every graph in a batch is replaced by one
random subsample of its structure vector before the gradient step.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .data import LabeledDataset
from .graph import Graph, num_pairs
from .smoothing import kept_count, subsample_graph

__all__ = [
    "GinConfig",
    "ClassifierModel",
    "TrainingDivergedError",
    "init_model",
    "forward",
    "predict",
    "loss",
    "gradient",
    "train",
    "save_model",
    "load_model",
]

_PROB_FLOOR = 1e-12


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during SGD."""


@dataclass(frozen=True)
class GinConfig:
    num_classes: int
    num_layers: int = 2
    hidden_dim: int = 16
    epsilon: float = 0.0
    learning_rate: float = 0.01
    batch_size: int = 32
    max_epochs: int = 100
    seed: int = 0
    subsample_training: bool = False
    subsample_beta: float = 0.10

    def __post_init__(self):
        if self.num_classes < 2:
            raise ValueError("num_classes must be at least 2")
        if self.num_layers < 1 or self.hidden_dim < 1:
            raise ValueError("num_layers and hidden_dim must be positive")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.batch_size < 1 or self.max_epochs < 0:
            raise ValueError("batch_size must be >= 1 and max_epochs >= 0")
        if not 0.0 < self.subsample_beta <= 1.0:
            raise ValueError("subsample_beta must be in (0, 1]")


@dataclass(frozen=True)
class ClassifierModel:
    params: dict[str, np.ndarray]
    config: GinConfig


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    a = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-a, a, size=(fan_in, fan_out))


def init_model(cfg: GinConfig, rng: np.random.Generator | None = None) -> ClassifierModel:
    """Seeded Glorot-uniform weights, zero biases; input feature dim is 1."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    params: dict[str, np.ndarray] = {}
    in_dim = 1
    for layer in range(cfg.num_layers):
        params[f"layer{layer}.W1"] = _glorot(rng, in_dim, cfg.hidden_dim)
        params[f"layer{layer}.b1"] = np.zeros(cfg.hidden_dim)
        params[f"layer{layer}.W2"] = _glorot(rng, cfg.hidden_dim, cfg.hidden_dim)
        params[f"layer{layer}.b2"] = np.zeros(cfg.hidden_dim)
        in_dim = cfg.hidden_dim
    params["readout.W"] = _glorot(rng, cfg.hidden_dim, cfg.num_classes)
    params["readout.b"] = np.zeros(cfg.num_classes)
    return ClassifierModel(params=params, config=cfg)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    expd = np.exp(shifted)
    return expd / expd.sum()


def _forward_arrays(params, cfg, feats, adj):
    """Forward pass on raw arrays, returning probabilities plus a tape."""
    h = feats
    tape = []
    for layer in range(cfg.num_layers):
        agg = (1.0 + cfg.epsilon) * h + adj @ h
        z1 = agg @ params[f"layer{layer}.W1"] + params[f"layer{layer}.b1"]
        u = np.maximum(z1, 0.0)
        z2 = u @ params[f"layer{layer}.W2"] + params[f"layer{layer}.b2"]
        tape.append((agg, z1, u, z2))
        h = np.maximum(z2, 0.0)
    readout = h.sum(axis=0)
    logits = readout @ params["readout.W"] + params["readout.b"]
    return _softmax(logits), readout, tape


def forward(model: ClassifierModel, g: Graph) -> np.ndarray:
    """Class-probability vector for one graph (entries sum to 1)."""
    if g.node_count == 0:
        raise ValueError("cannot classify an empty graph")
    probs, _, _ = _forward_arrays(model.params, model.config, g.node_features, g.adjacency())
    return probs


def predict(model: ClassifierModel, g: Graph) -> int:
    """Argmax label; exact ties resolve to the lowest label index."""
    return int(np.argmax(forward(model, g)))


def _as_items(batch) -> list[tuple[Graph, int]]:
    if isinstance(batch, LabeledDataset):
        return list(batch.items)
    return [(g, int(y)) for g, y in batch]


def loss(model: ClassifierModel, batch) -> float:
    """Mean cross-entropy; probabilities are floored at 1e-12 before the log."""
    items = _as_items(batch)
    if not items:
        raise ValueError("empty batch")
    total = 0.0
    for g, y in items:
        probs = forward(model, g)
        total += -math.log(max(probs[y], _PROB_FLOOR))
    return total / len(items)


def _loss_and_gradient(params, cfg, items):
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    total = 0.0
    n_items = len(items)
    for g, y in items:
        feats, adj = g.node_features, g.adjacency()
        probs, readout, tape = _forward_arrays(params, cfg, feats, adj)
        total += -math.log(max(probs[y], _PROB_FLOOR))

        dlogits = probs.copy()
        dlogits[y] -= 1.0
        grads["readout.W"] += np.outer(readout, dlogits)
        grads["readout.b"] += dlogits
        dh = np.tile(params["readout.W"] @ dlogits, (g.node_count, 1))
        for layer in range(cfg.num_layers - 1, -1, -1):
            agg, z1, u, z2 = tape[layer]
            dz2 = dh * (z2 > 0.0)
            grads[f"layer{layer}.W2"] += u.T @ dz2
            grads[f"layer{layer}.b2"] += dz2.sum(axis=0)
            du = dz2 @ params[f"layer{layer}.W2"].T
            dz1 = du * (z1 > 0.0)
            grads[f"layer{layer}.W1"] += agg.T @ dz1
            grads[f"layer{layer}.b1"] += dz1.sum(axis=0)
            if layer > 0:
                dagg = dz1 @ params[f"layer{layer}.W1"].T
                dh = (1.0 + cfg.epsilon) * dagg + adj @ dagg
    for k in grads:
        grads[k] /= n_items
    return total / n_items, grads


def gradient(model: ClassifierModel, batch) -> dict[str, np.ndarray]:
    """Mean analytic gradient of the batch cross-entropy for every parameter."""
    items = _as_items(batch)
    if not items:
        raise ValueError("empty batch")
    _, grads = _loss_and_gradient(model.params, model.config, items)
    return grads


def _subsample_item(g: Graph, beta: float, rng: np.random.Generator) -> Graph:
    s = num_pairs(g.node_count)
    if s < 1:
        return g
    return subsample_graph(g, kept_count(beta, s), rng)


def train(
    model: ClassifierModel,
    dataset: LabeledDataset,
    cfg: GinConfig | None = None,
    rng: np.random.Generator | None = None,
) -> ClassifierModel:
    """Shuffled minibatch SGD for ``max_epochs`` epochs; returns a new model.

    With ``subsample_training`` set, each batch graph is replaced by one
    random subsample (ratio ``subsample_beta``) before the gradient step, so
    the classifier trains on the same distribution the smoothed classifier
    feeds it at prediction time.
    """
    if cfg is None:
        cfg = model.config
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    params = {k: v.copy() for k, v in model.params.items()}
    items = list(dataset.items)
    n = len(items)
    for _ in range(cfg.max_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = [items[i] for i in order[start : start + cfg.batch_size]]
            if cfg.subsample_training:
                batch = [(_subsample_item(g, cfg.subsample_beta, rng), y) for g, y in batch]
            batch_loss, grads = _loss_and_gradient(params, cfg, batch)
            if not math.isfinite(batch_loss):
                raise TrainingDivergedError(f"non-finite loss {batch_loss}")
            for k in params:
                params[k] -= cfg.learning_rate * grads[k]
    return ClassifierModel(params=params, config=cfg)


def save_model(model: ClassifierModel, path: str) -> None:
    meta = dict(asdict(model.config))
    np.savez(path, __config__=np.str_(json.dumps(meta)), **model.params)


def load_model(path: str) -> ClassifierModel:
    archive = np.load(path, allow_pickle=False)
    cfg = GinConfig(**json.loads(str(archive["__config__"])))
    params = {k: archive[k] for k in archive.files if k != "__config__"}
    return ClassifierModel(params=params, config=cfg)
