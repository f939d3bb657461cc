import numpy as np
import pytest

from graphbackdoor import (
    ClassifierModel,
    GinConfig,
    Graph,
    LabeledDataset,
    init_model,
)


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    coins = rng.random(len(pairs))
    return Graph(n, frozenset(pr for pr, c in zip(pairs, coins) if c < p))


def constant_model(label: int, num_classes: int = 2) -> ClassifierModel:
    """Zero weights except a readout bias pushing one label."""
    cfg = GinConfig(num_classes=num_classes, seed=0)
    model = init_model(cfg)
    params = {k: np.zeros_like(v) for k, v in model.params.items()}
    params["readout.b"][label] = 10.0
    return ClassifierModel(params=params, config=cfg)


def uniform_model(num_classes: int = 2) -> ClassifierModel:
    """All-zero parameters: every class gets probability 1/num_classes."""
    cfg = GinConfig(num_classes=num_classes, seed=0)
    model = init_model(cfg)
    params = {k: np.zeros_like(v) for k, v in model.params.items()}
    return ClassifierModel(params=params, config=cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_dataset(rng):
    """20 graphs, two classes separated by density."""
    items = []
    for i in range(20):
        label = i % 2
        p = 0.15 if label == 0 else 0.55
        items.append((random_graph(8, p, rng), label))
    return LabeledDataset(tuple(items), num_classes=2)
