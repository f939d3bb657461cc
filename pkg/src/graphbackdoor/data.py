"""Labeled graph datasets: text IO, splitting, and backdoor poisoning.

Dataset text format (one file per dataset)::

    # comments start with '#', blank lines are ignored
    G <num_graphs>
    g <n_nodes> <n_edges> <label>
    <u> <v>            # one line per edge, 0 <= u < v < n_nodes
    ...

Poisoning follows the standard protocol: a fraction ``gamma`` of the training
graphs gets the trigger injected and the label flipped to the target; every
test graph whose true label differs from the target gets the trigger injected
(labels kept, for attack-success accounting).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import Graph
from .injection import InjectionStrategy, inject
from .triggers import Trigger, TriggerSpec, synthesize

__all__ = [
    "Provenance",
    "TriggerMode",
    "LabeledDataset",
    "PoisonConfig",
    "GraphFormatError",
    "split",
    "make_backdoored_train",
    "make_backdoored_test",
    "load_dataset_text",
    "save_dataset_text",
]


class GraphFormatError(ValueError):
    """Malformed dataset text."""


class Provenance(str, Enum):
    CLEAN_TRAIN = "clean_train"
    CLEAN_TEST = "clean_test"
    BACKDOORED_TRAIN = "backdoored_train"
    BACKDOORED_TEST = "backdoored_test"


class TriggerMode(str, Enum):
    FIXED = "fixed"
    RANDOM_PER_GRAPH = "random_per_graph"


@dataclass(frozen=True)
class LabeledDataset:
    items: tuple[tuple[Graph, int], ...]
    num_classes: int
    provenance: Provenance | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple((g, int(y)) for g, y in self.items))
        if self.num_classes < 2:
            raise ValueError("num_classes must be at least 2")
        for _, y in self.items:
            if not 0 <= y < self.num_classes:
                raise ValueError(f"label {y} out of range for {self.num_classes} classes")

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    @property
    def graphs(self) -> tuple[Graph, ...]:
        return tuple(g for g, _ in self.items)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(y for _, y in self.items)

    def average_node_count(self) -> float:
        if not self.items:
            raise ValueError("empty dataset has no average node count")
        return float(np.mean([g.node_count for g, _ in self.items]))


@dataclass(frozen=True)
class PoisonConfig:
    """How to poison a training set and build the backdoored test set."""

    gamma: float
    trigger_spec: TriggerSpec
    target_label: int = 1
    trigger_mode: TriggerMode = TriggerMode.FIXED
    strategy: InjectionStrategy = InjectionStrategy.RANDOM
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if self.target_label < 0:
            raise ValueError("target_label must be nonnegative")
        object.__setattr__(self, "trigger_mode", TriggerMode(self.trigger_mode))
        object.__setattr__(self, "strategy", InjectionStrategy(self.strategy))


def split(
    dataset: LabeledDataset, train_fraction: float, rng: np.random.Generator
) -> tuple[LabeledDataset, LabeledDataset]:
    """Disjoint train/test split; train gets ceil(fraction * N) uniform items."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    n = len(dataset)
    if n < 2:
        raise ValueError("need at least 2 items to split")
    k = math.ceil(train_fraction * n)
    chosen = set(int(v) for v in rng.choice(n, size=k, replace=False))
    train_items = tuple(dataset.items[i] for i in range(n) if i in chosen)
    test_items = tuple(dataset.items[i] for i in range(n) if i not in chosen)
    train = LabeledDataset(train_items, dataset.num_classes, Provenance.CLEAN_TRAIN)
    test = LabeledDataset(test_items, dataset.num_classes, Provenance.CLEAN_TEST)
    return train, test


def make_backdoored_train(
    clean_train: LabeledDataset,
    cfg: PoisonConfig,
    rng: np.random.Generator | None = None,
) -> tuple[LabeledDataset, Trigger, list[int]]:
    """Poison ceil(gamma * N) uniformly chosen training items.

    Poisoned items get the trigger injected and their label set to the target.
    In fixed mode one trigger is synthesized and reused; in random-per-graph
    mode every poisoned item gets a fresh trigger and the returned trigger is
    one more fresh draw, to be used at test time.
    """
    if cfg.target_label >= clean_train.num_classes:
        raise ValueError("target label out of range for this dataset")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n = len(clean_train)
    k = math.ceil(cfg.gamma * n)
    chosen = sorted(int(v) for v in rng.choice(n, size=k, replace=False))
    chosen_set = set(chosen)

    fixed = cfg.trigger_mode is TriggerMode.FIXED
    trig = synthesize(cfg.trigger_spec, rng) if fixed else None
    items = []
    for idx, (g, y) in enumerate(clean_train.items):
        if idx not in chosen_set:
            items.append((g, y))
            continue
        use = trig if fixed else synthesize(cfg.trigger_spec, rng)
        items.append((inject(g, use, cfg.strategy, rng), cfg.target_label))
    if not fixed:
        trig = synthesize(cfg.trigger_spec, rng)
    backdoored = LabeledDataset(
        tuple(items), clean_train.num_classes, Provenance.BACKDOORED_TRAIN
    )
    return backdoored, trig, chosen


def make_backdoored_test(
    clean_test: LabeledDataset,
    trig: Trigger,
    cfg: PoisonConfig,
    rng: np.random.Generator | None = None,
) -> LabeledDataset:
    """Inject the trigger into every test item whose label is not the target.

    Original labels are preserved as metadata; the attack-success metric only
    needs the prediction, and keeping the labels records which class each
    backdoored graph came from.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed + 1)
    items = tuple(
        (inject(g, trig, cfg.strategy, rng), y)
        for g, y in clean_test.items
        if y != cfg.target_label
    )
    if not items:
        warnings.warn("all test labels equal the target; backdoored test set is empty")
    return LabeledDataset(items, clean_test.num_classes, Provenance.BACKDOORED_TEST)


def load_dataset_text(path: str) -> LabeledDataset:
    """Parse the dataset text format; raises GraphFormatError on malformed input."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    tokens: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(raw, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens.append((lineno, stripped.split()))

    pos = 0

    def next_line(expect: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(tokens):
            raise GraphFormatError(f"unexpected end of file, expected {expect}")
        entry = tokens[pos]
        pos += 1
        return entry

    lineno, header = next_line("'G <count>' header")
    if len(header) != 2 or header[0] != "G":
        raise GraphFormatError(f"line {lineno}: expected 'G <count>'")
    try:
        count = int(header[1])
    except ValueError as exc:
        raise GraphFormatError(f"line {lineno}: bad graph count") from exc

    items = []
    max_label = 0
    for _ in range(count):
        lineno, head = next_line("'g <n> <e> <label>'")
        if len(head) != 4 or head[0] != "g":
            raise GraphFormatError(f"line {lineno}: expected 'g <n_nodes> <n_edges> <label>'")
        try:
            n_nodes, n_edges, label = int(head[1]), int(head[2]), int(head[3])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: bad graph header") from exc
        if n_nodes < 0 or n_edges < 0 or label < 0:
            raise GraphFormatError(f"line {lineno}: negative value in graph header")
        edges = set()
        for _ in range(n_edges):
            lineno, pair = next_line("edge line '<u> <v>'")
            if len(pair) != 2:
                raise GraphFormatError(f"line {lineno}: expected '<u> <v>'")
            try:
                u, v = int(pair[0]), int(pair[1])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: bad edge") from exc
            if not 0 <= u < v < n_nodes:
                raise GraphFormatError(
                    f"line {lineno}: edge ({u}, {v}) violates 0 <= u < v < {n_nodes}"
                )
            if (u, v) in edges:
                raise GraphFormatError(f"line {lineno}: duplicate edge ({u}, {v})")
            edges.add((u, v))
        items.append((Graph(n_nodes, frozenset(edges)), label))
        max_label = max(max_label, label)
    if pos != len(tokens):
        raise GraphFormatError(f"line {tokens[pos][0]}: trailing content after {count} graphs")
    return LabeledDataset(tuple(items), num_classes=max(2, max_label + 1))


def save_dataset_text(dataset: LabeledDataset, path: str) -> None:
    """Write the dataset in the text format (LF line endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"G {len(dataset)}\n")
        for g, y in dataset.items:
            fh.write(f"g {g.node_count} {g.edge_count} {y}\n")
            for u, v in sorted(g.edges):
                fh.write(f"{u} {v}\n")
