"""Attack evaluation metrics."""

from __future__ import annotations

from .data import LabeledDataset
from .gin import ClassifierModel, predict

__all__ = [
    "clean_accuracy",
    "backdoor_accuracy",
    "attack_success_rate",
    "asr_variants",
]


def _accuracy(model: ClassifierModel, dataset: LabeledDataset) -> float:
    if len(dataset) == 0:
        raise ValueError("cannot score an empty dataset")
    hits = sum(1 for g, y in dataset.items if predict(model, g) == y)
    return hits / len(dataset)


def clean_accuracy(model: ClassifierModel, clean_test: LabeledDataset) -> float:
    """Fraction of clean test graphs the clean classifier labels correctly."""
    return _accuracy(model, clean_test)


def backdoor_accuracy(backdoored_model: ClassifierModel, clean_test: LabeledDataset) -> float:
    """Fraction of clean test graphs the backdoored classifier labels correctly."""
    return _accuracy(backdoored_model, clean_test)


def _target_rate(model: ClassifierModel, dataset: LabeledDataset, target: int) -> float:
    return sum(1 for g, _ in dataset.items if predict(model, g) == target) / len(dataset)


def attack_success_rate(
    backdoored_model: ClassifierModel, backdoored_test: LabeledDataset, target: int
) -> float:
    """Fraction of backdoored test graphs predicted as the target label."""
    if len(backdoored_test) == 0:
        raise ValueError("attack success rate undefined on an empty backdoored test set")
    return _target_rate(backdoored_model, backdoored_test, target)


def asr_variants(
    clean_model: ClassifierModel,
    backdoored_model: ClassifierModel,
    clean_test: LabeledDataset,
    backdoored_test: LabeledDataset,
    target: int,
) -> tuple[float, float, float, float]:
    """Target-label rates (baseline, train-only, test-only, both).

    Over the clean test graphs whose label is not the target (and their
    injected counterparts): baseline = clean model on clean graphs,
    train-only = backdoored model on clean graphs, test-only = clean model on
    injected graphs, both = backdoored model on injected graphs.
    """
    d_c = LabeledDataset(
        tuple((g, y) for g, y in clean_test.items if y != target),
        clean_test.num_classes,
    )
    if len(d_c) == 0:
        raise ValueError("no clean test graphs with a non-target label")
    if len(backdoored_test) == 0:
        raise ValueError("backdoored test set is empty")
    baseline = _target_rate(clean_model, d_c, target)
    train_only = _target_rate(backdoored_model, d_c, target)
    test_only = _target_rate(clean_model, backdoored_test, target)
    both = _target_rate(backdoored_model, backdoored_test, target)
    return baseline, train_only, test_only, both
