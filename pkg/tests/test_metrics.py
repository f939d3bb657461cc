import pytest

from graphbackdoor import (
    Graph,
    LabeledDataset,
    asr_variants,
    attack_success_rate,
    backdoor_accuracy,
    clean_accuracy,
)

from conftest import constant_model


def labeled(labels):
    return LabeledDataset(
        tuple((Graph(4, frozenset({(0, 1)})), y) for y in labels), num_classes=2
    )


class TestAccuracy:
    def test_three_of_four(self):
        ds = labeled([1, 1, 1, 0])
        assert clean_accuracy(constant_model(1), ds) == 0.75

    def test_constant_on_balanced_set(self):
        ds = labeled([0, 1] * 10)
        assert clean_accuracy(constant_model(0), ds) == 0.5

    def test_backdoor_accuracy_same_model_matches(self):
        ds = labeled([0, 1, 1])
        model = constant_model(1)
        assert backdoor_accuracy(model, ds) == clean_accuracy(model, ds)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            clean_accuracy(constant_model(0), LabeledDataset((), num_classes=2))


class TestASR:
    def test_all_hits(self):
        ds = labeled([0, 0, 0])
        assert attack_success_rate(constant_model(1), ds, 1) == 1.0

    def test_no_hits(self):
        ds = labeled([0, 0, 0])
        assert attack_success_rate(constant_model(0), ds, 1) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            attack_success_rate(constant_model(1), LabeledDataset((), num_classes=2), 1)


class TestVariants:
    def test_identical_models_and_no_injection_effect(self):
        clean_test = labeled([0, 0, 1, 1])
        d_c = labeled([0, 0])
        model = constant_model(0)
        values = asr_variants(model, model, clean_test, d_c, 1)
        assert values == (0.0, 0.0, 0.0, 0.0)

    def test_split_behavior(self):
        clean_test = labeled([0, 0, 1])
        injected = labeled([0, 0])
        clean_model = constant_model(0)  # never predicts target
        backdoored_model = constant_model(1)  # always predicts target
        baseline, train_only, test_only, both = asr_variants(
            clean_model, backdoored_model, clean_test, injected, 1
        )
        assert baseline == 0.0
        assert train_only == 1.0
        assert test_only == 0.0
        assert both == 1.0

    def test_requires_non_target_items(self):
        clean_test = labeled([1, 1])
        with pytest.raises(ValueError):
            asr_variants(constant_model(0), constant_model(0), clean_test, labeled([0]), 1)
