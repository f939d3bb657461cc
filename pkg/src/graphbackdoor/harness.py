"""End-to-end experiment orchestration.

A single experiment: build or load a dataset, split it, poison the training
set, train clean and backdoored classifiers, evaluate the attack metrics,
optionally evaluate the smoothed classifier (base model trained with
subsampling) with per-graph certificates, and audit the dense-subgraph
defense.  Results go to a CSV (one row per configuration, fixed column set), a
JSON sidecar echoing the full configuration, and, when smoothing runs, a
second CSV with the certified-trigger-size distribution.

Every stage derives its seed from the master seed via ``seeding.derive_seed``
with the stage name, so reruns are byte-identical and stages are independently
reproducible.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .data import (
    LabeledDataset,
    PoisonConfig,
    TriggerMode,
    load_dataset_text,
    make_backdoored_test,
    make_backdoored_train,
    split,
)
from .defense import detection_jaccard, detection_success, strip_detected
from .gin import ClassifierModel, GinConfig, init_model, predict, train
from .graph import Graph
from .injection import InjectionStrategy, inject_detailed
from .metrics import asr_variants, attack_success_rate, backdoor_accuracy, clean_accuracy
from .seeding import derive_rng, derive_seed
from .smoothing import SmoothingConfig, certify, smoothed_predict
from .triggers import TriggerMethod, TriggerSpec

__all__ = [
    "SyntheticDatasetSpec",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentResult",
    "generate_synthetic",
    "run_experiment",
    "run_sweep",
    "write_results",
    "RESULT_COLUMNS",
]


class ExperimentError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class SyntheticDatasetSpec:
    """Synthetic stand-in for the curated graph datasets.

    Per graph: a uniform class draw, a Poisson node count around the class
    mean (at least 3 nodes), and ER edges at the class density.  Class
    densities must differ by at least 0.15 so the label signal is learnable
    at desk scale.
    """

    num_graphs: int = 300
    num_classes: int = 2
    node_means: tuple[float, ...] = (24.0, 24.0)
    density_means: tuple[float, ...] = (0.08, 0.30)
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "node_means", tuple(float(v) for v in self.node_means))
        object.__setattr__(
            self, "density_means", tuple(float(v) for v in self.density_means)
        )
        if self.num_graphs < 0:
            raise ValueError("num_graphs must be nonnegative")
        if self.num_classes not in (2, 3):
            raise ValueError("num_classes must be 2 or 3")
        if len(self.node_means) != self.num_classes:
            raise ValueError("need one node-count mean per class")
        if len(self.density_means) != self.num_classes:
            raise ValueError("need one density mean per class")
        for rho in self.density_means:
            if not 0.0 < rho < 1.0:
                raise ValueError("class densities must be in (0, 1)")
        gaps = [
            abs(a - b)
            for i, a in enumerate(self.density_means)
            for b in self.density_means[i + 1 :]
        ]
        if gaps and min(gaps) < 0.15:
            raise ValueError("class densities must differ by at least 0.15")


def generate_synthetic(spec: SyntheticDatasetSpec, rng: np.random.Generator) -> LabeledDataset:
    """Sample a labeled dataset according to the spec."""
    items = []
    for _ in range(spec.num_graphs):
        cls = int(rng.integers(spec.num_classes))
        n = max(3, int(rng.poisson(spec.node_means[cls])))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        coins = rng.random(len(pairs))
        edges = frozenset(p for p, c in zip(pairs, coins) if c < spec.density_means[cls])
        items.append((Graph(n, edges), cls))
    return LabeledDataset(tuple(items), num_classes=spec.num_classes)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full configuration of one experiment.

    Attack parameters (phi, rho, method, gamma, strategy, trigger_mode),
    classifier training settings, and smoothing settings are flattened here;
    ``GinConfig`` / ``SmoothingConfig`` instances are composed at run time
    with stage-derived seeds.  ``phi`` is the trigger size as a fraction of
    the dataset's average node count: ``t = ceil(phi * avg_nodes)``.
    """

    seed: int
    dataset_path: str | None = None
    synthetic: SyntheticDatasetSpec = field(default_factory=SyntheticDatasetSpec)
    phi: float = 0.20
    rho: float = 0.8
    method: TriggerMethod = TriggerMethod.ER
    gamma: float = 0.05
    target_label: int = 1
    strategy: InjectionStrategy = InjectionStrategy.RANDOM
    trigger_mode: TriggerMode = TriggerMode.FIXED
    sw_rewire_prob: float = 0.8
    train_fraction: float = 2.0 / 3.0
    num_layers: int = 2
    hidden_dim: int = 16
    learning_rate: float = 0.01
    batch_size: int = 32
    max_epochs: int = 100
    d: int = 100
    beta: float = 0.10
    alpha: float = 0.001
    with_smoothing: bool = True
    with_defense: bool = True
    output: str | None = None

    def __post_init__(self):
        if not 0.0 < self.phi <= 1.0:
            raise ValueError("phi must be in (0, 1]")
        object.__setattr__(self, "method", TriggerMethod(self.method))
        object.__setattr__(self, "strategy", InjectionStrategy(self.strategy))
        object.__setattr__(self, "trigger_mode", TriggerMode(self.trigger_mode))
        if isinstance(self.synthetic, dict):
            spec = dict(self.synthetic)
            if "node_means" in spec:
                spec["node_means"] = tuple(spec["node_means"])
            if "density_means" in spec:
                spec["density_means"] = tuple(spec["density_means"])
            object.__setattr__(self, "synthetic", SyntheticDatasetSpec(**spec))

    @staticmethod
    def from_dict(blob: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(ExperimentConfig)}
        unknown = set(blob) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return ExperimentConfig(**blob)

    def to_dict(self) -> dict:
        blob = dataclasses.asdict(self)
        blob["method"] = self.method.value
        blob["strategy"] = self.strategy.value
        blob["trigger_mode"] = self.trigger_mode.value
        blob["synthetic"]["node_means"] = list(self.synthetic.node_means)
        blob["synthetic"]["density_means"] = list(self.synthetic.density_means)
        return blob


RESULT_COLUMNS = [
    "dataset",
    "num_graphs",
    "num_classes",
    "avg_nodes",
    "train_size",
    "test_size",
    "phi",
    "trigger_size",
    "rho",
    "method",
    "gamma",
    "target_label",
    "strategy",
    "trigger_mode",
    "seed",
    "clean_accuracy",
    "backdoor_accuracy",
    "attack_success_rate",
    "asr_baseline",
    "asr_train_only",
    "asr_test_only",
    "asr_both",
    "smoothing_d",
    "smoothing_beta",
    "smoothing_alpha",
    "smoothed_backdoor_accuracy",
    "smoothed_attack_success_rate",
    "certified_t_median",
    "certified_abstain_fraction",
    "detection_success_rate",
    "detection_jaccard_mean",
    "stripped_backdoor_accuracy",
    "stripped_attack_success_rate",
]


@dataclass
class ExperimentResult:
    row: dict
    certified_sizes: list[int] | None  # -1 encodes abstention
    config_echo: dict


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, ExperimentError):
                raise ExperimentError(name, exc) from exc
            return False

    return _Ctx()


def _trigger_size(phi: float, avg_nodes: float) -> int:
    return max(2, math.ceil(phi * avg_nodes - 1e-9))


def _smoothed_rate(base, dataset, scfg, master, tag, want):
    """Fraction of items whose smoothed label satisfies ``want(label, y)``."""
    hits = 0
    for i, (g, y) in enumerate(dataset.items):
        label, _ = smoothed_predict(base, g, scfg, derive_rng(master, tag, i))
        hits += bool(want(label, y))
    return hits / len(dataset)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    master = cfg.seed
    row: dict = {c: "" for c in RESULT_COLUMNS}

    with _stage("data"):
        if cfg.dataset_path is not None:
            dataset = load_dataset_text(cfg.dataset_path)
            row["dataset"] = cfg.dataset_path
        else:
            data_seed = cfg.synthetic.seed
            if data_seed is None:
                data_seed = derive_seed(master, "data")
            dataset = generate_synthetic(cfg.synthetic, np.random.default_rng(data_seed))
            row["dataset"] = "synthetic"
        if len(dataset) < 2:
            raise ValueError("dataset needs at least 2 graphs")
        avg_nodes = dataset.average_node_count()
        t = _trigger_size(cfg.phi, avg_nodes)

    with _stage("split"):
        clean_train, clean_test = split(dataset, cfg.train_fraction, derive_rng(master, "split"))

    with _stage("poison"):
        trigger_spec = TriggerSpec(
            size=t,
            rho=cfg.rho,
            method=cfg.method,
            sw_rewire_prob=cfg.sw_rewire_prob,
            seed=derive_seed(master, "trigger"),
        )
        poison_cfg = PoisonConfig(
            gamma=cfg.gamma,
            trigger_spec=trigger_spec,
            target_label=cfg.target_label,
            trigger_mode=cfg.trigger_mode,
            strategy=cfg.strategy,
            seed=derive_seed(master, "poison"),
        )
        backdoored_train, trigger, _ = make_backdoored_train(
            clean_train, poison_cfg, derive_rng(master, "poison_train")
        )
        backdoored_test = make_backdoored_test(
            clean_test, trigger, poison_cfg, derive_rng(master, "poison_test")
        )

    def gin_config(seed_tag: str, subsample: bool) -> GinConfig:
        return GinConfig(
            num_classes=dataset.num_classes,
            num_layers=cfg.num_layers,
            hidden_dim=cfg.hidden_dim,
            learning_rate=cfg.learning_rate,
            batch_size=cfg.batch_size,
            max_epochs=cfg.max_epochs,
            seed=derive_seed(master, seed_tag),
            subsample_training=subsample,
            subsample_beta=cfg.beta,
        )

    with _stage("train_clean"):
        clean_cfg = gin_config("train_clean", False)
        clean_model = train(init_model(clean_cfg), clean_train)

    with _stage("train_backdoor"):
        bd_cfg = gin_config("train_backdoor", False)
        backdoored_model = train(init_model(bd_cfg), backdoored_train)

    with _stage("metrics"):
        row.update(
            dataset=row["dataset"],
            num_graphs=len(dataset),
            num_classes=dataset.num_classes,
            avg_nodes=avg_nodes,
            train_size=len(clean_train),
            test_size=len(clean_test),
            phi=cfg.phi,
            trigger_size=t,
            rho=cfg.rho,
            method=cfg.method.value,
            gamma=cfg.gamma,
            target_label=cfg.target_label,
            strategy=cfg.strategy.value,
            trigger_mode=cfg.trigger_mode.value,
            seed=cfg.seed,
            clean_accuracy=clean_accuracy(clean_model, clean_test),
            backdoor_accuracy=backdoor_accuracy(backdoored_model, clean_test),
            attack_success_rate=attack_success_rate(
                backdoored_model, backdoored_test, cfg.target_label
            ),
        )
        baseline, train_only, test_only, both = asr_variants(
            clean_model, backdoored_model, clean_test, backdoored_test, cfg.target_label
        )
        row.update(
            asr_baseline=baseline,
            asr_train_only=train_only,
            asr_test_only=test_only,
            asr_both=both,
        )

    certified_sizes: list[int] | None = None
    if cfg.with_smoothing:
        with _stage("smoothing"):
            smooth_train_cfg = gin_config("train_smooth", True)
            smooth_base = train(init_model(smooth_train_cfg), backdoored_train)
            base_fn = lambda g: predict(smooth_base, g)  # noqa: E731
            scfg = SmoothingConfig(d=cfg.d, beta=cfg.beta, alpha=cfg.alpha)
            row["smoothing_d"] = cfg.d
            row["smoothing_beta"] = cfg.beta
            row["smoothing_alpha"] = cfg.alpha
            row["smoothed_backdoor_accuracy"] = _smoothed_rate(
                base_fn, clean_test, scfg, master, "smooth_acc", lambda lab, y: lab == y
            )
            row["smoothed_attack_success_rate"] = _smoothed_rate(
                base_fn,
                backdoored_test,
                scfg,
                master,
                "smooth_asr",
                lambda lab, y: lab == cfg.target_label,
            )
            certified_sizes = []
            for i, (g, _) in enumerate(clean_test.items):
                cert = certify(base_fn, g, scfg, derive_rng(master, "certify", i))
                certified_sizes.append(
                    -1 if cert.certified_trigger_size is None else cert.certified_trigger_size
                )
            granted = [v for v in certified_sizes if v >= 0]
            row["certified_abstain_fraction"] = 1.0 - len(granted) / len(certified_sizes)
            if granted:
                row["certified_t_median"] = float(np.median(granted))

    if cfg.with_defense:
        with _stage("defense"):
            rng = derive_rng(master, "defense")
            successes, jaccards = [], []
            for g, y in clean_test.items:
                if y == cfg.target_label:
                    continue
                injected_graph, nodes = inject_detailed(g, trigger, cfg.strategy, rng)
                successes.append(detection_success(injected_graph, nodes, t))
                jaccards.append(detection_jaccard(injected_graph, nodes, t))
            if successes:
                row["detection_success_rate"] = float(np.mean(successes))
                row["detection_jaccard_mean"] = float(np.mean(jaccards))
            stripped_clean = LabeledDataset(
                tuple(
                    (strip_detected(g, t), y) if g.node_count >= t else (g, y)
                    for g, y in clean_test.items
                ),
                clean_test.num_classes,
            )
            row["stripped_backdoor_accuracy"] = backdoor_accuracy(
                backdoored_model, stripped_clean
            )
            stripped_bd = LabeledDataset(
                tuple(
                    (strip_detected(g, t), y) if g.node_count >= t else (g, y)
                    for g, y in backdoored_test.items
                ),
                backdoored_test.num_classes,
            )
            row["stripped_attack_success_rate"] = attack_success_rate(
                backdoored_model, stripped_bd, cfg.target_label
            )

    echo = cfg.to_dict()
    echo["derived"] = {"trigger_size": t, "avg_nodes": avg_nodes}
    return ExperimentResult(row=row, certified_sizes=certified_sizes, config_echo=echo)


def run_sweep(base: ExperimentConfig, param: str, values) -> list[ExperimentResult]:
    """One experiment per value of ``param``, holding everything else fixed.

    The master seed is shared, so the dataset and split are identical across
    settings and rows differ only through the swept parameter.
    """
    names = {f.name for f in dataclasses.fields(ExperimentConfig)}
    if param not in names:
        raise ValueError(f"unknown sweep parameter '{param}'")
    return [run_experiment(dataclasses.replace(base, **{param: v})) for v in values]


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_results(results: list[ExperimentResult], output: str) -> None:
    """Write the result CSV, config sidecar JSON, and certified-size CSV.

    For ``out.csv`` the sidecar is ``out.json`` and the certified-size
    distribution (written when smoothing ran) is ``out_certified_t.csv`` with
    columns ``certified_t,count,fraction,cumulative_fraction``; abstentions
    appear as ``certified_t = -1``.
    """
    base = output[:-4] if output.endswith(".csv") else output
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for res in results:
            writer.writerow([_format_cell(res.row[c]) for c in RESULT_COLUMNS])

    sidecar = [res.config_echo for res in results]
    with open(base + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(sidecar if len(sidecar) > 1 else sidecar[0], fh, indent=2, sort_keys=True)
        fh.write("\n")

    sizes: Counter[int] = Counter()
    any_certified = False
    for res in results:
        if res.certified_sizes is not None:
            any_certified = True
            sizes.update(res.certified_sizes)
    if any_certified:
        total = sum(sizes.values())
        cumulative = 0
        with open(base + "_certified_t.csv", "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["certified_t", "count", "fraction", "cumulative_fraction"])
            for t_val in sorted(sizes):
                cumulative += sizes[t_val]
                writer.writerow(
                    [
                        t_val,
                        sizes[t_val],
                        _format_cell(sizes[t_val] / total),
                        _format_cell(cumulative / total),
                    ]
                )
