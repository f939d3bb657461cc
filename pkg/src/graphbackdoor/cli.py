"""Command-line interface.

Subcommands: ``synth`` (emit a trigger), ``poison``, ``train``, ``eval``,
``certify``, ``detect``, ``run`` (full pipeline), ``sweep``.  ``--config``
accepts a JSON document with the same field names as the experiment
configuration; explicit flags override it.  Exit codes: 0 success, 2 config
error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .data import (
    LabeledDataset,
    PoisonConfig,
    TriggerMode,
    load_dataset_text,
    make_backdoored_test,
    make_backdoored_train,
    save_dataset_text,
    split,
)
from .defense import detect_dense_subgraph
from .gin import GinConfig, init_model, load_model, predict, save_model, train
from .graph import density, num_pairs
from .harness import (
    ExperimentConfig,
    SyntheticDatasetSpec,
    generate_synthetic,
    run_experiment,
    run_sweep,
    write_results,
)
from .injection import InjectionStrategy
from .metrics import attack_success_rate, clean_accuracy
from .seeding import derive_rng, derive_seed
from .smoothing import SmoothingConfig, certify
from .triggers import TriggerMethod, TriggerSpec, synthesize

__all__ = ["main"]


class ConfigError(ValueError):
    pass


def _csv_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in _csv_list(text))
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got '{text}'") from exc


def _add_synthetic_flags(sub):
    sub.add_argument("--num-graphs", type=int, default=None)
    sub.add_argument("--num-classes", type=int, default=None)
    sub.add_argument("--node-means", type=str, default=None, help="comma-separated, one per class")
    sub.add_argument("--density-means", type=str, default=None, help="comma-separated, one per class")
    sub.add_argument("--data-seed", type=int, default=None)


def _synthetic_spec(args) -> dict:
    spec: dict = {}
    if args.num_graphs is not None:
        spec["num_graphs"] = args.num_graphs
    if args.num_classes is not None:
        spec["num_classes"] = args.num_classes
    if args.node_means is not None:
        spec["node_means"] = _parse_floats(args.node_means)
    if args.density_means is not None:
        spec["density_means"] = _parse_floats(args.density_means)
    if args.data_seed is not None:
        spec["seed"] = args.data_seed
    return spec


_CONFIG_FLAGS = [
    ("phi", float),
    ("rho", float),
    ("method", str),
    ("gamma", float),
    ("target_label", int),
    ("strategy", str),
    ("trigger_mode", str),
    ("sw_rewire_prob", float),
    ("train_fraction", float),
    ("num_layers", int),
    ("hidden_dim", int),
    ("learning_rate", float),
    ("batch_size", int),
    ("max_epochs", int),
    ("d", int),
    ("beta", float),
    ("alpha", float),
]


def _add_experiment_flags(sub):
    sub.add_argument("--config", type=str, default=None, help="JSON config file")
    sub.add_argument("--dataset", type=str, default=None, help="dataset text file")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--output", type=str, default=None, help="result CSV path")
    sub.add_argument("--no-smoothing", action="store_true")
    sub.add_argument("--no-defense", action="store_true")
    for name, typ in _CONFIG_FLAGS:
        sub.add_argument(f"--{name.replace('_', '-')}", type=typ, default=None)
    _add_synthetic_flags(sub)


def _experiment_config(args) -> ExperimentConfig:
    blob: dict = {}
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                blob = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(blob, dict):
            raise ConfigError("config file must hold a JSON object")
    for name, _ in _CONFIG_FLAGS:
        value = getattr(args, name)
        if value is not None:
            blob[name] = value
    if args.dataset is not None:
        blob["dataset_path"] = args.dataset
    if args.seed is not None:
        blob["seed"] = args.seed
    if args.output is not None:
        blob["output"] = args.output
    if args.no_smoothing:
        blob["with_smoothing"] = False
    if args.no_defense:
        blob["with_defense"] = False
    synth = _synthetic_spec(args)
    if synth:
        merged = dict(blob.get("synthetic", {}))
        merged.update(synth)
        blob["synthetic"] = merged
    if "seed" not in blob:
        raise ConfigError("--seed is required (or a 'seed' field in --config)")
    if blob.get("output") is None:
        blob["output"] = "results.csv"
    try:
        return ExperimentConfig.from_dict(blob)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _load_dataset_arg(path: str) -> LabeledDataset:
    try:
        return load_dataset_text(path)
    except OSError as exc:
        raise ConfigError(f"cannot read dataset: {exc}") from exc


def _cmd_synth(args) -> int:
    try:
        spec = TriggerSpec(
            size=args.t,
            rho=args.rho,
            method=TriggerMethod(args.method),
            sw_rewire_prob=args.sw_rewire_prob,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    trig = synthesize(spec)
    dataset = LabeledDataset(((trig.graph, 0),), num_classes=2)
    if args.out:
        save_dataset_text(dataset, args.out)
    print(
        f"trigger t={trig.graph.node_count} method={spec.method.value} "
        f"edges={trig.graph.edge_count} density={trig.realized_density:.6f}"
    )
    return 0


def _cmd_poison(args) -> int:
    cfg = _experiment_config(args)
    if cfg.dataset_path is not None:
        dataset = _load_dataset_arg(cfg.dataset_path)
    else:
        seed = cfg.synthetic.seed
        if seed is None:
            seed = derive_seed(cfg.seed, "data")
        dataset = generate_synthetic(cfg.synthetic, np.random.default_rng(seed))
    clean_train, clean_test = split(dataset, cfg.train_fraction, derive_rng(cfg.seed, "split"))
    avg_nodes = dataset.average_node_count()
    t = max(2, int(np.ceil(cfg.phi * avg_nodes - 1e-9)))
    trigger_spec = TriggerSpec(
        size=t, rho=cfg.rho, method=cfg.method,
        sw_rewire_prob=cfg.sw_rewire_prob, seed=derive_seed(cfg.seed, "trigger"),
    )
    poison_cfg = PoisonConfig(
        gamma=cfg.gamma, trigger_spec=trigger_spec, target_label=cfg.target_label,
        trigger_mode=cfg.trigger_mode, strategy=cfg.strategy,
        seed=derive_seed(cfg.seed, "poison"),
    )
    backdoored_train, trigger, poisoned = make_backdoored_train(
        clean_train, poison_cfg, derive_rng(cfg.seed, "poison_train")
    )
    backdoored_test = make_backdoored_test(
        clean_test, trigger, poison_cfg, derive_rng(cfg.seed, "poison_test")
    )
    prefix = args.out_prefix
    save_dataset_text(clean_train, f"{prefix}_clean_train.txt")
    save_dataset_text(clean_test, f"{prefix}_clean_test.txt")
    save_dataset_text(backdoored_train, f"{prefix}_backdoored_train.txt")
    save_dataset_text(backdoored_test, f"{prefix}_backdoored_test.txt")
    save_dataset_text(LabeledDataset(((trigger.graph, 0),), num_classes=2), f"{prefix}_trigger.txt")
    echo = cfg.to_dict()
    echo["derived"] = {"trigger_size": t, "poisoned_indices": poisoned}
    with open(f"{prefix}.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {prefix}_*.txt (poisoned {len(poisoned)} of {len(clean_train)} training graphs)")
    return 0


def _cmd_train(args) -> int:
    dataset = _load_dataset_arg(args.dataset)
    try:
        cfg = GinConfig(
            num_classes=dataset.num_classes,
            num_layers=args.num_layers,
            hidden_dim=args.hidden_dim,
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            max_epochs=args.max_epochs,
            seed=args.seed,
            subsample_training=args.subsample_training,
            subsample_beta=args.subsample_beta,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    model = train(init_model(cfg), dataset)
    save_model(model, args.out)
    print(f"trained on {len(dataset)} graphs; saved to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    dataset = _load_dataset_arg(args.dataset)
    if args.metric == "accuracy":
        value = clean_accuracy(model, dataset)
    else:
        value = attack_success_rate(model, dataset, args.target)
    print(f"{args.metric} {value:.6f}")
    return 0


def _cmd_certify(args) -> int:
    model = load_model(args.model)
    dataset = _load_dataset_arg(args.dataset)
    try:
        scfg = SmoothingConfig(d=args.d, beta=args.beta, alpha=args.alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    base = lambda g: predict(model, g)  # noqa: E731
    lines = ["graph_index,n,s,z,label,d_l,p_lower,certified_radius,certified_t"]
    for i, (g, _) in enumerate(dataset.items):
        cert = certify(base, g, scfg, derive_rng(args.seed, "certify", i))
        radius = -1 if cert.certified_radius is None else cert.certified_radius
        t_cert = -1 if cert.certified_trigger_size is None else cert.certified_trigger_size
        lines.append(
            f"{i},{g.node_count},{cert.s},{cert.z},{cert.predicted_label},"
            f"{cert.d_l},{cert.p_lower:.6f},{radius},{t_cert}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_detect(args) -> int:
    dataset = _load_dataset_arg(args.dataset)
    lines = ["graph_index,n,detected_nodes,induced_density"]
    for i, (g, _) in enumerate(dataset.items):
        if g.node_count < args.t:
            lines.append(f"{i},{g.node_count},,")
            continue
        nodes = sorted(detect_dense_subgraph(g, args.t))
        inside = set(nodes)
        edges = sum(1 for u, v in g.edges if u in inside and v in inside)
        pairs = num_pairs(args.t)
        dens = edges / pairs if pairs else 0.0
        lines.append(f"{i},{g.node_count},{' '.join(map(str, nodes))},{dens:.6f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_run(args) -> int:
    cfg = _experiment_config(args)
    result = run_experiment(cfg)
    write_results([result], cfg.output)
    print(f"wrote {cfg.output}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _experiment_config(args)
    raw_values = _csv_list(args.values)
    if not raw_values:
        raise ConfigError("--values must list at least one value")
    values: list = []
    for raw in raw_values:
        try:
            values.append(int(raw))
        except ValueError:
            try:
                values.append(float(raw))
            except ValueError:
                values.append(raw)
    try:
        results = run_sweep(cfg, args.param, values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_results(results, cfg.output)
    print(f"wrote {cfg.output} ({len(results)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphbackdoor",
        description="Subgraph backdoor attacks and a subsampling-based certified defense.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("synth", help="synthesize a trigger subgraph")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.8)
    p.add_argument("--method", choices=[m.value for m in TriggerMethod], default="er")
    p.add_argument("--sw-rewire-prob", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_synth)

    p = subs.add_parser("poison", help="build clean splits and backdoored datasets")
    _add_experiment_flags(p)
    p.add_argument("--out-prefix", type=str, required=True)
    p.set_defaults(func=_cmd_poison)

    p = subs.add_parser("train", help="train the graph classifier on a dataset file")
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--num-layers", type=int, default=2)
    p.add_argument("--hidden-dim", type=int, default=16)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--max-epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subsample-training", action="store_true")
    p.add_argument("--subsample-beta", type=float, default=0.10)
    p.add_argument("--out", type=str, required=True)
    p.set_defaults(func=_cmd_train)

    p = subs.add_parser("eval", help="evaluate a trained model on a dataset file")
    p.add_argument("--model", type=str, required=True)
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--metric", choices=["accuracy", "asr"], default="accuracy")
    p.add_argument("--target", type=int, default=1)
    p.set_defaults(func=_cmd_eval)

    p = subs.add_parser("certify", help="smoothed prediction with certificates per graph")
    p.add_argument("--model", type=str, required=True)
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--beta", type=float, default=0.10)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_certify)

    p = subs.add_parser("detect", help="dense-subgraph detection per graph")
    p.add_argument("--dataset", type=str, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=_cmd_detect)

    p = subs.add_parser("run", help="full attack/defense pipeline")
    _add_experiment_flags(p)
    p.set_defaults(func=_cmd_run)

    p = subs.add_parser("sweep", help="run the pipeline over a parameter grid")
    _add_experiment_flags(p)
    p.add_argument("--param", type=str, required=True)
    p.add_argument("--values", type=str, required=True, help="comma-separated values")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
