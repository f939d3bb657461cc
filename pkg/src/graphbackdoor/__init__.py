"""Subgraph backdoor attacks on graph classification, with a certified defense.

The attack injects a randomly synthesized subgraph trigger into training
graphs (relabeled to a target class) and into test graphs; the defense
smooths a base classifier by majority vote over randomly subsampled graphs
and certifies the prediction against bounded structure perturbations, hence
against bounded trigger sizes.
"""

from .data import (
    GraphFormatError,
    LabeledDataset,
    PoisonConfig,
    Provenance,
    TriggerMode,
    load_dataset_text,
    make_backdoored_test,
    make_backdoored_train,
    save_dataset_text,
    split,
)
from .defense import (
    detect_dense_subgraph,
    detection_jaccard,
    detection_success,
    strip_detected,
)
from .gin import (
    ClassifierModel,
    GinConfig,
    TrainingDivergedError,
    forward,
    gradient,
    init_model,
    load_model,
    loss,
    predict,
    save_model,
    train,
)
from .graph import (
    Graph,
    StructureVector,
    density,
    from_structure_vector,
    num_pairs,
    pair_from_index,
    pair_index,
    recompute_features,
    to_structure_vector,
)
from .harness import (
    ExperimentConfig,
    ExperimentError,
    ExperimentResult,
    SyntheticDatasetSpec,
    generate_synthetic,
    run_experiment,
    run_sweep,
    write_results,
)
from .injection import (
    InjectionStrategy,
    densest_subset,
    inject,
    inject_detailed,
    select_nodes,
)
from .metrics import (
    asr_variants,
    attack_success_rate,
    backdoor_accuracy,
    clean_accuracy,
)
from .seeding import derive_rng, derive_seed
from .smoothing import (
    Certificate,
    SmoothingConfig,
    certified_radius,
    certified_trigger_size,
    certify,
    clopper_pearson_lower,
    exact_smoothed_distribution,
    kept_count,
    smoothed_predict,
    subsample_graph,
)
from .triggers import (
    SynthesisError,
    Trigger,
    TriggerMethod,
    TriggerSpec,
    pa_k,
    sw_k,
    synth_er,
    synth_pa,
    synth_sw,
    synthesize,
)

__version__ = "0.1.0"
