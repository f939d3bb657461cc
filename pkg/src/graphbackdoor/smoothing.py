"""Randomized subsampling: smoothed prediction and certified robustness.

A subsampled graph keeps ``z`` uniformly chosen entries of the structure
vector and zeroes the rest (so only edges at kept positions survive).  The
smoothed classifier takes the majority vote of a base classifier over ``d``
independent subsamples.

The majority label provably survives any flip of up to ``R`` structure-vector
entries, where ``R`` is the largest integer with

    C(s - R, z) > (1.5 - p_lower) * C(s, z)

and ``p_lower`` is a lower confidence bound (Clopper-Pearson) on the majority
label's probability.  Injecting a trigger with ``T`` nodes flips at most
``T*(T-1)/2`` entries, so the certified trigger size is the largest ``T``
with ``T*(T-1)/2 <= R``.  A bound ``p_lower <= 0.5`` certifies nothing, which
is reported as abstention rather than an error.

Binomial coefficients are compared in log space (log-gamma); comparisons that
land within 1e-9 fall back to exact rational arithmetic so borderline radii
are never off by one.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import betainc

from .graph import Graph, num_pairs, pair_index
from .seeding import derive_rng

__all__ = [
    "SmoothingConfig",
    "Certificate",
    "kept_count",
    "subsample_graph",
    "smoothed_predict",
    "clopper_pearson_lower",
    "certified_radius",
    "certified_trigger_size",
    "exact_smoothed_distribution",
    "certify",
]

_EXACT_ENUM_CAP = 10**6
_LOG_TIE_BAND = 1e-9
_BETA_QUANTILE_TOL = 1e-10


@dataclass(frozen=True)
class SmoothingConfig:
    d: int = 100
    beta: float = 0.10
    alpha: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")


@dataclass(frozen=True)
class Certificate:
    """Smoothed prediction plus its robustness certificate.

    ``certified_radius`` / ``certified_trigger_size`` are None on abstention
    (the vote lower bound did not clear 1/2).
    """

    predicted_label: int
    d_l: int
    p_lower: float
    certified_radius: int | None
    certified_trigger_size: int | None
    s: int
    z: int

    @property
    def abstained(self) -> bool:
        return self.certified_radius is None


def kept_count(beta: float, s: int) -> int:
    """Number of kept structure-vector entries: ceil(beta * s), clamped to [1, s]."""
    if s < 1:
        raise ValueError("structure vector must have at least one entry")
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must be in (0, 1]")
    return min(s, max(1, math.ceil(beta * s - 1e-9)))


def _edge_indices(g: Graph) -> np.ndarray:
    n = g.node_count
    return np.fromiter(
        (pair_index(i, j, n) for i, j in g.edges), dtype=np.int64, count=g.edge_count
    )


def _keep_edges(g: Graph, kept_mask: np.ndarray, edge_idx: np.ndarray) -> Graph:
    edges = frozenset(e for e, k in zip(g.edges, edge_idx) if kept_mask[k])
    return Graph(g.node_count, edges)


def subsample_graph(g: Graph, z: int, rng: np.random.Generator) -> Graph:
    """Keep a uniformly random ``z``-subset of structure-vector entries.

    Edges at dropped positions vanish; node features are recomputed for the
    subsampled graph.
    """
    s = num_pairs(g.node_count)
    if not 1 <= z <= s:
        raise ValueError(f"z must be in [1, {s}], got {z}")
    kept = rng.choice(s, size=z, replace=False)
    mask = np.zeros(s, dtype=bool)
    mask[kept] = True
    return _keep_edges(g, mask, _edge_indices(g))


def smoothed_predict(
    base, g: Graph, cfg: SmoothingConfig, rng: np.random.Generator | None = None
) -> tuple[int, int]:
    """Majority vote of ``base`` over ``cfg.d`` subsampled graphs.

    Returns ``(label, votes_for_label)``; ties go to the lowest label.  Each
    of the ``d`` subsamples runs on its own substream derived from a single
    draw of ``rng`` and the subsample index, so the vote is reproducible and
    the ``d`` evaluations are order-independent.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    s = num_pairs(g.node_count)
    z = kept_count(cfg.beta, s)
    root = int(rng.integers(np.iinfo(np.int64).max))
    edge_idx = _edge_indices(g)
    votes: Counter[int] = Counter()
    for i in range(cfg.d):
        sub_rng = derive_rng(root, "vote", i)
        kept = sub_rng.choice(s, size=z, replace=False)
        mask = np.zeros(s, dtype=bool)
        mask[kept] = True
        votes[int(base(_keep_edges(g, mask, edge_idx)))] += 1
    label = min(votes, key=lambda lab: (-votes[lab], lab))
    return label, votes[label]


def clopper_pearson_lower(d_l: int, d: int, alpha: float) -> float:
    """One-sided Clopper-Pearson lower bound: the alpha-quantile of Beta(d_l, d-d_l+1).

    Returns 0 when ``d_l`` is 0 (no evidence).  Computed by bisection on the
    regularized incomplete beta function to 1e-10; the ``d_l == d`` case has
    the closed form ``alpha**(1/d)``.
    """
    if not 0 <= d_l <= d:
        raise ValueError("need 0 <= d_l <= d")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if d_l == 0:
        return 0.0
    if d_l == d:
        return float(alpha ** (1.0 / d))
    a, b = d_l, d - d_l + 1
    lo, hi = 0.0, 1.0
    while hi - lo > _BETA_QUANTILE_TOL:
        mid = 0.5 * (lo + hi)
        if betainc(a, b, mid) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _log_choose(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _radius_condition_exact(s: int, z: int, r: int, tau: Fraction) -> bool:
    lhs = math.comb(s - r, z) if s - r >= z else 0
    return Fraction(lhs) > tau * math.comb(s, z)


def certified_radius(s: int, z: int, p_lower) -> int | None:
    """Largest R with C(s-R, z) > (1.5 - p_lower) * C(s, z); None if p_lower <= 1/2.

    ``p_lower`` may be a float or an exact Fraction (useful when it comes from
    an exact vote count rather than a confidence bound).
    """
    if not 1 <= z <= s:
        raise ValueError(f"z must be in [1, {s}], got {z}")
    p = Fraction(p_lower)
    if not 0 <= p <= 1:
        raise ValueError("p_lower must be in [0, 1]")
    if p <= Fraction(1, 2):
        return None
    tau = Fraction(3, 2) - p
    log_tau_cs = math.log(float(tau)) + _log_choose(s, z)
    radius = 0
    while radius + 1 <= s - z:
        margin = _log_choose(s - (radius + 1), z) - log_tau_cs
        if abs(margin) < _LOG_TIE_BAND:
            ok = _radius_condition_exact(s, z, radius + 1, tau)
        else:
            ok = margin > 0.0
        if not ok:
            break
        radius += 1
    return radius


def _trigger_size_from_radius(radius: int) -> int:
    t = 1
    while (t + 1) * t // 2 <= radius:
        t += 1
    return t


def certified_trigger_size(n: int, z: int, p_lower) -> int | None:
    """Largest trigger node count T with T*(T-1)/2 <= certified radius."""
    if n < 2:
        raise ValueError("need at least 2 nodes")
    radius = certified_radius(num_pairs(n), z, p_lower)
    if radius is None:
        return None
    return _trigger_size_from_radius(radius)


def exact_smoothed_distribution(
    base, g: Graph, z: int, num_classes: int | None = None
) -> np.ndarray:
    """Exact vote distribution by enumerating all C(s, z) kept-subsets.

    Only feasible on tiny instances; refuses when C(s, z) exceeds 10^6.
    """
    s = num_pairs(g.node_count)
    if not 1 <= z <= s:
        raise ValueError(f"z must be in [1, {s}], got {z}")
    total = math.comb(s, z)
    if total > _EXACT_ENUM_CAP:
        raise ValueError(f"C({s}, {z}) = {total} exceeds the enumeration cap")
    edge_idx = _edge_indices(g)
    counts: Counter[int] = Counter()
    for kept in itertools.combinations(range(s), z):
        mask = np.zeros(s, dtype=bool)
        mask[list(kept)] = True
        counts[int(base(_keep_edges(g, mask, edge_idx)))] += 1
    width = num_classes if num_classes is not None else max(counts) + 1
    probs = np.zeros(width, dtype=np.float64)
    for label, c in counts.items():
        probs[label] = c / total
    return probs


def certify(
    base, g: Graph, cfg: SmoothingConfig, rng: np.random.Generator | None = None
) -> Certificate:
    """Smoothed prediction with Clopper-Pearson bound, radius, and trigger size."""
    s = num_pairs(g.node_count)
    z = kept_count(cfg.beta, s)
    label, d_l = smoothed_predict(base, g, cfg, rng)
    p_lower = clopper_pearson_lower(d_l, cfg.d, cfg.alpha)
    radius = certified_radius(s, z, p_lower)
    t_cert = None if radius is None else _trigger_size_from_radius(radius)
    return Certificate(
        predicted_label=label,
        d_l=d_l,
        p_lower=p_lower,
        certified_radius=radius,
        certified_trigger_size=t_cert,
        s=s,
        z=z,
    )
