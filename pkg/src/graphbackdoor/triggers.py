"""Random subgraph triggers: ER, small-world, and preferential-attachment models.

Each synthesizer produces a trigger with a requested node count ``t`` and an
(approximate) density ``rho``.  ER hits ``rho`` in expectation; SW and PA pick
their connectivity parameter ``k`` from ``rho`` via closed-form rules
(``sw_k`` / ``pa_k``) so the realized density is roughly ``rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import Graph, density

__all__ = [
    "TriggerMethod",
    "TriggerSpec",
    "Trigger",
    "SynthesisError",
    "sw_k",
    "pa_k",
    "synth_er",
    "synth_sw",
    "synth_pa",
    "synthesize",
]

_ER_MAX_ATTEMPTS = 1000

# Guard band for ceil() on float products like (t-1)*rho: keeps e.g.
# ceil(9 * 0.4) at 4 even when the product rounds to 3.6000000000000001.
_CEIL_EPS = 1e-9


class SynthesisError(RuntimeError):
    """Trigger synthesis could not produce a valid subgraph."""


class TriggerMethod(str, Enum):
    ER = "er"
    SW = "sw"
    PA = "pa"


@dataclass(frozen=True)
class TriggerSpec:
    """Parameters of a trigger: size ``t``, density ``rho``, model, seed."""

    size: int
    rho: float
    method: TriggerMethod = TriggerMethod.ER
    sw_rewire_prob: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.size < 2:
            raise ValueError("trigger size must be at least 2")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("trigger density must be in (0, 1]")
        if not 0.0 <= self.sw_rewire_prob <= 1.0:
            raise ValueError("rewire probability must be in [0, 1]")
        object.__setattr__(self, "method", TriggerMethod(self.method))
        if self.method is TriggerMethod.PA:
            k = pa_k(self.size, self.rho)  # raises if rho is too large
            if self.size <= k:
                raise ValueError(f"PA needs t > k, got t={self.size}, k={k}")


@dataclass(frozen=True)
class Trigger:
    graph: Graph
    spec: TriggerSpec
    realized_density: float

    def __post_init__(self):
        if self.graph.edge_count < 1:
            raise ValueError("a trigger must have at least one edge")
        if self.graph.node_count != self.spec.size:
            raise ValueError("trigger graph size does not match its spec")


def sw_k(t: int, rho: float) -> int:
    """Ring-lattice neighbor count for the small-world model: ceil((t-1)*rho)."""
    if t < 2:
        raise ValueError("t must be at least 2")
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must be in (0, 1]")
    return math.ceil((t - 1) * rho - _CEIL_EPS)


def pa_k(t: int, rho: float) -> int:
    """Seed/attachment count for preferential attachment.

    ``k = ceil((t - sqrt(t^2 - 2*t*(t-1)*rho)) / 2)``, the smaller root of
    ``k*(t-k) = rho*t*(t-1)/2``.  The discriminant is negative when ``rho``
    exceeds ``t / (2*(t-1))``; such densities are not reachable by this model.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    disc = t * t - 2.0 * t * (t - 1) * rho
    if disc < 0.0:
        raise ValueError(
            f"density {rho} too large for PA with t={t} (needs rho <= t/(2*(t-1)))"
        )
    return math.ceil((t - math.sqrt(disc)) / 2.0 - _CEIL_EPS)


def _rng_for(spec: TriggerSpec, rng: np.random.Generator | None) -> np.random.Generator:
    return np.random.default_rng(spec.seed) if rng is None else rng


def synth_er(spec: TriggerSpec, rng: np.random.Generator | None = None) -> Trigger:
    """ER trigger: each pair connected independently with probability ``rho``.

    Empty samples are redrawn (at most 1000 times) so the trigger always has
    at least one edge.
    """
    if spec.method is not TriggerMethod.ER:
        raise ValueError("spec method is not ER")
    rng = _rng_for(spec, rng)
    t = spec.size
    pairs = [(i, j) for i in range(t) for j in range(i + 1, t)]
    for _ in range(_ER_MAX_ATTEMPTS):
        coins = rng.random(len(pairs))
        edges = frozenset(p for p, c in zip(pairs, coins) if c < spec.rho)
        if edges:
            g = Graph(node_count=t, edges=edges)
            return Trigger(graph=g, spec=spec, realized_density=density(g))
    raise SynthesisError(
        f"ER produced no edges in {_ER_MAX_ATTEMPTS} attempts (t={t}, rho={spec.rho})"
    )


def _ring_lattice(t: int, k: int) -> set[tuple[int, int]]:
    # Offsets 1..k//2 on both sides; odd k adds the clockwise neighbor at
    # offset ceil(k/2) only.  Duplicate pairs collapse in the set.
    edges: set[tuple[int, int]] = set()
    for off in range(1, k // 2 + 1):
        for i in range(t):
            j = (i + off) % t
            edges.add((min(i, j), max(i, j)))
    if k % 2 == 1:
        off = (k + 1) // 2
        for i in range(t):
            j = (i + off) % t
            if i != j:
                edges.add((min(i, j), max(i, j)))
    return edges


def synth_sw(spec: TriggerSpec, rng: np.random.Generator | None = None) -> Trigger:
    """Small-world trigger: ring lattice with k nearest neighbors, then rewiring.

    Each lattice edge is independently rewired with ``sw_rewire_prob``: the
    higher endpoint moves to a uniformly random node, redrawing on self-loops
    and duplicates (up to t attempts, after which the edge is kept as is).
    Rewiring moves endpoints and never deletes, so the edge count is
    preserved.
    """
    if spec.method is not TriggerMethod.SW:
        raise ValueError("spec method is not SW")
    rng = _rng_for(spec, rng)
    t = spec.size
    k = sw_k(t, spec.rho)
    if k < 1:
        raise ValueError("small-world lattice needs k >= 1")
    edges = _ring_lattice(t, k)
    for u, v in sorted(edges):
        if rng.random() >= spec.sw_rewire_prob:
            continue
        edges.discard((u, v))
        rewired = (u, v)
        for _ in range(t):
            w = int(rng.integers(t))
            cand = (min(u, w), max(u, w))
            if w != u and cand not in edges:
                rewired = cand
                break
        edges.add(rewired)
    g = Graph(node_count=t, edges=frozenset(edges))
    return Trigger(graph=g, spec=spec, realized_density=density(g))


def synth_pa(spec: TriggerSpec, rng: np.random.Generator | None = None) -> Trigger:
    """Preferential-attachment trigger.

    Starts from ``k`` isolated seed nodes; each new node attaches to ``k``
    distinct existing nodes drawn without replacement with probability
    proportional to current degree (uniform while all degrees are zero).
    Total edge count is exactly ``k*(t-k)``.
    """
    if spec.method is not TriggerMethod.PA:
        raise ValueError("spec method is not PA")
    rng = _rng_for(spec, rng)
    t = spec.size
    k = pa_k(t, spec.rho)
    if t <= k:
        raise ValueError(f"PA needs t > k, got t={t}, k={k}")
    deg = np.zeros(t, dtype=np.float64)
    edges: set[tuple[int, int]] = set()
    for new in range(k, t):
        candidates = list(range(new))
        snapshot = deg[:new].copy()
        for _ in range(k):
            weights = snapshot[candidates]
            total = weights.sum()
            if total <= 0.0:
                pick = candidates[int(rng.integers(len(candidates)))]
            else:
                pick = int(rng.choice(candidates, p=weights / total))
            candidates.remove(pick)
            edges.add((min(pick, new), max(pick, new)))
            deg[pick] += 1.0
            deg[new] += 1.0
    g = Graph(node_count=t, edges=frozenset(edges))
    return Trigger(graph=g, spec=spec, realized_density=density(g))


_SYNTH = {
    TriggerMethod.ER: synth_er,
    TriggerMethod.SW: synth_sw,
    TriggerMethod.PA: synth_pa,
}


def synthesize(spec: TriggerSpec, rng: np.random.Generator | None = None) -> Trigger:
    """Dispatch to the synthesizer named by ``spec.method``."""
    return _SYNTH[TriggerMethod(spec.method)](spec, rng)
