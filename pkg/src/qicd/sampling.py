"""Structured random perturbations for partition proposals.

Three ingredients: heavy-tailed per-node weights (unit-mean exponentials),
their normalized variant (weights summing to 1, a flat Dirichlet draw), and
a size-flattening adjustment that relocates nodes out of oversized
communities. Weight vectors seed a proposal partition grown by multi-source
BFS from the highest-weighted nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .partition import Partition, community_members

KIND_NAMES = ("pt", "haar", "hu", "pt-hu", "haar-hu")


@dataclass(frozen=True)
class WeightVector:
    """Per-node non-negative weights; normalized means they sum to 1."""

    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and non-negative")
        if self.normalized and abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError("normalized weights must sum to 1 within 1e-12")

    def __len__(self) -> int:
        return int(self.weights.size)


@dataclass(frozen=True)
class HyperuniformParams:
    """Knobs for the size-flattening step.

    A community is oversized when its size exceeds skew_factor * (n / C).
    reassign_fraction of an oversized community's members are relocated.
    fraction 0 is allowed and makes the perturbation a no-op.
    """

    skew_factor: float = 2.0
    reassign_fraction: float = 0.1

    def __post_init__(self):
        if self.skew_factor <= 1.0:
            raise ValueError("skew_factor must be > 1")
        if not 0.0 <= self.reassign_fraction <= 1.0:
            raise ValueError("reassign_fraction must be in [0, 1]")


@dataclass(frozen=True)
class PerturbationKind:
    """Proposal flavor: pt | haar | hu | pt-hu | haar-hu.

    seed_count is the number of proposal seeds K for weight-based kinds;
    None defers to ceil(sqrt(n)) at run time. Ignored by the hu-only kind.
    """

    name: str = "haar"
    seed_count: int | None = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise ValueError(f"unknown perturbation kind {self.name!r}; expected one of {KIND_NAMES}")
        if self.seed_count is not None and self.seed_count < 1:
            raise ValueError("seed_count must be >= 1")

    @property
    def weight_mode(self) -> str | None:
        """'pt', 'haar', or None for the noise-only kind."""
        if self.name.startswith("pt"):
            return "pt"
        if self.name.startswith("haar"):
            return "haar"
        return None

    @property
    def with_hu(self) -> bool:
        return self.name.endswith("hu")


def sample_pt_weights(n: int, rng: np.random.Generator) -> WeightVector:
    """n independent unit-mean exponential weights via inverse transform.

    w = -ln(U) with U uniform on (0, 1], so a draw of U = 1 maps to exactly
    0 and the sample is reproducible from the uniform stream alone.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = 1.0 - rng.random(n)
    return WeightVector(-np.log(u), normalized=False)


def sample_haar_weights(n: int, rng: np.random.Generator) -> WeightVector:
    """Exponential weights rescaled to sum 1 (flat Dirichlet on the simplex)."""
    while True:
        w = sample_pt_weights(n, rng).weights
        total = float(w.sum())
        if total > 0.0:
            return WeightVector(w / total, normalized=True)
        # An all-zero draw has probability zero; redraw if it ever happens.


def propose_partition(
    graph: Graph,
    weights: WeightVector,
    seed_count: int,
    rng: np.random.Generator | None = None,
) -> Partition:
    """Grow a proposal partition from the highest-weighted nodes.

    The seed_count nodes with the largest weights (ties to the lower node
    id) become community seeds; the rest join the seed that reaches them
    first by breadth-first search over the graph's edges. Simultaneous
    arrivals go to the seed with the larger weight, then the lower seed id.
    Nodes unreachable from every seed become singletons. Deterministic given
    the weights; rng is accepted for interface symmetry only.
    """
    n = graph.node_count
    w = weights.weights
    if len(weights) != n:
        raise ValueError("weight vector length does not match graph")
    if not 1 <= seed_count <= n:
        raise ValueError(f"seed_count must be in [1, {n}], got {seed_count}")

    # Stable argsort on -w puts equal weights in ascending node-id order.
    order = np.argsort(-w, kind="stable")
    seeds = order[:seed_count].astype(np.int64)
    labels = np.full(n, -1, dtype=np.int64)
    labels[seeds] = np.arange(seed_count, dtype=np.int64)

    # Community index already encodes (larger weight, then lower id), so the
    # arrival tie rule is "smallest claiming community wins". Layer-by-layer
    # expansion; same-layer ties resolve with a running minimum per node.
    indptr, flat_nbrs = graph.csr_arrays()
    claim = np.empty(n, dtype=np.int64)
    frontier = np.sort(seeds)
    while frontier.size:
        counts = indptr[frontier + 1] - indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        starts = np.repeat(indptr[frontier], counts)
        offsets = np.arange(total, dtype=np.int64) - np.repeat(
            np.cumsum(counts) - counts, counts
        )
        targets = flat_nbrs[starts + offsets]
        sources = np.repeat(labels[frontier], counts)
        fresh = labels[targets] == -1
        targets = targets[fresh]
        sources = sources[fresh]
        if targets.size == 0:
            break
        claim.fill(n + 1)
        np.minimum.at(claim, targets, sources)
        frontier = np.unique(targets)
        labels[frontier] = claim[frontier]

    unreachable = np.flatnonzero(labels == -1)
    labels[unreachable] = seed_count + np.arange(unreachable.size, dtype=np.int64)
    return Partition(graph, labels.tolist())


def hyperuniform_adjust(
    graph: Graph,
    partition: Partition,
    params: HyperuniformParams,
    rng: np.random.Generator,
) -> Partition:
    """Shrink oversized communities by relocating a fraction of their nodes.

    Communities whose input size exceeds skew_factor * n / C lose
    ceil(reassign_fraction * size) members (capped at size - 1 so nothing
    empties), each reassigned to a uniformly random community that was not
    oversized; the cap plus non-oversized targets guarantee every oversized
    community ends strictly smaller. With a single community the partition
    is returned unchanged.
    """
    c_count = partition.community_count
    if c_count <= 1:
        return partition.copy()
    n = graph.node_count
    threshold = params.skew_factor * n / c_count
    sizes = partition.sizes
    oversized = [c for c in range(c_count) if sizes[c] > threshold]
    if not oversized:
        return partition.copy()
    receivers = [c for c in range(c_count) if sizes[c] <= threshold]

    members = community_members(partition)
    labels = list(partition.labels)
    for c in oversized:
        move_n = min(math.ceil(params.reassign_fraction * sizes[c]), sizes[c] - 1)
        if move_n <= 0:
            continue
        nodes = members[c]
        picked = rng.choice(len(nodes), size=move_n, replace=False)
        for i in sorted(int(x) for x in picked):
            labels[nodes[i]] = receivers[int(rng.integers(len(receivers)))]
    return Partition(graph, labels, partition.self_weights)


def hu_noise(
    graph: Graph,
    partition: Partition,
    params: HyperuniformParams,
    rng: np.random.Generator,
) -> Partition:
    """Noise-only perturbation: relabel ceil(f * n) nodes across communities.

    The relocation budget is spread proportionally over communities (largest
    remainder, one batch per community, never draining a community) and each
    picked node moves to a uniformly random other community. No weights are
    sampled; community ids are preserved.
    """
    c_count = partition.community_count
    if c_count <= 1:
        return partition.copy()
    n = graph.node_count
    total = math.ceil(params.reassign_fraction * n)
    if total <= 0:
        return partition.copy()
    sizes = partition.sizes
    caps = [s - 1 for s in sizes]
    total = min(total, sum(caps))
    if total <= 0:
        return partition.copy()

    quotas = [total * s / n for s in sizes]
    batch = [min(int(math.floor(q)), cap) for q, cap in zip(quotas, caps)]
    shortfall = total - sum(batch)
    by_remainder = sorted(range(c_count), key=lambda c: (-(quotas[c] - math.floor(quotas[c])), c))
    while shortfall > 0:
        progressed = False
        for c in by_remainder:
            if shortfall == 0:
                break
            if batch[c] < caps[c]:
                batch[c] += 1
                shortfall -= 1
                progressed = True
        if not progressed:
            break

    members = community_members(partition)
    labels = list(partition.labels)
    for c in range(c_count):
        if batch[c] <= 0:
            continue
        nodes = members[c]
        picked = rng.choice(len(nodes), size=batch[c], replace=False)
        for i in sorted(int(x) for x in picked):
            target = int(rng.integers(c_count - 1))
            if target >= c:
                target += 1
            labels[nodes[i]] = target
    return Partition(graph, labels, partition.self_weights)
