"""Louvain and Leiden modularity optimizers.

Both run the multilevel scheme: greedy single-node moves until a sweep
gains less than min_gain, then collapse communities and repeat until
aggregation stops merging. Leiden additionally splits communities that
induce disconnected subgraphs, and its returned communities are always
connected. The local-move and refinement phases are exposed on their own
(leiden_local_move, leiden_refine) for callers that drive the loop
themselves.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .partition import Partition, aggregate, community_members, singleton_partition
from .rng import make_rng


@dataclass(frozen=True)
class DetectorConfig:
    seed: int = 0
    max_levels: int = 20
    max_sweeps_per_level: int = 100
    min_gain: float = 1e-7
    resolution: float = 1.0
    # Equal-gain targets default to the lowest community id, which keeps runs
    # reproducible; set random_ties to break ties from the seed stream.
    random_ties: bool = False

    def __post_init__(self):
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")
        if self.max_sweeps_per_level < 1:
            raise ValueError("max_sweeps_per_level must be >= 1")
        if self.min_gain < 0:
            raise ValueError("min_gain must be >= 0")
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")


def _move_pass(
    graph: Graph,
    partition: Partition,
    rng: np.random.Generator,
    resolution: float,
    random_ties: bool,
    active: list[bool] | None = None,
) -> float:
    """One greedy pass over nodes in random order, in place.

    Each node moves to the neighboring community with the largest strictly
    positive modularity gain; exact ties go to the lowest community id
    (or a seeded random pick when random_ties). When an `active` mask is
    given, only flagged nodes are visited and every move re-flags the
    mover's neighbors, so later passes skip settled regions. Returns the
    summed gain of applied moves.
    """
    adjacency = graph.adjacency
    labels = partition.labels
    strengths = partition._strengths
    comm_strength = partition.community_strength
    internal = partition.internal_weight
    sizes = partition.sizes
    ledger = partition.self_weights
    m = partition.total_weight
    inv_m = 1.0 / m
    coef = resolution / (2.0 * m * m)

    # Flat per-community accumulator with a touched list; edge weights are
    # strictly positive, so a zero entry always means "not seen yet".
    weight_to = [0.0] * len(internal)
    touched: list[int] = []

    gain = 0.0
    for u in rng.permutation(graph.node_count).tolist():
        if active is not None:
            if not active[u]:
                continue
            active[u] = False
        nbrs = adjacency[u]
        if not nbrs:
            continue
        a = labels[u]
        for v, w in nbrs:
            c = labels[v]
            if weight_to[c] == 0.0:
                touched.append(c)
            weight_to[c] += w
        w_old = weight_to[a]
        s = strengths[u]
        base = comm_strength[a] - s
        k = coef * s
        best = a
        best_gain = 0.0
        if random_ties:
            ties: list[int] = []
            for c in sorted(touched):
                if c == a:
                    continue
                d = (weight_to[c] - w_old) * inv_m - k * (comm_strength[c] - base)
                if d > best_gain:
                    best_gain = d
                    ties = [c]
                elif d == best_gain and ties:
                    ties.append(c)
            if ties:
                best = ties[int(rng.integers(len(ties)))]
        else:
            for c in touched:
                if c == a:
                    continue
                d = (weight_to[c] - w_old) * inv_m - k * (comm_strength[c] - base)
                if d > best_gain or (d == best_gain and d > 0.0 and c < best):
                    best_gain = d
                    best = c
        if best != a:
            lw = ledger[u] if ledger is not None else 0.0
            internal[a] -= w_old + lw
            internal[best] += weight_to[best] + lw
            comm_strength[a] = base
            comm_strength[best] += s
            sizes[a] -= 1
            sizes[best] += 1
            labels[u] = best
            gain += best_gain
            if active is not None:
                # Neighbors already in the destination only gained incentive
                # to stay; everyone else may now prefer a different move.
                for v, _w in nbrs:
                    if labels[v] != best:
                        active[v] = True
        for c in touched:
            weight_to[c] = 0.0
        touched.clear()
    return gain


def _move_until_stable(
    graph: Graph,
    partition: Partition,
    rng: np.random.Generator,
    cfg: DetectorConfig,
) -> None:
    """Repeat move passes until a sweep gains less than min_gain."""
    active = [True] * graph.node_count
    for _ in range(cfg.max_sweeps_per_level):
        gain = _move_pass(graph, partition, rng, cfg.resolution, cfg.random_ties, active)
        if gain < cfg.min_gain:
            break


def leiden_local_move(
    graph: Graph,
    partition: Partition,
    cfg: DetectorConfig,
    rng: np.random.Generator | None = None,
) -> Partition:
    """One bounded pass of greedy node moves; never decreases Q."""
    if rng is None:
        rng = make_rng(cfg.seed)
    out = partition.copy()
    _move_pass(graph, out, rng, cfg.resolution, cfg.random_ties)
    return out.compact()


def _connected_components(graph: Graph, nodes: list[int], labels: list[int], label: int) -> list[list[int]]:
    """Components of the subgraph induced by `nodes` (all carrying `label`)."""
    seen: set[int] = set()
    components: list[list[int]] = []
    for start in nodes:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, _w in graph.adjacency[u]:
                if labels[v] == label and v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        components.append(comp)
    return components


def leiden_refine(graph: Graph, partition: Partition) -> Partition:
    """Split every community that induces a disconnected subgraph.

    Splitting into connected components never decreases Q. Output labels are
    compacted; connected communities pass through unchanged.
    """
    labels = list(partition.labels)
    next_label = partition.community_count
    changed = False
    for c, nodes in enumerate(community_members(partition)):
        if len(nodes) <= 1:
            continue
        components = _connected_components(graph, nodes, partition.labels, c)
        if len(components) == 1:
            continue
        changed = True
        for comp in components[1:]:
            for u in comp:
                labels[u] = next_label
            next_label += 1
    if not changed:
        return partition.copy()
    return Partition(graph, labels, partition.self_weights)


def community_connectivity_ok(graph: Graph, partition: Partition) -> bool:
    """True when every community induces a connected subgraph (BFS check)."""
    for c, nodes in enumerate(community_members(partition)):
        if len(nodes) <= 1:
            continue
        components = _connected_components(graph, nodes, partition.labels, c)
        if len(components) > 1:
            return False
    return True


def _multilevel(
    graph: Graph,
    cfg: DetectorConfig,
    refine: bool,
    initial: Partition | None = None,
    rng: np.random.Generator | None = None,
) -> Partition:
    if graph.total_weight <= 0.0:
        raise ValueError("modularity undefined: graph has no edges")
    if rng is None:
        rng = make_rng(cfg.seed)
    level_graph = graph
    ledger: list[float] | None = None
    level_labels: list[list[int]] = []
    part = initial.copy() if initial is not None else None
    for _level in range(cfg.max_levels):
        if part is None:
            part = singleton_partition(level_graph, ledger)
        _move_until_stable(level_graph, part, rng, cfg)
        part.compact()
        if refine:
            refined = leiden_refine(level_graph, part)
            if refined.community_count != part.community_count:
                _move_until_stable(level_graph, refined, rng, cfg)
                refined.compact()
            part = refined
        level_labels.append(list(part.labels))
        if part.community_count == level_graph.node_count:
            break
        level_graph, ledger = aggregate(level_graph, part)
        part = None

    labels = level_labels[0]
    for mapping in level_labels[1:]:
        labels = [mapping[c] for c in labels]
    result = Partition(graph, labels)
    if refine:
        # Guarantee connectivity on the original graph, not just per level.
        result = leiden_refine(graph, result)
    return result


def louvain(graph: Graph, cfg: DetectorConfig) -> Partition:
    """Greedy multilevel modularity optimization."""
    return _multilevel(graph, cfg, refine=False)


def leiden(graph: Graph, cfg: DetectorConfig) -> Partition:
    """Louvain plus a refinement phase; returned communities are connected."""
    return _multilevel(graph, cfg, refine=True)


def seeded_pass(
    graph: Graph,
    initial: Partition,
    cfg: DetectorConfig,
    refine: bool = True,
    rng: np.random.Generator | None = None,
) -> Partition:
    """Full multilevel pass started from an existing partition.

    Used to polish an externally generated candidate: local moves reshape it
    at node level, then aggregation continues from whatever scale survives.
    """
    return _multilevel(graph, cfg, refine, initial=initial, rng=rng)
