"""Partitions of a graph's nodes and the modularity machinery over them.

A Partition stores one community label per node plus per-community
aggregates (internal edge weight and total member strength) so that
modularity is O(C) and single-node move gains are O(deg).

Community-collapsed graphs carry their internal weight in a per-node
self-weight ledger rather than as self-loop edges (Graph forbids loops).
A Partition built with that ledger folds it into its aggregates, which
keeps modularity identical between a partition on the collapsed graph and
the corresponding expanded partition on the original graph.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .graph import Graph, build_graph

# Sentinel target for delta_q_move/apply_move: detach the node into a brand
# new singleton community.
NEW_COMMUNITY = -1


class Partition:
    """Community labels over a fixed graph, with consistent aggregates."""

    __slots__ = (
        "labels",
        "community_count",
        "internal_weight",
        "community_strength",
        "sizes",
        "self_weights",
        "_strengths",
        "_total",
    )

    def __init__(
        self,
        graph: Graph,
        labels: Sequence[int],
        self_weights: Sequence[float] | None = None,
    ):
        n = graph.node_count
        if len(labels) != n:
            raise ValueError(f"labels cover {len(labels)} nodes, graph has {n}")
        if self_weights is not None:
            if len(self_weights) != n:
                raise ValueError("self_weights length does not match graph")
            if any(w < 0 for w in self_weights):
                raise ValueError("self_weights must be non-negative")
            self.self_weights = tuple(float(w) for w in self_weights)
        else:
            self.self_weights = None

        # Compact arbitrary non-negative labels to dense 0..C-1, preserving
        # the relative order of label values.
        raw = np.asarray(labels, dtype=np.int64)
        if raw.ndim != 1:
            raise ValueError("labels must be a flat sequence of ints")
        if n and raw.min() < 0:
            raise ValueError("community labels must be non-negative")
        _uniq, dense = np.unique(raw, return_inverse=True)
        c_count = len(_uniq)
        self.labels = dense.tolist()
        self.community_count = c_count

        if self.self_weights is None:
            self._strengths = graph.strengths
            self._total = graph.total_weight
        else:
            self._strengths = tuple(
                s + 2.0 * w for s, w in zip(graph.strengths, self.self_weights)
            )
            self._total = graph.total_weight + math.fsum(self.self_weights)

        us, vs, ws = graph.edge_arrays()
        lab_u = dense[us]
        same = lab_u == dense[vs]
        internal = np.bincount(lab_u[same], weights=ws[same], minlength=c_count)
        if self.self_weights is not None:
            internal = internal + np.bincount(
                dense, weights=np.asarray(self.self_weights), minlength=c_count
            )
        strength = np.bincount(
            dense, weights=np.asarray(self._strengths, dtype=np.float64), minlength=c_count
        )
        self.internal_weight = internal.tolist()
        self.community_strength = strength.tolist()
        self.sizes = np.bincount(dense, minlength=c_count).tolist()

    @property
    def total_weight(self) -> float:
        """Effective total weight m (graph weight plus any self-weight ledger)."""
        return self._total

    def copy(self) -> "Partition":
        out = object.__new__(Partition)
        out.labels = list(self.labels)
        out.community_count = self.community_count
        out.internal_weight = list(self.internal_weight)
        out.community_strength = list(self.community_strength)
        out.sizes = list(self.sizes)
        out.self_weights = self.self_weights
        out._strengths = self._strengths
        out._total = self._total
        return out

    def apply_move(self, graph: Graph, node: int, target: int) -> int:
        """Relabel one node, updating aggregates in O(deg(node)).

        target may be NEW_COMMUNITY to detach the node into a fresh
        singleton. May leave an empty community behind; call compact()
        once a batch of moves is done. Returns the concrete target id.
        """
        a = self.labels[node]
        if target == NEW_COMMUNITY:
            target = self.community_count
            self.community_count += 1
            self.internal_weight.append(0.0)
            self.community_strength.append(0.0)
            self.sizes.append(0)
        elif not (0 <= target < self.community_count):
            raise ValueError(f"invalid target community {target}")
        if target == a:
            return a
        w_old = 0.0
        w_new = 0.0
        lab = self.labels
        for v, w in graph.adjacency[node]:
            c = lab[v]
            if c == a:
                w_old += w
            elif c == target:
                w_new += w
        ledger = self.self_weights[node] if self.self_weights is not None else 0.0
        s = self._strengths[node]
        self.internal_weight[a] -= w_old + ledger
        self.internal_weight[target] += w_new + ledger
        self.community_strength[a] -= s
        self.community_strength[target] += s
        self.sizes[a] -= 1
        self.sizes[target] += 1
        lab[node] = target
        return target

    def compact(self) -> "Partition":
        """Drop empty communities and renumber densely (stable order)."""
        if all(size > 0 for size in self.sizes):
            return self
        remap: dict[int, int] = {}
        for c, size in enumerate(self.sizes):
            if size > 0:
                remap[c] = len(remap)
        self.labels = [remap[c] for c in self.labels]
        keep = sorted(remap)
        self.internal_weight = [self.internal_weight[c] for c in keep]
        self.community_strength = [self.community_strength[c] for c in keep]
        self.sizes = [self.sizes[c] for c in keep]
        self.community_count = len(keep)
        return self


def singleton_partition(graph: Graph, self_weights: Sequence[float] | None = None) -> Partition:
    return Partition(graph, list(range(graph.node_count)), self_weights)


def community_members(partition: Partition) -> list[list[int]]:
    """Member node ids per community, each list in ascending order."""
    out: list[list[int]] = [[] for _ in range(partition.community_count)]
    for node, c in enumerate(partition.labels):
        out[c].append(node)
    return out


def modularity(graph: Graph, partition: Partition, resolution: float = 1.0) -> float:
    """Modularity Q of the partition, in [-1, 1].

    Q = sum_c [ e_c / m - resolution * (S_c / 2m)^2 ] with e_c the internal
    weight, S_c the total member strength, and m the (effective) total
    weight. resolution=1 is the classic definition.
    """
    if len(partition.labels) != graph.node_count:
        raise ValueError("partition does not cover this graph")
    m = partition.total_weight
    if m <= 0.0:
        raise ValueError("modularity undefined: graph has no edges")
    two_m = 2.0 * m
    q = 0.0
    for c in range(partition.community_count):
        if partition.sizes[c] == 0:
            continue
        frac = partition.community_strength[c] / two_m
        q += partition.internal_weight[c] / m - resolution * frac * frac
    return q


def delta_q_move(
    graph: Graph,
    partition: Partition,
    node: int,
    target: int,
    resolution: float = 1.0,
) -> float:
    """Modularity change from relabeling one node, without recomputing Q.

    target is an existing community id or NEW_COMMUNITY. Equals
    modularity(after) - modularity(before) up to rounding; moving a node to
    its current community is exactly 0.
    """
    if not (0 <= node < graph.node_count):
        raise ValueError(f"node {node} out of range")
    a = partition.labels[node]
    new_singleton = target == NEW_COMMUNITY
    if not new_singleton and not (0 <= target < partition.community_count):
        raise ValueError(f"invalid target community {target}")
    if not new_singleton and target == a:
        return 0.0
    w_old = 0.0
    w_new = 0.0
    lab = partition.labels
    for v, w in graph.adjacency[node]:
        c = lab[v]
        if c == a:
            w_old += w
        elif not new_singleton and c == target:
            w_new += w
    m = partition.total_weight
    if m <= 0.0:
        raise ValueError("modularity undefined: graph has no edges")
    s = partition._strengths[node]
    strength_old_excl = partition.community_strength[a] - s
    strength_new = 0.0 if new_singleton else partition.community_strength[target]
    return (w_new - w_old) / m - resolution * s * (strength_new - strength_old_excl) / (
        2.0 * m * m
    )


def aggregate(graph: Graph, partition: Partition) -> tuple[Graph, list[float]]:
    """Collapse communities into single nodes.

    Returns the community graph (cross-community weights only) plus a
    per-community self-weight ledger holding each community's internal
    weight, so that modularity of a partition on the collapsed graph (built
    with that ledger) matches the expanded partition on the original graph.
    """
    if any(size == 0 for size in partition.sizes):
        raise ValueError("aggregate requires a compact partition")
    c_count = partition.community_count
    us, vs, ws = graph.edge_arrays()
    lab = np.asarray(partition.labels, dtype=np.int64)
    cu = lab[us]
    cv = lab[vs]
    cross = cu != cv
    lo = np.minimum(cu[cross], cv[cross])
    hi = np.maximum(cu[cross], cv[cross])
    keys, inverse = np.unique(lo * c_count + hi, return_inverse=True)
    sums = np.bincount(inverse, weights=ws[cross])
    edges = [
        (int(key // c_count), int(key % c_count), float(w)) for key, w in zip(keys, sums)
    ]
    collapsed = build_graph(c_count, edges)
    return collapsed, list(partition.internal_weight)


def partition_to_csv(partition: Partition) -> str:
    lines = ["node_id,community_id"]
    lines.extend(f"{node},{c}" for node, c in enumerate(partition.labels))
    return "\n".join(lines) + "\n"


def labels_from_csv(text: str) -> list[int]:
    """Read labels back from partition CSV (inverse of partition_to_csv)."""
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows or rows[0] != "node_id,community_id":
        raise ValueError("expected 'node_id,community_id' header")
    pairs = []
    for row in rows[1:]:
        node_s, c_s = row.split(",")
        pairs.append((int(node_s), int(c_s)))
    pairs.sort()
    if [node for node, _ in pairs] != list(range(len(pairs))):
        raise ValueError("partition CSV must cover nodes 0..n-1 exactly once")
    return [c for _, c in pairs]


def partition_to_json(graph: Graph, partition: Partition, resolution: float = 1.0) -> dict:
    return {
        "labels": list(partition.labels),
        "Q": modularity(graph, partition, resolution),
    }
