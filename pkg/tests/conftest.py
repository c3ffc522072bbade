"""Shared fixtures and independent test oracles.

The oracles here (double-sum modularity, set-partition enumeration, BFS
connectivity) deliberately avoid the package's own aggregate-based
implementations so the two routes check each other.
"""

from __future__ import annotations

import random
from collections import deque

import pytest

from qicd import Graph, build_graph, calibrate_planted, generate_planted


def make_random_graph(rnd: random.Random, n_max: int = 8, weighted: bool = True) -> Graph:
    n = rnd.randint(2, n_max)
    p = rnd.uniform(0.2, 0.9)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rnd.random() < p:
                w = rnd.uniform(0.1, 3.0) if weighted else 1.0
                edges.append((i, j, w))
    return build_graph(n, edges)


def modularity_double_sum(graph: Graph, labels, resolution: float = 1.0) -> float:
    """Direct double-sum evaluation over all node pairs (including i == j)."""
    n = graph.node_count
    m = graph.total_weight
    weight = [[0.0] * n for _ in range(n)]
    for u, v, w in graph.iter_edges():
        weight[u][v] = w
        weight[v][u] = w
    s = graph.strengths
    two_m = 2.0 * m
    total = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                total += weight[i][j] - resolution * s[i] * s[j] / two_m
    return total / two_m


def iter_set_partitions(n: int):
    """All set partitions of range(n) as restricted-growth label lists."""
    if n == 0:
        yield []
        return
    a = [0] * n
    while True:
        yield list(a)
        j = n - 1
        while j > 0 and a[j] > max(a[:j]):
            j -= 1
        if j == 0:
            return
        a[j] += 1
        for k in range(j + 1, n):
            a[k] = 0


def communities_connected(graph: Graph, labels) -> bool:
    """Independent BFS check that every community induces a connected subgraph."""
    groups: dict[int, list[int]] = {}
    for node, c in enumerate(labels):
        groups.setdefault(c, []).append(node)
    for nodes in groups.values():
        members = set(nodes)
        seen = {nodes[0]}
        queue = deque([nodes[0]])
        while queue:
            u = queue.popleft()
            for v, _w in graph.adjacency[u]:
                if v in members and v not in seen:
                    seen.add(v)
                    queue.append(v)
        if len(seen) != len(members):
            return False
    return True


TRIANGLE_EDGES = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]
TWO_TRIANGLES_EDGES = TRIANGLE_EDGES + [(3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]


@pytest.fixture(scope="session")
def two_triangles() -> Graph:
    return build_graph(6, TWO_TRIANGLES_EDGES)


# Weak planted benchmark used by the uplift and significance checks: a
# 2000-node graph calibrated so plain Leiden lands near Q = 0.13 while the
# planted structure is still recoverable. Session-scoped because the
# calibration runs a bisection of Leiden evaluations.
UPLIFT_CALIBRATION = dict(n=2000, k=20, target_q=0.13, tolerance=0.005, avg_degree=60.0, seed=1234)


@pytest.fixture(scope="session")
def weak_planted_graph():
    spec, achieved = calibrate_planted(
        UPLIFT_CALIBRATION["n"],
        UPLIFT_CALIBRATION["k"],
        UPLIFT_CALIBRATION["target_q"],
        UPLIFT_CALIBRATION["tolerance"],
        avg_degree=UPLIFT_CALIBRATION["avg_degree"],
        seed=UPLIFT_CALIBRATION["seed"],
    )
    graph, truth = generate_planted(spec)
    return graph, truth, achieved


@pytest.fixture(scope="session")
def strong_planted_graph():
    spec, achieved = calibrate_planted(400, 8, 0.65, 0.02, avg_degree=20.0, seed=99)
    graph, _truth = generate_planted(spec)
    return graph, achieved
