import random

import pytest

from qicd import (
    NEW_COMMUNITY,
    Partition,
    aggregate,
    build_graph,
    community_members,
    delta_q_move,
    labels_from_csv,
    modularity,
    partition_to_csv,
    partition_to_json,
    singleton_partition,
)

from conftest import TWO_TRIANGLES_EDGES, make_random_graph, modularity_double_sum


def _random_partition(rnd, n, c_max=4):
    return [rnd.randrange(min(c_max, n)) for _ in range(n)]


def test_labels_are_compacted():
    g = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    p = Partition(g, [5, 9, 5])
    assert p.labels == [0, 1, 0]
    assert p.community_count == 2
    assert p.sizes == [2, 1]


def test_label_validation():
    g = build_graph(2, [(0, 1, 1.0)])
    with pytest.raises(ValueError):
        Partition(g, [0])
    with pytest.raises(ValueError):
        Partition(g, [0, -1])


def test_aggregate_fields_consistent_on_randoms():
    rnd = random.Random(11)
    for _ in range(50):
        g = make_random_graph(rnd, n_max=10)
        p = Partition(g, _random_partition(rnd, g.node_count))
        m = g.total_weight
        assert sum(p.internal_weight) <= m + 1e-9
        assert abs(sum(p.community_strength) - 2.0 * m) <= 1e-9 * max(1.0, 2.0 * m)
        # recompute from scratch and compare
        q = Partition(g, list(p.labels))
        for a, b in zip(p.internal_weight, q.internal_weight):
            assert abs(a - b) < 1e-9
        for a, b in zip(p.community_strength, q.community_strength):
            assert abs(a - b) < 1e-9


def test_modularity_identities(two_triangles):
    assert abs(modularity(two_triangles, Partition(two_triangles, [0] * 6))) <= 1e-12
    assert modularity(two_triangles, Partition(two_triangles, [0, 0, 0, 1, 1, 1])) == 0.5
    single = build_graph(2, [(0, 1, 1.0)])
    assert modularity(single, singleton_partition(single)) == -0.5


def test_modularity_edgeless_errors():
    g = build_graph(3, [])
    with pytest.raises(ValueError, match="no edges"):
        modularity(g, Partition(g, [0, 0, 0]))


def test_modularity_matches_double_sum():
    rnd = random.Random(3)
    for _ in range(60):
        g = make_random_graph(rnd, n_max=8)
        if g.total_weight == 0:
            continue
        labels = _random_partition(rnd, g.node_count)
        p = Partition(g, labels)
        assert abs(modularity(g, p) - modularity_double_sum(g, labels)) < 1e-12


def test_modularity_resolution_parameter():
    g = build_graph(6, TWO_TRIANGLES_EDGES)
    labels = [0, 0, 0, 1, 1, 1]
    p = Partition(g, labels)
    for gamma in (0.5, 1.0, 1.7):
        assert abs(modularity(g, p, gamma) - modularity_double_sum(g, labels, gamma)) < 1e-12


def test_relabeling_invariance():
    rnd = random.Random(9)
    for _ in range(30):
        g = make_random_graph(rnd)
        if g.total_weight == 0:
            continue
        labels = _random_partition(rnd, g.node_count)
        perm = list(range(max(labels) + 1))
        rnd.shuffle(perm)
        q1 = modularity(g, Partition(g, labels))
        q2 = modularity(g, Partition(g, [perm[c] for c in labels]))
        assert abs(q1 - q2) < 1e-12


def test_weight_scaling_invariance():
    rnd = random.Random(21)
    for _ in range(20):
        g = make_random_graph(rnd)
        if g.total_weight == 0:
            continue
        lam = rnd.uniform(0.01, 50.0)
        scaled = build_graph(g.node_count, [(u, v, w * lam) for u, v, w in g.iter_edges()])
        labels = _random_partition(rnd, g.node_count)
        q1 = modularity(g, Partition(g, labels))
        q2 = modularity(scaled, Partition(scaled, labels))
        assert abs(q1 - q2) <= 1e-9


def test_q_range():
    rnd = random.Random(2)
    for _ in range(40):
        g = make_random_graph(rnd)
        if g.total_weight == 0:
            continue
        q = modularity(g, Partition(g, _random_partition(rnd, g.node_count)))
        assert -1.0 <= q <= 1.0


def test_delta_q_noop_is_exactly_zero(two_triangles):
    p = Partition(two_triangles, [0, 0, 0, 1, 1, 1])
    assert delta_q_move(two_triangles, p, 2, 0) == 0.0


def test_delta_q_split_triangle(two_triangles):
    # one triangle split as {0} + {1, 2}; moving 0 back should match recompute
    p = Partition(two_triangles, [0, 1, 1, 2, 2, 2])
    d = delta_q_move(two_triangles, p, 0, 1)
    after = Partition(two_triangles, [1, 1, 1, 2, 2, 2])
    full = modularity(two_triangles, after) - modularity(two_triangles, p)
    assert abs(d - full) < 1e-12
    assert d > 0


def test_delta_q_matches_full_recompute_randomly():
    rnd = random.Random(17)
    for _ in range(200):
        g = make_random_graph(rnd, n_max=8)
        if g.total_weight == 0:
            continue
        labels = _random_partition(rnd, g.node_count)
        p = Partition(g, labels)
        node = rnd.randrange(g.node_count)
        target = rnd.choice([NEW_COMMUNITY] + list(range(p.community_count)))
        d = delta_q_move(g, p, node, target, 1.0)
        q = p.copy()
        q.apply_move(g, node, target)
        q.compact()
        full = modularity(g, q) - modularity(g, p)
        assert abs(d - full) < 1e-12


def test_delta_q_new_singleton_for_lone_node():
    g = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
    p = Partition(g, [0, 1, 1])
    assert abs(delta_q_move(g, p, 0, NEW_COMMUNITY)) < 1e-15


def test_delta_q_errors(two_triangles):
    p = Partition(two_triangles, [0, 0, 0, 1, 1, 1])
    with pytest.raises(ValueError):
        delta_q_move(two_triangles, p, 99, 0)
    with pytest.raises(ValueError):
        delta_q_move(two_triangles, p, 0, 5)


def test_apply_move_and_compact():
    g = build_graph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    p = Partition(g, [0, 0, 1, 1])
    p.apply_move(g, 0, 1)
    p.apply_move(g, 1, 1)
    p.compact()
    assert p.community_count == 1
    assert p.sizes == [4]


def test_aggregate_singletons_is_isomorphic():
    rnd = random.Random(31)
    g = make_random_graph(rnd, n_max=8)
    agg, ledger = aggregate(g, singleton_partition(g))
    assert agg.node_count == g.node_count
    assert agg.adjacency == g.adjacency
    assert ledger == [0.0] * g.node_count


def test_aggregate_two_triangles_with_bridge():
    edges = TWO_TRIANGLES_EDGES + [(2, 3, 1.0)]
    g = build_graph(6, edges)
    p = Partition(g, [0, 0, 0, 1, 1, 1])
    agg, ledger = aggregate(g, p)
    assert agg.node_count == 2
    assert list(agg.iter_edges()) == [(0, 1, 1.0)]
    assert ledger == [3.0, 3.0]


def test_aggregate_preserves_modularity():
    rnd = random.Random(41)
    for _ in range(60):
        g = make_random_graph(rnd, n_max=9)
        if g.total_weight == 0:
            continue
        labels = _random_partition(rnd, g.node_count)
        p = Partition(g, labels)
        agg, ledger = aggregate(g, p)
        top = Partition(agg, list(range(agg.node_count)), ledger)
        assert abs(modularity(agg, top) - modularity(g, p)) < 1e-12
        # a second-level grouping must also match the expanded grouping
        group = [c % 2 for c in range(agg.node_count)]
        top2 = Partition(agg, group, ledger)
        expanded = Partition(g, [group[p.labels[u]] for u in range(g.node_count)])
        assert abs(modularity(agg, top2) - modularity(g, expanded)) < 1e-12


def test_partition_csv_round_trip(two_triangles):
    p = Partition(two_triangles, [0, 0, 0, 1, 1, 1])
    text = partition_to_csv(p)
    assert text.startswith("node_id,community_id\n")
    assert labels_from_csv(text) == p.labels


def test_partition_json(two_triangles):
    p = Partition(two_triangles, [0, 0, 0, 1, 1, 1])
    payload = partition_to_json(two_triangles, p)
    assert payload["labels"] == [0, 0, 0, 1, 1, 1]
    assert payload["Q"] == 0.5


def test_community_members(two_triangles):
    p = Partition(two_triangles, [1, 0, 1, 0, 0, 1])
    assert community_members(p) == [[1, 3, 4], [0, 2, 5]]
