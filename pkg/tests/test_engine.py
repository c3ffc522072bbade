import random

import pytest

from qicd import (
    DetectorConfig,
    HyperuniformParams,
    PerturbationKind,
    QicdConfig,
    build_graph,
    louvain,
    mix,
    modularity,
    mrg,
    ring_of_cliques,
    run_qicd,
)
from qicd.engine import result_to_json, trace_to_csv

from conftest import make_random_graph

ALL_KINDS = ("pt", "haar", "hu", "pt-hu", "haar-hu")


def _cfg(seed=0, **kw):
    kw.setdefault("kind", PerturbationKind("haar"))
    kw.setdefault("detector", DetectorConfig(seed=mix(seed, 9)))
    return QicdConfig(seed=seed, **kw)


def test_config_validation():
    with pytest.raises(ValueError):
        QicdConfig(iterations=-1)
    with pytest.raises(ValueError):
        QicdConfig(stall_limit=0)
    with pytest.raises(ValueError):
        QicdConfig(init_mode="bogus")
    with pytest.raises(ValueError):
        QicdConfig(base="bogus")
    QicdConfig(iterations=0)  # proposals disabled is legal


def test_mrg_arithmetic():
    assert abs(mrg(0.182, 0.143) - 0.039) < 1e-12
    assert mrg(0.3, 0.3) == 0.0
    assert abs(mrg(0.12, 0.18) + 0.06) < 1e-12
    with pytest.raises(ValueError):
        mrg(float("nan"), 0.0)


def test_two_triangles_reaches_optimum(two_triangles):
    for kind in ALL_KINDS:
        result = run_qicd(two_triangles, _cfg(seed=3, kind=PerturbationKind(kind)))
        assert result.q_star == 0.5
        assert result.q_baseline == 0.5
        assert result.mrg == 0.0


def test_clique_ring_control():
    g = ring_of_cliques(10, 5)
    result = run_qicd(g, _cfg(seed=5))
    assert abs(result.q_star - (10.0 / 11.0 - 0.1)) < 1e-9
    assert result.mrg <= 0.005


def test_edgeless_graph_rejected():
    g = build_graph(3, [])
    with pytest.raises(ValueError, match="no edges"):
        run_qicd(g, _cfg())


def test_zero_iterations_returns_initial():
    g = ring_of_cliques(3, 4)
    result = run_qicd(g, _cfg(seed=1, iterations=0))
    assert result.trace == []
    assert result.q_star == result.q_baseline
    assert result.mrg == 0.0


def test_acceptance_is_strict_and_recorded():
    rnd = random.Random(50)
    for _ in range(25):
        g = make_random_graph(rnd, n_max=24)
        if g.total_weight == 0:
            continue
        kind = PerturbationKind(rnd.choice(ALL_KINDS))
        cfg = _cfg(seed=rnd.randrange(2**32), kind=kind, iterations=6, stall_limit=6)
        result = run_qicd(g, cfg)
        for record in result.trace:
            assert record.accepted == (record.q_quant > record.q_ref)
            assert record.communities >= 1
            assert record.millis >= 0.0


def test_best_trace_monotone_and_covers_initial():
    rnd = random.Random(60)
    for _ in range(25):
        g = make_random_graph(rnd, n_max=20)
        if g.total_weight == 0:
            continue
        cfg = _cfg(seed=rnd.randrange(2**32), iterations=8, stall_limit=8)
        result = run_qicd(g, cfg)
        running = result.q_baseline  # quick init starts at the baseline partition
        best_seen = running
        for record in result.trace:
            step = record.q_quant if record.accepted else record.q_ref
            best_seen = max(best_seen, step)
        assert abs(result.q_star - best_seen) < 1e-12
        assert result.q_star >= result.trace[0].q_ref - 1e-12


def test_quick_init_never_below_baseline():
    rnd = random.Random(70)
    for _ in range(20):
        g = make_random_graph(rnd, n_max=20)
        if g.total_weight == 0:
            continue
        result = run_qicd(g, _cfg(seed=rnd.randrange(2**32)))
        assert result.mrg >= -1e-12


def test_singleton_init_mode():
    g = ring_of_cliques(4, 4)
    result = run_qicd(g, _cfg(seed=2, init_mode="singleton", iterations=4, stall_limit=4))
    assert result.q_star >= result.trace[0].q_ref - 1e-12


def test_louvain_base():
    g = ring_of_cliques(5, 4)
    result = run_qicd(g, _cfg(seed=4, base="louvain"))
    baseline = louvain(g, DetectorConfig(seed=mix(4, 9)))
    assert result.q_baseline == pytest.approx(modularity(g, baseline))


def _trace_key(result):
    return [(r.t, r.q_ref, r.q_quant, r.accepted, r.communities) for r in result.trace]


def test_determinism():
    g = ring_of_cliques(4, 5)
    cfg = _cfg(seed=8, iterations=5, stall_limit=5)
    a = run_qicd(g, cfg)
    b = run_qicd(g, cfg)
    assert _trace_key(a) == _trace_key(b)
    assert a.best_partition.labels == b.best_partition.labels
    assert a.q_star == b.q_star


def test_stall_limit_stops_early():
    g = ring_of_cliques(6, 4)
    result = run_qicd(g, _cfg(seed=3, iterations=50, stall_limit=3))
    assert len(result.trace) <= 50
    # baseline is optimal here, so nothing improves and the loop stalls out
    assert len(result.trace) == 3


def test_hu_zero_fraction_matches_refined_trace():
    g = ring_of_cliques(4, 4)
    cfg = _cfg(
        seed=6,
        kind=PerturbationKind("hu"),
        hu=HyperuniformParams(2.0, 0.0),
        iterations=6,
        stall_limit=6,
    )
    result = run_qicd(g, cfg)
    # empty perturbations: Q* equals the best refined value in its own trace
    assert result.q_star == max(r.q_ref for r in result.trace)
    assert all(not r.accepted for r in result.trace)


def test_proposal_seed_count_resolution():
    g = ring_of_cliques(4, 4)  # n = 16 -> default K = 4
    result = run_qicd(g, _cfg(seed=1, iterations=1, stall_limit=1))
    assert result.proposal_seed_count == 4
    result = run_qicd(g, _cfg(seed=1, kind=PerturbationKind("pt", 7), iterations=1, stall_limit=1))
    assert result.proposal_seed_count == 7
    result = run_qicd(g, _cfg(seed=1, kind=PerturbationKind("hu"), iterations=1, stall_limit=1))
    assert result.proposal_seed_count is None


def test_refine_before_accept_runs():
    g = ring_of_cliques(5, 4)
    result = run_qicd(g, _cfg(seed=9, refine_before_accept=True, iterations=4, stall_limit=4))
    assert result.q_star >= result.q_baseline


def test_trace_csv_shape():
    g = ring_of_cliques(4, 4)
    result = run_qicd(g, _cfg(seed=2, iterations=3, stall_limit=3))
    text = trace_to_csv(result.trace)
    lines = text.strip().split("\n")
    assert lines[0] == "t,Q_ref,Q_quant,accepted,communities,millis"
    assert len(lines) == len(result.trace) + 1
    first = lines[1].split(",")
    assert first[0] == "1"
    assert first[3] in ("0", "1")


def test_result_json_envelope():
    g = ring_of_cliques(4, 4)
    cfg = _cfg(seed=2, iterations=3, stall_limit=3)
    result = run_qicd(g, cfg)
    payload = result_to_json(result, cfg)
    assert payload["Q_baseline"] == result.q_baseline
    assert payload["Q_star"] == result.q_star
    assert payload["mrg"] == result.mrg
    assert payload["config"]["kind"] == "haar"
    assert payload["config"]["detector"]["seed"] == cfg.detector.seed
    assert payload["iterations_run"] == len(result.trace)
