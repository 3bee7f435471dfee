import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seriation.graph import Graph, threshold_square
from seriation.graphon import Step, oracle_threshold_graph, sample_graph
from seriation.interval import recognize_unit_interval
from seriation.metrics import comparison_accuracy, comparison_from_ranks, ordering_error
from seriation.rng import stream
from seriation.sketch import (
    BudgetExhaustedError,
    SketchParams,
    SketchSample,
    align_signs,
    comparison_to_order,
    desk_default_params,
    global_order,
    local_refinement,
    main_estimate,
    ordered_subsample,
    paper_default_params,
    pairwise_alignment,
    sparse_sketch,
    vote,
)


def planted(n, seed, sharp=False):
    lat = stream(seed, "test-latents").random(n)
    spec = Step(0.8, 0.0 if sharp else 0.1, 0.2)
    return Graph(oracle_threshold_graph(spec, lat, 0.1).adjacency), lat


def sample(vertices, ranks=None):
    vertices = np.asarray(vertices)
    ranks = np.arange(1, vertices.size + 1) if ranks is None else np.asarray(ranks)
    return SketchSample(vertices, ranks)


def is_antisymmetric(f):
    return np.array_equal(f, -f.T) and not np.diag(f).any()


def test_asymptotic_params():
    assert paper_default_params(20).m == 20
    assert paper_default_params(3).m == 3
    p = paper_default_params(55)
    assert p.asymptotic and p.zeta < p.m / 2
    assert p.t == round((55 * math.log(55)) ** 2) and p.max_attempts == 20 * p.t


@pytest.mark.parametrize("n,m", [(16, 12), (100, 12), (500, 19), (1000, 24), (5, 5)])
def test_desk_params(n, m):
    p = desk_default_params(n)
    assert p.m == m
    assert p.t == math.ceil((n / m) ** 2 * math.log(n))
    assert p.zeta < m / 2 and p.max_attempts == 20 * p.t and not p.asymptotic


def test_params_validation():
    with pytest.raises(ValueError):
        SketchParams(m=2, t=1, zeta=1, max_attempts=1)
    with pytest.raises(ValueError):
        SketchParams(m=10, t=1, zeta=5, max_attempts=1)
    with pytest.raises(ValueError):
        SketchParams(m=10, t=5, zeta=2, max_attempts=4)
    with pytest.raises(ValueError):
        desk_default_params(2)
    p = desk_default_params(100).with_overrides(m=20, t=None)
    assert p.m == 20 and p.t == desk_default_params(100).t
    with pytest.raises(ValueError):
        SketchParams(m=30, t=1, zeta=2, max_attempts=1).validate_for(20)


def test_ordered_subsample_examples():
    res = ordered_subsample(Graph.complete(10), 4, stream(0, "t"))
    assert res is not None and res.m == 4 and sorted(res.ranks) == [1, 2, 3, 4]
    two = Graph(np.kron(np.eye(2, dtype=bool), np.ones((5, 5), dtype=bool)) & ~np.eye(10, dtype=bool))
    assert ordered_subsample(two, 10, stream(0, "t")) is None
    with pytest.raises(ValueError):
        ordered_subsample(two, 11, stream(0, "t"))


def misordered_only_twins(h, s, lat):
    sub = h.adj[np.ix_(s.vertices, s.vertices)] | np.eye(s.m, dtype=bool)
    truth = lat[s.vertices]
    r = s.ranks if np.corrcoef(s.ranks, truth)[0, 1] > 0 else s.m + 1 - s.ranks
    for i in range(s.m):
        for j in range(s.m):
            if truth[i] < truth[j] and r[i] > r[j] and not np.array_equal(sub[i], sub[j]):
                return False
    return True


def test_ordered_subsample_planted_orders_match_latents():
    h, lat = planted(60, 1)
    good = draws = 0
    for k in range(40):
        s = ordered_subsample(h, 12, stream(1, "draw", k))
        if s is None:
            continue
        draws += 1
        good += misordered_only_twins(h, s, lat)
    assert draws > 20 and good >= 0.9 * draws


def test_global_order_examples():
    a = sample([0, 1, 2, 3, 4])
    b = sample([0, 5, 6, 7, 8])
    al = global_order([a, b], zeta=2)
    assert al.consistent and list(al.signs) == [1, 1]
    c = sample([9, 5, 6, 7, 0])
    al = global_order([a, c], zeta=2)
    assert al.consistent and list(al.signs) == [1, -1]
    h = np.array([[0, 1, 0], [1, 0, -1], [0, -1, 0]])
    al = align_signs(h)
    assert al.consistent and list(al.signs) == [1, 1, -1]


def test_global_order_same_side_wins_and_conflicts():
    a = sample([0, 1, 2, 3, 4])
    b = sample([0, 5, 6, 7, 4])  # shares 0 low/low and 4 high/high
    c = sample([4, 5, 6, 7, 0])  # only opposite-side overlap with a
    h = pairwise_alignment([a, b, c], zeta=2).toarray()
    assert h[0, 1] == 1 and h[0, 2] == -1
    triangle = np.array([[0, 1, 1], [1, 0, -1], [1, -1, 0]])
    al = align_signs(triangle)
    assert not al.consistent and al.conflicts == 1


def test_global_order_rejects_bad_input():
    with pytest.raises(ValueError):
        global_order([sample([0, 1, 2, 3, 4]), sample([0, 1, 2])], zeta=1)
    with pytest.raises(ValueError):
        global_order([sample([0, 1, 2, 3])], zeta=2)
    assert global_order([], zeta=2).consistent


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**32 - 1), st.floats(0, 0.5))
def test_align_signs_recovers_planted_signs(t, seed, extra):
    rng = np.random.default_rng(seed)
    truth = rng.choice([-1, 1], size=t)
    h = np.zeros((t, t), dtype=int)
    for k in range(1, t):
        j = rng.integers(k)  # random spanning tree
        h[j, k] = h[k, j] = truth[j] * truth[k]
    more = np.triu(rng.random((t, t)) < extra, 1)
    outer = np.outer(truth, truth)
    h[more] = outer[more]
    h[more.T] = outer[more.T]
    al = align_signs(h)
    assert al.consistent
    assert np.array_equal(al.signs, truth) or np.array_equal(al.signs, -truth)


def test_vote_symmetry():
    rng = np.random.default_rng(3)
    samples = [sample(rng.choice(20, 6, replace=False), rng.permutation(6) + 1) for _ in range(15)]
    signs = rng.choice([-1, 1], size=15)
    votes, cooc = vote(samples, signs, 20)
    flipped, cooc2 = vote(samples, -signs, 20)
    assert np.array_equal(flipped, -votes) and np.array_equal(cooc, cooc2)
    assert np.array_equal(votes, -votes.T) and np.array_equal(cooc, cooc.T)


def test_sketch_on_complete_graph():
    p = SketchParams(m=5, t=10, zeta=2, max_attempts=10)
    f, info = sparse_sketch(Graph.complete(12), p, seed=0, return_info=True)
    assert info.successes == info.attempts == 10
    assert is_antisymmetric(f)


def test_single_full_sample_reproduces_its_order():
    n = 9
    perm = np.random.default_rng(0).permutation(n)
    inv = np.argsort(perm)
    h = Graph(Graph.path(n).adj[np.ix_(inv, inv)])
    f = sparse_sketch(h, SketchParams(m=n, t=1, zeta=2, max_attempts=1), seed=0)
    assert np.array_equal(f, comparison_from_ranks(recognize_unit_interval(h).ranks))


def test_budget_exhausted():
    g = Graph(sample_graph(Step(0.1, 0.05, 0.1), 60, 0).adjacency)
    h = threshold_square(g, 0.2)
    with pytest.raises(BudgetExhaustedError) as exc:
        sparse_sketch(h, SketchParams(m=20, t=5, zeta=2, max_attempts=30), seed=0)
    assert exc.value.attempts == 30 and exc.value.successes < 5


@pytest.mark.parametrize("seed", range(20))
def test_planted_sketch_accuracy(seed):
    h, lat = planted(60, seed)
    f = sparse_sketch(h, desk_default_params(60), seed=seed)
    assert is_antisymmetric(f)
    assert comparison_accuracy(f, lat, gap=0.15) >= 0.95


@pytest.mark.parametrize("seed", range(5))
def test_local_refinement_keeps_far_pairs(seed):
    h, lat = planted(60, seed, sharp=True)
    f = local_refinement(h, sparse_sketch(h, desk_default_params(60), seed=seed))
    assert is_antisymmetric(f)
    assert comparison_accuracy(f, lat, gap=0.15) >= 0.95
    # a second pass keeps the far pairs that already agree
    again = local_refinement(h, f)
    assert comparison_accuracy(again, lat, gap=0.15) >= comparison_accuracy(f, lat, gap=0.15) - 0.01


def test_local_refinement_branches():
    f = local_refinement(Graph.empty(3), np.zeros((3, 3), dtype=np.int8))
    assert f[0, 1] == f[0, 2] == f[1, 2] == -1 and is_antisymmetric(f)
    h = Graph.from_edges(3, [(0, 2)])
    base = np.zeros((3, 3), dtype=np.int8)
    base[2, 1], base[1, 2] = 1, -1
    assert local_refinement(h, base)[0, 1] == 1
    with pytest.raises(ValueError):
        local_refinement(h, np.zeros((2, 2)))


def test_comparison_to_order_examples():
    ident = np.arange(1, 6)
    assert list(comparison_to_order(comparison_from_ranks(ident))) == [1, 2, 3, 4, 5]
    assert list(comparison_to_order(np.zeros((4, 4), dtype=np.int8))) == [1, 2, 3, 4]
    cyc = np.zeros((3, 3), dtype=np.int8)
    for u, v in ((0, 1), (1, 2), (2, 0)):
        cyc[u, v], cyc[v, u] = 1, -1
    assert list(comparison_to_order(cyc)) == [1, 2, 3]


@given(st.permutations(list(range(1, 13))))
def test_comparison_round_trip(perm):
    ranks = np.array(perm)
    assert np.array_equal(comparison_to_order(comparison_from_ranks(ranks)), ranks)


def test_main_estimate_complete_and_small():
    ranks = main_estimate(Graph.complete(30), 0.5, SketchParams(m=6, t=20, zeta=2, max_attempts=20))
    assert sorted(ranks) == list(range(1, 31))
    with pytest.raises(ValueError):
        main_estimate(Graph.complete(2), 0.5)


def test_sketch_deterministic_across_workers():
    g = Graph(sample_graph(Step(0.8, 0.1, 0.2), 120, 4).adjacency)
    h = threshold_square(g, 0.1)
    p = desk_default_params(120)
    f1, i1 = sparse_sketch(h, p, seed=9, return_info=True)
    f2, i2 = sparse_sketch(h, p, seed=9, n_jobs=2, return_info=True)
    assert np.array_equal(f1, f2) and i1.attempts == i2.attempts
    assert np.array_equal(i1.votes, i2.votes)
