"""Staged refinement of a coarse ordering.

A coarse ordering of a random subset ``V1`` is pushed out to a larger
nested subset ``V2`` in two phases.  New vertices are first compared with
each other by how many of their neighbours sit at the extreme ends of the
known ordering.  Every vertex of ``V2`` is then placed by the rank of its
highest and lowest new neighbour.  Repeating this over a schedule of
growing subsets ends with an ordering of the whole graph.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .graph import induced_subgraph
from .interval import ranks_from_order
from .metrics import check_ranks
from .rng import stream
from .sketch import comparison_to_order, desk_default_params, main_estimate, paper_default_params

# Constants of the desk-scale thresholds; they replace the polylog factors.
DESK_C1 = 0.5
DESK_C2 = 2.0
DESK_C3 = 1.0


@dataclass(frozen=True)
class StageThresholds:
    c1: int
    c2: int
    c3: int
    clamped: tuple = ()  # names of thresholds that hit the [1, n] clamp


@dataclass(frozen=True)
class RefineSchedule:
    """Sampling rates, precision levels and per-stage thresholds.

    ``p`` and ``d`` have ``k`` entries; ``thresholds`` has ``k - 1``, one
    per refinement pass from ``V_i`` to ``V_{i+1}``.
    """

    epsilon: float
    n: int
    k: int
    beta: float
    p: tuple
    d: tuple
    thresholds: tuple
    rule: str = "desk"

    @property
    def clamped(self):
        return any(t.clamped for t in self.thresholds)

    @property
    def d_decreasing(self):
        return all(a > b for a, b in zip(self.d, self.d[1:]))


def _clamp(name, value, n, hit):
    if value < 1:
        hit.append(name)
        return 1
    if value > n:
        hit.append(name)
        return n
    return int(value)


def stage_thresholds(p, d, n, rule="desk"):
    """``C1, C2, C3`` for one stage with rate ``p`` and precision ``d``.

    ``rule="asymptotic"`` uses the asymptotic polylog factors
    ``(ln n)^4, (ln n)^6, (ln n)^2``; ``rule="desk"`` replaces them with the
    module constants ``DESK_C1..3``.
    """
    base = p * d * n
    log = math.log(n)
    if rule == "asymptotic":
        raw = (math.ceil(base * log ** 4), math.floor(math.sqrt(base) * log ** 6),
               math.floor(math.sqrt(base) * log ** 2))
    elif rule == "desk":
        raw = (math.ceil(DESK_C1 * base), math.floor(DESK_C2 * math.sqrt(base)),
               math.floor(DESK_C3 * math.sqrt(base)))
    else:
        raise ValueError(f"unknown threshold rule {rule!r}")
    hit = []
    c1, c2, c3 = (_clamp(name, v, n, hit) for name, v in zip(("c1", "c2", "c3"), raw))
    return StageThresholds(c1, c2, c3, tuple(hit))


def build_schedule(epsilon, n, rule="desk"):
    """Stage count, rates, precisions and thresholds for target exponent ``epsilon``.

    >>> s = build_schedule(0.45, 1000)
    >>> s.k, round(s.beta, 10)
    (2, 0.1)
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError("epsilon must lie in (0, 0.5)")
    if n < 3:
        raise ValueError("n must be at least 3")
    k = math.floor(-math.log2(epsilon)) + 1
    beta = (epsilon - 2.0 ** -k) / k
    p = tuple(n ** (-(k - i) * beta) for i in range(1, k + 1))
    d = [n ** (-0.5 * (1 - k * beta))]
    for i in range(k - 1):
        d.append(math.sqrt(d[i] / (p[i] * n)) * math.log(n))
    thresholds = tuple(stage_thresholds(p[i], d[i], n, rule) for i in range(k - 1))
    return RefineSchedule(epsilon, n, k, beta, p, tuple(d), thresholds, rule)


def rank_extremes(s, sigma, c):
    """The ``c`` members of ``s`` with the highest and the lowest ``sigma`` rank.

    ``sigma`` maps vertex ids to ranks (an array indexed by vertex or a
    dict).  Returns ``(R, L)`` as sets.
    """
    s = list(s)
    if c < 1 or c > len(s):
        raise ValueError("c must lie in [1, |s|]")
    ordered = sorted(s, key=lambda v: sigma[v])
    return set(ordered[-c:]), set(ordered[:c])


@dataclass
class RefineInfo:
    new_vertices: np.ndarray
    degenerate: np.ndarray  # vertices of V2 with no neighbour among the new ones
    phase1_decided: int
    phase2_decided: int
    conflicts: int
    phase1: np.ndarray = None  # comparison among the new vertices, ``new_vertices`` order


def _margin(forward, backward, abstain):
    """+1 where ``forward`` fires, -1 where only ``backward`` does; 0 on conflicts if ``abstain``."""
    out = np.where(forward, 1, np.where(backward, -1, 0)).astype(np.int8)
    if abstain:
        out[forward & backward] = 0
    return out


def _extreme_counts(adj_w1, order, c1):
    """Neighbour counts inside the top-``c1`` / bottom-``c1`` sets of every pair.

    ``adj_w1`` is the ``(M, |V1|)`` adjacency between new and old vertices
    with columns in ``order`` (increasing ``sigma1``).  Returns four
    ``(M, M)`` arrays: entry ``[i, j]`` counts neighbours of ``i``
    (``*_self``) or of ``j`` (``*_other``) inside ``R(i, j)`` / ``L(i, j)``.
    """
    a = adj_w1[:, order]
    m = a.shape[0]
    r_self = np.zeros((m, m), dtype=np.int32)
    r_other = np.zeros((m, m), dtype=np.int32)
    l_self = np.zeros((m, m), dtype=np.int32)
    l_other = np.zeros((m, m), dtype=np.int32)
    for i in range(m):
        union = a | a[i]
        low = np.cumsum(union, axis=1) <= c1
        high = np.cumsum(union[:, ::-1], axis=1)[:, ::-1] <= c1
        in_l = union & low
        in_r = union & high
        r_self[i] = (in_r & a[i]).sum(axis=1)
        r_other[i] = (in_r & a).sum(axis=1)
        l_self[i] = (in_l & a[i]).sum(axis=1)
        l_other[i] = (in_l & a).sum(axis=1)
    return r_self, r_other, l_self, l_other


def refine(g, v1, v2, sigma1, c1, c2, c3, abstain=True, return_info=False):
    """Extend the ordering ``sigma1`` of ``v1`` to an ordering of ``v2``.

    ``sigma1`` lists 1-based ranks aligned with ``v1``.  The result is an
    array of ranks aligned with ``np.sort(v2)``.  With ``abstain=False``
    a pair on which both margin tests fire is set to +1 instead of 0.
    """
    v1 = np.asarray(sorted(set(int(v) for v in v1)), dtype=np.int64)
    v2 = np.asarray(sorted(set(int(v) for v in v2)), dtype=np.int64)
    if not set(v1.tolist()) <= set(v2.tolist()):
        raise ValueError("v1 must be a subset of v2")
    if v2.size and (v2[0] < 0 or v2[-1] >= g.n):
        raise ValueError("vertex out of range")
    if min(c1, c2, c3) < 1:
        raise ValueError("thresholds must be positive")
    sigma1 = check_ranks(sigma1, v1.size)
    new = np.setdiff1d(v2, v1)
    if new.size == 0:
        out = sigma1.copy()
        return (out, RefineInfo(new, np.zeros(0, dtype=np.int64), 0, 0, 0)) if return_info else out

    # phase 1: order the new vertices against each other
    adj = g.adj
    order1 = np.argsort(sigma1)
    counts = _extreme_counts(adj[np.ix_(new, v1)], order1, c1)
    r_i, r_j, l_i, l_j = counts
    forward = (r_j > r_i + c2) | (l_i > l_j + c2)
    backward = (r_i > r_j + c2) | (l_j > l_i + c2)
    upper = np.triu(_margin(forward, backward, abstain), 1)
    f1 = upper - upper.T
    conflicts = int(np.triu(forward & backward, 1).sum())
    sigma_new = comparison_to_order(f1)
    phase1_decided = int(np.count_nonzero(upper))

    # phase 2: place every vertex of v2 by its extreme new neighbours
    big_m = new.size
    nb = adj[np.ix_(v2, new)]
    ranked = np.where(nb, sigma_new[None, :], 0)
    top = ranked.max(axis=1)
    bottom = np.where(nb, sigma_new[None, :], big_m + 1).min(axis=1)
    degenerate = ~nb.any(axis=1)
    fwd = (top[None, :] - top[:, None] > c3) | (bottom[None, :] - bottom[:, None] > c3)
    bwd = (top[:, None] - top[None, :] > c3) | (bottom[:, None] - bottom[None, :] > c3)
    f2 = np.triu(_margin(fwd, bwd, abstain), 1)
    f2 = f2 - f2.T
    conflicts += int(np.triu(fwd & bwd, 1).sum())
    f2[degenerate, :] = 0
    f2[:, degenerate] = 0

    # pairs with both ends new keep their phase-1 decision
    pos_new = np.searchsorted(v2, new)
    f2[np.ix_(pos_new, pos_new)] = f1
    ranks = comparison_to_order(f2)
    if return_info:
        phase2 = np.triu(f2, 1)
        phase2[np.ix_(pos_new, pos_new)] = 0
        info = RefineInfo(new, v2[degenerate], phase1_decided,
                          int(np.count_nonzero(phase2)), conflicts, f1)
        return ranks, info
    return ranks


def default_initial(alpha, params=None, asymptotic=False, n_jobs=1):
    """Initial orderer hook running the coarse sketch pipeline on ``G[V1]``.

    Without explicit ``params`` the desk parameters for the subgraph size
    are used, or the asymptotic ones when ``asymptotic`` is set.
    """

    def initial(subgraph, vertices, seed):
        if params is not None:
            p = params
        elif asymptotic:
            p = paper_default_params(subgraph.n)
        else:
            p = desk_default_params(subgraph.n)
        return main_estimate(subgraph, alpha, p, seed=seed, n_jobs=n_jobs)

    return initial


def fixed_initial(ranks):
    """Hook that restricts a known ordering of every vertex to ``V1``."""
    ranks = check_ranks(ranks)

    def initial(subgraph, vertices, seed):
        if vertices.size and vertices.max() >= ranks.size:
            raise ValueError("initial ordering is shorter than the graph")
        return ranks_from_order(np.argsort(ranks[vertices], kind="stable"))

    return initial


@dataclass
class StageState:
    stage: int
    vertices: np.ndarray
    ranks: np.ndarray


@dataclass
class IterativeResult:
    ranks: np.ndarray
    schedule: RefineSchedule
    stages: list = field(default_factory=list)


def stage_marks(n, seed):
    """Shared uniforms ``B_j`` deciding stage membership."""
    return stream(seed, "stage-marks").random(n)


def iterative_estimate(g, alpha, epsilon, initial=None, seed=0, rule="desk",
                       abstain=True, n_jobs=1, return_info=False):
    """Order all of ``g`` by refining an initial ordering of a random subset.

    ``initial(subgraph, vertices, seed)`` must return ranks for the
    subgraph induced on the first-stage ``vertices``.  It may also be a
    rank array over all of ``g``, which is then restricted to those
    vertices.  By default the sketch pipeline with threshold ``alpha`` runs
    on the subgraph.
    """
    if g.n < 3:
        raise ValueError("iterative_estimate needs at least 3 vertices")
    schedule = build_schedule(epsilon, g.n, rule)
    if initial is None:
        initial = default_initial(alpha, asymptotic=rule == "asymptotic", n_jobs=n_jobs)
    elif not callable(initial):
        initial = np.asarray(initial)
        if initial.shape != (g.n,):
            raise ValueError(f"initial ordering has {initial.size} entries, graph has {g.n} vertices")
        initial = fixed_initial(initial)
    marks = stage_marks(g.n, seed)
    sets = [np.flatnonzero(marks <= p) for p in schedule.p]
    sets[-1] = np.arange(g.n)
    for i, s in enumerate(sets):
        if s.size < 3:
            raise ValueError(f"stage {i + 1} has only {s.size} vertices")
    sub, _ = induced_subgraph(g, sets[0])
    ranks = check_ranks(initial(sub, sets[0], seed), sets[0].size)
    stages = [StageState(1, sets[0], ranks)]
    for i, th in enumerate(schedule.thresholds):
        ranks = refine(g, sets[i], sets[i + 1], ranks, th.c1, th.c2, th.c3, abstain=abstain)
        stages.append(StageState(i + 2, sets[i + 1], ranks))
    if return_info:
        return ranks, IterativeResult(ranks, schedule, stages)
    return ranks
