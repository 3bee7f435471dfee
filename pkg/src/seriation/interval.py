"""Unit interval graph recognition with three LexBFS sweeps.

A graph is a unit (proper) interval graph iff some vertex order makes every
row of the adjacency matrix, with ones on the diagonal, a contiguous block
around the diagonal.  Such an order is called an interval order here.

``recognize_unit_interval`` runs LexBFS, then two LexBFS+ sweeps (ties go to
the vertex visited last by the previous sweep), and finally checks the
third sweep explicitly, so a wrong answer can only ever be a rejection.
"""
from dataclasses import dataclass
from enum import Enum
import itertools

import numpy as np


class IntervalStatus(Enum):
    UNIT_INTERVAL = "unit-interval"
    NOT_UNIT_INTERVAL = "not-unit-interval"
    DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class IntervalOrderResult:
    status: IntervalStatus
    ranks: np.ndarray = None  # 1-based rank of each vertex, only for UNIT_INTERVAL

    @property
    def ok(self):
        return self.status is IntervalStatus.UNIT_INTERVAL


def _lexbfs(adj_rows, priority):
    classes = [list(priority)]
    touched = [False] * len(adj_rows)
    order = []
    connected = True
    while classes:
        head = classes[0]
        v = head.pop(0)
        if not head:
            classes.pop(0)
        if order and not touched[v]:
            connected = False
        order.append(v)
        row = adj_rows[v]
        refined = []
        for cls in classes:
            inside = [x for x in cls if row[x]]
            if inside:
                for x in inside:
                    touched[x] = True
                refined.append(inside)
                if len(inside) < len(cls):
                    refined.append([x for x in cls if not row[x]])
            else:
                refined.append(cls)
        classes = refined
    return order, connected


def lexbfs(g, priority=None):
    """Lexicographic BFS visit order.

    Among vertices with the lexicographically largest label, the one listed
    first in ``priority`` (default: increasing index) is visited next.
    """
    n = g.n
    if n == 0:
        raise ValueError("lexbfs needs a nonempty graph")
    priority = list(range(n)) if priority is None else [int(v) for v in priority]
    if sorted(priority) != list(range(n)):
        raise ValueError("priority must be a permutation of the vertices")
    rows = g.adj.tolist()
    return _lexbfs(rows, priority)[0]


def ranks_from_order(order):
    order = np.asarray(order, dtype=np.int64)
    ranks = np.empty(order.size, dtype=np.int64)
    ranks[order] = np.arange(1, order.size + 1)
    return ranks


def is_robinsonian_under(g, ranks):
    """True iff, with a unit diagonal, every permuted row is one contiguous block."""
    ranks = np.asarray(ranks)
    if ranks.shape != (g.n,):
        raise ValueError("ordering size does not match the graph")
    if sorted(ranks.tolist()) != list(range(1, g.n + 1)):
        raise ValueError("ranks must be a bijection onto 1..n")
    order = np.argsort(ranks)
    a = g.adj[np.ix_(order, order)].copy()
    np.fill_diagonal(a, True)
    first = np.argmax(a, axis=1)
    last = g.n - 1 - np.argmax(a[:, ::-1], axis=1)
    return bool(np.all(last - first + 1 == a.sum(axis=1)))


def _sort_twins(order, adj):
    """Order runs of consecutive true twins by vertex index."""
    closed = adj.copy()
    np.fill_diagonal(closed, True)
    out = []
    run = [order[0]]
    for v in order[1:]:
        if np.array_equal(closed[v], closed[run[-1]]):
            run.append(v)
        else:
            out.extend(sorted(run))
            run = [v]
    out.extend(sorted(run))
    return out


def recognize_unit_interval(g):
    """Classify ``g`` and, for connected unit interval graphs, order it."""
    if g.n == 0:
        raise ValueError("empty graph")
    rows = g.adj.tolist()
    sweep, connected = _lexbfs(rows, range(g.n))
    if not connected:
        return IntervalOrderResult(IntervalStatus.DISCONNECTED)
    for _ in range(2):
        sweep, _ = _lexbfs(rows, sweep[::-1])
    order = _sort_twins(sweep, g.adj)
    ranks = ranks_from_order(order)
    if not is_robinsonian_under(g, ranks):
        return IntervalOrderResult(IntervalStatus.NOT_UNIT_INTERVAL)
    return IntervalOrderResult(IntervalStatus.UNIT_INTERVAL, ranks)


def brute_force_interval_order(g):
    """Exhaustive search for an interval order (``n <= 9``); ``None`` if none exists.

    Orders are built left to right.  Appending ``v`` keeps the prefix valid
    iff the earlier neighbours of ``v`` form a suffix of the prefix that is
    a clique, so invalid branches are cut as soon as they appear.
    """
    n = g.n
    if n > 9:
        raise ValueError("brute force search is limited to n <= 9")
    if n == 0:
        return None
    adj = g.adj.tolist()

    def extend(prefix, remaining):
        if not remaining:
            return prefix
        for v in sorted(remaining):
            k = len(prefix)
            start = k
            while start > 0 and adj[prefix[start - 1]][v]:
                start -= 1
            if any(adj[prefix[i]][v] for i in range(start)):
                continue
            block = prefix[start:]
            if any(not adj[a][b] for a, b in itertools.combinations(block, 2)):
                continue
            found = extend(prefix + [v], remaining - {v})
            if found is not None:
                return found
        return None

    order = extend([], frozenset(range(n)))
    return None if order is None else ranks_from_order(order)
