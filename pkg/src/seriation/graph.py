"""Simple undirected graphs stored as dense boolean adjacency matrices."""
from collections import deque

import numpy as np


class Graph:
    """Immutable simple graph on vertices ``0 .. n-1``."""

    __slots__ = ("adj", "_lists")

    def __init__(self, adjacency):
        adj = np.array(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if np.any(adj != adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(adj)):
            raise ValueError("graph must not contain self loops")
        adj.setflags(write=False)
        self.adj = adj
        self._lists = None

    @classmethod
    def from_edges(cls, n, edges):
        adj = np.zeros((n, n), dtype=bool)
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self loop in edge list")
            adj[edges[:, 0], edges[:, 1]] = True
            adj[edges[:, 1], edges[:, 0]] = True
        return cls(adj)

    @classmethod
    def complete(cls, n):
        adj = np.ones((n, n), dtype=bool)
        np.fill_diagonal(adj, False)
        return cls(adj)

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def path(cls, n):
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @property
    def n(self):
        return self.adj.shape[0]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, Graph) and np.array_equal(self.adj, other.adj)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"

    @property
    def n_edges(self):
        return int(self.adj.sum()) // 2

    def edges(self):
        """Sorted ``(u, v)`` pairs with ``u < v``."""
        u, v = np.nonzero(np.triu(self.adj, 1))
        return list(zip(u.tolist(), v.tolist()))

    def neighbor_lists(self):
        if self._lists is None:
            self._lists = [np.flatnonzero(row).tolist() for row in self.adj]
        return self._lists

    def neighbors(self, u):
        return set(self.neighbor_lists()[u])


def common_neighbors(g):
    """``A @ A``: entry ``(i, j)`` counts common neighbours; diagonal is the degree."""
    a = g.adj.astype(np.float64)
    return np.rint(a @ a).astype(np.int64)


def threshold_square(g, alpha):
    """Graph joining ``u != v`` whose common-neighbour count exceeds ``alpha (n - 2)``."""
    if g.n < 3:
        raise ValueError("threshold_square needs at least 3 vertices")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    adj = common_neighbors(g) > alpha * (g.n - 2)
    np.fill_diagonal(adj, False)
    return Graph(adj)


def induced_subgraph(g, vertices):
    """Restrict ``g`` to ``vertices``; returns the subgraph and its label map.

    Vertex ``k`` of the subgraph is vertex ``index_map[k]`` of ``g``.
    """
    index_map = np.asarray(vertices, dtype=np.int64).ravel()
    if index_map.size == 0:
        raise ValueError("cannot induce a subgraph on an empty vertex set")
    if np.unique(index_map).size != index_map.size:
        raise ValueError("duplicate vertices")
    return Graph(g.adj[np.ix_(index_map, index_map)]), index_map


def is_connected(g):
    if g.n == 0:
        return True
    lists = g.neighbor_lists()
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in lists[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return bool(seen.all())


def neighborhood_difference(g, u, v):
    """``(N(u) - N(v) - {v}, N(v) - N(u) - {u})``."""
    if u == v:
        raise ValueError("u and v must differ")
    nu, nv = g.neighbors(u), g.neighbors(v)
    return nu - nv - {v}, nv - nu - {u}
