"""Coarse seriation from the threshold-square graph.

The pipeline is: square and threshold the observed graph, order many small
random subgraphs with the unit interval recognizer, align those orders so
they all point the same way, merge them by pairwise voting, and finally
sharpen the vote with one pass of neighbourhood-difference counting.

Comparisons are ``int8`` matrices with ``F[u, v] = 1`` meaning ``u`` is
placed before ``v``; they are antisymmetric with a zero diagonal.
"""
from collections import deque
from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np
from scipy import sparse

from .graph import Graph, induced_subgraph, threshold_square
from .interval import recognize_unit_interval
from .rng import stream


class BudgetExhaustedError(RuntimeError):
    """Too few subsamples were unit interval graphs within the attempt cap."""

    def __init__(self, successes, required, attempts):
        super().__init__(
            f"only {successes} of {required} subsamples succeeded in {attempts} attempts; "
            "the threshold alpha is probably unsuitable"
        )
        self.successes = successes
        self.required = required
        self.attempts = attempts


class InconsistentAlignmentWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SketchParams:
    m: int
    t: int
    zeta: int
    max_attempts: int
    alpha: float = None
    seed: int = 0
    asymptotic: bool = False

    def __post_init__(self):
        if self.m < 3:
            raise ValueError("m must be at least 3")
        if self.t < 1:
            raise ValueError("t must be at least 1")
        if not 1 <= self.zeta < self.m / 2:
            raise ValueError("zeta must satisfy 1 <= zeta < m/2")
        if self.max_attempts < self.t:
            raise ValueError("max_attempts must be at least t")

    def validate_for(self, n):
        if self.m > n:
            raise ValueError(f"subsample size m={self.m} exceeds n={n}")

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def _clamp_zeta(zeta, m):
    return max(1, min(int(zeta), (m - 1) // 2))


def paper_default_params(n):
    """``m = ln(n)^5``, ``t = (n ln n)^2``, ``zeta = 4 ln(n)^4``, clamped to ``n``.

    These are asymptotic choices; for any realistic ``n`` the subsample
    covers the whole graph and ``t`` is astronomically large.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    log = math.log(n)
    m = min(max(round(log ** 5), 3), n)
    t = max(1, round((n * log) ** 2))
    zeta = _clamp_zeta(round(4 * log ** 4), m)
    return SketchParams(m=m, t=t, zeta=zeta, max_attempts=20 * t, asymptotic=True)


def desk_default_params(n):
    """Parameters that keep every pair co-sampled about ``ln n`` times.

    ``m`` stays small (about ``ln(n)^2 / 2``) because a subsample is only
    usable when none of the noisy threshold edges inside it break the
    interval structure, and that gets unlikely quickly as ``m`` grows.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    log = math.log(n)
    m = min(max(12, round(log ** 2 / 2)), n)
    t = max(1, math.ceil((n / m) ** 2 * log))
    zeta = _clamp_zeta(max(2, round(m / 8)), m)
    return SketchParams(m=m, t=t, zeta=zeta, max_attempts=20 * t)


@dataclass(frozen=True)
class SketchSample:
    vertices: np.ndarray  # original vertex ids
    ranks: np.ndarray  # 1-based interval-order rank of each entry of ``vertices``

    @property
    def m(self):
        return self.vertices.size

    def ordered(self):
        """Vertices listed by increasing rank."""
        return self.vertices[np.argsort(self.ranks)]


def ordered_subsample(h, m, rng):
    """Draw ``m`` vertices uniformly and try to order ``h`` restricted to them.

    Returns ``None`` when the induced subgraph is disconnected or not a unit
    interval graph.
    """
    if not 1 <= m <= h.n:
        raise ValueError("m must lie in [1, n]")
    vertices = rng.choice(h.n, size=m, replace=False, shuffle=True)
    sub, index_map = induced_subgraph(h, vertices)
    result = recognize_unit_interval(sub)
    if not result.ok:
        return None
    return SketchSample(index_map, result.ranks)


@dataclass
class Alignment:
    signs: np.ndarray
    consistent: bool
    conflicts: int = 0
    constraints: np.ndarray = None


def window_membership(samples, zeta, n):
    """Sparse ``(t, n)`` indicator matrices of the low-rank and high-rank windows."""
    rows_lo, cols_lo, rows_hi, cols_hi = [], [], [], []
    for j, s in enumerate(samples):
        lo = s.vertices[s.ranks < zeta]
        hi = s.vertices[s.ranks > s.m - zeta]
        rows_lo.append(np.full(lo.size, j))
        cols_lo.append(lo)
        rows_hi.append(np.full(hi.size, j))
        cols_hi.append(hi)
    shape = (len(samples), n)

    def build(rows, cols):
        r = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        c = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        return sparse.csr_matrix((np.ones(r.size, dtype=np.int32), (r, c)), shape=shape)

    return build(rows_lo, cols_lo), build(rows_hi, cols_hi)


def pairwise_alignment(samples, zeta, n=None):
    """Sparse matrix ``H``: +1 if two samples share an end, -1 if they share opposite ends.

    A shared same-side vertex takes precedence over an opposite-side one.
    """
    if n is None:
        n = 1 + max(int(s.vertices.max()) for s in samples)
    lo, hi = window_membership(samples, zeta, n)
    same = (lo @ lo.T + hi @ hi.T).tocsr()
    cross = (lo @ hi.T + hi @ lo.T).tocsr()
    same.data[:] = 1
    cross.data[:] = 1
    # entries in both get 1 - 1 + 1 = 1, cross-only get -1
    h = (2 * same - cross + same.multiply(cross)).tocsr()
    h.setdiag(0)
    h.eliminate_zeros()
    h.data = np.sign(h.data).astype(np.int8)
    return h


def align_signs(h):
    """Two-colour the nonzero entries of ``h`` so that ``h[j, k] = a[j] a[k]``.

    Breadth-first from the lowest unassigned index, roots get +1 and the
    first assignment of every sample wins.  Constraints that disagree with
    an existing assignment are counted, not repaired.  ``h`` may be dense
    or a scipy sparse matrix.
    """
    h = sparse.csr_matrix(h)
    t = h.shape[0]
    indptr, indices, data = h.indptr, h.indices, h.data
    signs = np.zeros(t, dtype=np.int8)
    conflicts = 0
    for root in range(t):
        if signs[root]:
            continue
        signs[root] = 1
        queue = deque([root])
        while queue:
            j = queue.popleft()
            for k, hjk in zip(indices[indptr[j]:indptr[j + 1]], data[indptr[j]:indptr[j + 1]]):
                if k == j or hjk == 0:
                    continue
                want = signs[j] * hjk
                if signs[k] == 0:
                    signs[k] = want
                    queue.append(k)
                elif signs[k] != want and k > j:
                    conflicts += 1
    return Alignment(signs, conflicts == 0, conflicts, h)


def global_order(samples, zeta, n=None):
    """Alignment signs for a list of ordered subsamples of common size."""
    if not samples:
        return Alignment(np.zeros(0, dtype=np.int8), True)
    m = samples[0].m
    if any(s.m != m for s in samples):
        raise ValueError("all samples must have the same size")
    if not zeta < m / 2:
        raise ValueError("zeta must be smaller than m/2")
    return align_signs(pairwise_alignment(samples, zeta, n))


def _run_attempts(adj, m, seed, start, stop):
    h = Graph(adj)
    out = []
    for a in range(start, stop):
        out.append(ordered_subsample(h, m, stream(seed, "subsample", a)))
    return out


def _collect_samples(h, params, seed, n_jobs):
    samples = []
    attempts = 0
    if n_jobs == 1:
        while len(samples) < params.t and attempts < params.max_attempts:
            s = ordered_subsample(h, params.m, stream(seed, "subsample", attempts))
            attempts += 1
            if s is not None:
                samples.append(s)
        return samples, attempts

    from joblib import Parallel, delayed

    chunk = max(8, params.t // (4 * n_jobs))
    with Parallel(n_jobs=n_jobs) as pool:
        while len(samples) < params.t and attempts < params.max_attempts:
            bounds = []
            for _ in range(n_jobs):
                lo = attempts + len(bounds) * chunk
                hi = min(lo + chunk, params.max_attempts)
                if lo < hi:
                    bounds.append((lo, hi))
            batches = pool(delayed(_run_attempts)(h.adj, params.m, seed, lo, hi) for lo, hi in bounds)
            for batch in batches:
                for s in batch:
                    attempts += 1
                    if s is not None:
                        samples.append(s)
                        if len(samples) == params.t:
                            return samples, attempts
    return samples, attempts


@dataclass
class SketchInfo:
    attempts: int
    successes: int
    alignment: Alignment
    votes: np.ndarray
    cooccurrence: np.ndarray = field(repr=False, default=None)

    @property
    def success_rate(self):
        return self.successes / self.attempts if self.attempts else 0.0


def vote(samples, signs, n):
    """Vote totals ``C[u, v]``: +1 for each aligned sample ranking ``u`` below ``v``."""
    votes = np.zeros((n, n), dtype=np.int32)
    cooc = np.zeros((n, n), dtype=np.int32)
    tri = {}
    for s, a in zip(samples, signs):
        order = s.ordered()
        if a < 0:
            order = order[::-1]
        m = order.size
        if m not in tri:
            idx = np.arange(m)
            tri[m] = np.sign(idx[None, :] - idx[:, None]).astype(np.int32)
        ix = np.ix_(order, order)
        votes[ix] += tri[m]
        cooc[ix] += 1
    np.fill_diagonal(cooc, 0)
    return votes, cooc


def sparse_sketch(h, params, seed=None, n_jobs=1, return_info=False):
    """Comparison from aligned, voted interval orders of random subsamples.

    Raises :class:`BudgetExhaustedError` when fewer than ``params.t``
    subsamples succeed within ``params.max_attempts`` attempts.
    """
    params.validate_for(h.n)
    seed = params.seed if seed is None else seed
    samples, attempts = _collect_samples(h, params, seed, n_jobs)
    if len(samples) < params.t:
        raise BudgetExhaustedError(len(samples), params.t, attempts)
    alignment = global_order(samples, params.zeta, h.n)
    if not alignment.consistent:
        warnings.warn(
            f"sample alignment has {alignment.conflicts} contradicting constraints",
            InconsistentAlignmentWarning,
            stacklevel=2,
        )
    votes, cooc = vote(samples, alignment.signs, h.n)
    f = np.sign(votes).astype(np.int8)
    if return_info:
        return f, SketchInfo(attempts, len(samples), alignment, votes, cooc)
    return f


def local_refinement(h, f):
    """One pass of neighbourhood-difference voting on top of ``f``.

    ``D[u, v]`` sums ``F(x, v)`` over ``x`` adjacent to ``u`` but not to
    ``v``; the pair is then decided by whichever of ``D[u, v]``, ``D[v, u]``
    is larger in magnitude (ties go to ``D[v, u]``).
    """
    f = np.asarray(f)
    if f.shape != (h.n, h.n):
        raise ValueError("comparison size does not match the graph")
    a = h.adj.astype(np.float64)
    ff = f.astype(np.float64)
    # D[u, v] = sum_x A[u, x] (1 - A[v, x]) F[x, v]
    d = np.rint(a @ ff - a @ (a * ff)).astype(np.int64)
    dt = d.T
    first = np.abs(d) > np.abs(dt)
    out = np.where(first, np.where(d > 0, 1, -1), np.where(dt < 0, 1, -1)).astype(np.int8)
    # decided on u < v, extended by antisymmetry
    upper = np.triu(out, 1)
    return (upper - upper.T).astype(np.int8)


def comparison_to_order(f):
    """Ranks from the scores ``gamma(i) = sum_j F(i, j)``.

    The vertex preceding the most others gets rank 1; equal scores are
    ordered by vertex index.  ``comparison_to_order(F_sigma) == sigma``.
    """
    f = np.asarray(f)
    gamma = f.sum(axis=1, dtype=np.int64)
    n = gamma.size
    order = np.lexsort((np.arange(n), -gamma))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return ranks


def main_estimate(g, alpha, params=None, seed=None, n_jobs=1, return_info=False):
    """Full coarse pipeline: threshold-square, sketch, local refinement, ranks."""
    if g.n < 3:
        raise ValueError("main_estimate needs at least 3 vertices")
    if params is None:
        params = desk_default_params(g.n)
    h = threshold_square(g, alpha)
    f, info = sparse_sketch(h, params, seed=seed, n_jobs=n_jobs, return_info=True)
    refined = local_refinement(h, f)
    ranks = comparison_to_order(refined)
    if return_info:
        return ranks, info
    return ranks
