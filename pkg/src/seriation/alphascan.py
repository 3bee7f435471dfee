"""Choosing the squaring threshold from the observed graph alone.

Each candidate threshold is scored with cheap necessary conditions: how
often random subsamples of the threshold graph are unit interval graphs,
whether few vertex pairs sit close to the threshold, whether every vertex
keeps many threshold neighbours, whether dissimilarity grows steadily, and
whether far-apart vertices exist with no common threshold neighbour.
Passing them is evidence, not proof, that the threshold is usable.
"""
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import common_neighbors, threshold_square
from .rng import stream
from .sketch import desk_default_params, ordered_subsample

GOODNESS_QUANTILES = (0.01, 0.02, 0.05)


@dataclass
class AlphaDiagnostics:
    alpha: float
    pig_success_rate: float
    goodness_pass: bool
    connectivity_pass: bool
    separation_pass: bool
    split_pass: bool
    goodness_pairs: list = field(default_factory=list)  # (delta', measured A)
    min_threshold_degree: int = 0
    separation_ratio: float = 0.0
    split_pairs: int = 0
    split_required: float = 0.0
    n_edges: int = 0
    sharp_boundary_flag: bool = None  # only set once a refine pass has been checked

    def row(self):
        out = asdict(self)
        out["goodness_pairs"] = ";".join(f"{d:.4g}:{a:.4g}" for d, a in self.goodness_pairs)
        return out


def pig_success_rate(h, m, trials, seed, tag=0):
    """Fraction of random ``m``-subsets on which ``h`` is a connected unit interval graph."""
    if trials < 1:
        raise ValueError("trials must be positive")
    ok = sum(ordered_subsample(h, m, stream(seed, "alpha-scan", tag, k)) is not None
             for k in range(trials))
    return ok / trials


def goodness(a2, alpha, max_a):
    """Measured ``A`` at data-driven ``delta'`` values; passes if all are ``<= max_a``."""
    n = a2.shape[0]
    off = ~np.eye(n, dtype=bool)
    dist = np.abs(a2 / (n - 2) - alpha)
    pairs = []
    for q in GOODNESS_QUANTILES:
        dp = float(np.quantile(dist[off], q))
        if dp <= 0:
            continue
        count = int(np.max(np.sum((dist <= dp) & off, axis=1)))
        pairs.append((dp, count / (dp * n)))
    return all(a <= max_a for _, a in pairs), pairs


def separation_ratio(a2, alpha, lag, vertices):
    """Median over ``vertices`` of ``min_i (s[i + lag] - s[i]) / lag`` for sorted ``s_v``."""
    n = a2.shape[0]
    tau = alpha * (n - 2)
    above = a2 > tau
    below = a2 < tau
    ratios = []
    for v in vertices:
        s = (above[v] & below).sum(axis=1) + (below[v] & above).sum(axis=1)
        s = np.sort(s)
        ratios.append(float(np.min(s[lag:] - s[:-lag]) / lag))
    return float(np.median(ratios))


def scan_alpha(g, candidates, trials=50, m=None, seed=0, eps=0.05, max_a=20.0,
               min_separation=0.05, sep_vertices=20):
    """One :class:`AlphaDiagnostics` per candidate threshold."""
    candidates = [float(a) for a in candidates]
    if not candidates:
        raise ValueError("candidate grid is empty")
    n = g.n
    if n < 3:
        raise ValueError("need at least 3 vertices")
    if m is None:
        m = desk_default_params(n).m
    if not 1 <= m <= n:
        raise ValueError("m must lie in [1, n]")
    a2 = common_neighbors(g)
    np.fill_diagonal(a2, 0)
    lag = max(1, n // 10)
    picks = stream(seed, "alpha-scan-vertices").choice(n, size=min(sep_vertices, n), replace=False)
    out = []
    for idx, alpha in enumerate(candidates):
        h = threshold_square(g, alpha)
        rate = pig_success_rate(h, m, trials, seed, idx)
        good, pairs = goodness(a2, alpha, max_a)
        degree = int(h.adj.sum(axis=1).min())
        sep = separation_ratio(a2, alpha, lag, picks)
        hh = common_neighbors(h)
        split = int(np.triu(hh == 0, 1).sum())
        required = eps ** 2 * n ** 2 / 2
        out.append(AlphaDiagnostics(
            alpha=alpha,
            pig_success_rate=rate,
            goodness_pass=good,
            connectivity_pass=degree > eps * n,
            separation_pass=sep >= min_separation,
            split_pass=split >= required,
            goodness_pairs=pairs,
            min_threshold_degree=degree,
            separation_ratio=sep,
            split_pairs=split,
            split_required=required,
            n_edges=h.n_edges,
        ))
    return out


def pick_alpha(diags, min_rate=0.5):
    """Best subsample success rate among candidates passing connectivity and split.

    Candidates below ``min_rate`` are ignored; ties go to the smaller
    threshold.  Returns ``None`` when nothing qualifies.
    """
    ok = [d for d in diags if d.connectivity_pass and d.split_pass and d.pig_success_rate >= min_rate]
    if not ok:
        return None
    return min(ok, key=lambda d: (-d.pig_success_rate, d.alpha)).alpha


def sharp_boundary_witness(f2):
    """Largest number of vertices ``k`` with ``F(i, k) = F(k, j) = 1`` over pairs with ``F(i, j) = -1``."""
    f2 = np.asarray(f2)
    up = (f2 == 1).astype(np.float64)
    paths = np.rint(up @ up).astype(np.int64)
    flagged = f2 == -1
    return int(paths[flagged].max()) if flagged.any() else 0


def diagnose_sharp_boundary(f2, d2, n, slack=4.0):
    """True when the cyclic disagreement in ``f2`` is at most ``slack * d2 * n``."""
    return sharp_boundary_witness(f2) <= slack * d2 * n
