"""Scoring orderings against the hidden latent positions.

Orderings are arrays of 1-based ranks, ``ranks[v]`` being the position of
vertex ``v``.  An ordering and its total reversal are equally correct, so
every score here is taken under the better of the two alignments.
"""
from dataclasses import dataclass

import numpy as np


def check_ranks(ranks, n=None):
    """Validate a rank vector and return it as an ``int64`` array."""
    ranks = np.asarray(ranks)
    if ranks.ndim != 1:
        raise ValueError("ranks must be one-dimensional")
    if n is not None and ranks.size != n:
        raise ValueError(f"expected {n} ranks, got {ranks.size}")
    if not np.issubdtype(ranks.dtype, np.integer):
        if np.any(ranks != np.round(ranks)):
            raise ValueError("ranks must be integers")
    ranks = ranks.astype(np.int64)
    if not np.array_equal(np.sort(ranks), np.arange(1, ranks.size + 1)):
        raise ValueError("ranks must be a permutation of 1..n")
    return ranks


def induced_order(latents):
    """Ranks by increasing latent value; equal latents keep index order."""
    latents = np.asarray(latents, dtype=float)
    order = np.argsort(latents, kind="stable")
    ranks = np.empty(latents.size, dtype=np.int64)
    ranks[order] = np.arange(1, latents.size + 1)
    return ranks


def reverse_ranks(ranks):
    ranks = np.asarray(ranks)
    return ranks.size + 1 - ranks


def comparison_from_ranks(ranks):
    """``F[u, v] = 1`` if ``u`` precedes ``v``, ``-1`` if it follows, 0 on the diagonal."""
    ranks = np.asarray(ranks)
    return np.sign(ranks[None, :] - ranks[:, None]).astype(np.int8)


@dataclass(frozen=True)
class ErrorReport:
    error_D: int
    misordered_pairs: int
    chosen_correct: str  # "forward" or "reverse"


def _max_misordered_gap(ranks, correct):
    # pairs with correct[i] > correct[j] but ranks[i] < ranks[j]
    order = np.argsort(correct)
    r = ranks[order]
    # r[a] for a < b compared with r[b]; a misordered pair has r[a] > r[b]
    bad = r[:, None] > r[None, :]
    bad = np.triu(bad, 1)
    if not bad.any():
        return 0, 0
    a, b = np.nonzero(bad)
    return int((b - a).max()), int(bad.sum())


def ordering_error(ranks, latents):
    """Smallest ``D`` for which ``ranks`` has error less than ``D``.

    For a correct ordering ``c`` (forward or reversed latent order) this is
    ``max{c(i) - c(j) : c(i) > c(j), ranks(i) < ranks(j)}``, and the report
    keeps the better of the two candidates.
    """
    latents = np.asarray(latents, dtype=float)
    ranks = check_ranks(ranks, latents.size)
    forward = induced_order(latents)
    results = []
    for name, correct in (("forward", forward), ("reverse", reverse_ranks(forward))):
        err, count = _max_misordered_gap(ranks, correct)
        results.append((err, count, name))
    err, count, name = min(results, key=lambda r: (r[0], r[1]))
    return ErrorReport(err, count, name)


def precision_agreement(ranks, latents, d):
    """Whether ``ranks`` orders every pair at latent distance ``>= d`` correctly.

    Returns ``(agrees, worst_gap)`` where ``worst_gap`` is the largest latent
    distance of a misordered pair under the better alignment.
    """
    latents = np.asarray(latents, dtype=float)
    ranks = check_ranks(ranks, latents.size)
    if not 0.0 <= d <= 1.0:
        raise ValueError("d must lie in [0, 1]")
    gap = np.abs(latents[:, None] - latents[None, :])
    truth = np.sign(latents[None, :] - latents[:, None])
    mine = np.sign(ranks[None, :] - ranks[:, None])
    best = None
    for sign in (1, -1):
        wrong = (sign * mine != truth) & (truth != 0)
        worst = float(gap[wrong].max()) if wrong.any() else 0.0
        agrees = not np.any(wrong & (gap >= d))
        cand = (agrees, worst)
        if best is None or (cand[0], -cand[1]) > (best[0], -best[1]):
            best = cand
    return best


def comparison_accuracy(f, latents, gap=0.0):
    """Fraction of pairs further apart than ``gap`` on which ``f`` is right.

    ``f`` is scored against the latent comparison and against its negation,
    and the larger fraction is returned.
    """
    latents = np.asarray(latents, dtype=float)
    f = np.asarray(f)
    n = latents.size
    if f.shape != (n, n):
        raise ValueError("comparison size does not match latents")
    iu = np.triu_indices(n, 1)
    dist = np.abs(latents[:, None] - latents[None, :])[iu]
    truth = np.sign(latents[None, :] - latents[:, None])[iu]
    mask = (dist > gap) & (truth != 0)
    if not mask.any():
        return 1.0
    got = f[iu][mask]
    want = truth[mask]
    return float(max(np.mean(got == want), np.mean(got == -want)))
