"""scikit-learn style wrappers.

Both estimators take a square 0/1 adjacency matrix in ``fit`` and expose
``ranking_`` (1-based rank of every vertex) and ``order_`` (vertices by
increasing rank).  ``transform`` returns the adjacency matrix permuted
into that order.
"""
import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .graph import Graph
from .experiment import sketch_params_for
from .refine import iterative_estimate
from .rng import resolve_seed
from .sketch import main_estimate


def check_adjacency_array(X):
    """Validate a square 0/1 matrix (dense or scipy sparse); returns a dense array."""
    if sparse.issparse(X):
        X = X.toarray()
    X = check_array(X, dtype=None, ensure_min_samples=3, ensure_min_features=3)
    if X.shape[0] != X.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {X.shape}")
    if not np.all((X == 0) | (X == 1)):
        raise ValueError("adjacency must contain only 0 and 1")
    return X


def check_adjacency(X):
    """Validate ``X`` as a simple undirected graph and wrap it in a :class:`Graph`."""
    return Graph(check_adjacency_array(X).astype(bool))


class _SeriationBase(TransformerMixin, BaseEstimator):
    def _finish(self, g, ranks):
        self.ranking_ = np.asarray(ranks, dtype=np.int64)
        self.order_ = np.argsort(self.ranking_)
        self.n_features_in_ = g.n
        return self

    def transform(self, X):
        check_is_fitted(self, "ranking_")
        X = check_adjacency_array(X)
        if X.shape[0] != self.n_features_in_:
            raise ValueError(f"fitted on {self.n_features_in_} vertices, got {X.shape[0]}")
        return X[np.ix_(self.order_, self.order_)]


class SketchSeriation(_SeriationBase):
    """Coarse ordering by aligned voting over interval-ordered subsamples.

    Parameters left as ``None`` take the desk-scale defaults for the graph
    size (or the asymptotic formulas with ``paper_params=True``).
    """

    def __init__(self, alpha=0.1, m=None, t=None, zeta=None, max_attempts=None,
                 paper_params=False, random_state=None, n_jobs=1):
        self.alpha = alpha
        self.m = m
        self.t = t
        self.zeta = zeta
        self.max_attempts = max_attempts
        self.paper_params = paper_params
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = check_adjacency(X)
        overrides = {k: v for k, v in (("m", self.m), ("t", self.t), ("zeta", self.zeta),
                                         ("max_attempts", self.max_attempts)) if v is not None}
        params = sketch_params_for(g.n, overrides, asymptotic=self.paper_params)
        ranks = main_estimate(g, self.alpha, params, seed=resolve_seed(self.random_state),
                              n_jobs=self.n_jobs)
        return self._finish(g, ranks)


class IterativeSeriation(_SeriationBase):
    """Coarse ordering of a random subset, refined in stages to the full graph.

    ``initial`` is either ``None`` (run the coarse pipeline on the subset),
    a callable ``(subgraph, vertices, seed) -> ranks``, or a rank array
    over all vertices.
    """

    def __init__(self, alpha=0.1, epsilon=0.45, initial=None, paper_params=False,
                 abstain=True, random_state=None, n_jobs=1):
        self.alpha = alpha
        self.epsilon = epsilon
        self.initial = initial
        self.paper_params = paper_params
        self.abstain = abstain
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        g = check_adjacency(X)
        ranks = iterative_estimate(
            g, self.alpha, self.epsilon, initial=self.initial,
            seed=resolve_seed(self.random_state),
            rule="asymptotic" if self.paper_params else "desk",
            abstain=self.abstain, n_jobs=self.n_jobs,
        )
        return self._finish(g, ranks)
