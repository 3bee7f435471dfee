"""Graphon models, their squares, and random graph sampling.

Four model families are supported:

* :class:`Constant` -- ``w(x, y) = c``.
* :class:`Step` -- ``p`` inside a band ``|x - y| < d`` and ``q`` outside.
* :class:`Profile` -- ``w(x, y) = f(|x - y|)`` for a nonincreasing
  piecewise-linear link function ``f`` given as a table.
* :class:`Warped` -- ``w(F(x), F(y))`` for a base model and a monotone
  piecewise-linear map ``F`` of ``[0, 1]`` onto itself (non-uniform latent
  positions).

Every model exposes ``model(x, y)`` (vectorised) and ``row_breaks(x)``, the
points where ``model(x, .)`` is not smooth.  The quadrature for the squared
graphon splits the integration range at those points so that piecewise
polynomial integrands are integrated exactly.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math
import warnings

import numpy as np

from .rng import stream


class GraphonError(ValueError):
    """Invalid graphon parameters."""


class UnsupportedVariantWarning(UserWarning):
    """A diagnostic is only partially available for this graphon family."""


def _check_unit(name, value):
    arr = np.asarray(value, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return arr


class _Uniform:
    """Mixin for uniformly embedded models ``w(x, y) = f(|x - y|)``."""

    def link(self, z):
        raise NotImplementedError

    def link_breaks(self):
        """Distances at which the link function has a kink or jump."""
        return ()

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.link(np.abs(x - y))

    def row_breaks(self, x):
        b = np.asarray(self.link_breaks(), dtype=float)
        return np.concatenate([[x], x - b, x + b])

    def plateau_distance(self):
        """Smallest ``d`` with ``f`` constant on ``[d, 1]``."""
        raise NotImplementedError

    def support_radius(self):
        """``sup{z : f(z) > 0}``, or ``inf`` when ``f`` never vanishes."""
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(_Uniform):
    c: float

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise GraphonError(f"Constant requires 0 <= c <= 1, got {self.c}")

    def link(self, z):
        return np.full(np.shape(z), float(self.c))

    def plateau_distance(self):
        return 0.0

    def support_radius(self):
        return math.inf if self.c > 0 else 0.0

    @property
    def tag(self):
        return f"constant(c={self.c:g})"

    def to_dict(self):
        return {"variant": "constant", "c": self.c}


@dataclass(frozen=True)
class Step(_Uniform):
    """``p`` when ``|x - y| < d``, ``q`` when ``|x - y| >= d``."""

    p: float
    q: float
    d: float

    def __post_init__(self):
        if not (0.0 <= self.q <= self.p <= 1.0):
            raise GraphonError(f"Step requires 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        if not (0.0 < self.d < 1.0):
            raise GraphonError(f"Step requires 0 < d < 1, got d={self.d}")

    def link(self, z):
        return np.where(np.asarray(z) < self.d, float(self.p), float(self.q))

    def link_breaks(self):
        return (self.d,)

    def row_breaks(self, x):
        return np.array([x - self.d, x + self.d])

    def plateau_distance(self):
        return self.d if self.p > self.q else 0.0

    def support_radius(self):
        if self.q > 0:
            return math.inf
        return self.d if self.p > 0 else 0.0

    @property
    def tag(self):
        return f"step(p={self.p:g},q={self.q:g},d={self.d:g})"

    def to_dict(self):
        return {"variant": "step", "p": self.p, "q": self.q, "d": self.d}


@dataclass(frozen=True)
class Profile(_Uniform):
    """Piecewise-linear link function through ``(distances[k], values[k])``.

    ``distances`` must start at 0, end at 1 and increase strictly;
    ``values`` must be nonincreasing probabilities.
    """

    distances: tuple
    values: tuple

    def __post_init__(self):
        dist = np.asarray(self.distances, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "distances", tuple(float(v) for v in dist))
        object.__setattr__(self, "values", tuple(float(v) for v in vals))
        if dist.ndim != 1 or dist.shape != vals.shape or dist.size < 2:
            raise GraphonError("Profile needs matching 1-d tables with at least two knots")
        if dist[0] != 0.0 or dist[-1] != 1.0 or np.any(np.diff(dist) <= 0):
            raise GraphonError("Profile distances must increase strictly from 0 to 1")
        if np.any(vals < 0) or np.any(vals > 1) or np.any(np.diff(vals) > 0):
            raise GraphonError("Profile values must be nonincreasing probabilities")

    def link(self, z):
        return np.interp(z, self.distances, self.values)

    def link_breaks(self):
        return self.distances[1:-1]

    def plateau_distance(self):
        vals = self.values
        k = len(vals) - 1
        while k > 0 and vals[k - 1] == vals[-1]:
            k -= 1
        return self.distances[k]

    def support_radius(self):
        if self.values[-1] > 0:
            return math.inf
        k = 0
        while self.values[k] > 0:
            k += 1
        return self.distances[k]

    @property
    def tag(self):
        pts = ";".join(f"{d:g}:{v:g}" for d, v in zip(self.distances, self.values))
        return f"profile({pts})"

    def to_dict(self):
        return {"variant": "profile", "distances": list(self.distances), "values": list(self.values)}


@dataclass(frozen=True)
class Warped:
    """``w(x, y) = base(F(x), F(y))`` with ``F`` interpolating ``(cdf_x, cdf_y)``."""

    base: object
    cdf_x: tuple
    cdf_y: tuple

    def __post_init__(self):
        kx = np.asarray(self.cdf_x, dtype=float)
        ky = np.asarray(self.cdf_y, dtype=float)
        object.__setattr__(self, "cdf_x", tuple(float(v) for v in kx))
        object.__setattr__(self, "cdf_y", tuple(float(v) for v in ky))
        if kx.ndim != 1 or kx.shape != ky.shape or kx.size < 2:
            raise GraphonError("Warped needs matching 1-d cdf tables with at least two knots")
        for k in (kx, ky):
            if k[0] != 0.0 or k[-1] != 1.0 or np.any(np.diff(k) <= 0):
                raise GraphonError("Warped cdf must be strictly increasing with F(0)=0, F(1)=1")

    def cdf(self, x):
        return np.interp(x, self.cdf_x, self.cdf_y)

    def inverse_cdf(self, y):
        return np.interp(y, self.cdf_y, self.cdf_x)

    def __call__(self, x, y):
        return self.base(self.cdf(x), self.cdf(y))

    def row_breaks(self, x):
        inner = np.clip(self.base.row_breaks(float(self.cdf(x))), 0.0, 1.0)
        return np.concatenate([self.inverse_cdf(inner), self.cdf_x])

    @property
    def tag(self):
        return f"warped({self.base.tag})"

    def to_dict(self):
        return {
            "variant": "warped",
            "base": self.base.to_dict(),
            "cdf_x": list(self.cdf_x),
            "cdf_y": list(self.cdf_y),
        }


_VARIANT_KEYS = {
    "constant": {"variant", "c"},
    "step": {"variant", "p", "q", "d"},
    "profile": {"variant", "distances", "values"},
    "warped": {"variant", "base", "cdf_x", "cdf_y"},
}


def graphon_from_dict(data):
    """Build a graphon from its ``to_dict`` form.  Unknown keys are rejected."""
    if not isinstance(data, dict) or "variant" not in data:
        raise GraphonError("graphon config must be an object with a 'variant' key")
    variant = data["variant"]
    if variant not in _VARIANT_KEYS:
        raise GraphonError(f"unknown graphon variant {variant!r}")
    extra = set(data) - _VARIANT_KEYS[variant]
    missing = _VARIANT_KEYS[variant] - set(data)
    if extra or missing:
        raise GraphonError(f"graphon {variant!r}: unknown keys {sorted(extra)}, missing keys {sorted(missing)}")
    try:
        if variant == "constant":
            return Constant(float(data["c"]))
        if variant == "step":
            return Step(float(data["p"]), float(data["q"]), float(data["d"]))
        if variant == "profile":
            return Profile(tuple(data["distances"]), tuple(data["values"]))
        return Warped(graphon_from_dict(data["base"]), tuple(data["cdf_x"]), tuple(data["cdf_y"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GraphonError):
            raise
        raise GraphonError(str(exc)) from exc


def evaluate(spec, x, y):
    """``w(x, y)`` with domain checking."""
    _check_unit("x", x)
    _check_unit("y", y)
    return spec(x, y)


@lru_cache(maxsize=None)
def _gauss_legendre(k):
    return np.polynomial.legendre.leggauss(k)


def _quadrature_nodes(breaks, quad_points):
    """Gauss-Legendre nodes on each piece between consecutive breakpoints."""
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        width = b - a
        if width <= 1e-15:
            continue
        k = max(2, math.ceil(quad_points * width))
        t, wt = _gauss_legendre(k)
        nodes.append(a + 0.5 * width * (t + 1.0))
        weights.append(0.5 * width * wt)
    return np.concatenate(nodes), np.concatenate(weights)


def square_eval(spec, x, y, quad_points=256):
    """Numerical ``w2(x, y) = int_0^1 w(x, u) w(u, y) du``.

    The integration range is cut at every breakpoint of ``w(x, .)`` and
    ``w(., y)``; on each piece the integrand is a polynomial of degree at
    most two for the built-in families, which Gauss-Legendre integrates
    exactly.
    """
    if quad_points < 64:
        raise ValueError("quad_points must be at least 64")
    x = float(_check_unit("x", x))
    y = float(_check_unit("y", y))
    cuts = np.concatenate([[0.0, 1.0], spec.row_breaks(x), spec.row_breaks(y)])
    breaks = np.unique(np.clip(cuts, 0.0, 1.0))
    u, wt = _quadrature_nodes(breaks, quad_points)
    return float(np.sum(spec(x, u) * spec(u, y) * wt))


def _check_step(p, q, d):
    if not (0.0 <= q <= p <= 1.0) or not (0.0 < d < 1.0):
        raise GraphonError(f"invalid step parameters p={p}, q={q}, d={d}")


def _band_length(x, d):
    return np.minimum(x + d, 1.0) - np.maximum(x - d, 0.0)


def square_closed_form_step(p, q, d, x, y):
    """Exact ``w2`` of the step graphon (vectorised over ``x``, ``y``).

    Writing ``w(x, u) = q + (p - q) 1[u in I_x]`` with band
    ``I_x = (x - d, x + d) & [0, 1]`` gives

        w2(x, y) = q^2 + q (p - q) (|I_x| + |I_y|) + (p - q)^2 |I_x & I_y|.
    """
    _check_step(p, q, d)
    x = _check_unit("x", x)
    y = _check_unit("y", y)
    lo = np.maximum(np.maximum(x, y) - d, 0.0)
    hi = np.minimum(np.minimum(x, y) + d, 1.0)
    overlap = np.maximum(hi - lo, 0.0)
    val = q * q + q * (p - q) * (_band_length(x, d) + _band_length(y, d)) + (p - q) ** 2 * overlap
    return float(val) if np.ndim(val) == 0 else val


def square_matrix(spec, xs, quad_points=256):
    """``w2`` on all pairs of the points ``xs`` (symmetric matrix)."""
    xs = np.asarray(xs, dtype=float)
    if isinstance(spec, Step):
        return square_closed_form_step(spec.p, spec.q, spec.d, xs[:, None], xs[None, :])
    n = xs.size
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            out[i, j] = out[j, i] = square_eval(spec, xs[i], xs[j], quad_points)
    return out


@dataclass(frozen=True)
class SampledGraph:
    """A graph drawn from a graphon, with its hidden latent positions.

    ``latents`` exist only so that experiments can score an ordering; no
    seriation routine accepts them.
    """

    adjacency: np.ndarray
    latents: np.ndarray = None
    seed: int = 0

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if np.any(adj != adj.T) or np.any(np.diag(adj)):
            raise ValueError("adjacency must be symmetric with empty diagonal")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        if self.latents is not None:
            lat = np.array(self.latents, dtype=float)
            if lat.shape != (adj.shape[0],):
                raise ValueError("latents must have one entry per vertex")
            _check_unit("latents", lat)
            lat.setflags(write=False)
            object.__setattr__(self, "latents", lat)

    @property
    def n(self):
        return self.adjacency.shape[0]


def sample_graph(spec, n, seed=0):
    """Draw ``G ~ w`` on ``n`` vertices.

    Latents come from stream ``(seed, "latents")``; the coins for row ``i``
    (pairs ``(i, j)``, ``j > i``) come from stream ``(seed, "edges", i)``,
    so rows can be generated in any order or in parallel.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    latents = stream(seed, "latents").random(n)
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        coins = stream(seed, "edges", i).random(n - i - 1)
        adj[i, i + 1:] = coins < spec(latents[i], latents[i + 1:])
    adj |= adj.T
    return SampledGraph(adj, latents, seed)


def oracle_threshold_graph(spec, latents, alpha, quad_points=256):
    """Graph with an edge wherever ``w2(U_i, U_j) >= alpha`` (test oracle)."""
    lat = _check_unit("latents", latents)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    w2 = square_matrix(spec, lat, quad_points)
    adj = w2 >= alpha
    np.fill_diagonal(adj, False)
    return SampledGraph(adj, lat)


@dataclass
class AssumptionReport:
    alpha_lower: float
    alpha_upper: float
    alpha: float
    sharp_delta: float = None
    sharp_B: float = None
    connect_eps: float = None
    goodness_A: float = None
    goodness_delta: float = None
    split_eps: float = None
    sep_eps: float = None
    notes: list = field(default_factory=list)

    @property
    def alpha_feasible(self):
        return self.alpha_lower > self.alpha_upper

    @property
    def alpha_in_window(self):
        return self.alpha_lower > self.alpha > self.alpha_upper


def _sharp_constants(spec, grid):
    radius = spec.support_radius()
    vals = spec.link(np.linspace(0.0, 1.0, 2001))
    positive = vals[vals > 0]
    delta = float(positive.min()) / 2 if positive.size else None
    if math.isinf(radius):
        return delta, 0.0
    x = grid[:, None]
    y = grid[None, :]
    lo = np.maximum(np.maximum(x, y) - radius, 0.0)
    hi = np.minimum(np.minimum(x, y) + radius, 1.0)
    overlap = np.maximum(hi - lo, 0.0)
    symdiff = _band_length(x, radius) + _band_length(y, radius) - 2 * overlap
    gap = np.abs(x - y)
    mask = gap > 0
    return delta, float(np.min(symdiff[mask] / gap[mask]))


def _threshold_diagnostics(w2, grid, alpha, report):
    step = grid[1] - grid[0]
    gap = np.abs(grid[:, None] - grid[None, :])

    # largest eps with w2 > alpha on every pair closer than eps
    below = gap[w2 <= alpha]
    report.connect_eps = float(below.min() - step) if below.size else 1.0
    report.connect_eps = max(report.connect_eps, 0.0)

    report.goodness_delta = 0.05
    ratios = []
    for dp in np.linspace(0.005, 0.05, 10):
        vol = np.max(np.sum(np.abs(alpha - w2) <= dp, axis=1)) * step
        ratios.append(vol / dp)
    report.goodness_A = float(max(ratios))

    wa = (w2 >= alpha).astype(float)
    common = (wa @ wa) > 0
    report.split_eps = float(1.0 - gap[common].max())

    diff = wa @ (1 - wa) + (1 - wa) @ wa
    mask = gap > 0
    report.sep_eps = float(np.min(diff[mask] * step / gap[mask]))


def check_assumptions(spec, alpha, quad_points=256, grid_points=201):
    """Numerically evaluate the sufficient conditions for seriation.

    ``alpha_lower`` is ``inf_{s in [0, d]} w2(0, s)`` and ``alpha_upper`` is
    ``w2((1 - d')/2, (1 + d')/2)`` with ``d' = min(0.5, 2d)``; a threshold
    strictly between them exists iff ``alpha_feasible``.  The remaining
    fields are witnesses found on a ``grid_points`` grid, not certified
    bounds.  Warped models are not uniformly embedded: the bounds are then
    the minimum of ``w2`` over pairs closer than the base band and the
    maximum over pairs further apart than ``d'``, and the sharp-boundary
    constants are left unset.
    """
    grid = np.linspace(0.0, 1.0, grid_points)
    if isinstance(spec, Warped):
        warnings.warn("warped graphons: assumption bounds computed by quadrature on a grid",
                      UnsupportedVariantWarning, stacklevel=2)
        base = spec.base
        while isinstance(base, Warped):
            base = base.base
        d = base.plateau_distance()
        d_prime = min(0.5, 2 * d)
        w2 = square_matrix(spec, grid, quad_points)
        gap = np.abs(grid[:, None] - grid[None, :])
        lower = float(w2[gap <= d].min())
        upper = float(w2[gap >= d_prime - 1e-12].max()) if np.any(gap >= d_prime - 1e-12) else lower
        report = AssumptionReport(lower, upper, alpha)
        report.notes.append("warped: sharp-boundary constants not computed")
        _threshold_diagnostics(w2, grid, alpha, report)
        return report

    d = spec.plateau_distance()
    d_prime = min(0.5, 2 * d)
    s_grid = np.linspace(0.0, d, 201) if d > 0 else np.array([0.0])
    lower = min(square_eval(spec, 0.0, s, quad_points) for s in s_grid)
    upper = square_eval(spec, (1 - d_prime) / 2, (1 + d_prime) / 2, quad_points)
    report = AssumptionReport(float(lower), float(upper), alpha)
    report.sharp_delta, report.sharp_B = _sharp_constants(spec, grid)
    _threshold_diagnostics(square_matrix(spec, grid, quad_points), grid, alpha, report)
    return report
