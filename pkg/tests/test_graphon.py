import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from seriation.graphon import (
    Constant,
    GraphonError,
    Profile,
    Step,
    UnsupportedVariantWarning,
    Warped,
    check_assumptions,
    evaluate,
    graphon_from_dict,
    oracle_threshold_graph,
    sample_graph,
    square_closed_form_step,
    square_eval,
)
from seriation.interval import is_robinsonian_under
from seriation.graph import Graph
from seriation.metrics import induced_order


def scipy_square(spec, x, y):
    # independent oracle: adaptive quadrature with the discontinuities as hints
    pts = [p for p in (x - 0.2, x + 0.2, y - 0.2, y + 0.2) if 0 < p < 1]
    val, _ = integrate.quad(lambda u: spec(x, u) * spec(u, y), 0, 1, points=pts or None,
                            limit=200, epsabs=1e-12)
    return val


def test_evaluate_examples():
    assert evaluate(Constant(0.3), 0.2, 0.9) == pytest.approx(0.3)
    assert evaluate(Step(0.8, 0.1, 0.2), 0.1, 0.25) == pytest.approx(0.8)
    assert evaluate(Step(0.8, 0.1, 0.2), 0.1, 0.35) == pytest.approx(0.1)


def test_evaluate_domain():
    with pytest.raises(ValueError):
        evaluate(Constant(0.3), 1.2, 0.5)
    with pytest.raises(ValueError):
        evaluate(Constant(0.3), 0.5, -0.1)


def test_step_boundary_is_open_on_the_band():
    s = Step(0.8, 0.1, 0.25)
    assert s(0.0, 0.25) == pytest.approx(0.1)
    assert s(0.0, 0.2499) == pytest.approx(0.8)


@pytest.mark.parametrize("bad", [(0.1, 0.8, 0.2), (0.8, 0.1, 0.0), (0.8, 0.1, 1.0), (1.2, 0.1, 0.2)])
def test_step_rejects_bad_parameters(bad):
    with pytest.raises(GraphonError):
        Step(*bad)


def test_profile_and_warped_validation():
    with pytest.raises(GraphonError):
        Profile((0.0, 0.5, 1.0), (0.2, 0.5, 0.1))
    with pytest.raises(GraphonError):
        Warped(Constant(0.5), (0.0, 0.6, 0.5, 1.0), (0.0, 0.2, 0.3, 1.0))


@given(st.floats(0, 1), st.floats(0, 1))
def test_evaluate_symmetric(x, y):
    for spec in (Step(0.8, 0.1, 0.2), Profile((0.0, 0.3, 1.0), (0.9, 0.2, 0.0)),
                 Warped(Step(0.7, 0.0, 0.3), (0.0, 0.5, 1.0), (0.0, 0.2, 1.0))):
        assert spec(x, y) == spec(y, x)


def test_square_constant():
    assert square_eval(Constant(0.6), 0.1, 0.7) == pytest.approx(0.36, abs=1e-12)


def test_square_requires_enough_points():
    with pytest.raises(ValueError):
        square_eval(Constant(0.6), 0.1, 0.7, quad_points=10)


def test_square_step_values():
    assert square_eval(Step(1 / 3, 1 / 6, 0.3), 0.0, 0.0) == pytest.approx(0.0527777778, abs=1e-9)
    assert square_eval(Step(0.8, 0.1, 0.2), 0.0, 0.5) == pytest.approx(0.052, abs=1e-9)
    assert square_closed_form_step(1 / 3, 1 / 6, 0.3, 0.0, 0.6) == pytest.approx(0.0527777778, abs=1e-9)
    assert square_closed_form_step(0.8, 0.1, 0.2, 0.0, 0.0) == pytest.approx(0.136, abs=1e-12)


def test_square_closed_form_equal_probabilities():
    xs = np.linspace(0, 1, 11)
    vals = square_closed_form_step(0.4, 0.4, 0.3, xs[:, None], xs[None, :])
    assert np.allclose(vals, 0.16, atol=1e-12)


def test_square_closed_form_rejects_bad_parameters():
    with pytest.raises(GraphonError):
        square_closed_form_step(0.1, 0.5, 0.2, 0.1, 0.2)


@pytest.mark.parametrize("x,y", [(0.0, 0.0), (0.0, 0.5), (0.13, 0.41), (0.3, 0.7), (0.95, 0.99), (0.5, 0.5)])
def test_square_matches_independent_quadrature(x, y):
    spec = Step(0.8, 0.1, 0.2)
    assert square_eval(spec, x, y) == pytest.approx(scipy_square(spec, x, y), abs=1e-8)
    assert square_closed_form_step(0.8, 0.1, 0.2, x, y) == pytest.approx(scipy_square(spec, x, y), abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_square_symmetric(x, y):
    spec = Profile((0.0, 0.25, 0.6, 1.0), (1.0, 0.5, 0.1, 0.05))
    assert square_eval(spec, x, y) == pytest.approx(square_eval(spec, y, x), abs=1e-12)


def test_profile_square_matches_scipy():
    spec = Profile((0.0, 0.25, 0.6, 1.0), (1.0, 0.5, 0.1, 0.05))
    for x, y in [(0.1, 0.2), (0.0, 1.0), (0.4, 0.45)]:
        ref, _ = integrate.quad(lambda u: spec(x, u) * spec(u, y), 0, 1, limit=400, epsabs=1e-12)
        assert square_eval(spec, x, y) == pytest.approx(ref, abs=1e-7)


def test_sample_examples():
    assert Graph(sample_graph(Constant(1.0), 5, 0).adjacency) == Graph.complete(5)
    assert Graph(sample_graph(Constant(0.0), 5, 0).adjacency) == Graph.empty(5)
    s = sample_graph(Step(0.8, 0.0, 0.2), 300, 3)
    u, v = np.nonzero(s.adjacency)
    assert np.all(np.abs(s.latents[u] - s.latents[v]) < 0.2)


def test_sample_deterministic():
    a = sample_graph(Step(0.8, 0.1, 0.2), 80, 11)
    b = sample_graph(Step(0.8, 0.1, 0.2), 80, 11)
    c = sample_graph(Step(0.8, 0.1, 0.2), 80, 12)
    assert np.array_equal(a.adjacency, b.adjacency) and np.array_equal(a.latents, b.latents)
    assert not np.array_equal(a.latents, c.latents)


def test_sample_edge_density():
    c, n = 0.3, 2000
    s = sample_graph(Constant(c), n, 5)
    pairs = n * (n - 1) / 2
    density = s.adjacency.sum() / 2 / pairs
    assert abs(density - c) < 3 * math.sqrt(c * (1 - c) / pairs)


def test_sharp_step_samples_are_robinsonian():
    s = sample_graph(Step(1.0, 0.0, 0.15), 200, 8)
    assert is_robinsonian_under(Graph(s.adjacency), induced_order(s.latents))


def test_oracle_threshold_graph_examples():
    g = oracle_threshold_graph(Step(0.8, 0.1, 0.2), np.array([0.1, 0.15, 0.9]), 0.1)
    assert Graph(g.adjacency).edges() == [(0, 1)]
    lat = np.linspace(0, 1, 6)
    assert not oracle_threshold_graph(Constant(0.5), lat, 0.3).adjacency.any()
    assert Graph(oracle_threshold_graph(Constant(0.5), lat, 0.2).adjacency) == Graph.complete(6)


def test_check_assumptions_examples():
    bad = check_assumptions(Step(1 / 3, 1 / 6, 0.3), 0.055)
    assert not bad.alpha_feasible
    good = check_assumptions(Step(0.8, 0.1, 0.2), 0.1)
    assert good.alpha_feasible and good.alpha_in_window
    assert good.alpha_lower == pytest.approx(0.136, abs=1e-6)
    assert good.alpha_upper == pytest.approx(0.066, abs=1e-6)
    sharp = check_assumptions(Step(0.8, 0.0, 0.2), 0.1)
    assert sharp.sharp_B == pytest.approx(0.4, abs=0.01)
    assert 0 < sharp.sharp_delta < 0.8


def test_check_assumptions_warped_warns():
    spec = Warped(Step(0.8, 0.1, 0.2), (0.0, 0.5, 1.0), (0.0, 0.4, 1.0))
    with pytest.warns(UnsupportedVariantWarning):
        report = check_assumptions(spec, 0.1, grid_points=61)
    assert report.sharp_B is None
    assert np.isfinite(report.alpha_lower) and np.isfinite(report.alpha_upper)


def test_graphon_dict_round_trip_and_strictness():
    for spec in (Constant(0.2), Step(0.8, 0.1, 0.2), Profile((0.0, 1.0), (0.5, 0.1)),
                 Warped(Step(0.8, 0.0, 0.2), (0.0, 0.5, 1.0), (0.0, 0.3, 1.0))):
        assert graphon_from_dict(spec.to_dict()) == spec
    with pytest.raises(GraphonError):
        graphon_from_dict({"variant": "step", "p": 0.8, "q": 0.1, "d": 0.2, "extra": 1})
    with pytest.raises(GraphonError):
        graphon_from_dict({"variant": "nope"})
