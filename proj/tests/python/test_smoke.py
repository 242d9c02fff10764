import math
import os

import numpy as np
import pytest

import abreu

FIXTURES = os.environ.get(
    "ABREU_FIXTURES", os.path.join(os.path.dirname(__file__), "..", "fixtures")
)


def test_square_product_solution():
    u = abreu.guillemin_potential(abreu.square(), 33)
    assert u.max_abreu_residual(abreu.ScalarField.constant(4.0)) < 1e-10
    c = u.curvature(np.array([0.25, 0.5]))
    # u_11 = 1 / (x (1 - x))
    assert c["hessian"][0, 0] == pytest.approx(1 / (0.25 * 0.75))
    assert c["abreu"] == pytest.approx(-4.0)


def test_canonical_weights_balance():
    p = abreu.canonical_weights([np.array(v, float) for v in [(0, 0), (1, 0), (1.2, 0.8), (0.3, 1.1)]])
    assert sum(p.weights) == pytest.approx(p.area())
    assert np.max(np.abs(abreu.balance_residual(p, abreu.ScalarField.constant(1.0)))) < 1e-12
    assert abreu.unique_affine_A(abreu.square()).coeffs[0] == pytest.approx(4.0)


def test_fixture_probe_positive():
    p = abreu.load_polygon(os.path.join(FIXTURES, "hexagon.json"))
    r = abreu.stability_probe(p, abreu.ScalarField.constant(1.0), 100, 7)
    assert r["all_positive"] and r["min_L"] > 0


def test_invalid_polygon_raises():
    with pytest.raises(ValueError):
        abreu.WeightedPolygon([np.array(v, float) for v in [(0, 0), (0, 1), (1, 0)]], [1, 1, 1])


def test_flat_model_checks():
    q = abreu.quarter_plane_model(16.0, 65)
    k = abreu.lemma14_ratio(q, np.array([2.0, 2.0]), 1.0, 1.0)
    assert k["passed"]
    assert k["ratio"] == pytest.approx(0.25 / math.log(3.0) ** 2, rel=1e-12)
    assert abreu.v_statistic(q, np.array([1.0, 1.0]), np.array([1.5, 1.0])) == pytest.approx(math.log(1.5))
    with pytest.raises(ValueError):
        abreu.lemma18_check(math.exp, lambda t: 1.0, 3.0, 1.0)


def test_solver_from_python():
    A = abreu.ScalarField.affine(3.95, 0.1, 0.0)
    p = abreu.balance_weights(abreu.square(), A)
    r = abreu.solve(abreu.guillemin_potential(p, 17), A)
    assert r["converged"]
    assert r["max_residual_modulo_affine"] < 1e-6


def test_volume_growth():
    vols, exponent = abreu.volume_growth(abreu.quarter_plane_model(8.0, 129), [1.0, 2.0, 4.0])
    assert vols[0] == pytest.approx(2 * math.pi**2)
    assert exponent == pytest.approx(4.0, abs=0.1)
