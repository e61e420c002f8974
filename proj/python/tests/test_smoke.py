import json
from pathlib import Path

import numpy as np
import pytest

import flownet

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


@pytest.fixture(scope="module")
def two_junction():
    return flownet.load_scenario(SCENARIOS / "example_2_1.scenario")


def test_single_cell_drains_linearly():
    s = flownet.load_scenario(SCENARIOS / "single_cell.scenario")
    sol = flownet.solve(s)
    assert sol.x.shape == (len(sol.t), 1)
    np.testing.assert_allclose(sol.x[:, 0], np.maximum(1.0 - sol.t, 0.0), atol=1e-9)
    np.testing.assert_allclose(sol.w[:, 0], np.maximum(sol.t - 1.0, 0.0), atol=1e-9)


def test_two_junction_verifies(two_junction):
    sol = flownet.solve(two_junction)
    ok, checks = flownet.verify(two_junction, sol)
    assert ok, [c for c in checks if not c["passed"]]
    assert sol.x.min() >= -1e-9
    report = flownet.solve_report(two_junction, sol)
    assert report["certificates"]["rho"] < 1.0


def test_equilibrium_and_norm(two_junction):
    a = flownet.equilibrium_outflow(two_junction)
    R = two_junction.routing
    assert np.all(a >= 0)
    # a solves (I - R^T) a = lambda; lambda_e1 = 0.10 in this scenario.
    lam = a - R.T @ a
    assert lam[two_junction.links.index("e1")] == pytest.approx(0.10)
    weights, rho = flownet.build_weighted_norm(two_junction)
    assert np.all(weights > 0) and 0.0 <= rho < 1.0
    assert np.all(R.T @ weights <= rho * weights + 1e-12)


def test_oracle_agrees_with_solver():
    s = flownet.load_scenario(SCENARIOS / "two_cell_chain.scenario")
    sol = flownet.solve(s)
    ref = flownet.oracle_solve(s, refine=10)
    h = sol.t[1] - sol.t[0]
    assert np.abs(sol.x - ref["x_coarse"]).max() <= 5 * (h + h / 10)


def test_reflection_operators():
    s = flownet.load_scenario(SCENARIOS / "single_cell.scenario")
    t = flownet.solve(s).t
    gamma = (1.0 - 2.0 * t)[:, None]
    w, iterations = flownet.fixed_point_psi(s, gamma)
    np.testing.assert_allclose(w[:, 0], np.maximum.accumulate(np.maximum(-gamma[:, 0], 0.0)))
    assert iterations == 1
    pi = flownet.apply_pi(s, gamma, np.zeros_like(gamma))
    np.testing.assert_allclose(pi, w)


def test_round_trip_and_errors(two_junction):
    again = flownet.parse_scenario(two_junction.to_json())
    assert again.links == two_junction.links
    np.testing.assert_array_equal(again.routing, two_junction.routing)
    doc = json.loads(two_junction.to_json())
    doc["routing"][0]["to"] = "ghost"
    with pytest.raises(flownet.ValidationError, match="ghost"):
        flownet.parse_scenario(json.dumps(doc))
    with pytest.raises(ValueError):
        flownet.parse_scenario("{ nope")
    with pytest.raises(ValueError):
        flownet.solve(two_junction, initial_guess=np.zeros((3, 3)))


def test_closed_form():
    assert flownet.closed_form_single_cell(1.0, 0.0, 1.0, 0.5) == pytest.approx((0.5, 1.0))
    assert flownet.closed_form_single_cell(1.0, 0.0, 1.0, 2.0) == (0.0, 0.0)
