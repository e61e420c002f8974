"""Point-queue flow network simulator.

Scenarios are loaded from JSON files; trajectories come back as NumPy arrays of
shape (samples, links).
"""

import json as _json

from ._flownet import (
    CertificateError,
    ConvergenceError,
    ParseError,
    Scenario,
    Solution,
    StructuralError,
    ValidationError,
    apply_pi,
    build_weighted_norm,
    check_solution,
    closed_form_single_cell,
    equilibrium_outflow,
    fixed_point_psi,
    load_scenario,
    oracle_solve,
    parse_scenario,
    solve,
)
from ._flownet import solve_report_json as _solve_report_json


def solve_report(scenario, solution):
    """Certificates, window sizing and Picard statistics as a dict."""
    return _json.loads(_solve_report_json(scenario, solution))


def verify(scenario, solution=None, eps_factor=50.0):
    """Solve if needed and return (ok, checks) with slack eps_factor * h."""
    if solution is None:
        solution = solve(scenario)
    h = float(solution.t[1] - solution.t[0])
    checks = check_solution(scenario, solution, eps_factor * h)
    return all(c["passed"] for c in checks), checks


__all__ = [
    "CertificateError",
    "ConvergenceError",
    "ParseError",
    "Scenario",
    "Solution",
    "StructuralError",
    "ValidationError",
    "apply_pi",
    "build_weighted_norm",
    "check_solution",
    "closed_form_single_cell",
    "equilibrium_outflow",
    "fixed_point_psi",
    "load_scenario",
    "oracle_solve",
    "parse_scenario",
    "solve",
    "solve_report",
    "verify",
]
