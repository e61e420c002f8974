#pragma once

#include "flownet/solver.hpp"

namespace flownet {

// Reference integrator that never touches the reflection operators: explicit Euler
// on a refined grid, with boundary outflows resolved from the complementarity system.
struct OracleConfig {
    int refine = 10;                 // h_o = h / refine
    double active_threshold = 1e-9;  // x_i <= this counts as an empty link
    double tol = 1e-14;
    int max_iterations = 100000;
};

struct BoundaryOutflow {
    Vector z;
    int iterations = 0;
    bool monotone = true;  // every iterate was <= its predecessor
};

// z_i = zeta_i off the active set; on it, the limit of z <- min(zeta, lambda + R^T z)
// started from z = zeta. Throws ConvergenceError at the cap.
[[nodiscard]] BoundaryOutflow resolve_boundary_outflow(const Eigen::Ref<const Vector>& x,
                                                       const Eigen::Ref<const Vector>& zeta,
                                                       const Eigen::Ref<const Vector>& lambda,
                                                       const RoutingSpec& routing, const OracleConfig& cfg = {});

struct OracleResult {
    Trajectory x;
    Trajectory z;
    Trajectory zeta;
    Trajectory w;  // int (zeta - z), for the shared invariant checks
    int max_resolve_iterations = 0;
    double projection_loss = 0.0;  // largest mass removed by [.]_+ in one step
};

// x_{k+1} = [x_k + h_o (lambda_k - (I - R^T) z_k)]_+ with lambda_k the cell average.
[[nodiscard]] OracleResult oracle_solve(const Scenario& s, const OracleConfig& cfg = {});

// Every `factor`-th sample, for comparing fine oracle paths with the solver grid.
[[nodiscard]] Trajectory subsample(const Trajectory& fine, int factor);

struct SingleCellState {
    double x = 0.0;
    double z = 0.0;
};

// Exact solution for one cell with R = 0, constant cap and constant inflow.
[[nodiscard]] SingleCellState closed_form_single_cell(double cap, double lambda, double x0, double t);

}  // namespace flownet
