#include "flownet/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "flownet/errors.hpp"

namespace flownet {

BoundaryOutflow resolve_boundary_outflow(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& zeta,
                                         const Eigen::Ref<const Vector>& lambda, const RoutingSpec& routing,
                                         const OracleConfig& cfg) {
    const auto n = x.size();
    BoundaryOutflow out{zeta, 0, true};
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (x(i) <= cfg.active_threshold) active.push_back(i);
    }
    if (active.empty()) return out;

    const Matrix& R = routing.R;
    Vector next = out.z;
    double change = 0.0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        change = 0.0;
        for (auto i : active) {
            const double fed = lambda(i) + R.col(i).dot(out.z);
            next(i) = std::min(zeta(i), fed);
            if (next(i) > out.z(i)) out.monotone = false;
            change = std::max(change, std::abs(next(i) - out.z(i)));
        }
        out.z = next;
        out.iterations = it;
        if (change <= cfg.tol) return out;
    }
    throw ConvergenceError("resolve_boundary_outflow: no convergence; routing may not be sub-stochastic", change,
                           cfg.max_iterations);
}

OracleResult oracle_solve(const Scenario& s, const OracleConfig& cfg) {
    if (!s.controller) throw StructuralError("oracle_solve: scenario has no controller");
    if (cfg.refine < 1) throw StructuralError("oracle_solve: refine must be >= 1");
    const TimeGrid coarse = s.grid();
    const TimeGrid grid{0.0, coarse.h / cfg.refine, coarse.steps * static_cast<std::size_t>(cfg.refine)};
    const auto n = static_cast<std::size_t>(s.link_count());

    OracleResult r{Trajectory::zeros(grid, n), Trajectory::zeros(grid, n), Trajectory::zeros(grid, n),
                   Trajectory::zeros(grid, n), 0, 0.0};
    const Matrix& R = s.routing.R;
    const double h = grid.h;

    Vector x = s.x0;
    Vector zeta(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        const bool last = k == grid.steps;
        // The last sample has no cell ahead of it; use the preceding cell's inflow.
        const double a = last ? grid.time(k - 1) : grid.time(k);
        const Vector lambda = s.inflow.integral(a, a + h) / h;

        zeta.setZero();
        s.controller->evaluate(x, zeta);
        const auto b = resolve_boundary_outflow(x, zeta, lambda, s.routing, cfg);
        r.max_resolve_iterations = std::max(r.max_resolve_iterations, b.iterations);

        r.x.values.row(ki) = x.transpose();
        r.z.values.row(ki) = b.z.transpose();
        r.zeta.values.row(ki) = zeta.transpose();
        if (last) break;

        r.w.values.row(ki + 1) = r.w.values.row(ki) + h * (zeta - b.z).transpose();
        const Vector unprojected = x + h * (lambda - b.z + R.transpose() * b.z);
        x = unprojected.cwiseMax(0.0);
        r.projection_loss = std::max(r.projection_loss, (x - unprojected).maxCoeff());
    }
    return r;
}

Trajectory subsample(const Trajectory& fine, int factor) {
    if (factor < 1 || fine.grid.steps % static_cast<std::size_t>(factor) != 0) {
        throw StructuralError("subsample: factor must divide the step count");
    }
    const std::size_t steps = fine.grid.steps / static_cast<std::size_t>(factor);
    Trajectory out{TimeGrid{fine.grid.t0, fine.grid.h * factor, steps},
                   Matrix(static_cast<Eigen::Index>(steps + 1), fine.values.cols())};
    for (std::size_t k = 0; k <= steps; ++k) {
        out.values.row(static_cast<Eigen::Index>(k)) = fine.values.row(static_cast<Eigen::Index>(k * factor));
    }
    return out;
}

SingleCellState closed_form_single_cell(double cap, double lambda, double x0, double t) {
    if (lambda >= cap) return {x0 + (lambda - cap) * t, cap};
    const double drain = cap - lambda;
    const double x = x0 - drain * t;
    if (x > 0.0) return {x, cap};
    return {0.0, lambda};
}

}  // namespace flownet
