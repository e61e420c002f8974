#include "flownet/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flownet/errors.hpp"

namespace flownet {

Trajectory apply_pi(const Trajectory& gamma, const Trajectory& v, const RoutingSpec& routing) {
    require_same_shape(gamma, v);
    if (v.values.cols() != routing.R.rows()) throw StructuralError("trajectory dimension does not match R");

    // Row k of v * R is (R^T v(t_k))^T.
    Trajectory out{gamma.grid, (v.values * routing.R - gamma.values).cwiseMax(0.0)};
    auto& m = out.values;
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        for (Eigen::Index k = 1; k < m.rows(); ++k) m(k, i) = std::max(m(k, i), m(k - 1, i));
    }
    return out;
}

int default_iteration_cap(double tol, double contraction) {
    if (contraction <= 0.0) return 100;
    return 10 * static_cast<int>(std::ceil(std::log(tol) / std::log(contraction))) + 100;
}

PsiResult fixed_point_psi(const Trajectory& gamma, const RoutingSpec& routing, const WeightedNorm& norm, double tol,
                          std::optional<int> max_iterations) {
    if (!(tol > 0.0)) throw StructuralError("fixed_point_psi: tolerance must be positive");
    const double rho = norm.contraction_factor;
    if (!(rho < 1.0)) throw CertificateError("fixed_point_psi: contraction factor is not below one");

    const int cap = max_iterations.value_or(default_iteration_cap(tol, rho));
    const double stop = tol * (1.0 - rho) / std::max(rho, std::numeric_limits<double>::epsilon());

    Trajectory v = Trajectory::zeros(gamma.grid, gamma.dim());
    double step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cap; ++it) {
        Trajectory next = apply_pi(gamma, v, routing);
        step = traj_distance(next, v, norm);
        v = std::move(next);
        if (step <= stop) return PsiResult{std::move(v), it, rho * step};
    }
    throw ConvergenceError("fixed_point_psi: no convergence within " + std::to_string(cap) + " iterations", step,
                           cap);
}

Reflected reflect(const Trajectory& y, const RoutingSpec& routing, const WeightedNorm& norm, double tol) {
    PsiResult psi = fixed_point_psi(y, routing, norm, tol);
    // Row form of (I - R^T) w(t_k): w^T - w^T R.
    Trajectory x{y.grid, y.values + psi.w.values - psi.w.values * routing.R};
    return Reflected{std::move(x), std::move(psi)};
}

Trajectory apply_phi(const Trajectory& y, const RoutingSpec& routing, const WeightedNorm& norm, double tol) {
    return reflect(y, routing, norm, tol).x;
}

}  // namespace flownet
