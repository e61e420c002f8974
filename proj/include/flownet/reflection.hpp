#pragma once

#include <optional>

#include "flownet/network.hpp"
#include "flownet/trajectory.hpp"

namespace flownet {

inline constexpr double kDefaultPsiTolerance = 1e-10;

// [Pi_gamma(v)](t_k) = max_{m <= k} [R^T v(t_m) - gamma(t_m)]_+, entry-wise.
// Computed as one matrix product followed by a prefix-max scan per link.
[[nodiscard]] Trajectory apply_pi(const Trajectory& gamma, const Trajectory& v, const RoutingSpec& routing);

struct PsiResult {
    Trajectory w;
    int iterations = 0;
    // Banach a-posteriori bound on traj_norm(w - Pi_gamma(w)).
    double residual = 0.0;
};

// Default cap: 10 * ceil(log(tol) / log(rho)) + 100.
[[nodiscard]] int default_iteration_cap(double tol, double contraction);

// Fixed point of Pi_gamma by Picard iteration from v = 0. The iterates increase
// monotonically to the minimal regulator. Throws ConvergenceError at the cap.
[[nodiscard]] PsiResult fixed_point_psi(const Trajectory& gamma, const RoutingSpec& routing, const WeightedNorm& norm,
                                        double tol = kDefaultPsiTolerance, std::optional<int> max_iterations = {});

struct Reflected {
    Trajectory x;    // y + (I - R^T) w
    PsiResult psi;   // w = Psi(y)
};

[[nodiscard]] Reflected reflect(const Trajectory& y, const RoutingSpec& routing, const WeightedNorm& norm,
                                double tol = kDefaultPsiTolerance);

// x = y + (I - R^T) Psi(y).
[[nodiscard]] Trajectory apply_phi(const Trajectory& y, const RoutingSpec& routing, const WeightedNorm& norm,
                                   double tol = kDefaultPsiTolerance);

}  // namespace flownet
