#pragma once

#include <string>
#include <vector>

#include "flownet/solver.hpp"

namespace flownet {

struct InvariantCheck {
    std::string name;
    bool passed = true;
    double worst = 0.0;      // worst observed violation measure
    double threshold = 0.0;  // allowed bound for `worst`
    std::string detail;      // where the worst case happened
};

struct InvariantReport {
    std::vector<InvariantCheck> checks;

    [[nodiscard]] bool ok() const;
    [[nodiscard]] std::size_t violations() const;
};

// Trajectories that any candidate solution must provide for checking.
struct SolutionView {
    const Trajectory& x;
    const Trajectory& z;
    const Trajectory& zeta;
    const Trajectory& w;
};

// Checks the five solution properties with slack eps:
//   nonnegativity       x >= -eps
//   flow bounds         -eps <= z <= zeta(x) + eps
//   complementarity     sum_i x_i (zeta_i - z_i) <= eps (1 + max_i x_i)
//   mass balance        |x(t_k) - x0 - sum_{m<k} (int lambda - h (I - R^T) z_m)| <= eps
//   regulator           w(0) = 0, w non-decreasing, w_i grows only while x_i <= eps
[[nodiscard]] InvariantReport check_solution(const Scenario& s, const SolutionView& sol, double eps);

[[nodiscard]] inline InvariantReport check_solution(const Scenario& s, const Solution& sol, double eps) {
    return check_solution(s, SolutionView{sol.x, sol.z, sol.zeta, sol.w}, eps);
}

}  // namespace flownet
