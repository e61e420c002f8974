#include "flownet/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flownet/errors.hpp"

namespace flownet {

bool InvariantReport::ok() const { return violations() == 0; }

std::size_t InvariantReport::violations() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const InvariantCheck& c) { return !c.passed; }));
}

namespace {

// Regulator increments below this are round-off from the fixed-point tolerances.
constexpr double kIncreaseFloor = 1e-9;

std::string where(const Scenario& s, const TimeGrid& g, Eigen::Index k, Eigen::Index i) {
    std::ostringstream os;
    os << "t=" << g.time(static_cast<std::size_t>(k)) << " link=" << s.routing.graph.links()[static_cast<std::size_t>(i)];
    return os.str();
}

// Records `value` if it is the worst seen so far; worst is "how far past zero".
struct Worst {
    double value = 0.0;
    Eigen::Index k = -1;
    Eigen::Index i = 0;

    void offer(double v, Eigen::Index kk, Eigen::Index ii) {
        if (v > value || k < 0) {
            value = v;
            k = kk;
            i = ii;
        }
    }
};

InvariantCheck finish(const Scenario& s, const TimeGrid& g, std::string name, const Worst& w, double threshold) {
    InvariantCheck c;
    c.name = std::move(name);
    c.worst = std::max(w.value, 0.0);
    c.threshold = threshold;
    c.passed = w.value <= threshold;
    if (w.k >= 0) c.detail = where(s, g, w.k, w.i);
    return c;
}

}  // namespace

InvariantReport check_solution(const Scenario& s, const SolutionView& sol, double eps) {
    require_same_shape(sol.x, sol.z);
    require_same_shape(sol.x, sol.zeta);
    require_same_shape(sol.x, sol.w);
    const auto& g = sol.x.grid;
    const auto& X = sol.x.values;
    const auto& Z = sol.z.values;
    const auto& ZETA = sol.zeta.values;
    const auto& W = sol.w.values;
    const auto rows = X.rows();
    const auto n = X.cols();
    if (n != static_cast<Eigen::Index>(s.link_count())) throw StructuralError("check_solution: dimension mismatch");

    InvariantReport report;

    Worst neg;
    for (Eigen::Index k = 0; k < rows; ++k)
        for (Eigen::Index i = 0; i < n; ++i) neg.offer(-X(k, i), k, i);
    report.checks.push_back(finish(s, g, "nonnegativity", neg, eps));

    Worst bounds;
    for (Eigen::Index k = 0; k < rows; ++k)
        for (Eigen::Index i = 0; i < n; ++i) bounds.offer(std::max(-Z(k, i), Z(k, i) - ZETA(k, i)), k, i);
    report.checks.push_back(finish(s, g, "flow_bounds", bounds, eps));

    // Normalised so the threshold is eps for every sample.
    Worst comp;
    for (Eigen::Index k = 0; k < rows; ++k) {
        const double gap = X.row(k).dot(ZETA.row(k) - Z.row(k));
        const double scale = 1.0 + X.row(k).cwiseAbs().maxCoeff();
        comp.offer(gap / scale, k, 0);
    }
    {
        auto c = finish(s, g, "complementarity", comp, eps);
        if (comp.k >= 0) c.detail = "t=" + std::to_string(g.time(static_cast<std::size_t>(comp.k)));
        report.checks.push_back(std::move(c));
    }

    Worst mass;
    {
        Eigen::RowVectorXd acc = s.x0.transpose();
        for (Eigen::Index k = 0; k < rows; ++k) {
            for (Eigen::Index i = 0; i < n; ++i) mass.offer(std::abs(X(k, i) - acc(i)), k, i);
            if (k + 1 < rows) {
                const Eigen::RowVectorXd zk = Z.row(k);
                acc += s.inflow.integral(g.time(static_cast<std::size_t>(k)), g.time(static_cast<std::size_t>(k + 1)))
                           .transpose() -
                       g.h * (zk - zk * s.routing.R);
            }
        }
    }
    report.checks.push_back(finish(s, g, "mass_balance", mass, eps));

    Worst start;
    for (Eigen::Index i = 0; i < n; ++i) start.offer(std::abs(W(0, i)), 0, i);
    report.checks.push_back(finish(s, g, "regulator_start", start, kIncreaseFloor));

    Worst mono;
    Worst boundary;
    for (Eigen::Index k = 0; k + 1 < rows; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dw = W(k + 1, i) - W(k, i);
            mono.offer(-dw, k, i);
            if (dw > kIncreaseFloor) boundary.offer(std::min(X(k, i), X(k + 1, i)), k, i);
        }
    }
    report.checks.push_back(finish(s, g, "regulator_monotone", mono, kIncreaseFloor));
    report.checks.push_back(finish(s, g, "regulator_boundary_only", boundary, eps));
    return report;
}

}  // namespace flownet
