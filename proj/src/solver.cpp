#include "flownet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flownet/errors.hpp"

namespace flownet {

// ---------------------------------------------------------------------------
// InflowSignal

InflowSignal::InflowSignal(std::vector<double> breakpoints, Matrix values) {
    if (breakpoints.empty()) throw StructuralError("inflow: at least one segment required");
    if (static_cast<Eigen::Index>(breakpoints.size()) != values.rows()) {
        throw StructuralError("inflow: one value row per breakpoint required");
    }
    if (breakpoints.front() != 0.0) throw StructuralError("inflow: first breakpoint must be 0");
    for (std::size_t s = 1; s < breakpoints.size(); ++s) {
        if (!(breakpoints[s] > breakpoints[s - 1]) || !std::isfinite(breakpoints[s])) {
            throw StructuralError("inflow: breakpoints must be finite and strictly increasing");
        }
    }
    if (!values.allFinite() || (values.size() > 0 && values.minCoeff() < 0.0)) {
        throw StructuralError("inflow: rates must be finite and nonnegative");
    }

    std::vector<Eigen::Index> keep{0};
    for (std::size_t s = 1; s < breakpoints.size(); ++s) {
        const auto si = static_cast<Eigen::Index>(s);
        if (values.row(si) != values.row(keep.back())) keep.push_back(si);
    }
    values_.resize(static_cast<Eigen::Index>(keep.size()), values.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        breakpoints_.push_back(breakpoints[static_cast<std::size_t>(keep[k])]);
        values_.row(static_cast<Eigen::Index>(k)) = values.row(keep[k]);
    }
}

InflowSignal InflowSignal::constant(const Eigen::Ref<const Vector>& rate) {
    return InflowSignal({0.0}, Matrix(rate.transpose()));
}

Vector InflowSignal::at(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto s = it == breakpoints_.begin() ? 0 : static_cast<Eigen::Index>(it - breakpoints_.begin() - 1);
    return values_.row(s).transpose();
}

Vector InflowSignal::integral(double a, double b) const {
    Vector out = Vector::Zero(values_.cols());
    const auto n = breakpoints_.size();
    for (std::size_t s = 0; s < n; ++s) {
        const double lo = std::max(a, breakpoints_[s]);
        const double hi = s + 1 < n ? std::min(b, breakpoints_[s + 1]) : b;
        if (hi > lo) out += (hi - lo) * values_.row(static_cast<Eigen::Index>(s)).transpose();
    }
    return out;
}

double InflowSignal::bound() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

// ---------------------------------------------------------------------------
// Scenario

TimeGrid Scenario::grid() const {
    const double ratio = horizon / step;
    const double rounded = std::round(ratio);
    std::size_t n = 0;
    if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) {
        n = static_cast<std::size_t>(rounded);
    } else {
        n = static_cast<std::size_t>(std::ceil(ratio));
    }
    n = std::max<std::size_t>(n, 1);
    return TimeGrid{0.0, horizon / static_cast<double>(n), n};
}

std::vector<std::string> scenario_issues(const Scenario& s) {
    std::vector<std::string> issues;
    const auto n = s.link_count();

    try {
        const auto report = validate_routing(s.routing);
        for (auto& m : report.messages()) issues.push_back("routing: " + m);
    } catch (const StructuralError& e) {
        issues.emplace_back(std::string("routing: ") + e.what());
    }

    if (static_cast<std::size_t>(s.x0.size()) != n) {
        issues.push_back("initial state has " + std::to_string(s.x0.size()) + " entries, expected " +
                         std::to_string(n));
    } else if (!s.x0.allFinite() || (n > 0 && s.x0.minCoeff() < 0.0)) {
        issues.emplace_back("initial state must be finite and nonnegative");
    }
    if (!(s.horizon > 0.0) || !std::isfinite(s.horizon)) issues.emplace_back("horizon must be positive");
    if (!(s.step > 0.0) || !std::isfinite(s.step)) issues.emplace_back("step must be positive");
    if (s.inflow.dim() != n) issues.emplace_back("inflow dimension does not match the link count");
    if (!(s.tolerances.picard > 0.0) || !(s.tolerances.psi > 0.0) || !(s.tolerances.row_sum >= 0.0)) {
        issues.emplace_back("tolerances must be positive");
    }

    for (const auto& c : s.controllers) {
        if (const auto* ctm = std::get_if<CtmSpec>(&c)) {
            for (const auto& l : ctm->links) {
                if (l.downstream >= n) issues.emplace_back("ctm: downstream link out of range");
            }
        }
    }
    try {
        (void)build_controller(s.controllers, n);
    } catch (const StructuralError& e) {
        issues.emplace_back(std::string("controllers: ") + e.what());
    }
    return issues;
}

void finalize_scenario(Scenario& s) {
    s.routing.row_sum_tolerance = s.tolerances.row_sum;
    auto issues = scenario_issues(s);
    if (!issues.empty()) throw ValidationError(std::move(issues));
    s.controller = build_controller(s.controllers, s.link_count());
}

// ---------------------------------------------------------------------------
// Operators

Trajectory evaluate_along(const Controller& controller, const Trajectory& x) {
    Trajectory out = Trajectory::zeros(x.grid, x.dim());
    Vector xk(x.values.cols());
    Vector zk(x.values.cols());
    for (Eigen::Index k = 0; k < x.values.rows(); ++k) {
        // Controllers live on X = R_+^E; round-off below zero is not part of the domain.
        xk = x.values.row(k).transpose().cwiseMax(0.0);
        zk.setZero();
        controller.evaluate(xk, zk);
        out.values.row(k) = zk.transpose();
    }
    return out;
}

WindowSizing window_length(const Scenario& s, const WeightedNorm& norm, double safety) {
    if (!s.controller) throw StructuralError("window_length: scenario has no controller");
    const double lz = s.controller->lipschitz();
    if (!std::isfinite(lz) || lz < 0.0) throw StructuralError("window_length: controller Lipschitz constant not declared");

    WindowSizing w;
    w.safety = safety;
    w.rho = norm.contraction_factor;
    w.transfer_norm = norm.induced(transfer_matrix(s.routing));
    w.lipschitz = lz * norm.distortion();
    w.varpi = w.transfer_norm * w.lipschitz;
    w.phi = 1.0 + w.transfer_norm / (1.0 - w.rho);
    if (w.varpi <= 0.0) {
        w.length = s.horizon;
        w.safety = 0.0;
    } else {
        w.length = safety / (w.varpi * w.phi);
    }
    return w;
}

Trajectory apply_gamma(const Trajectory& x, const Scenario& s) {
    const Trajectory zeta = evaluate_along(*s.controller, x);
    const auto& g = x.grid;
    const Matrix& R = s.routing.R;
    Trajectory y{g, Matrix(x.values.rows(), x.values.cols())};
    y.values.row(0) = x.values.row(0);
    for (std::size_t k = 0; k < g.steps; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        const Eigen::RowVectorXd zrow = zeta.values.row(ki);
        // Row form of (I - R^T) zeta: zeta^T - zeta^T R.
        const Eigen::RowVectorXd out = zrow - zrow * R;
        y.values.row(ki + 1) =
            y.values.row(ki) + s.inflow.integral(g.time(k), g.time(k + 1)).transpose() - g.h * out;
    }
    return y;
}

WindowResult solve_window(const Scenario& s, const WeightedNorm& norm, const TimeGrid& grid,
                          const Eigen::Ref<const Vector>& x_start, double contraction, const SolveOptions& options,
                          const Trajectory* guess) {
    Trajectory x = guess ? *guess : Trajectory::constant(grid, x_start);
    if (guess) {
        if (guess->grid.steps != grid.steps || guess->dim() != static_cast<std::size_t>(x_start.size())) {
            throw StructuralError("solve_window: initial guess does not match the window");
        }
        x.grid = grid;
        x.values.row(0) = x_start.transpose();
    }

    const double tol = options.tol_picard;
    const double stop = tol * (1.0 - contraction) / std::max(contraction, std::numeric_limits<double>::epsilon());
    const int cap = options.max_picard.value_or(
        std::max(default_iteration_cap(tol, contraction), static_cast<int>(grid.steps) + 2));

    WindowResult out;
    double step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= cap; ++it) {
        Trajectory y = apply_gamma(x, s);
        Reflected r = reflect(y, s.routing, norm, options.tol_psi);
        step = traj_distance(r.x, x, norm);
        out.psi_iterations = std::max(out.psi_iterations, r.psi.iterations);
        x = std::move(r.x);
        if (step <= stop) {
            out.x = std::move(x);
            out.y = std::move(y);
            out.w = std::move(r.psi.w);
            out.iterations = it;
            out.residual = contraction * step;
            return out;
        }
    }
    std::ostringstream os;
    os << "solve_window: Picard iteration did not converge within " << cap << " passes on [" << grid.t0 << ", "
       << grid.end() << "]; the declared Lipschitz constant may be too small";
    throw ConvergenceError(os.str(), step, cap);
}

OutflowRecovery recover_outflow(const Trajectory& x, const Trajectory& w, const Controller& controller) {
    require_same_shape(x, w);
    const Trajectory zeta = evaluate_along(controller, x);
    const auto rows = x.values.rows();
    const double h = x.grid.h;

    OutflowRecovery out{Trajectory::zeros(x.grid, x.dim()), 0.0};
    for (Eigen::Index k = 0; k < rows; ++k) {
        const Eigen::Index d = std::min<Eigen::Index>(k, rows - 2);
        for (Eigen::Index i = 0; i < x.values.cols(); ++i) {
            const double rate = rows > 1 ? (w.values(d + 1, i) - w.values(d, i)) / h : 0.0;
            const double raw = zeta.values(k, i) - rate;
            const double clamped = std::clamp(raw, 0.0, zeta.values(k, i));
            out.max_clamp = std::max(out.max_clamp, std::abs(raw - clamped));
            out.z.values(k, i) = clamped;
        }
    }
    return out;
}

Solution solve(const Scenario& s, const SolveOptions& options) {
    if (!s.controller) throw StructuralError("solve: scenario has no controller (call finalize_scenario)");
    const TimeGrid grid = s.grid();
    const auto n = static_cast<Eigen::Index>(s.link_count());
    const WeightedNorm norm = build_weighted_norm(s.routing);

    SolveReport report;
    report.sizing = window_length(s, norm, options.safety);
    report.distortion = norm.distortion();
    report.step = grid.h;

    std::size_t m = grid.steps;
    if (report.sizing.length < s.horizon) {
        m = static_cast<std::size_t>(std::floor(report.sizing.length / grid.h));
        m = std::clamp<std::size_t>(m, 1, grid.steps);
    }
    report.window_steps = m;

    if (options.initial_guess) {
        const auto& g = *options.initial_guess;
        if (g.grid.steps != grid.steps || g.values.cols() != n) {
            throw StructuralError("solve: initial guess must live on the scenario grid");
        }
    }

    Solution sol;
    sol.grid = grid;
    sol.x = Trajectory::zeros(grid, static_cast<std::size_t>(n));
    sol.w = Trajectory::zeros(grid, static_cast<std::size_t>(n));
    sol.x.values.row(0) = s.x0.transpose();

    Vector x_start = s.x0;
    Eigen::RowVectorXd w_base = Eigen::RowVectorXd::Zero(n);
    for (std::size_t first = 0; first < grid.steps; first += m) {
        const std::size_t len = std::min(m, grid.steps - first);
        const TimeGrid wgrid = grid.window(first, len);
        std::optional<Trajectory> guess;
        if (options.initial_guess) guess = options.initial_guess->window(first, len);

        WindowResult r = solve_window(s, norm, wgrid, x_start, report.sizing.safety, options,
                                      guess ? &*guess : nullptr);
        const auto f = static_cast<Eigen::Index>(first);
        const auto rows = static_cast<Eigen::Index>(len + 1);
        sol.x.values.middleRows(f, rows) = r.x.values;
        sol.w.values.middleRows(f, rows) = r.w.values.rowwise() + w_base;

        report.picard_iterations.push_back(r.iterations);
        report.picard_residuals.push_back(r.residual);
        report.max_psi_iterations = std::max(report.max_psi_iterations, r.psi_iterations);
        report.max_residual = std::max(report.max_residual, r.residual);

        x_start = r.x.values.row(rows - 1).transpose();
        w_base = sol.w.values.row(f + rows - 1);
    }

    // Global y with x = y + (I - R^T) w over the whole horizon.
    sol.y = Trajectory{grid, sol.x.values - sol.w.values + sol.w.values * s.routing.R};
    sol.zeta = evaluate_along(*s.controller, sol.x);
    auto rec = recover_outflow(sol.x, sol.w, *s.controller);
    sol.z = std::move(rec.z);
    report.max_clamp = rec.max_clamp;
    sol.report = std::move(report);
    return sol;
}

}  // namespace flownet
