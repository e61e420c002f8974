#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flownet/controllers.hpp"
#include "flownet/network.hpp"
#include "flownet/reflection.hpp"
#include "flownet/trajectory.hpp"

namespace flownet {

// Piecewise-constant exogenous inflow. Segment s holds values.row(s) on
// [breakpoints[s], breakpoints[s+1]); the last segment extends forever.
class InflowSignal {
public:
    InflowSignal() = default;

    // Throws StructuralError unless breakpoints start at 0, strictly increase,
    // and values are finite and nonnegative. Equal neighbouring segments merge.
    InflowSignal(std::vector<double> breakpoints, Matrix values);

    static InflowSignal constant(const Eigen::Ref<const Vector>& rate);

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] std::size_t segments() const noexcept { return breakpoints_.size(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }

    [[nodiscard]] Vector at(double t) const;
    [[nodiscard]] Vector integral(double a, double b) const;
    [[nodiscard]] double bound() const;

    bool operator==(const InflowSignal& other) const {
        return breakpoints_ == other.breakpoints_ && values_ == other.values_;
    }

private:
    std::vector<double> breakpoints_;
    Matrix values_;
};

struct Tolerances {
    double picard = 1e-9;
    double psi = 1e-11;
    double row_sum = kDefaultRowSumTolerance;

    bool operator==(const Tolerances&) const = default;
};

struct Scenario {
    std::string name;
    RoutingSpec routing;
    std::vector<ControllerConfig> controllers;
    ControllerPtr controller;  // built from `controllers`
    InflowSignal inflow;
    Vector x0;
    double horizon = 1.0;
    double step = 0.01;
    Tolerances tolerances;

    [[nodiscard]] std::size_t link_count() const noexcept { return routing.graph.link_count(); }

    // Uniform grid over [0, horizon]; the step shrinks slightly if horizon/step is not integral.
    [[nodiscard]] TimeGrid grid() const;
};

// Every semantic problem with the scenario; empty means solvable.
[[nodiscard]] std::vector<std::string> scenario_issues(const Scenario& s);

// Fills `controller` from `controllers` and throws ValidationError on any issue.
void finalize_scenario(Scenario& s);

// Constants that size the contraction windows.
struct WindowSizing {
    double rho = 0.0;                 // certified ||R^T|| in the weighted norm
    double transfer_norm = 0.0;       // ||I - R^T|| in the weighted norm
    double lipschitz = 0.0;           // controller Lipschitz constant in the weighted norm
    double varpi = 0.0;               // per-unit-time Lipschitz constant of Gamma
    double phi = 0.0;                 // Lipschitz constant of Phi
    double safety = 0.5;              // target contraction L of Phi o Gamma
    double length = 0.0;              // window length T_w
};

[[nodiscard]] WindowSizing window_length(const Scenario& s, const WeightedNorm& norm, double safety = 0.5);

// y(t0) = x(t0), y(t_{k+1}) = y(t_k) + int lambda - h (I - R^T) zeta(x(t_k)).
// The inflow integral is exact over each cell, which makes breakpoints off the grid harmless.
[[nodiscard]] Trajectory apply_gamma(const Trajectory& x, const Scenario& s);

struct SolveOptions {
    double tol_picard = 1e-9;
    double tol_psi = 1e-11;
    double safety = 0.5;
    // Cap on Picard passes per window; defaults to max(10 ceil(log tol / log L) + 100, steps + 2).
    std::optional<int> max_picard;
    // Optional starting iterate on the full grid; defaults to the constant initial state.
    std::optional<Trajectory> initial_guess;
};

struct WindowResult {
    Trajectory x;
    Trajectory y;
    Trajectory w;  // regulator, zero at the window start
    int iterations = 0;
    int psi_iterations = 0;
    double residual = 0.0;
};

// Picard iteration x <- Phi(Gamma(x)) on one window. `guess` (if given) must be on
// `grid`; its first row is replaced by x_start. Throws ConvergenceError at the cap.
[[nodiscard]] WindowResult solve_window(const Scenario& s, const WeightedNorm& norm, const TimeGrid& grid,
                                        const Eigen::Ref<const Vector>& x_start, double contraction,
                                        const SolveOptions& options, const Trajectory* guess = nullptr);

struct OutflowRecovery {
    Trajectory z;
    double max_clamp = 0.0;
};

// z = zeta(x) - dw/dt with forward differences, clamped into [0, zeta(x)].
[[nodiscard]] OutflowRecovery recover_outflow(const Trajectory& x, const Trajectory& w, const Controller& controller);

struct SolveReport {
    WindowSizing sizing;
    std::size_t window_steps = 0;
    std::vector<int> picard_iterations;
    std::vector<double> picard_residuals;
    int max_psi_iterations = 0;
    double max_residual = 0.0;
    double max_clamp = 0.0;
    double distortion = 1.0;
    double step = 0.0;
};

struct Solution {
    TimeGrid grid;
    Trajectory x;
    Trajectory y;
    Trajectory w;
    Trajectory z;
    Trajectory zeta;
    SolveReport report;
};

[[nodiscard]] Solution solve(const Scenario& s, const SolveOptions& options = {});

// zeta(x(t_k)) at every sample.
[[nodiscard]] Trajectory evaluate_along(const Controller& controller, const Trajectory& x);

}  // namespace flownet
