#include "flownet/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "flownet/errors.hpp"
#include "flownet/invariants.hpp"
#include "flownet/oracle.hpp"
#include "flownet/scenario_io.hpp"

namespace flownet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = spdlog::stderr_color_mt("flownet");
        const char* env = std::getenv("FLOWNET_LOG");
        l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        return l;
    }();
    return log;
}

struct Common {
    std::string scenario;
    double step = 0.0;
    double tol = 0.0;
    int max_picard = 0;
};

Scenario load_with_overrides(const Common& c) {
    Scenario s = load_scenario(c.scenario);
    if (c.step > 0.0) s.step = c.step;
    if (c.tol > 0.0) s.tolerances.picard = c.tol;
    return s;
}

SolveOptions options_for(const Scenario& s, const Common& c) {
    SolveOptions o;
    if (c.max_picard > 0) o.max_picard = c.max_picard;
    o.tol_picard = s.tolerances.picard;
    o.tol_psi = s.tolerances.psi;
    return o;
}

int error_exit(std::ostream& out, int code, const std::string& kind, const std::string& message,
               const std::vector<std::string>& issues = {}) {
    logger()->error("{}", message);
    json j{{"status", "error"}, {"kind", kind}, {"exit_code", code}, {"message", message}};
    if (!issues.empty()) j["issues"] = issues;
    out << j.dump(2) << '\n';
    return code;
}

int cmd_simulate(const Common& c, const std::string& out_dir, std::ostream& out) {
    const Scenario s = load_with_overrides(c);
    logger()->info("simulating '{}' over [0, {}] with step {}", s.name, s.horizon, s.step);
    const Solution sol = solve(s, options_for(s, c));
    const auto inv = check_solution(s, sol, 50.0 * sol.grid.h);

    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "trajectory.csv", trajectory_csv(s, sol));
    json report = solve_report_json(s, sol);
    report["invariants"] = invariant_report_json(inv);
    report["violations"] = inv.violations();
    report["status"] = "ok";
    write_file_atomic(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
    out << "wrote " << (fs::path(out_dir) / "trajectory.csv").string() << " (" << sol.grid.samples() << " rows) and "
        << (fs::path(out_dir) / "report.json").string() << '\n';
    return kExitOk;
}

int cmd_equilibrium(const Common& c, std::ostream& out) {
    const Scenario s = load_with_overrides(c);
    const auto& ids = s.routing.graph.links();
    const auto& V = s.inflow.values();
    const Vector a = equilibrium_outflow(s.routing, V.row(0).transpose());
    out << "link,a\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ',' << a(static_cast<Eigen::Index>(i)) << '\n';
    for (std::size_t seg = 1; seg < s.inflow.segments(); ++seg) {
        const Vector as = equilibrium_outflow(s.routing, V.row(static_cast<Eigen::Index>(seg)).transpose());
        out << "# inflow segment " << seg << " from t=" << s.inflow.breakpoints()[seg] << ':';
        for (std::size_t i = 0; i < ids.size(); ++i) out << ' ' << ids[i] << '=' << as(static_cast<Eigen::Index>(i));
        out << '\n';
    }
    return kExitOk;
}

int cmd_verify(const Common& c, double eps_factor, const std::string& report_path, std::ostream& out) {
    const Scenario s = load_with_overrides(c);
    const Solution sol = solve(s, options_for(s, c));
    const double eps = eps_factor * sol.grid.h;
    const auto inv = check_solution(s, sol, eps);

    json report = solve_report_json(s, sol);
    report["epsilon"] = eps;
    report["invariants"] = invariant_report_json(inv);
    report["violations"] = inv.violations();
    report["status"] = inv.ok() ? "ok" : "violated";
    if (!report_path.empty()) write_file_atomic(report_path, report.dump(2) + "\n");
    out << report.dump(2) << '\n';
    for (const auto& chk : inv.checks) {
        if (!chk.passed) logger()->warn("{} violated: {} > {} at {}", chk.name, chk.worst, chk.threshold, chk.detail);
    }
    return inv.ok() ? kExitOk : kExitInvariantViolation;
}

bool is_single_cell_closed_form(const Scenario& s) {
    return s.link_count() == 1 && s.inflow.segments() == 1 && s.controller->lipschitz() == 0.0;
}

int cmd_compare(const Common& c, int refine, double max_distance, bool as_json, std::ostream& out) {
    const Scenario s = load_with_overrides(c);
    const Solution sol = solve(s, options_for(s, c));
    OracleConfig cfg;
    cfg.refine = refine;
    const OracleResult orc = oracle_solve(s, cfg);
    const Trajectory coarse = subsample(orc.x, refine);

    const auto& ids = s.routing.graph.links();
    const Matrix diff = (sol.x.values - coarse.values).cwiseAbs();
    const double h = sol.grid.h;
    const double ho = h / refine;
    const double overall = diff.size() ? diff.maxCoeff() : 0.0;

    json j;
    j["scenario"] = s.name;
    j["h"] = h;
    j["h_oracle"] = ho;
    j["per_link"] = json::object();
    for (std::size_t i = 0; i < ids.size(); ++i) j["per_link"][ids[i]] = diff.col(static_cast<Eigen::Index>(i)).maxCoeff();
    j["sup_distance"] = overall;
    j["reference_bound"] = 5.0 * (h + ho);

    if (is_single_cell_closed_form(s)) {
        const double cap = s.controller->operator()(Vector::Zero(1))(0);
        const double lam = s.inflow.values()(0, 0);
        double solver_err = 0.0;
        double oracle_err = 0.0;
        for (std::size_t k = 0; k < sol.grid.samples(); ++k) {
            const double exact = closed_form_single_cell(cap, lam, s.x0(0), sol.grid.time(k)).x;
            solver_err = std::max(solver_err, std::abs(sol.x.values(static_cast<Eigen::Index>(k), 0) - exact));
            oracle_err = std::max(oracle_err, std::abs(coarse.values(static_cast<Eigen::Index>(k), 0) - exact));
        }
        j["closed_form"] = {{"solver_sup_error", solver_err}, {"oracle_sup_error", oracle_err}};
    }

    const bool exceeded = max_distance > 0.0 && overall > max_distance;
    j["status"] = exceeded ? "exceeded" : "ok";
    if (as_json) {
        out << j.dump(2) << '\n';
    } else {
        out << "link            sup|x_solver - x_oracle|\n" << std::scientific << std::setprecision(6);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            out << std::left << std::setw(16) << ids[i] << diff.col(static_cast<Eigen::Index>(i)).maxCoeff() << '\n';
        }
        out << std::left << std::setw(16) << "overall" << overall << '\n';
        out << std::left << std::setw(16) << "5(h+h_o)" << 5.0 * (h + ho) << '\n';
        if (j.contains("closed_form")) {
            out << std::left << std::setw(16) << "solver-exact" << j["closed_form"]["solver_sup_error"].get<double>() << '\n';
            out << std::left << std::setw(16) << "oracle-exact" << j["closed_form"]["oracle_sup_error"].get<double>() << '\n';
        }
    }
    return exceeded ? kExitInvariantViolation : kExitOk;
}

int cmd_plot(const Common& c, const std::string& out_dir, std::size_t stride, std::ostream& out) {
    const Scenario s = load_with_overrides(c);
    const Solution sol = solve(s, options_for(s, c));
    const Vector a = equilibrium_outflow(s.routing, s.inflow.values().row(0).transpose());
    fs::create_directories(out_dir);
    write_file_atomic(fs::path(out_dir) / "volumes.csv", volumes_csv(s, sol, stride));
    write_file_atomic(fs::path(out_dir) / "controls.csv", controls_csv(s, sol, a, stride));
    out << "wrote volumes.csv and controls.csv to " << out_dir << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feedback-controlled flow network simulator and verifier", "flownet"};
    app.require_subcommand(1);

    Common common;
    const auto add_common = [&](CLI::App* sub, bool with_tol) {
        sub->add_option("--scenario", common.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--step", common.step, "Override the grid step h");
        if (!with_tol) return;
        sub->add_option("--tol", common.tol, "Override the Picard tolerance");
        sub->add_option("--max-picard", common.max_picard, "Cap on Picard passes per window")
            ->check(CLI::PositiveNumber);
    };

    std::string out_dir;
    auto* simulate = app.add_subcommand("simulate", "Solve and write trajectory.csv + report.json");
    add_common(simulate, true);
    simulate->add_option("--out", out_dir, "Output directory")->required();

    auto* equilibrium = app.add_subcommand("equilibrium", "Print a = (I - R^T)^-1 lambda per link");
    equilibrium->add_option("--scenario", common.scenario, "Scenario file")->required()->check(CLI::ExistingFile);

    double eps_factor = 50.0;
    std::string report_path;
    auto* verify = app.add_subcommand("verify", "Solve and check every solution invariant");
    add_common(verify, true);
    verify->add_option("--eps-factor", eps_factor, "Invariant slack as a multiple of h");
    verify->add_option("--report", report_path, "Also write the report to this file");

    int refine = 10;
    double max_distance = 0.0;
    bool as_json = false;
    auto* compare = app.add_subcommand("compare-oracle", "Sup-distance between solver and reference integrator");
    add_common(compare, true);
    compare->add_option("--refine", refine, "Oracle step is h / refine")->check(CLI::PositiveNumber);
    compare->add_option("--max-distance", max_distance, "Exit 3 if the overall distance exceeds this");
    compare->add_flag("--json", as_json, "Emit JSON instead of a table");

    std::size_t stride = 10;
    auto* plot = app.add_subcommand("plot-data", "Write volumes.csv and controls.csv for plotting");
    add_common(plot, true);
    plot->add_option("--out", out_dir, "Output directory")->required();
    plot->add_option("--stride", stride, "Keep every N-th sample");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*simulate) return cmd_simulate(common, out_dir, out);
        if (*equilibrium) return cmd_equilibrium(common, out);
        if (*verify) return cmd_verify(common, eps_factor, report_path, out);
        if (*compare) return cmd_compare(common, refine, max_distance, as_json, out);
        if (*plot) return cmd_plot(common, out_dir, stride, out);
    } catch (const ValidationError& e) {
        return error_exit(out, kExitValidation, "validation", e.what(), e.issues());
    } catch (const ParseError& e) {
        return error_exit(out, kExitValidation, "parse", e.what());
    } catch (const StructuralError& e) {
        return error_exit(out, kExitValidation, "structure", e.what());
    } catch (const CertificateError& e) {
        return error_exit(out, kExitValidation, "certificate", e.what());
    } catch (const ConvergenceError& e) {
        return error_exit(out, kExitNonConvergence, "non_convergence",
                          std::string(e.what()) + " (last residual " + std::to_string(e.last_residual()) + ")");
    }
    return kExitValidation;
}

}  // namespace flownet
