// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "flownet/invariants.hpp"
#include "flownet/oracle.hpp"
#include "flownet/reflection.hpp"
#include "flownet/scenario_io.hpp"
#include "flownet/solver.hpp"
#include "test_support.hpp"

using namespace flownet;
using namespace flownet::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Eigen::Index link(const Scenario& s, const std::string& id) {
    return static_cast<Eigen::Index>(*s.routing.graph.find_link(id));
}

// 1. Invariants on random scenarios.
Outcome random_invariants() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    const double h = 0.01;
    int failures = 0;
    std::string first;
    const int count = 200;
    for (int trial = 0; trial < count; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const Scenario s = n == 1 ? single_cell(0.5 + 0.01 * trial, 0.3, 0.4, 20.0, h) : random_scenario(rng, n, 20.0, h);
        const auto rep = check_solution(s, solve(s), 50 * h);
        if (!rep.ok()) {
            ++failures;
            if (first.empty()) {
                for (const auto& c : rep.checks)
                    if (!c.passed) first = fmt("trial %d: %s worst %.3g at %s", trial, c.name.c_str(), c.worst, c.detail.c_str());
            }
        }
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < 60.0,
            fmt("%d scenarios, %d failing, %.1f s%s%s", count, failures, secs, first.empty() ? "" : "; ", first.c_str())};
}

// 2. Contraction of Pi and Lipschitz continuity of Psi.
Outcome contraction_certificates() {
    std::mt19937_64 rng(99);
    const TimeGrid g{0.0, 0.05, 60};
    int violations = 0;
    double worst_pi = 0.0;
    double worst_psi = 0.0;
    const int count = 120;
    for (int trial = 0; trial < count; ++trial) {
        const auto r = random_routing(rng, 2 + static_cast<std::size_t>(trial % 7));
        const auto nrm = build_weighted_norm(r);
        const double rho = nrm.contraction_factor;
        const auto n = r.graph.link_count();
        const auto gamma = random_trajectory(rng, g, n, -1.0, 1.0);
        const auto eta = random_trajectory(rng, g, n, -1.0, 1.0);
        const auto v1 = random_trajectory(rng, g, n, 0.0, 2.0);
        const auto v2 = random_trajectory(rng, g, n, 0.0, 2.0);

        const double dv = traj_distance(v1, v2, nrm);
        const double pi_ratio = dv > 0 ? traj_distance(apply_pi(gamma, v1, r), apply_pi(gamma, v2, r), nrm) / dv : 0.0;
        const double dg = traj_distance(gamma, eta, nrm);
        const double psi_ratio =
            dg > 0 ? traj_distance(fixed_point_psi(gamma, r, nrm, 1e-13).w, fixed_point_psi(eta, r, nrm, 1e-13).w, nrm) / dg
                   : 0.0;
        if (pi_ratio > rho) ++violations;
        if (psi_ratio > 1.0 / (1.0 - rho) + 1e-6) ++violations;
        worst_pi = std::max(worst_pi, rho > 0 ? pi_ratio / rho : pi_ratio);
        worst_psi = std::max(worst_psi, psi_ratio * (1.0 - rho));
    }
    return {violations == 0, fmt("%d triples, %d violations, max Pi ratio/rho %.4f, max Psi ratio*(1-rho) %.4f", count,
                                 violations, worst_pi, worst_psi)};
}

// 3. Solver versus the projected-Euler oracle.
Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    const int refine = 10;
    std::vector<std::string> lines;
    bool ok = true;

    const auto compare = [&](const std::string& label, const Scenario& s, const std::function<double(double)>* exact) {
        const auto sol = solve(s);
        const auto orc = subsample(oracle_solve(s, OracleConfig{refine}).x, refine);
        const double h = sol.grid.h;
        const double bound = 5.0 * (h + h / refine);
        double d = sup_distance(sol.x, orc);
        if (exact) {
            for (std::size_t k = 0; k < sol.grid.samples(); ++k) {
                const double e = (*exact)(sol.grid.time(k));
                d = std::max(d, std::abs(sol.x.values(static_cast<Eigen::Index>(k), 0) - e));
                d = std::max(d, std::abs(orc.values(static_cast<Eigen::Index>(k), 0) - e));
            }
        }
        ok = ok && d <= bound;
        lines.push_back(fmt("%s %.2e", label.c_str(), d));
    };

    struct Cell { double cap, lam, x0; };
    for (const Cell c : {Cell{1.0, 0.0, 1.0}, Cell{1.0, 0.4, 0.0}, Cell{0.6, 0.2, 2.0}, Cell{0.5, 0.8, 0.3}, Cell{0.7, 0.7, 0.5}}) {
        const std::function<double(double)> f = [c](double t) { return closed_form_single_cell(c.cap, c.lam, c.x0, t).x; };
        compare(fmt("cell(%g,%g,%g)", c.cap, c.lam, c.x0), single_cell(c.cap, c.lam, c.x0, 5.0, 0.01), &f);
    }
    compare("chain", load_scenario(scenario_path("two_cell_chain.scenario")), nullptr);
    compare("two-junction", load_scenario(scenario_path("example_2_1.scenario")), nullptr);

    const double secs = seconds_since(t0);
    std::string detail = fmt("bound 5(h+h_o)=%.3f; ", 5.0 * (0.01 + 0.001));
    for (const auto& l : lines) detail += l + " ";
    detail += fmt("; %.1f s", secs);
    return {ok && secs < 120.0, detail};
}

// 4. Two-junction network: queued links settle at equilibrium, empty links throttle.
Outcome two_junction_steady_state(const Scenario& s, const Solution& sol) {
    const Vector x = sol.x.at(sol.grid.steps);
    const Vector zeta = sol.zeta.at(sol.grid.steps);
    const Vector z = sol.z.at(sol.grid.steps);
    const Vector a = equilibrium_outflow(s.routing, s.inflow.values().row(0).transpose());
    double worst = 0.0;
    int queued = 0;
    int throttled = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) > 0.01) {
            ++queued;
            worst = std::max(worst, std::abs(zeta(i) - a(i)));
        } else if (x(i) <= 1e-6 && z(i) < zeta(i) - 0.01) {
            ++throttled;
        }
    }
    return {queued > 0 && worst <= 0.02 && throttled >= 1,
            fmt("%d queued links, max |zeta-a| %.2e; %d empty links with z < zeta - 0.01", queued, worst, throttled)};
}

// Last time the path is outside a 5% band around its final value. A zero final
// value makes the band degenerate; the 1e-9 floor only absorbs round-off.
double settle_time(const Solution& sol, Eigen::Index i) {
    const auto& col = sol.x.values.col(i);
    const double target = col(col.size() - 1);
    const double band = std::max(0.05 * std::abs(target), 1e-9);
    for (Eigen::Index k = col.size() - 1; k >= 0; --k) {
        if (std::abs(col(k) - target) > band) return sol.grid.time(static_cast<std::size_t>(k + 1));
    }
    return 0.0;
}

// 5. Intermediate CTM links delay e8 but not e7.
Outcome propagation_delay(const Scenario& s1, const Solution& a, const Scenario& s3, const Solution& b) {
    const double t8a = settle_time(a, link(s1, "e8"));
    const double t8b = settle_time(b, link(s3, "e8"));
    const double t7a = settle_time(a, link(s1, "e7"));
    const double t7b = settle_time(b, link(s3, "e7"));
    const double growth = t7a > 0 ? (t7b - t7a) / t7a : (t7b > 0 ? 1.0 : 0.0);
    return {t8b > t8a && growth < 0.10,
            fmt("e8 settles at %.2f -> %.2f (x_ss %.4f); e7 at %.2f -> %.2f (%+.1f%%, x_ss %.4f)", t8a, t8b,
                b.x.values(b.x.values.rows() - 1, link(s3, "e8")), t7a, t7b, 100 * growth,
                b.x.values(b.x.values.rows() - 1, link(s3, "e7")))};
}

// 6. Empirical order under step halving.
Outcome refinement_order() {
    Scenario s = load_scenario(scenario_path("example_2_1.scenario"));
    s.horizon = 10.0;
    std::vector<Solution> sols;
    for (double h : {0.04, 0.02, 0.01}) {
        s.step = h;
        sols.push_back(solve(s));
    }
    const auto nrm = build_weighted_norm(s.routing);
    // Compare on the coarse grid.
    const auto d1 = traj_distance(sols[0].x, subsample(sols[1].x, 2), nrm);
    const auto d2 = traj_distance(subsample(sols[1].x, 2), subsample(sols[2].x, 4), nrm);
    const double order = std::log2(d1 / d2);
    return {order >= 0.9, fmt("||x_.04 - x_.02|| %.3e, ||x_.02 - x_.01|| %.3e, order %.3f", d1, d2, order)};
}

// 7. Picard from two different starting iterates.
Outcome uniqueness() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"single_cell.scenario", "two_cell_chain.scenario", "example_2_1.scenario", "example_2_3.scenario"}) {
        const Scenario s = load_scenario(scenario_path(name));
        const auto nrm = build_weighted_norm(s.routing);
        const auto a = solve(s);
        SolveOptions o;
        Trajectory g = Trajectory::constant(s.grid(), Vector::Constant(static_cast<Eigen::Index>(s.link_count()), 5.0));
        for (Eigen::Index k = 0; k < g.values.rows(); ++k) g.values.row(k) *= 1.0 + std::sin(0.1 * static_cast<double>(k));
        o.initial_guess = g;
        const auto b = solve(s, o);
        const double L = a.report.sizing.safety;
        const double bound = 2.0 * s.tolerances.picard / (1.0 - L);
        const double d = traj_distance(a.x, b.x, nrm);
        ok = ok && d <= bound;
        detail += fmt("%s %.2e (bound %.1e) ", name, d, bound);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    int failed = 0;
    const auto report = [&](int id, const char* title, const Outcome& o) {
        std::printf("%s criterion %d: %s | %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    };
    const auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("exception: ") + e.what()};
        }
    };

    report(1, "solution invariants on random scenarios", guarded(random_invariants));
    report(2, "contraction certificates", guarded(contraction_certificates));
    report(3, "oracle equivalence", guarded(oracle_equivalence));

    Scenario s1, s3;
    Solution a, b;
    bool have = true;
    std::string why;
    try {
        s1 = load_scenario(scenario_path("example_2_1.scenario"));
        s3 = load_scenario(scenario_path("example_2_3.scenario"));
        a = solve(s1);
        b = solve(s3);
    } catch (const std::exception& e) {
        have = false;
        why = e.what();
    }
    report(4, "two-junction steady state", have ? guarded([&] { return two_junction_steady_state(s1, a); })
                                               : Outcome{false, "exception: " + why});
    report(5, "propagation delay through intermediate links",
           have ? guarded([&] { return propagation_delay(s1, a, s3, b); }) : Outcome{false, "exception: " + why});
    report(6, "grid-refinement convergence", guarded(refinement_order));
    report(7, "uniqueness from distinct initial guesses", guarded(uniqueness));

    std::printf("%d of 7 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
