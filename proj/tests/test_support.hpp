#pragma once

// Builders, generators and brute-force reference computations shared by the
// unit and acceptance suites. Nothing here calls the operators it is used to check.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "flownet/controllers.hpp"
#include "flownet/network.hpp"
#include "flownet/solver.hpp"
#include "flownet/trajectory.hpp"

namespace flownet::testing {

inline std::string scenario_path(const std::string& name) { return std::string(FLOWNET_SCENARIO_DIR) + "/" + name; }

// n nodes, one link per (tail, head) pair given.
inline Multigraph graph_from_pairs(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::string> ns;
    for (std::size_t i = 0; i < nodes; ++i) ns.push_back("v" + std::to_string(i));
    std::vector<std::string> ls;
    std::vector<std::size_t> tail;
    std::vector<std::size_t> head;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        ls.push_back("e" + std::to_string(k + 1));
        tail.push_back(pairs[k].first);
        head.push_back(pairs[k].second);
    }
    return Multigraph(ns, ls, tail, head);
}

// Path v0 -> v1 -> ... -> vn: link k ends where link k+1 starts.
inline Multigraph chain_graph(std::size_t links) {
    std::vector<std::pair<std::size_t, std::size_t>> p;
    for (std::size_t k = 0; k < links; ++k) p.emplace_back(k, k + 1);
    return graph_from_pairs(links + 1, p);
}

// Two links a -> b and b -> a.
inline Multigraph two_cycle_graph() { return graph_from_pairs(2, {{0, 1}, {1, 0}}); }

inline RoutingSpec routing(Multigraph g, Matrix R) { return RoutingSpec{std::move(g), std::move(R), kDefaultRowSumTolerance}; }

inline Scenario make_scenario(RoutingSpec r, std::vector<ControllerConfig> ctrls, InflowSignal inflow, Vector x0,
                              double horizon, double step) {
    Scenario s;
    s.name = "test";
    s.routing = std::move(r);
    s.controllers = std::move(ctrls);
    s.inflow = std::move(inflow);
    s.x0 = std::move(x0);
    s.horizon = horizon;
    s.step = step;
    finalize_scenario(s);
    return s;
}

inline Scenario single_cell(double cap, double lambda, double x0, double horizon, double step) {
    return make_scenario(routing(chain_graph(1), Matrix::Zero(1, 1)), {ConstantSpec{{0}, {cap}}},
                         InflowSignal::constant(Vector::Constant(1, lambda)), Vector::Constant(1, x0), horizon, step);
}

// ---------------------------------------------------------------------------
// Random valid instances.

// Random multigraph with a random sub-stochastic, topology-consistent, out-connected R.
inline RoutingSpec random_routing(std::mt19937_64& rng, std::size_t links) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        const std::size_t nodes = std::max<std::size_t>(2, links / 2 + 1);
        std::uniform_int_distribution<std::size_t> pick(0, nodes - 1);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        while (pairs.size() < links) {
            auto a = pick(rng);
            auto b = pick(rng);
            if (a != b) pairs.emplace_back(a, b);
        }
        Multigraph g = graph_from_pairs(nodes, pairs);
        const auto n = static_cast<Eigen::Index>(links);
        Matrix R = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::vector<Eigen::Index> succ;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i != j && g.head(static_cast<std::size_t>(i)) == g.tail(static_cast<std::size_t>(j))) succ.push_back(j);
            }
            if (succ.empty()) continue;
            // Some rows fully stochastic, some deficient.
            const double total = u(rng) < 0.4 ? 1.0 : u(rng);
            std::vector<double> w;
            double sum = 0.0;
            for (std::size_t k = 0; k < succ.size(); ++k) {
                w.push_back(u(rng) < 0.25 ? 0.0 : u(rng));
                sum += w.back();
            }
            if (sum <= 0.0) continue;
            for (std::size_t k = 0; k < succ.size(); ++k) R(i, succ[k]) = total * w[k] / sum;
        }
        RoutingSpec r{std::move(g), std::move(R), kDefaultRowSumTolerance};
        if (check_out_connected(r)) return r;
    }
}

// Random controller cover: GPA junctions, CTM links and constants over disjoint link sets.
inline std::vector<ControllerConfig> random_controllers(std::mt19937_64& rng, std::size_t links) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::size_t> order(links);
    for (std::size_t i = 0; i < links; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<ControllerConfig> out;
    std::size_t pos = 0;
    ConstantSpec constants;
    CtmSpec ctm;
    while (pos < links) {
        const double roll = u(rng);
        const std::size_t left = links - pos;
        if (roll < 0.4 && left >= 2) {
            const std::size_t take = std::min<std::size_t>(left, 2 + static_cast<std::size_t>(u(rng) * 3));
            GpaPhaseSpec g;
            g.kappa = 0.1 + u(rng);
            const std::size_t split = 1 + static_cast<std::size_t>(u(rng) * static_cast<double>(take - 1));
            g.phases.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                  order.begin() + static_cast<std::ptrdiff_t>(pos + split));
            g.phases.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos + split),
                                  order.begin() + static_cast<std::ptrdiff_t>(pos + take));
            out.emplace_back(std::move(g));
            pos += take;
        } else if (roll < 0.7 && links >= 2) {
            CtmLinkSpec c;
            c.link = order[pos];
            do {
                c.downstream = static_cast<std::size_t>(u(rng) * static_cast<double>(links)) % links;
            } while (c.downstream == c.link);
            if (u(rng) < 0.5) {
                c.demand = Demand{Demand::Kind::Linear, 0.5 + u(rng), 1.0, 1.0};
            } else {
                c.demand = Demand{Demand::Kind::Saturating, 1.0, 0.5 + u(rng), 0.2 + u(rng)};
            }
            c.supply = Supply{0.5 + u(rng), u(rng)};
            ctm.links.push_back(c);
            ++pos;
        } else {
            constants.links.push_back(order[pos]);
            constants.values.push_back(u(rng) * 1.5);
            ++pos;
        }
    }
    if (!constants.links.empty()) out.emplace_back(std::move(constants));
    if (!ctm.links.empty()) out.emplace_back(std::move(ctm));
    return out;
}

inline Scenario random_scenario(std::mt19937_64& rng, std::size_t links, double horizon, double step) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RoutingSpec r = random_routing(rng, links);
    auto ctrls = random_controllers(rng, links);
    const auto n = static_cast<Eigen::Index>(links);
    Vector x0(n);
    for (Eigen::Index i = 0; i < n; ++i) x0(i) = u(rng) < 0.3 ? 0.0 : u(rng);
    // Two inflow segments; some links without exogenous inflow.
    Matrix lam(2, n);
    for (Eigen::Index s = 0; s < 2; ++s)
        for (Eigen::Index i = 0; i < n; ++i) lam(s, i) = u(rng) < 0.4 ? 0.0 : 0.6 * u(rng);
    const double bp = std::round(horizon * (0.3 + 0.4 * u(rng)) / step) * step;
    return make_scenario(std::move(r), std::move(ctrls), InflowSignal({0.0, bp}, lam), x0, horizon, step);
}

inline Trajectory random_trajectory(std::mt19937_64& rng, const TimeGrid& g, std::size_t dim, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Trajectory t = Trajectory::zeros(g, dim);
    // Random walk so the paths look like sampled continuous functions.
    for (Eigen::Index i = 0; i < t.values.cols(); ++i) {
        double v = u(rng);
        for (Eigen::Index k = 0; k < t.values.rows(); ++k) {
            v = std::clamp(v + 0.1 * (u(rng) - 0.5 * (lo + hi)) , lo, hi);
            t.values(k, i) = v;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Brute-force references.

// (R^k)_ij > 0 for some k <= |E| with a deficient row j.
inline bool out_connected_by_powers(const Matrix& R, double tol = kDefaultRowSumTolerance) {
    const auto n = R.rows();
    Matrix reach = Matrix::Identity(n, n);
    Matrix power = Matrix::Identity(n, n);
    const Matrix support = (R.array() > 0.0).cast<double>().matrix();
    for (Eigen::Index k = 1; k <= n; ++k) {
        power = ((power * support).array() > 0.0).cast<double>().matrix();
        reach += power;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        bool ok = false;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (reach(i, j) > 0.0 && R.row(j).sum() < 1.0 - tol) ok = true;
        }
        if (!ok) return false;
    }
    return true;
}

// Pi_gamma by its definition: for each t_k, a fresh max over m <= k. O(n^2 E^2).
inline Matrix naive_pi(const Matrix& gamma, const Matrix& v, const Matrix& R) {
    const auto rows = gamma.rows();
    const auto n = gamma.cols();
    Matrix out = Matrix::Zero(rows, n);
    for (Eigen::Index k = 0; k < rows; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = 0.0;
            for (Eigen::Index m = 0; m <= k; ++m) {
                double rv = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) rv += R(j, i) * v(m, j);
                best = std::max(best, rv - gamma(m, i));
            }
            out(k, i) = best;
        }
    }
    return out;
}

// Plain Picard iteration on naive_pi, run a fixed large number of times.
inline Matrix brute_force_psi(const Matrix& gamma, const Matrix& R, int iterations) {
    Matrix v = Matrix::Zero(gamma.rows(), gamma.cols());
    for (int it = 0; it < iterations; ++it) {
        Matrix next = naive_pi(gamma, v, R);
        if (next == v) break;
        v = std::move(next);
    }
    return v;
}

}  // namespace flownet::testing
