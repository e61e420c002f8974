#include "flownet/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "flownet/errors.hpp"

namespace flownet {

Multigraph::Multigraph(std::vector<std::string> nodes, std::vector<std::string> links,
                       std::vector<std::size_t> tail, std::vector<std::size_t> head)
    : nodes_(std::move(nodes)), links_(std::move(links)), tail_(std::move(tail)), head_(std::move(head)) {
    if (tail_.size() != links_.size() || head_.size() != links_.size()) {
        throw StructuralError("tail/head maps must cover every link");
    }
    if (std::set<std::string>(nodes_.begin(), nodes_.end()).size() != nodes_.size()) {
        throw StructuralError("duplicate node id");
    }
    if (std::set<std::string>(links_.begin(), links_.end()).size() != links_.size()) {
        throw StructuralError("duplicate link id");
    }
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (tail_[i] >= nodes_.size() || head_[i] >= nodes_.size()) {
            throw StructuralError("link '" + links_[i] + "' references an unknown node");
        }
        if (tail_[i] == head_[i]) {
            throw StructuralError("link '" + links_[i] + "' is a self-loop");
        }
    }
}

std::optional<std::size_t> Multigraph::find_link(const std::string& id) const {
    auto it = std::find(links_.begin(), links_.end(), id);
    if (it == links_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - links_.begin());
}

std::optional<std::size_t> Multigraph::find_node(const std::string& id) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::vector<std::string> ValidityReport::messages() const {
    std::vector<std::string> out;
    out.reserve(violations.size());
    for (const auto& v : violations) out.push_back(v.message);
    return out;
}

namespace {

void require_square(const RoutingSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.graph.link_count());
    if (spec.R.rows() != n || spec.R.cols() != n) {
        std::ostringstream os;
        os << "routing matrix is " << spec.R.rows() << "x" << spec.R.cols() << " but the graph has " << n
           << " links";
        throw StructuralError(os.str());
    }
}

}  // namespace

std::vector<std::size_t> trapped_links(const RoutingSpec& spec) {
    require_square(spec);
    const auto n = spec.graph.link_count();
    std::vector<char> reaches(n, 0);
    std::deque<std::size_t> queue;
    for (std::size_t j = 0; j < n; ++j) {
        if (spec.R.row(static_cast<Eigen::Index>(j)).sum() < 1.0 - spec.row_sum_tolerance) {
            reaches[j] = 1;
            queue.push_back(j);
        }
    }
    // Reverse BFS: i reaches j in one step iff R(i, j) > 0.
    while (!queue.empty()) {
        const auto j = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < n; ++i) {
            if (!reaches[i] && spec.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) {
                reaches[i] = 1;
                queue.push_back(i);
            }
        }
    }
    std::vector<std::size_t> trapped;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reaches[i]) trapped.push_back(i);
    }
    return trapped;
}

bool check_out_connected(const RoutingSpec& spec) { return trapped_links(spec).empty(); }

ValidityReport validate_routing(const RoutingSpec& spec) {
    require_square(spec);
    ValidityReport report;
    const auto& g = spec.graph;
    const auto n = g.link_count();
    const auto name = [&](std::size_t i) { return g.links()[i]; };

    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = spec.R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (!std::isfinite(r)) {
                finite = false;
                report.violations.push_back(
                    {Violation::Kind::NonFinite, {i, j}, "R(" + name(i) + ", " + name(j) + ") is not finite"});
                continue;
            }
            if (r < 0.0) {
                report.violations.push_back(
                    {Violation::Kind::Negative, {i, j}, "R(" + name(i) + ", " + name(j) + ") is negative"});
            }
            if (r != 0.0 && g.head(i) != g.tail(j)) {
                report.violations.push_back({Violation::Kind::TopologyMismatch,
                                             {i, j},
                                             "R(" + name(i) + ", " + name(j) + ") is nonzero but " + name(i) +
                                                 " does not end where " + name(j) + " starts"});
            }
            row_sum += r;
        }
        if (row_sum > 1.0 + spec.row_sum_tolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "row sum of " << name(i) << " is " << row_sum << " > 1";
            report.violations.push_back({Violation::Kind::RowSumExceeded, {i}, os.str()});
        }
    }

    if (finite) {
        const auto trapped = trapped_links(spec);
        if (!trapped.empty()) {
            std::string msg = "not out-connected: no deficient row reachable from";
            for (auto i : trapped) msg += " " + name(i);
            report.violations.push_back({Violation::Kind::NotOutConnected, trapped, msg});
        }
    }
    return report;
}

double WeightedNorm::norm(const Eigen::Ref<const Vector>& v) const {
    return (v.array().abs() / weights.array()).maxCoeff();
}

double WeightedNorm::induced(const Eigen::Ref<const Matrix>& A) const {
    const Vector scaled = A.cwiseAbs() * weights;
    return (scaled.array() / weights.array()).maxCoeff();
}

double WeightedNorm::distortion() const { return weights.maxCoeff() / weights.minCoeff(); }

WeightedNorm WeightedNorm::unit(std::size_t n) {
    return WeightedNorm{Vector::Ones(static_cast<Eigen::Index>(n)), 0.0};
}

Matrix transfer_matrix(const RoutingSpec& spec) {
    const auto n = spec.R.rows();
    return Matrix::Identity(n, n) - spec.R.transpose();
}

WeightedNorm build_weighted_norm(const RoutingSpec& spec) {
    require_square(spec);
    const auto n = spec.R.rows();
    if (n == 0) return WeightedNorm{Vector(0), 0.0};

    const Matrix RT = spec.R.transpose();
    Eigen::FullPivLU<Matrix> lu(transfer_matrix(spec));
    if (!lu.isInvertible()) {
        throw CertificateError("spectral radius not certified < 1: I - R^T is singular");
    }
    const Vector u = lu.solve(Vector::Ones(n));
    if (!u.allFinite() || u.minCoeff() <= 0.0) {
        throw CertificateError("spectral radius not certified < 1: weight vector is not positive");
    }

    // R^T u = u - 1, so the row ratios are 1 - 1/u_i; take the exact worst ratio
    // and nudge it until the row inequality holds in floating point.
    const Vector RTu = RT.cwiseAbs() * u;
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) rho = std::max(rho, RTu(i) / u(i));
    for (Eigen::Index i = 0; i < n; ++i) {
        while (RTu(i) > rho * u(i)) rho = std::nextafter(rho, 2.0);
    }
    if (!(rho < 1.0)) {
        throw CertificateError("spectral radius not certified < 1: contraction factor is " + std::to_string(rho));
    }
    return WeightedNorm{u, rho};
}

Vector equilibrium_outflow(const RoutingSpec& spec, const Eigen::Ref<const Vector>& lambda) {
    require_square(spec);
    if (lambda.size() != spec.R.rows()) {
        throw StructuralError("inflow vector length does not match the link count");
    }
    const Matrix A = transfer_matrix(spec);
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) {
        throw CertificateError("I - R^T is singular; equilibrium undefined");
    }
    Vector a = lu.solve(lambda);
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if (a.minCoeff() < -1e-12 * scale) {
        throw CertificateError("equilibrium outflow has negative entries");
    }
    a = a.cwiseMax(0.0);
    return a;
}

}  // namespace flownet
