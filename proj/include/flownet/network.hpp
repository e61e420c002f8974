#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace flownet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Directed multigraph (nodes, links, tail, head). Links are the state coordinates
// of the dynamics; their position in `links()` is the index used by every vector.
class Multigraph {
public:
    Multigraph() = default;

    // Throws StructuralError on self-loops, unknown endpoints or duplicate ids.
    Multigraph(std::vector<std::string> nodes, std::vector<std::string> links,
               std::vector<std::size_t> tail, std::vector<std::size_t> head);

    [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t link_count() const noexcept { return links_.size(); }

    [[nodiscard]] const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<std::string>& links() const noexcept { return links_; }

    [[nodiscard]] std::size_t tail(std::size_t link) const { return tail_.at(link); }
    [[nodiscard]] std::size_t head(std::size_t link) const { return head_.at(link); }

    [[nodiscard]] std::optional<std::size_t> find_link(const std::string& id) const;
    [[nodiscard]] std::optional<std::size_t> find_node(const std::string& id) const;

    bool operator==(const Multigraph&) const = default;

private:
    std::vector<std::string> nodes_;
    std::vector<std::string> links_;
    std::vector<std::size_t> tail_;
    std::vector<std::size_t> head_;
};

inline constexpr double kDefaultRowSumTolerance = 1e-12;

// Routing matrix R over the links of `graph`: R(i, j) is the fraction of link i's
// outflow that moves on to link j. The remaining 1 - sum_j R(i, j) leaves the network.
struct RoutingSpec {
    Multigraph graph;
    Matrix R;
    double row_sum_tolerance = kDefaultRowSumTolerance;
};

struct Violation {
    enum class Kind { NonFinite, Negative, RowSumExceeded, TopologyMismatch, NotOutConnected };

    Kind kind;
    std::vector<std::size_t> links;
    std::string message;
};

struct ValidityReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] std::vector<std::string> messages() const;
};

// Checks every standing assumption on R. Throws StructuralError if R is not
// |E| x |E|; everything else is reported as a violation.
[[nodiscard]] ValidityReport validate_routing(const RoutingSpec& spec);

// Every link must reach (through R(i, j) > 0 edges, zero steps allowed) a link
// whose row sum is below 1 - row_sum_tolerance.
[[nodiscard]] bool check_out_connected(const RoutingSpec& spec);

// Links that cannot reach any deficient row. Empty iff out-connected.
[[nodiscard]] std::vector<std::size_t> trapped_links(const RoutingSpec& spec);

// Weighted max-norm ||v|| = max_i |v_i| / weights_i under which R^T is a strict
// contraction with factor `contraction_factor`.
struct WeightedNorm {
    Vector weights;
    double contraction_factor = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }

    [[nodiscard]] double norm(const Eigen::Ref<const Vector>& v) const;

    // Induced operator norm of A: max_i sum_j |A_ij| w_j / w_i.
    [[nodiscard]] double induced(const Eigen::Ref<const Matrix>& A) const;

    // max_i w_i / min_i w_i. Converts max-norm Lipschitz bounds into this norm.
    [[nodiscard]] double distortion() const;

    static WeightedNorm unit(std::size_t n);
};

// Solves (I - R^T) u = 1 and certifies ||R^T|| <= rho < 1 in the u-weighted
// max-norm. Throws CertificateError when no certificate below one is obtained.
[[nodiscard]] WeightedNorm build_weighted_norm(const RoutingSpec& spec);

// a = (I - R^T)^{-1} lambda, the stationary outflow. Throws CertificateError if
// the system is singular or the solution is not nonnegative.
[[nodiscard]] Vector equilibrium_outflow(const RoutingSpec& spec, const Eigen::Ref<const Vector>& lambda);

// I - R^T, used by every mass-balance computation.
[[nodiscard]] Matrix transfer_matrix(const RoutingSpec& spec);

}  // namespace flownet
