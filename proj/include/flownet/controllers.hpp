#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "flownet/network.hpp"

namespace flownet {

// Feedback map zeta: X -> R_+^E restricted to the links it owns. Reads may cross
// links; writes only touch links(). Lipschitz constants are stated in the plain
// max-norm; multiply by WeightedNorm::distortion() to move to a weighted norm.
class Controller {
public:
    virtual ~Controller() = default;

    // Writes zeta_i(x) into out[i] for every owned link i. Other entries untouched.
    virtual void evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const = 0;

    [[nodiscard]] const std::vector<std::size_t>& links() const noexcept { return links_; }
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }

    // Full-length vector with zeros on links this controller does not own.
    [[nodiscard]] Vector operator()(const Eigen::Ref<const Vector>& x) const;

protected:
    Controller(std::vector<std::size_t> links, double lipschitz)
        : links_(std::move(links)), lipschitz_(lipschitz) {}

private:
    std::vector<std::size_t> links_;
    double lipschitz_;
};

using ControllerPtr = std::shared_ptr<const Controller>;

// ---------------------------------------------------------------------------
// Constant outflow caps, e.g. unit-capacity exits at the network boundary.

class ConstantController final : public Controller {
public:
    ConstantController(std::vector<std::size_t> links, std::vector<double> values);

    void evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Generalized proportional allocation at one junction. Each link in phase p gets
//   zeta_i(x) = sum_{j in p} x_j / (sum_{j in junction} x_j + kappa),
// where kappa > 0 models the switching overhead between phases.

struct GpaPhaseSpec {
    std::vector<std::vector<std::size_t>> phases;
    double kappa = 1.0;

    bool operator==(const GpaPhaseSpec&) const = default;
};

[[nodiscard]] Vector gpa_evaluate(const GpaPhaseSpec& spec, const Eigen::Ref<const Vector>& x);

// max over phases of max(|p|, n - |p|) / kappa; equals 2/kappa for two phases of two links.
[[nodiscard]] double gpa_lipschitz_bound(const GpaPhaseSpec& spec);

class GpaController final : public Controller {
public:
    explicit GpaController(GpaPhaseSpec spec);

    void evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;

    [[nodiscard]] const GpaPhaseSpec& spec() const noexcept { return spec_; }

private:
    GpaPhaseSpec spec_;
};

// ---------------------------------------------------------------------------
// Cell transmission links: zeta_i(x) = min(d_i(x_i), s_j(x_j)) with j the
// configured downstream link.

struct Demand {
    enum class Kind { Linear, Saturating };

    Kind kind = Kind::Linear;
    double slope = 1.0;     // Linear: d(x) = slope * x
    double capacity = 1.0;  // Saturating: d(x) = capacity * x / (x + kappa)
    double kappa = 1.0;

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double lipschitz() const;

    bool operator==(const Demand&) const = default;
};

// s(x) = max(max_flow - slope * x, 0). Non-increasing for slope >= 0.
struct Supply {
    double max_flow = 1.0;
    double slope = 1.0;

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double lipschitz() const { return slope; }

    bool operator==(const Supply&) const = default;
};

struct CtmLinkSpec {
    std::size_t link = 0;
    std::size_t downstream = 0;
    Demand demand;
    Supply supply;  // supply function of the downstream link

    bool operator==(const CtmLinkSpec&) const = default;
};

[[nodiscard]] Vector ctm_evaluate(const std::vector<CtmLinkSpec>& spec, const Eigen::Ref<const Vector>& x);

class CtmController final : public Controller {
public:
    explicit CtmController(std::vector<CtmLinkSpec> spec);

    void evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;

    [[nodiscard]] const std::vector<CtmLinkSpec>& spec() const noexcept { return spec_; }

private:
    std::vector<CtmLinkSpec> spec_;
};

// ---------------------------------------------------------------------------
// Union of controllers over disjoint link sets that jointly cover 0..n-1.

class CompositeController final : public Controller {
public:
    // Throws StructuralError on overlap or a coverage gap.
    CompositeController(std::vector<ControllerPtr> parts, std::size_t link_count);

    void evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const override;

    [[nodiscard]] const std::vector<ControllerPtr>& parts() const noexcept { return parts_; }

private:
    std::vector<ControllerPtr> parts_;
};

[[nodiscard]] ControllerPtr compose(std::vector<ControllerPtr> parts, std::size_t link_count);

// ---------------------------------------------------------------------------
// Declarative controller descriptions, as stored in scenario files.

struct ConstantSpec {
    std::vector<std::size_t> links;
    std::vector<double> values;

    bool operator==(const ConstantSpec&) const = default;
};

struct CtmSpec {
    std::vector<CtmLinkSpec> links;

    bool operator==(const CtmSpec&) const = default;
};

using ControllerConfig = std::variant<ConstantSpec, GpaPhaseSpec, CtmSpec>;

[[nodiscard]] ControllerPtr make_controller(const ControllerConfig& config);

// Builds every part and composes them over 0..link_count-1.
[[nodiscard]] ControllerPtr build_controller(const std::vector<ControllerConfig>& configs, std::size_t link_count);

// Largest observed ||zeta(x) - zeta(x')|| / ||x - x'|| in `norm` over random
// pairs drawn from the box [lo, hi]. A sanity check for the declared constant.
[[nodiscard]] double estimate_lipschitz(const Controller& ctrl, const Eigen::Ref<const Vector>& lo,
                                        const Eigen::Ref<const Vector>& hi, std::size_t samples,
                                        const WeightedNorm& norm, std::uint64_t seed = 7);

}  // namespace flownet
