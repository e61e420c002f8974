#include "flownet/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <type_traits>

#include "flownet/errors.hpp"

namespace flownet {

Vector Controller::operator()(const Eigen::Ref<const Vector>& x) const {
    Vector out = Vector::Zero(x.size());
    evaluate(x, out);
    return out;
}

// ---------------------------------------------------------------------------

ConstantController::ConstantController(std::vector<std::size_t> links, std::vector<double> values)
    : Controller(std::move(links), 0.0), values_(std::move(values)) {
    if (values_.size() != this->links().size()) {
        throw StructuralError("constant controller: one value per link required");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v < 0.0) throw StructuralError("constant controller: values must be finite and >= 0");
    }
}

void ConstantController::evaluate(const Eigen::Ref<const Vector>& /*x*/, Eigen::Ref<Vector> out) const {
    const auto& ls = links();
    for (std::size_t k = 0; k < ls.size(); ++k) out(static_cast<Eigen::Index>(ls[k])) = values_[k];
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> gpa_links(const GpaPhaseSpec& spec) {
    if (!(spec.kappa > 0.0) || !std::isfinite(spec.kappa)) {
        throw StructuralError("gpa controller: kappa must be positive");
    }
    std::vector<std::size_t> links;
    std::set<std::size_t> seen;
    for (const auto& phase : spec.phases) {
        if (phase.empty()) throw StructuralError("gpa controller: empty phase");
        for (auto i : phase) {
            if (!seen.insert(i).second) throw StructuralError("gpa controller: link served by two phases");
            links.push_back(i);
        }
    }
    if (links.empty()) throw StructuralError("gpa controller: no phases");
    return links;
}

}  // namespace

Vector gpa_evaluate(const GpaPhaseSpec& spec, const Eigen::Ref<const Vector>& x) {
    Vector out = Vector::Zero(x.size());
    double total = 0.0;
    for (const auto& phase : spec.phases)
        for (auto i : phase) total += x(static_cast<Eigen::Index>(i));
    const double denom = total + spec.kappa;
    for (const auto& phase : spec.phases) {
        double share = 0.0;
        for (auto i : phase) share += x(static_cast<Eigen::Index>(i));
        for (auto i : phase) out(static_cast<Eigen::Index>(i)) = share / denom;
    }
    return out;
}

double gpa_lipschitz_bound(const GpaPhaseSpec& spec) {
    std::size_t n = 0;
    for (const auto& phase : spec.phases) n += phase.size();
    std::size_t worst = 0;
    for (const auto& phase : spec.phases) worst = std::max({worst, phase.size(), n - phase.size()});
    return static_cast<double>(worst) / spec.kappa;
}

GpaController::GpaController(GpaPhaseSpec spec)
    : Controller(gpa_links(spec), gpa_lipschitz_bound(spec)), spec_(std::move(spec)) {}

void GpaController::evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
    double total = 0.0;
    for (auto i : links()) total += x(static_cast<Eigen::Index>(i));
    const double denom = total + spec_.kappa;
    for (const auto& phase : spec_.phases) {
        double share = 0.0;
        for (auto i : phase) share += x(static_cast<Eigen::Index>(i));
        for (auto i : phase) out(static_cast<Eigen::Index>(i)) = share / denom;
    }
}

// ---------------------------------------------------------------------------

double Demand::operator()(double x) const {
    switch (kind) {
        case Kind::Linear:
            return slope * x;
        case Kind::Saturating:
            return capacity * x / (x + kappa);
    }
    return 0.0;
}

double Demand::lipschitz() const {
    switch (kind) {
        case Kind::Linear:
            return slope;
        case Kind::Saturating:
            return capacity / kappa;
    }
    return 0.0;
}

double Supply::operator()(double x) const { return std::max(max_flow - slope * x, 0.0); }

namespace {

void check_ctm(const CtmLinkSpec& s) {
    const auto& d = s.demand;
    if (d.kind == Demand::Kind::Linear && !(d.slope > 0.0)) {
        throw StructuralError("ctm demand: slope must be positive");
    }
    if (d.kind == Demand::Kind::Saturating && !(d.capacity > 0.0 && d.kappa > 0.0)) {
        throw StructuralError("ctm demand: capacity and kappa must be positive");
    }
    if (!(s.supply.max_flow >= 0.0) || !(s.supply.slope >= 0.0)) {
        throw StructuralError("ctm supply: max_flow and slope must be nonnegative");
    }
    if (s.link == s.downstream) throw StructuralError("ctm link cannot be its own downstream");
}

std::vector<std::size_t> ctm_links(const std::vector<CtmLinkSpec>& spec) {
    std::vector<std::size_t> links;
    std::set<std::size_t> seen;
    for (const auto& s : spec) {
        check_ctm(s);
        if (!seen.insert(s.link).second) throw StructuralError("ctm controller: link configured twice");
        links.push_back(s.link);
    }
    return links;
}

double ctm_lipschitz(const std::vector<CtmLinkSpec>& spec) {
    double l = 0.0;
    for (const auto& s : spec) l = std::max({l, s.demand.lipschitz(), s.supply.lipschitz()});
    return l;
}

}  // namespace

Vector ctm_evaluate(const std::vector<CtmLinkSpec>& spec, const Eigen::Ref<const Vector>& x) {
    Vector out = Vector::Zero(x.size());
    for (const auto& s : spec) {
        out(static_cast<Eigen::Index>(s.link)) =
            std::min(s.demand(x(static_cast<Eigen::Index>(s.link))), s.supply(x(static_cast<Eigen::Index>(s.downstream))));
    }
    return out;
}

CtmController::CtmController(std::vector<CtmLinkSpec> spec)
    : Controller(ctm_links(spec), ctm_lipschitz(spec)), spec_(std::move(spec)) {}

void CtmController::evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
    for (const auto& s : spec_) {
        out(static_cast<Eigen::Index>(s.link)) =
            std::min(s.demand(x(static_cast<Eigen::Index>(s.link))), s.supply(x(static_cast<Eigen::Index>(s.downstream))));
    }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> union_links(const std::vector<ControllerPtr>& parts, std::size_t n) {
    std::vector<int> owner(n, -1);
    std::vector<std::size_t> all;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        if (!parts[p]) throw StructuralError("compose: null controller");
        for (auto i : parts[p]->links()) {
            if (i >= n) throw StructuralError("compose: controller link out of range");
            if (owner[i] >= 0) throw StructuralError("compose: link " + std::to_string(i) + " controlled twice");
            owner[i] = static_cast<int>(p);
            all.push_back(i);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] < 0) throw StructuralError("compose: link " + std::to_string(i) + " has no controller");
    }
    std::sort(all.begin(), all.end());
    return all;
}

double max_lipschitz(const std::vector<ControllerPtr>& parts) {
    double l = 0.0;
    for (const auto& p : parts) l = std::max(l, p->lipschitz());
    return l;
}

}  // namespace

CompositeController::CompositeController(std::vector<ControllerPtr> parts, std::size_t link_count)
    : Controller(union_links(parts, link_count), max_lipschitz(parts)), parts_(std::move(parts)) {}

void CompositeController::evaluate(const Eigen::Ref<const Vector>& x, Eigen::Ref<Vector> out) const {
    for (const auto& p : parts_) p->evaluate(x, out);
}

ControllerPtr compose(std::vector<ControllerPtr> parts, std::size_t link_count) {
    return std::make_shared<CompositeController>(std::move(parts), link_count);
}

ControllerPtr make_controller(const ControllerConfig& config) {
    return std::visit(
        [](const auto& c) -> ControllerPtr {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ConstantSpec>) {
                return std::make_shared<ConstantController>(c.links, c.values);
            } else if constexpr (std::is_same_v<T, GpaPhaseSpec>) {
                return std::make_shared<GpaController>(c);
            } else {
                return std::make_shared<CtmController>(c.links);
            }
        },
        config);
}

ControllerPtr build_controller(const std::vector<ControllerConfig>& configs, std::size_t link_count) {
    std::vector<ControllerPtr> parts;
    parts.reserve(configs.size());
    for (const auto& c : configs) parts.push_back(make_controller(c));
    return compose(std::move(parts), link_count);
}

// ---------------------------------------------------------------------------

double estimate_lipschitz(const Controller& ctrl, const Eigen::Ref<const Vector>& lo,
                          const Eigen::Ref<const Vector>& hi, std::size_t samples, const WeightedNorm& norm,
                          std::uint64_t seed) {
    const auto n = lo.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw = [&] {
        Vector x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
        return x;
    };

    double best = 0.0;
    const auto probe = [&](const Vector& a, const Vector& b) {
        const double dx = norm.norm(a - b);
        if (dx <= 0.0) return;
        best = std::max(best, norm.norm(ctrl(a) - ctrl(b)) / dx);
    };

    const Vector span = hi - lo;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector a = draw();
        probe(a, draw());
        // Local pair: small perturbation resolves the steepest slopes better than far pairs.
        Vector b = a;
        for (Eigen::Index i = 0; i < n; ++i) {
            b(i) = std::clamp(a(i) + 1e-4 * span(i) * (2.0 * unit(rng) - 1.0), lo(i), hi(i));
        }
        probe(a, b);
    }
    return best;
}

}  // namespace flownet
