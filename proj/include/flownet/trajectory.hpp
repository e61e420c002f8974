#pragma once

#include <cstddef>

#include "flownet/network.hpp"

namespace flownet {

// Uniform grid t_k = t0 + k h, k = 0..steps.
struct TimeGrid {
    double t0 = 0.0;
    double h = 1.0;
    std::size_t steps = 1;

    [[nodiscard]] std::size_t samples() const noexcept { return steps + 1; }
    [[nodiscard]] double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * h; }
    [[nodiscard]] double end() const noexcept { return time(steps); }

    // Sub-grid covering samples [first, first + steps].
    [[nodiscard]] TimeGrid window(std::size_t first, std::size_t steps) const;

    bool operator==(const TimeGrid&) const = default;
};

// Samples of a vector-valued path on a TimeGrid. Row k holds the value at t_k;
// column i is the path of link i. Conceptually the piecewise-linear interpolant.
struct Trajectory {
    TimeGrid grid;
    Matrix values;

    static Trajectory zeros(const TimeGrid& grid, std::size_t dim);
    static Trajectory constant(const TimeGrid& grid, const Eigen::Ref<const Vector>& value);

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(values.cols()); }
    [[nodiscard]] Vector at(std::size_t k) const { return values.row(static_cast<Eigen::Index>(k)).transpose(); }

    // Rows [first, first + steps] as a trajectory on the matching sub-grid.
    [[nodiscard]] Trajectory window(std::size_t first, std::size_t steps) const;
};

// Throws StructuralError unless both trajectories share grid and dimension.
void require_same_shape(const Trajectory& a, const Trajectory& b);

// || sup_k |v(t_k)| ||: running absolute sup per link, then the weighted norm.
[[nodiscard]] double traj_norm(const Trajectory& v, const WeightedNorm& norm);

// traj_norm(a - b)
[[nodiscard]] double traj_distance(const Trajectory& a, const Trajectory& b, const WeightedNorm& norm);

// Plain max |a - b| over samples and links.
[[nodiscard]] double sup_distance(const Trajectory& a, const Trajectory& b);

}  // namespace flownet
