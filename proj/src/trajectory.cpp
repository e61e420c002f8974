#include "flownet/trajectory.hpp"

#include <cmath>

#include "flownet/errors.hpp"

namespace flownet {

TimeGrid TimeGrid::window(std::size_t first, std::size_t n) const {
    if (first + n > steps) throw StructuralError("grid window out of range");
    return TimeGrid{time(first), h, n};
}

Trajectory Trajectory::zeros(const TimeGrid& grid, std::size_t dim) {
    return Trajectory{grid, Matrix::Zero(static_cast<Eigen::Index>(grid.samples()), static_cast<Eigen::Index>(dim))};
}

Trajectory Trajectory::constant(const TimeGrid& grid, const Eigen::Ref<const Vector>& value) {
    Trajectory t{grid, Matrix(static_cast<Eigen::Index>(grid.samples()), value.size())};
    t.values.rowwise() = value.transpose();
    return t;
}

Trajectory Trajectory::window(std::size_t first, std::size_t n) const {
    return Trajectory{grid.window(first, n),
                      values.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(n + 1))};
}

void require_same_shape(const Trajectory& a, const Trajectory& b) {
    if (a.grid.steps != b.grid.steps || a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
        throw StructuralError("trajectories live on different grids or dimensions");
    }
    if (std::abs(a.grid.h - b.grid.h) > 1e-12 * a.grid.h || std::abs(a.grid.t0 - b.grid.t0) > 1e-9 * (1.0 + std::abs(a.grid.t0))) {
        throw StructuralError("trajectories live on different grids");
    }
}

double traj_norm(const Trajectory& v, const WeightedNorm& norm) {
    if (v.values.size() == 0) return 0.0;
    if (static_cast<std::size_t>(v.values.cols()) != norm.size()) {
        throw StructuralError("trajectory dimension does not match the norm");
    }
    const Vector sup = v.values.cwiseAbs().colwise().maxCoeff().transpose();
    return norm.norm(sup);
}

double traj_distance(const Trajectory& a, const Trajectory& b, const WeightedNorm& norm) {
    require_same_shape(a, b);
    return traj_norm(Trajectory{a.grid, a.values - b.values}, norm);
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
    require_same_shape(a, b);
    if (a.values.size() == 0) return 0.0;
    return (a.values - b.values).cwiseAbs().maxCoeff();
}

}  // namespace flownet
