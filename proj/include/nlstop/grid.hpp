#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace nlstop {

// Uniform partition of [0,1] including both endpoints.
struct Grid {
  Eigen::ArrayXd points;

  static Grid uniform(Eigen::Index n_points) {
    if (n_points < 3) throw std::invalid_argument("grid needs at least 3 points");
    Grid g;
    g.points = Eigen::ArrayXd::LinSpaced(n_points, 0.0, 1.0);
    // LinSpaced guarantees exact endpoints; force them anyway so downstream
    // comparisons against 0 and 1 can be exact.
    g.points(0) = 0.0;
    g.points(n_points - 1) = 1.0;
    return g;
  }

  Eigen::Index size() const { return points.size(); }
  double spacing() const { return 1.0 / static_cast<double>(points.size() - 1); }
  double operator[](Eigen::Index i) const { return points(i); }
};

}  // namespace nlstop
