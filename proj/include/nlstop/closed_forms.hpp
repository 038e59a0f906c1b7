#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "nlstop/gain.hpp"
#include "nlstop/grid.hpp"

namespace nlstop {

// Value function sampled on a grid, with the stopping set marked.
struct ValueTable {
  Grid grid;
  Eigen::ArrayXd values;
  Eigen::Array<bool, Eigen::Dynamic, 1> stopping;
};

// Smallest concave function above the samples on a uniform grid, computed by
// an upper convex-hull sweep. Idempotent; exact at hull vertices.
Eigen::ArrayXd concave_majorant(const Eigen::ArrayXd& samples);

// Greatest convex function below the samples (mirror of concave_majorant).
Eigen::ArrayXd convex_minorant(const Eigen::ArrayXd& samples);

// Closed forms for the three built-in mappings.
// linear: concave majorant of g.
ValueTable linear_value(const GainSpec& g, const Grid& grid);
// worst-case: min of the running maxima of g from the left and from the right.
ValueTable worst_case_value(const GainSpec& g, const Grid& grid);
// entropic: -log of the convex minorant of exp(-g).
ValueTable entropic_value(const GainSpec& g, const Grid& grid);

// Maximal open intervals of non-stopping points, reported with their
// flanking stopping grid points as endpoints.
std::vector<std::pair<double, double>> continuation_intervals(const ValueTable& table);

// Piecewise linear interpolation of the table at x in [0,1].
double interp(const ValueTable& table, double x);

}  // namespace nlstop
