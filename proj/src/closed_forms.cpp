#include "nlstop/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlstop/h_family.hpp"

namespace nlstop {

Eigen::ArrayXd concave_majorant(const Eigen::ArrayXd& samples) {
  const Eigen::Index n = samples.size();
  if (n < 3) throw std::invalid_argument("concave_majorant needs at least 3 samples");
  // Upper hull of (i, f_i) by monotone chain; the grid is uniform so index
  // coordinates are fine.
  std::vector<Eigen::Index> hull;
  hull.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      Eigen::Index a = hull[hull.size() - 2], b = hull[hull.size() - 1];
      double cross = static_cast<double>(b - a) * (samples(i) - samples(a)) -
                     static_cast<double>(i - a) * (samples(b) - samples(a));
      if (cross >= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  Eigen::ArrayXd out(n);
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    Eigen::Index a = hull[k], b = hull[k + 1];
    double fa = samples(a), fb = samples(b);
    for (Eigen::Index i = a; i <= b; ++i) {
      double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      out(i) = fa + t * (fb - fa);
    }
  }
  out(hull.front()) = samples(hull.front());
  out(hull.back()) = samples(hull.back());
  return out;
}

Eigen::ArrayXd convex_minorant(const Eigen::ArrayXd& samples) {
  return -concave_majorant((-samples).eval());
}

namespace {

Eigen::Array<bool, Eigen::Dynamic, 1> stopping_mask(const Eigen::ArrayXd& values,
                                                    const Eigen::ArrayXd& gain_values) {
  Eigen::Array<bool, Eigen::Dynamic, 1> mask(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i)
    mask(i) = values(i) <= gain_values(i) + kStopTol;
  return mask;
}

}  // namespace

ValueTable linear_value(const GainSpec& g, const Grid& grid) {
  validate_gain(g, grid);
  Eigen::ArrayXd gv = sample(g, grid);
  ValueTable t;
  t.grid = grid;
  t.values = concave_majorant(gv);
  t.stopping = stopping_mask(t.values, gv);
  return t;
}

ValueTable worst_case_value(const GainSpec& g, const Grid& grid) {
  validate_gain(g, grid);
  Eigen::ArrayXd gv = sample(g, grid);
  const Eigen::Index n = gv.size();
  Eigen::ArrayXd left(n), right(n);
  left(0) = gv(0);
  for (Eigen::Index i = 1; i < n; ++i) left(i) = std::max(left(i - 1), gv(i));
  right(n - 1) = gv(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) right(i) = std::max(right(i + 1), gv(i));
  ValueTable t;
  t.grid = grid;
  t.values = left.min(right);
  t.stopping = stopping_mask(t.values, gv);
  return t;
}

ValueTable entropic_value(const GainSpec& g, const Grid& grid) {
  validate_gain(g, grid);
  Eigen::ArrayXd gv = sample(g, grid);
  Eigen::ArrayXd minorant = convex_minorant((-gv).exp().eval());
  ValueTable t;
  t.grid = grid;
  t.values = -minorant.log();
  t.stopping = stopping_mask(t.values, gv);
  return t;
}

std::vector<std::pair<double, double>> continuation_intervals(const ValueTable& table) {
  std::vector<std::pair<double, double>> out;
  const Eigen::Index n = table.grid.size();
  Eigen::Index i = 0;
  while (i < n) {
    if (table.stopping(i)) { ++i; continue; }
    Eigen::Index j = i;
    while (j + 1 < n && !table.stopping(j + 1)) ++j;
    double lo = i > 0 ? table.grid[i - 1] : table.grid[0];
    double hi = j + 1 < n ? table.grid[j + 1] : table.grid[n - 1];
    out.emplace_back(lo, hi);
    i = j + 1;
  }
  return out;
}

double interp(const ValueTable& table, double x) {
  if (!(0.0 <= x && x <= 1.0)) throw std::invalid_argument("interp needs x in [0,1]");
  const Eigen::Index n = table.grid.size();
  double pos = x * static_cast<double>(n - 1);
  Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
  double t = pos - static_cast<double>(i);
  return table.values(i) + t * (table.values(i + 1) - table.values(i));
}

}  // namespace nlstop
