#include "nlstop/h_family.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "nlstop/errors.hpp"

namespace nlstop {

namespace {

void check_window(double y, double z) {
  if (!(0.0 <= y && y < z && z <= 1.0))
    throw std::invalid_argument("h window needs 0 <= y < z <= 1");
}

}  // namespace

double exit_prob(double x, double y, double z) {
  check_window(y, z);
  if (!(y <= x && x <= z)) throw std::invalid_argument("exit_prob needs x in [y,z]");
  return (z - x) / (z - y);
}

double h_eval(const RiskMapping& rm, const HParams& hp, double x) {
  check_window(hp.y, hp.z);
  if (!(0.0 <= x && x <= 1.0)) throw std::invalid_argument("h_eval needs x in [0,1]");
  if (x < hp.y || x > hp.z) return std::numeric_limits<double>::infinity();
  if (x == hp.y) return hp.beta;
  if (x == hp.z) return hp.gamma;
  return eval_two_point(rm, TwoPointLaw{exit_prob(x, hp.y, hp.z), hp.beta, hp.gamma});
}

double h_deriv(const RiskMapping& rm, const HParams& hp, double x) {
  check_window(hp.y, hp.z);
  if (!(hp.y <= x && x <= hp.z)) throw std::invalid_argument("h_deriv needs x in [y,z]");
  const double len = hp.z - hp.y;
  switch (rm.kind()) {
    case RiskKind::Linear:
      return (hp.gamma - hp.beta) / len;
    case RiskKind::Entropic: {
      // h = -log u with u affine in x; shift by min(beta,gamma) for safety.
      double m = std::min(hp.beta, hp.gamma);
      double ea = std::exp(m - hp.beta), eb = std::exp(m - hp.gamma);
      double u = (ea * (hp.z - x) + eb * (x - hp.y)) / len;
      double du = (eb - ea) / len;
      return -du / u;
    }
    case RiskKind::WorstCase:
      throw UnsupportedOperation("worst-case mapping is not differentiable; use the closed-form oracle");
    case RiskKind::Custom: {
      if (rm.has_two_point_dp()) {
        double p = exit_prob(x, hp.y, hp.z);
        double dp_dx = -1.0 / len;
        return rm.two_point_dp(TwoPointLaw{p, hp.beta, hp.gamma}) * dp_dx;
      }
      const double step = 1e-5;
      auto f = [&](double t) { return h_eval(rm, hp, t); };
      if (x - step > hp.y && x + step < hp.z) return (f(x + step) - f(x - step)) / (2.0 * step);
      if (x + step < hp.z) return (f(x + step) - f(x)) / step;
      return (f(x) - f(x - step)) / step;
    }
  }
  throw std::logic_error("unreachable");
}

bool in_H(const HParams& hp, double g_bar) {
  check_window(hp.y, hp.z);
  const double cap = g_bar + 2.0;
  if (!(hp.beta >= 0.0 && hp.beta <= cap && hp.gamma >= 0.0 && hp.gamma <= cap)) return false;
  if (hp.y == 0.0 && hp.z == 1.0) return true;
  if (hp.z == 1.0 && hp.y > 0.0) return hp.beta > g_bar + 1.0;
  if (hp.y == 0.0 && hp.z < 1.0) return hp.gamma > g_bar + 1.0;
  return false;
}

bool dominates(const RiskMapping& rm, const HParams& hp, const GainSpec& g, const Grid& grid,
               double tol) {
  check_window(hp.y, hp.z);
  TwoPointKernel kernel(rm, hp.beta, hp.gamma);
  const double len = hp.z - hp.y;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    double x = grid[i];
    if (x < hp.y || x > hp.z) continue;
    double p = (hp.z - x) / len;
    if (kernel(p) < g(x) - tol) return false;
  }
  return true;
}

}  // namespace nlstop
