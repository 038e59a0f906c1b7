#pragma once

#include <cmath>

#include "nlstop/gain.hpp"
#include "nlstop/grid.hpp"
#include "nlstop/risk_mapping.hpp"

namespace nlstop {

// Parameters of a candidate value function h: on [y,z] it is the risk value
// of the exit law of Brownian motion started at x and absorbed at y or z,
// with boundary values beta at y and gamma at z; outside [y,z] it is +inf.
struct HParams {
  double y;
  double z;
  double beta;
  double gamma;
};

inline constexpr double kDomTol = 1e-9;
inline constexpr double kStopTol = 1e-9;

// P(hit y before z | start at x) = (z - x) / (z - y) for x in [y,z].
double exit_prob(double x, double y, double z);

// h at x: beta at y, gamma at z, two-point risk value strictly inside,
// +inf on [0,1] outside [y,z]. x outside [0,1] is an error.
double h_eval(const RiskMapping& rm, const HParams& hp, double x);

// dh/dx on [y,z], one-sided at the endpoints. Closed forms for linear and
// entropic, chain rule for custom mappings with a supplied two-point
// derivative, central finite differences (step 1e-5) otherwise. Throws
// UnsupportedOperation for the worst-case mapping.
double h_deriv(const RiskMapping& rm, const HParams& hp, double x);

// Membership in the candidate family: boundary values in [0, g_bar + 2] and
// either the full domain [0,1], or a domain pinned to one endpoint with the
// interior-side boundary value above g_bar + 1.
bool in_H(const HParams& hp, double g_bar);

// True when h >= g - tol at every grid point of [y,z].
bool dominates(const RiskMapping& rm, const HParams& hp, const GainSpec& g, const Grid& grid,
               double tol = kDomTol);

// Inlined two-point evaluation with per-candidate constants hoisted out,
// for the inner loops of the majorant search. Agrees with eval_two_point
// up to rounding; eval_two_point stays the reference.
class TwoPointKernel {
 public:
  TwoPointKernel(const RiskMapping& rm, double beta, double gamma)
      : kind_(rm.kind()), rm_(&rm), beta_(beta), gamma_(gamma) {
    if (kind_ == RiskKind::Entropic) {
      a_ = std::exp(-beta);
      b_ = std::exp(-gamma);
    } else if (kind_ == RiskKind::WorstCase) {
      m_ = beta < gamma ? beta : gamma;
    }
  }

  double operator()(double p) const {
    switch (kind_) {
      case RiskKind::Linear:
        return p * beta_ + (1.0 - p) * gamma_;
      case RiskKind::Entropic:
        return -std::log(p * a_ + (1.0 - p) * b_);
      case RiskKind::WorstCase:
        if (p >= 1.0 - kSupportTol) return beta_;
        if (p <= kSupportTol) return gamma_;
        return m_;
      case RiskKind::Custom:
        return eval_two_point(*rm_, TwoPointLaw{p, beta_, gamma_});
    }
    return 0.0;
  }

 private:
  RiskKind kind_;
  const RiskMapping* rm_;
  double beta_, gamma_;
  double a_ = 0.0, b_ = 0.0, m_ = 0.0;
};

}  // namespace nlstop
