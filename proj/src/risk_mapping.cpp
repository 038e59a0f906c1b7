#include "nlstop/risk_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace nlstop {

namespace {

double kahan_sum(const Eigen::ArrayXd& v) {
  double s = 0.0, c = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double y = v(i) - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

void DiscreteLaw::validate() const {
  if (outcomes.size() != probabilities.size())
    throw std::invalid_argument("law outcomes and probabilities differ in length");
  if (outcomes.size() == 0) throw std::invalid_argument("law must have at least one outcome");
  for (Eigen::Index i = 0; i < probabilities.size(); ++i)
    if (!(probabilities(i) >= 0.0))
      throw std::invalid_argument("law probabilities must be nonnegative");
  double total = kahan_sum(probabilities);
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "law probabilities sum to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
}

DiscreteLaw DiscreteLaw::point_mass(double v) {
  DiscreteLaw law;
  law.outcomes = Eigen::ArrayXd::Constant(1, v);
  law.probabilities = Eigen::ArrayXd::Constant(1, 1.0);
  return law;
}

DiscreteLaw DiscreteLaw::two_point(double p_first, double v_first, double v_second) {
  DiscreteLaw law;
  law.outcomes = Eigen::ArrayXd(2);
  law.outcomes << v_first, v_second;
  law.probabilities = Eigen::ArrayXd(2);
  law.probabilities << p_first, 1.0 - p_first;
  return law;
}

void TwoPointLaw::validate() const {
  if (!(p_first >= 0.0 && p_first <= 1.0))
    throw std::invalid_argument("two-point law needs p_first in [0,1]");
  if (!std::isfinite(v_first) || !std::isfinite(v_second))
    throw std::invalid_argument("two-point law outcomes must be finite");
}

RiskMapping RiskMapping::linear() { return RiskMapping(RiskKind::Linear, "linear"); }
RiskMapping RiskMapping::entropic() { return RiskMapping(RiskKind::Entropic, "entropic"); }
RiskMapping RiskMapping::worst_case() { return RiskMapping(RiskKind::WorstCase, "worst-case"); }

RiskMapping RiskMapping::custom(std::string name, std::function<double(const DiscreteLaw&)> eval) {
  RiskMapping rm(RiskKind::Custom, std::move(name));
  rm.eval_ = std::move(eval);
  return rm;
}

RiskMapping RiskMapping::custom(std::string name, std::function<double(const DiscreteLaw&)> eval,
                                std::function<double(const TwoPointLaw&)> two_point_dp) {
  RiskMapping rm = custom(std::move(name), std::move(eval));
  rm.two_point_dp_ = std::move(two_point_dp);
  return rm;
}

namespace {

// Reductions assume outcomes sorted ascending. The entropic sum is shifted by
// the smallest outcome so exp never overflows.
double reduce_linear(const Eigen::ArrayXd& v, const Eigen::ArrayXd& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += p(i) * v(i);
  return s;
}

double reduce_entropic(const Eigen::ArrayXd& v, const Eigen::ArrayXd& p) {
  double m = v(0);
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += p(i) * std::exp(m - v(i));
  return m - std::log(s);
}

double reduce_worst(const Eigen::ArrayXd& v, const Eigen::ArrayXd& p) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (p(i) > kSupportTol) return v(i);
  throw std::invalid_argument("law has no outcome with mass above the support threshold");
}

DiscreteLaw sorted_law(const DiscreteLaw& law) {
  Eigen::Index n = law.outcomes.size();
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (law.outcomes(a) != law.outcomes(b)) return law.outcomes(a) < law.outcomes(b);
    return law.probabilities(a) < law.probabilities(b);
  });
  DiscreteLaw out;
  out.outcomes.resize(n);
  out.probabilities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.outcomes(i) = law.outcomes(idx[static_cast<size_t>(i)]);
    out.probabilities(i) = law.probabilities(idx[static_cast<size_t>(i)]);
  }
  return out;
}

}  // namespace

double eval_discrete(const RiskMapping& rm, const DiscreteLaw& law) {
  law.validate();
  DiscreteLaw s = sorted_law(law);
  switch (rm.kind()) {
    case RiskKind::Linear: return reduce_linear(s.outcomes, s.probabilities);
    case RiskKind::Entropic: return reduce_entropic(s.outcomes, s.probabilities);
    case RiskKind::WorstCase: return reduce_worst(s.outcomes, s.probabilities);
    case RiskKind::Custom: return rm.eval_custom(s);
  }
  throw std::logic_error("unreachable");
}

double eval_two_point(const RiskMapping& rm, const TwoPointLaw& law) {
  law.validate();
  const double p = law.p_first, v1 = law.v_first, v2 = law.v_second;
  switch (rm.kind()) {
    case RiskKind::Linear:
      return p * v1 + (1.0 - p) * v2;
    case RiskKind::Entropic: {
      double m = std::min(v1, v2);
      return m - std::log(p * std::exp(m - v1) + (1.0 - p) * std::exp(m - v2));
    }
    case RiskKind::WorstCase:
      // Mirrors the sorted-support rule of eval_discrete bit for bit.
      if (v1 <= v2) return p > kSupportTol ? v1 : v2;
      return (1.0 - p) > kSupportTol ? v2 : v1;
    case RiskKind::Custom:
      return eval_discrete(rm, DiscreteLaw::two_point(p, v1, v2));
  }
  throw std::logic_error("unreachable");
}

bool AxiomReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

constexpr double kAxiomTol = 1e-9;

std::string law_to_string(const DiscreteLaw& law) {
  std::ostringstream os;
  os.precision(17);
  os << "outcomes=[";
  for (Eigen::Index i = 0; i < law.outcomes.size(); ++i) os << (i ? "," : "") << law.outcomes(i);
  os << "] probs=[";
  for (Eigen::Index i = 0; i < law.probabilities.size(); ++i) os << (i ? "," : "") << law.probabilities(i);
  os << "]";
  return os.str();
}

DiscreteLaw sample_law(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> size_dist(1, 8);
  std::uniform_real_distribution<double> out_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> w_dist(0.05, 1.0);
  int k = size_dist(gen);
  DiscreteLaw law;
  law.outcomes.resize(k);
  law.probabilities.resize(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    law.outcomes(i) = out_dist(gen);
    law.probabilities(i) = w_dist(gen);
    total += law.probabilities(i);
  }
  law.probabilities /= total;
  return law;
}

}  // namespace

AxiomReport check_axioms(const RiskMapping& rm, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("axiom check needs at least one trial");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> const_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> shift_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> bump_dist(0.0, 1.0);

  AxiomCheck norm{"normalisation", true, ""};
  AxiomCheck mono{"monotonicity", true, ""};
  AxiomCheck trans{"translation-invariance", true, ""};

  for (int t = 0; t < trials; ++t) {
    double c = const_dist(gen);
    DiscreteLaw law = sample_law(gen);
    Eigen::ArrayXd bump(law.outcomes.size());
    for (Eigen::Index i = 0; i < bump.size(); ++i) bump(i) = bump_dist(gen);
    double shift = shift_dist(gen);

    if (norm.pass) {
      double got = eval_discrete(rm, DiscreteLaw::point_mass(c));
      if (!(std::abs(got - c) <= kAxiomTol)) {
        norm.pass = false;
        std::ostringstream os;
        os.precision(17);
        os << "point mass at " << c << " maps to " << got;
        norm.witness = os.str();
      }
    }
    if (mono.pass) {
      DiscreteLaw bigger = law;
      bigger.outcomes += bump;
      double lo = eval_discrete(rm, law);
      double hi = eval_discrete(rm, bigger);
      if (!(hi >= lo - kAxiomTol)) {
        mono.pass = false;
        mono.witness = law_to_string(law) + " raised pointwise lowers the value from " +
                       std::to_string(lo) + " to " + std::to_string(hi);
      }
    }
    if (trans.pass) {
      DiscreteLaw shifted = law;
      shifted.outcomes += shift;
      double base = eval_discrete(rm, law);
      double got = eval_discrete(rm, shifted);
      if (!(std::abs(got - (base + shift)) <= kAxiomTol)) {
        trans.pass = false;
        std::ostringstream os;
        os.precision(17);
        os << law_to_string(law) << " shifted by " << shift << " maps to " << got
           << ", expected " << base + shift;
        trans.witness = os.str();
      }
    }
  }

  AxiomReport report;
  report.checks = {norm, mono, trans};
  return report;
}

AxiomCheck probe_strict_monotonicity(const RiskMapping& rm, int trials, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> p_dist(0.05, 0.95);
  std::uniform_real_distribution<double> v_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> d_dist(0.1, 1.0);
  AxiomCheck check{"strict-monotonicity", true, ""};
  for (int t = 0; t < trials; ++t) {
    TwoPointLaw law{p_dist(gen), v_dist(gen), v_dist(gen)};
    double d = d_dist(gen);
    double base = eval_two_point(rm, law);
    TwoPointLaw raised = law;
    raised.v_first += d;
    double got = eval_two_point(rm, raised);
    if (!(got > base)) {
      check.pass = false;
      std::ostringstream os;
      os.precision(17);
      os << "raising outcome " << law.v_first << " (p=" << law.p_first << ") by " << d
         << " moves the value from " << base << " to " << got;
      check.witness = os.str();
      break;
    }
  }
  return check;
}

}  // namespace nlstop
