#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nlstop {

// Finitely supported law, outcomes paired with probabilities.
struct DiscreteLaw {
  Eigen::ArrayXd outcomes;
  Eigen::ArrayXd probabilities;

  // Throws std::invalid_argument on negative weights, a total mass off 1 by
  // more than 1e-12, or mismatched lengths.
  void validate() const;

  static DiscreteLaw point_mass(double v);
  static DiscreteLaw two_point(double p_first, double v_first, double v_second);
};

// Law of the exit value of the absorbed path: v_first with probability
// p_first, v_second otherwise.
struct TwoPointLaw {
  double p_first;
  double v_first;
  double v_second;
  void validate() const;
};

enum class RiskKind { Linear, Entropic, WorstCase, Custom };

// Law-invariant mapping from discrete laws to the reals, required to satisfy
//   normalisation          rho(point mass at c) = c
//   monotonicity           pointwise-larger outcomes never decrease the value
//   translation invariance shifting all outcomes by c shifts the value by c
// Built-ins: linear (mean), entropic (-log E[exp(-Z)]), worst-case
// (smallest outcome carrying positive mass). Instances are immutable and
// safe to share across threads.
class RiskMapping {
 public:
  static RiskMapping linear();
  static RiskMapping entropic();
  static RiskMapping worst_case();
  static RiskMapping custom(std::string name, std::function<double(const DiscreteLaw&)> eval);
  // Custom mapping with an analytic partial derivative of the two-point value
  // in p_first, used instead of finite differences where available.
  static RiskMapping custom(std::string name, std::function<double(const DiscreteLaw&)> eval,
                            std::function<double(const TwoPointLaw&)> two_point_dp);

  RiskKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool has_two_point_dp() const { return static_cast<bool>(two_point_dp_); }

  double eval_custom(const DiscreteLaw& law) const { return eval_(law); }
  double two_point_dp(const TwoPointLaw& law) const { return two_point_dp_(law); }

 private:
  RiskMapping(RiskKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  RiskKind kind_;
  std::string name_;
  std::function<double(const DiscreteLaw&)> eval_;
  std::function<double(const TwoPointLaw&)> two_point_dp_;
};

// Probabilities at or below this are treated as zero by the worst-case
// mapping, so Monte Carlo noise cannot spuriously enlarge the support.
inline constexpr double kSupportTol = 1e-12;

double eval_two_point(const RiskMapping& rm, const TwoPointLaw& law);

// Evaluates rm on a validated law. Outcomes are reduced in a canonical
// (sorted) order, so permutations of the support cannot change the result.
double eval_discrete(const RiskMapping& rm, const DiscreteLaw& law);

struct AxiomCheck {
  std::string axiom;
  bool pass;
  std::string witness;  // empty when pass
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  bool all_pass() const;
};

// Randomized check of the three axioms on `trials` sampled laws.
// Deterministic for a fixed seed.
AxiomReport check_axioms(const RiskMapping& rm, int trials, std::uint64_t seed);

// Strictness probe for diagnostics: looks for two-point laws where raising
// an outcome with positive weight fails to strictly raise the value.
AxiomCheck probe_strict_monotonicity(const RiskMapping& rm, int trials, std::uint64_t seed);

}  // namespace nlstop
