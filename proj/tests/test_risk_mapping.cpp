#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nlstop/risk_mapping.hpp"

using namespace nlstop;

namespace {

RiskMapping entropic_clone() {
  // Same formula as the built-in, routed through the custom path.
  return RiskMapping::custom("entropic-clone", [](const DiscreteLaw& law) {
    double m = law.outcomes.minCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < law.outcomes.size(); ++i)
      s += law.probabilities(i) * std::exp(m - law.outcomes(i));
    return m - std::log(s);
  });
}

}  // namespace

TEST_CASE("law validation rejects malformed inputs") {
  DiscreteLaw law;
  law.outcomes = Eigen::ArrayXd::LinSpaced(3, 0.0, 2.0);
  law.probabilities = Eigen::ArrayXd::Constant(2, 0.5);
  CHECK_THROWS_AS(law.validate(), std::invalid_argument);

  law.probabilities = Eigen::ArrayXd::Constant(3, 0.4);  // mass 1.2
  CHECK_THROWS_AS(law.validate(), std::invalid_argument);

  law.probabilities.resize(3);
  law.probabilities << 0.5, 0.6, -0.1;
  CHECK_THROWS_AS(law.validate(), std::invalid_argument);

  CHECK_NOTHROW(DiscreteLaw::two_point(0.25, 1.0, 3.0).validate());
  CHECK_NOTHROW(DiscreteLaw::point_mass(2.5).validate());
}

TEST_CASE("built-in reductions match hand values") {
  DiscreteLaw law;
  law.outcomes.resize(3);
  law.outcomes << 2.0, -1.0, 0.5;
  law.probabilities.resize(3);
  law.probabilities << 0.2, 0.3, 0.5;

  CHECK(eval_discrete(RiskMapping::linear(), law) ==
        doctest::Approx(0.2 * 2.0 - 0.3 + 0.5 * 0.5).epsilon(1e-15));
  double expected = -std::log(0.2 * std::exp(-2.0) + 0.3 * std::exp(1.0) + 0.5 * std::exp(-0.5));
  CHECK(eval_discrete(RiskMapping::entropic(), law) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(eval_discrete(RiskMapping::worst_case(), law) == -1.0);
}

TEST_CASE("worst case ignores outcomes below the support threshold") {
  DiscreteLaw law;
  law.outcomes.resize(3);
  law.outcomes << -4.0, 1.0, 2.0;
  law.probabilities.resize(3);
  law.probabilities << 1e-13, 0.5, 0.5 - 1e-13;
  CHECK(eval_discrete(RiskMapping::worst_case(), law) == 1.0);

  CHECK(eval_two_point(RiskMapping::worst_case(), TwoPointLaw{1e-13, -4.0, 1.0}) == 1.0);
  CHECK(eval_two_point(RiskMapping::worst_case(), TwoPointLaw{1.0 - 1e-13, -4.0, 1.0}) == -4.0);
}

TEST_CASE("two-point evaluation agrees with the discrete path bit for bit") {
  const RiskMapping maps[] = {RiskMapping::linear(), RiskMapping::entropic(),
                              RiskMapping::worst_case(), entropic_clone()};
  const double ps[] = {0.0, 1e-13, 0.25, 0.5, 0.75, 1.0 - 1e-13, 1.0};
  const double vs[][2] = {{1.0, 3.0}, {3.0, 1.0}, {-2.5, 4.0}, {0.7, 0.7}, {5.0, -5.0}};
  for (const auto& rm : maps)
    for (double p : ps)
      for (const auto& v : vs) {
        double direct = eval_two_point(rm, TwoPointLaw{p, v[0], v[1]});
        double via_law = eval_discrete(rm, DiscreteLaw::two_point(p, v[0], v[1]));
        CHECK(direct == via_law);
      }
}

TEST_CASE("permutations of the support never change the value") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> out_dist(-5.0, 5.0);
  std::uniform_real_distribution<double> w_dist(0.01, 1.0);
  const RiskMapping maps[] = {RiskMapping::linear(), RiskMapping::entropic(),
                              RiskMapping::worst_case(), entropic_clone()};
  for (int t = 0; t < 200; ++t) {
    int k = 1 + static_cast<int>(gen() % 7);
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

    std::vector<int> perm(static_cast<size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    DiscreteLaw shuffled;
    shuffled.outcomes.resize(k);
    shuffled.probabilities.resize(k);
    for (int i = 0; i < k; ++i) {
      shuffled.outcomes(i) = law.outcomes(perm[static_cast<size_t>(i)]);
      shuffled.probabilities(i) = law.probabilities(perm[static_cast<size_t>(i)]);
    }
    for (const auto& rm : maps)
      CHECK(eval_discrete(rm, law) == eval_discrete(rm, shuffled));
  }
}

TEST_CASE("entropic reduction survives large outcomes") {
  DiscreteLaw law = DiscreteLaw::two_point(0.5, 700.0, 701.0);
  double got = eval_discrete(RiskMapping::entropic(), law);
  CHECK(std::isfinite(got));
  CHECK(got == doctest::Approx(700.0 - std::log(0.5 + 0.5 * std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("axioms hold for the built-ins on 1000 sampled laws") {
  for (const auto& rm :
       {RiskMapping::linear(), RiskMapping::entropic(), RiskMapping::worst_case()}) {
    AxiomReport rep = check_axioms(rm, 1000, 42);
    for (const auto& c : rep.checks) {
      INFO(rm.name(), " / ", c.axiom, ": ", c.witness);
      CHECK(c.pass);
    }
    CHECK(rep.all_pass());
  }
}

TEST_CASE("a broken mapping fails the axiom check with a witness") {
  RiskMapping broken = RiskMapping::custom("mean-plus-one", [](const DiscreteLaw& law) {
    return (law.outcomes * law.probabilities).sum() + 1.0;
  });
  AxiomReport rep = check_axioms(broken, 1000, 42);
  CHECK_FALSE(rep.all_pass());
  bool witnessed = false;
  for (const auto& c : rep.checks)
    if (!c.pass) {
      CHECK_FALSE(c.witness.empty());
      witnessed = true;
    }
  CHECK(witnessed);
  // Shifting by one breaks normalisation but nothing else.
  CHECK_FALSE(rep.checks[0].pass);
  CHECK(rep.checks[1].pass);
  CHECK(rep.checks[2].pass);
}

TEST_CASE("strict monotonicity holds for linear and entropic, fails for worst case") {
  CHECK(probe_strict_monotonicity(RiskMapping::linear(), 500, 42).pass);
  CHECK(probe_strict_monotonicity(RiskMapping::entropic(), 500, 42).pass);
  AxiomCheck wc = probe_strict_monotonicity(RiskMapping::worst_case(), 500, 42);
  CHECK_FALSE(wc.pass);
  CHECK_FALSE(wc.witness.empty());
}

TEST_CASE("custom mappings carry an optional two-point derivative") {
  RiskMapping plain = entropic_clone();
  CHECK_FALSE(plain.has_two_point_dp());
  RiskMapping with_dp = RiskMapping::custom(
      "linear-clone",
      [](const DiscreteLaw& law) { return (law.outcomes * law.probabilities).sum(); },
      [](const TwoPointLaw& law) { return law.v_first - law.v_second; });
  CHECK(with_dp.has_two_point_dp());
  CHECK(with_dp.two_point_dp(TwoPointLaw{0.3, 5.0, 2.0}) == 3.0);
  CHECK(check_axioms(with_dp, 300, 9).all_pass());
}
