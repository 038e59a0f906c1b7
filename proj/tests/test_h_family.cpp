#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "nlstop/errors.hpp"
#include "nlstop/h_family.hpp"

using namespace nlstop;

TEST_CASE("exit probability is the classical gambler's ruin formula") {
  CHECK(exit_prob(0.25, 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(exit_prob(0.0, 0.0, 1.0) == 1.0);
  CHECK(exit_prob(1.0, 0.0, 1.0) == 0.0);
  CHECK(exit_prob(0.5, 0.25, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(exit_prob(0.1, 0.25, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(exit_prob(0.5, 0.75, 0.25), std::invalid_argument);
  CHECK_THROWS_AS(exit_prob(0.5, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("h takes its boundary values exactly and is +inf outside its window") {
  HParams hp{0.25, 0.75, 5.0, 1.0};
  for (const auto& rm :
       {RiskMapping::linear(), RiskMapping::entropic(), RiskMapping::worst_case()}) {
    CHECK(h_eval(rm, hp, 0.25) == 5.0);
    CHECK(h_eval(rm, hp, 0.75) == 1.0);
    CHECK(h_eval(rm, hp, 0.1) == std::numeric_limits<double>::infinity());
    CHECK(h_eval(rm, hp, 0.9) == std::numeric_limits<double>::infinity());
  }
  CHECK_THROWS_AS(h_eval(RiskMapping::linear(), hp, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(h_eval(RiskMapping::linear(), hp, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(h_eval(RiskMapping::linear(), HParams{0.5, 0.5, 1.0, 1.0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("linear h is the chord through its boundary values") {
  HParams hp{0.0, 1.0, 0.0, 2.0};
  CHECK(h_eval(RiskMapping::linear(), hp, 0.3) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(h_eval(RiskMapping::linear(), hp, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  HParams narrow{0.2, 0.6, 1.0, 3.0};
  CHECK(h_eval(RiskMapping::linear(), narrow, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("entropic h matches the worked two-point value") {
  HParams hp{0.0, 1.0, 0.0, 2.0};
  CHECK(h_eval(RiskMapping::entropic(), hp, 0.5) ==
        doctest::Approx(0.56621916951697281).epsilon(1e-15));
  // Entropic sits below linear for uneven payoffs (risk aversion).
  CHECK(h_eval(RiskMapping::entropic(), hp, 0.5) < h_eval(RiskMapping::linear(), hp, 0.5));
}

TEST_CASE("worst-case h is flat at the smaller boundary value inside") {
  HParams hp{0.0, 1.0, 2.0, 0.5};
  for (double x : {0.1, 0.5, 0.9})
    CHECK(h_eval(RiskMapping::worst_case(), hp, x) == 0.5);
  CHECK(h_eval(RiskMapping::worst_case(), hp, 0.0) == 2.0);
}

TEST_CASE("membership in the candidate family follows the three window classes") {
  const double g_bar = 2.0;
  CHECK(in_H(HParams{0.0, 1.0, 0.0, 4.0}, g_bar));
  CHECK(in_H(HParams{0.0, 1.0, 2.0, 2.0}, g_bar));
  CHECK_FALSE(in_H(HParams{0.0, 1.0, 4.5, 1.0}, g_bar));   // above the cap
  CHECK_FALSE(in_H(HParams{0.0, 1.0, -0.1, 1.0}, g_bar));  // negative boundary value

  CHECK(in_H(HParams{0.3, 1.0, 3.5, 1.0}, g_bar));         // pinned right, lifted left
  CHECK_FALSE(in_H(HParams{0.3, 1.0, 2.5, 1.0}, g_bar));   // interior cap too low
  CHECK_FALSE(in_H(HParams{0.3, 1.0, 3.0, 1.0}, g_bar));   // needs strict excess

  CHECK(in_H(HParams{0.0, 0.6, 1.0, 3.5}, g_bar));         // pinned left, lifted right
  CHECK_FALSE(in_H(HParams{0.0, 0.6, 3.5, 1.0}, g_bar));   // lift on the wrong side

  CHECK_FALSE(in_H(HParams{0.3, 0.7, 4.0, 4.0}, g_bar));   // floats free of both endpoints
}

TEST_CASE("domination is a grid-wise pointwise comparison") {
  Grid grid = Grid::uniform(101);
  GainSpec g = GainSpec::parse("sin:1,1,4,0");
  CHECK(dominates(RiskMapping::worst_case(), HParams{0.0, 1.0, 2.0, 2.0}, g, grid));
  CHECK_FALSE(dominates(RiskMapping::worst_case(), HParams{0.0, 1.0, 1.0, 1.0}, g, grid));
  CHECK(dominates(RiskMapping::linear(), HParams{0.0, 1.0, 2.0, 2.0}, g, grid));
  // A one-sided window is only compared on its own domain.
  CHECK(dominates(RiskMapping::linear(), HParams{0.7, 1.0, 3.5, 1.0}, g, grid));
}

TEST_CASE("h derivative closed forms agree with difference quotients") {
  const HParams cases[] = {{0.0, 1.0, 0.0, 2.0}, {0.2, 0.9, 3.0, 0.5}, {0.1, 0.6, 1.0, 1.0}};
  for (const auto& rm : {RiskMapping::linear(), RiskMapping::entropic()}) {
    for (const auto& hp : cases) {
      for (double t : {0.25, 0.5, 0.8}) {
        double x = hp.y + t * (hp.z - hp.y);
        double step = 1e-6;
        double fd = (h_eval(rm, hp, x + step) - h_eval(rm, hp, x - step)) / (2.0 * step);
        CHECK(h_deriv(rm, hp, x) == doctest::Approx(fd).epsilon(1e-6));
      }
      // One-sided at the window ends must still be finite and consistent.
      CHECK(std::isfinite(h_deriv(rm, hp, hp.y)));
      CHECK(std::isfinite(h_deriv(rm, hp, hp.z)));
    }
  }
}

TEST_CASE("linear h derivative is the chord slope") {
  HParams hp{0.2, 0.7, 1.0, 3.0};
  CHECK(h_deriv(RiskMapping::linear(), hp, 0.4) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("custom mappings differentiate by chain rule or fallback quotient") {
  auto entropic_eval = [](const DiscreteLaw& law) {
    double m = law.outcomes.minCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < law.outcomes.size(); ++i)
      s += law.probabilities(i) * std::exp(m - law.outcomes(i));
    return m - std::log(s);
  };
  // d/dp of -log(p e^{-v1} + (1-p) e^{-v2}).
  auto entropic_dp = [](const TwoPointLaw& law) {
    double a = std::exp(-law.v_first), b = std::exp(-law.v_second);
    return -(a - b) / (law.p_first * a + (1.0 - law.p_first) * b);
  };
  RiskMapping with_dp = RiskMapping::custom("entropic-dp", entropic_eval, entropic_dp);
  RiskMapping without = RiskMapping::custom("entropic-fd", entropic_eval);

  HParams hp{0.1, 0.9, 0.4, 2.2};
  for (double x : {0.2, 0.5, 0.85}) {
    double reference = h_deriv(RiskMapping::entropic(), hp, x);
    CHECK(h_deriv(with_dp, hp, x) == doctest::Approx(reference).epsilon(1e-10));
    CHECK(h_deriv(without, hp, x) == doctest::Approx(reference).epsilon(1e-4));
  }
}

TEST_CASE("worst-case mapping refuses differentiation") {
  CHECK_THROWS_AS(h_deriv(RiskMapping::worst_case(), HParams{0.0, 1.0, 1.0, 2.0}, 0.5),
                  UnsupportedOperation);
}

TEST_CASE("maximum principle, translation invariance, monotone derivatives, scaling") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> val(0.0, 4.0);
  const RiskMapping maps[] = {RiskMapping::linear(), RiskMapping::entropic(),
                              RiskMapping::worst_case()};
  for (int t = 0; t < 300; ++t) {
    double y = 0.8 * u01(gen);
    double z = y + 0.05 + (0.95 - y) * u01(gen);
    z = std::min(z, 1.0);
    double beta = val(gen), gamma = val(gen);
    double x = y + (z - y) * (0.05 + 0.9 * u01(gen));
    HParams hp{y, z, beta, gamma};
    for (const auto& rm : maps) {
      double h = h_eval(rm, hp, x);
      CHECK(h >= std::min(beta, gamma) - 1e-9);
      CHECK(h <= std::max(beta, gamma) + 1e-9);

      double c = -1.0 + 2.0 * u01(gen);
      HParams shifted{y, z, beta + c, gamma + c};
      CHECK(h_eval(rm, shifted, x) == doctest::Approx(h + c).epsilon(1e-12));

      // Raising a boundary value never lowers h anywhere.
      HParams raised{y, z, beta + 0.5, gamma};
      CHECK(h_eval(rm, raised, x) >= h - 1e-9);
    }
    for (const auto& rm : {RiskMapping::linear(), RiskMapping::entropic()}) {
      // A larger left boundary value flattens the approach to the right end.
      HParams lifted{y, z, beta + 0.7, gamma};
      CHECK(h_deriv(rm, lifted, z) <= h_deriv(rm, hp, z) + 1e-9);
    }
  }
  // Scaling: same distance from the right end, wider window, larger value.
  for (int t = 0; t < 300; ++t) {
    double z = 0.2 + 0.5 * u01(gen);
    double zh = z + (1.0 - z) * u01(gen);
    double gamma = val(gen);
    double d = z * (0.05 + 0.9 * u01(gen));
    for (const auto& rm : maps) {
      double h = h_eval(rm, HParams{0.0, z, 0.0, gamma}, z - d);
      double hh = h_eval(rm, HParams{0.0, zh, 0.0, gamma}, zh - d);
      CHECK(h <= hh + 1e-9);
    }
  }
}

TEST_CASE("h composes as a martingale through nested exit windows") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> val(0.0, 4.0);
  const RiskMapping maps[] = {RiskMapping::linear(), RiskMapping::entropic(),
                              RiskMapping::worst_case()};
  for (int t = 0; t < 300; ++t) {
    HParams hp{0.6 * u01(gen), 0.0, val(gen), val(gen)};
    hp.z = hp.y + 0.1 + (1.0 - hp.y - 0.1) * u01(gen);
    double yi = hp.y + (hp.z - hp.y) * (0.05 + 0.4 * u01(gen));
    double zi = yi + (hp.z - yi) * (0.1 + 0.8 * u01(gen));
    zi = std::min(zi, hp.z - 1e-6 * (hp.z - hp.y));
    double x = yi + (zi - yi) * (0.1 + 0.8 * u01(gen));
    for (const auto& rm : maps) {
      double inner = eval_two_point(
          rm, TwoPointLaw{(zi - x) / (zi - yi), h_eval(rm, hp, yi), h_eval(rm, hp, zi)});
      CHECK(inner == doctest::Approx(h_eval(rm, hp, x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("inlined kernel agrees with the reference two-point evaluation") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> val(-2.0, 5.0);
  const RiskMapping maps[] = {RiskMapping::linear(), RiskMapping::entropic(),
                              RiskMapping::worst_case()};
  for (int t = 0; t < 500; ++t) {
    double beta = val(gen), gamma = val(gen), p = u01(gen);
    for (const auto& rm : maps) {
      TwoPointKernel kernel(rm, beta, gamma);
      CHECK(kernel(p) == doctest::Approx(eval_two_point(rm, TwoPointLaw{p, beta, gamma}))
                             .epsilon(1e-12));
    }
  }
}
