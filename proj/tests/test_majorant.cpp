#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nlstop/closed_forms.hpp"
#include "nlstop/majorant.hpp"

using namespace nlstop;

namespace {

const char* kSin = "sin:1,1,4,0";

double sup_diff(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  return (a - b).abs().maxCoeff();
}

}  // namespace

TEST_CASE("majorant search rejects too-coarse parameter lattices") {
  Grid grid = Grid::uniform(101);
  GainSpec g = GainSpec::parse(kSin);
  CHECK_THROWS_AS(compute_majorant(RiskMapping::linear(), g, grid, 15), std::invalid_argument);
}

TEST_CASE("majorant dominates the gain, stays under its max, and pins the endpoints") {
  Grid grid = Grid::uniform(201);
  GainSpec g = GainSpec::parse(kSin);
  Eigen::ArrayXd gv = sample(g, grid);
  const double g_bar = g.max_on(grid);
  for (const auto& rm :
       {RiskMapping::linear(), RiskMapping::entropic(), RiskMapping::worst_case()}) {
    MajorantResult mr = compute_majorant(rm, g, grid, 65);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      CHECK(mr.w(i) >= gv(i) - 1e-9);
      CHECK(mr.w(i) <= g_bar + 1e-12);
    }
    CHECK(std::abs(mr.w(0) - gv(0)) <= 1e-6);
    CHECK(std::abs(mr.w(grid.size() - 1) - gv(grid.size() - 1)) <= 1e-6);
    // Every minimizer is a bona fide member of the candidate family.
    for (const auto& hp : mr.argmin) CHECK(in_H(hp, g_bar));
  }
}

TEST_CASE("worst-case majorant reproduces the running-maxima oracle") {
  Grid grid = Grid::uniform(401);
  GainSpec g = GainSpec::parse(kSin);
  ValueTable oracle = worst_case_value(g, grid);
  MajorantResult mr = compute_majorant(RiskMapping::worst_case(), g, grid, 101);
  CHECK(sup_diff(mr.w, oracle.values) <= 1e-3);
}

TEST_CASE("linear majorant reproduces the concave-majorant oracle") {
  Grid grid = Grid::uniform(401);
  GainSpec g = GainSpec::parse(kSin);
  ValueTable oracle = linear_value(g, grid);
  MajorantResult mr = compute_majorant(RiskMapping::linear(), g, grid, 201);
  CHECK(sup_diff(mr.w, oracle.values) <= 1e-3);
}

TEST_CASE("entropic majorant reproduces the exponential-hull oracle") {
  Grid grid = Grid::uniform(401);
  GainSpec g = GainSpec::parse(kSin);
  ValueTable oracle = entropic_value(g, grid);
  MajorantResult mr = compute_majorant(RiskMapping::entropic(), g, grid, 201);
  CHECK(sup_diff(mr.w, oracle.values) <= 1e-3);
}

TEST_CASE("refining the parameter lattice can only lower the majorant") {
  Grid grid = Grid::uniform(101);
  GainSpec g = GainSpec::parse(kSin);
  MajorantOptions opt;
  opt.refine = false;
  for (const auto& rm : {RiskMapping::linear(), RiskMapping::entropic()}) {
    opt.param_res = 17;
    Eigen::ArrayXd w17 = compute_majorant(rm, g, grid, opt).w;
    opt.param_res = 33;
    Eigen::ArrayXd w33 = compute_majorant(rm, g, grid, opt).w;
    opt.param_res = 65;
    Eigen::ArrayXd w65 = compute_majorant(rm, g, grid, opt).w;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      CHECK(w33(i) <= w17(i) + 1e-15);
      CHECK(w65(i) <= w33(i) + 1e-15);
    }
  }
}

TEST_CASE("results are identical for any thread count") {
  Grid grid = Grid::uniform(101);
  GainSpec g = GainSpec::parse(kSin);
  for (const auto& rm : {RiskMapping::entropic(), RiskMapping::worst_case()}) {
    MajorantOptions opt;
    opt.param_res = 33;
    opt.threads = 1;
    MajorantResult a = compute_majorant(rm, g, grid, opt);
    opt.threads = 4;
    MajorantResult b = compute_majorant(rm, g, grid, opt);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      CHECK(a.w(i) == b.w(i));
      const HParams &pa = a.argmin[static_cast<size_t>(i)], &pb = b.argmin[static_cast<size_t>(i)];
      CHECK(pa.y == pb.y);
      CHECK(pa.z == pb.z);
      CHECK(pa.beta == pb.beta);
      CHECK(pa.gamma == pb.gamma);
    }
  }
}

TEST_CASE("a custom mapping with the entropic formula matches the built-in") {
  Grid grid = Grid::uniform(101);
  GainSpec g = GainSpec::parse(kSin);
  RiskMapping clone = RiskMapping::custom("entropic-clone", [](const DiscreteLaw& law) {
    double m = law.outcomes.minCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < law.outcomes.size(); ++i)
      s += law.probabilities(i) * std::exp(m - law.outcomes(i));
    return m - std::log(s);
  });
  MajorantOptions opt;
  opt.param_res = 33;
  Eigen::ArrayXd w_builtin = compute_majorant(RiskMapping::entropic(), g, grid, opt).w;
  Eigen::ArrayXd w_clone = compute_majorant(clone, g, grid, opt).w;
  CHECK(sup_diff(w_builtin, w_clone) <= 1e-9);
}

TEST_CASE("concave gains are their own majorant") {
  Grid grid = Grid::uniform(201);
  GainSpec g = GainSpec::parse("poly:0.2,1,-1");
  Eigen::ArrayXd gv = sample(g, grid);
  MajorantResult mr = compute_majorant(RiskMapping::linear(), g, grid, 65);
  // The refinement recovers the tangent at each x, so only rounding remains.
  CHECK(sup_diff(mr.w, gv) <= 1e-9);
}
