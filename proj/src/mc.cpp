#include "nlstop/mc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>
#include <thread>

#include "nlstop/closed_forms.hpp"

namespace nlstop {

StoppingRule StoppingRule::immediate() { return StoppingRule{}; }

StoppingRule StoppingRule::exit_interval(double a, double b) {
  if (!(0.0 <= a && a < b && b <= 1.0))
    throw std::invalid_argument("exit interval needs 0 <= a < b <= 1");
  StoppingRule r;
  r.kind = Kind::ExitInterval;
  r.lo = a;
  r.hi = b;
  return r;
}

StoppingRule StoppingRule::first_entry(std::vector<std::pair<double, double>> intervals) {
  double prev = 0.0;
  for (const auto& [a, b] : intervals) {
    if (!(0.0 <= a && a < b && b <= 1.0) || a < prev)
      throw std::invalid_argument("continuation intervals must be disjoint, ordered, inside [0,1]");
    prev = b;
  }
  StoppingRule r;
  r.kind = Kind::FirstEntry;
  r.continuation = std::move(intervals);
  return r;
}

std::string StoppingRule::describe() const {
  switch (kind) {
    case Kind::Immediate: return "immediate";
    case Kind::ExitInterval: return "exit-interval";
    case Kind::FirstEntry: return "first-entry";
  }
  return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t idx) {
  return splitmix64(seed + (idx + 1) * 0x9E3779B97F4A7C15ULL);
}

// Box-Muller on top of mt19937_64 bits, so streams are reproducible across
// platforms and independent of libstdc++'s normal_distribution.
struct PathRng {
  std::mt19937_64 gen;
  double spare = 0.0;
  bool has_spare = false;

  explicit PathRng(std::uint64_t s) : gen(s) {}

  double uniform() {  // (0,1]
    return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
  }
  double normal() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
  }
};

struct PathResult {
  double payoff;
  bool capped;
};

PathResult run_path(PathRng& rng, const GainSpec& g, double x0, double lo, double hi, double dt,
                    std::int64_t max_steps) {
  const double sdt = std::sqrt(dt);
  const bool bridge_lo = lo == 0.0, bridge_hi = hi == 1.0;
  double x = x0;
  for (std::int64_t k = 0; k < max_steps; ++k) {
    double xn = x + sdt * rng.normal();
    if (xn <= lo) return {g(lo), false};
    if (xn >= hi) return {g(hi), false};
    if (bridge_lo) {
      double e = -2.0 * x * xn / dt;
      if (e > -40.0 && rng.uniform() < std::exp(e)) return {g(0.0), false};
    }
    if (bridge_hi) {
      double e = -2.0 * (1.0 - x) * (1.0 - xn) / dt;
      if (e > -40.0 && rng.uniform() < std::exp(e)) return {g(1.0), false};
    }
    x = xn;
  }
  return {g(x), true};
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double bootstrap_se(const RiskMapping& rm, const Eigen::ArrayXd& payoffs, std::uint64_t seed) {
  const int B = 200;
  const Eigen::Index n = payoffs.size();
  std::mt19937_64 gen(splitmix64(seed ^ 0x5E07B007ULL));
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  Eigen::ArrayXd vals(B);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int b = 0; b < B; ++b) {
    for (auto& i : idx) i = pick(gen);
    switch (rm.kind()) {
      case RiskKind::Linear: {
        double s = 0.0;
        for (auto i : idx) s += payoffs(i);
        vals(b) = s * inv_n;
        break;
      }
      case RiskKind::Entropic: {
        double m = payoffs(idx[0]);
        for (auto i : idx) m = std::min(m, payoffs(i));
        double s = 0.0;
        for (auto i : idx) s += std::exp(m - payoffs(i));
        vals(b) = m - std::log(s * inv_n);
        break;
      }
      case RiskKind::WorstCase: {
        double m = payoffs(idx[0]);
        for (auto i : idx) m = std::min(m, payoffs(i));
        vals(b) = m;
        break;
      }
      case RiskKind::Custom: {
        DiscreteLaw law;
        law.outcomes.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) law.outcomes(j) = payoffs(idx[static_cast<size_t>(j)]);
        law.probabilities = Eigen::ArrayXd::Constant(n, inv_n);
        vals(b) = eval_discrete(rm, law);
        break;
      }
    }
  }
  double mean = vals.mean();
  return std::sqrt((vals - mean).square().sum() / static_cast<double>(B - 1));
}

}  // namespace

MCEstimate simulate_rule(const RiskMapping& rm, const GainSpec& g, const StoppingRule& rule,
                         double x0, const MCConfig& cfg) {
  if (!(0.0 <= x0 && x0 <= 1.0)) throw std::invalid_argument("start point must lie in [0,1]");
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0) || cfg.n_paths < 1)
    throw std::invalid_argument("Monte Carlo config needs dt > 0, t_max > 0, n_paths >= 1");

  double lo = 0.0, hi = 1.0;
  bool stop_now = false;
  switch (rule.kind) {
    case StoppingRule::Kind::Immediate:
      stop_now = true;
      break;
    case StoppingRule::Kind::ExitInterval:
      lo = rule.lo;
      hi = rule.hi;
      stop_now = x0 <= lo || x0 >= hi;
      break;
    case StoppingRule::Kind::FirstEntry: {
      stop_now = true;
      for (const auto& [a, b] : rule.continuation)
        if (a < x0 && x0 < b) {
          lo = a;
          hi = b;
          stop_now = false;
          break;
        }
      break;
    }
  }
  if (stop_now) return MCEstimate{g(x0), 0.0, 0};

  const auto max_steps = static_cast<std::int64_t>(std::ceil(cfg.t_max / cfg.dt));
  Eigen::ArrayXd payoffs(cfg.n_paths);
  std::vector<std::int64_t> capped_per_chunk;

  const int n_threads = std::min<int>(resolve_threads(cfg.threads),
                                      static_cast<int>(std::min<std::int64_t>(cfg.n_paths, 64)));
  capped_per_chunk.assign(static_cast<size_t>(n_threads), 0);
  {
    std::vector<std::thread> pool;
    std::int64_t per = (cfg.n_paths + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      std::int64_t first = t * per, last = std::min(cfg.n_paths, first + per);
      pool.emplace_back([&, t, first, last] {
        std::int64_t capped = 0;
        for (std::int64_t i = first; i < last; ++i) {
          PathRng rng(path_seed(cfg.seed, static_cast<std::uint64_t>(i)));
          PathResult res = run_path(rng, g, x0, lo, hi, cfg.dt, max_steps);
          payoffs(i) = res.payoff;
          if (res.capped) ++capped;
        }
        capped_per_chunk[static_cast<size_t>(t)] = capped;
      });
    }
    for (auto& th : pool) th.join();
  }
  std::int64_t n_capped = 0;
  for (auto c : capped_per_chunk) n_capped += c;
  if (n_capped * 100 > cfg.n_paths)
    std::cerr << "warning: " << n_capped << " of " << cfg.n_paths
              << " paths hit t_max before stopping; estimates are horizon-biased\n";

  DiscreteLaw law;
  law.outcomes = payoffs;
  law.probabilities = Eigen::ArrayXd::Constant(cfg.n_paths, 1.0 / static_cast<double>(cfg.n_paths));
  double value = eval_discrete(rm, law);
  double se = bootstrap_se(rm, payoffs, cfg.seed);
  return MCEstimate{value, se, n_capped};
}

double bias_allowance(double dt) { return 1.0 * std::sqrt(dt); }

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

namespace {

std::vector<std::pair<double, double>> shrink_intervals(
    const std::vector<std::pair<double, double>>& intervals, double fraction) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [a, b] : intervals) {
    double margin = fraction * (b - a);
    if (a + margin < b - margin) out.emplace_back(a + margin, b - margin);
  }
  return out;
}

}  // namespace

VerifyReport verify_solution(const RiskMapping& rm, const GainSpec& g, const Solution& sol,
                             double x0, const MCConfig& cfg) {
  std::vector<std::pair<double, double>> comps;
  for (const auto& c : sol.components) comps.emplace_back(c.x_minus, c.x_plus);

  VerifyReport report;
  report.x0 = x0;
  report.value_at_x0 = interp(sol.table, x0);
  const double slack0 = bias_allowance(cfg.dt);

  {
    MCEstimate est = simulate_rule(rm, g, StoppingRule::first_entry(comps), x0, cfg);
    double slack = 3.0 * est.std_error + slack0;
    report.checks.push_back({"first-entry (solution)", est.value, est.std_error, slack,
                             std::abs(est.value - report.value_at_x0) <= slack});
  }
  const std::vector<std::pair<std::string, StoppingRule>> suboptimal = {
      {"immediate", StoppingRule::immediate()},
      {"shrunk-75pct", StoppingRule::first_entry(shrink_intervals(comps, 0.125))},
      {"shrunk-50pct", StoppingRule::first_entry(shrink_intervals(comps, 0.25))},
  };
  for (const auto& [name, rule] : suboptimal) {
    MCEstimate est = simulate_rule(rm, g, rule, x0, cfg);
    double bound = report.value_at_x0 + 3.0 * est.std_error + slack0;
    report.checks.push_back({name, est.value, est.std_error, bound, est.value <= bound});
  }
  return report;
}

}  // namespace nlstop
