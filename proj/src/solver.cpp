#include "nlstop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlstop/errors.hpp"

namespace nlstop {

namespace {

void require_solvable(const RiskMapping& rm, const GainSpec& g) {
  if (rm.kind() == RiskKind::WorstCase)
    throw UnsupportedOperation(
        "worst-case mapping has no tangency structure; use the closed-form oracle "
        "(worst_case_value / the oracle command)");
  if (!g.derivative_available())
    throw std::invalid_argument("tangency search needs a gain with an analytic derivative");
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo,
              int iters) {
  for (int it = 0; it < iters; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<TangencyPair> find_tangency_pairs(const RiskMapping& rm, const GainSpec& g,
                                              int mesh) {
  require_solvable(rm, g);
  if (mesh < 16) throw std::invalid_argument("tangency scan needs mesh >= 16");
  const double tol_tan = 1e-8;

  auto pinned = [&](double y, double z) { return HParams{y, z, g(y), g(z)}; };
  auto dl = [&](double y, double z) { return h_deriv(rm, pinned(y, z), y); };
  auto dr = [&](double y, double z) { return h_deriv(rm, pinned(y, z), z); };
  auto res_left = [&](double y, double z) { return y * (dl(y, z) - g.deriv(y)); };
  auto res_right = [&](double y, double z) { return (1.0 - z) * (dr(y, z) - g.deriv(z)); };

  std::vector<TangencyPair> pairs;
  auto push_unique = [&](double y, double z) {
    double rl = res_left(y, z), rr = res_right(y, z);
    if (!(std::abs(rl) <= tol_tan && std::abs(rr) <= tol_tan)) return;
    for (const auto& p : pairs)
      if (std::abs(p.y - y) < 1e-6 && std::abs(p.z - z) < 1e-6) return;
    pairs.push_back({y, z, rl, rr});
  };

  push_unique(0.0, 1.0);

  Eigen::ArrayXd mesh_pts = Eigen::ArrayXd::LinSpaced(mesh, 0.0, 1.0);

  // Edge y = 0: scan z for matching right slopes.
  {
    auto f = [&](double z) { return dr(0.0, z) - g.deriv(z); };
    double prev = f(mesh_pts(1));
    for (int j = 2; j < mesh - 1; ++j) {
      double cur = f(mesh_pts(j));
      if (prev == 0.0) push_unique(0.0, mesh_pts(j - 1));
      else if (prev * cur < 0.0)
        push_unique(0.0, bisect(f, mesh_pts(j - 1), mesh_pts(j), prev, 60));
      prev = cur;
    }
  }
  // Edge z = 1: scan y for matching left slopes.
  {
    auto f = [&](double y) { return dl(y, 1.0) - g.deriv(y); };
    double prev = f(mesh_pts(1));
    for (int j = 2; j < mesh - 1; ++j) {
      double cur = f(mesh_pts(j));
      if (prev == 0.0) push_unique(mesh_pts(j - 1), 1.0);
      else if (prev * cur < 0.0)
        push_unique(bisect(f, mesh_pts(j - 1), mesh_pts(j), prev, 60), 1.0);
      prev = cur;
    }
  }

  // Interior pairs: cache both residual components on the mesh, then refine
  // cells where both change sign by alternating one-axis bisections.
  {
    auto r1 = [&](double y, double z) { return dl(y, z) - g.deriv(y); };
    auto r2 = [&](double y, double z) { return dr(y, z) - g.deriv(z); };
    Eigen::MatrixXd R1 = Eigen::MatrixXd::Zero(mesh, mesh), R2 = Eigen::MatrixXd::Zero(mesh, mesh);
    for (int i = 1; i < mesh - 1; ++i)
      for (int j = i + 1; j < mesh - 1; ++j) {
        R1(i, j) = r1(mesh_pts(i), mesh_pts(j));
        R2(i, j) = r2(mesh_pts(i), mesh_pts(j));
      }
    auto sign_change = [](double a, double b, double c, double d) {
      double mn = std::min(std::min(a, b), std::min(c, d));
      double mx = std::max(std::max(a, b), std::max(c, d));
      return mn <= 0.0 && mx >= 0.0;
    };
    // Mesh nodes that are already tangential, e.g. when both contact points
    // land exactly on the mesh. Cell refinement cannot converge onto such a
    // node from inside because the residuals have no sign change there.
    for (int i = 1; i < mesh - 1; ++i)
      for (int j = i + 1; j < mesh - 1; ++j)
        if (std::abs(R1(i, j)) <= tol_tan && std::abs(R2(i, j)) <= tol_tan)
          push_unique(mesh_pts(i), mesh_pts(j));
    for (int i = 1; i + 1 < mesh - 1; ++i)
      for (int j = i + 2; j + 1 < mesh - 1; ++j) {
        if (!sign_change(R1(i, j), R1(i + 1, j), R1(i, j + 1), R1(i + 1, j + 1))) continue;
        if (!sign_change(R2(i, j), R2(i + 1, j), R2(i, j + 1), R2(i + 1, j + 1))) continue;
        double ylo = mesh_pts(i), yhi = mesh_pts(i + 1);
        double zlo = mesh_pts(j), zhi = mesh_pts(j + 1);
        // Bracket loss either means the corner sign pattern was an artifact or
        // the root sits on the cell boundary and roundoff noise flipped a sign
        // in the endgame; stop refining and let the residual gate decide.
        for (int it = 0; it < 60; ++it) {
          double zc = 0.5 * (zlo + zhi);
          double f_lo = r1(ylo, zc), f_hi = r1(yhi, zc);
          if (f_lo * f_hi > 0.0) break;
          double ym = 0.5 * (ylo + yhi);
          double fm = r1(ym, zc);
          if ((fm > 0.0) == (f_lo > 0.0)) ylo = ym;
          else yhi = ym;
          double yc = 0.5 * (ylo + yhi);
          double g_lo = r2(yc, zlo), g_hi = r2(yc, zhi);
          if (g_lo * g_hi > 0.0) break;
          double zm = 0.5 * (zlo + zhi);
          double gm = r2(yc, zm);
          if ((gm > 0.0) == (g_lo > 0.0)) zlo = zm;
          else zhi = zm;
        }
        // The root can sit on the bracket boundary (contact point on the
        // mesh), so pick whichever bracket corner or midpoint fits best.
        double by = 0.5 * (ylo + yhi), bz = 0.5 * (zlo + zhi);
        double bs = std::numeric_limits<double>::infinity();
        for (double yc : {ylo, 0.5 * (ylo + yhi), yhi})
          for (double zc : {zlo, 0.5 * (zlo + zhi), zhi}) {
            double s = std::max(std::abs(res_left(yc, zc)), std::abs(res_right(yc, zc)));
            if (s < bs) { bs = s; by = yc; bz = zc; }
          }
        push_unique(by, bz);
      }
  }

  std::sort(pairs.begin(), pairs.end(), [](const TangencyPair& a, const TangencyPair& b) {
    if (a.y != b.y) return a.y < b.y;
    return a.z < b.z;
  });
  return pairs;
}

Solution solve(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
               const SolveOptions& opt) {
  require_solvable(rm, g);
  validate_gain(g, grid);
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd gv = sample(g, grid);
  const double delta = opt.delta > 0.0 ? opt.delta : 10.0 * grid.spacing();
  if (delta >= 0.5) throw std::invalid_argument("walk step delta too coarse");

  auto pairs = find_tangency_pairs(rm, g, opt.mesh);
  std::vector<HParams> cand;
  cand.reserve(pairs.size());
  for (const auto& p : pairs) cand.push_back(HParams{p.y, p.z, g(p.y), g(p.z)});

  const double tie_tol = 1e-10;
  std::vector<Component> comps;
  double x = delta;
  while (x < 1.0) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& hp : cand) {
      if (!(hp.y < x && x < hp.z)) continue;
      best = std::max(best, h_eval(rm, hp, x));
    }
    if (best > g(x) + kStopTol) {
      double xm = 0.0, xp = 1.0;
      bool first = true;
      for (const auto& hp : cand) {
        if (!(hp.y < x && x < hp.z)) continue;
        if (h_eval(rm, hp, x) < best - tie_tol) continue;
        if (first) { xm = hp.y; xp = hp.z; first = false; }
        else { xm = std::max(xm, hp.y); xp = std::min(xp, hp.z); }
      }
      if (!comps.empty() && xm < comps.back().x_plus - 1e-9)
        throw AssumptionViolation("continuation components overlap; tangency structure inconsistent");
      HParams hp{xm, xp, g(xm), g(xp)};
      TwoPointKernel kernel(rm, hp.beta, hp.gamma);
      double inv_len = 1.0 / (xp - xm);
      for (Eigen::Index i = 0; i < n; ++i) {
        double xi = grid[i];
        if (!(xm < xi && xi < xp)) continue;
        if (kernel((xp - xi) * inv_len) < gv(i)-kDomTol) {
          throw AssumptionViolation(
              "candidate function dips below the gain inside its component; "
              "structural assumptions fail for this gain");
        }
      }
      comps.push_back(Component{xm, xp, hp});
      x = xp;
    }
    x += delta;
  }

  ValueTable table;
  table.grid = grid;
  table.values = gv;
  table.stopping = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, true);
  for (const auto& c : comps) {
    TwoPointKernel kernel(rm, c.h.beta, c.h.gamma);
    double inv_len = 1.0 / (c.x_plus - c.x_minus);
    for (Eigen::Index i = 0; i < n; ++i) {
      double xi = grid[i];
      if (!(c.x_minus < xi && xi < c.x_plus)) continue;
      table.values(i) = std::max(kernel((c.x_plus - xi) * inv_len), gv(i));
      table.stopping(i) = false;
    }
  }
  return Solution{std::move(table), std::move(comps)};
}

HParams extend_to_H(const RiskMapping& rm, const GainSpec& g, const Component& comp,
                    double delta_ext) {
  if (!(delta_ext > 0.0)) throw std::invalid_argument("extension step must be positive");
  const double x_minus = comp.x_minus, x_plus = comp.x_plus;
  if (x_minus == 0.0 && x_plus == 1.0) return HParams{0.0, 1.0, g(0.0), g(1.0)};

  const double g_bar = g.max_on(Grid::uniform(2001));
  const double cap = g_bar + 2.0, lift = g_bar + 1.0;

  auto match = [&](double ylo, double yhi, double pin_x, double pin_v, bool vary_gamma,
                   double fixed_beta, double fixed_gamma, double win_y, double win_z) {
    // Root in the boundary value so the window's curve passes through
    // (pin_x, pin_v); the curve value is increasing in either boundary value.
    auto f = [&](double v) {
      HParams hp{win_y, win_z, vary_gamma ? fixed_beta : v, vary_gamma ? v : fixed_gamma};
      return h_eval(rm, hp, pin_x) - pin_v;
    };
    double f_lo = f(ylo), f_hi = f(yhi);
    if (f_lo > 0.0) throw NoRootError("extension step has no root; retry with a smaller step");
    if (f_hi < 0.0) return std::make_pair(cap, false);  // signals value-cap truncation
    double lo = ylo, hi = yhi;
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) <= 0.0) lo = mid;
      else hi = mid;
    }
    return std::make_pair(0.5 * (lo + hi), true);
  };

  // Rightward: windows [x_minus, z_n] pinned through the previous right end.
  double z_cur = x_plus, gamma_cur = g(x_plus);
  const double beta0 = g(x_minus);
  while (z_cur < 1.0 && gamma_cur <= lift) {
    double z_next = std::min(z_cur + delta_ext, 1.0);
    auto [val, found] = match(0.0, cap, z_cur, gamma_cur, true, beta0, 0.0, x_minus, z_next);
    if (!found) {
      // The matching value exceeds the cap before z_next: move the window end
      // to where the capped curve passes through the pin instead.
      auto q = [&](double zp) {
        return h_eval(rm, HParams{x_minus, zp, beta0, cap}, z_cur) - gamma_cur;
      };
      double lo = z_cur + 1e-12, hi = z_next;
      for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        if (q(mid) > 0.0) lo = mid;
        else hi = mid;
      }
      z_cur = 0.5 * (lo + hi);
      gamma_cur = cap;
      break;
    }
    z_cur = z_next;
    gamma_cur = val;
  }

  // Leftward mirror: windows [w_n, x_plus] pinned through the previous left end.
  double w_cur = x_minus, beta_cur = g(x_minus);
  const double gamma0 = g(x_plus);
  while (w_cur > 0.0 && beta_cur <= lift) {
    double w_next = std::max(w_cur - delta_ext, 0.0);
    auto [val, ok] = match(0.0, cap, w_cur, beta_cur, false, 0.0, gamma0, w_next, x_plus);
    if (!ok) {
      auto q = [&](double wp) {
        return h_eval(rm, HParams{wp, x_plus, cap, gamma0}, w_cur) - beta_cur;
      };
      double lo = w_next, hi = w_cur - 1e-12;
      for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        if (q(mid) > 0.0) hi = mid;
        else lo = mid;
      }
      w_cur = 0.5 * (lo + hi);
      beta_cur = cap;
      break;
    }
    w_cur = w_next;
    beta_cur = val;
  }

  HParams out{w_cur, z_cur, beta_cur, gamma_cur};
  if (!in_H(out, g_bar))
    throw AssumptionViolation("extension terminated outside the candidate family");
  return out;
}

Solution solution_from_table(const GainSpec& g, const ValueTable& table) {
  Solution sol;
  sol.table = table;
  for (const auto& [lo, hi] : continuation_intervals(table))
    sol.components.push_back(Component{lo, hi, HParams{lo, hi, g(lo), g(hi)}});
  return sol;
}

}  // namespace nlstop
