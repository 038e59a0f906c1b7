#include "nlstop/majorant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace nlstop {

namespace {

struct Cand {
  double h = std::numeric_limits<double>::infinity();
  HParams p{0.0, 1.0, 0.0, 0.0};
};

bool better(const Cand& a, const Cand& b) {
  if (a.h != b.h) return a.h < b.h;
  return std::tie(a.p.y, a.p.z, a.p.beta, a.p.gamma) <
         std::tie(b.p.y, b.p.z, b.p.beta, b.p.gamma);
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct SearchContext {
  const RiskMapping* rm;
  const Eigen::ArrayXd* xs;
  const Eigen::ArrayXd* gv;
  Eigen::ArrayXd egv;  // exp(-g) rows, for the entropic kernel inversion
  double cap, lift;
  Eigen::ArrayXd beta_full;   // res values on [0, cap]
  Eigen::ArrayXd beta_high;   // res values on (lift, cap]
};

// Smallest boundary value at the free end of the window [y,z] such that the
// candidate still dominates the gain on grid rows [i0,i1]. The other end is
// pinned at `outer`: when outer_is_beta the free value is gamma (at z),
// otherwise beta (at y). Returns +infinity when no value works. Built-in
// kernels are inverted row by row in closed form; custom mappings bisect.
double inner_min(const SearchContext& ctx, double z, double inv_len, Eigen::Index i0,
                 Eigen::Index i1, bool outer_is_beta, double outer) {
  const Eigen::ArrayXd& xs = *ctx.xs;
  const Eigen::ArrayXd& gv = *ctx.gv;
  const double inf = std::numeric_limits<double>::infinity();
  switch (ctx.rm->kind()) {
    case RiskKind::Linear: {
      double need = 0.0;
      for (Eigen::Index j = i0; j <= i1; ++j) {
        double p = (z - xs(j)) * inv_len;
        double w_pin = outer_is_beta ? p : 1.0 - p;
        if (w_pin >= 1.0 - 1e-12) {
          if (outer < gv(j)) return inf;
        } else {
          need = std::max(need, (gv(j) - w_pin * outer) / (1.0 - w_pin));
        }
      }
      return need;
    }
    case RiskKind::Entropic: {
      double e_out = std::exp(-outer), e_free = 1.0;
      for (Eigen::Index j = i0; j <= i1; ++j) {
        double p = (z - xs(j)) * inv_len;
        double w_pin = outer_is_beta ? p : 1.0 - p;
        if (w_pin >= 1.0 - 1e-12) {
          if (outer < gv(j)) return inf;
        } else {
          double num = (ctx.egv(j) - w_pin * e_out) / (1.0 - w_pin);
          if (num <= 0.0) return inf;
          e_free = std::min(e_free, num);
        }
      }
      return -std::log(e_free);
    }
    case RiskKind::WorstCase: {
      double need = 0.0;
      for (Eigen::Index j = i0; j <= i1; ++j) {
        double p = (z - xs(j)) * inv_len;
        double w_pin = outer_is_beta ? p : 1.0 - p;
        if (w_pin > kSupportTol && outer < gv(j)) return inf;
        if (w_pin < 1.0 - kSupportTol) need = std::max(need, gv(j));
      }
      return need;
    }
    case RiskKind::Custom: {
      auto dominates = [&](double inner) {
        TwoPointKernel kernel(*ctx.rm, outer_is_beta ? outer : inner,
                              outer_is_beta ? inner : outer);
        for (Eigen::Index j = i0; j <= i1; ++j) {
          double p = (z - xs(j)) * inv_len;
          if (kernel(p) < gv(j)) return false;
        }
        return true;
      };
      if (!dominates(ctx.cap)) return inf;
      if (dominates(0.0)) return 0.0;
      double lo = 0.0, hi = ctx.cap;
      for (int k = 0; k < 50; ++k) {
        double mid = 0.5 * (lo + hi);
        if (dominates(mid)) hi = mid;
        else lo = mid;
      }
      return hi;
    }
  }
  return inf;
}

void scan_window(const SearchContext& ctx, double y, double z, const Eigen::ArrayXd& outer_axis,
                 bool outer_is_beta, std::vector<Cand>& best) {
  const Eigen::ArrayXd& xs = *ctx.xs;
  const Eigen::Index n = xs.size();
  double pos_lo = y * static_cast<double>(n - 1);
  double pos_hi = z * static_cast<double>(n - 1);
  Eigen::Index i0 = static_cast<Eigen::Index>(std::ceil(pos_lo - 1e-9));
  Eigen::Index i1 = static_cast<Eigen::Index>(std::floor(pos_hi + 1e-9));
  i0 = std::max<Eigen::Index>(i0, 0);
  i1 = std::min<Eigen::Index>(i1, n - 1);
  if (i0 > i1) return;
  const double inv_len = 1.0 / (z - y);

  for (Eigen::Index a = 0; a < outer_axis.size(); ++a) {
    double outer = outer_axis(a);
    double inner = inner_min(ctx, z, inv_len, i0, i1, outer_is_beta, outer);
    if (!(inner <= ctx.cap)) continue;
    double beta = outer_is_beta ? outer : inner;
    double gamma = outer_is_beta ? inner : outer;
    TwoPointKernel kernel(*ctx.rm, beta, gamma);
    HParams hp{y, z, beta, gamma};
    for (Eigen::Index i = i0; i <= i1; ++i) {
      double p = (z - xs(i)) * inv_len;
      Cand c{kernel(p), hp};
      if (better(c, best[static_cast<size_t>(i)])) best[static_cast<size_t>(i)] = c;
    }
  }
}

// The candidate family splits into three window classes with different
// parameter constraints, and the per-point winners are tracked per class so
// that each one can be refined independently later. A class whose lattice
// winner looks best may refine worse than another class's, so collapsing to a
// single winner before refinement would lock in the wrong class.
constexpr int kClasses = 3;  // full domain, windows pinned at z=1, pinned at y=0

// Tasks: 0 is the full-domain window; then one window per interior grid point,
// first pinned at z=1 (varying y), then pinned at y=0 (varying z).
void run_task(const SearchContext& ctx, Eigen::Index task, std::array<std::vector<Cand>, kClasses>& best) {
  const Eigen::ArrayXd& xs = *ctx.xs;
  const Eigen::Index m = xs.size() - 2;
  if (task == 0) {
    scan_window(ctx, 0.0, 1.0, ctx.beta_full, true, best[0]);
  } else if (task <= m) {
    scan_window(ctx, xs(task), 1.0, ctx.beta_high, true, best[1]);
  } else {
    scan_window(ctx, 0.0, xs(task - m), ctx.beta_high, false, best[2]);
  }
}

Cand refine_point(const SearchContext& ctx, Eigen::Index i, Cand cand, int iters, int res) {
  if (!std::isfinite(cand.h)) return cand;
  const Eigen::ArrayXd& xs = *ctx.xs;
  const Eigen::Index n = xs.size();
  const double x = xs(i);

  HParams hp = cand.p;
  double h_cur = cand.h;

  // Each class has one free boundary value; the other is re-solved exactly
  // for every trial, so descent moves along the feasibility envelope. Plain
  // coordinate moves stall instead: once the binding contact point couples
  // both ends, lowering either one alone dips below the gain.
  const bool full = hp.y == 0.0 && hp.z == 1.0;
  const bool outer_is_beta = hp.z == 1.0;
  const double lo = full ? 0.0 : ctx.lift + 1e-12;
  double outer = outer_is_beta ? hp.beta : hp.gamma;

  Eigen::Index i0 = std::max<Eigen::Index>(
      0, static_cast<Eigen::Index>(std::ceil(hp.y * static_cast<double>(n - 1) - 1e-9)));
  Eigen::Index i1 = std::min<Eigen::Index>(
      n - 1, static_cast<Eigen::Index>(std::floor(hp.z * static_cast<double>(n - 1) + 1e-9)));
  const double inv_len = 1.0 / (hp.z - hp.y);

  auto try_outer = [&](double v) {
    double inner = inner_min(ctx, hp.z, inv_len, i0, i1, outer_is_beta, v);
    if (!(inner <= ctx.cap)) return false;
    HParams t{hp.y, hp.z, outer_is_beta ? v : inner, outer_is_beta ? inner : v};
    TwoPointKernel kernel(*ctx.rm, t.beta, t.gamma);
    double ht = kernel((t.z - x) * inv_len);
    if (ht < h_cur) {
      hp = t;
      h_cur = ht;
      outer = v;
      return true;
    }
    return false;
  };

  try_outer(outer);
  double step = full ? ctx.cap / static_cast<double>(res - 1) : 1.0 / static_cast<double>(res - 1);
  for (int it = 0; it < iters; ++it) {
    bool improved = false;
    for (double sign : {1.0, -1.0}) {
      double v = std::clamp(outer + sign * step, lo, ctx.cap);
      if (v != outer && try_outer(v)) improved = true;
    }
    if (!improved) step *= 0.5;
  }
  return Cand{h_cur, hp};
}

}  // namespace

MajorantResult compute_majorant(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
                                const MajorantOptions& opt) {
  if (opt.param_res < 16) throw std::invalid_argument("majorant search needs param_res >= 16");
  validate_gain(g, grid);
  const Eigen::Index n = grid.size();
  Eigen::ArrayXd gv = sample(g, grid);
  const double g_bar = g.max_on(grid);

  SearchContext ctx;
  ctx.rm = &rm;
  ctx.xs = &grid.points;
  ctx.gv = &gv;
  ctx.egv = (-gv).exp();
  ctx.cap = g_bar + 2.0;
  ctx.lift = g_bar + 1.0;
  // Both lattices are built from the ratio j/(res-1) so that doubling res-1
  // yields a pointwise superset: w can only decrease with resolution.
  const int res = opt.param_res;
  ctx.beta_full.resize(res);
  for (int j = 0; j < res; ++j)
    ctx.beta_full(j) = ctx.cap * (static_cast<double>(j) / static_cast<double>(res - 1));
  ctx.beta_high.resize(res - 1);
  for (int j = 1; j < res; ++j)
    ctx.beta_high(j - 1) =
        std::min(ctx.cap, ctx.lift + static_cast<double>(j) / static_cast<double>(res - 1));

  const Eigen::Index n_tasks = 1 + 2 * (n - 2);
  const int n_threads = std::min<int>(resolve_threads(opt.threads), static_cast<int>(n_tasks));

  std::vector<std::array<std::vector<Cand>, kClasses>> chunk_best(static_cast<size_t>(n_threads));
  for (auto& chunk : chunk_best)
    for (auto& cls : chunk) cls.assign(static_cast<size_t>(n), Cand{});
  {
    std::vector<std::thread> pool;
    Eigen::Index per = (n_tasks + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      Eigen::Index lo = t * per, hi = std::min<Eigen::Index>(n_tasks, lo + per);
      pool.emplace_back([&, t, lo, hi] {
        for (Eigen::Index task = lo; task < hi; ++task) run_task(ctx, task, chunk_best[static_cast<size_t>(t)]);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Seed with the flat candidate at height g_bar: it dominates every admissible
  // gain, so the search always has a finite baseline and w never exceeds g_bar.
  std::array<std::vector<Cand>, kClasses> best;
  for (auto& cls : best) cls.assign(static_cast<size_t>(n), Cand{});
  {
    TwoPointKernel flat(rm, g_bar, g_bar);
    for (Eigen::Index i = 0; i < n; ++i)
      best[0][static_cast<size_t>(i)] = Cand{flat(1.0 - grid[i]), HParams{0.0, 1.0, g_bar, g_bar}};
  }
  for (int t = 0; t < n_threads; ++t)
    for (int c = 0; c < kClasses; ++c)
      for (Eigen::Index i = 0; i < n; ++i)
        if (better(chunk_best[static_cast<size_t>(t)][c][static_cast<size_t>(i)], best[c][static_cast<size_t>(i)]))
          best[c][static_cast<size_t>(i)] = chunk_best[static_cast<size_t>(t)][c][static_cast<size_t>(i)];

  if (opt.refine) {
    std::array<std::vector<Cand>, kClasses> refined;
    for (auto& cls : refined) cls.resize(static_cast<size_t>(n));
    std::vector<std::thread> pool;
    Eigen::Index per = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      Eigen::Index lo = t * per, hi = std::min<Eigen::Index>(n, lo + per);
      pool.emplace_back([&, lo, hi] {
        for (Eigen::Index i = lo; i < hi; ++i)
          for (int c = 0; c < kClasses; ++c)
            refined[c][static_cast<size_t>(i)] =
                refine_point(ctx, i, best[c][static_cast<size_t>(i)], opt.refine_iters, opt.param_res);
      });
    }
    for (auto& th : pool) th.join();
    best = std::move(refined);
  }

  MajorantResult out;
  out.grid = grid;
  out.w.resize(n);
  out.argmin.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Cand win = best[0][static_cast<size_t>(i)];
    for (int c = 1; c < kClasses; ++c)
      if (better(best[c][static_cast<size_t>(i)], win)) win = best[c][static_cast<size_t>(i)];
    out.w(i) = win.h;
    out.argmin[static_cast<size_t>(i)] = win.p;
  }
  return out;
}

MajorantResult compute_majorant(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
                                int param_res) {
  MajorantOptions opt;
  opt.param_res = param_res;
  return compute_majorant(rm, g, grid, opt);
}

}  // namespace nlstop
