#pragma once

#include <vector>

#include "nlstop/gain.hpp"
#include "nlstop/grid.hpp"
#include "nlstop/h_family.hpp"
#include "nlstop/risk_mapping.hpp"

namespace nlstop {

struct MajorantResult {
  Grid grid;
  Eigen::ArrayXd w;               // pointwise minimum over dominating candidates
  std::vector<HParams> argmin;    // minimizing candidate per grid point
};

struct MajorantOptions {
  int param_res = 201;   // boundary-value resolution per parameter axis, >= 16
  bool refine = true;    // local coordinate-descent polish per grid point
  int refine_iters = 40;
  int threads = 0;       // 0 = hardware concurrency
};

// Pointwise infimum over the candidate family of the functions dominating the
// gain on the grid: boundary values are scanned on a discrete lattice, and for
// each one only the smallest dominating opposite value can matter (domination
// is monotone in each boundary value by the monotonicity axiom), so the scan
// touches one candidate per lattice column. The result is deterministic for
// any thread count; ties pick the lexicographically smallest parameters.
MajorantResult compute_majorant(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
                                const MajorantOptions& opt = {});
MajorantResult compute_majorant(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
                                int param_res);

}  // namespace nlstop
