#pragma once

#include <vector>

#include "nlstop/closed_forms.hpp"
#include "nlstop/gain.hpp"
#include "nlstop/grid.hpp"
#include "nlstop/h_family.hpp"
#include "nlstop/risk_mapping.hpp"

namespace nlstop {

// Window [y,z] whose candidate function, pinned to the gain at both ends,
// meets the gain tangentially: at each endpoint either the one-sided slopes
// match or the endpoint is a domain boundary (weighted by y and 1-z).
struct TangencyPair {
  double y;
  double z;
  double residual_left;   // y * (h'(y+) - g'(y))
  double residual_right;  // (1-z) * (h'(z-) - g'(z))
};

// Maximal continuation interval (x_minus, x_plus) with the candidate function
// the value follows on it.
struct Component {
  double x_minus;
  double x_plus;
  HParams h;
};

struct Solution {
  ValueTable table;
  std::vector<Component> components;
};

struct SolveOptions {
  double delta = 0.0;    // walk step; 0 means 10 grid spacings
  int mesh = 401;        // tangency scan resolution
  double tol_tan = 1e-8; // residual filter for accepted pairs
};

// Scans for tangency windows: the full-domain corner pair, one-sided roots
// along each boundary edge, and interior sign-change cells refined by
// alternating bisection. Requires a differentiable gain and a mapping other
// than worst-case.
std::vector<TangencyPair> find_tangency_pairs(const RiskMapping& rm, const GainSpec& g,
                                              int mesh = 401);

// Left-to-right sweep: at each step the largest tangency-candidate value
// straddling x is compared with the gain; when it wins, the straddling
// argmax windows delimit a continuation component and the sweep jumps to its
// right end. Throws AssumptionViolation if a candidate dips below the gain
// on its component, UnsupportedOperation for the worst-case mapping (its
// value function comes from worst_case_value instead).
Solution solve(const RiskMapping& rm, const GainSpec& g, const Grid& grid,
               const SolveOptions& opt = {});

// Extends a component's candidate function stepwise (step delta_ext) beyond
// its window, matching values by bisection, until it either reaches a domain
// boundary or climbs above max(g)+1; the result is a member of the candidate
// family agreeing with the input on [x_minus, x_plus]. Throws NoRootError
// when a matching step has no root in [0, max(g)+2] (retry with a smaller
// delta_ext).
HParams extend_to_H(const RiskMapping& rm, const GainSpec& g, const Component& comp,
                    double delta_ext);

// Wraps an oracle table as a Solution, deriving components from the
// stopping mask and pinning their boundary values to the gain.
Solution solution_from_table(const GainSpec& g, const ValueTable& table);

}  // namespace nlstop
