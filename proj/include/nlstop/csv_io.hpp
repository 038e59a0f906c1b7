#pragma once

#include <string>
#include <vector>

#include "nlstop/closed_forms.hpp"
#include "nlstop/gain.hpp"
#include "nlstop/majorant.hpp"
#include "nlstop/solver.hpp"

namespace nlstop {

// Columns x,g,V,stopping; floats printed with %.17g so a round trip is exact.
void write_solution_csv(const std::string& path, const GainSpec& g, const ValueTable& table);

// Columns x,g,w,y,z,beta,gamma (minimizing candidate parameters per point).
void write_majorant_csv(const std::string& path, const GainSpec& g, const MajorantResult& result);

// JSON array of {x_minus, x_plus, beta, gamma}.
void write_components_json(const std::string& path, const std::vector<Component>& components);

// Reads a solution written by write_solution_csv; checks the grid is a
// uniform partition of [0,1]. The gain column is ignored.
ValueTable read_solution_csv(const std::string& path);

}  // namespace nlstop
