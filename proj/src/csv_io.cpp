#include "nlstop/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nlstop {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void write_solution_csv(const std::string& path, const GainSpec& g, const ValueTable& table) {
  auto out = open_out(path);
  out << "x,g,V,stopping\n";
  for (Eigen::Index i = 0; i < table.grid.size(); ++i) {
    double x = table.grid[i];
    out << fmt(x) << ',' << fmt(g(x)) << ',' << fmt(table.values(i)) << ','
        << (table.stopping(i) ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_majorant_csv(const std::string& path, const GainSpec& g, const MajorantResult& result) {
  auto out = open_out(path);
  out << "x,g,w,y,z,beta,gamma\n";
  for (Eigen::Index i = 0; i < result.grid.size(); ++i) {
    double x = result.grid[i];
    const HParams& p = result.argmin[static_cast<size_t>(i)];
    out << fmt(x) << ',' << fmt(g(x)) << ',' << fmt(result.w(i)) << ',' << fmt(p.y) << ','
        << fmt(p.z) << ',' << fmt(p.beta) << ',' << fmt(p.gamma) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_components_json(const std::string& path, const std::vector<Component>& components) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : components) {
    arr.push_back({{"x_minus", c.x_minus},
                   {"x_plus", c.x_plus},
                   {"beta", c.h.beta},
                   {"gamma", c.h.gamma}});
  }
  auto out = open_out(path);
  out << arr.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

ValueTable read_solution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,g,V,stopping", 0) != 0)
    throw std::runtime_error("solution file missing x,g,V,stopping header: " + path);
  std::vector<double> xs, vs;
  std::vector<bool> stop;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double row[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ss, cell, ','))
        throw std::runtime_error("short row in solution file: " + line);
      row[c] = std::stod(cell);
    }
    if (!std::getline(ss, cell, ','))
      throw std::runtime_error("short row in solution file: " + line);
    xs.push_back(row[0]);
    vs.push_back(row[2]);
    stop.push_back(std::stoi(cell) != 0);
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n < 3) throw std::runtime_error("solution file needs at least 3 rows");
  ValueTable t;
  t.grid = Grid::uniform(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(xs[static_cast<size_t>(i)] - t.grid[i]) > 1e-9)
      throw std::runtime_error("solution grid is not a uniform partition of [0,1]");
  t.values = Eigen::Map<Eigen::ArrayXd>(vs.data(), n);
  t.stopping.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) t.stopping(i) = stop[static_cast<size_t>(i)];
  return t;
}

}  // namespace nlstop
