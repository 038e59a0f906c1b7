#include "nlstop/gain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlstop/errors.hpp"

namespace nlstop {

GainSpec GainSpec::polynomial(Eigen::ArrayXd coeffs) {
  if (coeffs.size() == 0) throw std::invalid_argument("polynomial gain needs at least one coefficient");
  GainSpec g;
  g.kind_ = GainKind::Polynomial;
  g.coeffs_ = std::move(coeffs);
  return g;
}

GainSpec GainSpec::sinusoid(double a, double b, double c, double d) {
  GainSpec g;
  g.kind_ = GainKind::Sinusoid;
  g.coeffs_ = Eigen::ArrayXd(4);
  g.coeffs_ << a, b, c, d;
  return g;
}

GainSpec GainSpec::piecewise_linear(Eigen::ArrayXd knots_x, Eigen::ArrayXd knots_y) {
  if (knots_x.size() < 2 || knots_x.size() != knots_y.size())
    throw std::invalid_argument("piecewise linear gain needs matching knot arrays of length >= 2");
  if (knots_x(0) != 0.0 || knots_x(knots_x.size() - 1) != 1.0)
    throw std::invalid_argument("piecewise linear knots must span [0,1]");
  for (Eigen::Index i = 1; i < knots_x.size(); ++i)
    if (!(knots_x(i) > knots_x(i - 1)))
      throw std::invalid_argument("piecewise linear knots must be strictly increasing");
  GainSpec g;
  g.kind_ = GainKind::PiecewiseLinear;
  g.knots_x_ = std::move(knots_x);
  g.knots_y_ = std::move(knots_y);
  return g;
}

namespace {

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad number in gain spec: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list in gain spec");
  return out;
}

}  // namespace

GainSpec GainSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("gain spec needs a kind prefix: " + text);
  std::string kind = text.substr(0, colon);
  std::string body = text.substr(colon + 1);
  if (kind == "poly") {
    auto v = parse_csv_doubles(body);
    return polynomial(Eigen::Map<Eigen::ArrayXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  if (kind == "sin") {
    auto v = parse_csv_doubles(body);
    if (v.size() != 4) throw std::invalid_argument("sinusoid gain needs 4 parameters a,b,c,d");
    return sinusoid(v[0], v[1], v[2], v[3]);
  }
  if (kind == "pwl") {
    std::vector<double> xs, ys;
    std::stringstream ss(body);
    std::string pair;
    while (std::getline(ss, pair, ',')) {
      auto sep = pair.find(':');
      if (sep == std::string::npos) throw std::invalid_argument("pwl knot must look like x:y, got " + pair);
      xs.push_back(std::stod(pair.substr(0, sep)));
      ys.push_back(std::stod(pair.substr(sep + 1)));
    }
    return piecewise_linear(Eigen::Map<Eigen::ArrayXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                            Eigen::Map<Eigen::ArrayXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
  }
  throw std::invalid_argument("unknown gain kind: " + kind);
}

double GainSpec::operator()(double x) const {
  switch (kind_) {
    case GainKind::Polynomial: {
      double acc = 0.0;
      for (Eigen::Index i = coeffs_.size() - 1; i >= 0; --i) acc = acc * x + coeffs_(i);
      return acc;
    }
    case GainKind::Sinusoid:
      // Frequency is in units of pi: sin:a,b,c,d evaluates a + b*sin(c*pi*x + d).
      return coeffs_(0) + coeffs_(1) * std::sin(coeffs_(2) * std::numbers::pi * x + coeffs_(3));
    case GainKind::PiecewiseLinear: {
      if (x <= knots_x_(0)) return knots_y_(0);
      if (x >= knots_x_(knots_x_.size() - 1)) return knots_y_(knots_y_.size() - 1);
      Eigen::Index hi = 1;
      while (knots_x_(hi) < x) ++hi;
      double t = (x - knots_x_(hi - 1)) / (knots_x_(hi) - knots_x_(hi - 1));
      return knots_y_(hi - 1) + t * (knots_y_(hi) - knots_y_(hi - 1));
    }
  }
  return 0.0;
}

double GainSpec::deriv(double x) const {
  switch (kind_) {
    case GainKind::Polynomial: {
      double acc = 0.0;
      for (Eigen::Index i = coeffs_.size() - 1; i >= 1; --i)
        acc = acc * x + static_cast<double>(i) * coeffs_(i);
      return acc;
    }
    case GainKind::Sinusoid: {
      double w = coeffs_(2) * std::numbers::pi;
      return coeffs_(1) * w * std::cos(w * x + coeffs_(3));
    }
    case GainKind::PiecewiseLinear:
      throw UnsupportedOperation("piecewise linear gain has no pointwise derivative");
  }
  return 0.0;
}

double GainSpec::max_on(const Grid& grid) const {
  if (kind_ == GainKind::PiecewiseLinear) return knots_y_.maxCoeff();
  Eigen::Index best = 0;
  double best_v = (*this)(grid[0]);
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    double v = (*this)(grid[i]);
    if (v > best_v) { best_v = v; best = i; }
  }
  double lo = grid[std::max<Eigen::Index>(0, best - 1)];
  double hi = grid[std::min<Eigen::Index>(grid.size() - 1, best + 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = (*this)(x1), f2 = (*this)(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = (*this)(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = (*this)(x1);
    }
  }
  return std::max(best_v, std::max(f1, f2));
}

std::string GainSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case GainKind::Polynomial:
      os << "poly:";
      for (Eigen::Index i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_(i);
      break;
    case GainKind::Sinusoid:
      os << "sin:" << coeffs_(0) << "," << coeffs_(1) << "," << coeffs_(2) << "," << coeffs_(3);
      break;
    case GainKind::PiecewiseLinear:
      os << "pwl:";
      for (Eigen::Index i = 0; i < knots_x_.size(); ++i)
        os << (i ? "," : "") << knots_x_(i) << ":" << knots_y_(i);
      break;
  }
  return os.str();
}

Eigen::ArrayXd sample(const GainSpec& g, const Grid& grid) {
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = g(grid[i]);
  return out;
}

void validate_gain(const GainSpec& g, const Grid& grid) {
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(g(grid[i]) >= 0.0)) {
      std::ostringstream os;
      os << "gain must be nonnegative on [0,1]; g(" << grid[i] << ") = " << g(grid[i]);
      throw std::invalid_argument(os.str());
    }
  }
}

}  // namespace nlstop
