#pragma once

#include <Eigen/Dense>
#include <string>

#include "nlstop/grid.hpp"

namespace nlstop {

enum class GainKind { Polynomial, Sinusoid, PiecewiseLinear };

// Continuous nonnegative gain on [0,1].
//
// Three families are supported:
//   polynomial        c0 + c1 x + ... + ck x^k
//   sinusoid          a + b sin(c pi x + d), frequency in units of pi
//   piecewise linear  interpolation through given knots (knots_x must start
//                     at 0, end at 1, and be strictly increasing)
class GainSpec {
 public:
  static GainSpec polynomial(Eigen::ArrayXd coeffs);
  static GainSpec sinusoid(double a, double b, double c, double d);
  static GainSpec piecewise_linear(Eigen::ArrayXd knots_x, Eigen::ArrayXd knots_y);

  // Parses "poly:c0,c1,..." | "sin:a,b,c,d" | "pwl:x0:y0,x1:y1,...".
  static GainSpec parse(const std::string& text);

  double operator()(double x) const;

  // Analytic derivative; throws UnsupportedOperation for piecewise linear
  // gains (kinks make the pointwise derivative ill-defined at knots).
  double deriv(double x) const;
  bool derivative_available() const { return kind_ != GainKind::PiecewiseLinear; }

  // Maximum of the gain over [0,1]: exact for piecewise linear, grid scan
  // refined by golden-section search otherwise.
  double max_on(const Grid& grid) const;

  GainKind kind() const { return kind_; }
  std::string describe() const;

 private:
  GainSpec() = default;
  GainKind kind_ = GainKind::Polynomial;
  Eigen::ArrayXd coeffs_;   // polynomial coefficients or sinusoid a,b,c,d
  Eigen::ArrayXd knots_x_, knots_y_;
};

Eigen::ArrayXd sample(const GainSpec& g, const Grid& grid);

// Nonnegativity check on the evaluation grid; throws std::invalid_argument
// naming the first offending point.
void validate_gain(const GainSpec& g, const Grid& grid);

}  // namespace nlstop
