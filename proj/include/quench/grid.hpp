// Uniform 1-D grid functions and the interpolation utilities used when
// changing variables between the physical and self-similar frames.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace quench {

enum class FieldKind { h, u, w, q };

std::string to_string(FieldKind kind);

// Samples of one field on a uniform grid. For physical fields the coordinate
// is x and time_tag is t; for similarity fields the coordinate is y and
// time_tag is s.
struct GridFunction {
  std::vector<double> values;
  double x_min = -1.0;
  double x_max = 1.0;
  FieldKind kind = FieldKind::h;
  double time_tag = 0.0;

  int n() const { return static_cast<int>(values.size()); }
  double dx() const { return (x_max - x_min) / (n() - 1); }
  double x(int i) const { return x_min + i * dx(); }

  double min_value() const;
  int argmin() const;
};

// Throws std::domain_error if a strictly-positive field (h, u, w) carries a
// non-positive sample.
void check_positive(const GridFunction& f);

// Second-order centered gradient (one-sided at the ends).
std::vector<double> gradient(const GridFunction& f);

// Value interpolation on a uniform grid.
//  - interp_linear: piecewise linear.
//  - interp_cubic: 4-point Lagrange, exact on cubics.
//  - interp_monotone_cubic: Fritsch-Carlson shape-preserving Hermite; never
//    overshoots the local data range, so positive data stays positive.
double interp_linear(const GridFunction& f, double x);
double interp_cubic(const GridFunction& f, double x);
double interp_monotone_cubic(const GridFunction& f, double x);

// Trapezoidal integral of the samples (spectrally accurate for smooth
// integrands that decay below rounding before the grid ends).
double trapz(const std::vector<double>& values, double dx);

}  // namespace quench
