#include "quench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quench {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::h: return "h";
    case FieldKind::u: return "u";
    case FieldKind::w: return "w";
    case FieldKind::q: return "q";
  }
  return "?";
}

double GridFunction::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

int GridFunction::argmin() const {
  return static_cast<int>(std::min_element(values.begin(), values.end()) -
                          values.begin());
}

void check_positive(const GridFunction& f) {
  if (f.kind == FieldKind::q) return;
  for (double v : f.values) {
    if (!(v > 0.0)) {
      throw std::domain_error("GridFunction[" + to_string(f.kind) +
                              "]: non-positive sample");
    }
  }
}

std::vector<double> gradient(const GridFunction& f) {
  const int n = f.n();
  const double dx = f.dx();
  std::vector<double> g(n);
  if (n < 3) throw std::domain_error("gradient: need at least 3 points");
  g[0] = (-3.0 * f.values[0] + 4.0 * f.values[1] - f.values[2]) / (2.0 * dx);
  for (int i = 1; i + 1 < n; ++i) {
    g[i] = (f.values[i + 1] - f.values[i - 1]) / (2.0 * dx);
  }
  g[n - 1] = (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) /
             (2.0 * dx);
  return g;
}

namespace {

int clamp_cell(const GridFunction& f, double x) {
  const double dx = f.dx();
  int i = static_cast<int>(std::floor((x - f.x_min) / dx));
  return std::clamp(i, 0, f.n() - 2);
}

}  // namespace

double interp_linear(const GridFunction& f, double x) {
  const int i = clamp_cell(f, x);
  const double t = (x - f.x(i)) / f.dx();
  return f.values[i] * (1.0 - t) + f.values[i + 1] * t;
}

double interp_cubic(const GridFunction& f, double x) {
  const int n = f.n();
  if (n < 4) return interp_linear(f, x);
  int i = clamp_cell(f, x);
  i = std::clamp(i, 1, n - 3);
  const double t = (x - f.x(i)) / f.dx();
  const double ym1 = f.values[i - 1], y0 = f.values[i], y1 = f.values[i + 1],
               y2 = f.values[i + 2];
  // Lagrange basis on nodes {-1, 0, 1, 2} in local units.
  const double lm1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return ym1 * lm1 + y0 * l0 + y1 * l1 + y2 * l2;
}

double interp_monotone_cubic(const GridFunction& f, double x) {
  const int n = f.n();
  if (n < 3) return interp_linear(f, x);
  const double dx = f.dx();
  const int i = clamp_cell(f, x);
  auto slope = [&](int k) { return (f.values[k + 1] - f.values[k]) / dx; };
  auto deriv = [&](int k) -> double {
    if (k == 0) return slope(0);
    if (k == n - 1) return slope(n - 2);
    const double dl = slope(k - 1), dr = slope(k);
    if (dl * dr <= 0.0) return 0.0;
    return 2.0 * dl * dr / (dl + dr);  // harmonic mean keeps the fit monotone
  };
  double m0 = deriv(i), m1 = deriv(i + 1);
  const double d = slope(i);
  if (d == 0.0) {
    m0 = m1 = 0.0;
  } else {
    // Fritsch-Carlson limiter.
    const double a = m0 / d, bb = m1 / d;
    const double r = a * a + bb * bb;
    if (r > 9.0) {
      const double tau = 3.0 / std::sqrt(r);
      m0 = tau * m0;
      m1 = tau * m1;
    }
  }
  const double t = (x - f.x(i)) / dx;
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  return h00 * f.values[i] + h10 * dx * m0 + h01 * f.values[i + 1] + h11 * dx * m1;
}

double trapz(const std::vector<double>& values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

}  // namespace quench
