#include "quench/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace quench {

namespace {

// 12-point Gauss-Legendre rule on [-1, 1].
constexpr int kGL = 12;
constexpr double kNodes[kGL] = {
    -0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
    -0.5873179542866175, -0.3678314989981802, -0.1252334085114689,
    0.1252334085114689,  0.3678314989981802,  0.5873179542866175,
    0.7699026741943047,  0.9041172563704749,  0.9815606342467192};
constexpr double kWeights[kGL] = {
    0.0471753363865118, 0.1069393259953184, 0.1600783285433462,
    0.2031674267230659, 0.2334925365383548, 0.2491470458134028,
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

}  // namespace

double rho_weight(double y, int N) {
  return std::exp(-y * y / 4.0) / std::pow(4.0 * std::numbers::pi, N / 2.0);
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width) {
  const int panels = static_cast<int>(std::ceil((b - a) / panel_width));
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    const double mid = lo + 0.5 * w;
    double panel = 0.0;
    for (int k = 0; k < kGL; ++k) {
      panel += kWeights[k] * f(mid + 0.5 * w * kNodes[k]);
    }
    sum += 0.5 * w * panel;
  }
  return sum;
}

double inner_product_rho_fn(const std::function<double(double)>& f,
                            const std::function<double(double)>& g, double y_max,
                            int N) {
  auto integrand = [&](double y) { return f(y) * g(y) * rho_weight(y, N); };
  return integrate_panels(integrand, -y_max, y_max);
}

}  // namespace quench
