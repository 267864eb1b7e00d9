// Quadrature against the Gaussian measure rho(y) = e^{-|y|^2/4} / (4 pi)^{N/2}.
// Closed-form integrands go through composite Gauss-Legendre panels; sampled
// integrands use the trapezoidal rule on their own grid (the Gaussian decay
// makes that spectrally accurate well before the truncation radius).
#pragma once

#include <functional>

namespace quench {

double rho_weight(double y, int N = 1);

// Composite Gauss-Legendre integral of f over [a, b] with panels of width at
// most panel_width (12 nodes per panel).
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        double panel_width = 0.25);

// Integral of f(y) g(y) rho(y) dy over [-y_max, y_max].
double inner_product_rho_fn(const std::function<double(double)>& f,
                            const std::function<double(double)>& g,
                            double y_max = 40.0, int N = 1);

}  // namespace quench
