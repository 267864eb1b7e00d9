// Shared helpers for the test suites: a deterministic sampler for
// property-style sweeps and a couple of numerical oracles.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

namespace testutil {

// Deterministic 64-bit LCG; good enough for parameter sweeps.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}
  double uniform(double lo, double hi) {
    state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
    const double unit = static_cast<double>(state_ >> 11) / 9007199254740992.0;
    return lo + (hi - lo) * unit;
  }

 private:
  std::uint64_t state_;
};

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Classical fixed-step RK4 for dy/dt = f(t, y).
inline double rk4(const std::function<double(double, double)>& f, double y0,
                  double t0, double t1, double dt) {
  double y = y0;
  double t = t0;
  while (t < t1 - 1e-15) {
    const double h = std::min(dt, t1 - t);
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

}  // namespace testutil
