// Well-prepared initial data for a quench at the origin, the three space-time
// regions covering the domain, the second (localized) rescaling
//   k_x(xi, tau) = h(x + sqrt(theta) xi, t(x) + theta tau) / theta^{1/(beta+1)}
// about the quasi-parabola time t(x) = T - theta(x), and the audit of a
// snapshot against the shrinking-set inequalities.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "quench/grid.hpp"
#include "quench/params.hpp"
#include "quench/solver.hpp"
#include "quench/spectral.hpp"

namespace quench {

struct InvalidSeedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeedParams {
  double d0 = 0.0;
  double d1 = 0.0;
  double t0 = 0.0;
  double s0(double T) const;  // -log(T - t0)
};

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  int n = 2001;
};

// Initial state
//   h(x, t0) = (T-t0)^{1/(beta+1)} alpha^{1/(beta+1)}
//                [Phi(z) + (d0 + d1 z) chi0(|z| / (K0/16))]^{-1/alpha} chi1(x)
//              + H*(x) (1 - chi1(x)),
// with z = x / sqrt((T-t0) |log(T-t0)|) and
// chi1 = chi0(|x| / ((T-t0)^{1/2} |log(T-t0)|^{beta/2})). Throws
// InvalidSeedError when the bracket is non-positive anywhere it is used.
GridFunction build_initial_h(const SeedParams& seed, const Parameters& params,
                             const GridSpec& grid,
                             const FinalProfileOptions& profile = {});

struct RegionFlags {
  bool in_R1 = false;  // |x| <= K0 sqrt((T-t)|log(T-t)|)
  bool in_R2 = false;  // K0/4 sqrt((T-t)|log(T-t)|) <= |x| <= eps0
  bool in_R3 = false;  // |x| >= eps0/4
};

RegionFlags classify_region(double x, double t, const Parameters& params);

// Sampled slices of the second rescaling along a trajectory.
struct KxSlices {
  std::vector<double> xi;
  std::vector<double> tau;
  // values[j][i] = k_x(xi[i], tau[j]); grad likewise for the xi-gradient.
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> grad;
  double theta = 0.0;
  double t_of_x = 0.0;
  double x = 0.0;
};

KxSlices second_rescale(const SimRecord& trajectory, double x,
                        const Parameters& params, double T,
                        int n_xi = 17, int n_tau = 33);

struct ShrinkCondition {
  std::string name;
  double bound = 0.0;
  double measured = 0.0;
  double margin = 0.0;  // bound - measured
  bool pass = false;
};

struct ShrinkReport {
  double t = 0.0;
  double s = 0.0;
  std::vector<ShrinkCondition> conditions;
  bool all_pass() const;
  const ShrinkCondition* find(const std::string& name) const;
};

struct AuditOptions {
  SimilarityGridSpec sim_grid{50.0, 0.05};
  int n_x_samples = 12;   // log-spaced points across the second region
  int n_xi_samples = 9;
  double C_q_agg = 4e-6;  // calibrated constant of the aggregate sup bound
};

// Audits one snapshot h(., t) against every shrinking-set inequality:
// the five mode bounds at s = -log(T-t), the aggregate sup bound, profile
// closeness and gradient smallness of k_x across the second region, and the
// drift of h and grad h from the baseline in the third region.
ShrinkReport audit_shrinking_set(const GridFunction& h, double t,
                                 const GridFunction& baseline,
                                 const Parameters& params, double T,
                                 const AuditOptions& options = {});

// CSV rows "name,bound,measured,margin,pass" for a report.
std::string shrink_report_csv(const ShrinkReport& report);

}  // namespace quench
