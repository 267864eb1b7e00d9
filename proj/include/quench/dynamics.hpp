// Mode time series along a trajectory, residuals of the mode ODEs
//   q0' = q0 + O(1/s^2),  q1' = q1/2 + O(1/s^2),  q2' = -2 q2/s + O(A/s^3),
// decay-law fitting for ||q(s)||, the two-parameter shooting reduction over
// the seed coefficients (d0, d1), and reconstruction of the final extinction
// and gradient profiles after quenching.
#pragma once

#include <string>
#include <vector>

#include "quench/grid.hpp"
#include "quench/params.hpp"
#include "quench/seed.hpp"
#include "quench/solver.hpp"

namespace quench {

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BoxDoesNotStraddleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModeSeries {
  std::vector<double> s;
  std::vector<double> q0, q1, q2;
  std::vector<double> qminus_weighted;  // sup |q_-| / (1+|y|^3)
  std::vector<double> qe_sup;
  std::vector<double> q_sup;
  std::vector<double> gradq_sup;
};

// One decomposition per snapshot, each at its own s with the K0-dependent
// cutoff. T_used is the quench time the transform is taken against.
ModeSeries track_modes(const SimRecord& trajectory, const Parameters& params,
                       double T_used, const SimilarityGridSpec& spec = {50.0, 0.05});

// Cubic resampling of a series onto a uniform s-grid (the transform against
// an estimated quench time shifts the native grid off-uniform).
ModeSeries resample_uniform(const ModeSeries& series, double ds);

struct ModeOdeReport {
  std::vector<double> s;
  std::vector<double> scaled_res0;  // s^2 |q0' - q0|
  std::vector<double> scaled_res1;  // s^2 |q1' - q1/2|
  std::vector<double> scaled_res2;  // s^3 |q2' + 2 q2 / s|
  double sup0 = 0.0, sup1 = 0.0, sup2 = 0.0;
  double trunc0 = 0.0, trunc1 = 0.0, trunc2 = 0.0;  // differencing error estimates
  double cbar_fit = 0.0;  // max(sup0, sup1): fitted constant of the linear modes
};

// Fourth-order differencing in s (one-sided at the ends). Throws
// InsufficientDataError for fewer than 5 samples.
ModeOdeReport verify_mode_odes(const ModeSeries& series);

struct RateFit {
  std::string best;  // one of "logs_over_s", "inv_s", "inv_sqrt_s"
  double c_logs_over_s = 0.0, c_inv_s = 0.0, c_inv_sqrt_s = 0.0;
  double res_logs_over_s = 0.0, res_inv_s = 0.0, res_inv_sqrt_s = 0.0;
};

// Least-squares comparison of y(s) against c log(s)/s, c/s and c/sqrt(s).
RateFit fit_rate(const std::vector<double>& s, const std::vector<double>& y);

struct ShootOptions {
  int levels = 8;
  double d0_min = -0.35, d0_max = 0.35;
  double d1_min = -0.35, d1_max = 0.35;
  double s_end = 9.0;
  double audit_ds = 0.1;
  bool check_corners = true;
  GridSpec grid;
  AuditOptions audit;
  FinalProfileOptions profile;
  double h_stop = 5e-4;
};

struct LevelRecord {
  int level = 0;
  double d0 = 0.0, d1 = 0.0;
  double s_exit = 0.0;
  std::string exit_condition;  // shrinking-set condition name or "horizon reached"
  int exit_sign = 0;           // sign of the exiting mode, 0 when trapped
};

struct ShootResult {
  double best_d0 = 0.0, best_d1 = 0.0;
  double s_max = 0.0;
  std::string exit_condition;
  std::vector<LevelRecord> history;
  ShrinkReport init_audit;  // audit of the returned seed at s0
};

// Coordinate-wise bisection on (d0, d1): simulate, audit every audit_ds in s,
// steer the coordinate whose mode exits first against the exit sign. The seed
// -> (q0(s0), q1(s0)) map is affine with positive diagonal, which makes exit
// signs monotone in the seed. levels = 0 degenerates to the initialization
// audit at s0.
ShootResult shoot(const Parameters& params, const Forcing& forcing, double t0,
                  const ShootOptions& options);

// Run one seed to the horizon, auditing every audit_ds; returns the first
// exit (or "horizon reached") plus the trajectory.
struct SeedRun {
  LevelRecord outcome;
  SimRecord record;
};
SeedRun run_seed_to_exit(const SeedParams& seed, const Parameters& params,
                         const Forcing& forcing, const ShootOptions& options,
                         double snapshot_ds = -1.0);

struct FinalProfiles {
  std::vector<double> r;  // |x - x0|, log-spaced outside the excluded core
  std::vector<double> h_star_plus, h_star_minus;
  std::vector<double> grad_h_star_plus, grad_h_star_minus;
  std::vector<double> H_star_ref, grad_H_star_ref;
  std::vector<double> h_ratio_plus, h_ratio_minus;
  std::vector<double> grad_ratio_plus, grad_ratio_minus;
  double x0 = 0.0;
  double T_est = 0.0;
};

// Last stable snapshot against the closed-form final profile, excluding
// 5 dx around the quench point. Throws NoQuenchError for unquenched runs.
FinalProfiles extract_final_profiles(const SimRecord& trajectory,
                                     const Parameters& params,
                                     const FinalProfileOptions& profile = {},
                                     double r_max = 0.1, int n_r = 48);

struct IntermediateErrorSeries {
  std::vector<double> t, s;
  std::vector<double> err_profile;        // sup |(T-t)^{1/(b+1)}/h - 1/PhiHat(z)|
  std::vector<double> err_gradient;       // sup over |x|<=K sqrt((T-t)|log..|)
  std::vector<double> err_weighted_grad;  // the h^{-2}-weighted gradient variant
};

IntermediateErrorSeries intermediate_profile_error(const SimRecord& trajectory,
                                                   const Parameters& params,
                                                   double T_est, double K = 1.0,
                                                   double x0 = 0.0);

}  // namespace quench
