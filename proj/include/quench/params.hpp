// Model parameters for the quenching equation  dh/dt = Lap(h) - h^{-beta} + ...
// and the closed-form objects attached to it: the blowup-variable exponents
// (a, p, b, kappa), the self-similar profiles Phi and PhiHat, the final
// extinction profile H*, the flat (space-independent) solutions, the
// localized flat solution khat and its gradient companion khat_x, and the
// quasi-parabola map |x| = (K0/4) sqrt(theta |log theta|) with its inverse.
#pragma once

#include <stdexcept>
#include <vector>

namespace quench {

// Exponents and scheme constants. beta and alpha determine everything in the
// first block; the remaining constants parameterize the shrinking-set audit.
struct Parameters {
  double beta = 1.0;   // quenching exponent, h^{-beta}
  double alpha = 1.0;  // transformation index, u = alpha^{alpha/(beta+1)} / h^alpha
  double a = 2.0;      // 1 + 1/alpha
  double p = 3.0;      // (1 + alpha + beta)/alpha
  double b = 1.0;      // (p-1)^2 / (4(p-a))
  double kappa = 0.70710678118654752;  // (p-1)^{-1/(p-1)}
  int N = 1;           // spatial dimension (grids are 1-D; profiles accept radial N)
  double T = 0.01;     // target quench time, in (0, e^{-1})

  // Shrinking-set constants (calibrated defaults; all overridable in config).
  double K0 = 8.0;
  double A = 20.0;
  double eps0 = 0.15;
  double alpha0 = 0.1;
  double delta0 = 1.3;
  double C0 = 5.0;
  double eta0 = 2.0;
  double alpha_under = 3.5;
  double alpha_bar = 4.5;
};

// Fills (a, p, b, kappa) from (beta, alpha). Throws std::domain_error on
// non-positive inputs.
Parameters derive_exponents(double beta, double alpha);

// Validity checks for a fully populated Parameters value; throws on violation.
void validate(const Parameters& params);

// Blowup-variable profile Phi(z) = (p - 1 + b |z|^2)^{-1/(p-1)}, radial.
double phi_big(double abs_z, const Parameters& params);

// Quenching-variable profile PhiHat(z) = (beta+1 + (beta+1)^2/(4 beta) |z|^2)^{1/(beta+1)}
// and its exact gradient (signed 1-D value; direction z/|z| in general).
double phi_hat(double abs_z, double beta);
double grad_phi_hat(double z, double beta);

// Final extinction profile about x0 = 0 on a bounded domain:
//   inner branch  H*(x) = [ (beta+1)^2/(8 beta) |x|^2 / |log|x|| ]^{1/(beta+1)}
//   outer branch  H* = 1 for |x| >= rho0/2,
// joined by a C^1 monotone cubic blend in log|x|. The inner branch extends to
// min(c_inner, rho0/4); c_inner is exposed because no canonical value exists.
struct FinalProfileOptions {
  double rho0 = 1.0;      // distance from the extinction point to the boundary
  double c_inner = 0.05;  // cap of the inner branch (kept below e^{-1})
  double inner_radius() const { return c_inner < rho0 / 4.0 ? c_inner : rho0 / 4.0; }
};

// Raw inner-branch formula and its exact derivative, valid for 0 < |x| < 1.
double final_profile_inner(double abs_x, double beta);
double grad_final_profile_inner(double x, double beta);

// Blended global profile and its derivative. Throws on x = 0.
double final_profile(double x, double beta, const FinalProfileOptions& opts = {});
double grad_final_profile(double x, double beta, const FinalProfileOptions& opts = {});

// Space-independent solutions quenching/blowing up at time T:
//   h(t) = [(beta+1)(T-t)]^{1/(beta+1)},  u(t) = [(p-1)(T-t)]^{-1/(p-1)}.
struct FlatSolutions {
  double h;
  double u;
};
FlatSolutions flat_solutions(double t, const Parameters& params);

// Localized flat solution on the unit time window:
//   khat(tau) = ((beta+1)(1-tau) + (beta+1)^2 K0^2 / (64 beta))^{1/(beta+1)},
// which solves dkhat/dtau = -khat^{-beta} with khat(0) = PhiHat(K0/4).
double k_hat(double tau, double beta, double K0);

// Gradient companion of khat: solves dk/dtau = (beta/khat^{beta+1}) k with
// initial value (grad PhiHat)(K0/4) / sqrt(log_theta) in the given direction.
// 1-D version: direction is +-1, returns the signed value.
double k_hat_x(double tau, double direction, double beta, double K0, double log_theta);

// Inverse of |x| = (K0/4) sqrt(theta |log theta|) on theta in (0, e^{-1}),
// where the left-hand side is strictly increasing. Bisection in log(theta) to
// absolute tolerance tol. Throws std::domain_error when no root exists below
// e^{-1} (the out-of-regime case).
double solve_theta(double abs_x, double K0, double tol = 1e-14);

// Forward map theta -> |x| used by solve_theta.
double quasi_parabola_radius(double theta, double K0);

// Cached monotone table of (|x|, theta) pairs for repeated queries.
class ThetaMap {
 public:
  ThetaMap(double K0, double abs_x_min, double abs_x_max, int table_size,
           double tol = 1e-14);
  double operator()(double abs_x) const;  // exact solve, seeded by the table
  double K0() const { return K0_; }
  double tolerance() const { return tol_; }
  const std::vector<double>& abs_x_table() const { return abs_x_; }
  const std::vector<double>& theta_table() const { return theta_; }

 private:
  double K0_;
  double tol_;
  std::vector<double> abs_x_;
  std::vector<double> theta_;
};

}  // namespace quench
