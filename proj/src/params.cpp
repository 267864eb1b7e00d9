#include "quench/params.hpp"

#include <algorithm>
#include <cmath>

namespace quench {

Parameters derive_exponents(double beta, double alpha) {
  if (!(beta > 0.0) || !(alpha > 0.0)) {
    throw std::domain_error("derive_exponents: beta and alpha must be positive");
  }
  Parameters params;
  params.beta = beta;
  params.alpha = alpha;
  params.a = 1.0 + 1.0 / alpha;
  params.p = (1.0 + alpha + beta) / alpha;
  params.b = (params.p - 1.0) * (params.p - 1.0) / (4.0 * (params.p - params.a));
  params.kappa = std::pow(params.p - 1.0, -1.0 / (params.p - 1.0));
  return params;
}

void validate(const Parameters& params) {
  if (!(params.beta > 0.0) || !(params.alpha > 0.0)) {
    throw std::domain_error("Parameters: beta, alpha must be positive");
  }
  if (!(1.0 < params.a && params.a < params.p)) {
    throw std::domain_error("Parameters: need 1 < a < p");
  }
  if (!(params.b > 0.0)) {
    throw std::domain_error("Parameters: b must be positive");
  }
  if (params.N < 1) {
    throw std::domain_error("Parameters: N must be >= 1");
  }
  if (!(params.T > 0.0 && params.T < std::exp(-1.0))) {
    throw std::domain_error("Parameters: T must lie in (0, e^{-1})");
  }
  for (double c : {params.K0, params.A, params.eps0, params.alpha0, params.delta0,
                   params.C0, params.eta0}) {
    if (!(c > 0.0)) {
      throw std::domain_error("Parameters: shrinking-set constants must be positive");
    }
  }
  if (!(params.alpha_under > 3.0) || !(params.alpha_bar >= params.alpha_under + 1.0)) {
    throw std::domain_error("Parameters: need alpha_under > 3 and alpha_bar >= alpha_under + 1");
  }
}

double phi_big(double abs_z, const Parameters& params) {
  const double base = params.p - 1.0 + params.b * abs_z * abs_z;
  return std::pow(base, -1.0 / (params.p - 1.0));
}

double phi_hat(double abs_z, double beta) {
  const double c = (beta + 1.0) * (beta + 1.0) / (4.0 * beta);
  return std::pow(beta + 1.0 + c * abs_z * abs_z, 1.0 / (beta + 1.0));
}

double grad_phi_hat(double z, double beta) {
  const double c = (beta + 1.0) * (beta + 1.0) / (4.0 * beta);
  const double base = beta + 1.0 + c * z * z;
  return (beta + 1.0) / (2.0 * beta) * z * std::pow(base, -beta / (beta + 1.0));
}

double final_profile_inner(double abs_x, double beta) {
  if (!(abs_x > 0.0)) {
    throw std::domain_error("final_profile_inner: singular at x = 0");
  }
  const double c = (beta + 1.0) * (beta + 1.0) / (8.0 * beta);
  const double log_abs = std::fabs(std::log(abs_x));
  return std::pow(c * abs_x * abs_x / log_abs, 1.0 / (beta + 1.0));
}

double grad_final_profile_inner(double x, double beta) {
  const double abs_x = std::fabs(x);
  if (!(abs_x > 0.0)) {
    throw std::domain_error("grad_final_profile_inner: singular at x = 0");
  }
  // d/dr [ (c r^2 / |log r|)^{1/(beta+1)} ] with |log r| = -log r for r < 1.
  const double c = (beta + 1.0) * (beta + 1.0) / (8.0 * beta);
  const double L = -std::log(abs_x);
  const double g = c * abs_x * abs_x / L;
  const double dg = c * abs_x * (2.0 * L + 1.0) / (L * L);
  const double deriv = std::pow(g, 1.0 / (beta + 1.0) - 1.0) * dg / (beta + 1.0);
  return (x >= 0.0 ? deriv : -deriv);
}

namespace {

// C^1 cubic smoothstep and its derivative.
double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_deriv(double t) { return 6.0 * t * (1.0 - t); }

}  // namespace

double final_profile(double x, double beta, const FinalProfileOptions& opts) {
  const double r = std::fabs(x);
  if (!(r > 0.0)) {
    throw std::domain_error("final_profile: singular at x = 0");
  }
  const double r_in = opts.inner_radius();
  const double r_out = opts.rho0 / 2.0;
  if (r <= r_in) return final_profile_inner(r, beta);
  if (r >= r_out) return 1.0;
  const double t = (std::log(r) - std::log(r_in)) / (std::log(r_out) - std::log(r_in));
  const double sigma = smoothstep(t);
  return (1.0 - sigma) * final_profile_inner(r, beta) + sigma;
}

double grad_final_profile(double x, double beta, const FinalProfileOptions& opts) {
  const double r = std::fabs(x);
  if (!(r > 0.0)) {
    throw std::domain_error("grad_final_profile: singular at x = 0");
  }
  const double r_in = opts.inner_radius();
  const double r_out = opts.rho0 / 2.0;
  if (r <= r_in) return grad_final_profile_inner(x, beta);
  if (r >= r_out) return 0.0;
  const double span = std::log(r_out) - std::log(r_in);
  const double t = (std::log(r) - std::log(r_in)) / span;
  const double sigma = smoothstep(t);
  const double dsigma_dr = smoothstep_deriv(t) / (span * r);
  const double inner = final_profile_inner(r, beta);
  const double dinner = grad_final_profile_inner(r, beta);
  const double deriv = (1.0 - sigma) * dinner + dsigma_dr * (1.0 - inner);
  return (x >= 0.0 ? deriv : -deriv);
}

FlatSolutions flat_solutions(double t, const Parameters& params) {
  if (!(t < params.T)) {
    throw std::domain_error("flat_solutions: requires t < T");
  }
  const double gap = params.T - t;
  FlatSolutions out;
  out.h = std::pow((params.beta + 1.0) * gap, 1.0 / (params.beta + 1.0));
  out.u = std::pow((params.p - 1.0) * gap, -1.0 / (params.p - 1.0));
  return out;
}

double k_hat(double tau, double beta, double K0) {
  const double base =
      (beta + 1.0) * (1.0 - tau) + (beta + 1.0) * (beta + 1.0) * K0 * K0 / (64.0 * beta);
  return std::pow(base, 1.0 / (beta + 1.0));
}

double k_hat_x(double tau, double direction, double beta, double K0, double log_theta) {
  const double base =
      (beta + 1.0) * (1.0 - tau) + (beta + 1.0) * (beta + 1.0) * K0 * K0 / (64.0 * beta);
  const double magnitude = (beta + 1.0) * K0 / (8.0 * beta) / std::sqrt(log_theta) *
                           std::pow(base, -beta / (beta + 1.0));
  return direction * magnitude;
}

double quasi_parabola_radius(double theta, double K0) {
  return K0 / 4.0 * std::sqrt(theta * std::fabs(std::log(theta)));
}

double solve_theta(double abs_x, double K0, double tol) {
  if (!(abs_x > 0.0)) {
    throw std::domain_error("solve_theta: |x| must be positive");
  }
  // Bisect on L = log(theta); the radius is strictly increasing in L for
  // theta < e^{-1}.
  double lo = -690.0;  // theta ~ 1e-300
  double hi = -1.0;    // theta = e^{-1}
  auto radius_of = [&](double L) {
    return K0 / 4.0 * std::exp(0.5 * L) * std::sqrt(-L);
  };
  if (abs_x >= radius_of(hi)) {
    throw std::domain_error("solve_theta: |x| outside the quasi-parabola regime");
  }
  if (abs_x <= radius_of(lo)) {
    throw std::domain_error("solve_theta: |x| below resolvable range");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (radius_of(mid) < abs_x ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

ThetaMap::ThetaMap(double K0, double abs_x_min, double abs_x_max, int table_size,
                   double tol)
    : K0_(K0), tol_(tol) {
  if (table_size < 2 || !(abs_x_min > 0.0) || !(abs_x_max > abs_x_min)) {
    throw std::domain_error("ThetaMap: invalid table specification");
  }
  abs_x_.resize(table_size);
  theta_.resize(table_size);
  const double l0 = std::log(abs_x_min);
  const double l1 = std::log(abs_x_max);
  for (int i = 0; i < table_size; ++i) {
    abs_x_[i] = std::exp(l0 + (l1 - l0) * i / (table_size - 1));
    theta_[i] = solve_theta(abs_x_[i], K0_, tol_);
  }
}

double ThetaMap::operator()(double abs_x) const {
  return solve_theta(abs_x, K0_, tol_);
}

}  // namespace quench
