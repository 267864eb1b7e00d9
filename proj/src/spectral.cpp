#include "quench/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "quench/quadrature.hpp"

namespace quench {

namespace warnings {
namespace {
thread_local std::vector<std::string> g_messages;
}
void push(const std::string& message) { g_messages.push_back(message); }
std::vector<std::string> drain() {
  std::vector<std::string> out;
  out.swap(g_messages);
  return out;
}
}  // namespace warnings

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double hermite_eval(int ell, double xi) {
  if (ell < 0) throw std::domain_error("hermite_eval: negative degree");
  double sum = 0.0;
  for (int j = 0; 2 * j <= ell; ++j) {
    const double coef =
        (j % 2 == 0 ? 1.0 : -1.0) * factorial(ell) / (factorial(j) * factorial(ell - 2 * j));
    sum += coef * std::pow(xi, ell - 2 * j);
  }
  return sum;
}

double hermite_norm_sq(int ell) { return std::pow(2.0, ell) * factorial(ell); }

HermiteBasis::HermiteBasis(int max_degree_) : max_degree(max_degree_) {
  coeffs.resize(max_degree + 1);
  norms_sq.resize(max_degree + 1);
  for (int ell = 0; ell <= max_degree; ++ell) {
    coeffs[ell].assign(ell + 1, 0.0);
    for (int j = 0; 2 * j <= ell; ++j) {
      coeffs[ell][ell - 2 * j] =
          (j % 2 == 0 ? 1.0 : -1.0) * factorial(ell) / (factorial(j) * factorial(ell - 2 * j));
    }
    norms_sq[ell] = hermite_norm_sq(ell);
  }
}

double HermiteBasis::eval(int ell, double xi) const {
  const auto& c = coeffs[ell];
  double acc = 0.0;
  for (int k = ell; k >= 0; --k) acc = acc * xi + c[k];
  return acc;
}

double inner_product_rho(const GridFunction& f, const GridFunction& g) {
  if (f.n() != g.n() || f.x_min != g.x_min || f.x_max != g.x_max) {
    throw std::invalid_argument("inner_product_rho: mismatched grids");
  }
  const double y_max = std::max(std::fabs(f.x_min), std::fabs(f.x_max));
  if (y_max < 20.0) {
    warnings::push("inner_product_rho: grid halfwidth " + std::to_string(y_max) +
                   " < 20, Gaussian tail may be truncated");
  }
  std::vector<double> integrand(f.values.size());
  for (int i = 0; i < f.n(); ++i) {
    integrand[i] = f.values[i] * g.values[i] * rho_weight(f.x(i));
  }
  return trapz(integrand, f.dx());
}

double cutoff_chi0(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double t = 2.0 - r;  // t runs 1 -> 0 across the transition
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double cutoff_chi(double y, double s, double K0) {
  if (!(s > 0.0)) throw std::domain_error("cutoff_chi: s must be positive");
  return cutoff_chi0(std::fabs(y) / (K0 * std::sqrt(s)));
}

GridFunction ModeDecomposition::reconstruct() const {
  GridFunction out = r_minus;
  for (int i = 0; i < out.n(); ++i) {
    const double y = out.x(i);
    out.values[i] += r0 + r1 * y + r2 * (y * y - 2.0) + r_e.values[i];
  }
  return out;
}

ModeDecomposition decompose(const GridFunction& r, double s, double K0) {
  ModeDecomposition d;
  d.s = s;
  d.K0 = K0;
  GridFunction bulk = r;
  d.r_e = r;
  for (int i = 0; i < r.n(); ++i) {
    const double chi = cutoff_chi(r.x(i), s, K0);
    bulk.values[i] = chi * r.values[i];
    d.r_e.values[i] = (1.0 - chi) * r.values[i];
  }
  GridFunction h1 = r, h2 = r;
  GridFunction ones = r;
  for (int i = 0; i < r.n(); ++i) {
    const double y = r.x(i);
    ones.values[i] = 1.0;
    h1.values[i] = y;
    h2.values[i] = y * y - 2.0;
  }
  d.r0 = inner_product_rho(bulk, ones) / hermite_norm_sq(0);
  d.r1 = inner_product_rho(bulk, h1) / hermite_norm_sq(1);
  d.r2 = inner_product_rho(bulk, h2) / hermite_norm_sq(2);
  d.r_minus = bulk;
  for (int i = 0; i < r.n(); ++i) {
    const double y = r.x(i);
    d.r_minus.values[i] -= d.r0 + d.r1 * y + d.r2 * (y * y - 2.0);
  }
  d.r_minus.kind = r.kind;
  d.r_e.kind = r.kind;
  return d;
}

double weighted_sup_cubic(const GridFunction& f) {
  double sup = 0.0;
  for (int i = 0; i < f.n(); ++i) {
    const double y = std::fabs(f.x(i));
    sup = std::max(sup, std::fabs(f.values[i]) / (1.0 + y * y * y));
  }
  return sup;
}

GridFunction apply_L(const GridFunction& r) {
  const int n = r.n();
  if (n < 3) throw std::domain_error("apply_L: need at least 3 points");
  const double dx = r.dx();
  GridFunction out = r;
  auto second = [&](int i) {
    return (r.values[i + 1] - 2.0 * r.values[i] + r.values[i - 1]) / (dx * dx);
  };
  auto first = [&](int i) { return (r.values[i + 1] - r.values[i - 1]) / (2.0 * dx); };
  for (int i = 1; i + 1 < n; ++i) {
    out.values[i] = second(i) - 0.5 * r.x(i) * first(i) + r.values[i];
  }
  // One-sided second-order stencils at the ends.
  auto one_sided = [&](int i, int dir) {
    const double d1 = dir *
        (-3.0 * r.values[i] + 4.0 * r.values[i + dir] - r.values[i + 2 * dir]) /
        (2.0 * dx);
    const double d2 = (2.0 * r.values[i] - 5.0 * r.values[i + dir] +
                       4.0 * r.values[i + 2 * dir] - r.values[i + 3 * dir]) /
                      (dx * dx);
    return d2 - 0.5 * r.x(i) * d1 + r.values[i];
  };
  if (n >= 4) {
    out.values[0] = one_sided(0, +1);
    out.values[n - 1] = one_sided(n - 1, -1);
  }
  return out;
}

GridFunction mehler_apply(double theta, const GridFunction& r) {
  if (!(theta > 0.0)) throw std::domain_error("mehler_apply: theta must be positive");
  const int n = r.n();
  const double dx = r.dx();
  const double em = std::exp(-theta);
  const double denom = 4.0 * (1.0 - em);
  const double norm = std::exp(theta) / std::sqrt(std::numbers::pi * denom);
  GridFunction out = r;
  const double shrink = std::exp(-theta / 2.0);
  for (int i = 0; i < n; ++i) {
    const double yc = r.x(i) * shrink;
    std::vector<double> integrand(n);
    for (int j = 0; j < n; ++j) {
      const double diff = yc - r.x(j);
      integrand[j] = std::exp(-diff * diff / denom) * r.values[j];
    }
    out.values[i] = norm * trapz(integrand, dx);
  }
  return out;
}

namespace {

struct ProfileDerivs {
  double phi, phi_y, phi_yy, phi_s;
};

ProfileDerivs profile_derivs(double y, double s, const Parameters& pr) {
  // Phi(z) = G^{-1/(p-1)} with G = p - 1 + b z^2, z = y / sqrt(s).
  const double z = y / std::sqrt(s);
  const double G = pr.p - 1.0 + pr.b * z * z;
  const double Phi = std::pow(G, -1.0 / (pr.p - 1.0));
  const double Phip = std::pow(G, -pr.p / (pr.p - 1.0));
  const double dPhi = -2.0 * pr.b * z / (pr.p - 1.0) * Phip;
  const double d2Phi = -2.0 * pr.b / (pr.p - 1.0) * Phip +
                       4.0 * pr.b * pr.b * pr.p * z * z /
                           ((pr.p - 1.0) * (pr.p - 1.0)) *
                           std::pow(G, -(2.0 * pr.p - 1.0) / (pr.p - 1.0));
  ProfileDerivs out;
  const double corr = pr.N * pr.kappa / (2.0 * (pr.p - pr.a) * s);
  out.phi = Phi + corr;
  out.phi_y = dPhi / std::sqrt(s);
  // Radial Laplacian: Phi'' + (N-1)/z Phi', with the z -> 0 limit N Phi''(0).
  double lap_z;
  if (pr.N == 1) {
    lap_z = d2Phi;
  } else if (std::fabs(z) > 1e-12) {
    lap_z = d2Phi + (pr.N - 1.0) * dPhi / z;
  } else {
    lap_z = pr.N * d2Phi;
  }
  out.phi_yy = lap_z / s;
  out.phi_s = -0.5 * dPhi * y / (s * std::sqrt(s)) - corr / s;
  return out;
}

}  // namespace

double phi_similarity(double y, double s, const Parameters& pr) {
  return profile_derivs(y, s, pr).phi;
}

double phi_similarity_dy(double y, double s, const Parameters& pr) {
  return profile_derivs(y, s, pr).phi_y;
}

double phi_similarity_dyy(double y, double s, const Parameters& pr) {
  return profile_derivs(y, s, pr).phi_yy;
}

double phi_similarity_ds(double y, double s, const Parameters& pr) {
  return profile_derivs(y, s, pr).phi_s;
}

double potential_V(double y, double s, const Parameters& pr) {
  const double phi = phi_similarity(y, s, pr);
  return pr.p * (std::pow(phi, pr.p - 1.0) - std::pow(pr.kappa, pr.p - 1.0));
}

double remainder_R(double y, double s, const Parameters& pr) {
  const ProfileDerivs d = profile_derivs(y, s, pr);
  return -d.phi_s + d.phi_yy - 0.5 * y * d.phi_y - d.phi / (pr.p - 1.0) -
         pr.a * d.phi_y * d.phi_y / d.phi + std::pow(d.phi, pr.p);
}

}  // namespace quench
