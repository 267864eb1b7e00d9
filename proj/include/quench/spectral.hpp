// Spectral machinery in similarity variables: the rescaled Hermite basis of
// L = Lap - y/2 . grad + 1 (eigenvalues 1 - m/2), inner products against the
// Gaussian measure, the bulk/exterior cutoff, the mode decomposition
//   r = r0 + r1 y + r2 (y^2 - 2) + r_minus + r_e,
// the heat kernel of e^{theta L}, and the potential V / remainder R of the
// equation satisfied by q = w - phi.
#pragma once

#include <vector>

#include "quench/grid.hpp"
#include "quench/params.hpp"

namespace quench {

// Thread-local accuracy warning channel. Operations push short notes; callers
// may drain them (the CLI prints them to stderr).
namespace warnings {
void push(const std::string& message);
std::vector<std::string> drain();
}  // namespace warnings

// Rescaled Hermite polynomial h_ell(xi) = sum_j (-1)^j ell!/(j!(ell-2j)!) xi^{ell-2j}.
double hermite_eval(int ell, double xi);

// Squared norm ||h_ell||^2 = 2^ell ell! under rho.
double hermite_norm_sq(int ell);

// Coefficient table and norms up to max_degree, built from the explicit sum.
struct HermiteBasis {
  explicit HermiteBasis(int max_degree);
  int max_degree;
  std::vector<std::vector<double>> coeffs;  // coeffs[ell][k] multiplies xi^k
  std::vector<double> norms_sq;
  double eval(int ell, double xi) const;
};

// Gaussian-measure inner product of two sampled functions on a common grid.
// Emits an accuracy warning when the grid halfwidth is below 20.
double inner_product_rho(const GridFunction& f, const GridFunction& g);

// Radial bulk cutoff chi0(|y| / (K0 sqrt(s))) with the C^2 quintic smoothstep
// chi0: identically 1 on [0,1], identically 0 on [2, inf).
double cutoff_chi0(double r);
double cutoff_chi(double y, double s, double K0);

// Mode decomposition of a sampled function at slice s with cutoff constant K0.
// r_minus is defined as the pointwise remainder of the bulk part after the
// quadratic modes are removed, so reconstruct() reproduces the input exactly.
struct ModeDecomposition {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  GridFunction r_minus;
  GridFunction r_e;
  double s = 0.0;
  double K0 = 0.0;
  GridFunction reconstruct() const;
};

ModeDecomposition decompose(const GridFunction& r, double s, double K0);

// Weighted seminorm sup |f(y)| / (1 + |y|^3) over the sampled range.
double weighted_sup_cubic(const GridFunction& f);

// Second-order finite-difference application of L = Lap - y/2 . grad + 1.
GridFunction apply_L(const GridFunction& r);

// e^{theta L} applied through its explicit kernel
//   e^theta / (4 pi (1-e^{-theta}))^{1/2} exp(-|y e^{-theta/2} - x|^2 / (4(1-e^{-theta}))),
// integrated against the samples of r. Throws for theta <= 0.
GridFunction mehler_apply(double theta, const GridFunction& r);

// Profile ansatz phi(y, s) = Phi(y / sqrt(s)) + N kappa / (2 (p-a) s) and its
// closed-form derivatives.
double phi_similarity(double y, double s, const Parameters& params);
double phi_similarity_dy(double y, double s, const Parameters& params);
double phi_similarity_dyy(double y, double s, const Parameters& params);
double phi_similarity_ds(double y, double s, const Parameters& params);

// Potential V = p (phi^{p-1} - kappa^{p-1}).
double potential_V(double y, double s, const Parameters& params);

// Remainder R = -phi_s + Lap phi - y/2 . grad phi - phi/(p-1)
//               - a |grad phi|^2 / phi + phi^p (radial Laplacian for N > 1).
double remainder_R(double y, double s, const Parameters& params);

}  // namespace quench
