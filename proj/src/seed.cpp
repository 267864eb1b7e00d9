#include "quench/seed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quench {

double SeedParams::s0(double T) const { return -std::log(T - t0); }

GridFunction build_initial_h(const SeedParams& seed, const Parameters& params,
                             const GridSpec& grid,
                             const FinalProfileOptions& profile) {
  if (!(seed.t0 >= 0.0 && seed.t0 < params.T)) {
    throw InvalidSeedError("build_initial_h: t0 must lie in [0, T)");
  }
  if (!(std::fabs(seed.d0) <= 1.0 && std::fabs(seed.d1) <= 1.0)) {
    throw InvalidSeedError("build_initial_h: |d0|, |d1| must not exceed 1");
  }
  const double gap = params.T - seed.t0;
  const double s0 = -std::log(gap);
  if (!(s0 > 1.0)) {
    throw InvalidSeedError("build_initial_h: requires T - t0 < e^{-1}");
  }
  const double z_scale = std::sqrt(gap * s0);
  const double chi1_scale = std::sqrt(gap) * std::pow(s0, params.beta / 2.0);
  const double amp = std::pow(gap, 1.0 / (params.beta + 1.0)) *
                     std::pow(params.alpha, 1.0 / (params.beta + 1.0));

  GridFunction h;
  h.values.resize(grid.n);
  h.x_min = grid.x_min;
  h.x_max = grid.x_max;
  h.kind = FieldKind::h;
  h.time_tag = seed.t0;

  for (int i = 0; i < grid.n; ++i) {
    const double x = h.x(i);
    const double chi1 = cutoff_chi0(std::fabs(x) / chi1_scale);
    double inner = 0.0;
    if (chi1 > 0.0) {
      const double z = x / z_scale;
      const double bracket =
          phi_big(std::fabs(z), params) +
          (seed.d0 + seed.d1 * z) * cutoff_chi0(std::fabs(z) / (params.K0 / 16.0));
      if (!(bracket > 0.0)) {
        throw InvalidSeedError("build_initial_h: seed bracket non-positive at x = " +
                               std::to_string(x));
      }
      inner = amp * std::pow(bracket, -1.0 / params.alpha);
    }
    const double outer = (chi1 < 1.0) ? final_profile(x, params.beta, profile) : 0.0;
    h.values[i] = inner * chi1 + outer * (1.0 - chi1);
  }
  check_positive(h);
  return h;
}

RegionFlags classify_region(double x, double t, const Parameters& params) {
  if (!(t >= 0.0 && t < params.T)) {
    throw std::domain_error("classify_region: t outside [0, T)");
  }
  const double gap = params.T - t;
  const double scale = std::sqrt(gap * std::fabs(std::log(gap)));
  const double r = std::fabs(x);
  RegionFlags flags;
  flags.in_R1 = r <= params.K0 * scale;
  flags.in_R2 = r >= params.K0 / 4.0 * scale && r <= params.eps0;
  flags.in_R3 = r >= params.eps0 / 4.0;
  return flags;
}

namespace {

// Piecewise-linear interpolation of a snapshot record in time, linear in x.
// Returns h(x, t) and, when grad is non-null, the x-derivative.
double sample_record(const SimRecord& record, double x, double t, double* grad) {
  const auto& snaps = record.snapshots;
  int hi = 0;
  while (hi + 1 < static_cast<int>(snaps.size()) && snaps[hi].time_tag < t) ++hi;
  const int lo = std::max(0, hi - 1);
  const GridFunction& A = snaps[lo];
  const GridFunction& B = snaps[hi];
  double wt = 0.0;
  if (B.time_tag > A.time_tag) {
    wt = std::clamp((t - A.time_tag) / (B.time_tag - A.time_tag), 0.0, 1.0);
  }
  const double va = interp_linear(A, x);
  const double vb = interp_linear(B, x);
  if (grad) {
    const double dx = A.dx();
    const double ga = (interp_linear(A, x + dx) - interp_linear(A, x - dx)) / (2.0 * dx);
    const double gb = (interp_linear(B, x + dx) - interp_linear(B, x - dx)) / (2.0 * dx);
    *grad = (1.0 - wt) * ga + wt * gb;
  }
  return (1.0 - wt) * va + wt * vb;
}

}  // namespace

KxSlices second_rescale(const SimRecord& trajectory, double x,
                        const Parameters& params, double T, int n_xi, int n_tau) {
  if (trajectory.snapshots.empty()) {
    throw std::invalid_argument("second_rescale: empty trajectory");
  }
  KxSlices out;
  out.x = x;
  out.theta = solve_theta(std::fabs(x), params.K0);
  out.t_of_x = T - out.theta;
  const double log_theta = std::fabs(std::log(out.theta));
  const double t0 = trajectory.snapshots.front().time_tag;
  const double t_last = trajectory.snapshots.back().time_tag;
  if (out.t_of_x > t_last) {
    throw OutOfRegimeError("second_rescale: trajectory ends before t(x)");
  }
  const double tau0 = std::max(0.0, (t0 - out.t_of_x) / out.theta);
  const double tau_avail = (t_last - out.t_of_x) / out.theta;
  // Keep the open endpoint tau = 1 at a ten-step distance; the last accepted
  // step length stands in for the unresolvable sliver.
  double dt_last = 0.0;
  const auto& series = trajectory.min_h_series;
  if (series.size() >= 2) {
    dt_last = series.back().t - series[series.size() - 2].t;
  }
  const double tau_open = 1.0 - 10.0 * std::max(dt_last, 0.0) / out.theta;
  const double tau_max = std::min(tau_avail, tau_open);
  if (!(tau_max > tau0)) {
    throw OutOfRegimeError("second_rescale: empty tau window");
  }

  const double xi_max = params.alpha0 * std::sqrt(log_theta);
  out.xi.resize(n_xi);
  for (int i = 0; i < n_xi; ++i) {
    out.xi[i] = -xi_max + 2.0 * xi_max * i / (n_xi - 1);
  }
  out.tau.resize(n_tau);
  for (int j = 0; j < n_tau; ++j) {
    out.tau[j] = tau0 + (tau_max - tau0) * j / (n_tau - 1);
  }

  const double amp = std::pow(out.theta, -1.0 / (params.beta + 1.0));
  const double grad_amp = std::pow(out.theta, 0.5 - 1.0 / (params.beta + 1.0));
  const double root = std::sqrt(out.theta);
  out.values.assign(n_tau, std::vector<double>(n_xi, 0.0));
  out.grad.assign(n_tau, std::vector<double>(n_xi, 0.0));
  for (int j = 0; j < n_tau; ++j) {
    const double t = out.t_of_x + out.theta * out.tau[j];
    for (int i = 0; i < n_xi; ++i) {
      const double X = x + root * out.xi[i];
      double grad = 0.0;
      const double value = sample_record(trajectory, X, t, &grad);
      out.values[j][i] = amp * value;
      out.grad[j][i] = grad_amp * grad;
    }
  }
  return out;
}

bool ShrinkReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ShrinkCondition& c) { return c.pass; });
}

const ShrinkCondition* ShrinkReport::find(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

ShrinkCondition make_condition(const std::string& name, double bound, double measured) {
  ShrinkCondition c;
  c.name = name;
  c.bound = bound;
  c.measured = measured;
  c.margin = bound - measured;
  c.pass = c.margin >= 0.0;
  return c;
}

}  // namespace

ShrinkReport audit_shrinking_set(const GridFunction& h, double t,
                                 const GridFunction& baseline,
                                 const Parameters& params, double T,
                                 const AuditOptions& options) {
  ShrinkReport report;
  report.t = t;
  const double gap = T - t;
  if (!(gap > 0.0)) throw std::domain_error("audit_shrinking_set: t >= T");
  const double s = -std::log(gap);
  report.s = s;
  if (!(s > 1.0)) throw std::domain_error("audit_shrinking_set: requires s > 1");
  const double log_s = std::log(s);

  // First region: mode bounds of the similarity-frame deviation.
  const SimilaritySlice slice =
      transform_to_similarity(h, t, T, params, options.sim_grid);
  const ModeDecomposition modes = decompose(slice.q, s, params.K0);
  const double s2 = s * s;
  report.conditions.push_back(
      make_condition("q0", params.A / s2, std::fabs(modes.r0)));
  report.conditions.push_back(
      make_condition("q1", params.A / s2, std::fabs(modes.r1)));
  report.conditions.push_back(make_condition(
      "q2", params.A * params.A * log_s / s2, std::fabs(modes.r2)));

  const double y_cov = std::min(slice.y_covered, options.sim_grid.y_max);
  double qminus_w = 0.0, qe_sup = 0.0, q_sup = 0.0;
  for (int i = 0; i < slice.q.n(); ++i) {
    const double y = std::fabs(slice.q.x(i));
    if (y > y_cov) continue;
    const double y3 = 1.0 + y * y * y;
    qminus_w = std::max(qminus_w, std::fabs(modes.r_minus.values[i]) / y3);
    qe_sup = std::max(qe_sup, std::fabs(modes.r_e.values[i]));
    q_sup = std::max(q_sup, std::fabs(slice.q.values[i]));
  }
  report.conditions.push_back(make_condition(
      "q_minus_weighted",
      std::pow(params.A, params.alpha_under) * log_s / std::pow(s, 2.5), qminus_w));
  report.conditions.push_back(make_condition(
      "q_e", std::pow(params.A, params.alpha_bar) * log_s / s, qe_sup));
  report.conditions.push_back(make_condition(
      "q_sup_aggregate",
      options.C_q_agg * std::pow(params.A, params.alpha_bar) * log_s / s, q_sup));

  // Second region: profile closeness and gradient bound of k_x, sampled on
  // the current slice only (earlier times were audited when current).
  const double r_lo = params.K0 / 4.0 * std::sqrt(gap * s);
  const double r_hi = params.eps0;
  double kx_dev = 0.0, kx_grad = 0.0;
  if (r_hi > r_lo) {
    const std::vector<double> grad_h = gradient(h);
    GridFunction grad_fn = h;
    grad_fn.values = grad_h;
    for (int ix = 0; ix < options.n_x_samples; ++ix) {
      const double frac = (options.n_x_samples == 1)
                              ? 0.0
                              : static_cast<double>(ix) / (options.n_x_samples - 1);
      const double r = r_lo * std::pow(r_hi / r_lo, frac);
      for (double sign : {-1.0, 1.0}) {
        const double x = sign * r;
        double theta;
        try {
          theta = solve_theta(r, params.K0);
        } catch (const std::domain_error&) {
          continue;
        }
        const double t_of_x = T - theta;
        const double tau = (t - t_of_x) / theta;
        if (tau < 0.0 || tau >= 1.0) continue;
        const double log_theta = std::fabs(std::log(theta));
        const double khat = k_hat(tau, params.beta, params.K0);
        const double amp = std::pow(theta, -1.0 / (params.beta + 1.0));
        const double grad_amp = std::pow(theta, 0.5 - 1.0 / (params.beta + 1.0));
        const double xi_max = params.alpha0 * std::sqrt(log_theta);
        for (int ixi = 0; ixi < options.n_xi_samples; ++ixi) {
          const double xi =
              -xi_max + 2.0 * xi_max * ixi / (options.n_xi_samples - 1);
          const double X = x + std::sqrt(theta) * xi;
          if (X < h.x_min || X > h.x_max) continue;
          const double kx = amp * interp_monotone_cubic(h, X);
          const double kx_g = grad_amp * interp_linear(grad_fn, X);
          kx_dev = std::max(kx_dev, std::fabs(kx - khat));
          kx_grad = std::max(kx_grad, std::fabs(kx_g) * std::sqrt(log_theta));
        }
      }
    }
  }
  report.conditions.push_back(make_condition("kx_profile", params.delta0, kx_dev));
  report.conditions.push_back(make_condition("kx_gradient", params.C0, kx_grad));

  // Third region: drift from the initial slice.
  const std::vector<double> grad_now = gradient(h);
  const std::vector<double> grad_base = gradient(baseline);
  double h_drift = 0.0, grad_drift = 0.0;
  for (int i = 0; i < h.n(); ++i) {
    if (std::fabs(h.x(i)) < params.eps0 / 4.0) continue;
    h_drift = std::max(h_drift, std::fabs(h.values[i] - baseline.values[i]));
    grad_drift = std::max(grad_drift, std::fabs(grad_now[i] - grad_base[i]));
  }
  report.conditions.push_back(make_condition("h_drift", params.eta0, h_drift));
  report.conditions.push_back(make_condition("grad_h_drift", params.eta0, grad_drift));
  return report;
}

std::string shrink_report_csv(const ShrinkReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,bound,measured,margin,pass\n";
  for (const auto& c : report.conditions) {
    out << c.name << ',' << c.bound << ',' << c.measured << ',' << c.margin << ','
        << (c.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace quench
