#include "quench/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "quench/spectral.hpp"

namespace quench {

ModeSeries track_modes(const SimRecord& trajectory, const Parameters& params,
                       double T_used, const SimilarityGridSpec& spec) {
  ModeSeries series;
  for (const auto& snap : trajectory.snapshots) {
    if (!(snap.time_tag < T_used)) continue;
    const SimilaritySlice slice =
        transform_to_similarity(snap, snap.time_tag, T_used, params, spec);
    if (!(slice.s > 1.0)) continue;
    const ModeDecomposition modes = decompose(slice.q, slice.s, params.K0);
    const double y_cov = std::min(slice.y_covered, spec.y_max);
    double qminus_w = 0.0, qe_sup = 0.0, q_sup = 0.0;
    for (int i = 0; i < slice.q.n(); ++i) {
      const double y = std::fabs(slice.q.x(i));
      if (y > y_cov) continue;
      qminus_w = std::max(qminus_w, std::fabs(modes.r_minus.values[i]) /
                                        (1.0 + y * y * y));
      qe_sup = std::max(qe_sup, std::fabs(modes.r_e.values[i]));
      q_sup = std::max(q_sup, std::fabs(slice.q.values[i]));
    }
    const std::vector<double> gq = gradient(slice.q);
    double gradq_sup = 0.0;
    for (int i = 0; i < slice.q.n(); ++i) {
      if (std::fabs(slice.q.x(i)) > y_cov) continue;
      gradq_sup = std::max(gradq_sup, std::fabs(gq[i]));
    }
    series.s.push_back(slice.s);
    series.q0.push_back(modes.r0);
    series.q1.push_back(modes.r1);
    series.q2.push_back(modes.r2);
    series.qminus_weighted.push_back(qminus_w);
    series.qe_sup.push_back(qe_sup);
    series.q_sup.push_back(q_sup);
    series.gradq_sup.push_back(gradq_sup);
  }
  return series;
}

namespace {

// Four-point Lagrange interpolation on a strictly increasing abscissa.
double interp_series(const std::vector<double>& s, const std::vector<double>& v,
                     double at) {
  const int n = static_cast<int>(s.size());
  int hi = 1;
  while (hi + 1 < n && s[hi] < at) ++hi;
  int i0 = std::clamp(hi - 2, 0, n - 4);
  double value = 0.0;
  for (int a = i0; a < i0 + 4; ++a) {
    double basis = 1.0;
    for (int b = i0; b < i0 + 4; ++b) {
      if (b != a) basis *= (at - s[b]) / (s[a] - s[b]);
    }
    value += basis * v[a];
  }
  return value;
}

}  // namespace

ModeSeries resample_uniform(const ModeSeries& series, double ds) {
  const int n = static_cast<int>(series.s.size());
  if (n < 4) throw InsufficientDataError("resample_uniform: need >= 4 samples");
  ModeSeries out;
  const double s0 = series.s.front();
  const double s1 = series.s.back();
  const int m = static_cast<int>(std::floor((s1 - s0) / ds)) + 1;
  for (int k = 0; k < m; ++k) {
    const double at = s0 + k * ds;
    out.s.push_back(at);
    out.q0.push_back(interp_series(series.s, series.q0, at));
    out.q1.push_back(interp_series(series.s, series.q1, at));
    out.q2.push_back(interp_series(series.s, series.q2, at));
    out.qminus_weighted.push_back(
        interp_series(series.s, series.qminus_weighted, at));
    out.qe_sup.push_back(interp_series(series.s, series.qe_sup, at));
    out.q_sup.push_back(interp_series(series.s, series.q_sup, at));
    out.gradq_sup.push_back(interp_series(series.s, series.gradq_sup, at));
  }
  return out;
}

namespace {

// Fourth-order first derivative on a uniform grid, one-sided at the ends.
std::vector<double> differentiate4(const std::vector<double>& y, double ds) {
  const int n = static_cast<int>(y.size());
  std::vector<double> d(n);
  auto at = [&](int i) { return y[i]; };
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) /
             (12.0 * ds);
    } else if (i == 0) {
      d[i] = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) -
              3.0 * at(4)) / (12.0 * ds);
    } else if (i == 1) {
      d[i] = (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) /
             (12.0 * ds);
    } else if (i == n - 2) {
      d[i] = (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) +
              6.0 * at(n - 4) - at(n - 5)) / (12.0 * ds);
    } else {
      d[i] = (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) -
              16.0 * at(n - 4) + 3.0 * at(n - 5)) / (12.0 * ds);
    }
  }
  return d;
}

// Truncation estimate |d^5 y / ds^5| * ds^4 / 30 via fifth differences.
double truncation_estimate(const std::vector<double>& y, double ds) {
  const int n = static_cast<int>(y.size());
  if (n < 6) return 0.0;
  double max_d5 = 0.0;
  for (int i = 0; i + 5 < n; ++i) {
    const double d5 = y[i + 5] - 5.0 * y[i + 4] + 10.0 * y[i + 3] -
                      10.0 * y[i + 2] + 5.0 * y[i + 1] - y[i];
    max_d5 = std::max(max_d5, std::fabs(d5));
  }
  return max_d5 / (30.0 * ds);
}

}  // namespace

ModeOdeReport verify_mode_odes(const ModeSeries& series) {
  const int n = static_cast<int>(series.s.size());
  if (n < 5) {
    throw InsufficientDataError("verify_mode_odes: need at least 5 samples");
  }
  const double ds = series.s[1] - series.s[0];
  for (int i = 1; i + 1 < n; ++i) {
    if (std::fabs(series.s[i + 1] - series.s[i] - ds) > 1e-6 * std::max(1.0, ds)) {
      throw InsufficientDataError("verify_mode_odes: non-uniform s grid");
    }
  }
  ModeOdeReport report;
  report.s = series.s;
  const auto d0 = differentiate4(series.q0, ds);
  const auto d1 = differentiate4(series.q1, ds);
  const auto d2 = differentiate4(series.q2, ds);
  report.scaled_res0.resize(n);
  report.scaled_res1.resize(n);
  report.scaled_res2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = series.s[i];
    report.scaled_res0[i] = s * s * std::fabs(d0[i] - series.q0[i]);
    report.scaled_res1[i] = s * s * std::fabs(d1[i] - 0.5 * series.q1[i]);
    report.scaled_res2[i] = s * s * s * std::fabs(d2[i] + 2.0 * series.q2[i] / s);
    report.sup0 = std::max(report.sup0, report.scaled_res0[i]);
    report.sup1 = std::max(report.sup1, report.scaled_res1[i]);
    report.sup2 = std::max(report.sup2, report.scaled_res2[i]);
  }
  const double s_max = series.s.back();
  report.trunc0 = truncation_estimate(series.q0, ds) * s_max * s_max;
  report.trunc1 = truncation_estimate(series.q1, ds) * s_max * s_max;
  report.trunc2 = truncation_estimate(series.q2, ds) * s_max * s_max * s_max;
  report.cbar_fit = std::max(report.sup0, report.sup1);
  return report;
}

RateFit fit_rate(const std::vector<double>& s, const std::vector<double>& y) {
  if (s.size() != y.size() || s.size() < 10 || s.back() - s.front() < 2.0) {
    throw InsufficientDataError(
        "fit_rate: need >= 10 samples spanning at least 2 in s");
  }
  auto fit_one = [&](auto model, double* c) {
    double sfy = 0.0, sff = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double f = model(s[i]);
      sfy += f * y[i];
      sff += f * f;
    }
    *c = sfy / sff;
    double res = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double e = y[i] - *c * model(s[i]);
      res += e * e;
    }
    return res;
  };
  RateFit fit;
  fit.res_logs_over_s =
      fit_one([](double v) { return std::log(v) / v; }, &fit.c_logs_over_s);
  fit.res_inv_s = fit_one([](double v) { return 1.0 / v; }, &fit.c_inv_s);
  fit.res_inv_sqrt_s =
      fit_one([](double v) { return 1.0 / std::sqrt(v); }, &fit.c_inv_sqrt_s);
  fit.best = "logs_over_s";
  double best_res = fit.res_logs_over_s;
  if (fit.res_inv_s < best_res) {
    fit.best = "inv_s";
    best_res = fit.res_inv_s;
  }
  if (fit.res_inv_sqrt_s < best_res) {
    fit.best = "inv_sqrt_s";
  }
  return fit;
}

SeedRun run_seed_to_exit(const SeedParams& seed, const Parameters& params,
                         const Forcing& forcing, const ShootOptions& options,
                         double snapshot_ds) {
  SeedRun run;
  const GridFunction h0 = build_initial_h(seed, params, options.grid, options.profile);
  SimOptions sim;
  sim.T_ref = params.T;
  sim.snapshot_ds = (snapshot_ds > 0.0) ? snapshot_ds : options.audit_ds;
  sim.s_end = options.s_end + 1e-9;
  sim.h_stop = options.h_stop;
  run.record = simulate_physical(h0, params, forcing, sim);

  const GridFunction& baseline = run.record.snapshots.front();
  run.outcome.d0 = seed.d0;
  run.outcome.d1 = seed.d1;
  run.outcome.s_exit = options.s_end;
  run.outcome.exit_condition = "horizon reached";
  run.outcome.exit_sign = 0;
  const double audit_stride = options.audit_ds;
  double next_audit = seed.s0(params.T);
  for (const auto& snap : run.record.snapshots) {
    if (!(snap.time_tag < params.T)) continue;
    const double s = -std::log(params.T - snap.time_tag);
    if (s < next_audit - 1e-9) continue;
    next_audit = s + audit_stride - 1e-9;
    const ShrinkReport report =
        audit_shrinking_set(snap, snap.time_tag, baseline, params, params.T,
                            options.audit);
    if (!report.all_pass()) {
      for (const auto& c : report.conditions) {
        if (c.pass) continue;
        run.outcome.s_exit = s;
        run.outcome.exit_condition = c.name;
        if (c.name == "q0") {
          const ModeDecomposition modes =
              decompose(transform_to_similarity(snap, snap.time_tag, params.T,
                                                params, options.audit.sim_grid)
                            .q,
                        s, params.K0);
          run.outcome.exit_sign = modes.r0 > 0.0 ? 1 : -1;
        } else if (c.name == "q1") {
          const ModeDecomposition modes =
              decompose(transform_to_similarity(snap, snap.time_tag, params.T,
                                                params, options.audit.sim_grid)
                            .q,
                        s, params.K0);
          run.outcome.exit_sign = modes.r1 > 0.0 ? 1 : -1;
        }
        break;
      }
      if (run.outcome.exit_condition != "horizon reached") break;
    }
  }
  return run;
}

ShootResult shoot(const Parameters& params, const Forcing& forcing, double t0,
                  const ShootOptions& options) {
  ShootResult result;
  SeedParams center;
  center.t0 = t0;
  const double s0 = center.s0(params.T);

  auto audit_at_s0 = [&](const SeedParams& seed) {
    const GridFunction h0 =
        build_initial_h(seed, params, options.grid, options.profile);
    return audit_shrinking_set(h0, t0, h0, params, params.T, options.audit);
  };

  if (options.levels <= 0) {
    center.d0 = 0.5 * (options.d0_min + options.d0_max);
    center.d1 = 0.5 * (options.d1_min + options.d1_max);
    result.best_d0 = center.d0;
    result.best_d1 = center.d1;
    result.s_max = s0;
    result.exit_condition = "horizon reached";
    result.init_audit = audit_at_s0(center);
    return result;
  }

  if (options.check_corners) {
    // Corners run concurrently; seeds are independent simulations.
    std::vector<std::pair<double, double>> corners = {
        {options.d0_min, options.d1_min},
        {options.d0_min, options.d1_max},
        {options.d0_max, options.d1_min},
        {options.d0_max, options.d1_max}};
    std::vector<std::future<LevelRecord>> futures;
    for (auto [d0, d1] : corners) {
      futures.push_back(std::async(std::launch::async, [&, d0, d1]() {
        SeedParams seed{d0, d1, t0};
        return run_seed_to_exit(seed, params, forcing, options).outcome;
      }));
    }
    std::vector<LevelRecord> corner_outcomes;
    for (auto& f : futures) corner_outcomes.push_back(f.get());
    bool any_trapped = false;
    bool all_same = true;
    for (const auto& c : corner_outcomes) {
      if (c.exit_condition == "horizon reached") any_trapped = true;
      if (c.exit_condition != corner_outcomes.front().exit_condition ||
          c.exit_sign != corner_outcomes.front().exit_sign) {
        all_same = false;
      }
    }
    if (!any_trapped && all_same) {
      throw BoxDoesNotStraddleError(
          "shoot: all box corners exit through " +
          corner_outcomes.front().exit_condition + " with the same sign");
    }
  }

  double d0_lo = options.d0_min, d0_hi = options.d0_max;
  double d1_lo = options.d1_min, d1_hi = options.d1_max;
  result.s_max = s0;
  result.exit_condition = "initialization";
  result.best_d0 = 0.5 * (d0_lo + d0_hi);
  result.best_d1 = 0.5 * (d1_lo + d1_hi);

  for (int level = 1; level <= options.levels; ++level) {
    SeedParams seed;
    seed.t0 = t0;
    seed.d0 = 0.5 * (d0_lo + d0_hi);
    seed.d1 = 0.5 * (d1_lo + d1_hi);
    LevelRecord rec = run_seed_to_exit(seed, params, forcing, options).outcome;
    rec.level = level;
    result.history.push_back(rec);

    const bool deeper =
        rec.s_exit > result.s_max ||
        (rec.s_exit == result.s_max &&
         std::fabs(rec.d0) + std::fabs(rec.d1) <
             std::fabs(result.best_d0) + std::fabs(result.best_d1));
    if (deeper) {
      result.best_d0 = rec.d0;
      result.best_d1 = rec.d1;
      result.s_max = rec.s_exit;
      result.exit_condition = rec.exit_condition;
    }
    if (rec.exit_condition == "horizon reached") break;
    // The seed -> (q0, q1) map has positive diagonal: a positive exit means
    // the coordinate is too large.
    if (rec.exit_condition == "q0") {
      (rec.exit_sign > 0 ? d0_hi : d0_lo) = seed.d0;
    } else if (rec.exit_condition == "q1") {
      (rec.exit_sign > 0 ? d1_hi : d1_lo) = seed.d1;
    } else {
      break;  // exited through a non-steerable condition
    }
  }

  SeedParams best{result.best_d0, result.best_d1, t0};
  result.init_audit = audit_at_s0(best);
  return result;
}

FinalProfiles extract_final_profiles(const SimRecord& trajectory,
                                     const Parameters& params,
                                     const FinalProfileOptions& profile,
                                     double r_max, int n_r) {
  if (!trajectory.quenched) {
    throw NoQuenchError("extract_final_profiles: no quench detected");
  }
  const QuenchEstimate est = detect_quench(trajectory, params.beta);
  const GridFunction& last = trajectory.snapshots.back();
  const std::vector<double> grad_values = gradient(last);
  GridFunction grad_fn = last;
  grad_fn.values = grad_values;

  FinalProfiles out;
  out.x0 = est.x0_est;
  out.T_est = est.T_est;
  const double dx = last.dx();
  const double r_min = 5.0 * dx;
  if (!(r_max > r_min)) {
    throw std::domain_error("extract_final_profiles: window collapsed");
  }
  for (int k = 0; k < n_r; ++k) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) /
                                                         (n_r - 1));
    const double xp = est.x0_est + r;
    const double xm = est.x0_est - r;
    if (xp > last.x_max || xm < last.x_min) continue;
    const double hp = interp_monotone_cubic(last, xp);
    const double hm = interp_monotone_cubic(last, xm);
    const double gp = interp_cubic(grad_fn, xp);
    const double gm = interp_cubic(grad_fn, xm);
    const double H = final_profile(r, params.beta, profile);
    const double G = grad_final_profile(r, params.beta, profile);
    out.r.push_back(r);
    out.h_star_plus.push_back(hp);
    out.h_star_minus.push_back(hm);
    out.grad_h_star_plus.push_back(gp);
    out.grad_h_star_minus.push_back(gm);
    out.H_star_ref.push_back(H);
    out.grad_H_star_ref.push_back(G);
    out.h_ratio_plus.push_back(hp / H);
    out.h_ratio_minus.push_back(hm / H);
    out.grad_ratio_plus.push_back(std::fabs(gp) / std::fabs(G));
    out.grad_ratio_minus.push_back(std::fabs(gm) / std::fabs(G));
  }
  return out;
}

IntermediateErrorSeries intermediate_profile_error(const SimRecord& trajectory,
                                                   const Parameters& params,
                                                   double T_est, double K,
                                                   double x0) {
  IntermediateErrorSeries series;
  for (const auto& snap : trajectory.snapshots) {
    if (!(snap.time_tag < T_est)) continue;
    const double gap = T_est - snap.time_tag;
    const double log_gap = std::fabs(std::log(gap));
    if (!(log_gap > 1.0)) continue;
    const double z_scale = std::sqrt(gap * log_gap);
    const double pow_gap = std::pow(gap, 1.0 / (params.beta + 1.0));
    const std::vector<double> grad_values = gradient(snap);
    double e_profile = 0.0, e_grad = 0.0, e_wgrad = 0.0;
    for (int i = 0; i < snap.n(); ++i) {
      const double x = snap.x(i);
      const double z = (x - x0) / z_scale;
      const double hat = phi_hat(std::fabs(z), params.beta);
      const double ghat = grad_phi_hat(z, params.beta);
      const double hv = snap.values[i];
      e_profile = std::max(e_profile, std::fabs(pow_gap / hv - 1.0 / hat));
      const double gv = grad_values[i];
      if (std::fabs(x - x0) <= K * z_scale) {
        const double lhs = std::pow(gap, 0.5 - 1.0 / (params.beta + 1.0)) * gv;
        e_grad = std::max(e_grad, std::fabs(lhs - ghat / std::sqrt(log_gap)));
      }
      const double lhs_w =
          std::pow(gap, 0.5 + 1.0 / (params.beta + 1.0)) * gv / (hv * hv);
      e_wgrad = std::max(
          e_wgrad, std::fabs(lhs_w - ghat / (std::sqrt(log_gap) * hat * hat)));
    }
    series.t.push_back(snap.time_tag);
    series.s.push_back(-std::log(gap));
    series.err_profile.push_back(e_profile);
    series.err_gradient.push_back(e_grad);
    series.err_weighted_grad.push_back(e_wgrad);
  }
  return series;
}

}  // namespace quench
