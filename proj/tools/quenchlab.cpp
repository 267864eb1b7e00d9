// Experiment driver for the quenching laboratory. Subcommands compose the
// exported library operations and emit CSV artifacts plus a checksum
// manifest; see README.md for the column dictionary.
#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quench/config.hpp"
#include "quench/csv.hpp"
#include "quench/dynamics.hpp"
#include "quench/quadrature.hpp"
#include "quench/seed.hpp"
#include "quench/solver.hpp"
#include "quench/spectral.hpp"

namespace {

using namespace quench;

constexpr int kExitConfig = 2;
constexpr int kExitPositivity = 3;
constexpr int kExitNoQuench = 4;
constexpr int kExitOutOfRegime = 5;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
};

ExperimentConfig load(const CommonArgs& args) {
  ExperimentConfig config;
  if (args.config_path.empty()) {
    config = default_config();
    apply_overrides(config, args.overrides);
  } else {
    config = load_config(args.config_path, args.overrides);
  }
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  return config;
}

void flush_warnings() {
  for (const auto& w : warnings::drain()) {
    std::cerr << "warning: " << w << "\n";
  }
}

GridFunction build_seed_state(const ExperimentConfig& config) {
  if (config.seed_kind == SeedKind::flat) {
    GridFunction h;
    h.values.assign(config.grid.n, config.flat_h0);
    h.x_min = config.grid.x_min;
    h.x_max = config.grid.x_max;
    h.kind = FieldKind::h;
    h.time_tag = 0.0;
    return h;
  }
  return build_initial_h(config.seed, config.params, config.grid, config.profile);
}

SimRecord run_simulation(const ExperimentConfig& config, double s_end,
                         bool stop_at_s_end = true) {
  SimOptions options;
  options.h_stop = config.h_stop;
  options.control = config.control;
  if (config.seed_kind == SeedKind::well_prepared) {
    options.T_ref = config.params.T;
    options.snapshot_ds = config.snapshot_ds;
    options.s_end = s_end;
    options.stop_at_s_end = stop_at_s_end;
  } else {
    options.t_max = 10.0;
  }
  return simulate_physical(build_seed_state(config), config.params, config.forcing,
                           options);
}

int cmd_spectral_test(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);

  CsvWriter ortho({"l", "m", "value", "target", "normalized_error"});
  double max_off_diag = 0.0;
  for (int l = 0; l <= 10; ++l) {
    for (int m = 0; m <= 10; ++m) {
      const double value = inner_product_rho_fn(
          [l](double y) { return hermite_eval(l, y); },
          [m](double y) { return hermite_eval(m, y); });
      const double target = (l == m) ? hermite_norm_sq(l) : 0.0;
      const double scale = std::sqrt(hermite_norm_sq(l) * hermite_norm_sq(m));
      const double err = std::fabs(value - target) / scale;
      if (l != m) max_off_diag = std::max(max_off_diag, err);
      ortho.add_row({static_cast<double>(l), static_cast<double>(m), value, target,
                     err});
    }
  }
  artifacts.write("hermite_orthogonality.csv", ortho.str());

  CsvWriter conv({"m", "dy", "residual_norm"});
  for (int m = 0; m <= 4; ++m) {
    for (double dy : {0.1, 0.05, 0.025}) {
      const int n = static_cast<int>(std::round(80.0 / dy)) + 1;
      GridFunction hm;
      hm.values.resize(n);
      hm.x_min = -40.0;
      hm.x_max = 40.0;
      hm.kind = FieldKind::q;
      for (int i = 0; i < n; ++i) hm.values[i] = hermite_eval(m, hm.x(i));
      GridFunction res = apply_L(hm);
      const double lam = 1.0 - 0.5 * m;
      for (int i = 0; i < n; ++i) res.values[i] -= lam * hm.values[i];
      conv.add_row({static_cast<double>(m), dy,
                    std::sqrt(inner_product_rho(res, res))});
    }
  }
  artifacts.write("operator_convergence.csv", conv.str());

  CsvWriter mehler({"check", "value", "target", "abs_error"});
  {
    const double theta = 0.5;
    const int n = 1601;
    GridFunction f;
    f.values.resize(n);
    f.x_min = -40.0;
    f.x_max = 40.0;
    f.kind = FieldKind::q;
    for (int m = 0; m <= 3; ++m) {
      for (int i = 0; i < n; ++i) f.values[i] = hermite_eval(m, f.x(i));
      const GridFunction g = mehler_apply(theta, f);
      const double lam = std::exp((1.0 - 0.5 * m) * theta);
      double err = 0.0;
      for (int i = 0; i < n; ++i) {
        if (std::fabs(f.x(i)) > 10.0) continue;
        err = std::max(err, std::fabs(g.values[i] - lam * f.values[i]));
      }
      mehler.add_row_raw({"eigenfunction_m" + std::to_string(m),
                          format_double(err + lam), format_double(lam),
                          format_double(err)});
    }
  }
  artifacts.write("mehler_checks.csv", mehler.str());
  artifacts.finalize();
  std::cout << "spectral-test: max normalized off-diagonal " << max_off_diag
            << (max_off_diag < 1e-10 ? " (< 1e-10)" : " (EXCEEDS 1e-10)") << "\n";
  return max_off_diag < 1e-10 ? 0 : 1;
}

int cmd_profile_check(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);
  const Parameters& pr = config.params;

  CsvWriter exponents({"beta", "alpha", "a", "p", "b", "kappa"});
  for (double beta : {0.5, 1.0, 2.0, 3.0}) {
    const Parameters d = derive_exponents(beta, pr.alpha);
    exponents.add_row({beta, pr.alpha, d.a, d.p, d.b, d.kappa});
  }
  artifacts.write("exponents.csv", exponents.str());

  CsvWriter identity({"beta", "z", "phi_times_phihat_minus_1"});
  for (double beta : {0.5, 1.0, 2.0}) {
    const Parameters d = derive_exponents(beta, 1.0);
    for (double z = 0.0; z <= 10.0; z += 0.5) {
      identity.add_row({beta, z, phi_big(z, d) * phi_hat(z, beta) - 1.0});
    }
  }
  artifacts.write("profile_identity.csv", identity.str());

  CsvWriter theta_csv({"abs_x", "theta", "roundtrip_error", "log_ratio"});
  for (double ax : {1e-3, 1e-6, 1e-9}) {
    const double theta = solve_theta(ax, pr.K0);
    const double back = quasi_parabola_radius(theta, pr.K0);
    theta_csv.add_row({ax, theta, std::fabs(back - ax) / ax,
                       std::log(theta) / (2.0 * std::log(ax))});
  }
  artifacts.write("theta_map.csv", theta_csv.str());

  CsvWriter asym({"abs_x", "H_star", "khat1_theta_pow", "ratio"});
  for (double ax = 1e-2; ax >= 0.99e-6; ax *= 0.316227766016838) {
    const double theta = solve_theta(ax, pr.K0);
    const double H = final_profile_inner(ax, pr.beta);
    const double ref = k_hat(1.0, pr.beta, pr.K0) *
                       std::pow(theta, 1.0 / (pr.beta + 1.0));
    asym.add_row({ax, H, ref, H / ref});
  }
  artifacts.write("final_profile_asymptotics.csv", asym.str());
  artifacts.finalize();
  std::cout << "profile-check: wrote exponent, identity, theta and asymptotics tables\n";
  return 0;
}

int cmd_simulate(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);
  SimRecord record = run_simulation(config, config.s_end);

  CsvWriter min_h({"t", "min_h", "argmin_x"});
  for (const auto& sample : record.min_h_series) {
    min_h.add_row({sample.t, sample.min_h, sample.argmin_x});
  }
  artifacts.write("min_h_series.csv", min_h.str());

  const QuenchEstimate est = detect_quench(record, config.params.beta);
  record.estimated_T = est.T_est;
  record.estimated_x0 = est.x0_est;
  CsvWriter summary({"T_est", "x0_est", "quenched", "snapshots"});
  summary.add_row({est.T_est, est.x0_est, record.quenched ? 1.0 : 0.0,
                   static_cast<double>(record.snapshots.size())});
  artifacts.write("quench_summary.csv", summary.str());
  artifacts.finalize();
  std::cout << "simulate: T_est = " << est.T_est << ", x0_est = " << est.x0_est
            << "\n";
  return 0;
}

int cmd_modes(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);
  // Run through the window and on to quenching, then re-transform the
  // windowed snapshots against the estimated quench time.
  SimRecord record = run_simulation(config, config.s_end, false);
  double T_used = config.params.T;
  if (record.quenched) {
    T_used = detect_quench(record, config.params.beta).T_est;
  }
  if (config.seed_kind == SeedKind::well_prepared) {
    const double t_window_end = config.params.T - std::exp(-config.s_end);
    while (!record.snapshots.empty() &&
           record.snapshots.back().time_tag > t_window_end + 1e-12) {
      record.snapshots.pop_back();
    }
  } else {
    // Flat-style runs have no reference time up front: rerun with snapshots
    // spaced against the estimated quench time.
    SimOptions options;
    options.h_stop = config.h_stop;
    options.control = config.control;
    options.T_ref = T_used;
    options.snapshot_ds = config.snapshot_ds;
    options.s_end = config.s_end;
    options.stop_at_s_end = true;
    record = simulate_physical(build_seed_state(config), config.params,
                               config.forcing, options);
  }
  ModeSeries series = track_modes(record, config.params, T_used, config.sim_grid);
  series = resample_uniform(series, config.snapshot_ds);

  CsvWriter modes({"s", "q0", "q1", "q2", "qminus_weighted", "qe_sup", "q_sup",
                   "gradq_sup"});
  for (std::size_t i = 0; i < series.s.size(); ++i) {
    modes.add_row({series.s[i], series.q0[i], series.q1[i], series.q2[i],
                   series.qminus_weighted[i], series.qe_sup[i], series.q_sup[i],
                   series.gradq_sup[i]});
  }
  artifacts.write("modes.csv", modes.str());

  const ModeOdeReport ode = verify_mode_odes(series);
  CsvWriter residuals({"s", "scaled_res0", "scaled_res1", "scaled_res2"});
  for (std::size_t i = 0; i < ode.s.size(); ++i) {
    residuals.add_row({ode.s[i], ode.scaled_res0[i], ode.scaled_res1[i],
                       ode.scaled_res2[i]});
  }
  artifacts.write("mode_residuals.csv", residuals.str());

  CsvWriter fit_csv({"model", "coefficient", "residual"});
  const RateFit fit = fit_rate(series.s, series.q_sup);
  fit_csv.add_row_raw({"logs_over_s", format_double(fit.c_logs_over_s),
                       format_double(fit.res_logs_over_s)});
  fit_csv.add_row_raw({"inv_s", format_double(fit.c_inv_s),
                       format_double(fit.res_inv_s)});
  fit_csv.add_row_raw({"inv_sqrt_s", format_double(fit.c_inv_sqrt_s),
                       format_double(fit.res_inv_sqrt_s)});
  fit_csv.add_row_raw({"best:" + fit.best, "", ""});
  artifacts.write("rate_fit.csv", fit_csv.str());
  artifacts.finalize();
  std::cout << "modes: " << series.s.size() << " slices, Cbar_fit = "
            << ode.cbar_fit << ", best rate law " << fit.best << "\n";
  return 0;
}

ShootOptions shoot_options_from(const ExperimentConfig& config) {
  ShootOptions options;
  options.levels = config.shoot_levels;
  options.d0_min = config.d0_min;
  options.d0_max = config.d0_max;
  options.d1_min = config.d1_min;
  options.d1_max = config.d1_max;
  options.s_end = config.s_end;
  options.audit_ds = config.audit_ds;
  options.grid = config.grid;
  options.audit.sim_grid = config.sim_grid;
  options.audit.C_q_agg = config.C_q_agg;
  options.profile = config.profile;
  options.h_stop = config.h_stop;
  return options;
}

int cmd_shoot(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);
  const ShootOptions options = shoot_options_from(config);
  const ShootResult result =
      shoot(config.params, config.forcing, config.seed.t0, options);

  CsvWriter history({"level", "d0", "d1", "s_exit", "exit_condition", "exit_sign"});
  for (const auto& rec : result.history) {
    history.add_row_raw({std::to_string(rec.level), format_double(rec.d0),
                         format_double(rec.d1), format_double(rec.s_exit),
                         rec.exit_condition, std::to_string(rec.exit_sign)});
  }
  artifacts.write("shoot_history.csv", history.str());

  CsvWriter best({"best_d0", "best_d1", "s_max", "exit_condition"});
  best.add_row_raw({format_double(result.best_d0), format_double(result.best_d1),
                    format_double(result.s_max), result.exit_condition});
  artifacts.write("shoot_best.csv", best.str());
  artifacts.write("init_audit.csv", shrink_report_csv(result.init_audit));
  artifacts.finalize();
  std::cout << "shoot: best seed (" << result.best_d0 << ", " << result.best_d1
            << "), trapped to s = " << result.s_max << " (" << result.exit_condition
            << ")\n";
  return 0;
}

int cmd_final_profile(const ExperimentConfig& config) {
  ArtifactWriter artifacts(config.out_dir);
  // Record the s-window, then run freely down to the quench threshold.
  SimRecord record = run_simulation(config, config.s_end, false);
  const FinalProfiles profiles =
      extract_final_profiles(record, config.params, config.profile);

  CsvWriter curve({"r", "h_plus", "h_minus", "grad_plus", "grad_minus", "H_ref",
                   "grad_H_ref", "h_ratio_plus", "h_ratio_minus",
                   "grad_ratio_plus", "grad_ratio_minus"});
  for (std::size_t i = 0; i < profiles.r.size(); ++i) {
    curve.add_row({profiles.r[i], profiles.h_star_plus[i], profiles.h_star_minus[i],
                   profiles.grad_h_star_plus[i], profiles.grad_h_star_minus[i],
                   profiles.H_star_ref[i], profiles.grad_H_star_ref[i],
                   profiles.h_ratio_plus[i], profiles.h_ratio_minus[i],
                   profiles.grad_ratio_plus[i], profiles.grad_ratio_minus[i]});
  }
  artifacts.write("final_profile_ratio.csv", curve.str());

  const IntermediateErrorSeries errors = intermediate_profile_error(
      record, config.params, profiles.T_est, config.K_window, profiles.x0);
  CsvWriter err_csv({"t", "s", "err_profile", "err_gradient", "err_weighted_grad"});
  for (std::size_t i = 0; i < errors.t.size(); ++i) {
    err_csv.add_row({errors.t[i], errors.s[i], errors.err_profile[i],
                     errors.err_gradient[i], errors.err_weighted_grad[i]});
  }
  artifacts.write("intermediate_errors.csv", err_csv.str());
  artifacts.finalize();
  std::cout << "final-profile: T_est = " << profiles.T_est << ", x0 = "
            << profiles.x0 << ", " << profiles.r.size() << " radii\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quenchlab: numerical laboratory for finite-time quenching"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonArgs args;
  int levels_override = -1;
  std::string seed_box;
  app.add_option("--config", args.config_path, "Path to a config file");
  app.add_option("--out", args.out_dir, "Output directory");
  app.add_option("--override", args.overrides, "Override section.key=value")
      ->take_all();

  auto* spectral = app.add_subcommand("spectral-test", "Orthogonality and operator checks");
  auto* profile = app.add_subcommand("profile-check", "Closed-form profile tables");
  auto* simulate = app.add_subcommand("simulate", "Run the physical solver");
  auto* modes = app.add_subcommand("modes", "Mode series, ODE residuals, rate fit");
  auto* shoot_cmd = app.add_subcommand("shoot", "Bisection over the seed box");
  shoot_cmd->add_option("--levels", levels_override, "Bisection levels");
  shoot_cmd->add_option("--seed-box", seed_box, "d0min,d0max,d1min,d1max");
  auto* final_cmd = app.add_subcommand("final-profile", "Quench run and profile ratios");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config = load(args);
    if (levels_override >= 0) config.shoot_levels = levels_override;
    if (!seed_box.empty()) {
      std::istringstream in(seed_box);
      char comma;
      if (!(in >> config.d0_min >> comma >> config.d0_max >> comma >>
            config.d1_min >> comma >> config.d1_max)) {
        throw ConfigError("--seed-box: expected d0min,d0max,d1min,d1max");
      }
    }
    int status = 1;
    if (spectral->parsed()) status = cmd_spectral_test(config);
    if (profile->parsed()) status = cmd_profile_check(config);
    if (simulate->parsed()) status = cmd_simulate(config);
    if (modes->parsed()) status = cmd_modes(config);
    if (shoot_cmd->parsed()) status = cmd_shoot(config);
    if (final_cmd->parsed()) status = cmd_final_profile(config);
    flush_warnings();
    return status;
  } catch (const quench::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const quench::InvalidSeedError& err) {
    std::cerr << "invalid seed: " << err.what() << "\n";
    return kExitOutOfRegime;
  } catch (const quench::OutOfRegimeError& err) {
    std::cerr << "out of regime: " << err.what() << "\n";
    return kExitOutOfRegime;
  } catch (const quench::PositivityLossError& err) {
    std::cerr << "positivity loss: " << err.what() << "\n";
    return kExitPositivity;
  } catch (const quench::NoQuenchError& err) {
    std::cerr << "no quench: " << err.what() << "\n";
    return kExitNoQuench;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
