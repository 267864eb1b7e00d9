#include "quench/solver.hpp"

#include <algorithm>
#include <cmath>

#include "quench/spectral.hpp"

namespace quench {

double Forcing::F(double h, double beta) const {
  double value = std::pow(h, -beta);
  if (kind == ForcingKind::vortex) {
    value -= vortex_H0 * std::exp(-h);
  }
  return value;
}

double Forcing::f_tilde(double u, const Parameters& params) const {
  if (kind == ForcingKind::pure_power) return 0.0;
  const double h = std::pow(params.alpha, 1.0 / (params.beta + 1.0)) *
                   std::pow(u, -1.0 / params.alpha);
  return -vortex_H0 * std::pow(params.alpha, params.beta / (params.beta + 1.0)) *
         std::pow(u, 1.0 + 1.0 / params.alpha) * std::exp(-h);
}

namespace {

// Right-hand side Lap(h) - F(h) + source on the interior.
void physical_rhs(const GridFunction& h, double t, const Parameters& params,
                  const Forcing& forcing, const SourceFn& source,
                  std::vector<double>& out) {
  const int n = h.n();
  const double dx2 = h.dx() * h.dx();
  out.assign(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double lap = (h.values[i + 1] - 2.0 * h.values[i] + h.values[i - 1]) / dx2;
    out[i] = lap - forcing.F(h.values[i], params.beta);
    if (source) out[i] += source(h.x(i), t);
  }
}

}  // namespace

StepStatus step_physical(GridFunction& h, double dt_max, const Parameters& params,
                         const Forcing& forcing, const StepControl& control,
                         const SourceFn& source, const BoundaryFn& boundary) {
  check_positive(h);
  const int n = h.n();
  const double t = h.time_tag;
  const double min_h = h.min_value();
  double dt = std::min({dt_max, control.cfl_diffusion * h.dx() * h.dx(),
                        control.cfl_reaction * std::pow(min_h, params.beta + 1.0)});

  std::vector<double> k1, k2;
  GridFunction stage = h;
  for (int attempt = 0; attempt < 60; ++attempt) {
    if (dt < control.dt_floor) return StepStatus::quench_signal;
    physical_rhs(h, t, params, forcing, source, k1);
    bool positive = true;
    for (int i = 1; i + 1 < n; ++i) {
      stage.values[i] = h.values[i] + dt * k1[i];
      if (!(stage.values[i] > 0.0)) positive = false;
    }
    if (positive) {
      if (boundary) {
        auto [left, right] = boundary(t + dt);
        stage.values[0] = left;
        stage.values[n - 1] = right;
      } else {
        stage.values[0] = h.values[0];
        stage.values[n - 1] = h.values[n - 1];
      }
      physical_rhs(stage, t + dt, params, forcing, source, k2);
      GridFunction candidate = h;
      for (int i = 1; i + 1 < n; ++i) {
        candidate.values[i] = h.values[i] + 0.5 * dt * (k1[i] + k2[i]);
        if (!(candidate.values[i] > 0.0)) positive = false;
      }
      if (positive) {
        candidate.values[0] = stage.values[0];
        candidate.values[n - 1] = stage.values[n - 1];
        candidate.time_tag = t + dt;
        h = std::move(candidate);
        return StepStatus::accepted;
      }
    }
    dt *= 0.5;
  }
  return StepStatus::quench_signal;
}

SimRecord simulate_physical(GridFunction h0, const Parameters& params,
                            const Forcing& forcing, const SimOptions& options) {
  SimRecord record;
  GridFunction h = std::move(h0);
  check_positive(h);

  const bool s_spaced = std::isfinite(options.T_ref);
  double next_s = 0.0;
  if (s_spaced) {
    if (!(h.time_tag < options.T_ref)) {
      throw std::domain_error("simulate_physical: t0 must precede T_ref");
    }
    const double s_now = -std::log(options.T_ref - h.time_tag);
    next_s = s_now + options.snapshot_ds;
  }

  auto record_min = [&]() {
    const int i = h.argmin();
    record.min_h_series.push_back({h.time_tag, h.values[i], h.x(i)});
  };
  record.snapshots.push_back(h);
  record_min();

  for (long step = 0; step < options.max_steps; ++step) {
    if (h.min_value() <= options.h_stop) {
      record.quenched = true;
      break;
    }
    if (h.time_tag >= options.t_max) break;
    double dt_cap = std::min(options.dt_max, options.t_max - h.time_tag);
    if (s_spaced) {
      const double gap = options.T_ref - h.time_tag;
      if (gap > 0.0) {
        const double s_now = -std::log(gap);
        if (s_now >= options.s_end) {
          if (options.stop_at_s_end) break;
        } else {
          // Land on the next snapshot slice; the floor keeps rounding at a
          // slice boundary from collapsing the step.
          const double dt_to_slice = gap * (1.0 - std::exp(-(next_s - s_now)));
          dt_cap = std::min(dt_cap, std::max(dt_to_slice, 1e-4 * gap));
        }
      }
    }
    const StepStatus status =
        step_physical(h, dt_cap, params, forcing, options.control, options.source,
                      options.boundary);
    if (status == StepStatus::quench_signal) {
      record.quenched = true;
      break;
    }
    record_min();
    if (s_spaced && h.time_tag < options.T_ref) {
      const double s_now = -std::log(options.T_ref - h.time_tag);
      if (s_now >= next_s - 1e-10 && next_s <= options.s_end + 1e-9) {
        record.snapshots.push_back(h);
        next_s += options.snapshot_ds;
      }
    }
  }
  if (record.snapshots.back().time_tag != h.time_tag) {
    record.snapshots.push_back(h);
  }
  return record;
}

QuenchEstimate detect_quench(const SimRecord& record, double beta) {
  const auto& series = record.min_h_series;
  if (series.size() < 4) {
    throw NoQuenchError("detect_quench: series too short");
  }
  const double m_end = series.back().min_h;
  const double m_start = series.front().min_h;
  if (!(m_end < 0.9 * m_start)) {
    throw NoQuenchError("detect_quench: no decreasing tail");
  }
  // Flat law with a linear correction: t + m^{beta+1}/(beta+1) = T + c m^{beta+1}.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const auto& sample : series) {
    if (sample.min_h > 10.0 * m_end) continue;
    const double v = std::pow(sample.min_h, beta + 1.0);
    const double y = sample.t + v / (beta + 1.0);
    sx += v;
    sy += y;
    sxx += v * v;
    sxy += v * y;
    ++count;
  }
  if (count < 2) throw NoQuenchError("detect_quench: too few tail samples");
  const double denom = count * sxx - sx * sx;
  QuenchEstimate est;
  est.T_est = (denom != 0.0) ? (sy * sxx - sx * sxy) / denom : sy / count;

  const GridFunction& last = record.snapshots.back();
  const int i = std::clamp(last.argmin(), 1, last.n() - 2);
  const double ym = last.values[i - 1], y0 = last.values[i], yp = last.values[i + 1];
  const double curvature = ym - 2.0 * y0 + yp;
  double shift = 0.0;
  if (curvature > 0.0) shift = 0.5 * (ym - yp) / curvature;
  est.x0_est = last.x(i) + std::clamp(shift, -0.5, 0.5) * last.dx();
  return est;
}

SimilaritySlice transform_to_similarity(const GridFunction& h, double t, double T_est,
                                        const Parameters& params,
                                        const SimilarityGridSpec& spec, double x0,
                                        double h_boundary) {
  if (!(t < T_est)) {
    throw std::domain_error("transform_to_similarity: requires t < T_est");
  }
  check_positive(h);
  const double gap = T_est - t;
  const double root = std::sqrt(gap);
  const double s = -std::log(gap);
  const double u_scale = std::pow(params.alpha, params.alpha / (params.beta + 1.0));
  const double w_scale = std::pow(gap, 1.0 / (params.p - 1.0));

  const int n = 2 * static_cast<int>(std::round(spec.y_max / spec.dy)) + 1;
  SimilaritySlice slice;
  slice.s = s;
  slice.w.values.resize(n);
  slice.w.x_min = -spec.y_max;
  slice.w.x_max = spec.y_max;
  slice.w.kind = FieldKind::w;
  slice.w.time_tag = s;
  slice.q = slice.w;
  slice.q.kind = FieldKind::q;
  slice.y_covered = std::min(h.x_max - x0, x0 - h.x_min) / root;

  const double u_far = u_scale / std::pow(h_boundary, params.alpha);
  for (int i = 0; i < n; ++i) {
    const double y = slice.w.x(i);
    const double x = x0 + y * root;
    double u;
    if (x >= h.x_min && x <= h.x_max) {
      const double hv = interp_monotone_cubic(h, x);
      u = u_scale / std::pow(hv, params.alpha);
    } else {
      u = u_far;  // exterior-extrapolated: image of the Dirichlet data
    }
    slice.w.values[i] = w_scale * u;
    slice.q.values[i] = slice.w.values[i] - phi_similarity(y, s, params);
  }
  return slice;
}

GridFunction transform_from_similarity(const GridFunction& w, double s, double T,
                                       const Parameters& params, double x_min,
                                       double x_max, int n, double x0) {
  const double gap = std::exp(-s);
  const double root = std::sqrt(gap);
  GridFunction h;
  h.values.resize(n);
  h.x_min = x_min;
  h.x_max = x_max;
  h.kind = FieldKind::h;
  h.time_tag = T - gap;
  const double alpha_root = std::pow(params.alpha, 1.0 / (params.beta + 1.0));
  for (int i = 0; i < n; ++i) {
    const double y = (h.x(i) - x0) / root;
    const double wv = interp_monotone_cubic(w, y);
    const double u = wv / std::pow(gap, 1.0 / (params.p - 1.0));
    h.values[i] = alpha_root * std::pow(u, -1.0 / params.alpha);
  }
  return h;
}

namespace {

void similarity_rhs(const GridFunction& q, double s, const Parameters& params,
                    const Forcing& forcing, const SimilarityTerms& terms,
                    std::vector<double>& out) {
  const int n = q.n();
  const double dy = q.dx();
  out.assign(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    const double y = q.x(i);
    const double qv = q.values[i];
    const double q_y = (q.values[i + 1] - q.values[i - 1]) / (2.0 * dy);
    const double q_yy = (q.values[i + 1] - 2.0 * qv + q.values[i - 1]) / (dy * dy);
    const double phi = phi_similarity(y, s, params);
    const double phi_y = phi_similarity_dy(y, s, params);
    const double w = phi + qv;
    if (!(w > 0.0) && (terms.use_B || terms.use_T || terms.use_L)) {
      throw PositivityLossError("step_similarity: phi + q lost positivity");
    }
    double rhs = q_yy - 0.5 * y * q_y + qv;  // L q
    if (terms.use_V) rhs += potential_V(y, s, params) * qv;
    if (terms.use_B) {
      rhs += std::pow(w, params.p) - std::pow(phi, params.p) -
             params.p * std::pow(phi, params.p - 1.0) * qv;
    }
    if (terms.use_T) {
      const double w_y = phi_y + q_y;
      rhs += -params.a * w_y * w_y / w + params.a * phi_y * phi_y / phi;
    }
    if (terms.use_R) rhs += remainder_R(y, s, params);
    if (terms.use_L && forcing.kind != ForcingKind::pure_power) {
      const double expo = std::exp(s / (params.p - 1.0));
      rhs += forcing.f_tilde(expo * w, params) / std::pow(expo, params.p);
    }
    out[i] = rhs;
  }
}

std::pair<double, double> default_similarity_bc(double s, const Parameters& params,
                                                double y_max, double h_boundary) {
  const double u_far = std::pow(params.alpha, params.alpha / (params.beta + 1.0)) /
                       std::pow(h_boundary, params.alpha);
  const double w_far = std::exp(-s / (params.p - 1.0)) * u_far;
  return {w_far - phi_similarity(-y_max, s, params),
          w_far - phi_similarity(y_max, s, params)};
}

}  // namespace

void step_similarity(GridFunction& q, double ds, const Parameters& params,
                     const Forcing& forcing, const SimilarityTerms& terms,
                     const SimilarityBoundaryFn& boundary, double h_boundary) {
  const int n = q.n();
  const double s = q.time_tag;
  std::vector<double> k1, k2;
  similarity_rhs(q, s, params, forcing, terms, k1);
  GridFunction stage = q;
  for (int i = 1; i + 1 < n; ++i) stage.values[i] = q.values[i] + ds * k1[i];
  auto bc1 = boundary ? boundary(s + ds)
                      : default_similarity_bc(s + ds, params, q.x_max, h_boundary);
  stage.values[0] = bc1.first;
  stage.values[n - 1] = bc1.second;
  stage.time_tag = s + ds;
  similarity_rhs(stage, s + ds, params, forcing, terms, k2);
  for (int i = 1; i + 1 < n; ++i) {
    q.values[i] += 0.5 * ds * (k1[i] + k2[i]);
  }
  q.values[0] = bc1.first;
  q.values[n - 1] = bc1.second;
  q.time_tag = s + ds;
}

void advance_similarity(GridFunction& q, double s_target, const Parameters& params,
                        const Forcing& forcing, const SimilarityTerms& terms,
                        const SimilarityBoundaryFn& boundary, double h_boundary) {
  const double dy = q.dx();
  const double y_max = std::max(std::fabs(q.x_min), std::fabs(q.x_max));
  const double ds_stable = std::min(0.2 * dy * dy, dy / std::max(y_max, 1.0));
  while (q.time_tag < s_target - 1e-13) {
    const double ds = std::min(ds_stable, s_target - q.time_tag);
    step_similarity(q, ds, params, forcing, terms, boundary, h_boundary);
  }
}

double scaling_invariance_check(const GridFunction& u0, double lambda,
                                const Parameters& params, double horizon,
                                double window) {
  if (u0.kind != FieldKind::u) {
    throw std::invalid_argument("scaling_invariance_check: expects a u-field");
  }
  check_positive(u0);
  const double exponent = 2.0 / (params.p - 1.0);
  const double u_scale = std::pow(params.alpha, params.alpha / (params.beta + 1.0));
  const Forcing pure{ForcingKind::pure_power};

  // The equation is autonomous; run both routes on a clock starting at zero
  // so the result is independent of the incoming time tag.
  auto to_h = [&](const GridFunction& u) {
    GridFunction h = u;
    h.kind = FieldKind::h;
    h.time_tag = 0.0;
    for (double& v : h.values) {
      v = std::pow(params.alpha, 1.0 / (params.beta + 1.0)) *
          std::pow(v, -1.0 / params.alpha);
    }
    return h;
  };
  auto to_u = [&](const GridFunction& h) {
    GridFunction u = h;
    u.kind = FieldKind::u;
    for (double& v : u.values) v = u_scale / std::pow(v, params.alpha);
    return u;
  };
  auto evolve = [&](GridFunction h, double t_final) {
    SimOptions opts;
    opts.t_max = t_final;
    opts.h_stop = 0.0;
    while (h.time_tag < t_final - 1e-15) {
      if (step_physical(h, t_final - h.time_tag, params, pure) ==
          StepStatus::quench_signal) {
        throw PositivityLossError("scaling_invariance_check: quenched mid-test");
      }
    }
    return h;
  };

  // Route A: evolve for lambda^2 * horizon, then rescale.
  GridFunction uA = to_u(evolve(to_h(u0), lambda * lambda * horizon));

  // Route B: rescale first, then evolve for horizon. Route B keeps the
  // original grid spacing rather than the image spacing dx/lambda, so the
  // routes discretize independently and the commutator measures the genuine
  // truncation difference instead of an exactly equivariant scheme.
  GridFunction v0;
  v0.kind = FieldKind::u;
  v0.x_min = u0.x_min / lambda;
  v0.x_max = u0.x_max / lambda;
  v0.time_tag = 0.0;
  const int n_b =
      static_cast<int>(std::round((v0.x_max - v0.x_min) / u0.dx())) + 1;
  v0.values.resize(std::max(n_b, 9));
  GridFunction scaledA = v0;
  const double factor = std::pow(lambda, exponent);
  for (int i = 0; i < v0.n(); ++i) {
    const double xl = lambda * v0.x(i);
    const int j = static_cast<int>(std::round((xl - u0.x_min) / u0.dx()));
    const bool on_node =
        j >= 0 && j < u0.n() && std::fabs(u0.x(j) - xl) < 1e-12 * (1.0 + std::fabs(xl));
    v0.values[i] = factor * (on_node ? u0.values[j] : interp_cubic(u0, xl));
    scaledA.values[i] = factor * (on_node ? uA.values[j] : interp_cubic(uA, xl));
  }
  GridFunction uB = to_u(evolve(to_h(v0), horizon));

  double sup = 0.0;
  for (int i = 0; i < uB.n(); ++i) {
    if (std::fabs(uB.x(i)) > window / lambda) continue;
    sup = std::max(sup, std::fabs(uB.values[i] - scaledA.values[i]));
  }
  return sup;
}

}  // namespace quench
